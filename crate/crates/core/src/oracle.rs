//! Brute-force references: closed-form solution sets for affine instances,
//! grid-search projections and an exhaustive active-subset QP.
//!
//! Everything here trades speed for being easy to audit, and is meant for
//! small instances (dimension <= 8, grid search in dimension <= 3).

use nalgebra::{DMatrix, DVector};

use crate::convex::{ConvexSet, HalfSpace};
use crate::equilibrium::{ep_residual, Bifunction, Family};
use crate::error::{check_dim, Error, Result};
use crate::mapping::{fixed_point_residual, Map};
use crate::solver::ProblemInstance;
use crate::space::{LinearOperator, Vector};

/// Relative singular-value cutoff for rank decisions.
const RANK_TOL: f64 = 1e-10;
/// Residual above which a stacked linear system is declared inconsistent.
const CONSISTENCY_TOL: f64 = 1e-9;
/// Membership tolerance for KKT candidates.
const KKT_TOL: f64 = 1e-10;
/// Enumeration limit on the number of polyhedral constraints.
const MAX_ENUMERATED: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionSet {
    Point(Vector),
    /// `{offset + basis t}`; `basis` is `dim x k`.
    AffineSet { basis: LinearOperator, offset: Vector },
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSolutionSet {
    pub set: SolutionSet,
    /// How each constraint entered the system, in order.
    pub provenance: Vec<String>,
}

impl AnalyticSolutionSet {
    pub fn is_empty(&self) -> bool {
        matches!(self.set, SolutionSet::Empty)
    }

    /// A few members: the offset/point plus offset ± each basis column.
    pub fn sample_members(&self) -> Vec<Vector> {
        match &self.set {
            SolutionSet::Empty => Vec::new(),
            SolutionSet::Point(p) => vec![p.clone()],
            SolutionSet::AffineSet { basis, offset } => {
                let mut out = vec![offset.clone()];
                for j in 0..basis.cols() {
                    let col: Vec<f64> = (0..basis.rows()).map(|i| basis.get(i, j)).collect();
                    let col = Vector::from(col);
                    out.push(offset + &col);
                    out.push(offset - &col);
                }
                out
            }
        }
    }
}

/// Linear equations `E z = e` accumulated row by row.
struct Stack {
    dim: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl Stack {
    fn push(&mut self, m: &LinearOperator, rhs: &Vector) {
        for i in 0..m.rows() {
            self.rows.push(m.row(i).to_vec());
            self.rhs.push(rhs[i]);
        }
    }
}

/// A set the answer must additionally lie in: `{z : map z ∈ set}`.
struct Membership {
    map: Option<LinearOperator>,
    set: ConvexSet,
    what: String,
}

/// Closed-form solution set of an instance built from affine pieces.
///
/// Supported: `Zero`, `MonotoneAffine` and `ConvexDifference` families on the
/// whole space (solution set `{Mz + q = 0}`), the same families with a
/// positive definite matrix on a polyhedral domain (unique solution by KKT
/// enumeration), affine maps and compositions of affine/negation maps
/// (`{(I - B) z = b}`), and projections onto the whole space or an affine
/// subspace. Convex domains of other shapes are only supported when the
/// final answer is a single point, which is then checked for membership.
pub fn solve_solution_set(problem: &ProblemInstance) -> Result<AnalyticSolutionSet> {
    problem.validate()?;
    let d = problem.dim_h1;
    let mut stack = Stack {
        dim: d,
        rows: Vec::new(),
        rhs: Vec::new(),
    };
    let mut members: Vec<Membership> = Vec::new();
    let mut provenance = Vec::new();

    add_domain(&problem.c, None, "C", &mut stack, &mut members, &mut provenance);
    for (i, fi) in problem.f.iter().enumerate() {
        let eq = equilibrium_equations(fi, &format!("EP(f[{i}])"), &mut provenance)?;
        if let Some((m, rhs)) = eq {
            stack.push(&m, &rhs);
        }
    }
    for (i, (gi, ai)) in problem.g.iter().zip(&problem.a).enumerate() {
        let tag = format!("A[{i}] z in EP(g[{i}])");
        add_domain(&problem.q, Some(ai), &tag, &mut stack, &mut members, &mut provenance);
        if let Some((m, rhs)) = equilibrium_equations(gi, &tag, &mut provenance)? {
            // m (A z) = rhs
            stack.push(&m.compose(ai)?, &rhs);
        }
    }
    for (i, si) in problem.s.iter().enumerate() {
        let tag = format!("F(S[{i}])");
        match &si.map {
            Map::ProjectionOnto { set } => {
                add_domain(set, None, &tag, &mut stack, &mut members, &mut provenance)
            }
            map => {
                let (b, shift) = map.as_affine(d).ok_or_else(|| {
                    Error::Unsupported(format!("{tag}: map is not affine"))
                })?;
                // (I - B) z = shift
                let lhs = LinearOperator::identity(d).add_scaled(-1.0, &b)?;
                stack.push(&lhs, &shift);
                provenance.push(format!("{tag}: (I - B) z = b"));
            }
        }
    }

    let set = solve_stack(&stack)?;
    let set = match set {
        SolutionSet::Point(p) => {
            if members.iter().all(|m| satisfies(m, &p)) {
                SolutionSet::Point(p)
            } else {
                let failed: Vec<&str> = members
                    .iter()
                    .filter(|m| !satisfies(m, &p))
                    .map(|m| m.what.as_str())
                    .collect();
                provenance.push(format!("point violates {}", failed.join(", ")));
                SolutionSet::Empty
            }
        }
        SolutionSet::AffineSet { .. } if !members.is_empty() => {
            return Err(Error::Unsupported(format!(
                "affine solution set intersected with non-affine sets ({})",
                members.iter().map(|m| m.what.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
        other => other,
    };
    Ok(AnalyticSolutionSet { set, provenance })
}

fn satisfies(m: &Membership, p: &Vector) -> bool {
    let z = match &m.map {
        Some(a) => a.apply_unchecked(p),
        None => p.clone(),
    };
    m.set.contains(&z, 1e-9)
}

/// Records `{z : map z ∈ set}`: affine subspaces become equations, the
/// whole space is dropped, anything else is checked at the end.
fn add_domain(
    set: &ConvexSet,
    map: Option<&LinearOperator>,
    tag: &str,
    stack: &mut Stack,
    members: &mut Vec<Membership>,
    provenance: &mut Vec<String>,
) {
    match set {
        ConvexSet::WholeSpace => {}
        ConvexSet::AffineSubspace { basis, offset } => {
            // z - offset ⟂ null(basis'), i.e. N' (w - offset) = 0 with N spanning
            // the orthogonal complement of the basis columns.
            let comp = orthogonal_complement(basis);
            let nt = comp.transpose();
            let rhs = nt.apply_unchecked(offset);
            match map {
                Some(a) => stack.push(&nt.compose(a).expect("shapes checked"), &rhs),
                None => stack.push(&nt, &rhs),
            }
            provenance.push(format!("{tag}: affine subspace equations"));
        }
        other => {
            members.push(Membership {
                map: map.cloned(),
                set: other.clone(),
                what: tag.to_string(),
            });
            provenance.push(format!("{tag}: membership check"));
        }
    }
}

/// Linear equations describing the equilibrium set of `f`, or `None` when
/// the family is zero (the set is then just the domain, handled elsewhere).
fn equilibrium_equations(
    f: &Bifunction,
    tag: &str,
    provenance: &mut Vec<String>,
) -> Result<Option<(LinearOperator, Vector)>> {
    let (m, q) = match &f.family {
        Family::Zero => return Ok(None),
        Family::MonotoneAffine { m, q } => (m, q),
        Family::ConvexDifference { p, c } => (p, c),
    };
    match &f.domain {
        ConvexSet::WholeSpace => {
            provenance.push(format!("{tag}: M z + q = 0"));
            Ok(Some((m.clone(), -q)))
        }
        domain if domain.is_polyhedral() => {
            if f.monotonicity_modulus() <= RANK_TOL {
                return Err(Error::Unsupported(format!(
                    "{tag}: variational inequality on a polyhedron needs a positive definite matrix"
                )));
            }
            let z = kkt_solve(m, q, domain, q.dim())?;
            provenance.push(format!("{tag}: unique KKT point on polyhedral domain"));
            let d = q.dim();
            Ok(Some((LinearOperator::identity(d), z)))
        }
        _ => Err(Error::Unsupported(format!(
            "{tag}: variational inequality on a non-polyhedral domain"
        ))),
    }
}

/// Solves `0 ∈ M z + q + N_C(z)` on a polyhedron by enumerating active sets.
fn kkt_solve(m: &LinearOperator, q: &Vector, domain: &ConvexSet, d: usize) -> Result<Vector> {
    let halves = domain
        .as_halfspaces(d)
        .ok_or_else(|| Error::Unsupported("domain is not polyhedral".into()))?;
    let halves: Vec<HalfSpace> = halves.into_iter().filter(|h| !h.is_degenerate()).collect();
    if halves.len() > MAX_ENUMERATED {
        return Err(Error::Unsupported(format!(
            "{} constraints exceed the enumeration limit",
            halves.len()
        )));
    }
    for subset in subsets(halves.len(), d) {
        let k = subset.len();
        // [M  A_S'] [z]   [-q ]
        // [A_S  0 ] [l] = [b_S]
        let size = d + k;
        let mut kkt = DMatrix::<f64>::zeros(size, size);
        let mut rhs = DVector::<f64>::zeros(size);
        for i in 0..d {
            for j in 0..d {
                kkt[(i, j)] = m.get(i, j);
            }
            rhs[i] = -q[i];
        }
        for (c, &j) in subset.iter().enumerate() {
            for i in 0..d {
                kkt[(i, d + c)] = halves[j].normal[i];
                kkt[(d + c, i)] = halves[j].normal[i];
            }
            rhs[d + c] = halves[j].offset;
        }
        let Some(sol) = kkt.clone().lu().solve(&rhs) else {
            continue;
        };
        if (&kkt * &sol - &rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
            continue;
        }
        if (0..k).any(|c| sol[d + c] < -KKT_TOL) {
            continue;
        }
        let z = Vector::from(sol.rows(0, d).iter().copied().collect::<Vec<_>>());
        if halves.iter().all(|h| h.contains(&z, KKT_TOL)) {
            return Ok(z);
        }
    }
    Err(Error::Infeasible("no KKT point found (empty domain?)".into()))
}

/// All index subsets of `0..m` with at most `max_len` elements, smallest first.
fn subsets(m: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u64..1 << m)
        .filter(|mask| mask.count_ones() as usize <= max_len)
        .map(|mask| (0..m).filter(|j| mask >> j & 1 == 1).collect())
        .collect();
    out.sort_by_key(|s| s.len());
    out
}

/// Columns spanning the orthogonal complement of the column space of `b`.
fn orthogonal_complement(b: &LinearOperator) -> LinearOperator {
    let d = b.rows();
    let mat = b.to_nalgebra();
    // Full SVD via the square Gram-like padding keeps every left vector.
    let mut padded = DMatrix::<f64>::zeros(d, d.max(b.cols()));
    padded.view_mut((0, 0), (d, b.cols())).copy_from(&mat);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..d)
        .filter(|&i| i >= svd.singular_values.len() || svd.singular_values[i] <= RANK_TOL * smax.max(1.0))
        .collect();
    let mut data = Vec::with_capacity(d * keep.len());
    for i in 0..d {
        for &j in &keep {
            data.push(u[(i, j)]);
        }
    }
    LinearOperator::from_row_major(d, keep.len(), data).expect("finite entries")
}

/// Solves the stacked system: a point, an affine set, or empty.
fn solve_stack(stack: &Stack) -> Result<SolutionSet> {
    let d = stack.dim;
    if stack.rows.is_empty() {
        return Ok(SolutionSet::AffineSet {
            basis: LinearOperator::identity(d),
            offset: Vector::zeros(d),
        });
    }
    let m = stack.rows.len();
    let e = DMatrix::from_fn(m, d, |i, j| stack.rows[i][j]);
    let rhs = DVector::from_column_slice(&stack.rhs);
    // Pad to at least d rows so the SVD exposes the full right null space.
    let rows = m.max(d);
    let mut padded = DMatrix::<f64>::zeros(rows, d);
    padded.view_mut((0, 0), (m, d)).copy_from(&e);
    let mut padded_rhs = DVector::<f64>::zeros(rows);
    padded_rhs.rows_mut(0, m).copy_from(&rhs);

    let svd = padded.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_TOL * smax.max(1.0);
    let z = svd
        .solve(&padded_rhs, cutoff)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let residual = (&e * &z - &rhs).norm();
    if residual > CONSISTENCY_TOL * (1.0 + rhs.norm()) {
        return Ok(SolutionSet::Empty);
    }
    let v_t = svd.v_t.expect("right vectors requested");
    let null: Vec<usize> = (0..d).filter(|&i| svd.singular_values[i] <= cutoff).collect();
    let offset = Vector::from(z.iter().copied().collect::<Vec<_>>());
    if null.is_empty() {
        return Ok(SolutionSet::Point(offset));
    }
    let mut data = Vec::with_capacity(d * null.len());
    for i in 0..d {
        for &j in &null {
            data.push(v_t[(j, i)]);
        }
    }
    Ok(SolutionSet::AffineSet {
        basis: LinearOperator::from_row_major(d, null.len(), data)?,
        offset,
    })
}

/// Nearest point of the solution set to `x1`.
pub fn project_onto_solution_set(set: &AnalyticSolutionSet, x1: &Vector) -> Result<Vector> {
    match &set.set {
        SolutionSet::Empty => Err(Error::NoSolution),
        SolutionSet::Point(p) => {
            check_dim(p.dim(), x1.dim())?;
            Ok(p.clone())
        }
        SolutionSet::AffineSet { basis, offset } => {
            check_dim(offset.dim(), x1.dim())?;
            // offset + B t with (B'B) t = B'(x1 - offset)
            let b = basis.to_nalgebra();
            let diff = (x1 - offset).to_nalgebra();
            let normal = b.transpose() * &b;
            let rhs = b.transpose() * diff;
            let t = normal
                .clone()
                .cholesky()
                .map(|c| c.solve(&rhs))
                .or_else(|| normal.lu().solve(&rhs))
                .ok_or_else(|| Error::Numerical("affine basis is rank deficient".into()))?;
            Ok(offset + &Vector::from((b * t).iter().copied().collect::<Vec<_>>()))
        }
    }
}

/// Largest residual of `z` against every piece of the instance: equilibrium
/// residuals (with `r = 1`), split residuals, fixed-point residuals and
/// distance to `C`.
pub fn member_residual(problem: &ProblemInstance, z: &Vector) -> Result<f64> {
    let mut worst = problem.c.distance(z)?;
    for i in 0..problem.families() {
        worst = worst.max(ep_residual(&problem.f[i], z, 1.0)?);
        let az = problem.a[i].apply(z)?;
        worst = worst.max(ep_residual(&problem.g[i], &az, 1.0)?);
        worst = worst.max(fixed_point_residual(&problem.s[i], z)?);
    }
    Ok(worst)
}

/// Nearest feasible point of a grid over `[lower, upper]` at spacing `step`,
/// refined once at spacing `step / 100` around the coarse winner.
///
/// Along a flat stretch of boundary the coarse winner can sit roughly
/// `(step^2 |x - z|)^(1/3)` away from the true nearest point, so the refined
/// window spans twice that (and at least one coarse cell) in each direction.
/// Feasible means inside `base` and all `halves` (tolerance 0).
pub fn grid_project(
    base: &ConvexSet,
    halves: &[HalfSpace],
    x: &Vector,
    step: f64,
    lower: &Vector,
    upper: &Vector,
) -> Result<Vector> {
    let d = x.dim();
    if d == 0 || d > 3 {
        return Err(Error::InvalidArgument(format!("grid search supports dims 1..=3, got {d}")));
    }
    check_dim(d, lower.dim())?;
    check_dim(d, upper.dim())?;
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("grid step must be positive".into()));
    }
    let feasible = |z: &Vector| base.contains(z, 0.0) && halves.iter().all(|h| h.value(z) <= 0.0);
    let coarse = grid_search(x, lower.as_slice(), upper.as_slice(), step, &feasible)
        .ok_or_else(|| Error::Infeasible("no feasible grid point".into()))?;
    let window = step.max(2.0 * (step * step * coarse.dist(x)).cbrt());
    let lo: Vec<f64> = coarse.iter().zip(lower.iter()).map(|(c, l)| (c - window).max(*l)).collect();
    let hi: Vec<f64> = coarse.iter().zip(upper.iter()).map(|(c, u)| (c + window).min(*u)).collect();
    Ok(grid_search(x, &lo, &hi, step / 100.0, &feasible).unwrap_or(coarse))
}

/// Exhaustive scan in lexicographic order; ties keep the first point found.
/// Along each row only the indices strictly closer to `x` than the current
/// best are visited, which changes nothing about the result.
fn grid_search(
    x: &Vector,
    lower: &[f64],
    upper: &[f64],
    step: f64,
    feasible: &dyn Fn(&Vector) -> bool,
) -> Option<Vector> {
    let d = lower.len();
    let last = d - 1;
    let counts: Vec<usize> = (0..d)
        .map(|i| ((upper[i] - lower[i]) / step).floor().max(0.0) as usize + 1)
        .collect();
    let mut idx = vec![0usize; d];
    let mut z = Vector::zeros(d);
    let mut best: Option<(f64, Vector)> = None;
    loop {
        let mut partial = 0.0;
        for i in 0..last {
            let c = lower[i] + idx[i] as f64 * step;
            z.as_mut_slice()[i] = c;
            partial += (c - x[i]) * (c - x[i]);
        }
        let (first, end) = match &best {
            None => (0, counts[last]),
            Some((b, _)) if *b <= partial => (0, 0),
            Some((b, _)) => {
                // (c - x_last)^2 < b - partial
                let half = (b - partial).sqrt();
                let lo = ((x[last] - half - lower[last]) / step).floor().max(0.0) as usize;
                let hi = (((x[last] + half - lower[last]) / step).ceil() as usize + 1).min(counts[last]);
                (lo, hi)
            }
        };
        for j in first..end {
            let c = lower[last] + j as f64 * step;
            let dist = partial + (c - x[last]) * (c - x[last]);
            if best.as_ref().map_or(true, |(b, _)| dist < *b) {
                z.as_mut_slice()[last] = c;
                if feasible(&z) {
                    best = Some((dist, z.clone()));
                }
            }
        }
        // odometer over the leading coordinates, last of them fastest
        let mut k = last;
        loop {
            if k == 0 {
                return best.map(|(_, z)| z);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Nearest point of `{z : a_j' z <= b_j}` by trying every active subset of
/// size at most `dim` and keeping the closest KKT-feasible candidate.
pub fn brute_force_polyhedron_projection(halves: &[HalfSpace], x: &Vector) -> Result<Vector> {
    let d = x.dim();
    let live: Vec<&HalfSpace> = halves.iter().filter(|h| !h.is_degenerate()).collect();
    if live.len() > MAX_ENUMERATED {
        return Err(Error::Unsupported("too many constraints to enumerate".into()));
    }
    let mut best: Option<(f64, Vector)> = None;
    for subset in subsets(live.len(), d) {
        // z = x - A_S' l with A_S A_S' l = A_S x - b_S
        let k = subset.len();
        let z = if k == 0 {
            x.clone()
        } else {
            let a = DMatrix::from_fn(k, d, |r, c| live[subset[r]].normal[c]);
            let gram = &a * a.transpose();
            let rhs = DVector::from_fn(k, |r, _| {
                live[subset[r]].normal.dot(x) - live[subset[r]].offset
            });
            let Some(l) = gram.clone().lu().solve(&rhs) else {
                continue;
            };
            if (&gram * &l - &rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
                continue;
            }
            if l.iter().any(|v| *v < -KKT_TOL) {
                continue;
            }
            let shift = a.transpose() * l;
            x - &Vector::from(shift.iter().copied().collect::<Vec<_>>())
        };
        if !live.iter().all(|h| h.value(&z) <= 1e-9 * (1.0 + h.normal.norm())) {
            continue;
        }
        let dist = z.dist(x);
        if best.as_ref().map_or(true, |(b, _)| dist < *b) {
            best = Some((dist, z));
        }
    }
    best.map(|(_, z)| z)
        .ok_or_else(|| Error::Infeasible("no feasible active subset".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::MappingSpec;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x)
    }

    fn base_instance(d: usize) -> ProblemInstance {
        ProblemInstance {
            dim_h1: d,
            dim_h2: d,
            c: ConvexSet::WholeSpace,
            q: ConvexSet::WholeSpace,
            f: vec![Bifunction::zero(ConvexSet::WholeSpace)],
            g: vec![Bifunction::zero(ConvexSet::WholeSpace)],
            a: vec![LinearOperator::identity(d)],
            s: vec![MappingSpec::nonexpansive(Map::identity(d))],
        }
    }

    #[test]
    fn whole_space_solution_set() {
        let s = solve_solution_set(&base_instance(2)).unwrap();
        match s.set {
            SolutionSet::AffineSet { basis, .. } => assert_eq!(basis.cols(), 2),
            other => panic!("expected whole space, got {other:?}"),
        }
    }

    #[test]
    fn single_point_solution_set() {
        let mut p = base_instance(1);
        p.f = vec![Bifunction::monotone_affine(
            LinearOperator::identity(1),
            v(&[0.0]),
            ConvexSet::WholeSpace,
        )
        .unwrap()];
        let s = solve_solution_set(&p).unwrap();
        assert_eq!(s.set, SolutionSet::Point(v(&[0.0])));
        assert_eq!(project_onto_solution_set(&s, &v(&[1.0])).unwrap(), v(&[0.0]));
    }

    #[test]
    fn disjoint_pieces_give_empty() {
        let mut p = base_instance(1);
        p.f = vec![Bifunction::monotone_affine(
            LinearOperator::identity(1),
            v(&[-2.0]),
            ConvexSet::WholeSpace,
        )
        .unwrap()];
        p.s = vec![MappingSpec::nonexpansive(Map::Negation)];
        let s = solve_solution_set(&p).unwrap();
        assert!(s.is_empty());
        assert_eq!(project_onto_solution_set(&s, &v(&[1.0])), Err(Error::NoSolution));
    }

    #[test]
    fn affine_projection_examples() {
        let axis = AnalyticSolutionSet {
            set: SolutionSet::AffineSet {
                basis: LinearOperator::from_rows(vec![vec![1.0], vec![0.0]]).unwrap(),
                offset: v(&[0.0, 0.0]),
            },
            provenance: vec![],
        };
        assert_eq!(project_onto_solution_set(&axis, &v(&[3.0, 4.0])).unwrap(), v(&[3.0, 0.0]));

        // z1 + z2 = 1 through the constraint z1 + z2 - 1 = 0
        let mut p = base_instance(2);
        p.f = vec![Bifunction::monotone_affine(
            LinearOperator::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap(),
            v(&[-1.0, -1.0]),
            ConvexSet::WholeSpace,
        )
        .unwrap()];
        let s = solve_solution_set(&p).unwrap();
        let z = project_onto_solution_set(&s, &v(&[0.0, 0.0])).unwrap();
        assert!(z.dist(&v(&[0.5, 0.5])) < 1e-12);
        assert!(member_residual(&p, &z).unwrap() < 1e-9);
    }

    #[test]
    fn kkt_on_box() {
        // f(x,y) = <x - 3, y - x> on [0,1]: solution is the projection of 3, i.e. 1
        let c = ConvexSet::boxed(v(&[0.0]), v(&[1.0])).unwrap();
        let mut p = base_instance(1);
        p.c = c.clone();
        p.f = vec![Bifunction::monotone_affine(LinearOperator::identity(1), v(&[-3.0]), c.clone()).unwrap()];
        p.s = vec![MappingSpec::nonexpansive(Map::ProjectionOnto { set: ConvexSet::WholeSpace })];
        let s = solve_solution_set(&p).unwrap();
        match &s.set {
            SolutionSet::Point(z) => assert!((z[0] - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_examples() {
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let lo = v(&[-2.0, -2.0]);
        let hi = v(&[2.0, 2.0]);
        let z = grid_project(&ball, &[], &v(&[2.0, 0.0]), 1e-2, &lo, &hi).unwrap();
        assert!(z.dist(&v(&[1.0, 0.0])) < 2e-3);
        let h = HalfSpace::new(v(&[1.0, 0.0]), 0.0).unwrap();
        let z = grid_project(&ConvexSet::WholeSpace, &[h], &v(&[1.0, 1.0]), 1e-2, &lo, &hi).unwrap();
        assert!(z.dist(&v(&[0.0, 1.0])) < 2e-3);
        assert!(grid_project(&ball, &[], &v(&[0.0; 4][..]), 0.1, &v(&[0.0; 4]), &v(&[1.0; 4])).is_err());
    }

    #[test]
    fn brute_force_qp_examples() {
        let halves = vec![
            HalfSpace::new(v(&[1.0, 0.0]), 0.0).unwrap(),
            HalfSpace::new(v(&[0.0, 1.0]), 0.0).unwrap(),
        ];
        let z = brute_force_polyhedron_projection(&halves, &v(&[1.0, 1.0])).unwrap();
        assert!(z.norm() < 1e-14);
        let inf = vec![
            HalfSpace::new(v(&[1.0]), -1.0).unwrap(),
            HalfSpace::new(v(&[-1.0]), -1.0).unwrap(),
        ];
        assert!(brute_force_polyhedron_projection(&inf, &v(&[0.0])).is_err());
    }
}
