//! Closed convex sets and metric projections onto them.
//!
//! Projections onto a base set intersected with a list of half-spaces go
//! through the dual active-set solver in [`qp`] when everything is
//! polyhedral, and through Dykstra's alternating projections (base set vs.
//! polyhedron, each with its own correction vector) otherwise.

pub mod qp;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::{LinearOperator, Vector};

pub use qp::ActiveSetQp;

/// Tolerance for closed-form projections and membership checks.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// Default tolerance for iterative projections.
pub const ITERATIVE_TOL: f64 = 1e-8;
/// Iteration cap for Dykstra's method.
pub const DYKSTRA_MAX_ITER: usize = 100_000;

/// `{z : <normal, z> <= offset}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vector,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let h = Self { normal, offset };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.offset.is_finite() || !self.normal.is_finite() {
            return Err(Error::InvalidArgument("half-space data must be finite".into()));
        }
        if self.is_degenerate() && self.offset < 0.0 {
            return Err(Error::InvalidHalfSpace {
                offset: self.offset,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// Zero normal: the set is all of space (or empty when the offset is negative).
    pub fn is_degenerate(&self) -> bool {
        self.normal.iter().all(|v| *v == 0.0)
    }

    /// `<a, z> - b`; nonpositive inside.
    pub fn value(&self, z: &Vector) -> f64 {
        self.normal.dot(z) - self.offset
    }

    /// Signed distance to the boundary hyperplane, positive outside.
    /// Degenerate half-spaces report `-inf` (everything is inside).
    pub fn signed_distance(&self, z: &Vector) -> f64 {
        let n = self.normal.norm();
        if n == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.value(z) / n
    }

    pub fn contains(&self, z: &Vector, tol: f64) -> bool {
        self.signed_distance(z) <= tol
    }

    /// Unit normal and rescaled offset, `None` for degenerate half-spaces.
    pub fn normalized(&self) -> Option<(Vector, f64)> {
        let n = self.normal.norm();
        if n == 0.0 {
            None
        } else {
            Some((self.normal.scaled(1.0 / n), self.offset / n))
        }
    }
}

/// Closed convex subsets of `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ConvexSet {
    WholeSpace,
    Box {
        lower: Vector,
        upper: Vector,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    HalfSpaceIntersection {
        halves: Vec<HalfSpace>,
    },
    /// `{offset + basis * t}`; the basis columns span the direction space.
    AffineSubspace {
        basis: LinearOperator,
        offset: Vector,
    },
}

impl ConvexSet {
    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let s = ConvexSet::Ball { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        let s = ConvexSet::Box { lower, upper };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSet::WholeSpace => Ok(()),
            ConvexSet::Box { lower, upper } => {
                check_dim(lower.dim(), upper.dim())?;
                if !lower.is_finite() || !upper.is_finite() {
                    return Err(Error::InvalidArgument("box bounds must be finite".into()));
                }
                if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
                    return Err(Error::InvalidArgument(
                        "box lower bound exceeds upper bound".into(),
                    ));
                }
                Ok(())
            }
            ConvexSet::Ball { center, radius } => {
                if !center.is_finite() {
                    return Err(Error::InvalidArgument("ball center must be finite".into()));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
                Ok(())
            }
            ConvexSet::HalfSpaceIntersection { halves } => {
                if let Some(first) = halves.first() {
                    for h in halves {
                        check_dim(first.dim(), h.dim())?;
                        h.validate()?;
                    }
                }
                Ok(())
            }
            ConvexSet::AffineSubspace { basis, offset } => {
                check_dim(offset.dim(), basis.rows())?;
                if !offset.is_finite() {
                    return Err(Error::InvalidArgument("affine offset must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Ambient dimension, when the set pins one down.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConvexSet::WholeSpace => None,
            ConvexSet::Box { lower, .. } => Some(lower.dim()),
            ConvexSet::Ball { center, .. } => Some(center.dim()),
            ConvexSet::HalfSpaceIntersection { halves } => halves.first().map(HalfSpace::dim),
            ConvexSet::AffineSubspace { offset, .. } => Some(offset.dim()),
        }
    }

    pub fn check_point_dim(&self, x: &Vector) -> Result<()> {
        match self.dim() {
            Some(d) => check_dim(d, x.dim()),
            None => Ok(()),
        }
    }

    /// Box and half-space intersections (and the whole space) are handled
    /// exactly by the active-set solver.
    pub fn is_polyhedral(&self) -> bool {
        matches!(
            self,
            ConvexSet::WholeSpace | ConvexSet::Box { .. } | ConvexSet::HalfSpaceIntersection { .. }
        )
    }

    /// Linear inequalities describing a polyhedral set, `None` otherwise.
    pub fn as_halfspaces(&self, dim: usize) -> Option<Vec<HalfSpace>> {
        match self {
            ConvexSet::WholeSpace => Some(Vec::new()),
            ConvexSet::Box { lower, upper } => {
                let mut out = Vec::with_capacity(2 * dim);
                for i in 0..lower.dim() {
                    out.push(HalfSpace {
                        normal: Vector::basis(dim, i),
                        offset: upper[i],
                    });
                    out.push(HalfSpace {
                        normal: Vector::basis(dim, i).scaled(-1.0),
                        offset: -lower[i],
                    });
                }
                Some(out)
            }
            ConvexSet::HalfSpaceIntersection { halves } => Some(halves.clone()),
            _ => None,
        }
    }

    /// Crude diameter bound: exact for balls and boxes, zero for unbounded sets.
    pub fn diameter_proxy(&self) -> f64 {
        match self {
            ConvexSet::Box { lower, upper } => upper.dist(lower),
            ConvexSet::Ball { radius, .. } => 2.0 * radius,
            _ => 0.0,
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self {
            ConvexSet::WholeSpace => true,
            ConvexSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            ConvexSet::Ball { center, radius } => x.dist(center) <= radius + tol,
            ConvexSet::HalfSpaceIntersection { halves } => {
                halves.iter().all(|h| h.contains(x, tol))
            }
            ConvexSet::AffineSubspace { .. } => match self.project(x) {
                Ok(p) => p.dist(x) <= tol,
                Err(_) => false,
            },
        }
    }

    /// Metric projection `P_S x`.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        self.check_point_dim(x)?;
        match self {
            ConvexSet::WholeSpace => Ok(x.clone()),
            ConvexSet::Box { lower, upper } => Ok(Vector::from(
                x.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(v, (l, u))| v.clamp(*l, *u))
                    .collect::<Vec<_>>(),
            )),
            ConvexSet::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    Ok(x.clone())
                } else {
                    let mut p = center.clone();
                    p.axpy(radius / n, &d);
                    Ok(p)
                }
            }
            ConvexSet::HalfSpaceIntersection { halves } => match halves.as_slice() {
                [] => Ok(x.clone()),
                [h] => project_halfspace(h, x),
                _ => project_onto_halves(halves, x),
            },
            ConvexSet::AffineSubspace { basis, offset } => {
                let rhs = (x - offset).to_nalgebra();
                let b = basis.to_nalgebra();
                let coeffs = b
                    .clone()
                    .svd(true, true)
                    .solve(&rhs, 1e-12)
                    .map_err(|e| Error::Numerical(e.to_string()))?;
                let step = Vector::from_nalgebra(&(b * coeffs));
                Ok(offset + &step)
            }
        }
    }

    /// Distance from `x` to the set.
    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok(self.project(x)?.dist(x))
    }

    /// Draws a point of the set near `center +/- radius` (uniform for boxes,
    /// projected uniform otherwise).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, dim: usize, radius: f64) -> Result<Vector> {
        match self {
            ConvexSet::Box { lower, upper } => Ok(Vector::from(
                lower
                    .iter()
                    .zip(upper.iter())
                    .map(|(l, u)| if l == u { *l } else { rng.gen_range(*l..=*u) })
                    .collect::<Vec<_>>(),
            )),
            ConvexSet::Ball { center, .. } => {
                let raw = Vector::from(
                    center
                        .iter()
                        .map(|c| c + rng.gen_range(-radius..=radius))
                        .collect::<Vec<_>>(),
                );
                self.project(&raw)
            }
            _ => {
                let raw = Vector::from(
                    (0..dim)
                        .map(|_| rng.gen_range(-radius..=radius))
                        .collect::<Vec<_>>(),
                );
                self.project(&raw)
            }
        }
    }
}

/// Closed-form projection onto one half-space.
pub fn project_halfspace(h: &HalfSpace, x: &Vector) -> Result<Vector> {
    check_dim(h.dim(), x.dim())?;
    let nsq = h.normal.norm_sq();
    if nsq == 0.0 {
        return if h.offset >= 0.0 {
            Ok(x.clone())
        } else {
            Err(Error::InvalidHalfSpace { offset: h.offset })
        };
    }
    let v = h.value(x);
    if v <= 0.0 {
        return Ok(x.clone());
    }
    let mut p = x.clone();
    p.axpy(-v / nsq, &h.normal);
    Ok(p)
}

/// The set `{z : |y - z|^2 <= |x - z|^2 + theta}` written as
/// `{z : 2<x - y, z> <= <x - y, x + y> + theta}`.
///
/// The offset uses `<x - y, x + y>` rather than `|x|^2 - |y|^2` so that it
/// stays accurate when `y` is close to `x`.
pub fn halfspace_from_iterates(x: &Vector, y: &Vector, theta: f64) -> HalfSpace {
    let diff = x - y;
    let sum = x + y;
    HalfSpace {
        normal: diff.scaled(2.0),
        offset: diff.dot(&sum) + theta,
    }
}

fn project_onto_halves(halves: &[HalfSpace], x: &Vector) -> Result<Vector> {
    let mut qp = ActiveSetQp::new(x.as_slice());
    for h in halves {
        check_dim(x.dim(), h.dim())?;
        if h.is_degenerate() {
            h.validate()?;
            continue;
        }
        qp.add_constraint(h.normal.as_slice(), h.offset)?;
    }
    qp.solve()?;
    Ok(Vector::from(qp.solution().to_vec()))
}

/// Nearest point of `base ∩ halves` to `x`.
pub fn project_intersection(
    base: &ConvexSet,
    halves: &[HalfSpace],
    x: &Vector,
    tol: f64,
) -> Result<Vector> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("projection tolerance must be positive".into()));
    }
    base.check_point_dim(x)?;
    let live: Vec<&HalfSpace> = halves.iter().filter(|h| !h.is_degenerate()).collect();
    for h in halves {
        check_dim(x.dim(), h.dim())?;
        h.validate()?;
    }
    if live.is_empty() {
        return base.project(x);
    }
    if let Some(mut cons) = base.as_halfspaces(x.dim()) {
        cons.extend(live.into_iter().cloned());
        return project_onto_halves(&cons, x);
    }
    let cons: Vec<HalfSpace> = live.into_iter().cloned().collect();
    dykstra(base, &cons, x, tol, DYKSTRA_MAX_ITER)
}

/// Dykstra's alternating projections between `base` and the polyhedron
/// `∩ halves`. Returns a point of the polyhedron within `tol` of `base`.
pub fn dykstra(
    base: &ConvexSet,
    halves: &[HalfSpace],
    x: &Vector,
    tol: f64,
    max_iter: usize,
) -> Result<Vector> {
    // Fail fast on an empty polyhedron.
    project_onto_halves(halves, x)?;
    let mut current = x.clone();
    let dim = x.dim();
    let mut p = Vector::zeros(dim);
    let mut q = Vector::zeros(dim);
    let mut stalled = 0usize;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let base_in = &current + &p;
        let y = base.project(&base_in)?;
        p = &base_in - &y;
        let poly_in = &y + &q;
        let next = project_onto_halves(halves, &poly_in)?;
        q = &poly_in - &next;

        let change = next.dist(&current);
        residual = base.distance(&next)?;
        current = next;
        if residual <= tol && change <= tol {
            return Ok(current);
        }
        // Disjoint sets: iterates settle on a best-approximation pair while
        // the base residual stays put.
        if change <= 1e-15 * (1.0 + current.norm()) && residual > tol {
            stalled += 1;
            if stalled >= 1_000 {
                return Err(Error::Infeasible(format!(
                    "base set and half-spaces are disjoint (gap {residual:e})"
                )));
            }
        } else {
            stalled = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "Dykstra projection",
        iterations: max_iter,
        residual,
    })
}

/// Ordered list of half-spaces `H_1, H_2, ...` cut from a base set, kept
/// together with a warm-started projector for the anchor point.
///
/// A new half-space whose unit normal matches a stored one is dropped when the
/// stored offset is at least as tight; degenerate half-spaces are skipped.
#[derive(Debug, Clone)]
pub struct ShrinkingRegion {
    base: ConvexSet,
    anchor: Vector,
    halves: Vec<HalfSpace>,
    unit: Vec<(Vector, f64)>,
    warm: Option<ActiveSetQp>,
    tol: f64,
}

/// Two unit normals closer than this are considered identical when pruning.
const NORMAL_MATCH_TOL: f64 = 1e-12;

impl ShrinkingRegion {
    pub fn new(base: ConvexSet, anchor: Vector, tol: f64) -> Result<Self> {
        base.validate()?;
        base.check_point_dim(&anchor)?;
        let warm = match base.as_halfspaces(anchor.dim()) {
            Some(cons) => {
                let mut qp = ActiveSetQp::new(anchor.as_slice());
                for h in &cons {
                    qp.add_constraint(h.normal.as_slice(), h.offset)?;
                }
                Some(qp)
            }
            None => None,
        };
        Ok(Self {
            base,
            anchor,
            halves: Vec::new(),
            unit: Vec::new(),
            warm,
            tol,
        })
    }

    pub fn base(&self) -> &ConvexSet {
        &self.base
    }

    pub fn halves(&self) -> &[HalfSpace] {
        &self.halves
    }

    /// Adds a half-space; returns whether it was stored.
    pub fn push(&mut self, h: HalfSpace) -> Result<bool> {
        h.validate()?;
        let Some((normal, offset)) = h.normalized() else {
            return Ok(false);
        };
        let implied = self
            .unit
            .iter()
            .any(|(n, b)| *b <= offset && n.dist(&normal) <= NORMAL_MATCH_TOL);
        if implied {
            return Ok(false);
        }
        if let Some(qp) = self.warm.as_mut() {
            qp.add_constraint(h.normal.as_slice(), h.offset)?;
        }
        self.unit.push((normal, offset));
        self.halves.push(h);
        Ok(true)
    }

    /// Projection of the anchor onto `base ∩ H_1 ∩ ... ∩ H_n`.
    pub fn project_anchor(&mut self) -> Result<Vector> {
        match self.warm.as_mut() {
            Some(qp) => {
                qp.solve()?;
                Ok(Vector::from(qp.solution().to_vec()))
            }
            None => project_intersection(&self.base, &self.halves, &self.anchor, self.tol),
        }
    }

    pub fn contains(&self, z: &Vector, tol: f64) -> bool {
        self.base.contains(z, tol) && self.halves.iter().all(|h| h.contains(z, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from(x)
    }

    fn hs(a: &[f64], b: f64) -> HalfSpace {
        HalfSpace::new(v(a), b).unwrap()
    }

    fn close(a: &Vector, b: &[f64], tol: f64) -> bool {
        a.dist(&v(b)) <= tol
    }

    #[test]
    fn project_examples() {
        let x = v(&[3.0, -1.0]);
        assert_eq!(ConvexSet::WholeSpace.project(&x).unwrap(), x);
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(close(&ball.project(&v(&[3.0, 4.0])).unwrap(), &[0.6, 0.8], 1e-15));
        let quad = ConvexSet::HalfSpaceIntersection {
            halves: vec![hs(&[1.0, 0.0], 0.0), hs(&[0.0, 1.0], 0.0)],
        };
        assert!(close(&quad.project(&v(&[1.0, 1.0])).unwrap(), &[0.0, 0.0], 1e-14));
    }

    #[test]
    fn project_box_and_affine() {
        let b = ConvexSet::boxed(v(&[0.0, -1.0]), v(&[1.0, 1.0])).unwrap();
        assert_eq!(b.project(&v(&[2.0, 0.5])).unwrap(), v(&[1.0, 0.5]));
        let line = ConvexSet::AffineSubspace {
            basis: LinearOperator::from_rows(vec![vec![1.0], vec![0.0]]).unwrap(),
            offset: v(&[0.0, 0.0]),
        };
        assert!(close(&line.project(&v(&[3.0, 4.0])).unwrap(), &[3.0, 0.0], 1e-14));
        let diag = ConvexSet::AffineSubspace {
            basis: LinearOperator::from_rows(vec![vec![1.0], vec![-1.0]]).unwrap(),
            offset: v(&[1.0, 0.0]),
        };
        assert!(close(&diag.project(&v(&[0.0, 0.0])).unwrap(), &[0.5, 0.5], 1e-14));
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(ConvexSet::boxed(v(&[1.0]), v(&[0.0])).is_err());
        assert!(ConvexSet::ball(v(&[0.0]), 0.0).is_err());
        assert!(matches!(
            HalfSpace::new(v(&[0.0, 0.0]), -1.0),
            Err(Error::InvalidHalfSpace { .. })
        ));
        assert!(HalfSpace::new(v(&[0.0, 0.0]), 0.0).is_ok());
    }

    #[test]
    fn project_halfspace_examples() {
        let h = hs(&[1.0, 0.0], 0.0);
        assert_eq!(project_halfspace(&h, &v(&[2.0, 3.0])).unwrap(), v(&[0.0, 3.0]));
        assert_eq!(project_halfspace(&h, &v(&[-2.0, 3.0])).unwrap(), v(&[-2.0, 3.0]));
        let h = hs(&[1.0, 1.0], 1.0);
        let p = project_halfspace(&h, &v(&[2.0, 2.0])).unwrap();
        assert!(close(&p, &[0.5, 0.5], 1e-15));
        let bad = HalfSpace {
            normal: v(&[0.0]),
            offset: -1.0,
        };
        assert!(project_halfspace(&bad, &v(&[0.0])).is_err());
    }

    #[test]
    fn halfspace_from_iterates_examples() {
        let x = v(&[1.0, 2.0]);
        let h = halfspace_from_iterates(&x, &x, 0.0);
        assert!(h.is_degenerate() && h.offset == 0.0);

        let h = halfspace_from_iterates(&v(&[1.0, 0.0]), &v(&[0.0, 0.0]), 0.0);
        let (n, b) = h.normalized().unwrap();
        assert!(close(&n, &[1.0, 0.0], 0.0));
        assert!((b - 0.5).abs() < 1e-15);

        let x = v(&[0.3, -1.2]);
        let y = v(&[-0.7, 0.4]);
        let h0 = halfspace_from_iterates(&x, &y, 0.0);
        let h1 = halfspace_from_iterates(&x, &y, 0.8);
        assert!((h1.offset - h0.offset - 0.8).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let z = Vector::from(vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]);
            let lhs = y.dist(&z).powi(2) - x.dist(&z).powi(2) - 0.8;
            // membership equivalence, away from the boundary
            if lhs.abs() > 1e-9 {
                assert_eq!(lhs <= 0.0, h1.value(&z) <= 0.0);
            }
        }
    }

    #[test]
    fn project_intersection_examples() {
        let x = v(&[1.0, 1.0]);
        assert_eq!(
            project_intersection(&ConvexSet::WholeSpace, &[], &x, 1e-8).unwrap(),
            x
        );
        let h = hs(&[1.0, 0.0], 0.0);
        let one = project_intersection(&ConvexSet::WholeSpace, &[h.clone()], &x, 1e-8).unwrap();
        assert_eq!(one, project_halfspace(&h, &x).unwrap());

        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let p = project_intersection(&ball, &[h], &x, 1e-8).unwrap();
        assert!(close(&p, &[0.0, 1.0], 1e-7), "{p:?}");
    }

    #[test]
    fn project_intersection_reports_infeasible() {
        let ball = ConvexSet::ball(v(&[0.0, 0.0]), 1.0).unwrap();
        let far = hs(&[-1.0, 0.0], -2.0); // z1 >= 2
        let err = project_intersection(&ball, &[far], &v(&[0.0, 0.0]), 1e-8).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err:?}");

        let err = project_intersection(
            &ConvexSet::WholeSpace,
            &[hs(&[1.0], -1.0), hs(&[-1.0], -1.0)],
            &v(&[0.0]),
            1e-8,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn shrinking_region_prunes_parallel_cuts() {
        let mut r = ShrinkingRegion::new(ConvexSet::WholeSpace, v(&[2.0, 0.0]), 1e-8).unwrap();
        assert!(r.push(hs(&[1.0, 0.0], 1.0)).unwrap());
        assert!(!r.push(hs(&[2.0, 0.0], 3.0)).unwrap()); // z1 <= 1.5, implied
        assert!(!r.push(HalfSpace { normal: v(&[0.0, 0.0]), offset: 0.0 }).unwrap());
        assert!(r.push(hs(&[1.0, 0.0], 0.5)).unwrap()); // tighter, kept
        assert_eq!(r.halves().len(), 2);
        let p = r.project_anchor().unwrap();
        assert!(close(&p, &[0.5, 0.0], 1e-14));
    }

    #[test]
    fn shrinking_region_on_box_matches_cold_solve() {
        let b = ConvexSet::boxed(v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap();
        let anchor = v(&[3.0, 2.0]);
        let mut r = ShrinkingRegion::new(b.clone(), anchor.clone(), 1e-8).unwrap();
        let cuts = [hs(&[1.0, 1.0], 0.5), hs(&[1.0, -0.2], 0.1), hs(&[-0.3, 1.0], 0.2)];
        for c in &cuts {
            r.push(c.clone()).unwrap();
            let warm = r.project_anchor().unwrap();
            let cold = project_intersection(&b, r.halves(), &anchor, 1e-8).unwrap();
            assert!(warm.dist(&cold) < 1e-12);
        }
    }

    #[test]
    fn sampled_points_belong_to_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sets = [
            ConvexSet::WholeSpace,
            ConvexSet::boxed(v(&[0.0, 0.0]), v(&[1.0, 2.0])).unwrap(),
            ConvexSet::ball(v(&[1.0, 1.0]), 0.5).unwrap(),
            ConvexSet::HalfSpaceIntersection {
                halves: vec![hs(&[1.0, 1.0], 0.0)],
            },
        ];
        for s in &sets {
            for _ in 0..50 {
                let z = s.sample(&mut rng, 2, 3.0).unwrap();
                assert!(s.contains(&z, 1e-12));
            }
        }
    }
}
