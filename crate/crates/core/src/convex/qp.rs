//! Dense dual active-set solver for nearest-point problems over polyhedra.
//!
//! Solves
//!
//! ```text
//!     minimize     1/2 |z - x|^2
//!     subject to   a_j' z <= b_j,   j = 1..m
//! ```
//!
//! with the Goldfarb-Idnani strategy specialised to an identity Hessian: start
//! from the unconstrained minimiser `z = x`, repeatedly pick the most violated
//! constraint and walk along the dual ray until it becomes active, dropping
//! active constraints whose multipliers hit zero on the way. The state after a
//! solve is optimal for the current constraint list, so appending further
//! constraints and re-solving continues from there (this is how the shrinking
//! projection keeps `P_{C_{n+1}} x_1` cheap over long runs).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::space::dot;

/// Violation below which a constraint counts as satisfied (constraints are
/// stored with unit normals, so this is a distance).
pub const FEASIBILITY_TOL: f64 = 1e-12;
/// A step direction shorter than this is treated as zero (the new normal is
/// in the span of the active normals).
const DIRECTION_EPS: f64 = 1e-11;
const RATIO_EPS: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct ActiveSetQp {
    anchor: Vec<f64>,
    z: Vec<f64>,
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    active: Vec<usize>,
    multipliers: Vec<f64>,
}

impl ActiveSetQp {
    pub fn new(anchor: &[f64]) -> Self {
        Self {
            anchor: anchor.to_vec(),
            z: anchor.to_vec(),
            normals: Vec::new(),
            offsets: Vec::new(),
            active: Vec::new(),
            multipliers: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Appends `normal' z <= offset`. Zero normals are ignored when
    /// `offset >= 0` and rejected otherwise.
    pub fn add_constraint(&mut self, normal: &[f64], offset: f64) -> Result<()> {
        debug_assert_eq!(normal.len(), self.dim());
        let norm = dot(normal, normal).sqrt();
        if norm == 0.0 {
            return if offset >= 0.0 {
                Ok(())
            } else {
                Err(Error::Infeasible(format!(
                    "constraint 0'z <= {offset} has no solution"
                )))
            };
        }
        self.normals.push(normal.iter().map(|v| v / norm).collect());
        self.offsets.push(offset / norm);
        Ok(())
    }

    pub fn solution(&self) -> &[f64] {
        &self.z
    }

    /// Active constraint indices and their multipliers.
    pub fn active_set(&self) -> (&[usize], &[f64]) {
        (&self.active, &self.multipliers)
    }

    fn violation(&self, j: usize) -> f64 {
        dot(&self.normals[j], &self.z) - self.offsets[j]
    }

    /// Largest remaining constraint violation at the current point.
    pub fn max_violation(&self) -> f64 {
        (0..self.len())
            .map(|j| self.violation(j))
            .fold(0.0, f64::max)
    }

    /// Runs active-set iterations until every constraint holds.
    pub fn solve(&mut self) -> Result<()> {
        let cap = 50 * (self.len() + self.dim()) + 1_000;
        for _ in 0..cap {
            let mut worst = None;
            let mut worst_violation = FEASIBILITY_TOL;
            for j in 0..self.len() {
                if self.active.contains(&j) {
                    continue;
                }
                let v = self.violation(j);
                if v > worst_violation {
                    worst_violation = v;
                    worst = Some(j);
                }
            }
            match worst {
                None => return Ok(()),
                Some(p) => self.activate(p)?,
            }
        }
        Err(Error::NonConvergence {
            what: "dual active-set projection",
            iterations: cap,
            residual: self.max_violation(),
        })
    }

    fn activate(&mut self, p: usize) -> Result<()> {
        let d = self.dim();
        let mut added = 0.0;
        loop {
            let np = &self.normals[p];
            let q = self.active.len();
            // r = argmin |N r - n_p|, dz = n_p - N r (component of n_p orthogonal to active normals)
            let (r, dz) = if q == 0 {
                (Vec::new(), np.clone())
            } else {
                let mut n = DMatrix::<f64>::zeros(d, q);
                for (c, &j) in self.active.iter().enumerate() {
                    for i in 0..d {
                        n[(i, c)] = self.normals[j][i];
                    }
                }
                let rhs = DVector::from_column_slice(np);
                let r = least_squares(&n, &rhs);
                let fitted = &n * &r;
                let dz: Vec<f64> = (0..d).map(|i| np[i] - fitted[i]).collect();
                (r.iter().copied().collect(), dz)
            };

            let dz_sq = dot(&dz, &dz);
            let full_step = if dz_sq.sqrt() > DIRECTION_EPS {
                Some(self.violation(p) / dz_sq)
            } else {
                None
            };
            let mut partial: Option<(f64, usize)> = None;
            for (c, rc) in r.iter().enumerate() {
                if *rc > RATIO_EPS {
                    let t = self.multipliers[c] / rc;
                    if partial.map_or(true, |(best, _)| t < best) {
                        partial = Some((t, c));
                    }
                }
            }

            let (t, drop) = match (full_step, partial) {
                (None, None) => {
                    return Err(Error::Infeasible(
                        "half-space intersection is empty (dual ray unbounded)".into(),
                    ))
                }
                (Some(t2), None) => (t2, None),
                (None, Some((t1, c))) => (t1, Some(c)),
                (Some(t2), Some((t1, c))) => {
                    if t2 <= t1 {
                        (t2, None)
                    } else {
                        (t1, Some(c))
                    }
                }
            };

            for i in 0..d {
                self.z[i] -= t * dz[i];
            }
            for (c, rc) in r.iter().enumerate() {
                self.multipliers[c] = (self.multipliers[c] - t * rc).max(0.0);
            }
            added += t;

            match drop {
                None => {
                    self.active.push(p);
                    self.multipliers.push(added);
                    return Ok(());
                }
                Some(c) => {
                    self.active.remove(c);
                    self.multipliers.remove(c);
                }
            }
        }
    }
}

/// Least-squares coefficients for a tall matrix with (numerically) independent
/// columns, falling back to an SVD pseudo-inverse when QR is rank deficient.
fn least_squares(n: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let qr = n.clone().qr();
    let qt_b = qr.q().transpose() * rhs;
    let r = qr.r();
    let diag_min = (0..r.ncols()).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if diag_min > 1e-10 {
        if let Some(sol) = r.solve_upper_triangular(&qt_b) {
            return sol;
        }
    }
    n.clone()
        .svd(true, true)
        .solve(rhs, 1e-12)
        .expect("svd with both factors computed")
}

/// One-shot nearest point of `{z : a_j' z <= b_j}` to `x`.
pub fn project_polyhedron(normals: &[&[f64]], offsets: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let mut qp = ActiveSetQp::new(x);
    for (a, b) in normals.iter().zip(offsets) {
        qp.add_constraint(a, *b)?;
    }
    qp.solve()?;
    Ok(qp.solution().to_vec())
}
