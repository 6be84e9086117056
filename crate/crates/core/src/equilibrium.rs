//! Monotone bifunctions, their resolvents and equilibrium residuals.
//!
//! The resolvent `T_r^f x` is the unique `z` in the domain with
//!
//! ```text
//!     f(z, y) + (1/r) <y - z, z - x> >= 0    for all y in the domain.
//! ```
//!
//! For the affine and quadratic families this is the variational inequality
//! for `G(z) = M z + q + (z - x)/r`, which is `1/r`-strongly monotone. On the
//! whole space it reduces to the linear system `(I + rM) z = x - rq`; on a
//! constrained domain it is solved by projected gradient with step
//! `r / (1 + r |M|)^2`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::ConvexSet;
use crate::error::{check_dim, Error, Result};
use crate::space::{LinearOperator, Vector};

/// Target distance to the true resolvent for the iterative solver.
pub const RESOLVENT_TOL: f64 = 1e-12;
pub const RESOLVENT_MAX_ITER: usize = 200_000;
/// Relative residual allowed in the closed-form linear solve.
pub const LINEAR_SOLVE_GUARD: f64 = 1e-8;

/// The supported bifunction families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `f(x, y) = <M x + q, y - x>`; monotone when `M + M^T` is PSD.
    MonotoneAffine { m: LinearOperator, q: Vector },
    /// `f(x, y) = phi(y) - phi(x)` with `phi(z) = 1/2 <P z, z> + <c, z>`.
    ConvexDifference { p: LinearOperator, c: Vector },
    Zero,
}

/// A bifunction on a closed convex domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bifunction {
    #[serde(flatten)]
    pub family: Family,
    pub domain: ConvexSet,
}

/// `(r, x)` for one resolvent evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventQuery {
    pub r: f64,
    pub x: Vector,
}

impl ResolventQuery {
    pub fn new(r: f64, x: Vector) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "resolvent parameter must be positive, got {r}"
            )));
        }
        if !x.is_finite() {
            return Err(Error::InvalidArgument("resolvent query point is not finite".into()));
        }
        Ok(Self { r, x })
    }
}

impl Bifunction {
    /// Checks shapes only; monotonicity is left to
    /// [`verify_bifunction_axioms`] so that broken instances can still be
    /// loaded and diagnosed.
    pub fn new(family: Family, domain: ConvexSet) -> Result<Self> {
        let f = Self { family, domain };
        f.validate()?;
        Ok(f)
    }

    pub fn zero(domain: ConvexSet) -> Self {
        Self {
            family: Family::Zero,
            domain,
        }
    }

    pub fn monotone_affine(m: LinearOperator, q: Vector, domain: ConvexSet) -> Result<Self> {
        Self::new(Family::MonotoneAffine { m, q }, domain)
    }

    pub fn convex_difference(p: LinearOperator, c: Vector, domain: ConvexSet) -> Result<Self> {
        Self::new(Family::ConvexDifference { p, c }, domain)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        match &self.family {
            Family::Zero => Ok(()),
            Family::MonotoneAffine { m: a, q: b } | Family::ConvexDifference { p: a, c: b } => {
                if !a.is_square() {
                    return Err(Error::InvalidArgument(format!(
                        "bifunction matrix must be square, got {}x{}",
                        a.rows(),
                        a.cols()
                    )));
                }
                check_dim(a.rows(), b.dim())?;
                if let Some(d) = self.domain.dim() {
                    check_dim(d, a.rows())?;
                }
                if let Family::ConvexDifference { p, .. } = &self.family {
                    if !p.is_symmetric(1e-12) {
                        return Err(Error::InvalidArgument(
                            "convex-difference matrix must be symmetric".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.family {
            Family::Zero => self.domain.dim(),
            Family::MonotoneAffine { q, .. } => Some(q.dim()),
            Family::ConvexDifference { c, .. } => Some(c.dim()),
        }
    }

    /// The affine operator `z -> A z + b` whose variational inequality over
    /// the domain defines the equilibrium problem; `None` for the zero family.
    pub fn affine_part(&self) -> Option<(&LinearOperator, &Vector)> {
        match &self.family {
            Family::Zero => None,
            Family::MonotoneAffine { m, q } => Some((m, q)),
            Family::ConvexDifference { p, c } => Some((p, c)),
        }
    }

    /// `f(x, y)`
    pub fn eval(&self, x: &Vector, y: &Vector) -> f64 {
        match &self.family {
            Family::Zero => 0.0,
            Family::MonotoneAffine { m, q } => {
                let g = &m.apply_unchecked(x) + q;
                g.dot(&(y - x))
            }
            Family::ConvexDifference { p, c } => {
                let phi = |z: &Vector| 0.5 * p.apply_unchecked(z).dot(z) + c.dot(z);
                phi(y) - phi(x)
            }
        }
    }

    /// Smallest eigenvalue of the symmetric part of the matrix (0 for the
    /// zero family). Nonnegative exactly when the family is monotone.
    pub fn monotonicity_modulus(&self) -> f64 {
        match self.affine_part() {
            None => 0.0,
            Some((m, _)) => m.min_symmetric_eigenvalue(),
        }
    }
}

/// `T_r^f x`
pub fn resolvent(f: &Bifunction, query: &ResolventQuery) -> Result<Vector> {
    let x = &query.x;
    f.domain.check_point_dim(x)?;
    match f.affine_part() {
        None => f.domain.project(x),
        Some((m, q)) => {
            check_dim(m.cols(), x.dim())?;
            if matches!(f.domain, ConvexSet::WholeSpace) {
                resolvent_closed_form(m, q, query)
            } else {
                let start = f.domain.project(x)?;
                resolvent_iterative(f, query, &start)
            }
        }
    }
}

/// Solves `(I + rM) z = x - rq`.
fn resolvent_closed_form(m: &LinearOperator, q: &Vector, query: &ResolventQuery) -> Result<Vector> {
    let n = q.dim();
    let r = query.r;
    let system = DMatrix::<f64>::identity(n, n) + m.to_nalgebra() * r;
    let mut rhs = query.x.clone();
    rhs.axpy(-r, q);
    let rhs = rhs.to_nalgebra();
    let z = system
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("resolvent system (I + rM) is singular".into()))?;
    let residual = (&system * &z - &rhs).norm();
    if residual > LINEAR_SOLVE_GUARD * (1.0 + rhs.norm()) {
        return Err(Error::Numerical(format!(
            "resolvent linear solve residual {residual:e} exceeds guard"
        )));
    }
    Ok(Vector::from_nalgebra(&z))
}

/// Projected-gradient solve of the resolvent inequality from `start`.
///
/// Works for any domain (including the whole space, where it serves as a
/// cross-check of the closed form). Stops once the contraction bound
/// guarantees the iterate is within [`RESOLVENT_TOL`] of the fixed point.
pub fn resolvent_iterative(f: &Bifunction, query: &ResolventQuery, start: &Vector) -> Result<Vector> {
    resolvent_iterative_with(f, query, start, RESOLVENT_MAX_ITER)
}

pub fn resolvent_iterative_with(
    f: &Bifunction,
    query: &ResolventQuery,
    start: &Vector,
    max_iter: usize,
) -> Result<Vector> {
    let x = &query.x;
    let r = query.r;
    f.domain.check_point_dim(x)?;
    check_dim(x.dim(), start.dim())?;
    let Some((m, q)) = f.affine_part() else {
        return f.domain.project(x);
    };
    let m_norm = m.spectral_norm();
    let beta = r / (1.0 + r * m_norm).powi(2);
    // |z_{k+1} - z*| <= rho |z_k - z*|; rho = sqrt(1 - 1/(1 + r|M|)^2)
    let rho = (1.0 - 1.0 / (1.0 + r * m_norm).powi(2)).max(0.0).sqrt();
    let factor = if rho < 1.0 { rho / (1.0 - rho) } else { f64::INFINITY };

    let mut z = f.domain.project(start)?;
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        // G(z) = M z + q + (z - x)/r
        let mut g = &m.apply_unchecked(&z) + q;
        g.axpy(1.0 / r, &z);
        g.axpy(-1.0 / r, x);
        let mut trial = z.clone();
        trial.axpy(-beta, &g);
        let next = f.domain.project(&trial)?;
        last_step = next.dist(&z);
        z = next;
        if factor * last_step <= RESOLVENT_TOL * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        what: "resolvent projected-gradient solver",
        iterations: max_iter,
        residual: last_step,
    })
}

/// `|x - T_r^f x|`; zero exactly on the equilibrium set.
pub fn ep_residual(f: &Bifunction, x: &Vector, r: f64) -> Result<f64> {
    let query = ResolventQuery::new(r, x.clone())?;
    Ok(x.dist(&resolvent(f, &query)?))
}

/// Worst sampled violation of one bifunction axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    /// Largest positive violation, normalised by the magnitude of the terms.
    pub worst_violation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const AXIOM_TOL: f64 = 1e-10;
const HEMICONTINUITY_T: f64 = 1e-9;
const HEMICONTINUITY_TOL: f64 = 1e-6;
const SAMPLE_RADIUS: f64 = 5.0;

/// Samples the equilibrium-problem axioms: `f(x,x) = 0`, monotonicity,
/// convexity of `y -> f(x,y)` (midpoint form) and upper hemicontinuity
/// along `t -> 0`.
pub fn verify_bifunction_axioms(
    f: &Bifunction,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if let Some(d) = f.dim() {
        check_dim(d, dim)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diag = 0.0_f64;
    let mut mono = 0.0_f64;
    let mut convex = 0.0_f64;
    let mut hemi = 0.0_f64;
    for _ in 0..samples {
        let x = f.domain.sample(&mut rng, dim, SAMPLE_RADIUS)?;
        let y = f.domain.sample(&mut rng, dim, SAMPLE_RADIUS)?;
        let y2 = f.domain.sample(&mut rng, dim, SAMPLE_RADIUS)?;
        let z = f.domain.sample(&mut rng, dim, SAMPLE_RADIUS)?;

        let fxx = f.eval(&x, &x);
        diag = diag.max(fxx.abs());

        let (fxy, fyx) = (f.eval(&x, &y), f.eval(&y, &x));
        mono = mono.max((fxy + fyx) / (1.0 + fxy.abs() + fyx.abs()));

        let t: f64 = rng.gen_range(0.0..=1.0);
        let mid = y.lerp(&y2, t);
        let (a, b, c) = (f.eval(&x, &mid), f.eval(&x, &y), f.eval(&x, &y2));
        let chord = t * b + (1.0 - t) * c;
        convex = convex.max((a - chord) / (1.0 + a.abs() + chord.abs()));

        let near = z.lerp(&x, HEMICONTINUITY_T);
        let (fn_, fx) = (f.eval(&near, &y), fxy);
        hemi = hemi.max((fn_ - fx) / (1.0 + fx.abs()));
    }
    let check = |name, worst: f64, tol: f64| AxiomCheck {
        name,
        worst_violation: worst.max(0.0),
        passed: worst <= tol,
    };
    Ok(AxiomReport {
        checks: vec![
            check("diagonal_zero", diag, AXIOM_TOL),
            check("monotone", mono, AXIOM_TOL),
            check("convex_in_second_argument", convex, AXIOM_TOL),
            check("upper_hemicontinuous", hemi, HEMICONTINUITY_TOL),
        ],
    })
}
