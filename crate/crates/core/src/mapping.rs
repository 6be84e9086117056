//! Fixed-point mappings and sampled class predicates.
//!
//! A [`MappingSpec`] pairs a concrete map with the parameters
//! `(k, {lambda_n}, {mu_n}, xi)` under which it is claimed to be a total
//! asymptotically strict pseudo-contraction:
//!
//! ```text
//!   |S^n x - S^n y|^2 <= |x - y|^2 + k |(I - S^n) x - (I - S^n) y|^2
//!                        + lambda_n xi(|x - y|) + mu_n
//! ```
//!
//! [`verify_class`] samples this inequality (and the inequalities of the
//! narrower classes it generalises) and reports the worst signed slack per
//! power `n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convex::ConvexSet;
use crate::error::{check_dim, Error, Result};
use crate::schedule::Schedule;
use crate::space::{LinearOperator, Vector};

/// Iterates with norm above this are reported as divergence.
pub const DIVERGENCE_GUARD: f64 = 1e12;
/// Slack below `-CLASS_TOL` fails a class check.
pub const CLASS_TOL: f64 = 1e-8;
/// Tolerance for accepting `p` as a fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-9;
const SAMPLE_RADIUS: f64 = 5.0;
/// Powers used when measuring the uniform Lipschitz constant of an affine map.
const LIPSCHITZ_POWERS: usize = 64;

/// Strictly increasing gauge `xi` with `xi(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum XiFunction {
    /// `xi(t) = c t`
    Linear { c: f64 },
    /// `xi(t) = t^2` for `t <= m`, `m t` beyond.
    PiecewiseQuad { m: f64 },
}

impl Default for XiFunction {
    fn default() -> Self {
        XiFunction::Linear { c: 1.0 }
    }
}

impl XiFunction {
    pub fn validate(&self) -> Result<()> {
        let p = match *self {
            XiFunction::Linear { c } => c,
            XiFunction::PiecewiseQuad { m } => m,
        };
        if p.is_finite() && p > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("xi parameter must be positive, got {p}")))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            XiFunction::Linear { c } => c * t,
            XiFunction::PiecewiseQuad { m } => {
                if t <= m {
                    t * t
                } else {
                    m * t
                }
            }
        }
    }

    /// Growth constants `(M, M*)` with `xi(t) <= M* t` for all `t >= M`.
    pub fn growth_constants(&self) -> (f64, f64) {
        match *self {
            XiFunction::Linear { c } => (0.0, c),
            XiFunction::PiecewiseQuad { m } => (m, m),
        }
    }

    /// Samples 1,000 points of `[0, t_max]`: `xi(0) = 0`, strict increase,
    /// and the linear growth bound beyond `M`.
    pub fn check_sampled(&self, t_max: f64) -> bool {
        if self.validate().is_err() || self.eval(0.0) != 0.0 {
            return false;
        }
        let (m, m_star) = self.growth_constants();
        let mut prev = 0.0;
        for i in 1..=1000 {
            let t = t_max * i as f64 / 1000.0;
            let v = self.eval(t);
            if !(v > prev) {
                return false;
            }
            if t >= m && v > m_star * t * (1.0 + 1e-12) {
                return false;
            }
            prev = v;
        }
        true
    }
}

/// The underlying map `S : C -> C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Map {
    /// `x -> B x + b`
    Affine { matrix: LinearOperator, shift: Vector },
    ProjectionOnto { set: ConvexSet },
    /// `x -> -x`
    Negation,
    /// Applies the members in order, first to last.
    Composite { maps: Vec<Map> },
}

impl Map {
    pub fn identity(dim: usize) -> Self {
        Map::Affine {
            matrix: LinearOperator::identity(dim),
            shift: Vector::zeros(dim),
        }
    }

    pub fn linear(matrix: LinearOperator) -> Self {
        let d = matrix.rows();
        Map::Affine {
            matrix,
            shift: Vector::zeros(d),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Map::Affine { matrix, shift } => {
                if !matrix.is_square() {
                    return Err(Error::InvalidArgument("affine map matrix must be square".into()));
                }
                check_dim(matrix.rows(), shift.dim())
            }
            Map::ProjectionOnto { set } => set.validate(),
            Map::Negation => Ok(()),
            Map::Composite { maps } => {
                if maps.is_empty() {
                    return Err(Error::InvalidArgument("composite map needs members".into()));
                }
                maps.iter().try_for_each(Map::validate)
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Map::Affine { shift, .. } => Some(shift.dim()),
            Map::ProjectionOnto { set } => set.dim(),
            Map::Negation => None,
            Map::Composite { maps } => maps.iter().find_map(Map::dim),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        match self {
            Map::Affine { matrix, shift } => {
                check_dim(matrix.cols(), x.dim())?;
                Ok(&matrix.apply_unchecked(x) + shift)
            }
            Map::ProjectionOnto { set } => set.project(x),
            Map::Negation => Ok(-x),
            Map::Composite { maps } => {
                let mut z = x.clone();
                for m in maps {
                    z = m.apply(&z)?;
                }
                Ok(z)
            }
        }
    }

    /// Composes affine/negation members into one affine map; `None` if a
    /// member is a projection.
    pub fn as_affine(&self, dim: usize) -> Option<(LinearOperator, Vector)> {
        match self {
            Map::Affine { matrix, shift } => Some((matrix.clone(), shift.clone())),
            Map::Negation => Some((LinearOperator::scaled_identity(dim, -1.0), Vector::zeros(dim))),
            Map::ProjectionOnto { set } => match set {
                ConvexSet::WholeSpace => Some((LinearOperator::identity(dim), Vector::zeros(dim))),
                _ => None,
            },
            Map::Composite { maps } => {
                let mut b = LinearOperator::identity(dim);
                let mut s = Vector::zeros(dim);
                for m in maps {
                    let (mb, ms) = m.as_affine(dim)?;
                    // x -> mb (b x + s) + ms
                    s = &mb.apply(&s).ok()? + &ms;
                    b = mb.compose(&b).ok()?;
                }
                Some((b, s))
            }
        }
    }
}

/// A mapping together with its claimed class parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingSpec {
    pub map: Map,
    #[serde(default)]
    pub k: f64,
    #[serde(default)]
    pub lambda: Schedule,
    #[serde(default)]
    pub mu: Schedule,
    #[serde(default)]
    pub xi: XiFunction,
    /// Uniform Lipschitz constant of the powers `S^n`; measured when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl MappingSpec {
    /// A mapping claimed nonexpansive: `k = 0`, `lambda = mu = 0`.
    pub fn nonexpansive(map: Map) -> Self {
        Self {
            map,
            k: 0.0,
            lambda: Schedule::Zero,
            mu: Schedule::Zero,
            xi: XiFunction::default(),
            theta: None,
        }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_schedules(mut self, lambda: Schedule, mu: Schedule) -> Self {
        self.lambda = lambda;
        self.mu = mu;
        self
    }

    pub fn with_xi(mut self, xi: XiFunction) -> Self {
        self.xi = xi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        if !(0.0..1.0).contains(&self.k) {
            return Err(Error::InvalidArgument(format!("k must lie in [0, 1), got {}", self.k)));
        }
        self.lambda.validate()?;
        self.mu.validate()?;
        self.xi.validate()?;
        if let Some(t) = self.theta {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidArgument(format!("theta must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Uniform Lipschitz constant of `S^n`: user value, else the largest
    /// `|B^n|` over the first 64 powers for affine maps, 1 for projections
    /// and negation. Composites require a user value.
    pub fn lipschitz_bound(&self) -> Option<f64> {
        if self.theta.is_some() {
            return self.theta;
        }
        match &self.map {
            Map::Affine { matrix, .. } => {
                let mut power = matrix.clone();
                let mut best = power.spectral_norm();
                for _ in 1..LIPSCHITZ_POWERS {
                    power = power.compose(matrix).ok()?;
                    best = best.max(power.spectral_norm());
                }
                Some(best)
            }
            Map::ProjectionOnto { .. } | Map::Negation => Some(1.0),
            Map::Composite { .. } => None,
        }
    }

    /// Builds the power table for `n <= max_n` when the map is affine.
    pub fn power_cache(&self, max_n: usize) -> Option<PowerCache> {
        match &self.map {
            Map::Affine { matrix, shift } => Some(PowerCache::new(matrix, shift, max_n)),
            _ => None,
        }
    }
}

/// Repeated-squaring table for `x -> B x + b`, stored as the augmented
/// matrix `[[B, b], [0, 1]]` and its powers `2^j`.
#[derive(Debug, Clone)]
pub struct PowerCache {
    dim: usize,
    squares: Vec<LinearOperator>,
}

impl PowerCache {
    pub fn new(matrix: &LinearOperator, shift: &Vector, max_n: usize) -> Self {
        let d = matrix.rows();
        let mut data = vec![0.0; (d + 1) * (d + 1)];
        for i in 0..d {
            for j in 0..d {
                data[i * (d + 1) + j] = matrix.get(i, j);
            }
            data[i * (d + 1) + d] = shift[i];
        }
        data[d * (d + 1) + d] = 1.0;
        let aug = LinearOperator::from_row_major(d + 1, d + 1, data)
            .expect("augmented matrix from finite entries");
        let bits = (usize::BITS - max_n.max(1).leading_zeros()) as usize;
        let mut squares = Vec::with_capacity(bits);
        squares.push(aug);
        for _ in 1..bits {
            let last = squares.last().unwrap();
            squares.push(last.compose(last).expect("square matrices"));
        }
        Self { dim: d, squares }
    }

    pub fn max_power(&self) -> usize {
        (1usize << self.squares.len()) - 1
    }

    /// `S^n x` for `1 <= n <= max_power()`.
    pub fn apply(&self, n: usize, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.dim())?;
        if n == 0 || n > self.max_power() {
            return Err(Error::InvalidArgument(format!(
                "power {n} outside cached range 1..={}",
                self.max_power()
            )));
        }
        let mut aug = x.as_slice().to_vec();
        aug.push(1.0);
        let mut z = Vector::from(aug);
        for (bit, sq) in self.squares.iter().enumerate() {
            if n >> bit & 1 == 1 {
                z = sq.apply_unchecked(&z);
            }
        }
        let mut out = z.into_inner();
        out.truncate(self.dim);
        Ok(Vector::from(out))
    }
}

/// `S x`
pub fn apply(s: &MappingSpec, x: &Vector) -> Result<Vector> {
    s.map.apply(x)
}

/// `S^n x`, through a freshly built [`PowerCache`] for affine maps.
pub fn apply_power(s: &MappingSpec, n: usize, x: &Vector) -> Result<Vector> {
    let cache = s.power_cache(n);
    apply_power_cached(s, cache.as_ref(), n, x)
}

/// `S^n x` using a prebuilt cache when one is supplied.
pub fn apply_power_cached(
    s: &MappingSpec,
    cache: Option<&PowerCache>,
    n: usize,
    x: &Vector,
) -> Result<Vector> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    let out = match (&s.map, cache) {
        (Map::Affine { .. }, Some(c)) if n <= c.max_power() => c.apply(n, x)?,
        // projections are idempotent
        (Map::ProjectionOnto { set }, _) => set.project(x)?,
        (Map::Negation, _) => {
            if n % 2 == 0 {
                x.clone()
            } else {
                -x
            }
        }
        (map, _) => {
            let mut z = x.clone();
            for _ in 0..n {
                z = map.apply(&z)?;
                guard(&z)?;
            }
            z
        }
    };
    guard(&out)?;
    Ok(out)
}

/// `S^n x` by `n` successive applications (reference path for the cache).
pub fn apply_power_naive(s: &MappingSpec, n: usize, x: &Vector) -> Result<Vector> {
    if n == 0 {
        return Err(Error::InvalidArgument("power must be at least 1".into()));
    }
    let mut z = x.clone();
    for _ in 0..n {
        z = s.map.apply(&z)?;
        guard(&z)?;
    }
    Ok(z)
}

fn guard(z: &Vector) -> Result<()> {
    let norm = z.norm();
    if !norm.is_finite() || norm > DIVERGENCE_GUARD {
        return Err(Error::Divergence { norm });
    }
    Ok(())
}

/// `|x - S x|`
pub fn fixed_point_residual(s: &MappingSpec, x: &Vector) -> Result<f64> {
    Ok(x.dist(&apply(s, x)?))
}

/// Mapping classes, from narrowest to the most general.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingClass {
    Nonexpansive,
    FirmlyNonexpansive,
    PseudoContraction,
    KStrict,
    /// `(k, {1 + lambda_n})`-asymptotically strict pseudo-contraction; the
    /// sequence `lambda_n >= 1, -> 1` is realised as `1 + lambda.value(n)`.
    AsymptoticallyStrict,
    TotalAsymptoticallyNonexpansive,
    #[serde(alias = "taspc")]
    TotalAsymptoticallyStrict,
}

impl MappingClass {
    /// Whether the defining inequality involves the powers `S^n`.
    pub fn uses_powers(&self) -> bool {
        matches!(
            self,
            MappingClass::AsymptoticallyStrict
                | MappingClass::TotalAsymptoticallyNonexpansive
                | MappingClass::TotalAsymptoticallyStrict
        )
    }
}

/// Worst sampled slack per power for one class check.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub class: MappingClass,
    /// `slacks[j]` is the worst slack for `n = j + 1`.
    pub slacks: Vec<f64>,
    /// Largest distance of a sampled `S x` from the domain.
    pub domain_violation: f64,
}

impl ClassReport {
    pub fn worst(&self) -> f64 {
        self.slacks.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn passed(&self) -> bool {
        self.worst() >= -CLASS_TOL
    }
}

/// Samples `samples` pairs from `domain` and evaluates the class inequality
/// for `n = 1..=n_max` (only `n = 1` for classes without powers).
pub fn verify_class(
    s: &MappingSpec,
    class: MappingClass,
    domain: &ConvexSet,
    dim: usize,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<ClassReport> {
    if n_max == 0 || samples == 0 {
        return Err(Error::InvalidArgument("n_max and samples must be positive".into()));
    }
    let powers = if class.uses_powers() { n_max } else { 1 };
    let cache = s.power_cache(powers);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slacks = vec![f64::INFINITY; powers];
    let mut domain_violation = 0.0_f64;
    for _ in 0..samples {
        let x = domain.sample(&mut rng, dim, SAMPLE_RADIUS)?;
        let y = domain.sample(&mut rng, dim, SAMPLE_RADIUS)?;
        domain_violation = domain_violation.max(domain.distance(&apply(s, &x)?)?);
        for n in 1..=powers {
            let tx = apply_power_cached(s, cache.as_ref(), n, &x)?;
            let ty = apply_power_cached(s, cache.as_ref(), n, &y)?;
            let slack = class_slack(s, class, n, &x, &y, &tx, &ty);
            slacks[n - 1] = slacks[n - 1].min(slack);
        }
    }
    Ok(ClassReport {
        class,
        slacks,
        domain_violation,
    })
}

/// Right-hand side minus left-hand side of the class inequality.
fn class_slack(
    s: &MappingSpec,
    class: MappingClass,
    n: usize,
    x: &Vector,
    y: &Vector,
    tx: &Vector,
    ty: &Vector,
) -> f64 {
    let d_sq = x.dist(y).powi(2);
    let t_sq = tx.dist(ty).powi(2);
    // |(I - T)x - (I - T)y|^2
    let r_sq = (&(x - tx) - &(y - ty)).norm_sq();
    let lam = s.lambda.value(n);
    let mu = s.mu.value(n);
    let xi = s.xi.eval(x.dist(y));
    match class {
        MappingClass::Nonexpansive => d_sq - t_sq,
        MappingClass::FirmlyNonexpansive => d_sq - t_sq - r_sq,
        MappingClass::PseudoContraction => d_sq + r_sq - t_sq,
        MappingClass::KStrict => d_sq + s.k * r_sq - t_sq,
        MappingClass::AsymptoticallyStrict => (1.0 + lam) * d_sq + s.k * r_sq - t_sq,
        MappingClass::TotalAsymptoticallyNonexpansive => {
            d_sq.sqrt() + lam * xi + mu - t_sq.sqrt()
        }
        MappingClass::TotalAsymptoticallyStrict => d_sq + s.k * r_sq + lam * xi + mu - t_sq,
    }
}

/// Signed slacks of the three equivalent fixed-point inequalities for
/// `T = S^n` at a fixed point `p`:
///
/// ```text
///   |T x - p|^2 <= |x - p|^2 + k|x - T x|^2 + lambda_n xi(|x - p|) + mu_n
///   <x - T x, x - p> >= (1-k)/2 |x - T x|^2 - lambda_n/2 xi(|x - p|) - mu_n/2
///   <x - T x, p - T x> <= (1+k)/2 |x - T x|^2 + lambda_n/2 xi(|x - p|) + mu_n/2
/// ```
pub fn fixed_point_inequality_slacks(
    s: &MappingSpec,
    p: &Vector,
    x: &Vector,
    n: usize,
) -> Result<[f64; 3]> {
    check_dim(p.dim(), x.dim())?;
    let moved = fixed_point_residual(s, p)?;
    if moved > FIXED_POINT_TOL {
        return Err(Error::InvalidArgument(format!(
            "p is not a fixed point (|p - Sp| = {moved:e})"
        )));
    }
    let tx = apply_power(s, n, x)?;
    let step = x - &tx;
    let step_sq = step.norm_sq();
    let extra = s.lambda.value(n) * s.xi.eval(x.dist(p)) + s.mu.value(n);
    let k = s.k;
    let first = x.dist(p).powi(2) + k * step_sq + extra - tx.dist(p).powi(2);
    let second = step.dot(&(x - p)) - (0.5 * (1.0 - k) * step_sq - 0.5 * extra);
    let third = 0.5 * (1.0 + k) * step_sq + 0.5 * extra - step.dot(&(p - &tx));
    Ok([first, second, third])
}
