//! The shrinking projection engine.
//!
//! One step with family index `i = ((n - 1) mod N) + 1`:
//!
//! ```text
//!   w_n     = x_n - gamma A_i' (A_i x_n - T_{s_n}^{g_i} A_i x_n)
//!   u_n     = T_{r_n}^{f_i} w_n
//!   y_n     = alpha_n u_n + (1 - alpha_n) S_i^n u_n
//!   C_{n+1} = C_n ∩ {z : |y_n - z|^2 <= |x_n - z|^2 + theta_n}
//!   x_{n+1} = P_{C_{n+1}} x_1
//! ```

use serde::{Deserialize, Serialize};

use crate::convex::{halfspace_from_iterates, ConvexSet, HalfSpace, ShrinkingRegion, ITERATIVE_TOL};
use crate::equilibrium::{resolvent, Bifunction, ResolventQuery};
use crate::error::{check_dim, Error, Result};
use crate::mapping::{
    apply_power_cached, verify_class, MappingClass, MappingSpec, PowerCache, XiFunction,
};
use crate::schedule::Schedule;
use crate::space::{gamma_valid, spectral_bound, LinearOperator, SpectralBound, Vector};

/// Samples used when nonexpansive mode checks its mappings.
const NONEXPANSIVE_SAMPLES: usize = 200;
/// Tolerance for `x_1 ∈ C`.
pub const START_TOL: f64 = 1e-9;
/// Cuts with `|x_n - y_n|` below this (relative to `1 + |x_n|`) are not
/// stored: their direction is rounding noise. Dropping a cut only enlarges
/// the region, so the solution set stays inside it.
pub const CUT_NOISE_FLOOR: f64 = 1e-10;

/// Data of a split equilibrium / common fixed-point problem with `N` families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub dim_h1: usize,
    pub dim_h2: usize,
    pub c: ConvexSet,
    pub q: ConvexSet,
    pub f: Vec<Bifunction>,
    pub g: Vec<Bifunction>,
    pub a: Vec<LinearOperator>,
    pub s: Vec<MappingSpec>,
}

impl ProblemInstance {
    pub fn families(&self) -> usize {
        self.f.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_h1 == 0 || self.dim_h2 == 0 {
            return Err(Error::InvalidArgument("dimensions must be positive".into()));
        }
        let n = self.f.len();
        if n == 0 {
            return Err(Error::InvalidArgument("at least one family is required".into()));
        }
        if self.g.len() != n || self.a.len() != n || self.s.len() != n {
            return Err(Error::InvalidArgument(format!(
                "family lists differ in length: f={}, g={}, A={}, S={}",
                n,
                self.g.len(),
                self.a.len(),
                self.s.len()
            )));
        }
        self.c.validate()?;
        self.q.validate()?;
        if let Some(d) = self.c.dim() {
            check_dim(self.dim_h1, d)?;
        }
        if let Some(d) = self.q.dim() {
            check_dim(self.dim_h2, d)?;
        }
        for (i, fi) in self.f.iter().enumerate() {
            fi.validate()?;
            if fi.domain != self.c {
                return Err(Error::InvalidArgument(format!("f[{i}] domain differs from C")));
            }
            if let Some(d) = fi.dim() {
                check_dim(self.dim_h1, d)?;
            }
        }
        for (i, gi) in self.g.iter().enumerate() {
            gi.validate()?;
            if gi.domain != self.q {
                return Err(Error::InvalidArgument(format!("g[{i}] domain differs from Q")));
            }
            if let Some(d) = gi.dim() {
                check_dim(self.dim_h2, d)?;
            }
        }
        for (i, ai) in self.a.iter().enumerate() {
            if ai.rows() != self.dim_h2 || ai.cols() != self.dim_h1 {
                return Err(Error::InvalidArgument(format!(
                    "A[{i}] is {}x{}, expected {}x{}",
                    ai.rows(),
                    ai.cols(),
                    self.dim_h2,
                    self.dim_h1
                )));
            }
        }
        for si in &self.s {
            si.validate()?;
            if let Some(d) = si.map.dim() {
                check_dim(self.dim_h1, d)?;
            }
        }
        Ok(())
    }

    pub fn max_k(&self) -> f64 {
        self.s.iter().map(|s| s.k).fold(0.0, f64::max)
    }

    pub fn spectral_bound(&self) -> Result<SpectralBound> {
        spectral_bound(&self.a)
    }
}

/// Which variant of the scheme the engine runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// General pseudo-contractions with split operators.
    #[default]
    Full,
    /// Nonexpansive mappings, `theta_n = 0`.
    Nonexpansive,
    /// `H_1 = H_2`, `C = Q`, every `A_i = I`.
    IdentityOperator,
}

/// Upper bound standing in for `sup |x_n - p|^2` in `theta_n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DBound {
    Fixed(f64),
    /// `(2|x_m| + diam C)^2`, maximised over the iterates seen so far.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub gamma: f64,
    pub r: Schedule,
    pub s: Schedule,
    pub alpha: Schedule,
    pub d_bound: DBound,
    pub tol_residual: f64,
    pub max_iter: usize,
    pub mode: Mode,
    pub projection_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            r: Schedule::Constant { value: 1.0 },
            s: Schedule::Constant { value: 1.0 },
            alpha: Schedule::Constant { value: 0.5 },
            d_bound: DBound::Auto,
            tol_residual: 1e-6,
            max_iter: 5_000,
            mode: Mode::Full,
            projection_tol: ITERATIVE_TOL,
            seed: 0,
        }
    }
}

/// `((n - 1) mod N) + 1`
pub fn cyclic_index(n: usize, families: usize) -> usize {
    assert!(n >= 1 && families >= 1, "cyclic_index needs n >= 1 and N >= 1");
    (n - 1) % families + 1
}

/// `(1 - alpha) (lambda xi(M) + lambda M* D + mu)`
pub fn theta(
    alpha: f64,
    lambda: f64,
    mu: f64,
    xi: &XiFunction,
    m: f64,
    m_star: f64,
    d_bound: f64,
) -> f64 {
    (1.0 - alpha) * (lambda * xi.eval(m) + lambda * m_star * d_bound + mu)
}

/// The five tracked residuals of one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// `|x_{n+1} - x_n|`
    pub step: f64,
    /// `|y_n - x_n|`
    pub y: f64,
    /// `|u_n - x_n|`
    pub u: f64,
    /// `|A_i x_n - T^{g_i} A_i x_n|`
    pub split: f64,
    /// `|S_i^n u_n - u_n|`
    pub fixed_point: f64,
}

impl Residuals {
    pub fn as_array(&self) -> [f64; 5] {
        [self.step, self.y, self.u, self.split, self.fixed_point]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    /// Family index in `1..=N`.
    pub family: usize,
    pub residuals: Residuals,
    pub theta: f64,
    pub d_bound: f64,
    pub x: Vector,
    pub u: Vector,
    pub y: Vector,
    pub x_next: Vector,
    pub halfspace: HalfSpace,
    /// Whether the half-space was added to the region.
    pub cut: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIter,
    Infeasible,
    Diverged,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::Infeasible => "infeasible",
            Status::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_point: Vector,
    pub iterations: usize,
    pub status: Status,
    pub trace: Vec<StepRecord>,
    /// Set when the run stopped on an infeasible projection or divergence.
    pub failure: Option<Error>,
}

/// Current iterate and accumulated region.
#[derive(Debug, Clone)]
pub struct SolverState {
    /// Index of the next step.
    pub n: usize,
    pub x1: Vector,
    pub x: Vector,
    pub region: ShrinkingRegion,
    pub d_bound: f64,
    pub history: Vec<StepRecord>,
}

/// Outcome of one (C1)-(C4) clause.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    /// `"C1"` to `"C4"`.
    pub condition: &'static str,
    pub clause: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn condition_passed(&self, condition: &str) -> bool {
        self.checks
            .iter()
            .filter(|c| c.condition == condition)
            .all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per failed clause, e.g. `(C3) lambda summable: ...`.
    pub fn failure_summary(&self) -> String {
        self.failures()
            .map(|c| format!("({}) {}: {}", c.condition, c.clause, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks the parameter conditions by inspecting the schedule rules.
pub fn validate_config(problem: &ProblemInstance, config: &SolverConfig) -> ConditionReport {
    let mut checks = Vec::new();
    let mut push = |condition, clause, passed, detail: String| {
        checks.push(ConditionCheck {
            condition,
            clause,
            passed,
            detail,
        })
    };

    match problem.spectral_bound() {
        Ok(bound) => {
            let ok = gamma_valid(config.gamma, &bound);
            push(
                "C1",
                "gamma in (0, 1/L)",
                ok,
                format!("gamma = {}, L = {}, 1/L = {}", config.gamma, bound.l, bound.gamma_upper()),
            );
        }
        Err(e) => push("C1", "gamma in (0, 1/L)", false, e.to_string()),
    }

    let k = problem.max_k();
    let alpha_ok = config.alpha.validate().is_ok();
    let (a, b) = config.alpha.bounds();
    push(
        "C1",
        "k < a <= alpha_n <= b < 1",
        alpha_ok && a > k && b < 1.0,
        format!("k = {k}, alpha in [{a}, {b}]"),
    );

    for (name, sched) in [("r_n", &config.r), ("s_n", &config.s)] {
        let (lo, _) = sched.bounds();
        let ok = sched.validate().is_ok() && lo > 0.0 && sched.liminf() > 0.0;
        push(
            "C2",
            if name == "r_n" { "liminf r_n > 0" } else { "liminf s_n > 0" },
            ok,
            format!("{name}: inf = {lo}, liminf = {}", sched.liminf()),
        );
    }

    let mut lambda_ok = true;
    let mut mu_ok = true;
    let mut xi_ok = true;
    let mut detail_l = Vec::new();
    let mut detail_m = Vec::new();
    let mut detail_x = Vec::new();
    for (i, s) in problem.s.iter().enumerate() {
        if !(s.lambda.is_summable() && s.lambda.is_nonnegative()) {
            lambda_ok = false;
            detail_l.push(format!("S[{i}] lambda {:?}", s.lambda));
        }
        if !(s.mu.is_summable() && s.mu.is_nonnegative()) {
            mu_ok = false;
            detail_m.push(format!("S[{i}] mu {:?}", s.mu));
        }
        if !s.xi.check_sampled(100.0) {
            xi_ok = false;
            detail_x.push(format!("S[{i}] xi {:?}", s.xi));
        }
    }
    let describe = |v: Vec<String>, ok_text: &str| {
        if v.is_empty() {
            ok_text.to_string()
        } else {
            format!("not summable/nonnegative: {}", v.join(", "))
        }
    };
    push("C3", "lambda_n summable", lambda_ok, describe(detail_l, "all summable"));
    push("C3", "mu_n summable", mu_ok, describe(detail_m, "all summable"));
    push(
        "C4",
        "xi(t) <= M* t beyond M",
        xi_ok,
        if detail_x.is_empty() {
            "growth constants hold".into()
        } else {
            format!("growth bound fails: {}", detail_x.join(", "))
        },
    );

    let numeric_ok = config.tol_residual > 0.0
        && config.tol_residual.is_finite()
        && config.max_iter > 0
        && config.projection_tol > 0.0;
    if !numeric_ok {
        push(
            "C1",
            "solver tolerances",
            false,
            format!(
                "tol = {}, max_iter = {}, projection tol = {}",
                config.tol_residual, config.max_iter, config.projection_tol
            ),
        );
    }
    if let DBound::Fixed(d) = config.d_bound {
        if !(d.is_finite() && d > 0.0) {
            push("C1", "D bound positive", false, format!("D = {d}"));
        }
    }
    ConditionReport { checks }
}

/// Rewrites the instance for a reduced mode.
pub fn mode_reduce(problem: &ProblemInstance, mode: Mode, seed: u64) -> Result<ProblemInstance> {
    let mut out = problem.clone();
    match mode {
        Mode::Full => {}
        Mode::IdentityOperator => {
            if problem.dim_h1 != problem.dim_h2 {
                return Err(Error::InvalidArgument(
                    "identity-operator mode needs equal dimensions".into(),
                ));
            }
            if problem.c != problem.q {
                return Err(Error::InvalidArgument("identity-operator mode needs C = Q".into()));
            }
            out.a = vec![LinearOperator::identity(problem.dim_h1); problem.families()];
        }
        Mode::Nonexpansive => {
            for (i, s) in out.s.iter_mut().enumerate() {
                let report = verify_class(
                    s,
                    MappingClass::Nonexpansive,
                    &problem.c,
                    problem.dim_h1,
                    1,
                    NONEXPANSIVE_SAMPLES,
                    seed,
                )?;
                if !report.passed() {
                    return Err(Error::InvalidArgument(format!(
                        "S[{i}] is not nonexpansive (worst slack {:e})",
                        report.worst()
                    )));
                }
                s.lambda = Schedule::Zero;
                s.mu = Schedule::Zero;
            }
        }
    }
    Ok(out)
}

/// Stateful driver for the iteration.
#[derive(Debug, Clone)]
pub struct Engine {
    problem: ProblemInstance,
    config: SolverConfig,
    bound: SpectralBound,
    caches: Vec<Option<PowerCache>>,
    diameter: f64,
    state: SolverState,
}

impl Engine {
    /// Validates the instance and configuration, applies the mode reduction
    /// and prepares power tables.
    pub fn new(problem: &ProblemInstance, config: &SolverConfig, x1: &Vector) -> Result<Self> {
        problem.validate()?;
        let problem = mode_reduce(problem, config.mode, config.seed)?;
        let report = validate_config(&problem, config);
        if !report.passed() {
            return Err(Error::InvalidArgument(format!(
                "conditions not met: {}",
                report.failure_summary()
            )));
        }
        check_dim(problem.dim_h1, x1.dim())?;
        if !x1.is_finite() {
            return Err(Error::InvalidArgument("x1 must be finite".into()));
        }
        if !problem.c.contains(x1, START_TOL) {
            return Err(Error::InvalidArgument("x1 must lie in C".into()));
        }
        let bound = problem.spectral_bound()?;
        let caches = problem
            .s
            .iter()
            .map(|s| s.power_cache(config.max_iter))
            .collect();
        let diameter = problem.c.diameter_proxy();
        let region = ShrinkingRegion::new(problem.c.clone(), x1.clone(), config.projection_tol)?;
        let d_bound = match config.d_bound {
            DBound::Fixed(d) => d,
            DBound::Auto => (2.0 * x1.norm() + diameter).powi(2),
        };
        let state = SolverState {
            n: 1,
            x1: x1.clone(),
            x: x1.clone(),
            region,
            d_bound,
            history: Vec::new(),
        };
        Ok(Self {
            problem,
            config: config.clone(),
            bound,
            caches,
            diameter,
            state,
        })
    }

    pub fn problem(&self) -> &ProblemInstance {
        &self.problem
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn spectral_bound(&self) -> &SpectralBound {
        &self.bound
    }

    /// Performs step `n` and advances to `x_{n+1}`.
    pub fn step(&mut self) -> Result<&StepRecord> {
        let n = self.state.n;
        let i = cyclic_index(n, self.problem.families()) - 1;
        let p = &self.problem;
        let cfg = &self.config;
        let x = &self.state.x;

        if let DBound::Auto = cfg.d_bound {
            let d = (2.0 * x.norm() + self.diameter).powi(2);
            self.state.d_bound = self.state.d_bound.max(d);
        }

        let ax = p.a[i].apply(x)?;
        let tg = resolvent(&p.g[i], &ResolventQuery::new(cfg.s.value(n), ax.clone())?)?;
        let gap = &ax - &tg;
        let mut w = x.clone();
        w.axpy(-cfg.gamma, &p.a[i].transpose().apply(&gap)?);
        let u = resolvent(&p.f[i], &ResolventQuery::new(cfg.r.value(n), w)?)?;
        let su = apply_power_cached(&p.s[i], self.caches[i].as_ref(), n, &u)?;
        let alpha = cfg.alpha.value(n);
        let y = u.lerp(&su, alpha);

        let s = &p.s[i];
        let (m, m_star) = s.xi.growth_constants();
        let th = theta(
            alpha,
            s.lambda.value(n),
            s.mu.value(n),
            &s.xi,
            m,
            m_star,
            self.state.d_bound,
        );
        let h = halfspace_from_iterates(x, &y, th);
        let cut = y.dist(x) > CUT_NOISE_FLOOR * (1.0 + x.norm()) && self.state.region.push(h.clone())?;
        let x_next = self.state.region.project_anchor()?;
        if !x_next.is_finite() {
            return Err(Error::Divergence { norm: x_next.norm() });
        }

        let residuals = Residuals {
            step: x_next.dist(x),
            y: y.dist(x),
            u: u.dist(x),
            split: gap.norm(),
            fixed_point: su.dist(&u),
        };
        let record = StepRecord {
            n,
            family: i + 1,
            residuals,
            theta: th,
            d_bound: self.state.d_bound,
            x: x.clone(),
            u,
            y,
            x_next: x_next.clone(),
            halfspace: h,
            cut,
        };
        self.state.x = x_next;
        self.state.n += 1;
        self.state.history.push(record);
        Ok(self.state.history.last().unwrap())
    }

    /// Steps until every residual stays below the tolerance for `N`
    /// consecutive steps, or the iteration cap is reached.
    pub fn run(mut self) -> Result<RunResult> {
        let families = self.problem.families();
        let tol = self.config.tol_residual;
        let mut quiet = 0usize;
        let mut status = Status::MaxIter;
        let mut failure = None;
        while self.state.history.len() < self.config.max_iter {
            match self.step() {
                Ok(rec) => {
                    if rec.residuals.max() < tol {
                        quiet += 1;
                    } else {
                        quiet = 0;
                    }
                    if quiet >= families {
                        status = Status::Converged;
                        break;
                    }
                }
                Err(e @ Error::Infeasible(_)) => {
                    status = Status::Infeasible;
                    failure = Some(e);
                    break;
                }
                Err(e @ Error::Divergence { .. }) => {
                    status = Status::Diverged;
                    failure = Some(e);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(RunResult {
            final_point: self.state.x,
            iterations: self.state.history.len(),
            status,
            trace: self.state.history,
            failure,
        })
    }
}

/// Runs one step on a fresh engine started at `x1` (mostly for inspection).
pub fn step(problem: &ProblemInstance, config: &SolverConfig, x1: &Vector) -> Result<StepRecord> {
    let mut engine = Engine::new(problem, config, x1)?;
    Ok(engine.step()?.clone())
}

pub fn run(problem: &ProblemInstance, config: &SolverConfig, x1: &Vector) -> Result<RunResult> {
    Engine::new(problem, config, x1)?.run()
}
