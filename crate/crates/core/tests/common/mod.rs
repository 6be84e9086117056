//! Seeded generators for affine test instances with a planted common point.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use splitep::convex::ConvexSet;
use splitep::equilibrium::Bifunction;
use splitep::mapping::{Map, MappingSpec, XiFunction};
use splitep::oracle::{project_onto_solution_set, solve_solution_set, AnalyticSolutionSet};
use splitep::schedule::Schedule;
use splitep::solver::{ProblemInstance, SolverConfig};
use splitep::space::{LinearOperator, Vector};

pub fn v(x: &[f64]) -> Vector {
    Vector::from(x)
}

pub struct Case {
    pub name: String,
    pub problem: ProblemInstance,
    pub config: SolverConfig,
    pub x1: Vector,
    pub solution: AnalyticSolutionSet,
    /// Projection of `x1` onto the solution set.
    pub target: Vector,
}

impl Case {
    pub fn new(name: &str, problem: ProblemInstance, config: SolverConfig, x1: Vector) -> Self {
        let solution = solve_solution_set(&problem).expect("oracle supports instance");
        let target = project_onto_solution_set(&solution, &x1).expect("solution set is nonempty");
        Case {
            name: name.to_string(),
            problem,
            config,
            x1,
            solution,
            target,
        }
    }
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> LinearOperator {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LinearOperator::from_row_major(rows, cols, data).unwrap()
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vector {
    Vector::from((0..dim).map(|_| scale * rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())
}

/// `G G'` with `G` of shape `dim x rank`, scaled so its largest eigenvalue is 1.
pub fn psd(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> LinearOperator {
    let g = gaussian_matrix(rng, dim, rank);
    let m = g.compose(&g.transpose()).unwrap();
    let top = m.spectral_norm();
    m.scaled(1.0 / top)
}

/// Orthogonal projector onto the span of `rank` random directions.
pub fn projector(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> LinearOperator {
    let g = gaussian_matrix(rng, dim, rank);
    // G (G'G)^{-1} G' through Gram-Schmidt on the columns
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..rank {
        let mut c: Vec<f64> = (0..dim).map(|i| g.get(i, j)).collect();
        for q in &cols {
            let d: f64 = c.iter().zip(q).map(|(a, b)| a * b).sum();
            for (ci, qi) in c.iter_mut().zip(q) {
                *ci -= d * qi;
            }
        }
        let n = c.iter().map(|a| a * a).sum::<f64>().sqrt();
        cols.push(c.into_iter().map(|a| a / n).collect());
    }
    let mut data = vec![0.0; dim * dim];
    for q in &cols {
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] += q[i] * q[j];
            }
        }
    }
    LinearOperator::from_row_major(dim, dim, data).unwrap()
}

/// Rotation by `angle` in the plane of coordinates `(0, 1)`.
pub fn plane_rotation(dim: usize, angle: f64) -> LinearOperator {
    let mut data = LinearOperator::identity(dim).to_rows();
    let (s, c) = angle.sin_cos();
    data[0][0] = c;
    data[0][1] = -s;
    data[1][0] = s;
    data[1][1] = c;
    LinearOperator::from_rows(data).unwrap()
}

/// `x -> z + B (x - z)`, which fixes `z` and every `z + ker(I - B)`.
pub fn around(b: LinearOperator, z: &Vector) -> Map {
    let shift = z - &b.apply(z).unwrap();
    Map::Affine { matrix: b, shift }
}

#[derive(Debug, Clone, Copy)]
pub enum MapKind {
    Identity,
    Projector,
    Rotation,
    Contraction,
    /// `[[0, 1.5], [0, 0]]` block: 0.6-strict, not nonexpansive.
    Nilpotent,
    /// Nonexpansive map claimed with summable `lambda_n`, `mu_n`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy)]
pub enum FamilyKind {
    Zero,
    LowRankAffine,
    SkewAffine,
    Quadratic,
}

pub struct Blueprint {
    pub dim_h1: usize,
    pub dim_h2: usize,
    pub families: Vec<(FamilyKind, FamilyKind, MapKind)>,
    pub seed: u64,
}

fn bifunction(rng: &mut ChaCha8Rng, kind: FamilyKind, d: usize, z: &Vector) -> Bifunction {
    let w = ConvexSet::WholeSpace;
    match kind {
        FamilyKind::Zero => Bifunction::zero(w),
        FamilyKind::LowRankAffine => {
            let m = psd(rng, d, (d / 2).max(1));
            let q = -&m.apply(z).unwrap();
            Bifunction::monotone_affine(m, q, w).unwrap()
        }
        FamilyKind::SkewAffine => {
            let p = psd(rng, d, (d / 2).max(1));
            let h = gaussian_matrix(rng, d, d);
            let skew = h.add_scaled(-1.0, &h.transpose()).unwrap().scaled(0.3);
            let m = p.add_scaled(1.0, &skew).unwrap();
            let q = -&m.apply(z).unwrap();
            Bifunction::monotone_affine(m, q, w).unwrap()
        }
        FamilyKind::Quadratic => {
            let p = psd(rng, d, (d / 2).max(1));
            let c = -&p.apply(z).unwrap();
            Bifunction::convex_difference(p, c, w).unwrap()
        }
    }
}

fn mapping(rng: &mut ChaCha8Rng, kind: MapKind, d: usize, z: &Vector) -> MappingSpec {
    match kind {
        MapKind::Identity => MappingSpec::nonexpansive(Map::identity(d)),
        MapKind::Projector => {
            let rank = (d + 1) / 2;
            MappingSpec::nonexpansive(around(projector(rng, d, rank), z))
        }
        MapKind::Rotation => {
            let angle = rng.gen_range(0.3..1.2);
            let b = if d >= 2 { plane_rotation(d, angle) } else { LinearOperator::scaled_identity(1, -1.0) };
            MappingSpec::nonexpansive(around(b, z))
        }
        MapKind::Contraction => {
            let b = projector(rng, d, d.min(2)).scaled(0.5);
            MappingSpec::nonexpansive(around(b, z))
        }
        MapKind::Nilpotent => {
            let mut rows = LinearOperator::identity(d).to_rows();
            if d >= 2 {
                rows[0] = vec![0.0; d];
                rows[1] = vec![0.0; d];
                rows[0][1] = 1.5;
            } else {
                rows[0][0] = 0.0;
            }
            let b = LinearOperator::from_rows(rows).unwrap();
            MappingSpec::nonexpansive(around(b, z)).with_k(0.6)
        }
        MapKind::Asymptotic => {
            let b = projector(rng, d, (d + 1) / 2);
            MappingSpec::nonexpansive(around(b, z))
                .with_schedules(
                    Schedule::Geometric { scale: 0.1, ratio: 0.9 },
                    Schedule::Geometric { scale: 0.01, ratio: 0.9 },
                )
                .with_xi(XiFunction::PiecewiseQuad { m: 1.0 })
        }
    }
}

/// Builds an instance on the whole space whose pieces all contain a planted
/// point, so the solution set is nonempty.
pub fn affine_case(name: &str, bp: &Blueprint) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(bp.seed);
    let z = gaussian_vector(&mut rng, bp.dim_h1, 1.0);
    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut a = Vec::new();
    let mut s = Vec::new();
    let mut k_max: f64 = 0.0;
    for &(fk, gk, mk) in &bp.families {
        f.push(bifunction(&mut rng, fk, bp.dim_h1, &z));
        let ai = gaussian_matrix(&mut rng, bp.dim_h2, bp.dim_h1);
        let az = ai.apply(&z).unwrap();
        g.push(bifunction(&mut rng, gk, bp.dim_h2, &az));
        a.push(ai);
        let si = mapping(&mut rng, mk, bp.dim_h1, &z);
        k_max = k_max.max(si.k);
        s.push(si);
    }
    let problem = ProblemInstance {
        dim_h1: bp.dim_h1,
        dim_h2: bp.dim_h2,
        c: ConvexSet::WholeSpace,
        q: ConvexSet::WholeSpace,
        f,
        g,
        a,
        s,
    };
    let l = problem.spectral_bound().unwrap().l;
    let config = SolverConfig {
        gamma: 0.9 / l,
        alpha: Schedule::Constant { value: if k_max > 0.0 { 0.8 } else { 0.5 } },
        ..SolverConfig::default()
    };
    let x1 = gaussian_vector(&mut rng, bp.dim_h1, 3.0);
    Case::new(name, problem, config, x1)
}

/// The generated instances shared by the convergence-related suites.
pub fn oracle_suite() -> Vec<Case> {
    use FamilyKind::*;
    use MapKind::*;
    let specs: Vec<(&str, usize, usize, Vec<(FamilyKind, FamilyKind, MapKind)>)> = vec![
        ("scalar", 1, 1, vec![(LowRankAffine, Zero, Identity)]),
        ("projector-plane", 3, 1, vec![(Zero, Zero, Projector)]),
        ("line-projector", 2, 1, vec![(Zero, LowRankAffine, Projector)]),
        ("rotation-axis", 3, 2, vec![(Zero, Zero, Rotation)]),
        ("rotation", 3, 2, vec![(LowRankAffine, Zero, Rotation)]),
        ("null-space", 6, 3, vec![(LowRankAffine, Zero, Identity)]),
        ("two-families", 4, 3, vec![(LowRankAffine, Zero, Projector), (Zero, LowRankAffine, Identity)]),
        ("skew", 5, 4, vec![(SkewAffine, LowRankAffine, Identity), (Quadratic, Zero, Projector)]),
        ("nilpotent", 3, 3, vec![(LowRankAffine, Zero, Nilpotent)]),
        ("asymptotic", 4, 2, vec![(Zero, LowRankAffine, Asymptotic)]),
        ("three-families", 6, 4, vec![
            (LowRankAffine, Zero, Projector),
            (Zero, Quadratic, Identity),
            (Quadratic, Zero, Contraction),
        ]),
        ("wide", 8, 5, vec![(LowRankAffine, LowRankAffine, Projector), (Zero, Zero, Rotation)]),
        ("mixed", 7, 7, vec![
            (SkewAffine, Zero, Identity),
            (Zero, LowRankAffine, Asymptotic),
            (Quadratic, Quadratic, Projector),
        ]),
        ("tall", 2, 6, vec![(Zero, LowRankAffine, Identity), (Zero, Quadratic, Identity)]),
        ("split-only", 4, 2, vec![(Zero, LowRankAffine, Identity), (Zero, Zero, Identity)]),
        ("asymptotic-plane", 5, 3, vec![(Zero, Zero, Asymptotic), (LowRankAffine, Zero, Identity)]),
        ("single-point", 5, 5, vec![(Zero, Zero, Contraction)]),
    ];
    specs
        .into_iter()
        .enumerate()
        .map(|(i, (name, d1, d2, families))| {
            affine_case(
                name,
                &Blueprint {
                    dim_h1: d1,
                    dim_h2: d2,
                    families,
                    seed: 1000 + i as u64,
                },
            )
        })
        .collect()
}
