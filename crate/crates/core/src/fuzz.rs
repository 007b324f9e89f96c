//! Randomized verification of the cost and speed relations on generic frames.
//!
//! Each check draws a random Hermitian pair (H, dH/dt), builds a spectral
//! frame, and evaluates every relation residual. Frames are generated from a
//! counter-based RNG stream (one stream per index), so the battery is
//! deterministic for a given seed regardless of thread scheduling, and any
//! violation can be reproduced from (seed, index) alone.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adiabatic::{frame_from_operators, SpectralFrame};
use crate::costspeed::{
    cost_relation_residual, cost_report, ensemble_speed, equality_condition_gap,
    speed_cost_check_collective, speed_cost_check_individual, CanonicalEnsemble,
};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::parallel;

/// Relative tolerance for relations that hold as identities.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Couplings below this are treated as exact stationarity when asserting the
/// strict collective inequality.
pub const COUPLING_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub frames: usize,
    pub seed: u64,
    pub dim_min: usize,
    pub dim_max: usize,
    pub alphas: Vec<f64>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            frames: 200,
            seed: 42,
            dim_min: 2,
            dim_max: 6,
            alphas: vec![1.0, 2.0, 4.0],
        }
    }
}

/// Worst residuals observed across the battery. All are normalized so the
/// pass thresholds are scale-free.
#[derive(Debug, Clone, Copy, Default)]
pub struct RelationResiduals {
    /// max |dC - [1/2 sum (dC_n)^(2/a)]^(a/2)| / dC.
    pub cost_relation: f64,
    /// max |v_n - (dC_n)^(1/a)/sqrt(2)| / v_n.
    pub speed_cost_individual: f64,
    /// max (v - sqrt(sum p v_n^2)), positive part.
    pub speed_chain_violation: f64,
    /// min margin (dC)^(1/a) - v over frames with nonzero couplings.
    pub collective_margin_min: f64,
    /// max relative spread of {dC_1, dC_2, dC} on two-level frames.
    pub dim2_equality: f64,
    /// max |equality gap| / dC_mid on three-level frames whose outer pair is
    /// uncoupled.
    pub middle_level_gap: f64,
}

#[derive(Debug, Clone)]
pub struct FuzzViolation {
    pub frame_index: usize,
    pub relation: &'static str,
    pub value: f64,
    pub dim: usize,
    /// Row-major (re, im) pairs for reproduction in reports.
    pub h: Vec<(f64, f64)>,
    pub dh: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub frames: usize,
    pub seed: u64,
    pub residuals: RelationResiduals,
    pub violations: Vec<FuzzViolation>,
    pub pass: bool,
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(gaussian(rng), 0.0);
        for j in i + 1..dim {
            let re = gaussian(rng) / 2.0_f64.sqrt();
            let im = gaussian(rng) / 2.0_f64.sqrt();
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
    }
    HermitianOperator::new(m).expect("construction is Hermitian by symmetry")
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; avoids ln(0).
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_populations(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| -rng.gen_range(f64::MIN_POSITIVE..1.0_f64).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Random nondegenerate frame plus its generating operators.
fn random_frame(
    rng: &mut impl Rng,
    dim: usize,
) -> (SpectralFrame, HermitianOperator, HermitianOperator) {
    loop {
        let h = random_hermitian(rng, dim);
        let dh = random_hermitian(rng, dim);
        if let Ok(frame) = frame_from_operators(&h, &dh, 0.0) {
            return (frame, h, dh);
        }
        // Degenerate draw (measure zero); resample.
    }
}

/// Three-level frame whose outer levels are uncoupled, the pattern for which
/// driving the middle level individually costs as much as driving everything.
fn random_middle_pattern_frame(
    rng: &mut impl Rng,
) -> (SpectralFrame, HermitianOperator, HermitianOperator) {
    loop {
        // Diagonal H with well-separated entries keeps the eigenbasis trivial,
        // so zeroing dH[0][2] zeroes the outer coupling exactly.
        let mut diag: Vec<f64> = (0..3).map(|_| gaussian(rng)).collect();
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = match HermitianOperator::new(ComplexMatrix::from_real_diag(&diag)) {
            Ok(h) => h,
            Err(_) => continue,
        };
        let mut dh_m = random_hermitian(rng, 3).into_matrix();
        dh_m[(0, 2)] = C64::new(0.0, 0.0);
        dh_m[(2, 0)] = C64::new(0.0, 0.0);
        let dh = HermitianOperator::new(dh_m).expect("still Hermitian");
        if let Ok(frame) = frame_from_operators(&h, &dh, 0.0) {
            return (frame, h, dh);
        }
    }
}

struct FrameOutcome {
    residuals: RelationResiduals,
    violations: Vec<FuzzViolation>,
}

fn serialize(op: &HermitianOperator) -> Vec<(f64, f64)> {
    op.matrix().entries().iter().map(|c| (c.re, c.im)).collect()
}

/// Run every relation check for one (seed, index) pair.
pub fn check_frame(cfg: &FuzzConfig, index: usize) -> FuzzReportEntry {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);

    let dim = cfg.dim_min + index % (cfg.dim_max - cfg.dim_min + 1);
    let (frame, h, dh) = random_frame(&mut rng, dim);
    let populations = random_populations(&mut rng, dim);
    let ensemble = CanonicalEnsemble::from_populations(populations).expect("normalized");

    let mut out = FrameOutcome {
        residuals: RelationResiduals {
            collective_margin_min: f64::INFINITY,
            ..Default::default()
        },
        violations: Vec::new(),
    };
    let violate = |relation: &'static str, value: f64| FuzzViolation {
        frame_index: index,
        relation,
        value,
        dim,
        h: serialize(&h),
        dh: serialize(&dh),
    };

    let speed = ensemble_speed(&frame, &ensemble);
    let chain_bound = speed
        .v_n
        .iter()
        .zip(ensemble.populations.iter())
        .map(|(v, p)| p * v * v)
        .sum::<f64>()
        .sqrt();
    let v_max = speed.v_n.iter().cloned().fold(0.0, f64::max);
    // Both links of the chain: v <= sqrt(sum p v^2) <= max v_n.
    let chain_violation = (speed.v - chain_bound)
        .max(chain_bound - v_max)
        .max(0.0);
    out.residuals.speed_chain_violation = chain_violation;
    if chain_violation > RESIDUAL_TOL {
        out.violations.push(violate("speed_chain", chain_violation));
    }

    let max_coupling = (0..dim)
        .flat_map(|m| (0..dim).map(move |n| (m, n)))
        .filter(|(m, n)| m != n)
        .map(|(m, n)| frame.couplings[(m, n)].norm())
        .fold(0.0, f64::max);

    for &alpha in &cfg.alphas {
        let report = cost_report(&frame, alpha);
        let rel = (cost_relation_residual(&report) / report.collective_rate).abs();
        out.residuals.cost_relation = out.residuals.cost_relation.max(rel);
        if rel > RESIDUAL_TOL {
            out.violations.push(violate("cost_relation", rel));
        }

        for n in 0..dim {
            let v_n = crate::costspeed::fubini_study_metric(&frame, n).sqrt();
            if v_n == 0.0 {
                continue;
            }
            let res = (speed_cost_check_individual(&frame, n, alpha) / v_n).abs();
            out.residuals.speed_cost_individual = out.residuals.speed_cost_individual.max(res);
            if res > RESIDUAL_TOL {
                out.violations.push(violate("speed_cost_individual", res));
            }
        }

        let margin = speed_cost_check_collective(&frame, &ensemble, alpha);
        if max_coupling > COUPLING_FLOOR {
            out.residuals.collective_margin_min =
                out.residuals.collective_margin_min.min(margin);
            if margin <= 0.0 {
                out.violations.push(violate("collective_speed_cost", margin));
            }
        }

        if dim == 2 {
            let c = report.collective_rate;
            let spread = report
                .individual_rates
                .iter()
                .map(|r| (r - c).abs() / c)
                .fold(0.0, f64::max);
            out.residuals.dim2_equality = out.residuals.dim2_equality.max(spread);
            if spread > RESIDUAL_TOL {
                out.violations.push(violate("two_level_equality", spread));
            }
        }
    }

    // Patterned three-level frame: uncoupled outer pair forces a vanishing
    // equality gap for the middle level.
    let (pframe, ph, pdh) = random_middle_pattern_frame(&mut rng);
    for &alpha in &cfg.alphas {
        let report = cost_report(&pframe, alpha);
        let gap = (equality_condition_gap(&report, 1) / report.individual_rates[1]).abs();
        out.residuals.middle_level_gap = out.residuals.middle_level_gap.max(gap);
        if gap > RESIDUAL_TOL {
            out.violations.push(FuzzViolation {
                frame_index: index,
                relation: "middle_level_equality",
                value: gap,
                dim: 3,
                h: serialize(&ph),
                dh: serialize(&pdh),
            });
        }
    }

    FuzzReportEntry {
        residuals: out.residuals,
        violations: out.violations,
    }
}

/// Per-frame outcome; aggregated by [`run_relations_fuzz`].
pub struct FuzzReportEntry {
    pub residuals: RelationResiduals,
    pub violations: Vec<FuzzViolation>,
}

/// Run the full battery. Frames are evaluated in parallel; aggregation is a
/// fixed-order fold so the report is deterministic.
pub fn run_relations_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let entries = parallel::map_indexed(cfg.frames, |i| check_frame(cfg, i));

    let mut residuals = RelationResiduals {
        collective_margin_min: f64::INFINITY,
        ..Default::default()
    };
    let mut violations = Vec::new();
    for entry in entries {
        let r = entry.residuals;
        residuals.cost_relation = residuals.cost_relation.max(r.cost_relation);
        residuals.speed_cost_individual = residuals
            .speed_cost_individual
            .max(r.speed_cost_individual);
        residuals.speed_chain_violation = residuals
            .speed_chain_violation
            .max(r.speed_chain_violation);
        residuals.collective_margin_min =
            residuals.collective_margin_min.min(r.collective_margin_min);
        residuals.dim2_equality = residuals.dim2_equality.max(r.dim2_equality);
        residuals.middle_level_gap = residuals.middle_level_gap.max(r.middle_level_gap);
        violations.extend(entry.violations);
    }

    let pass = violations.is_empty();
    FuzzReport {
        frames: cfg.frames,
        seed: cfg.seed,
        residuals,
        violations,
        pass,
    }
}
