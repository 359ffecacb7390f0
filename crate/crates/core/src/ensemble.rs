//! Statistical machinery of the metric-perturbation ensemble: cell weights,
//! the ten-dimensional perturbation integrals C and C', partition-function
//! scaling exponents, and the Ricci-flat dominance ratio.
//!
//! A cell carries weight exp(−μ_Δ R_α²). Around a Ricci-flat background the
//! per-cell perturbation integral is ∫ exp(−μ_Δ c‖δg‖⁴) d¹⁰(δg) ∝ μ_Δ^{-10/4};
//! with a Ricci background of size ρ the growth direction turns Gaussian and
//! the integral drops to ∝ μ_Δ^{-11/4} ρ⁻¹. Everything here is estimated by
//! seeded, batched Monte Carlo with importance proposals whose radial law is
//! matched to the exp(−r⁴) tails, plus a Halton/inverse-CDF quasi-random
//! cross-check; heavy-tail weights are handled in log space.

use crate::error::{Error, Result};
use crate::metric::MetricField;
use crate::quadrature::{self, KahanSum, Normalization, QuadratureSpec};
use crate::special::{gamma, halton, inverse_normal_cdf, ln_gamma, unit_sphere_area};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma as GammaDist, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

const BATCH: u64 = 16_384;

/// Ensemble parameters. `mu_delta` is the cell weight scale μ_Δ = Δ·μ in
/// Planck-normalized units; `rho` bounds the Ricci-background magnitude.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleConfig {
    pub mu_delta: f64,
    /// Number of cells N in the subdivision.
    pub cells: u64,
    pub rho: f64,
    /// Quartic coefficient c; only exponents matter, so it defaults free.
    pub c_quartic: f64,
    pub seed: u64,
    pub samples: u64,
    /// Action coefficient μ of the macro-state formula log Π = −μI + k·Vol.
    pub mu_action: f64,
    /// Volume coefficient k of the same formula.
    pub k_volume: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            mu_delta: 1e4,
            cells: 100,
            rho: 1.0,
            c_quartic: 1.0,
            seed: 42,
            samples: 1_000_000,
            mu_action: 1.0,
            k_volume: 1.0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu_delta <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "mu_delta must be > 0, got {}",
                self.mu_delta
            )));
        }
        if self.rho < 0.0 {
            return Err(Error::InvalidParam(format!(
                "rho must be >= 0, got {}",
                self.rho
            )));
        }
        if self.c_quartic <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "c_quartic must be > 0, got {}",
                self.c_quartic
            )));
        }
        Ok(())
    }

    /// Scale below which the Gaussian split is no longer valid.
    pub fn regime_bound(&self) -> f64 {
        self.mu_delta.powf(-0.25)
    }

    /// True when ρ is comfortably (10×) above μ_Δ^{-1/4}.
    pub fn regime_flag(&self) -> bool {
        self.rho >= 10.0 * self.regime_bound()
    }

    fn require_regime(&self) -> Result<()> {
        let bound = self.regime_bound();
        if self.rho <= bound {
            return Err(Error::RegimeViolation {
                rho: self.rho,
                bound,
            });
        }
        Ok(())
    }
}

/// Cell weight exp(−μ_Δ R_α²) ∈ (0, 1].
pub fn cell_weight(r_alpha: f64, mu_delta: f64) -> Result<f64> {
    Ok(log_cell_weight(r_alpha, mu_delta)?.exp())
}

/// log of the cell weight, −μ_Δ R_α²; safe at scales where the weight itself
/// underflows.
pub fn log_cell_weight(r_alpha: f64, mu_delta: f64) -> Result<f64> {
    if mu_delta <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "mu_delta must be > 0, got {mu_delta}"
        )));
    }
    Ok(-mu_delta * r_alpha * r_alpha)
}

/// Monte Carlo estimate with its quasi-random cross-check and closed form.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub stderr: f64,
    pub qmc_value: f64,
    pub closed_form: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Closed form of C = ∫_{R^10} exp(−‖x‖⁴) dx = Ω₉ · Γ(10/4)/4 = π^{11/2}/64.
pub fn quartic_closed_form() -> f64 {
    std::f64::consts::PI.powf(5.5) / 64.0
}

/// Closed form of C' = ∫ exp(−x² − ‖y‖⁴) dx d⁹y = √π · Ω₈ · Γ(9/4)/4.
pub fn mixed_closed_form() -> f64 {
    std::f64::consts::PI.sqrt() * unit_sphere_area(9) * gamma(2.25) / 4.0
}

/// 1-D analog ∫ exp(−x⁴) dx = 2 Γ(5/4), a sanity anchor for the radial law.
pub fn quartic_closed_form_1d() -> f64 {
    2.0 * gamma(1.25)
}

/// Proposal-scale factor: >1 keeps the proposal tails strictly heavier than
/// the target so importance weights stay bounded.
const RADIAL_SCALE: f64 = 1.15;
const GAUSS_SCALE: f64 = 1.1;

/// Batched, seeded reduction of a weight function of one RNG stream.
/// Batch b draws from stream (salt, b), so results are bit-identical for a
/// fixed seed and sample count regardless of thread count.
fn mc_mean(
    samples: u64,
    seed: u64,
    salt: u64,
    weight: impl Fn(&mut ChaCha8Rng) -> f64 + Sync,
) -> (f64, f64) {
    let batches: Vec<u64> = (0..samples.div_ceil(BATCH)).collect();
    let partials: Vec<(f64, f64, u64)> = batches
        .par_iter()
        .map(|&b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((salt << 32) | b);
            let count = BATCH.min(samples - b * BATCH);
            let mut sum = KahanSum::default();
            let mut sumsq = KahanSum::default();
            for _ in 0..count {
                let w = weight(&mut rng);
                sum.add(w);
                sumsq.add(w * w);
            }
            (sum.value(), sumsq.value(), count)
        })
        .collect();
    let mut sum = KahanSum::default();
    let mut sumsq = KahanSum::default();
    let mut n = 0u64;
    for (s, s2, c) in partials {
        sum.add(s);
        sumsq.add(s2);
        n += c;
    }
    let mean = sum.value() / n as f64;
    let var = (sumsq.value() / n as f64 - mean * mean).max(0.0);
    (mean, (var / n as f64).sqrt())
}

/// Isotropic direction in R^DIM.
fn unit_vector<const DIM: usize>(rng: &mut ChaCha8Rng) -> [f64; DIM] {
    loop {
        let mut v = [0.0; DIM];
        let mut norm2 = 0.0;
        for slot in v.iter_mut() {
            let z: f64 = StandardNormal.sample(rng);
            *slot = z;
            norm2 += z * z;
        }
        if norm2 > 1e-24 {
            let inv = norm2.sqrt().recip();
            for slot in v.iter_mut() {
                *slot *= inv;
            }
            return v;
        }
    }
}

/// log normalization of the isotropic radial-gamma proposal in R^d with
/// density q(x) = 4 exp(−(r/s)⁴) / (s^d Γ(d/4) Ω_{d-1}) ... expressed through
/// the gamma law U ~ Gamma(d/4, 1), r = s U^{1/4}.
fn log_radial_norm(d: usize, s: f64) -> f64 {
    // q(x) = q_r(r) / (Ω_{d-1} r^{d-1}),  q_r(r) = 4 r^{d-1} e^{-(r/s)^4} / (s^d Γ(d/4))
    (4.0_f64).ln() - (d as f64) * s.ln() - ln_gamma(d as f64 / 4.0) - unit_sphere_area(d).ln()
}

/// MC + QMC estimate of the 10-dimensional quartic integral
/// C = ∫ exp(−‖x‖⁴) d¹⁰x.
pub fn quartic_integral_c(samples: u64, seed: u64) -> IntegralEstimate {
    let d = 10usize;
    let s = RADIAL_SCALE;
    let gamma_dist = GammaDist::new(d as f64 / 4.0, 1.0).unwrap();
    let log_norm = log_radial_norm(d, s);
    let (value, stderr) = mc_mean(samples, seed, 1, |rng| {
        let u: f64 = gamma_dist.sample(rng);
        let r = s * u.powf(0.25);
        // direction drawn for completeness; the isotropic weight is radial
        let _dir = unit_vector::<10>(rng);
        let log_w = -r.powi(4) + (r / s).powi(4) - log_norm;
        log_w.exp()
    });

    // Quasi-random cross-check through a Gaussian map.
    let sigma = 0.5;
    let qmc_n = 65_536usize;
    let mut acc = KahanSum::default();
    for i in 1..=qmc_n {
        let u = halton::<10>(i);
        let mut r2 = 0.0;
        let mut log_q = 0.0;
        for &ui in &u {
            let z = sigma * inverse_normal_cdf(ui.clamp(1e-12, 1.0 - 1e-12));
            r2 += z * z;
            log_q +=
                -0.5 * (z / sigma).powi(2) - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
        }
        acc.add((-r2 * r2 - log_q).exp());
    }
    IntegralEstimate {
        value,
        stderr,
        qmc_value: acc.value() / qmc_n as f64,
        closed_form: quartic_closed_form(),
        samples,
        seed,
    }
}

/// MC + QMC estimate of the mixed integral
/// C' = ∫ exp(−x² − ‖y‖⁴) dx d⁹y (1 Gaussian direction + 9 quartic ones).
pub fn mixed_integral_cprime(samples: u64, seed: u64) -> IntegralEstimate {
    let s = RADIAL_SCALE;
    let sigma_x = GAUSS_SCALE / std::f64::consts::SQRT_2;
    let gamma_dist = GammaDist::new(9.0 / 4.0, 1.0).unwrap();
    let log_norm_y = log_radial_norm(9, s);
    let log_norm_x = -(sigma_x * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let (value, stderr) = mc_mean(samples, seed, 2, |rng| {
        let zx: f64 = StandardNormal.sample(rng);
        let x = sigma_x * zx;
        let u: f64 = gamma_dist.sample(rng);
        let r = s * u.powf(0.25);
        let _dir = unit_vector::<9>(rng);
        let log_w =
            -x * x - r.powi(4) - (log_norm_x - 0.5 * zx * zx) - (log_norm_y - (r / s).powi(4));
        log_w.exp()
    });

    let qmc_n = 65_536usize;
    let sigma_y = 0.55;
    let mut acc = KahanSum::default();
    for i in 1..=qmc_n {
        let u = halton::<10>(i);
        let x = sigma_x * inverse_normal_cdf(u[0].clamp(1e-12, 1.0 - 1e-12));
        let mut r2 = 0.0;
        let mut log_q = -0.5 * (x / sigma_x).powi(2) + log_norm_x;
        for &ui in &u[1..] {
            let z = sigma_y * inverse_normal_cdf(ui.clamp(1e-12, 1.0 - 1e-12));
            r2 += z * z;
            log_q +=
                -0.5 * (z / sigma_y).powi(2) - (sigma_y * (2.0 * std::f64::consts::PI).sqrt()).ln();
        }
        acc.add((-x * x - r2 * r2 - log_q).exp());
    }
    IntegralEstimate {
        value,
        stderr,
        qmc_value: acc.value() / qmc_n as f64,
        closed_form: mixed_closed_form(),
        samples,
        seed,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScalingBranch {
    /// Per-cell integrand exp(−μ_Δ c ‖δg‖⁴): slope −10/4.
    RicciFlat,
    /// Split integrand exp(−½ μ_Δ (ρ²‖δg'‖² + c‖δg''‖⁴)): slope −11/4.
    RicciBackground,
}

/// Log-log slope report of the per-cell integral against μ_Δ.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeReport {
    pub branch: ScalingBranch,
    pub slope: f64,
    pub stderr: f64,
    pub mu_grid: Vec<f64>,
    /// (ln μ, ln Î(μ)) fit points.
    pub points: Vec<(f64, f64)>,
    pub samples: u64,
    pub seed: u64,
}

/// Per-cell Ricci-flat integral ∫ exp(−μ c ‖x‖⁴) d¹⁰x, estimated honestly at
/// the given μ (fresh substream; the μ-scaling is not factored out).
fn per_cell_flat(mu: f64, c: f64, samples: u64, seed: u64, salt: u64) -> (f64, f64) {
    let d = 10usize;
    let s = RADIAL_SCALE;
    let lam = (mu * c).powf(-0.25);
    let gamma_dist = GammaDist::new(d as f64 / 4.0, 1.0).unwrap();
    let log_norm = log_radial_norm(d, s) - (d as f64) * lam.ln();
    mc_mean(samples, seed, salt, |rng| {
        let u: f64 = gamma_dist.sample(rng);
        let r = s * lam * u.powf(0.25);
        let log_w = -mu * c * r.powi(4) + (r / (s * lam)).powi(4) - log_norm;
        log_w.exp()
    })
}

/// Per-cell Ricci-background integral
/// ∫ exp(−½ μ (ρ² x² + c ‖y‖⁴)) dx d⁹y.
fn per_cell_background(
    mu: f64,
    rho: f64,
    c: f64,
    samples: u64,
    seed: u64,
    salt: u64,
) -> (f64, f64) {
    let s = RADIAL_SCALE;
    let sigma_x = GAUSS_SCALE / (mu * rho * rho).sqrt();
    let lam_y = (2.0 / (mu * c)).powf(0.25);
    let gamma_dist = GammaDist::new(9.0 / 4.0, 1.0).unwrap();
    let log_norm_x = -(sigma_x * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let log_norm_y = log_radial_norm(9, s) - 9.0 * lam_y.ln();
    mc_mean(samples, seed, salt, |rng| {
        let zx: f64 = StandardNormal.sample(rng);
        let x = sigma_x * zx;
        let u: f64 = gamma_dist.sample(rng);
        let r = s * lam_y * u.powf(0.25);
        let log_w = -0.5 * mu * (rho * rho * x * x + c * r.powi(4))
            - (log_norm_x - 0.5 * zx * zx)
            - (log_norm_y - (r / (s * lam_y)).powi(4));
        log_w.exp()
    })
}

/// Ordinary least-squares slope with its standard error.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len();
    if n < 3 {
        return Err(Error::IllConditioned(format!(
            "need >= 3 grid points for a slope fit, got {n}"
        )));
    }
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    if sxx < 1e-12 {
        return Err(Error::IllConditioned("mu grid has no spread".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = if n > 2 {
        (ss_res / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// Log-spaced grid over [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Fit the log-log slope of the per-cell perturbation integral against μ_Δ.
///
/// The grid must span at least two decades; the Ricci-background branch
/// additionally needs ρ > μ_Δ^{-1/4} at every grid point.
pub fn scaling_exponent(
    branch: ScalingBranch,
    mu_grid: &[f64],
    config: &EnsembleConfig,
) -> Result<SlopeReport> {
    config.validate()?;
    if mu_grid.len() < 3 {
        return Err(Error::InvalidParam(
            "mu grid needs at least 3 points".into(),
        ));
    }
    let (lo, hi) = mu_grid
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &m| {
            (lo.min(m), hi.max(m))
        });
    if hi / lo < 99.0 {
        return Err(Error::InvalidParam(format!(
            "mu grid must span >= 2 decades, got [{lo}, {hi}]"
        )));
    }
    if branch == ScalingBranch::RicciBackground {
        let bound = lo.powf(-0.25);
        if config.rho <= bound {
            return Err(Error::RegimeViolation {
                rho: config.rho,
                bound,
            });
        }
    }

    let points: Vec<(f64, f64)> = mu_grid
        .iter()
        .enumerate()
        .map(|(i, &mu)| {
            let (est, _) = match branch {
                ScalingBranch::RicciFlat => per_cell_flat(
                    mu,
                    config.c_quartic,
                    config.samples,
                    config.seed,
                    16 + i as u64,
                ),
                ScalingBranch::RicciBackground => per_cell_background(
                    mu,
                    config.rho,
                    config.c_quartic,
                    config.samples,
                    config.seed,
                    64 + i as u64,
                ),
            };
            (mu.ln(), est.ln())
        })
        .collect();

    let (slope, stderr) = fit_log_slope(&points)?;
    Ok(SlopeReport {
        branch,
        slope,
        stderr,
        mu_grid: mu_grid.to_vec(),
        points,
        samples: config.samples,
        seed: config.seed,
    })
}

/// Per-cell and N-cell dominance of Ricci-flat over Ricci-background states.
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    /// τ = (C'/C) μ_Δ^{-1/4} ρ⁻¹; < 1 in the valid regime.
    pub tau: f64,
    pub log_tau: f64,
    pub cells: u64,
    /// N · log τ, the log of the N-cell probability ratio.
    pub log_ratio: f64,
    pub regime_flag: bool,
}

/// τ from the closed forms of C and C'; the Monte Carlo estimates above are
/// the independent cross-check of those constants.
pub fn dominance_ratio(config: &EnsembleConfig) -> Result<DominanceReport> {
    config.validate()?;
    config.require_regime()?;
    let log_tau = mixed_closed_form().ln()
        - quartic_closed_form().ln()
        - 0.25 * config.mu_delta.ln()
        - config.rho.ln();
    Ok(DominanceReport {
        tau: log_tau.exp(),
        log_tau,
        cells: config.cells,
        log_ratio: config.cells as f64 * log_tau,
        regime_flag: config.regime_flag(),
    })
}

/// Log-partition estimate of a macro-state.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionEstimate {
    pub log_pi: f64,
    pub stderr: f64,
    pub per_cell: f64,
}

/// Macro-state log partition: log Π ≈ −μ ∫R²dV + k·Vol(Ω), both integrals per
/// unit time over the same box. A flat field returns k·Vol exactly.
pub fn log_partition_macro(
    field: &MetricField,
    spec: &QuadratureSpec,
    config: &EnsembleConfig,
) -> Result<PartitionEstimate> {
    let action = quadrature::action_per_unit_time(field, spec, Normalization::FullHandle)?;
    let vol = quadrature::volume(field, spec)?;
    let log_pi = -config.mu_action * action.value + config.k_volume * vol;
    Ok(PartitionEstimate {
        log_pi,
        // deterministic quadrature path: convergence delta stands in for the
        // sampling error of the MC paths sharing this type.
        stderr: config.mu_action.abs() * action.convergence_delta,
        per_cell: log_pi / config.cells as f64,
    })
}
