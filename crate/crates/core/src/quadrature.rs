//! Tensor-product Gauss-Legendre integration of curvature actions
//! I = ∫ R² dV (per unit time) and volumes over coordinate boxes.
//!
//! All integrands here are smooth on closed boxes, so a fixed-order rule with
//! deterministic node sets, reduced in a fixed order with compensated
//! summation, gives reproducible results independent of thread count.

use crate::error::{Error, Result};
use crate::metric::MetricField;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Volume-element choice for action and volume integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeMode {
    /// √|det g| of the integrated field.
    MetricDensity,
    /// Frozen static-handle density ((1+ρ²)/2)² sinθ, used for the rotating
    /// handle so that changing the rotation speed is volume preserving.
    FixedStatic,
}

/// Reporting convention for handle actions: the full handle integrates
/// ρ ∈ [−a, a]; the half-handle convention halves it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    FullHandle,
    HalfHandle,
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Normalization::FullHandle => 1.0,
            Normalization::HalfHandle => 0.5,
        }
    }
}

/// Integration box over the spatial coordinates (r or ρ, θ, φ) with per-axis
/// node counts. Nodes are Gauss-Legendre, hence strictly interior: poles and
/// chart edges are never sampled.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Closed intervals for axes 1..3 (the t axis is dropped; integrals are
    /// per unit time).
    pub box_: [(f64, f64); 3],
    pub nodes: [usize; 3],
    pub volume_mode: VolumeMode,
}

impl QuadratureSpec {
    pub fn new(box_: [(f64, f64); 3], nodes: [usize; 3], volume_mode: VolumeMode) -> Result<Self> {
        for (k, &n) in nodes.iter().enumerate() {
            if n < 2 {
                return Err(Error::InvalidParam(format!(
                    "axis {k} needs at least 2 nodes, got {n}"
                )));
            }
        }
        for (k, &(lo, hi)) in box_.iter().enumerate() {
            let valid = lo.is_finite() && hi.is_finite() && lo < hi;
            if !valid {
                return Err(Error::InvalidParam(format!(
                    "axis {k} box [{lo}, {hi}] must be finite and nonempty"
                )));
            }
        }
        Ok(Self {
            box_,
            nodes,
            volume_mode,
        })
    }

    /// Full-sphere box over a radial interval.
    pub fn over_radial(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(
            [
                (lo, hi),
                (0.0, std::f64::consts::PI),
                (0.0, 2.0 * std::f64::consts::PI),
            ],
            [n, n, n],
            VolumeMode::MetricDensity,
        )
    }

    pub fn with_volume_mode(mut self, mode: VolumeMode) -> Self {
        self.volume_mode = mode;
        self
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes = [n, n, n];
        self
    }

    fn halved(&self) -> Self {
        let mut s = self.clone();
        for n in s.nodes.iter_mut() {
            *n = (*n / 2).max(2);
        }
        s
    }
}

/// Result of a curvature-action integral (per unit time, geometric units).
#[derive(Clone, Debug, Serialize)]
pub struct ActionResult {
    pub value: f64,
    pub normalization: Normalization,
    pub nodes: [usize; 3],
    /// |I(n) − I(n/2)|, a quadrature-convergence indicator.
    pub convergence_delta: f64,
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; nodes are accurate to a few
/// ulps for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P'_n(x) by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Compensated (Kahan) accumulator; keeps the fixed-order reduction at the
/// few-ulp level.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

struct Grid {
    points: [Vec<f64>; 3],
    weights: [Vec<f64>; 3],
}

impl Grid {
    fn build(spec: &QuadratureSpec) -> Self {
        let mut points: [Vec<f64>; 3] = Default::default();
        let mut weights: [Vec<f64>; 3] = Default::default();
        for axis in 0..3 {
            let (lo, hi) = spec.box_[axis];
            let (x, w) = gauss_legendre(spec.nodes[axis]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            points[axis] = x.iter().map(|&t| mid + half * t).collect();
            weights[axis] = w.iter().map(|&t| t * half).collect();
        }
        Self { points, weights }
    }

    fn len(&self) -> usize {
        self.points[0].len() * self.points[1].len() * self.points[2].len()
    }

    fn node(&self, flat: usize) -> ([f64; 4], f64) {
        let n1 = self.points[1].len();
        let n2 = self.points[2].len();
        let i = flat / (n1 * n2);
        let j = (flat / n2) % n1;
        let k = flat % n2;
        let p = [0.0, self.points[0][i], self.points[1][j], self.points[2][k]];
        let w = self.weights[0][i] * self.weights[1][j] * self.weights[2][k];
        (p, w)
    }
}

fn check_box(field: &MetricField, spec: &QuadratureSpec) -> Result<()> {
    for axis in 0..3 {
        let (lo, hi) = spec.box_[axis];
        if !field.chart.axes[axis + 1].admits_box(lo, hi) {
            return Err(Error::DomainError {
                chart: field.chart.name.clone(),
                detail: format!("box [{lo}, {hi}] exits chart on spatial axis {axis}"),
            });
        }
    }
    Ok(())
}

fn density(spec: &QuadratureSpec, p: &[f64; 4], sqrt_abs_det: f64) -> f64 {
    match spec.volume_mode {
        VolumeMode::MetricDensity => sqrt_abs_det,
        VolumeMode::FixedStatic => {
            let f = 0.5 * (1.0 + p[1] * p[1]);
            f * f * p[2].sin()
        }
    }
}

/// Σ w · f(node) over the tensor grid, nodes evaluated in parallel and
/// reduced in flat-index order.
fn integrate_grid(
    spec: &QuadratureSpec,
    f: impl Fn([f64; 4], f64) -> Result<f64> + Sync,
) -> Result<f64> {
    let grid = Grid::build(spec);
    let terms: Result<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let (p, w) = grid.node(flat);
            f(p, w)
        })
        .collect();
    let mut acc = KahanSum::default();
    for t in terms? {
        acc.add(t);
    }
    Ok(acc.value())
}

fn action_raw(field: &MetricField, spec: &QuadratureSpec) -> Result<f64> {
    integrate_grid(spec, |p, w| {
        let bundle = field.curvature_at(p)?;
        Ok(w * bundle.scalar * bundle.scalar * density(spec, &p, bundle.sqrt_abs_det))
    })
}

/// Quadratic curvature action I = ∫ R² dV per unit time over the box.
///
/// Stationary fields only: the time integral is dropped and replaced by a
/// unit-time factor. Reports the change against a half-resolution grid.
pub fn action_per_unit_time(
    field: &MetricField,
    spec: &QuadratureSpec,
    normalization: Normalization,
) -> Result<ActionResult> {
    if !field.stationary {
        return Err(Error::NonStationaryField(field.chart.name.clone()));
    }
    check_box(field, spec)?;
    let full = action_raw(field, spec)?;
    let coarse = action_raw(field, &spec.halved())?;
    let factor = normalization.factor();
    Ok(ActionResult {
        value: full * factor,
        normalization,
        nodes: spec.nodes,
        convergence_delta: (full - coarse).abs() * factor,
    })
}

/// ∫ dV per unit time over the box with the configured density.
pub fn volume(field: &MetricField, spec: &QuadratureSpec) -> Result<f64> {
    if !field.stationary {
        return Err(Error::NonStationaryField(field.chart.name.clone()));
    }
    check_box(field, spec)?;
    integrate_grid(spec, |p, w| {
        let v = field.evaluate(p)?;
        Ok(w * density(spec, &p, v.det.abs().sqrt()))
    })
}

/// Action of the spatially dilated field g_λ for each λ. The dilation acts
/// exactly on metric components (spatial block × λ²), so the returned curve
/// probes the 1/λ scaling of the handle action.
pub fn dilation_curve(
    field: &MetricField,
    spec: &QuadratureSpec,
    normalization: Normalization,
    lambdas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "dilation factor must be > 0, got {lambda}"
            )));
        }
        let dilated = crate::catalog::dilate_spatial(field, lambda)?;
        let result = action_per_unit_time(&dilated, spec, normalization)?;
        out.push((lambda, result.value));
    }
    Ok(out)
}

/// Half-handle static-wormhole action in closed form: the scalar curvature
/// R(ρ) = −16ρ²/(1+ρ²)² of the a = 1 handle integrates to 320π − 96π².
pub fn static_handle_action_closed_form() -> f64 {
    320.0 * std::f64::consts::PI - 96.0 * std::f64::consts::PI * std::f64::consts::PI
}

/// Static-handle volume (metric density) in closed form: a · 56π/15.
pub fn static_handle_volume_closed_form(a: f64) -> f64 {
    a * 56.0 * std::f64::consts::PI / 15.0
}

/// Half-length for which the handle volume matches the displaced flat volume
/// of two unit balls (8π/3), found by bisection on the quadrature volume.
pub fn volume_matched_half_length(nodes: usize) -> Result<f64> {
    let target = 8.0 * std::f64::consts::PI / 3.0;
    let handle_volume = |a: f64| -> Result<f64> {
        let field = crate::catalog::make_wormhole_static(a)?;
        let spec = QuadratureSpec::over_radial(-a, a, nodes)?;
        volume(&field, &spec)
    };
    let (mut lo, mut hi) = (0.3_f64, 1.5_f64);
    let mut f_lo = handle_volume(lo)? - target;
    let f_hi = handle_volume(hi)? - target;
    if f_lo * f_hi > 0.0 {
        return Err(Error::InvalidParam(
            "volume-match bracket does not straddle the target".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = handle_volume(mid)? - target;
        if f_mid == 0.0 || hi - lo < 1e-13 {
            return Ok(mid);
        }
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
