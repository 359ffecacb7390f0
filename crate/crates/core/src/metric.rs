//! Metric fields on a single coordinate chart.
//!
//! A [`MetricField`] bundles a symmetric component function g_ij(t, x¹, x², x³)
//! with its chart domain, signature tag and derivative mode. Components are
//! written generically over [`Scalar`](crate::scalar::Scalar); the analytic
//! derivative path evaluates them on hyper-dual numbers, the finite-difference
//! path uses central stencils on plain values.

use crate::error::{Error, Result};
use crate::linalg::{det_inverse, Sym4, SYM_PAIRS};
use crate::scalar::HyperDual;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Metric signature tag. Geometric units, c = G = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Signature {
    /// (−,+,+,+); det g < 0.
    Lorentzian,
    /// (+,+,+,+); det g > 0.
    Euclidean,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DerivativeMode {
    /// Exact component derivatives via forward automatic differentiation.
    Analytic,
    /// Central second-order stencils with the given step.
    FiniteDifference { h: f64 },
}

/// One chart axis; `lo`/`hi` may be infinite, closedness is per endpoint.
#[derive(Clone, Copy, Debug)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl AxisRange {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn all() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo_ok = if self.lo_closed {
            x >= self.lo
        } else {
            x > self.lo
        };
        let hi_ok = if self.hi_closed {
            x <= self.hi
        } else {
            x < self.hi
        };
        lo_ok && hi_ok
    }

    /// A closed interval is admissible as an integration box when it does not
    /// exceed the chart closure; quadrature nodes are strictly interior, so
    /// touching an open endpoint is fine.
    pub fn admits_box(&self, lo: f64, hi: f64) -> bool {
        lo <= hi && lo >= self.lo && hi <= self.hi
    }
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    pub axes: [AxisRange; 4],
}

impl Chart {
    pub fn contains(&self, p: &[f64; 4]) -> bool {
        self.axes.iter().zip(p.iter()).all(|(a, &x)| a.contains(x))
    }
}

/// Symmetric metric components, evaluated on plain values or on jets.
///
/// Implementors write one generic `fn components<S: Scalar>` and delegate
/// both methods to it (see [`impl_metric_components!`](crate::impl_metric_components)).
pub trait MetricComponents: Send + Sync {
    fn value(&self, x: [f64; 4]) -> Sym4<f64>;
    fn jet(&self, x: [HyperDual; 4]) -> Sym4<HyperDual>;
}

/// Delegates the two [`MetricComponents`] entry points to an inherent
/// generic method `fn components<S: Scalar>(&self, x: [S; 4]) -> Sym4<S>`.
#[macro_export]
macro_rules! impl_metric_components {
    ($ty:ty) => {
        impl $crate::metric::MetricComponents for $ty {
            fn value(&self, x: [f64; 4]) -> $crate::linalg::Sym4<f64> {
                self.components(x)
            }
            fn jet(
                &self,
                x: [$crate::scalar::HyperDual; 4],
            ) -> $crate::linalg::Sym4<$crate::scalar::HyperDual> {
                self.components(x)
            }
        }
    };
}

/// Metric evaluation result: components, inverse and determinant.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MetricValue {
    pub metric: Sym4<f64>,
    pub inverse: Sym4<f64>,
    pub det: f64,
}

/// Value, first and second coordinate derivatives of the components at a point.
#[derive(Clone, Copy, Debug)]
pub struct MetricJets {
    pub g: Sym4<f64>,
    /// d1[m] = ∂_m g
    pub d1: [Sym4<f64>; 4],
    /// d2[m][n] = ∂_m ∂_n g (symmetric in m, n)
    pub d2: [[Sym4<f64>; 4]; 4],
}

/// A smooth map from chart coordinates to a symmetric 4×4 tensor, plus the
/// metadata needed to differentiate and integrate it safely.
#[derive(Clone)]
pub struct MetricField {
    components: Arc<dyn MetricComponents>,
    pub chart: Chart,
    pub signature: Signature,
    pub mode: DerivativeMode,
    /// False for metrics with explicit time dependence.
    pub stationary: bool,
    /// Axes the components actually depend on; derivatives along the others
    /// are identically zero and their jet evaluations are skipped. Catalog
    /// entries declare this; custom fields default to all four.
    pub dependent_axes: [bool; 4],
    pub det_floor: f64,
}

impl MetricField {
    pub fn new(components: Arc<dyn MetricComponents>, chart: Chart, signature: Signature) -> Self {
        Self {
            components,
            chart,
            signature,
            mode: DerivativeMode::Analytic,
            stationary: true,
            dependent_axes: [true; 4],
            det_floor: 1e-12,
        }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_det_floor(mut self, floor: f64) -> Self {
        self.det_floor = floor;
        self
    }

    pub fn with_stationary(mut self, stationary: bool) -> Self {
        self.stationary = stationary;
        self
    }

    pub fn with_dependent_axes(mut self, axes: [bool; 4]) -> Self {
        self.dependent_axes = axes;
        self
    }

    pub fn components(&self) -> &Arc<dyn MetricComponents> {
        &self.components
    }

    pub fn chart_name(&self) -> &str {
        &self.chart.name
    }

    fn require_inside(&self, p: &[f64; 4]) -> Result<()> {
        if self.chart.contains(p) {
            Ok(())
        } else {
            Err(Error::DomainError {
                chart: self.chart.name.clone(),
                detail: format!("point {p:?} outside chart"),
            })
        }
    }

    /// Evaluate g_ij and g^ij; `SingularMetric` when |det g| is below the floor.
    pub fn evaluate(&self, p: [f64; 4]) -> Result<MetricValue> {
        self.require_inside(&p)?;
        let g = self.components.value(p);
        let (det, inv) = det_inverse(&g.to_matrix());
        if !det.is_finite() || det.abs() < self.det_floor {
            return Err(Error::SingularMetric {
                point: p,
                det,
                floor: self.det_floor,
            });
        }
        let inv = inv.ok_or(Error::SingularMetric {
            point: p,
            det,
            floor: self.det_floor,
        })?;
        Ok(MetricValue {
            metric: g,
            inverse: Sym4::from_matrix(&inv),
            det,
        })
    }

    /// Components plus exact (analytic mode) or stencil (FD mode) derivatives.
    pub fn jets(&self, p: [f64; 4]) -> Result<MetricJets> {
        self.require_inside(&p)?;
        match self.mode {
            DerivativeMode::Analytic => Ok(self.analytic_jets(p)),
            DerivativeMode::FiniteDifference { h } => self.fd_jets(p, h),
        }
    }

    fn analytic_jets(&self, p: [f64; 4]) -> MetricJets {
        let g = self.components.value(p);
        let mut d1 = [Sym4::zero(); 4];
        let mut d2 = [[Sym4::zero(); 4]; 4];
        for &(m, n) in SYM_PAIRS.iter() {
            if !(self.dependent_axes[m] && self.dependent_axes[n]) {
                continue;
            }
            // Seed tag 1 on axis m and tag 2 on axis n; one evaluation gives
            // ∂_m g, ∂_n g and ∂_m∂_n g for all components.
            let mut x = [HyperDual::constant(0.0); 4];
            for (k, xk) in x.iter_mut().enumerate() {
                let e1 = if k == m { 1.0 } else { 0.0 };
                let e2 = if k == n { 1.0 } else { 0.0 };
                *xk = HyperDual::seeded(p[k], e1, e2);
            }
            let jet = self.components.jet(x);
            d1[m] = jet.map(|v| v.e1);
            if m != n {
                d1[n] = jet.map(|v| v.e2);
            }
            let mixed = jet.map(|v| v.e12);
            d2[m][n] = mixed;
            d2[n][m] = mixed;
        }
        MetricJets { g, d1, d2 }
    }

    fn fd_jets(&self, p: [f64; 4], h: f64) -> Result<MetricJets> {
        let eval = |q: [f64; 4]| -> Result<Sym4<f64>> {
            if !self.chart.contains(&q) {
                return Err(Error::DerivativeOverflow {
                    chart: self.chart.name.clone(),
                    point: p,
                    h,
                });
            }
            Ok(self.components.value(q))
        };

        let shift = |mut q: [f64; 4], axis: usize, step: f64| {
            q[axis] += step;
            q
        };

        let g0 = eval(p)?;
        let mut plus = [Sym4::zero(); 4];
        let mut minus = [Sym4::zero(); 4];
        for m in 0..4 {
            if self.dependent_axes[m] {
                plus[m] = eval(shift(p, m, h))?;
                minus[m] = eval(shift(p, m, -h))?;
            }
        }

        let mut d1 = [Sym4::zero(); 4];
        let mut d2 = [[Sym4::zero(); 4]; 4];
        for m in 0..4 {
            if !self.dependent_axes[m] {
                continue;
            }
            d1[m] = Sym4::from_fn(|i, j| (plus[m].get(i, j) - minus[m].get(i, j)) / (2.0 * h));
            d2[m][m] = Sym4::from_fn(|i, j| {
                (plus[m].get(i, j) - 2.0 * g0.get(i, j) + minus[m].get(i, j)) / (h * h)
            });
        }
        for m in 0..4 {
            for n in m + 1..4 {
                if !(self.dependent_axes[m] && self.dependent_axes[n]) {
                    continue;
                }
                let pp = eval(shift(shift(p, m, h), n, h))?;
                let pm = eval(shift(shift(p, m, h), n, -h))?;
                let mp = eval(shift(shift(p, m, -h), n, h))?;
                let mm = eval(shift(shift(p, m, -h), n, -h))?;
                let mixed = Sym4::from_fn(|i, j| {
                    (pp.get(i, j) - pm.get(i, j) - mp.get(i, j) + mm.get(i, j)) / (4.0 * h * h)
                });
                d2[m][n] = mixed;
                d2[n][m] = mixed;
            }
        }
        Ok(MetricJets { g: g0, d1, d2 })
    }
}
