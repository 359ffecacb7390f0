//! Curvature kernel: Christoffel symbols, Ricci tensor, scalar curvature,
//! volume density and the first variation of cell-averaged curvature.
//!
//! Conventions: Γ^k_ij = ½ g^kl (∂_i g_lj + ∂_j g_li − ∂_l g_ij),
//! R_ij = ∂_k Γ^k_ij − ∂_j Γ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik,
//! R = g^ij R_ij. With these signs the unit 3-sphere slice has R = +6 and
//! vacuum exteriors are Ricci-flat.

use crate::error::{Error, Result};
use crate::linalg::Sym4;
use crate::metric::{MetricField, MetricJets};
use serde::Serialize;

/// Per-point curvature data of a metric field.
///
/// Christoffel symbols carry dimension 1/length, the Ricci tensor and scalar
/// 1/length²; `sqrt_abs_det` is the volume-element density.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureBundle {
    pub point: [f64; 4],
    pub metric: Sym4<f64>,
    pub inverse: Sym4<f64>,
    /// christoffel[k] is Γ^k_ij, exactly symmetric in (i, j) by storage.
    pub christoffel: [Sym4<f64>; 4],
    pub ricci: Sym4<f64>,
    pub scalar: f64,
    pub sqrt_abs_det: f64,
}

impl CurvatureBundle {
    /// ‖R‖ = (R_ij R^ij)^{1/2} with indices raised by g^ij.
    ///
    /// For the catalog geometries the contraction is non-negative; tiny
    /// negative round-off (and the indefinite-signature corner cases) clamp
    /// to zero.
    pub fn ricci_norm(&self) -> f64 {
        let raised = self.ricci_raised();
        let q = self.ricci.dot(&raised);
        q.max(0.0).sqrt()
    }

    /// R^ij = g^ik g^jl R_kl.
    pub fn ricci_raised(&self) -> Sym4<f64> {
        Sym4::from_fn(|i, j| {
            let mut s = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    s += self.inverse.get(i, k) * self.inverse.get(j, l) * self.ricci.get(k, l);
                }
            }
            s
        })
    }

    pub fn max_abs_ricci(&self) -> f64 {
        self.ricci.max_abs()
    }
}

/// Cell D_α: a microscopic region identified by its center, carrying its
/// 4-volume Δ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cell {
    pub center: [f64; 4],
    pub volume: f64,
}

/// Constant upper-index perturbation δg^ij supported in a single cell.
#[derive(Clone, Debug, Serialize)]
pub struct Perturbation {
    /// δg^ij, 10 independent entries.
    pub delta: Sym4<f64>,
    pub cell: Cell,
}

impl Perturbation {
    /// ‖δg‖ = (δg^ij δg_ij)^{1/2}, lowering with the background metric at
    /// the cell center. Clamped at zero: mixed time-space entries can drive
    /// the Lorentzian contraction negative.
    pub fn norm(&self, field: &MetricField) -> Result<f64> {
        let value = field.evaluate(self.cell.center)?;
        let lowered = Sym4::from_fn(|i, j| {
            let mut s = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    s += value.metric.get(i, k) * value.metric.get(j, l) * self.delta.get(k, l);
                }
            }
            s
        });
        Ok(self.delta.dot(&lowered).max(0.0).sqrt())
    }
}

pub(crate) fn curvature_from_jets(
    field: &MetricField,
    point: [f64; 4],
    jets: &MetricJets,
) -> Result<CurvatureBundle> {
    let (det, inv) = crate::linalg::det_inverse(&jets.g.to_matrix());
    if !det.is_finite() || det.abs() < field.det_floor {
        return Err(Error::SingularMetric {
            point,
            det,
            floor: field.det_floor,
        });
    }
    let inv = inv.ok_or(Error::SingularMetric {
        point,
        det,
        floor: field.det_floor,
    })?;
    let ginv = Sym4::from_matrix(&inv);

    // bracket[l] holds ∂_i g_lj + ∂_j g_li − ∂_l g_ij, symmetric in (i, j)
    let bracket: [Sym4<f64>; 4] = std::array::from_fn(|l| {
        Sym4::from_fn(|i, j| jets.d1[i].get(l, j) + jets.d1[j].get(l, i) - jets.d1[l].get(i, j))
    });

    // Γ^k_ij = ½ g^kl bracket[l]
    let mut gamma = [Sym4::zero(); 4];
    for (k, slot) in gamma.iter_mut().enumerate() {
        *slot = Sym4::from_fn(|i, j| {
            let mut s = 0.0;
            for l in 0..4 {
                s += ginv.get(k, l) * bracket[l].get(i, j);
            }
            0.5 * s
        });
    }

    // ∂_m g^kl = -g^ka (∂_m g_ab) g^bl via two matrix products; axes without
    // metric dependence have vanishing derivatives and are skipped.
    let active = field.dependent_axes;
    let gmat = ginv.to_matrix();
    let mut dinv = [Sym4::zero(); 4];
    for (m, slot) in dinv.iter_mut().enumerate() {
        if !active[m] {
            continue;
        }
        let mut half = [[0.0_f64; 4]; 4];
        for (k, row) in half.iter_mut().enumerate() {
            for (b, out) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for a in 0..4 {
                    s += gmat[k][a] * jets.d1[m].get(a, b);
                }
                *out = s;
            }
        }
        *slot = Sym4::from_fn(|k, l| {
            let mut s = 0.0;
            for b in 0..4 {
                s += half[k][b] * gmat[b][l];
            }
            -s
        });
    }

    // ∂_m Γ^k_ij
    let mut dgamma = [[Sym4::zero(); 4]; 4];
    for m in 0..4 {
        if !active[m] {
            continue;
        }
        let dbracket: [Sym4<f64>; 4] = std::array::from_fn(|l| {
            Sym4::from_fn(|i, j| {
                jets.d2[m][i].get(l, j) + jets.d2[m][j].get(l, i) - jets.d2[m][l].get(i, j)
            })
        });
        for k in 0..4 {
            dgamma[m][k] = Sym4::from_fn(|i, j| {
                let mut s = 0.0;
                for l in 0..4 {
                    s += dinv[m].get(k, l) * bracket[l].get(i, j)
                        + ginv.get(k, l) * dbracket[l].get(i, j);
                }
                0.5 * s
            });
        }
    }

    // Contracted symbol Γ^k_kl
    let mut gamma_trace = [0.0_f64; 4];
    for (l, slot) in gamma_trace.iter_mut().enumerate() {
        *slot = (0..4).map(|k| gamma[k].get(k, l)).sum();
    }

    // Ricci, built on i <= j so symmetry is exact.
    let ricci = Sym4::from_fn(|i, j| {
        let mut s = 0.0;
        for k in 0..4 {
            s += dgamma[k][k].get(i, j) - dgamma[j][k].get(i, k);
        }
        for l in 0..4 {
            s += gamma_trace[l] * gamma[l].get(i, j);
            for k in 0..4 {
                s -= gamma[k].get(j, l) * gamma[l].get(i, k);
            }
        }
        s
    });

    let scalar = ginv.dot(&ricci);

    Ok(CurvatureBundle {
        point,
        metric: jets.g,
        inverse: ginv,
        christoffel: gamma,
        ricci,
        scalar,
        sqrt_abs_det: det.abs().sqrt(),
    })
}

impl MetricField {
    /// Full curvature data at a point.
    pub fn curvature_at(&self, point: [f64; 4]) -> Result<CurvatureBundle> {
        let jets = self.jets(point)?;
        curvature_from_jets(self, point, &jets)
    }

    /// First variation of the cell-averaged scalar curvature:
    /// (1/Δ) ∫_D R_ij δg^ij dV, evaluated in the constant-in-cell
    /// approximation as R_ij(center) δg^ij.
    pub fn first_variation(&self, pert: &Perturbation) -> Result<f64> {
        if !self.chart.contains(&pert.cell.center) {
            return Err(Error::UnsupportedPerturbation {
                chart: self.chart.name.clone(),
                point: pert.cell.center,
            });
        }
        let bundle = self.curvature_at(pert.cell.center)?;
        Ok(bundle.ricci.dot(&pert.delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Sym4;
    use crate::metric::{AxisRange, Chart, DerivativeMode, Signature};
    use crate::scalar::Scalar;
    use std::sync::Arc;

    struct Minkowski;
    impl Minkowski {
        fn components<S: Scalar>(&self, _x: [S; 4]) -> Sym4<S> {
            Sym4::from_fn(|i, j| match (i, j) {
                (0, 0) => S::from_f64(-1.0),
                (1, 1) | (2, 2) | (3, 3) => S::from_f64(1.0),
                _ => S::from_f64(0.0),
            })
        }
    }
    crate::impl_metric_components!(Minkowski);

    /// Unit 3-sphere slice extended flatly in time:
    /// ds² = −dt² + dχ² + sin²χ (dθ² + sin²θ dφ²).
    struct SphereSlice;
    impl SphereSlice {
        fn components<S: Scalar>(&self, x: [S; 4]) -> Sym4<S> {
            let chi = x[1];
            let theta = x[2];
            let s = chi.sin();
            let st = theta.sin();
            Sym4::from_fn(|i, j| match (i, j) {
                (0, 0) => S::from_f64(-1.0),
                (1, 1) => S::from_f64(1.0),
                (2, 2) => s * s,
                (3, 3) => s * s * st * st,
                _ => S::from_f64(0.0),
            })
        }
    }
    crate::impl_metric_components!(SphereSlice);

    fn minkowski_field() -> MetricField {
        MetricField::new(
            Arc::new(Minkowski),
            Chart {
                name: "cartesian".into(),
                axes: [AxisRange::all(); 4],
            },
            Signature::Lorentzian,
        )
    }

    fn sphere_field() -> MetricField {
        MetricField::new(
            Arc::new(SphereSlice),
            Chart {
                name: "sphere-slice".into(),
                axes: [
                    AxisRange::all(),
                    AxisRange::open(0.0, std::f64::consts::PI),
                    AxisRange::open(0.0, std::f64::consts::PI),
                    AxisRange::all(),
                ],
            },
            Signature::Lorentzian,
        )
    }

    #[test]
    fn flat_space_has_zero_curvature() {
        let b = minkowski_field()
            .curvature_at([0.0, 1.0, 1.0, 1.0])
            .unwrap();
        for k in 0..4 {
            assert_eq!(b.christoffel[k].max_abs(), 0.0);
        }
        assert_eq!(b.max_abs_ricci(), 0.0);
        assert_eq!(b.scalar, 0.0);
        assert_eq!(b.sqrt_abs_det, 1.0);
        assert_eq!(b.ricci_norm(), 0.0);
    }

    #[test]
    fn unit_three_sphere_scalar_is_six() {
        // Pins the sign convention.
        let b = sphere_field().curvature_at([0.0, 1.1, 0.9, 0.3]).unwrap();
        assert!(
            (b.scalar - 6.0).abs() < 1e-10,
            "sphere slice scalar {}",
            b.scalar
        );
    }

    #[test]
    fn fd_mode_matches_analytic_on_sphere() {
        let p = [0.0, 1.2, 1.0, 0.5];
        let a = sphere_field().curvature_at(p).unwrap();
        let f = sphere_field()
            .with_mode(DerivativeMode::FiniteDifference { h: 1e-3 })
            .curvature_at(p)
            .unwrap();
        assert!((a.scalar - f.scalar).abs() < 1e-5);
        for k in 0..10 {
            assert!((a.ricci.data[k] - f.ricci.data[k]).abs() < 1e-5);
        }
    }

    #[test]
    fn ricci_flat_annihilates_first_variation() {
        let field = minkowski_field();
        let pert = Perturbation {
            delta: Sym4::from_fn(|i, j| (i + 2 * j) as f64 / 10.0),
            cell: Cell {
                center: [0.0, 0.5, 0.5, 0.5],
                volume: 1.0,
            },
        };
        assert_eq!(field.first_variation(&pert).unwrap(), 0.0);
    }

    #[test]
    fn zero_perturbation_has_zero_variation_and_norm() {
        let field = sphere_field();
        let pert = Perturbation {
            delta: Sym4::zero(),
            cell: Cell {
                center: [0.0, 1.0, 1.0, 0.0],
                volume: 1.0,
            },
        };
        assert_eq!(field.first_variation(&pert).unwrap(), 0.0);
        assert_eq!(pert.norm(&field).unwrap(), 0.0);
    }

    #[test]
    fn perturbation_outside_chart_is_unsupported() {
        let field = sphere_field();
        let pert = Perturbation {
            delta: Sym4::zero(),
            cell: Cell {
                center: [0.0, 4.0, 1.0, 0.0],
                volume: 1.0,
            },
        };
        assert!(matches!(
            field.first_variation(&pert),
            Err(Error::UnsupportedPerturbation { .. })
        ));
    }
}
