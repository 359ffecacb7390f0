//! Cross-cutting invariants: exact tensor symmetries at random points,
//! finite-difference convergence order, contraction identities, coordinate
//! reparameterization invariance, and the first-variation oracle built from
//! a smooth compactly supported bump.

use curvens_core::catalog::{
    dilate_spatial, make_schwarzschild, make_spherical_ansatz, make_wormhole_rotating,
    make_wormhole_static, wormhole_scalar_curvature,
};
use curvens_core::curvature::{Cell, Perturbation};
use curvens_core::linalg::{det_inverse, Sym4};
use curvens_core::metric::{
    AxisRange, Chart, DerivativeMode, MetricComponents, MetricField, Signature,
};
use curvens_core::quadrature::{
    action_per_unit_time, gauss_legendre, Normalization, QuadratureSpec,
};
use curvens_core::scalar::{HyperDual, Scalar};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

fn catalog_fields() -> Vec<(MetricField, [(f64, f64); 3])> {
    vec![
        (
            make_schwarzschild(1.0).unwrap(),
            [(2.6, 40.0), (0.3, PI - 0.3), (0.0, 2.0 * PI)],
        ),
        (
            make_wormhole_static(1.0).unwrap(),
            [(-0.95, 0.95), (0.3, PI - 0.3), (0.0, 2.0 * PI)],
        ),
        (
            make_wormhole_rotating(0.2, false).unwrap(),
            [(-0.95, 0.95), (0.3, PI - 0.3), (0.0, 2.0 * PI)],
        ),
        (
            make_wormhole_rotating(0.2, true).unwrap(),
            [(-0.95, 0.95), (0.3, PI - 0.3), (0.0, 2.0 * PI)],
        ),
        (
            make_spherical_ansatz(0.2, -0.1),
            [(1.0, 50.0), (0.3, PI - 0.3), (0.0, 2.0 * PI)],
        ),
    ]
}

#[test]
fn tensor_symmetries_at_random_interior_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (field, box_) in catalog_fields() {
        for _ in 0..1000 {
            let p = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(box_[0].0..box_[0].1),
                rng.gen_range(box_[1].0..box_[1].1),
                rng.gen_range(box_[2].0..box_[2].1),
            ];
            let b = field.curvature_at(p).unwrap();
            // Packed symmetric storage: reading (i, j) and (j, i) must hit
            // the same slot bit-for-bit.
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        assert_eq!(
                            b.christoffel[k].get(i, j).to_bits(),
                            b.christoffel[k].get(j, i).to_bits()
                        );
                    }
                    assert_eq!(b.ricci.get(i, j).to_bits(), b.ricci.get(j, i).to_bits());
                    assert_eq!(b.metric.get(i, j).to_bits(), b.metric.get(j, i).to_bits());
                }
            }
            // determinant sign matches the signature tag
            let (det, _) = det_inverse(&b.metric.to_matrix());
            match field.signature {
                Signature::Lorentzian => assert!(det < 0.0),
                Signature::Euclidean => assert!(det > 0.0),
            }
        }
    }
}

#[test]
fn declared_independent_axes_really_have_zero_derivatives() {
    // Re-enable all axes and compare: the full jet set must agree with the
    // declared-sparse one bit for bit wherever the sparse one is nonzero,
    // and be zero elsewhere.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (field, box_) in catalog_fields() {
        let full = field.clone().with_dependent_axes([true; 4]);
        for _ in 0..25 {
            let p = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(box_[0].0..box_[0].1),
                rng.gen_range(box_[1].0..box_[1].1),
                rng.gen_range(box_[2].0..box_[2].1),
            ];
            let sparse = field.jets(p).unwrap();
            let dense = full.jets(p).unwrap();
            for m in 0..4 {
                for k in 0..10 {
                    assert_eq!(
                        sparse.d1[m].data[k], dense.d1[m].data[k],
                        "d1 axis {m} at {p:?}"
                    );
                }
                for n in 0..4 {
                    for k in 0..10 {
                        assert_eq!(
                            sparse.d2[m][n].data[k], dense.d2[m][n].data[k],
                            "d2 ({m},{n}) at {p:?}"
                        );
                    }
                }
            }
            let a = field.curvature_at(p).unwrap();
            let b = full.curvature_at(p).unwrap();
            assert_eq!(a.scalar.to_bits(), b.scalar.to_bits());
        }
    }
}

#[test]
fn contraction_identity_analytic_and_fd() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (field, box_) in catalog_fields() {
        for _ in 0..40 {
            let p = [
                0.0,
                rng.gen_range(box_[0].0..box_[0].1),
                rng.gen_range(box_[1].0..box_[1].1),
                rng.gen_range(box_[2].0..box_[2].1),
            ];
            let b = field.curvature_at(p).unwrap();
            // recompute the trace with an independent summation order
            let mut trace = 0.0;
            for i in (0..4).rev() {
                for j in (0..4).rev() {
                    trace += b.inverse.get(i, j) * b.ricci.get(i, j);
                }
            }
            let scale = b.scalar.abs().max(1.0);
            assert!(
                (b.scalar - trace).abs() <= 1e-10 * scale,
                "analytic contraction at {p:?}"
            );

            let fd = field
                .clone()
                .with_mode(DerivativeMode::FiniteDifference { h: 1e-3 })
                .curvature_at(p);
            if let Ok(fdb) = fd {
                let mut trace = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        trace += fdb.inverse.get(i, j) * fdb.ricci.get(i, j);
                    }
                }
                assert!(
                    (fdb.scalar - trace).abs() <= 1e-6 * fdb.scalar.abs().max(1.0),
                    "fd contraction at {p:?}"
                );
                // FD curvature should sit near the analytic one
                assert!((fdb.scalar - b.scalar).abs() <= 1e-4 * scale);
            }
        }
    }
}

#[test]
fn fd_error_is_second_order_in_step() {
    // Schwarzschild is Ricci-flat, so max|R_ij| in FD mode IS the error.
    let p = [0.0, 3.0, 1.2, 0.4];
    let field = make_schwarzschild(1.0).unwrap();
    let err = |h: f64| {
        field
            .clone()
            .with_mode(DerivativeMode::FiniteDifference { h })
            .curvature_at(p)
            .unwrap()
            .max_abs_ricci()
    };
    let e1 = err(2e-2);
    let e2 = err(1e-2);
    assert!(
        e2 <= 0.3 * e1,
        "fd error not second order: err(h) = {e1:.3e}, err(h/2) = {e2:.3e}"
    );
}

/// Pullback of the static handle under ρ' = 2ρ.
struct RescaledHandle {
    inner: Arc<dyn MetricComponents>,
}

impl MetricComponents for RescaledHandle {
    fn value(&self, x: [f64; 4]) -> Sym4<f64> {
        let mapped = [x[0], x[1] / 2.0, x[2], x[3]];
        let g = self.inner.value(mapped);
        let mut out = g;
        // dρ/dρ' = 1/2 on the radial slot only (no cross terms here)
        out.set(1, 1, g.get(1, 1) * 0.25);
        out
    }
    fn jet(&self, x: [HyperDual; 4]) -> Sym4<HyperDual> {
        let mapped = [x[0], x[1].scale(0.5), x[2], x[3]];
        let g = self.inner.jet(mapped);
        let mut out = g;
        out.set(1, 1, g.get(1, 1).scale(0.25));
        out
    }
}

#[test]
fn scalar_invariant_under_radial_reparameterization() {
    let base = make_wormhole_static(1.0).unwrap();
    let rescaled = MetricField::new(
        Arc::new(RescaledHandle {
            inner: base.components().clone(),
        }),
        Chart {
            name: "handle-rescaled".into(),
            axes: [
                AxisRange::all(),
                AxisRange::closed(-2.0, 2.0),
                AxisRange::open(0.0, PI),
                AxisRange::all(),
            ],
        },
        Signature::Lorentzian,
    );
    for rho in [-0.8, -0.25, 0.0, 0.4, 0.9] {
        let direct = base.curvature_at([0.0, rho, 1.1, 0.2]).unwrap().scalar;
        let mapped = rescaled
            .curvature_at([0.0, 2.0 * rho, 1.1, 0.2])
            .unwrap()
            .scalar;
        assert!(
            (direct - mapped).abs() <= 1e-8 * direct.abs().max(1.0),
            "rho = {rho}: {direct} vs {mapped}"
        );
        assert!((direct - wormhole_scalar_curvature(1.0, rho)).abs() < 1e-10);
    }
}

#[test]
fn aligned_perturbation_pairs_to_squared_ricci_norm() {
    let field = make_wormhole_static(1.0).unwrap();
    let center = [0.0, 1.0, 1.3, 0.7];
    let bundle = field.curvature_at(center).unwrap();
    let pert = Perturbation {
        delta: bundle.ricci_raised(),
        cell: Cell {
            center,
            volume: 1e-3,
        },
    };
    let fv = field.first_variation(&pert).unwrap();
    let norm = bundle.ricci_norm();
    assert!(norm > 0.0);
    assert!(
        (fv - norm * norm).abs() <= 1e-12 * norm * norm,
        "{fv} vs {}",
        norm * norm
    );
    // brute-force cross-check of the contraction from the FD-mode Ricci at
    // an interior point (the stencil cannot straddle the chart edge)
    let inner_center = [0.0, 0.9, 1.3, 0.7];
    let inner_bundle = field.curvature_at(inner_center).unwrap();
    let inner_pert = Perturbation {
        delta: inner_bundle.ricci_raised(),
        cell: Cell {
            center: inner_center,
            volume: 1e-3,
        },
    };
    let inner_fv = field.first_variation(&inner_pert).unwrap();
    let fd_bundle = field
        .clone()
        .with_mode(DerivativeMode::FiniteDifference { h: 1e-4 })
        .curvature_at(inner_center)
        .unwrap();
    let mut brute = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            brute += fd_bundle.ricci.get(i, j) * inner_pert.delta.get(i, j);
        }
    }
    assert!((brute - inner_fv).abs() <= 1e-5 * inner_fv.abs());
}

/// Background metric with a constant upper-index perturbation applied under
/// a smooth bump: g_ε = (g⁻¹ + ε χ(x) δĝ)⁻¹.
struct BumpPerturbed {
    inner: Arc<dyn MetricComponents>,
    delta: Sym4<f64>,
    center: [f64; 3],
    width: f64,
    eps: f64,
}

impl BumpPerturbed {
    fn perturbed<S: Scalar>(&self, x: [S; 4], g: Sym4<S>) -> Sym4<S> {
        // χ = Π (1 − s²)⁴ over the three spatial axes
        let mut chi = S::from_f64(1.0);
        for a in 0..3 {
            let s = (x[a + 1] - S::from_f64(self.center[a])).scale(1.0 / self.width);
            if s.re().abs() >= 1.0 {
                return g;
            }
            let one_minus = S::from_f64(1.0) - s * s;
            let sq = one_minus * one_minus;
            chi = chi * sq * sq;
        }
        let (_, inv) = det_inverse(&g.to_matrix());
        let ginv = inv.expect("background must be invertible");
        let mut upper = [[S::from_f64(0.0); 4]; 4];
        for (i, row) in upper.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = ginv[i][j] + (chi * S::from_f64(self.delta.get(i, j))).scale(self.eps);
            }
        }
        let (_, back) = det_inverse(&upper);
        let back = back.expect("perturbed inverse must exist");
        Sym4::from_fn(|i, j| back[i][j])
    }
}

impl MetricComponents for BumpPerturbed {
    fn value(&self, x: [f64; 4]) -> Sym4<f64> {
        let g = self.inner.value(x);
        self.perturbed(x, g)
    }
    fn jet(&self, x: [HyperDual; 4]) -> Sym4<HyperDual> {
        let g = self.inner.jet(x);
        self.perturbed(x, g)
    }
}

#[test]
fn first_variation_matches_bump_difference_quotient() {
    let base = make_wormhole_static(1.0).unwrap();
    let center3 = [0.0, 1.4, 3.0];
    let center4 = [0.0, center3[0], center3[1], center3[2]];
    let width = 0.008;
    let delta = Sym4::from_fn(|i, j| match (i, j) {
        (1, 1) => 0.7,
        (2, 2) => -0.3,
        (1, 2) => 0.2,
        (3, 3) => 0.1,
        _ => 0.0,
    });

    // cell volume Δ and bump normalization η = (1/Δ)∫χ dV, both over the
    // fixed background measure
    let chi = |p: [f64; 4]| -> f64 {
        let mut c = 1.0;
        for a in 0..3 {
            let s = (p[a + 1] - center3[a]) / width;
            c *= (1.0 - s * s).powi(4);
        }
        c
    };
    let grid_integral = |f: &dyn Fn([f64; 4]) -> f64| -> f64 {
        let (nodes, weights) = gauss_legendre(8);
        let mut acc = 0.0;
        for (i, &xi) in nodes.iter().enumerate() {
            for (j, &xj) in nodes.iter().enumerate() {
                for (k, &xk) in nodes.iter().enumerate() {
                    let p = [
                        0.0,
                        center3[0] + width * xi,
                        center3[1] + width * xj,
                        center3[2] + width * xk,
                    ];
                    let w = weights[i] * weights[j] * weights[k] * width.powi(3);
                    acc += w * f(p);
                }
            }
        }
        acc
    };
    let density = |p: [f64; 4]| base.evaluate(p).unwrap().det.abs().sqrt();
    let cell_volume = grid_integral(&|p| density(p));
    let eta = grid_integral(&|p| chi(p) * density(p)) / cell_volume;

    // R_Δ(ε) with the cell measure held fixed (the variation formula's
    // constant-Δ convention)
    let r_cell = |eps: f64| -> f64 {
        let field = MetricField::new(
            Arc::new(BumpPerturbed {
                inner: base.components().clone(),
                delta,
                center: center3,
                width,
                eps,
            }),
            base.chart.clone(),
            Signature::Lorentzian,
        );
        grid_integral(&|p| field.curvature_at(p).unwrap().scalar * density(p)) / cell_volume
    };

    let eps = 1e-5;
    let quotient = (r_cell(eps) - r_cell(-eps)) / (2.0 * eps);

    let pert = Perturbation {
        delta,
        cell: Cell {
            center: center4,
            volume: cell_volume,
        },
    };
    let fv = base.first_variation(&pert).unwrap() * eta;
    assert!(
        ((quotient - fv) / fv).abs() <= 1e-4,
        "difference quotient {quotient} vs first variation {fv} (rel {:.2e})",
        ((quotient - fv) / fv).abs()
    );
}

#[test]
fn results_are_bit_identical_across_thread_counts() {
    let run_with = |threads: usize| -> (f64, f64) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let field = make_wormhole_static(1.0).unwrap();
            let spec = QuadratureSpec::over_radial(-1.0, 1.0, 16).unwrap();
            let action = action_per_unit_time(&field, &spec, Normalization::HalfHandle)
                .unwrap()
                .value;
            let mc = curvens_core::ensemble::quartic_integral_c(60_000, 9).value;
            (action, mc)
        })
    };
    let single = run_with(1);
    for threads in [2, 4, 8] {
        let multi = run_with(threads);
        assert_eq!(single.0.to_bits(), multi.0.to_bits(), "{threads} threads");
        assert_eq!(single.1.to_bits(), multi.1.to_bits(), "{threads} threads");
    }
}

#[test]
fn fixed_static_volume_matches_quartic_antiderivative() {
    // 4π ∫ f² dρ over the handle, f = (1+ρ²)/2: 2π(1 + 2/3 + 1/5) = 56π/15.
    // The frozen density and the metric density coincide on the static
    // handle.
    let field = make_wormhole_static(1.0).unwrap();
    let spec = QuadratureSpec::over_radial(-1.0, 1.0, 24)
        .unwrap()
        .with_volume_mode(curvens_core::quadrature::VolumeMode::FixedStatic);
    let fixed = curvens_core::quadrature::volume(&field, &spec).unwrap();
    let exact = 56.0 * PI / 15.0;
    assert!(
        ((fixed - exact) / exact).abs() < 1e-12,
        "{fixed} vs {exact}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spherical_ansatz_is_scalar_flat(
        c1 in -0.3_f64..0.3,
        c2 in -0.3_f64..0.3,
        r in 1.0_f64..100.0,
        theta in 0.3_f64..2.8,
    ) {
        let field = make_spherical_ansatz(c1, c2);
        let b = field.curvature_at([0.0, r, theta, 0.5]).unwrap();
        prop_assert!(b.scalar.abs() <= 1e-12, "R = {} at r = {r}", b.scalar);
    }

    #[test]
    fn dilation_scaling_holds_for_random_factors(lambda in 0.5_f64..4.0) {
        let field = make_wormhole_static(1.0).unwrap();
        let spec = QuadratureSpec::over_radial(-1.0, 1.0, 8).unwrap();
        let base = action_per_unit_time(&field, &spec, Normalization::FullHandle)
            .unwrap()
            .value;
        let dilated = dilate_spatial(&field, lambda).unwrap();
        let scaled = action_per_unit_time(&dilated, &spec, Normalization::FullHandle)
            .unwrap()
            .value;
        prop_assert!(((scaled * lambda - base) / base).abs() <= 1e-10);
    }

    #[test]
    fn quartic_fit_recovers_exact_coefficients(
        c0 in -10.0_f64..10.0,
        c2 in -10.0_f64..10.0,
        c4 in -10.0_f64..10.0,
    ) {
        let samples: Vec<(f64, f64)> = curvens_core::xi::DEFAULT_V_GRID
            .iter()
            .map(|&v| (v, c0 + c2 * v * v + c4 * v.powi(4)))
            .collect();
        let fit = curvens_core::xi::fit_expansion(&samples).unwrap();
        prop_assert!((fit.c0 - c0).abs() <= 1e-9);
        prop_assert!((fit.c2 - c2).abs() <= 1e-7);
        prop_assert!((fit.c4 - c4).abs() <= 1e-6);
    }

    #[test]
    fn cell_weights_stay_in_unit_interval(
        r_alpha in -100.0_f64..100.0,
        log_mu in -2.0_f64..6.0,
    ) {
        let mu = 10.0_f64.powf(log_mu);
        let w = curvens_core::ensemble::cell_weight(r_alpha, mu).unwrap();
        prop_assert!(w > 0.0 || r_alpha.abs() > 0.0);
        prop_assert!(w <= 1.0);
        let lw = curvens_core::ensemble::log_cell_weight(r_alpha, mu).unwrap();
        prop_assert!(lw <= 0.0);
    }

    #[test]
    fn segment_energy_matches_speed_formula(
        dt in 0.2_f64..5.0,
        ux in -0.7_f64..0.7,
        uy in -0.5_f64..0.5,
        mass in 0.1_f64..10.0,
    ) {
        let u2 = ux * ux + uy * uy;
        prop_assume!(u2 < 0.96);
        let state = curvens_core::dynamics::SystemState {
            boundary_times: vec![0.0, dt],
            particles: vec![curvens_core::dynamics::Particle {
                mass,
                first_interval: 0,
                points: vec![[0.0; 3], [ux * dt, uy * dt, 0.0]],
            }],
            kappa: 1.0,
        };
        let e = state.energy(0).unwrap();
        prop_assert!(((e - mass / (1.0 - u2).sqrt()) / e).abs() < 1e-12);
        // xi = κ m T = κ m dt sqrt(1 - u²)
        let xi = state.xi_interval(0).unwrap();
        prop_assert!(((xi - mass * dt * (1.0 - u2).sqrt()) / xi).abs() < 1e-12);
    }
}
