//! Ξ-function evaluation and the even rotation expansion
//! Ξ(v) = c₀ + c₂ v² + c₄ v⁴ for Lorentzian and Euclidean handles, plus the
//! particle Ξ form τ M T + τ* M^{5/3} T.

use crate::catalog::make_wormhole_rotating;
use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::metric::Signature;
use crate::quadrature::{action_per_unit_time, Normalization, QuadratureSpec, VolumeMode};
use rayon::prelude::*;
use serde::Serialize;

/// Even-quartic expansion coefficients of Ξ(v) with fit diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct XiExpansion {
    pub c0: f64,
    pub c2: f64,
    pub c4: f64,
    /// Max |fit − sample| over the input sweep.
    pub residual: f64,
    /// Normalization-free ratios (c2/c0, c4/c0).
    pub ratios: (f64, f64),
}

/// Ξ per unit time of the rotating a = 1 handle at speed v: the quadratic
/// curvature action with the frozen static volume element, so a change in v
/// is volume preserving by construction.
pub fn xi_of_v(
    v: f64,
    signature: Signature,
    nodes: usize,
    normalization: Normalization,
) -> Result<f64> {
    let field = make_wormhole_rotating(v, signature == Signature::Euclidean)?;
    let spec =
        QuadratureSpec::over_radial(-1.0, 1.0, nodes)?.with_volume_mode(VolumeMode::FixedStatic);
    Ok(action_per_unit_time(&field, &spec, normalization)?.value)
}

/// Default sweep grid covering the slow-rotation regime; used for the CSV
/// sweep output.
pub const DEFAULT_V_GRID: [f64; 7] = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3];

/// Grid for coefficient estimation. The reference expansion coefficients are
/// Taylor coefficients at v = 0; on a grid reaching v = 0.3 the neglected v⁶
/// term biases a quartic fit of c4 by ~9%, so coefficients are extracted on
/// this smaller grid where the measured bias stays under 2.5% for both
/// signatures while c2/c4 remain well separated above quadrature error.
pub const COEFFICIENT_V_GRID: [f64; 6] = [0.0, 0.016, 0.032, 0.048, 0.064, 0.08];

/// Evaluate Ξ(v) on a grid; samples run concurrently.
pub fn sweep(
    vs: &[f64],
    signature: Signature,
    nodes: usize,
    normalization: Normalization,
) -> Result<Vec<(f64, f64)>> {
    vs.par_iter()
        .map(|&v| Ok((v, xi_of_v(v, signature, nodes, normalization)?)))
        .collect()
}

/// Least-squares fit of an even quartic through (v, Ξ) samples.
///
/// Needs at least 4 distinct |v| values including 0, all with |v| <= 0.3
/// (slow rotation); too narrow a spread is reported as ill-conditioned.
pub fn fit_expansion(samples: &[(f64, f64)]) -> Result<XiExpansion> {
    let mut speeds: Vec<f64> = samples.iter().map(|&(v, _)| v.abs()).collect();
    speeds.sort_by(f64::total_cmp);
    speeds.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    if speeds.len() < 4 {
        return Err(Error::IllConditioned(format!(
            "need >= 4 distinct |v| values, got {}",
            speeds.len()
        )));
    }
    if speeds[0] > 1e-14 {
        return Err(Error::IllConditioned(
            "sample grid must include v = 0".into(),
        ));
    }
    if let Some(&max) = speeds.last() {
        if max > 0.3 + 1e-12 {
            return Err(Error::InvalidParam(format!(
                "|v| = {max} outside the slow-rotation regime (|v| <= 0.3)"
            )));
        }
    }

    // Normal equations for [1, v^2, v^4].
    let mut a = vec![vec![0.0; 3]; 3];
    let mut b = vec![0.0; 3];
    for &(v, xi) in samples {
        let basis = [1.0, v * v, v.powi(4)];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += basis[i] * basis[j];
            }
            b[i] += basis[i] * xi;
        }
    }
    let sol = solve_dense(a, b)
        .ok_or_else(|| Error::IllConditioned("sample spread too narrow for a quartic".into()))?;
    let (c0, c2, c4) = (sol[0], sol[1], sol[2]);

    let residual = samples
        .iter()
        .map(|&(v, xi)| (c0 + c2 * v * v + c4 * v.powi(4) - xi).abs())
        .fold(0.0_f64, f64::max);

    Ok(XiExpansion {
        c0,
        c2,
        c4,
        residual,
        ratios: (c2 / c0, c4 / c0),
    })
}

/// Particle Ξ form: Ξ_P = τ M_g T + τ* M_g^{5/3} T. With τ* = 0 this is the
/// linear law used by the point-particle mechanics.
pub fn particle_xi(m_g: f64, t: f64, tau: f64, tau_star: f64) -> Result<f64> {
    if m_g < 0.0 || t < 0.0 {
        return Err(Error::InvalidParam(format!(
            "mass and duration must be >= 0, got M_g = {m_g}, T = {t}"
        )));
    }
    Ok(tau * m_g * t + tau_star * m_g.powf(5.0 / 3.0) * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::static_handle_action_closed_form;

    #[test]
    fn zero_speed_matches_static_action() {
        for signature in [Signature::Lorentzian, Signature::Euclidean] {
            let xi0 = xi_of_v(0.0, signature, 32, Normalization::HalfHandle).unwrap();
            let exact = static_handle_action_closed_form();
            assert!(
                ((xi0 - exact) / exact).abs() < 1e-9,
                "{signature:?}: {xi0} vs {exact}"
            );
        }
    }

    #[test]
    fn slow_rotation_sign_split() {
        let l0 = xi_of_v(0.0, Signature::Lorentzian, 24, Normalization::HalfHandle).unwrap();
        let l = xi_of_v(0.1, Signature::Lorentzian, 24, Normalization::HalfHandle).unwrap();
        let e = xi_of_v(0.1, Signature::Euclidean, 24, Normalization::HalfHandle).unwrap();
        assert!(l < l0, "Lorentzian action should decrease: {l} vs {l0}");
        assert!(e > l0, "Euclidean action should increase: {e} vs {l0}");
    }

    #[test]
    fn xi_is_even_in_v() {
        for &v in &[0.05, 0.1, 0.2] {
            let plus = xi_of_v(v, Signature::Lorentzian, 20, Normalization::HalfHandle).unwrap();
            let minus = xi_of_v(-v, Signature::Lorentzian, 20, Normalization::HalfHandle).unwrap();
            assert!(
                (plus - minus).abs() <= 1e-9 * plus.abs(),
                "v = {v}: {plus} vs {minus}"
            );
        }
    }

    #[test]
    fn exact_quartic_recovery() {
        let q = |v: f64| 1.0 - 2.0 * v * v + 3.0 * v.powi(4);
        let samples: Vec<(f64, f64)> = DEFAULT_V_GRID.iter().map(|&v| (v, q(v))).collect();
        let fit = fit_expansion(&samples).unwrap();
        assert!((fit.c0 - 1.0).abs() < 1e-12);
        assert!((fit.c2 + 2.0).abs() < 1e-10);
        assert!((fit.c4 - 3.0).abs() < 1e-9);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_preconditions() {
        // too few distinct speeds
        assert!(matches!(
            fit_expansion(&[(0.0, 1.0), (0.1, 1.0), (0.1, 1.0), (-0.1, 1.0)]),
            Err(Error::IllConditioned(_))
        ));
        // missing v = 0
        assert!(matches!(
            fit_expansion(&[(0.05, 1.0), (0.1, 1.0), (0.2, 1.0), (0.3, 1.0)]),
            Err(Error::IllConditioned(_))
        ));
        // outside the slow-rotation regime
        assert!(matches!(
            fit_expansion(&[(0.0, 1.0), (0.1, 1.0), (0.2, 1.0), (0.99, 1.0)]),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn fit_is_stable_under_an_extra_sample() {
        let mut samples = sweep(
            &COEFFICIENT_V_GRID,
            Signature::Lorentzian,
            16,
            Normalization::HalfHandle,
        )
        .unwrap();
        let base = fit_expansion(&samples).unwrap();
        let extra_v = 0.05;
        samples.push((
            extra_v,
            xi_of_v(
                extra_v,
                Signature::Lorentzian,
                16,
                Normalization::HalfHandle,
            )
            .unwrap(),
        ));
        let refit = fit_expansion(&samples).unwrap();
        for (a, b) in [
            (base.c0, refit.c0),
            (base.c2, refit.c2),
            (base.c4, refit.c4),
        ] {
            assert!(
                ((a - b) / a).abs() <= 0.01,
                "coefficient moved {a} -> {b} on one extra sample"
            );
        }
    }

    #[test]
    fn fitted_c2_matches_second_difference() {
        let h = 0.02;
        let nodes = 20;
        let xi =
            |v: f64| xi_of_v(v, Signature::Lorentzian, nodes, Normalization::HalfHandle).unwrap();
        // d²Ξ/dv²(0) = 2 c2
        let second_diff = (xi(h) - 2.0 * xi(0.0) + xi(-h)) / (h * h);
        let samples = sweep(
            &COEFFICIENT_V_GRID,
            Signature::Lorentzian,
            nodes,
            Normalization::HalfHandle,
        )
        .unwrap();
        let fit = fit_expansion(&samples).unwrap();
        assert!(
            ((fit.c2 - 0.5 * second_diff) / fit.c2).abs() <= 0.01,
            "fit c2 = {}, second difference / 2 = {}",
            fit.c2,
            0.5 * second_diff
        );
    }

    #[test]
    fn expansion_serializes_with_ratios() {
        let fit = fit_expansion(
            &DEFAULT_V_GRID
                .iter()
                .map(|&v| (v, 2.0 - v * v))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let value = serde_json::to_value(&fit).unwrap();
        for key in ["c0", "c2", "c4", "residual", "ratios"] {
            assert!(value.get(key).is_some(), "missing field {key}");
        }
    }

    #[test]
    fn particle_xi_values() {
        assert_eq!(particle_xi(0.0, 5.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(particle_xi(2.0, 3.0, 1.0, 0.0).unwrap(), 6.0);
        // 8^(5/3) = 32
        assert!((particle_xi(8.0, 1.0, 1.0, 1.0).unwrap() - 40.0).abs() < 1e-12);
        assert!(particle_xi(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(particle_xi(1.0, -1.0, 1.0, 0.0).is_err());
    }
}
