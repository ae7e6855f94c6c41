//! Post-selected teleportation with a pure shared two-mode squeezed vacuum.
//!
//! The output is kept only when Alice's outcome `β = (x̄_u + i p̄_v)/√2` lies in
//! the disk `|β| ≤ K`. Everything here is expressed in `λ = tanh r`, the gain `G`
//! and the radius `K` (in β units).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gain::minimize_numeric;
use crate::numeric::{bisect, Minimum};
use crate::phase_space::r_from_db;

/// Gain bracket for the numeric conditional optimization.
pub const CONDITIONAL_GAIN_BRACKET: (f64, f64) = (0.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRegion {
    k: f64,
}

impl DiskRegion {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter {
                name: "K",
                value: k,
                reason: "disk radius must be positive",
            });
        }
        Ok(Self { k })
    }

    pub fn radius(&self) -> f64 {
        self.k
    }
}

/// `a_cond = (1 − λ²) + 2(G − λ)²`.
pub fn cond_exponent(lambda: f64, gain: f64) -> f64 {
    (1.0 - lambda * lambda) + 2.0 * (gain - lambda).powi(2)
}

/// `1 − e^{−u}` without cancellation.
fn one_minus_exp(u: f64) -> f64 {
    -(-u).exp_m1()
}

/// `1 − (1 + u) e^{−u}`, by series for small `u`.
pub(crate) fn one_minus_poly_exp(u: f64) -> f64 {
    if u < 1e-2 {
        let mut term = u * u / 2.0;
        let mut sum = term;
        for k in 3..12 {
            term *= -u / k as f64;
            sum += term * (k - 1) as f64;
        }
        sum
    } else {
        one_minus_exp(u) - u * (-u).exp()
    }
}

/// Success probability for an attenuated input `η|1⟩⟨1| + (1 − η)|0⟩⟨0|`:
/// `1 − [1 + η(1 − λ²)² K²] e^{−(1 − λ²) K²}`. Independent of the gain.
pub fn success_prob_disk_attenuated(lambda: f64, region: DiskRegion, eta: f64) -> f64 {
    let s = 1.0 - lambda * lambda;
    let x = s * region.k * region.k;
    let mix = eta * s;
    (1.0 - mix) * one_minus_exp(x) + mix * one_minus_poly_exp(x)
}

/// `P_Ω = 1 − [1 + (1 − λ²)² K²] e^{−(1 − λ²) K²}`.
pub fn success_prob_disk(lambda: f64, region: DiskRegion) -> f64 {
    success_prob_disk_attenuated(lambda, region, 1.0)
}

/// `P_Ω · W_Ω(0)` for a Fock |1⟩ input.
fn fock1_weighted_origin(lambda: f64, gain: f64, region: DiskRegion) -> f64 {
    let l2 = lambda * lambda;
    let a = cond_exponent(lambda, gain);
    let u = a * region.k * region.k;
    let coherent = (l2 - 2.0 * gain * lambda + 1.0).powi(2) / (a * a) * one_minus_poly_exp(u);
    (1.0 - l2) / PI * (-l2 / a * one_minus_exp(u) + coherent)
}

/// `P · W(0)` for a vacuum input.
fn vacuum_weighted_origin(lambda: f64, gain: f64, region: DiskRegion) -> f64 {
    let a = cond_exponent(lambda, gain);
    (1.0 - lambda * lambda) / (PI * a) * one_minus_exp(a * region.k * region.k)
}

/// Conditional output origin for |1⟩, from the parity expectation of the
/// post-selected state.
pub fn origin_disk_fock1(lambda: f64, gain: f64, region: DiskRegion) -> f64 {
    fock1_weighted_origin(lambda, gain, region) / success_prob_disk(lambda, region)
}

/// Conditional output origin for the attenuated input,
/// `η W^{(1)} + (1 − η) W^{(0)}` with both branches normalized by `P^{(η)}`.
pub fn origin_disk_attenuated(lambda: f64, gain: f64, region: DiskRegion, eta: f64) -> f64 {
    let p_eta = success_prob_disk_attenuated(lambda, region, eta);
    (eta * fock1_weighted_origin(lambda, gain, region) + (1.0 - eta) * vacuum_weighted_origin(lambda, gain, region))
        / p_eta
}

/// `K → 0` limit: `(1/π)(1 − η − ηλ²)/(1 − η + ηλ²)`.
pub fn origin_pointlimit_attenuated(lambda: f64, eta: f64) -> f64 {
    let l2 = lambda * lambda;
    (1.0 - eta - eta * l2) / (PI * (1.0 - eta + eta * l2))
}

/// First-order expansion of the point limit around `λ = 1`.
pub fn pointlimit_expansion(lambda: f64, eta: f64) -> f64 {
    (1.0 - 2.0 * eta + 4.0 * eta * (1.0 - eta) * (1.0 - lambda)) / PI
}

/// Per-outcome integrand of `P_Ω W_Ω(0)` for |1⟩ (measure `d²β/π`): the parity
/// weight of the unnormalized output at `β`, divided by π.
pub fn weighted_origin_density_fock1(lambda: f64, gain: f64, beta: Complex64) -> f64 {
    let s = 1.0 - lambda * lambda;
    let b2 = beta.norm_sqr();
    let g2 = (gain - lambda).powi(2) * b2;
    let u2 = s * s * b2;
    let u_delta = -2.0 * s * (gain - lambda) * b2;
    s * (-s * b2 - 2.0 * g2).exp() * (u2 + 2.0 * lambda * u_delta - lambda * lambda * (1.0 - 4.0 * g2)) / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalOutcome {
    pub gain: f64,
    pub success: f64,
    pub origin: f64,
}

/// Numerically optimized gain on [`CONDITIONAL_GAIN_BRACKET`].
pub fn optimal_conditional_gain(lambda: f64, region: DiskRegion, eta: f64) -> Result<ConditionalOutcome> {
    let (lo, hi) = CONDITIONAL_GAIN_BRACKET;
    let Minimum { arg, value } = minimize_numeric(|g| origin_disk_attenuated(lambda, g, region, eta), lo, hi)?;
    Ok(ConditionalOutcome {
        gain: arg,
        success: success_prob_disk_attenuated(lambda, region, eta),
        origin: value,
    })
}

/// Lowest origin value reachable on the gain bracket. When the minimum is not
/// interior (no negativity to optimize) the boundary value is returned.
pub fn best_conditional_origin(lambda: f64, region: DiskRegion, eta: f64) -> f64 {
    match optimal_conditional_gain(lambda, region, eta) {
        Ok(out) => out.origin,
        Err(Error::NoBracket { value, .. }) => value,
        Err(_) => f64::NAN,
    }
}

/// Squeezed variance (dB) at which the optimized conditional origin changes sign.
pub fn threshold_disk_attenuated(eta: f64, region: DiskRegion, lo_db: f64, hi_db: f64) -> Result<f64> {
    bisect(
        |db| best_conditional_origin(r_from_db(db).tanh(), region, eta),
        lo_db,
        hi_db,
        1e-9,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{origin_symmetric, threshold_unconditional, InputState};
    use crate::gain::{optimal_gain, optimal_gain_for};
    use approx::assert_relative_eq;

    fn lam(db: f64) -> f64 {
        r_from_db(db).tanh()
    }

    fn disk(k: f64) -> DiskRegion {
        DiskRegion::new(k).unwrap()
    }

    #[test]
    fn region_validation() {
        assert!(DiskRegion::new(0.0).is_err());
        assert!(DiskRegion::new(-1.0).is_err());
        assert!(DiskRegion::new(f64::INFINITY).is_err());
    }

    #[test]
    fn series_matches_direct_form() {
        for u in [1e-3f64, 5e-3, 9.99e-3, 1e-2] {
            let direct = 1.0 - (1.0 + u) * (-u).exp();
            assert!((one_minus_poly_exp(u) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn success_probability_values() {
        // −3 dB squeezing gives λ = 1/3 to within rounding of the dB value.
        assert!((lam(-3.0) - 1.0 / 3.0).abs() < 2e-3);
        let p = success_prob_disk(1.0 / 3.0, disk(0.3));
        assert!((p - 0.0112).abs() < 5e-5, "{p}");
        assert!((success_prob_disk(0.5, disk(50.0)) - 1.0).abs() < 1e-15);
        let p_eta = success_prob_disk_attenuated(lam(-10.0), disk(0.3), 0.6304);
        assert!((p_eta - 0.0233).abs() < 5e-5, "{p_eta}");
        let l = 0.4;
        let vac = success_prob_disk_attenuated(l, disk(0.3), 0.0);
        assert_relative_eq!(vac, 1.0 - (-(1.0 - l * l) * 0.09f64).exp(), epsilon = 1e-15);
        assert_eq!(
            success_prob_disk_attenuated(l, disk(0.3), 1.0),
            success_prob_disk(l, disk(0.3))
        );
    }

    #[test]
    fn quoted_conditional_values() {
        for (db, p_exp, w_exp, tol) in [
            (-3.0, 0.0112, -0.2174, 1e-3),
            (-5.0, 0.0187, -0.284, 1e-3),
            (-7.0, 0.0223, -0.3056, 1e-3),
            (-10.0, 0.0198, -0.3152, 5e-4),
        ] {
            let out = optimal_conditional_gain(lam(db), disk(0.3), 1.0).unwrap();
            assert!((out.success - p_exp).abs() < 1e-4, "{db}: {out:?}");
            assert!((out.origin - w_exp).abs() < tol, "{db}: {out:?}");
        }
    }

    #[test]
    fn attenuated_conditional_at_minus_10db() {
        let out = optimal_conditional_gain(lam(-10.0), disk(0.3), 0.6304).unwrap();
        assert!((out.origin - -0.0209).abs() < 5e-4, "{out:?}");
        // Conditional and unconditional optimal gains differ only in the third decimal.
        let unc = optimal_gain_for(r_from_db(-10.0), InputState::Attenuated { eta: 0.6304 }).unwrap();
        assert!((out.gain - unc.arg).abs() < 1e-3, "{} vs {}", out.gain, unc.arg);
    }

    #[test]
    fn small_disk_recovers_single_photon() {
        for l in [0.1, 0.3, 0.6] {
            let w = origin_disk_fock1(l, l, disk(1e-3));
            assert!((w + 1.0 / PI).abs() < 1e-4, "{l}: {w}");
        }
    }

    #[test]
    fn integrand_reproduces_disk_value() {
        // Radial Simpson over u = |β|² on [0, K²]; the integrand depends on |β| only.
        let (l, g, k) = (0.45, 0.9, 0.8);
        let n = 2000;
        let h = k * k / n as f64;
        let f = |u: f64| weighted_origin_density_fock1(l, g, Complex64::new(u.sqrt(), 0.0));
        let mut acc = f(0.0) + f(k * k);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = acc * h / 3.0;
        assert_relative_eq!(integral, fock1_weighted_origin(l, g, disk(k)), epsilon = 1e-12);
    }

    #[test]
    fn eta_one_reduces_to_fock() {
        let (l, g) = (0.45, 0.8);
        assert_relative_eq!(
            origin_disk_attenuated(l, g, disk(0.3), 1.0),
            origin_disk_fock1(l, g, disk(0.3)),
            epsilon = 1e-15
        );
    }

    #[test]
    fn point_limit() {
        for l in [0.2, 0.7, 0.95] {
            assert_relative_eq!(origin_pointlimit_attenuated(l, 1.0), -1.0 / PI, epsilon = 1e-15);
        }
        let eta = 0.6304;
        let l_th = threshold_unconditional(eta).unwrap().r_gain.tanh();
        assert!(origin_pointlimit_attenuated(l_th, eta).abs() < 1e-15);
        let w = origin_pointlimit_attenuated(9.0 / 11.0, eta);
        assert!((w - -0.0211).abs() < 1e-4, "{w}");
        let finite = optimal_conditional_gain(9.0 / 11.0, disk(0.3), eta).unwrap().origin;
        assert!(w < finite);
    }

    #[test]
    fn conditional_threshold_equals_unconditional() {
        let unc = threshold_unconditional(0.6304).unwrap().db_gain();
        for k in [0.1, 0.3] {
            let th = threshold_disk_attenuated(0.6304, disk(k), -12.0, -6.0).unwrap();
            assert!((th - -8.77).abs() < 0.01, "K = {k}: {th}");
            assert!((th - unc).abs() < 0.01);
        }
    }

    #[test]
    fn conditional_beats_unconditional() {
        for i in 0..=14 {
            let db = -10.0 + i as f64 * 0.5;
            let cond = optimal_conditional_gain(lam(db), disk(0.3), 1.0).unwrap().origin;
            let unc = optimal_gain(r_from_db(db)).unwrap().origin;
            assert!(cond < unc, "{db}: {cond} vs {unc}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn expansion_accuracy(l in 0.95f64..0.9999, eta in 0.0f64..=1.0) {
                let exact = origin_pointlimit_attenuated(l, eta);
                let err = (exact - pointlimit_expansion(l, eta)).abs();
                // Second order in (1 − λ); the relative bound only holds away from the zero crossing.
                prop_assert!(err <= 0.25 * (1.0 - l).powi(2) + 1e-15, "l={} eta={} err={}", l, eta, err);
                if eta >= 0.8 {
                    prop_assert!(err < 0.01 * exact.abs());
                }
            }

            #[test]
            fn small_disk_limit(l in 0.05f64..0.95, g in 0.0f64..2.0, eta in 0.0f64..=1.0) {
                let w = origin_disk_attenuated(l, g, disk(1e-3), eta);
                prop_assert!((w - origin_pointlimit_attenuated(l, eta)).abs() < 1e-4);
            }

            #[test]
            fn probabilities_monotone_in_k(l in 0.0f64..0.99, eta in 0.0f64..=1.0, k in 0.01f64..3.0) {
                let p1 = success_prob_disk_attenuated(l, disk(k), eta);
                let p2 = success_prob_disk_attenuated(l, disk(k * 1.1), eta);
                prop_assert!((0.0..=1.0).contains(&p1));
                prop_assert!(p2 > p1);
            }

            #[test]
            fn single_photon_point_limit_is_extremal(r in 0.05f64..2.5) {
                let unc = optimal_gain_for(r, InputState::Fock1)
                    .map(|m| m.value)
                    .unwrap_or_else(|_| origin_symmetric(r, 1.0, InputState::Fock1));
                prop_assert!(origin_pointlimit_attenuated(r.tanh(), 1.0) <= unc);
            }
        }
    }
}
