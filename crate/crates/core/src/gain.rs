//! Gain that minimizes the teleported Wigner function at the origin.
//!
//! For a Fock |1⟩ input the stationarity condition of the symmetric-protocol
//! origin value is the cubic `G³ + aG² + bG + c = 0`, solved with the
//! trigonometric formula for three real roots. Other inputs and the
//! conditional protocols are minimized numerically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{build_map, origin_fock1, origin_symmetric, InputState, TeleportParams};
use crate::error::{Error, Result};
use crate::numeric::{bisect, nelder_mead, scan_then_golden, Minimum};
use crate::phase_space::{r_from_db, SqueezeSpec};

/// Below this squeezing the cubic is not used and the gain is found numerically.
pub const R_MIN: f64 = 1e-3;

/// Slack on `|cos φ| ≤ 1` before the discriminant counts as violated.
pub const COS_PHI_CLAMP: f64 = 1e-12;

/// Absolute bracket width at which the numeric minimizer stops.
pub const GAIN_TOL: f64 = 1e-8;

const SCAN_POINTS: usize = 400;

/// Coefficients of `G³ + aG² + bG + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CubicCoeffs {
    /// Depressed cubic `y³ + p y + q_cub` under `G = y − a/3`.
    pub fn depressed(&self) -> (f64, f64) {
        let (a, b, c) = (self.a, self.b, self.c);
        let p = b - a * a / 3.0;
        let q_cub = c - a * b / 3.0 + 2.0 * a * a * a / 27.0;
        (p, q_cub)
    }

    pub fn cos_phi(&self) -> f64 {
        let (p, q_cub) = self.depressed();
        -(q_cub / 2.0) * (-27.0 / (p * p * p)).sqrt()
    }

    pub fn eval(&self, g: f64) -> f64 {
        ((g + self.a) * g + self.b) * g + self.c
    }
}

/// `a = −3 coth r`, `b = 2 + coth² 2r + 3 cosh 2r / sinh² 2r`, `c = −coth 2r`.
pub fn cubic_coefficients(r: f64) -> Result<CubicCoeffs> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "must be finite",
        });
    }
    if r <= R_MIN {
        return Err(Error::IllConditionedCubic { r });
    }
    let coth = |x: f64| 1.0 / x.tanh();
    let (ch2, sh2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    Ok(CubicCoeffs {
        a: -3.0 * coth(r),
        b: 2.0 + coth(2.0 * r).powi(2) + 3.0 * ch2 / (sh2 * sh2),
        c: -coth(2.0 * r),
    })
}

/// The three real roots `[G₁, G₂, G₃]` in the order of the trigonometric formula:
/// `y₁ = 2√(−p/3) cos(φ/3)`, `y₂,₃ = −2√(−p/3) cos((φ ± π)/3)`, `G = y − a/3`.
pub fn cubic_roots(cc: &CubicCoeffs) -> Result<[f64; 3]> {
    let (p, _) = cc.depressed();
    if p.is_nan() || p >= 0.0 {
        return Err(Error::DiscriminantViolation { cos_phi: f64::NAN });
    }
    let cos_phi = cc.cos_phi();
    if cos_phi.is_nan() || cos_phi.abs() > 1.0 + COS_PHI_CLAMP {
        return Err(Error::DiscriminantViolation { cos_phi });
    }
    let phi = cos_phi.clamp(-1.0, 1.0).acos();
    let m = 2.0 * (-p / 3.0).sqrt();
    let shift = -cc.a / 3.0;
    Ok([
        m * (phi / 3.0).cos() + shift,
        -m * ((phi + PI) / 3.0).cos() + shift,
        -m * ((phi - PI) / 3.0).cos() + shift,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMethod {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalGain {
    pub gain: f64,
    /// Origin value of the output at `gain`.
    pub origin: f64,
    pub method: GainMethod,
    /// `false` if the minimizing root is not the `G₂` branch.
    pub branch_agrees: bool,
}

/// Gain minimizing the Fock |1⟩ output origin for squeezing `r`.
///
/// All three roots are evaluated and the minimizer kept (smaller gain on ties);
/// the result is flagged when it is not the `G₂` branch.
pub fn optimal_gain(r: f64) -> Result<OptimalGain> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "optimal gain needs r > 0",
        });
    }
    let objective = |g: f64| origin_symmetric(r, g, InputState::Fock1);
    match cubic_coefficients(r) {
        Ok(cc) => {
            let roots = cubic_roots(&cc)?;
            let (idx, gain, origin) = roots
                .iter()
                .enumerate()
                .filter(|(_, g)| **g >= 0.0)
                .map(|(i, &g)| (i, g, objective(g)))
                .min_by(|a, b| a.2.total_cmp(&b.2).then(a.1.total_cmp(&b.1)))
                .ok_or(Error::Degenerate("no non-negative root"))?;
            Ok(OptimalGain {
                gain,
                origin,
                method: GainMethod::Analytic,
                branch_agrees: idx == 1,
            })
        }
        Err(Error::IllConditionedCubic { .. }) => {
            let m = minimize_numeric(objective, 0.0, gain_bracket_hi(r))?;
            Ok(OptimalGain {
                gain: m.arg,
                origin: m.value,
                method: GainMethod::Numeric,
                branch_agrees: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Upper end of the gain search interval, `2 coth r`.
pub fn gain_bracket_hi(r: f64) -> f64 {
    2.0 / r.tanh()
}

/// Scan-bracketed golden-section minimization on `[lo, hi]`.
pub fn minimize_numeric<F: Fn(f64) -> f64>(objective: F, lo: f64, hi: f64) -> Result<Minimum> {
    scan_then_golden(objective, lo, hi, SCAN_POINTS, GAIN_TOL)
}

/// Gain minimizing the unconditional output origin for an arbitrary input.
pub fn optimal_gain_for(r: f64, input: InputState) -> Result<Minimum> {
    match input {
        InputState::Fock1 => optimal_gain(r).map(|g| Minimum {
            arg: g.gain,
            value: g.origin,
        }),
        InputState::Attenuated { .. } => minimize_numeric(|g| origin_symmetric(r, g, input), 0.0, gain_bracket_hi(r)),
    }
}

/// Squeezed variance (dB) at which the optimal gain crosses 1, searched on `[lo_db, hi_db]`.
pub fn unity_crossover_db(input: InputState, lo_db: f64, hi_db: f64) -> Result<f64> {
    let excess = |db: f64| {
        optimal_gain_for(r_from_db(db), input)
            .map(|m| m.arg - 1.0)
            .unwrap_or(f64::NAN)
    };
    bisect(excess, lo_db, hi_db, 1e-10)
}

/// Gain minimizing added noise for a given measurement noise, `coth 2r`.
pub fn ralph_gain(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "coth(2r) diverges at r = 0",
        });
    }
    Ok(1.0 / (2.0 * r).tanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeVariableReport {
    pub transmissivity: f64,
    pub g_x: f64,
    pub g_p: f64,
    pub origin: f64,
    /// Symmetric-protocol origin value at the analytic optimum.
    pub symmetric_origin: f64,
    pub symmetric_gain: f64,
}

/// Brute-force minimization of the general origin value over `(T, g_x, g_p)`:
/// a coarse grid followed by Nelder–Mead refinement.
pub fn three_variable_check(r: f64) -> Result<ThreeVariableReport> {
    if !(0.1..=1.5).contains(&r) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "three-variable check supports r in [0.1, 1.5]",
        });
    }
    let squeeze = SqueezeSpec::new(r)?;
    let objective = |t: f64, gx: f64, gp: f64| -> f64 {
        match TeleportParams::new(squeeze, t, gx, gp) {
            Ok(p) => origin_fock1(&build_map(&p)),
            Err(_) => f64::INFINITY,
        }
    };

    let g_hi = std::f64::consts::SQRT_2 * gain_bracket_hi(r);
    let n_g = 80;
    let mut best = (f64::INFINITY, 0.5, 1.0, 1.0);
    for it in 1..20 {
        let t = it as f64 * 0.05;
        for ix in 1..=n_g {
            let gx = g_hi * ix as f64 / n_g as f64;
            for ip in 1..=n_g {
                let gp = g_hi * ip as f64 / n_g as f64;
                let v = objective(t, gx, gp);
                if v < best.0 {
                    best = (v, t, gx, gp);
                }
            }
        }
    }

    let (x, value) = nelder_mead(
        |v: &[f64; 3]| objective(v[0], v[1], v[2]),
        [best.1, best.2, best.3],
        [0.02, g_hi / n_g as f64, g_hi / n_g as f64],
        1e-11,
        50_000,
    );
    let sym = optimal_gain(r)?;
    Ok(ThreeVariableReport {
        transmissivity: x[0],
        g_x: x[1],
        g_p: x[2],
        origin: value,
        symmetric_origin: sym.origin,
        symmetric_gain: sym.gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fock_origin(r: f64, g: f64) -> f64 {
        origin_symmetric(r, g, InputState::Fock1)
    }

    #[test]
    fn coefficients_at_r1() {
        let cc = cubic_coefficients(1.0).unwrap();
        assert_relative_eq!(cc.a, -3.0 / 1f64.tanh(), epsilon = 1e-15);
        assert!((cc.a - -3.9391).abs() < 1e-4);
        // The middle root is a stationary point of the origin value (finite differences).
        let g2 = cubic_roots(&cc).unwrap()[1];
        let h = 1e-6;
        let d = (fock_origin(1.0, g2 + h) - fock_origin(1.0, g2 - h)) / (2.0 * h);
        assert!(d.abs() < 1e-7, "{d}");
    }

    #[test]
    fn coefficients_approach_triple_root() {
        let cc = cubic_coefficients(15.0).unwrap();
        assert!((cc.a + 3.0).abs() < 1e-9 && (cc.b - 3.0).abs() < 1e-9 && (cc.c + 1.0).abs() < 1e-9);
        for g in cubic_roots(&cubic_coefficients(6.0).unwrap()).unwrap() {
            assert!((g - 1.0).abs() < 2e-2, "{g}");
        }
    }

    #[test]
    fn small_r_is_flagged() {
        assert_eq!(cubic_coefficients(1e-3), Err(Error::IllConditionedCubic { r: 1e-3 }));
        let cc = cubic_coefficients(0.01).unwrap();
        assert!((cc.a.abs() - 300.0).abs() < 0.1);
        // Analytic and numeric minimizers still agree at r = 0.01.
        let analytic = optimal_gain(0.01).unwrap().gain;
        let numeric = minimize_numeric(|g| fock_origin(0.01, g), 0.0, gain_bracket_hi(0.01)).unwrap();
        assert!((analytic - numeric.arg).abs() / analytic < 1e-6);
    }

    #[test]
    fn vieta_and_residuals() {
        let cc = cubic_coefficients(0.5).unwrap();
        let roots = cubic_roots(&cc).unwrap();
        assert!((roots.iter().sum::<f64>() + cc.a).abs() < 1e-9);
        for g in roots {
            assert!(cc.eval(g).abs() < 1e-9 * g.abs().powi(3).max(1.0));
        }
    }

    #[test]
    fn discriminant_violation() {
        let cc = CubicCoeffs { a: 0.0, b: 1.0, c: 0.0 };
        assert!(matches!(cubic_roots(&cc), Err(Error::DiscriminantViolation { .. })));
    }

    #[test]
    fn quoted_optimal_origins() {
        for (db, expected) in [(-3.0, -0.0091), (-5.0, -0.0442), (-7.0, -0.0993), (-10.0, -0.1826)] {
            let g = optimal_gain(r_from_db(db)).unwrap();
            assert!((g.origin - expected).abs() < 5e-4, "{db}: {}", g.origin);
            assert!(g.branch_agrees);
            assert_eq!(g.method, GainMethod::Analytic);
        }
    }

    #[test]
    fn amplifier_attenuator_crossover() {
        let x = unity_crossover_db(InputState::Fock1, -8.0, -3.0).unwrap();
        assert!((x - -5.52).abs() < 0.02, "{x}");
        assert!(optimal_gain(r_from_db(-4.0)).unwrap().gain > 1.0);
        assert!(optimal_gain(r_from_db(-7.0)).unwrap().gain < 1.0);
        let g552 = optimal_gain(r_from_db(-5.52)).unwrap().gain;
        assert!((g552 - 1.0).abs() < 0.01);
    }

    #[test]
    fn attenuated_crossover() {
        let x = unity_crossover_db(InputState::Attenuated { eta: 0.6304 }, -14.0, -9.5).unwrap();
        assert!((x - -10.84).abs() < 0.02, "{x}");
    }

    #[test]
    fn numeric_matches_analytic() {
        let m = minimize_numeric(|g| fock_origin(0.5, g), 0.0, gain_bracket_hi(0.5)).unwrap();
        assert!((m.arg - optimal_gain(0.5).unwrap().gain).abs() < 1e-6);
    }

    #[test]
    fn optimal_gain_seam_is_continuous() {
        let numeric = minimize_numeric(|g| fock_origin(R_MIN, g), 0.0, gain_bracket_hi(R_MIN)).unwrap();
        let just_above = optimal_gain(R_MIN * (1.0 + 1e-12)).unwrap();
        let below = optimal_gain(R_MIN).unwrap();
        assert_eq!(below.method, GainMethod::Numeric);
        assert_eq!(just_above.method, GainMethod::Analytic);
        assert!((just_above.gain - numeric.arg).abs() / just_above.gain < 1e-5);
        assert!((below.gain - just_above.gain).abs() / just_above.gain < 1e-5);
    }

    #[test]
    fn negativity_for_tiny_squeezing() {
        for r in [1e-4, 1e-3, 0.01] {
            let g = optimal_gain(r).unwrap();
            assert!(g.origin < 0.0, "r = {r}: {}", g.origin);
        }
    }

    #[test]
    fn ralph_gain_properties() {
        assert!(ralph_gain(0.0).is_err());
        assert!((ralph_gain(20.0).unwrap() - 1.0).abs() < 1e-12);
        for db in [-1.0, -3.0, -5.52, -10.0, -20.0] {
            assert!(ralph_gain(r_from_db(db)).unwrap() > 1.0);
        }
        let r = r_from_db(-5.52);
        let diff = ralph_gain(r).unwrap() - optimal_gain(r).unwrap().gain;
        assert!(diff > 0.1, "{diff}");
    }

    #[test]
    fn three_variable_optimum_is_symmetric() {
        let rep = three_variable_check(0.35).unwrap();
        assert!((rep.transmissivity - 0.5).abs() < 1e-3, "{rep:?}");
        assert!(rep.origin <= rep.symmetric_origin + 1e-12);
        assert!((rep.origin - rep.symmetric_origin).abs() < 1e-9);

        let rep = three_variable_check(0.8).unwrap();
        assert!((rep.g_x / rep.g_p - 1.0).abs() < 1e-3, "{rep:?}");
        assert!((rep.g_x / std::f64::consts::SQRT_2 - rep.symmetric_gain).abs() < 1e-3);

        let sym = TeleportParams::symmetric(SqueezeSpec::new(0.8).unwrap(), rep.symmetric_gain).unwrap();
        assert!((origin_fock1(&build_map(&sym)) - rep.symmetric_origin).abs() < 1e-15);
        assert!(three_variable_check(2.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn g2_branch_is_the_minimizer(r in 0.05f64..5.0) {
                let g = optimal_gain(r).unwrap();
                prop_assert!(g.branch_agrees);
                let roots = cubic_roots(&cubic_coefficients(r).unwrap()).unwrap();
                prop_assert_eq!(g.gain, roots[1]);
            }

            #[test]
            fn stationarity(r in 0.05f64..4.0) {
                let g = optimal_gain(r).unwrap().gain;
                let h = 1e-6;
                let d = (fock_origin(r, g + h) - fock_origin(r, g - h)) / (2.0 * h);
                prop_assert!(d.abs() < 1e-6, "r={} d={}", r, d);
            }

            #[test]
            fn root_residuals(r in 0.002f64..8.0) {
                let cc = cubic_coefficients(r).unwrap();
                for g in cubic_roots(&cc).unwrap() {
                    prop_assert!(cc.eval(g).abs() < 1e-9 * g.abs().powi(3).max(1.0));
                }
            }
        }
    }

    #[test]
    fn optimal_origin_decreases_with_squeezing() {
        let mut prev = f64::INFINITY;
        for i in 0..=78 {
            let r = 0.05 + i as f64 * 0.025;
            let v = optimal_gain(r).unwrap().origin;
            assert!(v < prev, "r = {r}");
            prev = v;
        }
    }
}
