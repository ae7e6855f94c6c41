//! Conditional teleportation through an impure shared resource.
//!
//! Two regions are supported: the single outcome `β = 0`, and a square of
//! half-side `a_half` in the quadrature plane `(x̄_u, p̄_v)`. The disk region of
//! [`crate::conditional`] is defined in β units and is deliberately not
//! convertible to this one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::numeric::bisect;
use crate::phase_space::{noise_excess_db, squeeze_db, NoisyEprSpec};

/// Bracket in `V_sq` for the square-region threshold search.
pub const SQUARE_VSQ_BRACKET: (f64, f64) = (1e-4, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareRegion {
    a_half: f64,
}

impl SquareRegion {
    pub fn new(a_half: f64) -> Result<Self> {
        if !(a_half.is_finite() && a_half > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a_half,
                reason: "square half-side must be positive",
            });
        }
        Ok(Self { a_half })
    }

    pub fn half_side(&self) -> f64 {
        self.a_half
    }
}

/// Auxiliary quantities of the square-region origin value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixAux {
    pub q_sigma: f64,
    pub alpha_sigma: f64,
    pub delta_sigma: f64,
    pub b_erf: f64,
}

impl AppendixAux {
    pub fn new(spec: &NoisyEprSpec, gain: f64, region: SquareRegion) -> Self {
        let (v, c) = (spec.v(), spec.c());
        let det = spec.four_vsq_van();
        let g2 = gain * gain;
        Self {
            q_sigma: (v * (1.0 + g2) - 2.0 * c * gain + g2) / (v + det),
            alpha_sigma: (v + det) / det,
            delta_sigma: (c * gain - v) / det,
            b_erf: region.a_half / (2.0 * (1.0 + spec.mean_photons())).sqrt(),
        }
    }
}

/// Outcome density for a Fock |1⟩ input (measure `d²β/π`).
pub fn density_fock1(beta: Complex64, n_mean: f64) -> f64 {
    let b2 = beta.norm_sqr();
    if n_mean <= 0.0 {
        return b2 * (-b2).exp();
    }
    let m = 1.0 + n_mean;
    n_mean / (m * m) * (1.0 + b2 / (n_mean * m)) * (-b2 / m).exp()
}

/// Outcome density for a vacuum input.
pub fn density_vac(beta: Complex64, n_mean: f64) -> f64 {
    let m = 1.0 + n_mean;
    (-beta.norm_sqr() / m).exp() / m
}

/// `η P(β) + (1 − η) P^{(0)}(β)`.
pub fn density_attenuated(beta: Complex64, n_mean: f64, eta: f64) -> f64 {
    eta * density_fock1(beta, n_mean) + (1.0 - eta) * density_vac(beta, n_mean)
}

/// Output origin after accepting only `β = 0`, Fock |1⟩ input.
pub fn origin_point_fock1(spec: &NoisyEprSpec) -> Result<f64> {
    let v = spec.v();
    if (v - 1.0).abs() < 1e-14 {
        return Err(Error::Degenerate("V = 1: the shared state is the vacuum"));
    }
    let det = spec.four_vsq_van();
    Ok(-(v - det) / (PI * (v - 1.0)) * ((v + 1.0) / (v + det)).powi(2))
}

/// Output origin after accepting only `β = 0`, attenuated input.
pub fn origin_point_attenuated(spec: &NoisyEprSpec, eta: f64) -> Result<f64> {
    check_range("eta", eta, 0.0, 1.0)?;
    let v = spec.v();
    let denom = v + 1.0 - 2.0 * eta;
    if denom.abs() < 1e-14 {
        return Err(Error::Degenerate("V + 1 − 2η = 0"));
    }
    let det = spec.four_vsq_van();
    Ok((det + v * (1.0 - 2.0 * eta)) / (PI * denom) * ((v + 1.0) / (v + det)).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointThreshold {
    pub eta: f64,
    pub noise: f64,
    pub v_th: f64,
    /// `N → ∞` limit, `(2η − 1)/4`.
    pub v_th_inf: f64,
}

impl PointThreshold {
    pub fn db(&self) -> f64 {
        squeeze_db(self.v_th).expect("threshold is positive")
    }

    pub fn db_inf(&self) -> f64 {
        squeeze_db(self.v_th_inf).expect("asymptote is positive")
    }

    pub fn noise_db(&self) -> f64 {
        noise_excess_db(self.noise).expect("noise is positive")
    }
}

/// Squeezed variance below which the `β = 0` output is negative at the origin.
pub fn threshold_point(eta: f64, noise: f64) -> Result<PointThreshold> {
    if !(eta > 0.5 && eta <= 1.0) {
        return Err(Error::NoThreshold { eta });
    }
    if !(noise.is_finite() && noise >= 0.5 * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter {
            name: "noise excess",
            value: noise,
            reason: "must be >= 1/2",
        });
    }
    let s = 2.0 * eta - 1.0;
    let disc = 4.0 * noise * noise - 2.0 * noise * s * s;
    assert!(disc >= 0.0, "discriminant negative for N = {noise}");
    // Rationalized smaller root, stable for large N.
    let v_th = noise * s / (2.0 * noise + disc.sqrt());
    Ok(PointThreshold {
        eta,
        noise,
        v_th,
        v_th_inf: s / 4.0,
    })
}

/// Probability that both quadrature outcomes fall inside the square.
pub fn success_prob_square(region: SquareRegion, n_mean: f64) -> f64 {
    let m = 1.0 + n_mean;
    let b = region.a_half / (2.0 * m).sqrt();
    let e = libm::erf(b);
    e * (e - 2.0 * b * (-b * b).exp() / (PI.sqrt() * m))
}

/// Output origin conditioned on the square region, Fock |1⟩ input.
pub fn origin_square_fock1(spec: &NoisyEprSpec, gain: f64, region: SquareRegion) -> f64 {
    let aux = AppendixAux::new(spec, gain, region);
    let AppendixAux {
        q_sigma: q,
        alpha_sigma: alpha,
        delta_sigma: delta,
        ..
    } = aux;
    let a = region.a_half;
    let p_sigma = success_prob_square(region, spec.mean_photons());
    let e = libm::erf(a * q.sqrt());
    let d2 = delta * delta;
    let bracket = (2.0 / alpha + 2.0 * d2 / (alpha * alpha * q) - 1.0) * e
        - 4.0 * d2 * a / (alpha * alpha * (PI * q).sqrt()) * (-q * a * a).exp();
    e / (4.0 * PI * p_sigma * spec.v_sq() * spec.v_an() * alpha * q) * bracket
}

/// Squeezed variance at which the square-region origin changes sign, for fixed
/// noise excess `N`.
pub fn threshold_square(noise: f64, gain: f64, region: SquareRegion) -> Result<f64> {
    let (lo, hi) = SQUARE_VSQ_BRACKET;
    let f = |v_sq: f64| match NoisyEprSpec::from_noise(v_sq, noise) {
        Ok(spec) => origin_square_fock1(&spec, gain, region),
        Err(_) => f64::NAN,
    };
    bisect(f, lo, hi, 1e-10)
}
