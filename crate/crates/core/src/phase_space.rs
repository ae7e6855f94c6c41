//! Phase-space conventions and single-mode Wigner functions.
//!
//! Quadratures obey `[x, p] = i`, so the vacuum has quadrature variance 1/2 and
//! Wigner function `exp(-x² - p²) / π`. Two-mode covariance matrices use the
//! doubled scaling where the vacuum covariance matrix is the identity.
//!
//! Every single-mode state used here belongs to the closed family
//!
//! ```text
//! W(r) = (2 rᵀ M r + c) · exp(-rᵀ Γ⁻¹ r) / (π √det Γ)
//! ```
//!
//! which Gaussian channels map onto itself.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_range, Error, Result};

/// Relative slack allowed on the boundary of the covariance-matrix inequalities.
pub const CM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, p: 0.0 };

    pub fn new(x: f64, p: f64) -> Result<Self> {
        Ok(Self {
            x: check_finite("x", x)?,
            p: check_finite("p", p)?,
        })
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.p)
    }
}

impl From<Vector2<f64>> for PhasePoint {
    fn from(v: Vector2<f64>) -> Self {
        Self { x: v[0], p: v[1] }
    }
}

// ---------------------------------------------------------------------------
// Unit conversions
// ---------------------------------------------------------------------------

/// Squeezed variance in decibels relative to the vacuum variance 1/2.
pub fn squeeze_db(v_sq: f64) -> Result<f64> {
    positive("v_sq", v_sq)?;
    Ok(10.0 * (2.0 * v_sq).log10())
}

pub fn vsq_from_db(db: f64) -> f64 {
    0.5 * 10f64.powf(db / 10.0)
}

/// Noise excess `N = 2 V_sq V_an` in decibels; a pure resource (N = 1/2) is 0 dB.
pub fn noise_excess_db(n: f64) -> Result<f64> {
    positive("noise excess", n)?;
    Ok(10.0 * (2.0 * n).log10())
}

pub fn noise_from_db(db: f64) -> f64 {
    0.5 * 10f64.powf(db / 10.0)
}

pub fn vsq_from_r(r: f64) -> f64 {
    0.5 * (-2.0 * r).exp()
}

pub fn r_from_vsq(v_sq: f64) -> Result<f64> {
    positive("v_sq", v_sq)?;
    Ok(-0.5 * (2.0 * v_sq).ln())
}

pub fn r_from_db(db: f64) -> f64 {
    -0.5 * (db / 10.0 * std::f64::consts::LN_10)
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive",
        })
    }
}

/// Squeezing of the two single-mode squeezed states that make up the shared
/// EPR pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    r: f64,
}

impl SqueezeSpec {
    pub fn new(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: r,
                reason: "squeezing parameter must be finite and non-negative",
            });
        }
        Ok(Self { r })
    }

    /// From a squeezed variance given in dB (must be ≤ 0).
    pub fn from_db(db: f64) -> Result<Self> {
        if !(db.is_finite() && db <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "squeezing dB",
                value: db,
                reason: "must be finite and <= 0",
            });
        }
        Self::new(r_from_db(db).max(0.0))
    }

    pub fn from_vsq(v_sq: f64) -> Result<Self> {
        check_range("v_sq", v_sq, f64::MIN_POSITIVE, 0.5)?;
        Self::new(r_from_vsq(v_sq)?.max(0.0))
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `λ = tanh r`, the two-mode squeezed vacuum amplitude ratio.
    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }

    pub fn v_sq(&self) -> f64 {
        vsq_from_r(self.r)
    }

    pub fn db(&self) -> f64 {
        -20.0 * self.r / std::f64::consts::LN_10
    }
}

// ---------------------------------------------------------------------------
// Single-mode Wigner functions
// ---------------------------------------------------------------------------

/// `(2 rᵀ M r + c) · exp(-rᵀ Γ⁻¹ r) / (π √det Γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyGaussWigner {
    m: Matrix2<f64>,
    c: f64,
    gamma: Matrix2<f64>,
    gamma_inv: Matrix2<f64>,
    gamma_det: f64,
}

impl PolyGaussWigner {
    pub fn new(m: Matrix2<f64>, c: f64, gamma: Matrix2<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) || !gamma.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "matrix entry",
                value: f64::NAN,
                reason: "must be finite",
            });
        }
        check_finite("c", c)?;
        // Only the symmetric part of M contributes to the quadratic form.
        let m = (m + m.transpose()) * 0.5;
        let gamma = (gamma + gamma.transpose()) * 0.5;
        let gamma_det = gamma.determinant();
        if !(gamma[(0, 0)] > 0.0 && gamma_det > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let gamma_inv = gamma.try_inverse().ok_or(Error::NotPositiveDefinite)?;
        Ok(Self {
            m,
            c,
            gamma,
            gamma_inv,
            gamma_det,
        })
    }

    pub fn m(&self) -> &Matrix2<f64> {
        &self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> &Matrix2<f64> {
        &self.gamma
    }

    pub fn gamma_inv(&self) -> &Matrix2<f64> {
        &self.gamma_inv
    }

    pub fn gamma_det(&self) -> f64 {
        self.gamma_det
    }

    pub fn eval(&self, point: PhasePoint) -> f64 {
        let r = point.as_vector();
        let poly = 2.0 * r.dot(&(self.m * r)) + self.c;
        let exponent = r.dot(&(self.gamma_inv * r));
        poly * (-exponent).exp() / (PI * self.gamma_det.sqrt())
    }

    pub fn origin(&self) -> f64 {
        self.c / (PI * self.gamma_det.sqrt())
    }

    /// Closed-form phase-space integral, `tr(M Γ) + c`.
    pub fn total_weight(&self) -> f64 {
        (self.m * self.gamma).trace() + self.c
    }

    /// Standard deviation of the Gaussian envelope along its widest axis.
    pub fn envelope_std(&self) -> f64 {
        let tr = self.gamma.trace();
        let disc = (tr * tr / 4.0 - self.gamma_det).max(0.0).sqrt();
        ((tr / 2.0 + disc) / 2.0).sqrt()
    }
}

/// Fock state |1⟩: `(2 rᵀr − 1) e^{−rᵀr} / π`.
pub fn make_fock1() -> PolyGaussWigner {
    PolyGaussWigner::new(Matrix2::identity(), -1.0, Matrix2::identity())
        .expect("identity covariance is positive definite")
}

/// Vacuum, represented in the same family with `M = 0`, `c = 1`.
pub fn make_vacuum() -> PolyGaussWigner {
    PolyGaussWigner::new(Matrix2::zeros(), 1.0, Matrix2::identity()).expect("identity covariance is positive definite")
}

/// Squeezed single photon `S(t)|1⟩`, with `Γ = diag(e^{−2t}, e^{2t})` and `M = Γ⁻¹`.
pub fn make_squeezed_fock1(t: f64) -> Result<PolyGaussWigner> {
    check_finite("t", t)?;
    let gamma = Matrix2::new((-2.0 * t).exp(), 0.0, 0.0, (2.0 * t).exp());
    let m = Matrix2::new((2.0 * t).exp(), 0.0, 0.0, (-2.0 * t).exp());
    PolyGaussWigner::new(m, -1.0, gamma)
}

/// Squeezing produced by subtracting one photon from a squeezed state through a
/// beam splitter of intensity transmissivity `tau`: `tanh t = tau · tanh s`.
pub fn subtraction_squeeze(tau: f64, s: f64) -> Result<f64> {
    check_range("tau", tau, 0.0, 1.0)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "source squeezing must be finite and non-negative",
        });
    }
    Ok((tau * s.tanh()).atanh())
}

/// Convex combination of polynomial-Gaussian Wigner functions.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMixture {
    terms: Vec<(f64, PolyGaussWigner)>,
}

impl WignerMixture {
    pub fn new(terms: Vec<(f64, PolyGaussWigner)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Degenerate("mixture needs at least one term"));
        }
        for (w, _) in &terms {
            check_range("mixture weight", *w, 0.0, 1.0)?;
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "mixture weights",
                value: total,
                reason: "must sum to 1",
            });
        }
        Ok(Self { terms })
    }

    pub fn pure(state: PolyGaussWigner) -> Self {
        Self {
            terms: vec![(1.0, state)],
        }
    }

    pub fn terms(&self) -> &[(f64, PolyGaussWigner)] {
        &self.terms
    }

    pub fn eval(&self, point: PhasePoint) -> f64 {
        self.terms.iter().map(|(w, t)| w * t.eval(point)).sum()
    }

    pub fn origin(&self) -> f64 {
        self.terms.iter().map(|(w, t)| w * t.origin()).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|(w, t)| w * t.total_weight()).sum()
    }

    pub fn envelope_std(&self) -> f64 {
        self.terms.iter().map(|(_, t)| t.envelope_std()).fold(0.0, f64::max)
    }
}

impl From<PolyGaussWigner> for WignerMixture {
    fn from(state: PolyGaussWigner) -> Self {
        Self::pure(state)
    }
}

/// `η|1⟩⟨1| + (1 − η)|0⟩⟨0|`, the single photon after a lossy channel.
pub fn make_attenuated(eta: f64) -> Result<WignerMixture> {
    check_range("eta", eta, 0.0, 1.0)?;
    WignerMixture::new(vec![(eta, make_fock1()), (1.0 - eta, make_vacuum())])
}

// ---------------------------------------------------------------------------
// Noisy EPR resource
// ---------------------------------------------------------------------------

/// Shared entangled state built from two impure squeezed states with squeezed
/// variance `v_sq` and anti-squeezed variance `v_an`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyEprSpec {
    v_sq: f64,
    v_an: f64,
}

impl NoisyEprSpec {
    pub fn new(v_sq: f64, v_an: f64) -> Result<Self> {
        positive("v_sq", v_sq)?;
        positive("v_an", v_an)?;
        if v_sq * v_an < 0.25 * (1.0 - CM_TOLERANCE) {
            return Err(Error::Unphysical("V_sq * V_an < 1/4 violates the uncertainty relation"));
        }
        Ok(Self { v_sq, v_an })
    }

    /// `V_an = N / (2 V_sq)`.
    pub fn from_noise(v_sq: f64, noise: f64) -> Result<Self> {
        positive("v_sq", v_sq)?;
        if !(noise.is_finite() && noise >= 0.5 * (1.0 - CM_TOLERANCE)) {
            return Err(Error::InvalidParameter {
                name: "noise excess",
                value: noise,
                reason: "must be >= 1/2",
            });
        }
        Self::new(v_sq, noise / (2.0 * v_sq))
    }

    pub fn from_db(vsq_db: f64, noise_db: f64) -> Result<Self> {
        Self::from_noise(vsq_from_db(vsq_db), noise_from_db(noise_db))
    }

    pub fn pure(v_sq: f64) -> Result<Self> {
        Self::from_noise(v_sq, 0.5)
    }

    pub fn v_sq(&self) -> f64 {
        self.v_sq
    }

    pub fn v_an(&self) -> f64 {
        self.v_an
    }

    pub fn v(&self) -> f64 {
        self.v_an + self.v_sq
    }

    pub fn c(&self) -> f64 {
        self.v_an - self.v_sq
    }

    /// Mean thermal photon number of either reduced mode.
    pub fn mean_photons(&self) -> f64 {
        (self.v() - 1.0) / 2.0
    }

    /// `N = 2 V_sq V_an`.
    pub fn noise(&self) -> f64 {
        2.0 * self.v_sq * self.v_an
    }

    /// `4 V_sq V_an`, equal to `√det γ_AB`.
    pub fn four_vsq_van(&self) -> f64 {
        4.0 * self.v_sq * self.v_an
    }

    pub fn is_pure(&self) -> bool {
        (self.noise() - 0.5).abs() <= 1e-12
    }

    pub fn covariance(&self) -> TwoModeCM {
        TwoModeCM::epr(self.v(), self.c())
    }
}

/// Two-mode covariance matrix in the scaling where the vacuum is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCM {
    gamma: Matrix4<f64>,
}

impl TwoModeCM {
    pub fn new(gamma: Matrix4<f64>) -> Result<Self> {
        if !gamma.iter().all(|v| v.is_finite()) {
            return Err(Error::Unphysical("non-finite covariance entry"));
        }
        if (gamma - gamma.transpose()).abs().max() > 1e-12 * gamma.abs().max().max(1.0) {
            return Err(Error::Unphysical("covariance matrix must be symmetric"));
        }
        Ok(Self { gamma })
    }

    /// Blocks `A = B = V·I`, `D = C·σ_z`.
    pub fn epr(v: f64, c: f64) -> Self {
        #[rustfmt::skip]
        let gamma = Matrix4::new(
            v,   0.0, c,   0.0,
            0.0, v,   0.0, -c,
            c,   0.0, v,   0.0,
            0.0, -c,  0.0, v,
        );
        Self { gamma }
    }

    pub fn vacuum() -> Self {
        Self {
            gamma: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.gamma
    }

    pub fn block_a(&self) -> Matrix2<f64> {
        self.gamma.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn block_b(&self) -> Matrix2<f64> {
        self.gamma.fixed_view::<2, 2>(2, 2).into_owned()
    }

    pub fn block_d(&self) -> Matrix2<f64> {
        self.gamma.fixed_view::<2, 2>(0, 2).into_owned()
    }
}

fn is_positive_definite(m: &Matrix2<f64>) -> bool {
    m[(0, 0)] > 0.0 && m.determinant() > 0.0
}

/// Necessary and sufficient conditions for a two-mode covariance matrix:
/// `A, B > 0`, `det A + det B + 2 det D ≤ 1 + det γ` and
/// `2 √(det A det B) + (det D)² ≤ det γ + det A det B`.
pub fn cm_is_physical(cm: &TwoModeCM) -> bool {
    let (a, b, d) = (cm.block_a(), cm.block_b(), cm.block_d());
    if !(is_positive_definite(&a) && is_positive_definite(&b)) {
        return false;
    }
    let (det_a, det_b, det_d) = (a.determinant(), b.determinant(), d.determinant());
    let det_g = cm.matrix().determinant();

    let lhs1 = det_a + det_b + 2.0 * det_d;
    let rhs1 = 1.0 + det_g;
    let lhs2 = 2.0 * (det_a * det_b).sqrt() + det_d * det_d;
    let rhs2 = det_g + det_a * det_b;

    // The 4×4 determinant carries rounding of order eps · max|γ_ij|², so the
    // slack scales with that as well as with the compared terms.
    let entry2 = cm.matrix().amax().powi(2);
    let slack = |lhs: f64, rhs: f64| CM_TOLERANCE * lhs.abs().max(rhs.abs()).max(entry2).max(1.0);
    lhs1 <= rhs1 + slack(lhs1, rhs1) && lhs2 <= rhs2 + slack(lhs2, rhs2)
}
