//! Nonunity-gain teleportation as a single-mode Gaussian CP map `(S, Q)`.
//!
//! On Wigner functions the map acts through the Gaussian kernel
//! `W_χ(r_in, r_out) = exp(−Δrᵀ Q⁻¹ Δr) / (2π² √det Q)` with
//! `Δr = r_out − S Λ r_in`. For the polynomial-Gaussian family the integral
//! has a closed form, which [`apply_map`] implements.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::phase_space::{PolyGaussWigner, SqueezeSpec, WignerMixture};

/// Tolerance on the smallest eigenvalue in the complete-positivity test.
pub const CP_TOLERANCE: f64 = 1e-12;

/// `Λ = diag(1, −1)`.
pub fn lambda_matrix() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// Symplectic form `J = [[0, 1], [−1, 0]]`.
pub fn symplectic_j() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Protocol settings: shared squeezing, Alice's beam splitter and Bob's gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportParams {
    pub squeeze: SqueezeSpec,
    /// Intensity transmissivity `T`; the reflectivity is `R = 1 − T`.
    pub transmissivity: f64,
    pub g_x: f64,
    pub g_p: f64,
}

impl TeleportParams {
    pub fn new(squeeze: SqueezeSpec, transmissivity: f64, g_x: f64, g_p: f64) -> Result<Self> {
        if !(transmissivity > 0.0 && transmissivity < 1.0) {
            return Err(Error::InvalidParameter {
                name: "transmissivity",
                value: transmissivity,
                reason: "must lie strictly inside (0, 1)",
            });
        }
        for (name, g) in [("g_x", g_x), ("g_p", g_p)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: g,
                    reason: "gain must be finite and non-negative",
                });
            }
        }
        Ok(Self {
            squeeze,
            transmissivity,
            g_x,
            g_p,
        })
    }

    /// Balanced beam splitter with `g_x = g_p = √2 G`.
    pub fn symmetric(squeeze: SqueezeSpec, gain: f64) -> Result<Self> {
        Self::new(squeeze, 0.5, SQRT_2 * gain, SQRT_2 * gain)
    }

    pub fn unity(squeeze: SqueezeSpec) -> Self {
        Self::symmetric(squeeze, 1.0).expect("unity gain is valid")
    }

    pub fn reflectivity(&self) -> f64 {
        1.0 - self.transmissivity
    }

    /// `G = g / √2` when the protocol is symmetric.
    pub fn normalized_gain(&self) -> Option<f64> {
        let symmetric = (self.transmissivity - 0.5).abs() < 1e-15 && self.g_x == self.g_p;
        symmetric.then_some(self.g_x * FRAC_1_SQRT_2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMap {
    s: Matrix2<f64>,
    q: Matrix2<f64>,
}

impl GaussianMap {
    pub fn new(s: Matrix2<f64>, q: Matrix2<f64>) -> Result<Self> {
        if !s.iter().chain(q.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "map entry",
                value: f64::NAN,
                reason: "must be finite",
            });
        }
        if (q[(0, 1)] - q[(1, 0)]).abs() > 1e-12 * q.abs().max().max(1.0) {
            return Err(Error::InvalidParameter {
                name: "Q",
                value: q[(0, 1)] - q[(1, 0)],
                reason: "must be symmetric",
            });
        }
        let q = (q + q.transpose()) * 0.5;
        let tol = CP_TOLERANCE * q.abs().max().max(1.0);
        if q[(0, 0)] < -tol || q[(1, 1)] < -tol || q.determinant() < -tol {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { s, q })
    }

    pub fn s(&self) -> &Matrix2<f64> {
        &self.s
    }

    pub fn q(&self) -> &Matrix2<f64> {
        &self.q
    }

    /// `S Γ Sᵀ + Q`, the output covariance for input covariance `Γ`.
    pub fn output_covariance(&self, gamma: &Matrix2<f64>) -> Matrix2<f64> {
        self.s * gamma * self.s.transpose() + self.q
    }

    /// Smallest eigenvalue of the Hermitian matrix `Q + iJ − i S J Sᵀ`.
    pub fn cp_margin(&self) -> f64 {
        let j = symplectic_j();
        let k = j - self.s * j * self.s.transpose();
        let (a, d) = (self.q[(0, 0)], self.q[(1, 1)]);
        let off_re = self.q[(0, 1)];
        let off_im = k[(0, 1)];
        let half_gap = (((a - d) / 2.0).powi(2) + off_re * off_re + off_im * off_im).sqrt();
        (a + d) / 2.0 - half_gap
    }
}

pub fn build_map(params: &TeleportParams) -> GaussianMap {
    let r2 = 2.0 * params.squeeze.r();
    let (ch, sh) = (r2.cosh(), r2.sinh());
    let (t, r) = (params.transmissivity, params.reflectivity());
    let (gx, gp) = (params.g_x, params.g_p);

    let s = Matrix2::new(gx * r.sqrt(), 0.0, 0.0, gp * t.sqrt());
    let q_x = ch + gx * gx * t * ch - 2.0 * gx * t.sqrt() * sh;
    let q_p = ch + gp * gp * r * ch - 2.0 * gp * r.sqrt() * sh;
    GaussianMap {
        s,
        q: Matrix2::new(q_x, 0.0, 0.0, q_p),
    }
}

/// `Q + iJ − i S J Sᵀ ⪰ 0`, checked through the Hermitian eigenvalues.
pub fn is_completely_positive(map: &GaussianMap) -> bool {
    map.cp_margin() >= -CP_TOLERANCE * map.q.abs().max().max(1.0)
}

/// Closed-form image of `(2 rᵀ M r + c) N_Γ(r)` under the map.
///
/// With `Γ̃ = S Γ Sᵀ + Q` the output stays in the family with
/// `M' = Γ̃⁻¹ S Γ M Γ Sᵀ Γ̃⁻¹` and `c' = c + tr[M (Γ − Γ Sᵀ Γ̃⁻¹ S Γ)]`.
/// For `M = Γ⁻¹, c = −1` this is `M' = Γ̃⁻¹ S Γ Sᵀ Γ̃⁻¹`,
/// `c' = (det Q − (det S)²) / det Γ̃`.
pub fn apply_map(map: &GaussianMap, w: &PolyGaussWigner) -> Result<PolyGaussWigner> {
    let gamma = w.gamma();
    let out_cov = map.output_covariance(gamma);
    if out_cov.determinant() <= 0.0 {
        return Err(Error::SingularCovariance);
    }
    let out_inv = out_cov.try_inverse().ok_or(Error::SingularCovariance)?;
    let transfer = out_inv * map.s * gamma;
    let m_out = transfer * w.m() * transfer.transpose();
    let shrink = gamma - gamma * map.s.transpose() * out_inv * map.s * gamma;
    let c_out = w.c() + (w.m() * shrink).trace();
    PolyGaussWigner::new(m_out, c_out, out_cov).map_err(|_| Error::SingularCovariance)
}

/// Mixtures map term by term.
pub fn apply_map_mixture(map: &GaussianMap, w: &WignerMixture) -> Result<WignerMixture> {
    let terms = w
        .terms()
        .iter()
        .map(|(weight, term)| apply_map(map, term).map(|out| (*weight, out)))
        .collect::<Result<Vec<_>>>()?;
    WignerMixture::new(terms)
}

/// Output Wigner function of |1⟩ at the origin:
/// `(det Q − (det S)²) / (π [det(S Sᵀ + Q)]^{3/2})`.
pub fn origin_fock1(map: &GaussianMap) -> f64 {
    let num = map.q.determinant() - map.s.determinant().powi(2);
    num / (PI * map.output_covariance(&Matrix2::identity()).determinant().powf(1.5))
}

/// Output origin for the squeezed photon `S(t)|1⟩`, with `γ = diag(e^{−2t}, e^{2t})`.
pub fn origin_squeezed_fock1(map: &GaussianMap, t: f64) -> f64 {
    let gamma = Matrix2::new((-2.0 * t).exp(), 0.0, 0.0, (2.0 * t).exp());
    let num = map.q.determinant() - map.s.determinant().powi(2);
    num / (PI * map.output_covariance(&gamma).determinant().powf(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputState {
    Fock1,
    Attenuated { eta: f64 },
}

impl InputState {
    pub fn eta(&self) -> f64 {
        match *self {
            InputState::Fock1 => 1.0,
            InputState::Attenuated { eta } => eta,
        }
    }
}

/// `α(G) = cosh 2r (1 + G²) − 2G sinh 2r`, the added noise of the symmetric protocol.
pub fn alpha(r: f64, gain: f64) -> f64 {
    (2.0 * r).cosh() * (1.0 + gain * gain) - 2.0 * gain * (2.0 * r).sinh()
}

/// Symmetric protocol with normalized gain `G`:
/// `η (α − G²)/(π (α + G²)²) + (1 − η)/(π (α + G²))`.
pub fn origin_symmetric(r: f64, gain: f64, input: InputState) -> f64 {
    let a = alpha(r, gain);
    let g2 = gain * gain;
    let eta = input.eta();
    (eta * (a - g2) / (a + g2).powi(2) + (1.0 - eta) / (a + g2)) / PI
}

/// Unity gain: `(2e^{−2r} − 1) / (π (2e^{−2r} + 1)²)`.
pub fn origin_unity(r: f64) -> f64 {
    let e = 2.0 * (-2.0 * r).exp();
    (e - 1.0) / (PI * (e + 1.0).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalThresholds {
    /// Optimized gain: `artanh √((1 − η)/η)`.
    pub r_gain: f64,
    /// Unity gain: `ln √(2 / (2η − 1))`.
    pub r_unity: f64,
}

impl UnconditionalThresholds {
    pub fn v_gain(&self) -> f64 {
        crate::phase_space::vsq_from_r(self.r_gain)
    }

    pub fn v_unity(&self) -> f64 {
        crate::phase_space::vsq_from_r(self.r_unity)
    }

    pub fn db_gain(&self) -> f64 {
        -20.0 * self.r_gain / std::f64::consts::LN_10
    }

    pub fn db_unity(&self) -> f64 {
        -20.0 * self.r_unity / std::f64::consts::LN_10
    }
}

/// Squeezing above which the attenuated photon keeps a negative origin value.
pub fn threshold_unconditional(eta: f64) -> Result<UnconditionalThresholds> {
    check_range("eta", eta, 0.0, 1.0)?;
    if eta <= 0.5 {
        return Err(Error::NoThreshold { eta });
    }
    Ok(UnconditionalThresholds {
        r_gain: ((1.0 - eta) / eta).sqrt().atanh(),
        r_unity: (2.0 / (2.0 * eta - 1.0)).sqrt().ln(),
    })
}

/// Protocol that undoes the input squeezing `t` while applying overall gain `G`:
/// `T/R = e^{−2t}`, `g_x = e^t G/√R`, `g_p = e^{−t} G/√T`.
pub fn compensating_params(squeeze: SqueezeSpec, t: f64, gain: f64) -> Result<TeleportParams> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must be finite",
        });
    }
    let ratio = (-2.0 * t).exp();
    let transmissivity = ratio / (1.0 + ratio);
    let reflectivity = 1.0 / (1.0 + ratio);
    TeleportParams::new(
        squeeze,
        transmissivity,
        t.exp() * gain / reflectivity.sqrt(),
        (-t).exp() * gain / transmissivity.sqrt(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{make_attenuated, make_fock1, make_squeezed_fock1, PhasePoint};
    use approx::assert_relative_eq;

    fn sq(r: f64) -> SqueezeSpec {
        SqueezeSpec::new(r).unwrap()
    }

    #[test]
    fn unity_gain_map_is_identity_plus_noise() {
        for r in [0.0, 0.3, 1.7] {
            let map = build_map(&TeleportParams::unity(sq(r)));
            assert!((map.s() - Matrix2::identity()).abs().max() < 1e-15);
            assert!((map.q() - Matrix2::identity() * 2.0 * (-2.0 * r).exp()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn zero_gain_map() {
        let r = 0.4;
        let map = build_map(&TeleportParams::symmetric(sq(r), 0.0).unwrap());
        assert_eq!(*map.s(), Matrix2::zeros());
        assert_relative_eq!(map.q()[(0, 0)], (2.0 * r).cosh());
        assert_relative_eq!(origin_fock1(&map), 1.0 / (PI * (2.0 * r).cosh()), epsilon = 1e-15);
    }

    #[test]
    fn cp_examples() {
        assert!(is_completely_positive(&build_map(&TeleportParams::unity(sq(1.0)))));
        let boundary = GaussianMap::new(Matrix2::identity(), Matrix2::identity() * 2.0 * (-2.0f64).exp()).unwrap();
        assert!(is_completely_positive(&boundary));
        assert_relative_eq!(boundary.cp_margin(), 2.0 * (-2.0f64).exp(), epsilon = 1e-15);
        // Amplification by 2 with no added noise violates the uncertainty bound.
        let amp = GaussianMap::new(Matrix2::identity() * 2.0, Matrix2::zeros()).unwrap();
        assert!(!is_completely_positive(&amp));
        // The noiseless identity channel sits exactly on the boundary.
        let id = GaussianMap::new(Matrix2::identity(), Matrix2::zeros()).unwrap();
        assert!(is_completely_positive(&id));
        assert!(GaussianMap::new(Matrix2::identity(), Matrix2::new(-1.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn apply_map_matches_closed_origin_forms() {
        let fock = make_fock1();
        for (r, gain) in [(0.2, 1.4), (0.7, 0.9), (1.2, 1.0)] {
            let map = build_map(&TeleportParams::symmetric(sq(r), gain).unwrap());
            let out = apply_map(&map, &fock).unwrap();
            assert_relative_eq!(out.origin(), origin_fock1(&map), epsilon = 1e-12);
            assert_relative_eq!(
                out.origin(),
                origin_symmetric(r, gain, InputState::Fock1),
                epsilon = 1e-12
            );
            assert_relative_eq!(out.total_weight(), 1.0, epsilon = 1e-12);
        }
        let map = build_map(&TeleportParams::unity(sq(0.9)));
        assert_relative_eq!(
            apply_map(&map, &fock).unwrap().origin(),
            origin_unity(0.9),
            epsilon = 1e-12
        );
    }

    #[test]
    fn squeezed_output_matches_z_form() {
        // Output quadratic form Z = Γ̃⁻¹ S γ Sᵀ Γ̃⁻¹ and constant (det Q − det S²)/det Γ̃.
        let t = 0.5 * 2f64.ln();
        let params = TeleportParams::new(sq(0.6), 0.3, 1.1, 1.7).unwrap();
        let map = build_map(&params);
        let input = make_squeezed_fock1(t).unwrap();
        let out = apply_map(&map, &input).unwrap();
        let g = input.gamma();
        let gt = map.s() * g * map.s().transpose() + map.q();
        let gti = gt.try_inverse().unwrap();
        let z = gti * map.s() * g * map.s().transpose() * gti;
        assert!((out.m() - z).abs().max() < 1e-12);
        let c = (map.q().determinant() - map.s().determinant().powi(2)) / gt.determinant();
        assert_relative_eq!(out.c(), c, epsilon = 1e-12);
        assert_relative_eq!(out.origin(), origin_squeezed_fock1(&map, t), epsilon = 1e-12);
    }

    #[test]
    fn vacuum_branch_is_gaussian() {
        let r = 0.8;
        let gain = 0.95;
        let map = build_map(&TeleportParams::symmetric(sq(r), gain).unwrap());
        let out = apply_map_mixture(&map, &make_attenuated(0.6304).unwrap()).unwrap();
        assert_eq!(out.terms()[1].1.m(), &Matrix2::zeros());
        assert_relative_eq!(out.terms()[1].1.c(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            out.origin(),
            origin_symmetric(r, gain, InputState::Attenuated { eta: 0.6304 }),
            epsilon = 1e-12
        );
    }

    #[test]
    fn unity_origin_values() {
        let r3 = crate::phase_space::r_from_db(-3.0);
        assert!((origin_unity(r3) - 0.0002).abs() < 5e-5);
        assert!((origin_unity(crate::phase_space::r_from_db(-10.0)) - -0.1768).abs() < 5e-4);
        assert!((origin_unity(40.0) + 1.0 / PI).abs() < 1e-12);
        // Exact zero at e^{-2r} = 1/2.
        assert!(origin_unity(0.5 * 2f64.ln()).abs() < 1e-16);
        assert!(origin_symmetric(0.5 * 2f64.ln(), 1.0, InputState::Fock1).abs() < 1e-16);
    }

    #[test]
    fn symmetric_reduces_at_eta_one() {
        for (r, g) in [(0.3, 1.2), (1.0, 0.97)] {
            let fock = origin_symmetric(r, g, InputState::Fock1);
            assert_eq!(origin_symmetric(r, g, InputState::Attenuated { eta: 1.0 }), fock);
            let a = alpha(r, g);
            assert_relative_eq!(fock, (a - g * g) / (PI * (a + g * g).powi(2)));
        }
    }

    #[test]
    fn unconditional_thresholds() {
        let th = threshold_unconditional(0.6304).unwrap();
        assert!((th.r_gain - 1.0098).abs() < 1e-4);
        assert!((th.db_gain() - -8.77).abs() < 0.01);
        let one = threshold_unconditional(1.0).unwrap();
        assert_eq!(one.r_gain, 0.0);
        assert_relative_eq!(one.r_unity, 2f64.sqrt().ln());
        assert!((one.db_unity() - -3.01).abs() < 0.01);
        assert!(((one.db_gain() - one.db_unity()) - 3.01).abs() < 0.01);
        assert_eq!(threshold_unconditional(0.5), Err(Error::NoThreshold { eta: 0.5 }));
        // The origin value changes sign exactly at the thresholds.
        let eta = InputState::Attenuated { eta: 0.6304 };
        let g = 1.0;
        assert!(origin_symmetric(th.r_unity, g, eta).abs() < 1e-15);
    }

    #[test]
    fn compensating_protocol() {
        let p = compensating_params(sq(0.4), 0.0, 1.1).unwrap();
        assert_relative_eq!(p.transmissivity, 0.5);
        assert_relative_eq!(p.g_x, 1.1 * SQRT_2, epsilon = 1e-14);
        assert_relative_eq!(p.g_p, 1.1 * SQRT_2, epsilon = 1e-14);

        let t = 0.5 * 2f64.ln();
        let p = compensating_params(sq(0.4), t, 1.1).unwrap();
        assert_relative_eq!(p.transmissivity, 1.0 / 3.0, epsilon = 1e-15);
        let map = build_map(&p);
        let gamma = make_squeezed_fock1(t).unwrap().gamma().to_owned();
        assert!(
            (map.s() - Matrix2::new(1.1 * t.exp(), 0.0, 0.0, 1.1 * (-t).exp()))
                .abs()
                .max()
                < 1e-13
        );
        let sgs = map.s() * gamma * map.s().transpose();
        assert!((sgs - Matrix2::identity() * 1.21).abs().max() < 1e-13);
        assert!((map.q() - Matrix2::identity() * alpha(0.4, 1.1)).abs().max() < 1e-13);
    }

    #[test]
    fn output_eval_off_origin_is_finite() {
        let map = build_map(&TeleportParams::unity(sq(0.5)));
        let out = apply_map(&map, &make_fock1()).unwrap();
        let v = out.eval(PhasePoint::new(0.4, -0.3).unwrap());
        assert!(v.is_finite());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn built_maps_are_cp(r in 0.0f64..3.0, t in 0.01f64..0.99, gx in 0.0f64..4.0, gp in 0.0f64..4.0) {
                let map = build_map(&TeleportParams::new(sq(r), t, gx, gp).unwrap());
                prop_assert!(is_completely_positive(&map));
            }

            #[test]
            fn mixture_origin_is_linear(r in 0.0f64..2.5, g in 0.0f64..2.0, eta in 0.0f64..=1.0) {
                let map = build_map(&TeleportParams::symmetric(sq(r), g).unwrap());
                let f = apply_map(&map, &make_fock1()).unwrap().origin();
                let v = apply_map(&map, &crate::phase_space::make_vacuum()).unwrap().origin();
                let mix = apply_map_mixture(&map, &make_attenuated(eta).unwrap()).unwrap().origin();
                prop_assert!((mix - (eta * f + (1.0 - eta) * v)).abs() < 1e-14);
            }

            #[test]
            fn closed_origin_equals_applied_origin(r in 0.0f64..2.5, t in 0.05f64..0.95, gx in 0.0f64..3.0, gp in 0.0f64..3.0) {
                let map = build_map(&TeleportParams::new(sq(r), t, gx, gp).unwrap());
                let out = apply_map(&map, &make_fock1()).unwrap();
                prop_assert!((out.origin() - origin_fock1(&map)).abs() < 1e-12);
                prop_assert!((out.total_weight() - 1.0).abs() < 1e-9);
            }

            #[test]
            fn compensated_squeezed_photon_matches_symmetric(r in 0.05f64..2.0, t in -1.0f64..1.0, g in 0.1f64..2.0) {
                let map = build_map(&compensating_params(sq(r), t, g).unwrap());
                let via = apply_map(&map, &make_squeezed_fock1(t).unwrap()).unwrap().origin();
                prop_assert!((via - origin_symmetric(r, g, InputState::Fock1)).abs() < 1e-12);
            }
        }
    }
}
