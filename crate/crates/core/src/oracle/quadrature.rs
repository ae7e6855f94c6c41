//! Brute-force phase-space integration: the Gaussian-kernel form of a channel,
//! and the overlap integrals of the noisy resource.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Matrix4, Vector2, Vector4};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{lambda_matrix, GaussianMap};
use crate::error::{Error, Result};
use crate::noisy::SquareRegion;
use crate::numeric::CompensatedSum;
use crate::phase_space::{make_attenuated, NoisyEprSpec, PhasePoint, WignerMixture};

/// Nodes per Gauss–Legendre panel.
pub const GL_ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    /// Half-width of the square integration box.
    pub half_width: f64,
    /// Panels per axis on the first pass; doubled until converged.
    pub initial_panels: usize,
    pub max_panels: usize,
    /// Absolute change between successive refinements that counts as converged.
    pub tolerance: f64,
}

impl QuadratureGrid {
    pub fn new(half_width: f64, tolerance: f64) -> Self {
        Self {
            half_width,
            initial_panels: 2,
            max_panels: 64,
            tolerance,
        }
    }
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Composite Gauss–Legendre nodes and weights on `[lo, hi]`.
fn composite_nodes(lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = gl_rule();
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let mid = lo + (k as f64 + 0.5) * h;
            x.iter().zip(w).map(move |(xi, wi)| (mid + 0.5 * h * xi, 0.5 * h * wi))
        })
        .collect()
}

/// Tensor-product rule on a rectangle with a fixed panel count.
pub fn integrate_2d_fixed<F>(f: &F, x_range: (f64, f64), y_range: (f64, f64), panels: usize) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let xs = composite_nodes(x_range.0, x_range.1, panels);
    let ys = composite_nodes(y_range.0, y_range.1, panels);
    // Rows are summed in parallel but reduced in index order, so the result is
    // independent of scheduling.
    let rows: Vec<f64> = xs
        .par_iter()
        .map(|&(x, wx)| {
            let row: CompensatedSum = ys.iter().map(|&(y, wy)| wy * f(x, y)).collect();
            wx * row.value()
        })
        .collect();
    rows.into_iter().collect::<CompensatedSum>().value()
}

/// Panel doubling on `[−L, L]²` until successive results differ by less than
/// the grid tolerance.
pub fn integrate_2d<F>(f: F, grid: &QuadratureGrid) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let l = grid.half_width;
    let mut panels = grid.initial_panels.max(1);
    let mut last = integrate_2d_fixed(&f, (-l, l), (-l, l), panels);
    let mut change = f64::INFINITY;
    while panels < grid.max_panels {
        panels *= 2;
        let next = integrate_2d_fixed(&f, (-l, l), (-l, l), panels);
        change = (next - last).abs();
        last = next;
        if change < grid.tolerance {
            return Ok(last);
        }
    }
    Err(Error::NonConvergence {
        last_change: change,
        tolerance: grid.tolerance,
    })
}

/// Box half-width covering ten envelope standard deviations.
pub fn default_half_width(state: &WignerMixture) -> f64 {
    10.0 * state.envelope_std()
}

/// `W_out(r_out) = 2π ∫ W_χ(r_in, r_out) W_in(Λ r_in) dr_in`, with the two-mode kernel
/// `W_χ = exp(−Δᵀ Q⁻¹ Δ) / (2π² √det Q)` and `Δ = r_out − S Λ r_in`.
pub fn output_via_quadrature(map: &GaussianMap, w_in: &WignerMixture, r_out: PhasePoint, tol: f64) -> Result<f64> {
    let q = *map.q();
    let det_q = q.determinant();
    let q_inv = q
        .try_inverse()
        .filter(|_| det_q > 0.0)
        .ok_or(Error::SingularCovariance)?;
    let s_lambda = map.s() * lambda_matrix();
    let lambda = lambda_matrix();
    let out = r_out.as_vector();
    let norm = 2.0 * PI / (2.0 * PI * PI * det_q.sqrt());
    let kernel = |x: f64, p: f64| {
        let r_in = Vector2::new(x, p);
        let delta = out - s_lambda * r_in;
        let w = w_in.eval(PhasePoint::from(lambda * r_in));
        norm * (-delta.dot(&(q_inv * delta))).exp() * w
    };
    integrate_2d(kernel, &QuadratureGrid::new(default_half_width(w_in), tol))
}

pub fn origin_via_quadrature(map: &GaussianMap, w_in: &WignerMixture, tol: f64) -> Result<f64> {
    output_via_quadrature(map, w_in, PhasePoint::ORIGIN, tol)
}

/// Phase-space integral of a Wigner function.
pub fn total_weight_via_quadrature(w: &WignerMixture, tol: f64) -> Result<f64> {
    integrate_2d(
        |x, p| w.eval(PhasePoint { x, p }),
        &QuadratureGrid::new(default_half_width(w), tol),
    )
}

/// Inverse of the two-mode covariance built from two impure squeezers, ordered
/// `(x_A, p_A, x_B, p_B)`.
fn epr_inverse(spec: &NoisyEprSpec) -> Result<(Matrix4<f64>, f64)> {
    let cm = spec.covariance();
    let g = *cm.matrix();
    let inv = g.try_inverse().ok_or(Error::SingularCovariance)?;
    Ok((inv, g.determinant().sqrt()))
}

/// Unnormalized origin value and outcome density of the conditional output at one
/// quadrature outcome `(x̄_u, p̄_v)`, for gain `G`:
/// `W̃(0) = 2π ∫ W_AB(ξ_A − ξ̄_A, −ξ̄_B) W_in(ξ_A) dξ_A` and
/// `P = 2π ∫ W_A(ξ_A − ξ̄_A) W_in(ξ_A) dξ_A`, with `ξ̄_A = (x̄_u, −p̄_v)`, `ξ̄_B = G(x̄_u, p̄_v)`.
fn noisy_outcome(
    spec: &NoisyEprSpec,
    input: &WignerMixture,
    gain: f64,
    outcome: (f64, f64),
    grid: &QuadratureGrid,
) -> Result<(f64, f64)> {
    let (inv, sqrt_det) = epr_inverse(spec)?;
    let v = spec.v();
    let (xu, pv) = outcome;
    let xi_a_bar = Vector2::new(xu, -pv);
    let xi_b = Vector2::new(-gain * xu, -gain * pv);
    let w_ab_norm = 1.0 / (PI * PI * sqrt_det);
    let origin = integrate_2d(
        |x, p| {
            let d = Vector2::new(x, p) - xi_a_bar;
            let xi = Vector4::new(d[0], d[1], xi_b[0], xi_b[1]);
            2.0 * PI * w_ab_norm * (-xi.dot(&(inv * xi))).exp() * input.eval(PhasePoint { x, p })
        },
        grid,
    )?;
    let density = integrate_2d(
        |x, p| {
            let d = Vector2::new(x, p) - xi_a_bar;
            2.0 * PI * (-d.norm_squared() / v).exp() / (PI * v) * input.eval(PhasePoint { x, p })
        },
        grid,
    )?;
    Ok((origin, density))
}

fn noisy_grid(spec: &NoisyEprSpec, input: &WignerMixture, tol: f64) -> QuadratureGrid {
    // Both the input and the thermal marginal bound the integrand.
    QuadratureGrid::new(
        default_half_width(input).min(10.0 * (spec.v() / 2.0).sqrt().max(1.0)),
        tol,
    )
}

/// Origin of the output conditioned on the single outcome `β = 0`.
pub fn noisy_point_via_quadrature(spec: &NoisyEprSpec, eta: f64, tol: f64) -> Result<f64> {
    let input = make_attenuated(eta)?;
    let grid = noisy_grid(spec, &input, tol);
    let (origin, density) = noisy_outcome(spec, &input, 1.0, (0.0, 0.0), &grid)?;
    Ok(origin / density)
}

/// Square-region version: the outcome plane is integrated with a fixed tensor
/// Gauss–Legendre rule of `outer_nodes²` points, each point an inner 2-D integral.
/// Returns `(P_Σ, W_Σ(0))`.
pub fn noisy_square_via_quadrature(
    spec: &NoisyEprSpec,
    gain: f64,
    region: SquareRegion,
    outer_nodes: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    let input = make_attenuated(1.0)?;
    let grid = noisy_grid(spec, &input, tol);
    let a = region.half_side();
    let (x, w) = gauss_legendre(outer_nodes);
    let pts: Vec<(f64, f64, f64)> = x
        .iter()
        .zip(&w)
        .flat_map(|(xi, wi)| x.iter().zip(&w).map(move |(yj, wj)| (a * xi, a * yj, a * a * wi * wj)))
        .collect();
    let vals = pts
        .iter()
        .map(|&(xu, pv, wt)| noisy_outcome(spec, &input, gain, (xu, pv), &grid).map(|(o, d)| (wt * o, wt * d)))
        .collect::<Result<Vec<_>>>()?;
    let num: CompensatedSum = vals.iter().map(|v| v.0).collect();
    let den: CompensatedSum = vals.iter().map(|v| v.1).collect();
    // `d²β/π = dx̄ dp̄ / (2π)`.
    let p_sigma = den.value() / (2.0 * PI);
    Ok((p_sigma, num.value() / den.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_map, compensating_params, origin_fock1, origin_squeezed_fock1, TeleportParams};
    use crate::noisy::{
        origin_point_attenuated, origin_point_fock1, origin_square_fock1, success_prob_square, threshold_point,
    };
    use crate::phase_space::{make_fock1, make_squeezed_fock1, noise_from_db, r_from_db, SqueezeSpec};
    use nalgebra::Matrix2;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_ORDER);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m38: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert!((m38 - 2.0 / 39.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_integral() {
        let grid = QuadratureGrid::new(12.0, 1e-13);
        let v = integrate_2d(|x, y| (-(x * x + 2.0 * y * y)).exp(), &grid).unwrap();
        assert!((v - PI / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let grid = QuadratureGrid {
            half_width: 1.0,
            initial_panels: 1,
            max_panels: 2,
            tolerance: 1e-15,
        };
        let err = integrate_2d(|x, y| (1e4 * x * y).sin().abs(), &grid).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    fn map(db: f64, g: f64) -> GaussianMap {
        build_map(&TeleportParams::symmetric(SqueezeSpec::from_db(db).unwrap(), g).unwrap())
    }

    #[test]
    fn unity_gain_boundary() {
        let m = map(-10.0 * 2f64.log10(), 1.0);
        let w = origin_via_quadrature(&m, &make_fock1().into(), 1e-12).unwrap();
        assert!(w.abs() < 1e-6, "{w}");
    }

    #[test]
    fn matches_closed_form_fock1() {
        for (db, g) in [(-3.0, 0.9), (-7.0, 0.93), (-10.0, 1.0), (-2.0, 0.3), (-12.0, 1.4)] {
            let m = map(db, g);
            let w = origin_via_quadrature(&m, &make_fock1().into(), 1e-12).unwrap();
            assert!((w - origin_fock1(&m)).abs() < 1e-10, "{db} {g}: {w}");
        }
    }

    #[test]
    fn off_origin_output_matches_applied_map() {
        let m = map(-6.0, 0.8);
        let out = crate::channel::apply_map(&m, &make_fock1()).unwrap();
        for (x, p) in [(0.3, -0.2), (1.1, 0.4), (-0.7, -1.5)] {
            let pt = PhasePoint { x, p };
            let w = output_via_quadrature(&m, &make_fock1().into(), pt, 1e-12).unwrap();
            assert!((w - out.eval(pt)).abs() < 1e-10);
        }
    }

    #[test]
    fn compensated_squeezed_photon() {
        let t = 0.5 * 2f64.ln();
        let sq = SqueezeSpec::from_db(-3.0).unwrap();
        let g = crate::gain::optimal_gain(sq.r()).unwrap().gain;
        let m = build_map(&compensating_params(sq, t, g).unwrap());
        let w = origin_via_quadrature(&m, &make_squeezed_fock1(t).unwrap().into(), 1e-12).unwrap();
        assert!((w - origin_squeezed_fock1(&m, t)).abs() < 1e-10);
        assert!((w - origin_fock1(&map(-3.0, g))).abs() < 1e-6);
        assert!(r_from_db(-3.0) > 0.0);
    }

    #[test]
    fn normalization() {
        for eta in [0.0, 0.4, 1.0] {
            let w = make_attenuated(eta).unwrap();
            assert!((total_weight_via_quadrature(&w, 1e-13).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn noisy_point() {
        for v_sq in [0.05, 0.2, 0.4] {
            let w = noisy_point_via_quadrature(&NoisyEprSpec::pure(v_sq).unwrap(), 1.0, 1e-12).unwrap();
            assert!((w + 1.0 / PI).abs() < 1e-8, "{v_sq}: {w}");
        }
        let spec = NoisyEprSpec::from_noise(0.25, noise_from_db(3.0)).unwrap();
        let w = noisy_point_via_quadrature(&spec, 1.0, 1e-12).unwrap();
        assert!((w - origin_point_fock1(&spec).unwrap()).abs() < 1e-8, "{w}");
        let th = threshold_point(0.6304, noise_from_db(4.0)).unwrap();
        let spec = NoisyEprSpec::from_noise(th.v_th, th.noise).unwrap();
        assert!(noisy_point_via_quadrature(&spec, 0.6304, 1e-12).unwrap().abs() < 1e-8);
        let spec = NoisyEprSpec::from_db(-4.0, 2.0).unwrap();
        let w = noisy_point_via_quadrature(&spec, 0.8, 1e-12).unwrap();
        assert!((w - origin_point_attenuated(&spec, 0.8).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn noisy_square() {
        let spec = NoisyEprSpec::from_db(-5.0, 2.0).unwrap();
        let region = SquareRegion::new(0.3).unwrap();
        let (p, w) = noisy_square_via_quadrature(&spec, 1.0, region, 8, 1e-12).unwrap();
        assert!(
            (p - success_prob_square(region, spec.mean_photons())).abs() < 1e-8,
            "{p}"
        );
        assert!((w - origin_square_fock1(&spec, 1.0, region)).abs() < 1e-6, "{w}");
    }

    #[test]
    fn rotated_map_is_still_integrated() {
        let (s, c) = 0.4f64.sin_cos();
        let m = GaussianMap::new(Matrix2::new(c, -s, s, c) * 0.8, Matrix2::new(0.9, 0.1, 0.1, 0.7)).unwrap();
        let squeezed: WignerMixture = make_squeezed_fock1(0.3).unwrap().into();
        let w = origin_via_quadrature(&m, &squeezed, 1e-12).unwrap();
        let closed = crate::channel::apply_map(&m, &make_squeezed_fock1(0.3).unwrap())
            .unwrap()
            .origin();
        assert!((w - closed).abs() < 1e-10);
    }
}
