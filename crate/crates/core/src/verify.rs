//! Oracle-equivalence suites: every closed form is compared with an independent
//! numerical evaluation on a parameter grid, and the largest deviation is reported.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    build_map, compensating_params, is_completely_positive, origin_squeezed_fock1, origin_symmetric, origin_unity,
    InputState, TeleportParams,
};
use crate::conditional::{
    optimal_conditional_gain, origin_disk_attenuated, success_prob_disk_attenuated, weighted_origin_density_fock1,
    DiskRegion,
};
use crate::error::Result;
use crate::gain::optimal_gain;
use crate::noisy::{
    origin_point_attenuated, origin_point_fock1, origin_square_fock1, success_prob_square, SquareRegion,
};
use crate::oracle::fock::{conditional_state_fock, FockInput};
use crate::oracle::mc::{disk_average_mc, square_average_mc};
use crate::oracle::quadrature::{
    noisy_point_via_quadrature, noisy_square_via_quadrature, origin_via_quadrature, total_weight_via_quadrature,
};
use crate::phase_space::{
    make_attenuated, make_fock1, make_squeezed_fock1, r_from_db, vsq_from_db, NoisyEprSpec, SqueezeSpec, WignerMixture,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Monte Carlo samples per case.
    pub mc_samples: usize,
    pub seed: u64,
    /// Added to the closed-form symmetric-gain origin value; a harness self-test.
    pub perturbation: f64,
    /// Also run the 4-D square-region quadrature.
    pub slow: bool,
    /// Absolute tolerance for quadrature comparisons.
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            mc_samples: 200_000,
            seed: 2010,
            perturbation: 0.0,
            slow: false,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationUnit {
    Absolute,
    /// Deviation in Monte Carlo standard errors.
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub unit: DeviationUnit,
    pub passed: bool,
}

impl SuiteReport {
    fn new(name: &str, deviations: &[f64], tolerance: f64, unit: DeviationUnit) -> Self {
        // NaN deviations count as failures.
        let max_deviation = deviations.iter().fold(
            0.0f64,
            |m, &d| if d.is_nan() || m.is_nan() { f64::NAN } else { m.max(d) },
        );
        Self {
            name: name.to_string(),
            points: deviations.len(),
            max_deviation,
            tolerance,
            unit,
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: VerifyConfig,
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn dev(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

fn collect(points: Vec<Result<f64>>) -> Vec<f64> {
    points.into_iter().map(|d| d.unwrap_or(f64::NAN)).collect()
}

fn symmetric_map(db: f64, gain: f64) -> Result<crate::channel::GaussianMap> {
    Ok(build_map(&TeleportParams::symmetric(SqueezeSpec::from_db(db)?, gain)?))
}

/// Symmetric protocol, |1⟩ and attenuated inputs, against the kernel integral.
fn suite_unconditional(cfg: &VerifyConfig) -> SuiteReport {
    let cases: Vec<(f64, f64, f64)> = linspace(-12.0, -1.0, 10)
        .into_iter()
        .flat_map(|db| {
            [0.5, 0.8, 1.0, 1.2, 1.5]
                .into_iter()
                .flat_map(move |g| [(db, g, 1.0), (db, g, 0.6304)])
        })
        .collect();
    let devs = cases
        .par_iter()
        .map(|&(db, g, eta)| {
            let input = if eta == 1.0 {
                InputState::Fock1
            } else {
                InputState::Attenuated { eta }
            };
            let closed = origin_symmetric(r_from_db(db), g, input) + cfg.perturbation;
            let oracle = origin_via_quadrature(&symmetric_map(db, g)?, &make_attenuated(eta)?, 1e-12)?;
            Ok(dev(closed, oracle))
        })
        .collect();
    SuiteReport::new(
        "unconditional-quadrature",
        &collect(devs),
        cfg.tolerance,
        DeviationUnit::Absolute,
    )
}

fn suite_unity(cfg: &VerifyConfig) -> SuiteReport {
    let devs = linspace(0.02, 2.0, 50)
        .par_iter()
        .map(|&r| {
            let map = build_map(&TeleportParams::unity(SqueezeSpec::new(r)?));
            let oracle = origin_via_quadrature(&map, &make_fock1().into(), 1e-12)?;
            Ok(dev(origin_unity(r), oracle))
        })
        .collect();
    SuiteReport::new(
        "unity-gain-quadrature",
        &collect(devs),
        cfg.tolerance,
        DeviationUnit::Absolute,
    )
}

/// Squeezed single photon through the compensating protocol.
fn suite_squeezed(cfg: &VerifyConfig) -> SuiteReport {
    let cases: Vec<(f64, f64, f64)> = linspace(-10.0, -2.0, 5)
        .into_iter()
        .flat_map(|db| {
            linspace(-0.6, 0.6, 5)
                .into_iter()
                .flat_map(move |t| [0.7, 1.0].into_iter().map(move |g| (db, t, g)))
        })
        .collect();
    let devs = cases
        .par_iter()
        .map(|&(db, t, g)| {
            let sq = SqueezeSpec::from_db(db)?;
            let map = build_map(&compensating_params(sq, t, g)?);
            let input: WignerMixture = make_squeezed_fock1(t)?.into();
            let oracle = origin_via_quadrature(&map, &input, 1e-12)?;
            let closed = origin_squeezed_fock1(&map, t);
            let reduced = origin_symmetric(sq.r(), g, InputState::Fock1);
            Ok(dev(closed, oracle).max(dev(reduced, oracle)))
        })
        .collect();
    SuiteReport::new(
        "squeezed-photon-quadrature",
        &collect(devs),
        cfg.tolerance,
        DeviationUnit::Absolute,
    )
}

fn suite_noisy_point(cfg: &VerifyConfig) -> SuiteReport {
    let cases: Vec<(f64, f64, f64)> = [-1.0, -3.0, -6.0, -9.0, -12.0]
        .into_iter()
        .flat_map(|v| {
            [0.0, 1.0, 3.0, 5.0]
                .into_iter()
                .flat_map(move |n| [1.0, 0.8, 0.6304].into_iter().map(move |e| (v, n, e)))
        })
        .collect();
    let devs = cases
        .par_iter()
        .map(|&(v_db, n_db, eta)| {
            let spec = NoisyEprSpec::from_db(v_db, n_db)?;
            let oracle = noisy_point_via_quadrature(&spec, eta, 1e-12)?;
            let closed = if eta == 1.0 {
                origin_point_fock1(&spec)?
            } else {
                origin_point_attenuated(&spec, eta)?
            };
            Ok(dev(closed, oracle))
        })
        .collect();
    SuiteReport::new(
        "noisy-point-quadrature",
        &collect(devs),
        cfg.tolerance,
        DeviationUnit::Absolute,
    )
}

/// Square region shrunk to a tiny side against the single-outcome formula.
fn suite_square_limit() -> SuiteReport {
    let region = SquareRegion::new(1e-3).expect("positive side");
    let devs: Vec<Result<f64>> = linspace(-12.0, -0.5, 10)
        .into_iter()
        .flat_map(|v| [0.5, 1.0, 2.0, 3.0, 5.0].into_iter().map(move |n| (v, n)))
        .map(|(v_db, n_db)| {
            let spec = NoisyEprSpec::from_db(v_db, n_db)?;
            Ok(dev(origin_square_fock1(&spec, 1.0, region), origin_point_fock1(&spec)?))
        })
        .collect();
    SuiteReport::new("square-point-limit", &collect(devs), 1e-4, DeviationUnit::Absolute)
}

/// Per-outcome integrand against the Fock-basis parity readout.
fn suite_fock_integrand() -> SuiteReport {
    let cases: Vec<(f64, f64, Complex64)> = [0.2, 0.5, 0.8]
        .into_iter()
        .flat_map(|l| {
            [0.6, 1.0, 1.4].into_iter().flat_map(move |g| {
                linspace(0.0, 2.0, 6)
                    .into_iter()
                    .map(move |b| (l, g, Complex64::from_polar(b, 0.7 * b)))
            })
        })
        .collect();
    let devs: Vec<Result<f64>> = cases
        .iter()
        .map(|&(l, g, beta)| {
            let s = conditional_state_fock(l, g, beta, FockInput::One, None)?;
            Ok(dev(s.parity_weight() / PI, weighted_origin_density_fock1(l, g, beta)))
        })
        .collect();
    SuiteReport::new("fock-integrand", &collect(devs), 1e-12, DeviationUnit::Absolute)
}

/// Disk and square Monte Carlo against the closed forms, in standard errors.
fn suite_monte_carlo(cfg: &VerifyConfig) -> SuiteReport {
    let lam = |db: f64| r_from_db(db).tanh();
    let k03 = DiskRegion::new(0.3).expect("positive radius");
    let mut devs = Vec::new();
    let mut disk_case = |l: f64, g: f64, region: DiskRegion, eta: f64, stream: u64| -> Result<()> {
        let est = disk_average_mc(l, g, region, eta, cfg.mc_samples, cfg.seed.wrapping_add(stream))?;
        let p = success_prob_disk_attenuated(l, region, eta);
        let w = origin_disk_attenuated(l, g, region, eta);
        devs.push(dev(est.success, p) / est.success_stderr);
        devs.push(dev(est.origin, w) / est.origin_stderr);
        Ok(())
    };
    let mut run = || -> Result<()> {
        let l3 = lam(-3.0);
        disk_case(l3, optimal_conditional_gain(l3, k03, 1.0)?.gain, k03, 1.0, 0)?;
        let l10 = lam(-10.0);
        disk_case(l10, optimal_conditional_gain(l10, k03, 0.6304)?.gain, k03, 0.6304, 1)?;
        disk_case(lam(-5.0), 1.0, DiskRegion::new(0.8)?, 0.8, 2)?;
        Ok(())
    };
    if run().is_err() {
        devs.push(f64::NAN);
    }
    let square = || -> Result<(f64, f64)> {
        let region = SquareRegion::new(0.3)?;
        let v_sq = vsq_from_db(-5.0);
        let spec = NoisyEprSpec::pure(v_sq)?;
        let lambda = (1.0 - 2.0 * v_sq) / (1.0 + 2.0 * v_sq);
        let est = square_average_mc(lambda, 1.0, region, 1.0, cfg.mc_samples, cfg.seed.wrapping_add(3))?;
        let p = success_prob_square(region, spec.mean_photons());
        let w = origin_square_fock1(&spec, 1.0, region);
        Ok((
            dev(est.success, p) / est.success_stderr,
            dev(est.origin, w) / est.origin_stderr,
        ))
    };
    match square() {
        Ok((a, b)) => devs.extend([a, b]),
        Err(_) => devs.push(f64::NAN),
    }
    SuiteReport::new("monte-carlo", &devs, 3.0, DeviationUnit::Sigma)
}

/// Normalization, complete positivity and stationarity of the analytic optimum.
fn suite_invariants() -> Vec<SuiteReport> {
    let states: Vec<Result<WignerMixture>> = vec![
        Ok(make_fock1().into()),
        make_attenuated(0.6304),
        make_attenuated(0.0),
        make_squeezed_fock1(0.5 * 2f64.ln()).map(Into::into),
        make_squeezed_fock1(-0.4).map(Into::into),
    ];
    let mut norm: Vec<Result<f64>> = states
        .into_iter()
        .map(|s| Ok(dev(total_weight_via_quadrature(&s?, 1e-13)?, 1.0)))
        .collect();
    // Teleported states stay normalized too.
    for (db, g) in [(-3.0, 0.9), (-10.0, 1.2)] {
        norm.push((|| {
            let out = crate::channel::apply_map(&symmetric_map(db, g)?, &make_fock1())?;
            Ok(dev(total_weight_via_quadrature(&out.into(), 1e-13)?, 1.0))
        })());
    }

    let cp: Vec<f64> = linspace(-15.0, -0.1, 10)
        .into_iter()
        .flat_map(|db| linspace(0.0, 3.0, 7).into_iter().map(move |g| (db, g)))
        .map(|(db, g)| match symmetric_map(db, g) {
            Ok(m) if is_completely_positive(&m) => 0.0,
            _ => 1.0,
        })
        .collect();

    let stationarity: Vec<Result<f64>> = linspace(0.05, 3.0, 50)
        .into_iter()
        .map(|r| {
            let g = optimal_gain(r)?.gain;
            let h = 1e-5;
            let f = |g| origin_symmetric(r, g, InputState::Fock1);
            Ok(((f(g + h) - f(g - h)) / (2.0 * h)).abs())
        })
        .collect();

    vec![
        SuiteReport::new("normalization", &collect(norm), 1e-9, DeviationUnit::Absolute),
        SuiteReport::new("complete-positivity", &cp, 0.0, DeviationUnit::Absolute),
        SuiteReport::new(
            "gain-stationarity",
            &collect(stationarity),
            1e-6,
            DeviationUnit::Absolute,
        ),
    ]
}

fn suite_square_quadrature(cfg: &VerifyConfig) -> SuiteReport {
    let region = SquareRegion::new(0.3).expect("positive side");
    let devs: Vec<Result<f64>> = [(-5.0, 2.0), (-3.0, 0.5), (-8.0, 4.0)]
        .into_iter()
        .map(|(v_db, n_db)| {
            let spec = NoisyEprSpec::from_db(v_db, n_db)?;
            let (p, w) = noisy_square_via_quadrature(&spec, 1.0, region, 10, 1e-12)?;
            Ok(dev(p, success_prob_square(region, spec.mean_photons()))
                .max(dev(w, origin_square_fock1(&spec, 1.0, region))))
        })
        .collect();
    SuiteReport::new(
        "square-quadrature",
        &collect(devs),
        cfg.tolerance,
        DeviationUnit::Absolute,
    )
}

pub fn run_verification(cfg: &VerifyConfig) -> VerificationReport {
    let mut suites = vec![
        suite_unconditional(cfg),
        suite_unity(cfg),
        suite_squeezed(cfg),
        suite_noisy_point(cfg),
        suite_square_limit(),
        suite_fock_integrand(),
        suite_monte_carlo(cfg),
    ];
    suites.extend(suite_invariants());
    if cfg.slow {
        suites.push(suite_square_quadrature(cfg));
    }
    VerificationReport { config: *cfg, suites }
}
