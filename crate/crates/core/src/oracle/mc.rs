//! Monte Carlo averages of the Fock-basis output over an acceptance region.
//!
//! Samples are drawn in fixed-size chunks; chunk `k` uses a ChaCha stream seeded
//! with the user seed and stream id `k`, and chunk moments are combined in chunk
//! order. Results are therefore bit-identical for a given seed regardless of the
//! thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fock::conditional_weights;
use crate::conditional::DiskRegion;
use crate::error::{Error, Result};
use crate::noisy::SquareRegion;
use crate::numeric::CompensatedSum;

pub const MIN_SAMPLES: usize = 10_000;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub samples: usize,
    pub success: f64,
    pub success_stderr: f64,
    pub origin: f64,
    pub origin_stderr: f64,
}

impl McEstimate {
    /// Whether `success` and `origin` are both within `k` standard errors of the targets.
    pub fn agrees(&self, success: f64, origin: f64, k: f64) -> bool {
        (self.success - success).abs() <= k * self.success_stderr
            && (self.origin - origin).abs() <= k * self.origin_stderr
    }
}

/// First and second moments of `a = parity/π` and `b = density`.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    a: CompensatedSum,
    b: CompensatedSum,
    aa: CompensatedSum,
    bb: CompensatedSum,
    ab: CompensatedSum,
}

impl Moments {
    fn push(&mut self, a: f64, b: f64) {
        self.n += 1;
        self.a.add(a);
        self.b.add(b);
        self.aa.add(a * a);
        self.bb.add(b * b);
        self.ab.add(a * b);
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.a.add(o.a.value());
        self.b.add(o.b.value());
        self.aa.add(o.aa.value());
        self.bb.add(o.bb.value());
        self.ab.add(o.ab.value());
    }

    /// `area` converts a uniform-sample mean into an integral over `d²β/π`.
    fn estimate(&self, area: f64) -> McEstimate {
        let n = self.n as f64;
        let (ma, mb) = (self.a.value() / n, self.b.value() / n);
        let var_a = (self.aa.value() / n - ma * ma).max(0.0) * n / (n - 1.0);
        let var_b = (self.bb.value() / n - mb * mb).max(0.0) * n / (n - 1.0);
        let cov = (self.ab.value() / n - ma * mb) * n / (n - 1.0);
        let ratio = ma / mb;
        let var_ratio = (var_a - 2.0 * ratio * cov + ratio * ratio * var_b).max(0.0) / (n * mb * mb);
        McEstimate {
            samples: self.n,
            success: area * mb,
            success_stderr: area * (var_b / n).sqrt(),
            origin: ratio,
            origin_stderr: var_ratio.sqrt(),
        }
    }
}

fn run<S>(sample: S, area: f64, lambda: f64, gain: f64, eta: f64, n_samples: usize, seed: u64) -> Result<McEstimate>
where
    S: Fn(&mut ChaCha8Rng) -> Complex64 + Sync,
{
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: n_samples as f64,
            reason: "Monte Carlo needs at least 10^4 samples",
        });
    }
    let chunks = n_samples.div_ceil(CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK.min(n_samples - k * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                let beta = sample(&mut rng);
                let (parity, density) = conditional_weights(lambda, gain, beta, eta)?;
                m.push(parity / PI, density);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.estimate(area))
}

/// `(P_Ω, W_Ω(0))` for the disk `|β| ≤ K`, attenuated input with weight `η`.
pub fn disk_average_mc(
    lambda: f64,
    gain: f64,
    region: DiskRegion,
    eta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let k = region.radius();
    let sample = |rng: &mut ChaCha8Rng| {
        let rho = k * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        Complex64::from_polar(rho, theta)
    };
    // Disk area π K² in the β plane, divided by π.
    run(sample, k * k, lambda, gain, eta, n_samples, seed)
}

/// `(P_Σ, W_Σ(0))` for the square `|x̄_u|, |p̄_v| ≤ a` with a pure shared resource.
pub fn square_average_mc(
    lambda: f64,
    gain: f64,
    region: SquareRegion,
    eta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let a = region.half_side();
    let sample = |rng: &mut ChaCha8Rng| {
        let x = a * (2.0 * rng.random::<f64>() - 1.0);
        let p = a * (2.0 * rng.random::<f64>() - 1.0);
        Complex64::new(x, p) / 2f64.sqrt()
    };
    // `d²β/π = dx̄ dp̄ / (2π)` over a square of area 4a².
    run(sample, 4.0 * a * a / (2.0 * PI), lambda, gain, eta, n_samples, seed)
}
