//! Truncated Fock-basis simulation of the post-selected output state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tail mass accepted at the truncation edge.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Poisson tail bound used to choose the default truncation.
const POISSON_BOUND: f64 = 1e-14;

/// Amplitudes `c_0..c_N` in the number basis. Not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn truncation(&self) -> usize {
        self.amps.len().saturating_sub(1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ (−1)^k |c_k|²`, the unnormalized parity expectation.
    pub fn parity_weight(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() })
            .sum()
    }

    /// `|c_N|² / Σ |c_k|²`.
    pub fn tail_mass(&self) -> f64 {
        let n = self.norm_sqr();
        if n == 0.0 {
            return 0.0;
        }
        self.amps.last().map_or(0.0, |c| c.norm_sqr()) / n
    }
}

/// `W(0) = Tr[ρ (−1)^n] / π` for a normalized pure state.
pub fn origin_via_parity(state: &FockVector) -> f64 {
    state.parity_weight() / (PI * state.norm_sqr())
}

/// Parity readout of a mixture `Σ w_i |ψ_i⟩⟨ψ_i|` whose components need not be
/// normalized; the mixture is normalized as a whole.
pub fn origin_via_parity_mixture(terms: &[(f64, &FockVector)]) -> f64 {
    let num: f64 = terms.iter().map(|(w, s)| w * s.parity_weight()).sum();
    let den: f64 = terms.iter().map(|(w, s)| w * s.norm_sqr()).sum();
    num / (PI * den)
}

/// `L_n^{(α)}(x)` by the three-term recurrence in `n`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `⟨m|D(α)|n⟩`. For `m ≥ n` this is `√(n!/m!) α^{m−n} e^{−|α|²/2} L_n^{(m−n)}(|α|²)`;
/// the other triangle follows from `⟨m|D(α)|n⟩ = conj(⟨n|D(−α)|m⟩)`.
pub fn displaced_element(m: usize, n: usize, alpha: Complex64) -> Complex64 {
    if m < n {
        return displaced_element(n, m, -alpha).conj();
    }
    let x = alpha.norm_sqr();
    // √(n!/m!) α^{m−n} accumulated factor by factor to avoid overflow.
    let mut pre = Complex64::new(1.0, 0.0);
    for k in (n + 1)..=m {
        pre *= alpha / (k as f64).sqrt();
    }
    pre * (-x / 2.0).exp() * laguerre(n, (m - n) as f64, x)
}

/// Smallest `N` with `e^{−|α|²} |α|^{2N} / N! < 1e−14` beyond the Poisson peak.
pub fn default_truncation(alpha_abs: f64) -> usize {
    let x = alpha_abs * alpha_abs;
    let mut log_term = -x;
    let mut n = 0usize;
    loop {
        if n as f64 > x && log_term < POISSON_BOUND.ln() {
            // Headroom for the one-photon column, which is shifted by one.
            return (n + 2).max(4);
        }
        n += 1;
        log_term += x.max(f64::MIN_POSITIVE).ln() - (n as f64).ln();
    }
}

/// Input branch of the conditional state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FockInput {
    One,
    Vacuum,
}

/// Unnormalized conditional output for outcome `β`:
/// `√(1−λ²) e^{−(1−λ²)|β|²/2} D[(G−λ)β] [(1−λ²)β*|0⟩ + λ|1⟩]` for |1⟩, and
/// `√(1−λ²) e^{−(1−λ²)|β|²/2} D[(G−λ)β] |0⟩` for the vacuum. Its squared norm is the
/// outcome density with respect to `d²β/π`.
pub fn conditional_state_fock(
    lambda: f64,
    gain: f64,
    beta: Complex64,
    input: FockInput,
    n_trunc: Option<usize>,
) -> Result<FockVector> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must lie in [0, 1)",
        });
    }
    let s = 1.0 - lambda * lambda;
    let gamma = beta * (gain - lambda);
    let n = n_trunc.unwrap_or_else(|| default_truncation(gamma.norm()));
    let pre = s.sqrt() * (-s * beta.norm_sqr() / 2.0).exp();
    let (c0, c1) = match input {
        FockInput::One => (beta.conj() * s, Complex64::new(lambda, 0.0)),
        FockInput::Vacuum => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
    };
    let amps: Vec<Complex64> = (0..=n)
        .map(|m| pre * (displaced_element(m, 0, gamma) * c0 + displaced_element(m, 1, gamma) * c1))
        .collect();
    let state = FockVector::new(amps);
    let tail = state.tail_mass();
    if tail > TAIL_TOLERANCE {
        return Err(Error::TruncationInsufficient { n, tail });
    }
    Ok(state)
}

/// Unnormalized parity weight and outcome density at `β` for the attenuated input.
pub fn conditional_weights(lambda: f64, gain: f64, beta: Complex64, eta: f64) -> Result<(f64, f64)> {
    let mut parity = 0.0;
    let mut density = 0.0;
    if eta > 0.0 {
        let one = conditional_state_fock(lambda, gain, beta, FockInput::One, None)?;
        parity += eta * one.parity_weight();
        density += eta * one.norm_sqr();
    }
    if eta < 1.0 {
        let vac = conditional_state_fock(lambda, gain, beta, FockInput::Vacuum, None)?;
        parity += (1.0 - eta) * vac.parity_weight();
        density += (1.0 - eta) * vac.norm_sqr();
    }
    Ok((parity, density))
}
