//! Small scalar solvers shared by the optimizers and threshold searches.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section search on `[lo, hi]`, stopping once the bracket is narrower than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Minimum {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while (hi - lo).abs() > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
        // Bracket stopped shrinking in floating point.
        if !(c > lo && d < hi) {
            break;
        }
    }
    let arg = 0.5 * (lo + hi);
    let value = f(arg);
    let best = [(arg, value), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    Minimum {
        arg: best.0,
        value: best.1,
    }
}

/// Uniform scan of `samples` points followed by golden-section refinement of the
/// best cell. Fails with [`Error::NoBracket`] when the scan minimum is an endpoint.
pub fn scan_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Result<Minimum> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || samples < 3 {
        return Err(Error::InvalidParameter {
            name: "bracket",
            value: hi - lo,
            reason: "needs finite lo < hi and at least 3 samples",
        });
    }
    let step = (hi - lo) / (samples - 1) as f64;
    let xs = |i: usize| if i == samples - 1 { hi } else { lo + i as f64 * step };
    let (best, best_val) = (0..samples)
        .map(|i| (i, f(xs(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if best == 0 || best == samples - 1 {
        return Err(Error::NoBracket {
            arg: xs(best),
            value: best_val,
        });
    }
    Ok(golden_section(&f, xs(best - 1), xs(best + 1), tol))
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while (hi - lo).abs() > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Nelder–Mead simplex minimization in `N` dimensions.
pub fn nelder_mead<const N: usize, F: Fn(&[f64; N]) -> f64>(
    f: F,
    start: [f64; N],
    step: [f64; N],
    tol: f64,
    max_iter: usize,
) -> ([f64; N], f64) {
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut v = start;
        v[i] += step[i];
        simplex.push((v, f(&v)));
    }

    let combine = |a: &[f64; N], b: &[f64; N], t: f64| {
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = a[k] + t * (b[k] - a[k]);
        }
        out
    };

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(simplex[0].0.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < tol {
            break;
        }

        let mut centroid = [0.0; N];
        for (v, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += v[k] / N as f64;
            }
        }
        let worst = simplex[N];
        let reflected = combine(&centroid, &worst.0, -1.0);
        let f_r = f(&reflected);

        if f_r < simplex[0].1 {
            let expanded = combine(&centroid, &worst.0, -2.0);
            let f_e = f(&expanded);
            simplex[N] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < simplex[N - 1].1 {
            simplex[N] = (reflected, f_r);
        } else {
            let contracted = if f_r < worst.1 {
                combine(&centroid, &reflected, 0.5)
            } else {
                combine(&centroid, &worst.0, 0.5)
            };
            let f_c = f(&contracted);
            if f_c < worst.1.min(f_r) {
                simplex[N] = (contracted, f_c);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    let v = combine(&best, &entry.0, 0.5);
                    *entry = (v, f(&v));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
