//! Vasyunin sums, cotangent sums, the Estermann sine series at s = 1, and
//! the sawtooth series g(x) = sum_{l >= 1} (1 - 2{lx})/l under the periodic
//! Bernoulli convention (terms with lx integral contribute 0).
//!
//! Conventions, pinned numerically by the cross-identity tests:
//!   V(h/k)  =  sum_{m=1}^{k-1} {mh/k} cot(pi m / k)
//!   c0(h/k) = -sum_{l=1}^{k-1} (l/k) cot(pi h l / k)
//! under which V(h/k) = -c0(hbar/k) and g(h/k) = -(pi/k) V(h/k) hold, and
//! the Gram matrix built from V is positive semidefinite.

use crate::contfrac::ReducedFraction;
use crate::{Error, KahanSum, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Coefficients B_{2k}/(2k) of the digamma asymptotic series, k = 1..8.
const DIGAMMA_ASYMP: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Digamma psi(x) for x > 0 by recurrence shift into x >= 10 followed by the
/// asymptotic expansion; absolute accuracy ~1e-12 on (0, 1].
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut result = 0.0;
    let mut xx = x;
    while xx < 10.0 {
        result -= 1.0 / xx;
        xx += 1.0;
    }
    result += xx.ln() - 0.5 / xx;
    let inv2 = 1.0 / (xx * xx);
    let mut term = inv2;
    for &c in &DIGAMMA_ASYMP {
        result -= c * term;
        term *= inv2;
    }
    result
}

/// cot(pi rho / k) for an exact residue 1 <= rho <= k-1, using the sign
/// symmetry about k/2 so that paired residues cancel exactly.
#[inline]
fn cot_pi_frac(rho: u64, k: u64) -> f64 {
    debug_assert!(rho >= 1 && rho < k);
    if 2 * rho == k {
        0.0
    } else if 2 * rho < k {
        1.0 / (PI * rho as f64 / k as f64).tan()
    } else {
        -1.0 / (PI * (k - rho) as f64 / k as f64).tan()
    }
}

fn fraction_parts(r: &ReducedFraction) -> Result<(u64, u64)> {
    let h = u64::try_from(r.numer()).map_err(|_| Error::invalid("numerator too large"))?;
    let k = u64::try_from(r.denom()).map_err(|_| Error::invalid("denominator too large"))?;
    Ok((h, k))
}

/// Vasyunin's sum V(h/k) = sum_{m=1}^{k-1} {mh/k} cot(pi m/k); only h mod k
/// matters. Pairs m and k-m are folded: V = sum_{m < k/2} (2{mh/k} - 1) cot(pi m/k).
pub fn vasyunin_v(r: &ReducedFraction) -> Result<f64> {
    let (h, k) = fraction_parts(r)?;
    if k < 2 {
        return Err(Error::invalid("vasyunin_v requires k >= 2"));
    }
    let h = h % k;
    let mut acc = KahanSum::new();
    for m in 1..k.div_ceil(2) {
        let rho = (m as u128 * h as u128 % k as u128) as u64;
        // gcd(h, k) = 1 and 0 < m < k, so rho != 0
        let b1_doubled = (2 * rho) as f64 / k as f64 - 1.0;
        acc.add(b1_doubled * cot_pi_frac(m, k));
    }
    Ok(acc.value())
}

/// The cotangent sum c0(h/k) = -sum_{l=1}^{k-1} (l/k) cot(pi h l/k), paired
/// the same way: c0 = -sum_{l < k/2} ((2l - k)/k) cot(pi (hl mod k)/k).
pub fn cotangent_c0(r: &ReducedFraction) -> Result<f64> {
    let (h, k) = fraction_parts(r)?;
    if k < 2 {
        return Err(Error::invalid("cotangent_c0 requires k >= 2"));
    }
    let h = h % k;
    let mut acc = KahanSum::new();
    for l in 1..k.div_ceil(2) {
        let rho = (l as u128 * h as u128 % k as u128) as u64;
        let weight = (2 * l) as f64 / k as f64 - 1.0;
        acc.add(weight * cot_pi_frac(rho, k));
    }
    Ok(-acc.value())
}

/// g at an exact rational h/k >= 0 through the digamma closed form
///   g(h/k) = (2/k) sum_{r=1}^{k-1} ({rh/k} - 1/2) psi(r/k),
/// with integer arguments mapping to 0. Valid for non-reduced h/k as well
/// (the digamma distribution property collapses it to the reduced value).
pub fn g_rational(r: &ReducedFraction) -> f64 {
    let k = r.denom();
    if k == 1 {
        return 0.0;
    }
    let h = r.numer() % k;
    let k64 = k as u64;
    let h64 = h as u64;
    let mut acc = KahanSum::new();
    let mut rho = 0u64;
    for j in 1..k64 {
        rho += h64;
        if rho >= k64 {
            rho -= k64;
        }
        if rho == 0 {
            continue;
        }
        acc.add((rho as f64 / k as f64 - 0.5) * digamma(j as f64 / k as f64));
    }
    2.0 * acc.value() / k as f64
}

/// Table of g(r/k) for r = 0..k-1, built in O(k^2) with one shared digamma
/// row and exact antisymmetry values[k-r] = -values[r] by construction.
#[derive(Debug, Clone)]
pub struct GTable {
    k: u64,
    values: Vec<f64>,
}

impl GTable {
    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// g(r/k) by residue; r is reduced mod k.
    #[inline]
    pub fn get(&self, r: u64) -> f64 {
        self.values[(r % self.k) as usize]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn g_table(k: u64) -> Result<GTable> {
    if k == 0 {
        return Err(Error::invalid("g_table requires k >= 1"));
    }
    let mut values = vec![0.0; k as usize];
    if k == 1 {
        return Ok(GTable { k, values });
    }
    let psis: Vec<f64> = (1..k).map(|j| digamma(j as f64 / k as f64)).collect();

    let entry = |r: u64| -> f64 {
        let mut acc = KahanSum::new();
        let mut rho = 0u64;
        for j in 1..k {
            rho += r;
            if rho >= k {
                rho -= k;
            }
            if rho == 0 {
                continue;
            }
            acc.add((rho as f64 / k as f64 - 0.5) * psis[(j - 1) as usize]);
        }
        2.0 * acc.value() / k as f64
    };

    let half: Vec<(u64, f64)> = if k > 512 {
        (1..=k / 2).into_par_iter().map(|r| (r, entry(r))).collect()
    } else {
        (1..=k / 2).map(|r| (r, entry(r))).collect()
    };
    for (r, v) in half {
        values[r as usize] = v;
    }
    // mirror: exact antisymmetry (r = k/2 is self-mirrored and lands on 0)
    for r in 1..k.div_ceil(2) {
        values[(k - r) as usize] = -values[r as usize];
    }
    Ok(GTable { k, values })
}

/// A block-averaged partial sum of an oscillating series: the mean of the
/// partial sums over the final block, plus the max-min width of that block
/// as a quality diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    pub width: f64,
}

fn block_average(partials: impl Iterator<Item = f64>, total: usize, block: usize) -> SeriesValue {
    let mut kept: Vec<f64> = Vec::with_capacity(block);
    let skip = total - block;
    for (i, s) in partials.enumerate() {
        if i >= skip {
            kept.push(s);
        }
    }
    let value = kept.iter().sum::<f64>() / kept.len() as f64;
    let width = kept.iter().fold(f64::MIN, |m, &v| m.max(v))
        - kept.iter().fold(f64::MAX, |m, &v| m.min(v));
    SeriesValue { value, width }
}

/// Truncated series g(x) ~ sum_{l <= L} (1 - 2{lx})/l, Cesaro-averaged over
/// the last ceil(sqrt(L)) partial sums to damp the oscillation. Only the
/// fractional part of x matters; terms with lx integral contribute 0.
pub fn g_series(x: f64, l_terms: usize) -> Result<SeriesValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("g_series requires x > 0"));
    }
    if l_terms < 10 {
        return Err(Error::invalid("g_series requires at least 10 terms"));
    }
    let block = (l_terms as f64).sqrt().ceil() as usize;
    let mut acc = KahanSum::new();
    let partials = (1..=l_terms).map(|l| {
        let frac = (l as f64 * x).fract();
        if frac != 0.0 {
            acc.add((1.0 - 2.0 * frac) / l as f64);
        }
        acc.value()
    });
    Ok(block_average(partials, l_terms, block))
}

/// Estermann sine series at s = 1: D_sin(1, h/k) = sum d(n) sin(2 pi n h/k)/n,
/// truncated at n_terms with the same block averaging. Fourier theory gives
/// D_sin(1, x) = (pi/2) g(x), which the tests exercise.
pub fn estermann_dsin1(r: &ReducedFraction, n_terms: usize) -> Result<SeriesValue> {
    if n_terms < 100 {
        return Err(Error::invalid("estermann_dsin1 requires at least 100 terms"));
    }
    let (h, k) = fraction_parts(r)?;
    let d = crate::arith::divisor_counts(n_terms as u64);

    // sin(2 pi j / k) with enforced antisymmetry about k/2
    let kk = k as usize;
    let mut sin_table = vec![0.0f64; kk];
    for j in 1..kk.div_ceil(2) {
        sin_table[j] = (2.0 * PI * j as f64 / k as f64).sin();
        sin_table[kk - j] = -sin_table[j];
    }

    let block = (n_terms as f64).sqrt().ceil() as usize;
    let mut acc = KahanSum::new();
    let mut rho = 0u64;
    let partials = (1..=n_terms).map(|n| {
        rho += h % k;
        if rho >= k {
            rho -= k;
        }
        let s = sin_table[rho as usize];
        if s != 0.0 {
            acc.add(d[n] as f64 * s / n as f64);
        }
        acc.value()
    });
    Ok(block_average(partials, n_terms, block))
}
