//! Continued fractions through the Gauss map alpha(x) = {1/x}: exact
//! expansions of rationals, floating expansions with precision tracking,
//! cells with exact rational endpoints, and the invariant measure
//! m(E) = (1/log 2) int_E dx/(1+x).

use crate::{Error, Result};

/// Threshold below which a floating remainder is treated as exhausted:
/// doubles carry ~16 digits and a generic continued fraction consumes
/// roughly one decimal digit of precision per partial quotient.
pub const PRECISION_FLOOR: f64 = 1e-12;

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b > 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// An exact nonnegative rational h/k with gcd(h, k) = 1 and k >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedFraction {
    num: u128,
    den: u128,
}

impl ReducedFraction {
    /// Reduces num/den to lowest terms. den = 0 is rejected.
    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("fraction with zero denominator"));
        }
        let g = gcd_u128(num, den).max(1);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn numer(&self) -> u128 {
        self.num
    }

    pub fn denom(&self) -> u128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The Gauss map {1/x} for x in (0, 1), exactly: {k/h} = (k mod h)/h.
    pub fn gauss_map(&self) -> Result<ReducedFraction> {
        if self.num == 0 || self.num >= self.den {
            return Err(Error::invalid("gauss_map requires x in (0, 1)"));
        }
        // gcd(k mod h, h) = gcd(k, h) = 1, so no reduction is needed
        Ok(Self {
            num: self.den % self.num,
            den: self.num,
        })
    }

    /// Fractional part: reduces h/k mod 1.
    pub fn fract(&self) -> ReducedFraction {
        Self {
            num: self.num % self.den,
            den: self.den,
        }
    }
}

impl std::fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// The Gauss map {1/x} on floating input, x in (0, 1).
pub fn gauss_map(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!("gauss_map requires x in (0,1), got {x}")));
    }
    Ok((1.0 / x).fract())
}

/// How an expansion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The remainder alpha_L reached exactly zero (rational input).
    Exact,
    /// The requested depth was reached with a nonzero remainder.
    DepthCap,
    /// The floating remainder dropped below [`PRECISION_FLOOR`]; further
    /// digits would be noise.
    PrecisionLoss,
}

/// A continued-fraction expansion x = [0; a_1, ..., a_L (, ...)] together
/// with its convergents p_l/q_l and the chains alpha_l, beta_l, gamma_l.
///
/// Convergent seeds are p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1, so that
/// p_1/q_1 = 1/a_1 and the recurrences p_{l+1} = a_{l+1} p_l + p_{l-1},
/// q_{l+1} = a_{l+1} q_l + q_{l-1} hold literally.
///
/// For a rational of depth L the stored alphas run alpha_0..alpha_L with
/// alpha_L = 0; gamma_l = beta_{l-1} log(1/alpha_l) exists for l <= L-1.
#[derive(Debug, Clone)]
pub struct CFExpansion {
    digits: Vec<u64>,
    /// pq[l + 1] = (p_l, q_l); pq[0] holds the (p_{-1}, q_{-1}) seed.
    pq: Vec<(u128, u128)>,
    /// alphas[l] = alpha_l(x) as f64.
    alphas: Vec<f64>,
    /// Exact alphas for rational input, same indexing.
    alphas_exact: Option<Vec<ReducedFraction>>,
    /// beta_cum[l] = beta_{l-1} = alpha_0 ... alpha_{l-1}; beta_cum[0] = 1.
    beta_cum: Vec<f64>,
    exact: bool,
    termination: Termination,
}

impl CFExpansion {
    /// Exact expansion of a rational in [0, 1). Input 0 yields the empty
    /// expansion of depth 0.
    pub fn of_fraction(r: &ReducedFraction) -> Result<Self> {
        if r.num >= r.den && !(r.num == 0 && r.den == 1) {
            return Err(Error::invalid("of_fraction requires 0 <= h/k < 1"));
        }
        let mut digits = Vec::new();
        let mut pq: Vec<(u128, u128)> = vec![(1, 0), (0, 1)];
        let mut alphas_exact = vec![*r];
        let mut alpha = *r;
        while !alpha.is_zero() {
            let a = alpha.den / alpha.num; // floor(1/alpha)
            let a64 = u64::try_from(a)
                .map_err(|_| Error::Numeric("continued-fraction digit overflows u64".into()))?;
            let next = ReducedFraction {
                num: alpha.den % alpha.num,
                den: alpha.num,
            };
            let (p1, q1) = pq[pq.len() - 1];
            let (p0, q0) = pq[pq.len() - 2];
            let p = a
                .checked_mul(p1)
                .and_then(|v| v.checked_add(p0))
                .ok_or_else(|| Error::Numeric("convergent overflow".into()))?;
            let q = a
                .checked_mul(q1)
                .and_then(|v| v.checked_add(q0))
                .ok_or_else(|| Error::Numeric("convergent overflow".into()))?;
            digits.push(a64);
            pq.push((p, q));
            alphas_exact.push(next);
            alpha = next;
        }
        let alphas: Vec<f64> = alphas_exact.iter().map(|a| a.to_f64()).collect();
        let beta_cum = cumulative_products(&alphas);
        Ok(Self {
            digits,
            pq,
            alphas,
            alphas_exact: Some(alphas_exact),
            beta_cum,
            exact: true,
            termination: Termination::Exact,
        })
    }

    /// Floating expansion of x in (0, 1), at most max_depth digits. Stops
    /// early, with the termination flagged, when the remainder is exactly
    /// zero or falls below [`PRECISION_FLOOR`].
    pub fn of_f64(x: f64, max_depth: usize) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::invalid(format!("of_f64 requires x in (0,1), got {x}")));
        }
        if max_depth == 0 {
            return Err(Error::invalid("max_depth must be >= 1"));
        }
        let mut digits = Vec::new();
        let mut pq: Vec<(u128, u128)> = vec![(1, 0), (0, 1)];
        let mut alphas = vec![x];
        let mut y = x;
        let mut termination = Termination::DepthCap;
        while digits.len() < max_depth {
            if y == 0.0 {
                termination = Termination::Exact;
                break;
            }
            if y < PRECISION_FLOOR {
                termination = Termination::PrecisionLoss;
                break;
            }
            let inv = 1.0 / y;
            let a = inv.floor() as u128;
            let next = (inv - inv.floor()).max(0.0);
            let (p1, q1) = pq[pq.len() - 1];
            let (p0, q0) = pq[pq.len() - 2];
            let (p, q) = match (
                a.checked_mul(p1).and_then(|v| v.checked_add(p0)),
                a.checked_mul(q1).and_then(|v| v.checked_add(q0)),
            ) {
                (Some(p), Some(q)) => (p, q),
                _ => {
                    termination = Termination::PrecisionLoss;
                    break;
                }
            };
            digits.push(a as u64);
            pq.push((p, q));
            alphas.push(next);
            y = next;
        }
        let beta_cum = cumulative_products(&alphas);
        Ok(Self {
            digits,
            pq,
            alphas,
            alphas_exact: None,
            beta_cum,
            exact: false,
            termination,
        })
    }

    /// Number of digits actually produced (the depth L for rationals).
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    /// Convergent (p_l, q_l) for 0 <= l <= depth; (p_0, q_0) = (0, 1).
    pub fn convergent(&self, l: usize) -> (u128, u128) {
        self.pq[l + 1]
    }

    /// alpha_l as f64, defined for 0 <= l <= depth (rational: alpha_L = 0).
    pub fn alpha(&self, l: usize) -> f64 {
        self.alphas[l]
    }

    /// Number of stored alphas (depth + 1 except after early float stops).
    pub fn alpha_count(&self) -> usize {
        self.alphas.len()
    }

    pub fn alpha_exact(&self, l: usize) -> Option<ReducedFraction> {
        self.alphas_exact.as_ref().map(|v| v[l])
    }

    /// beta_{l-1} = alpha_0 ... alpha_{l-1}; beta_prev(0) = 1.
    pub fn beta_prev(&self, l: usize) -> f64 {
        self.beta_cum[l]
    }

    /// gamma_l = beta_{l-1} log(1/alpha_l), defined while alpha_l > 0.
    pub fn gamma(&self, l: usize) -> f64 {
        self.beta_cum[l] * (1.0 / self.alphas[l]).ln()
    }
}

fn cumulative_products(alphas: &[f64]) -> Vec<f64> {
    let mut beta_cum = Vec::with_capacity(alphas.len() + 1);
    beta_cum.push(1.0);
    let mut prod = 1.0;
    for &a in alphas {
        prod *= a;
        beta_cum.push(prod);
    }
    beta_cum
}

/// The cell C(b_1, ..., b_s): the interval of all x whose first s digits are
/// b_1..b_s, with exact rational endpoints p_s/q_s and
/// (p_s + p_{s-1})/(q_s + q_{s-1}) and exact length 1/(q_s (q_s + q_{s-1})).
#[derive(Debug, Clone)]
pub struct Cell {
    digits: Vec<u64>,
    p_s: u128,
    q_s: u128,
    p_prev: u128,
    q_prev: u128,
}

impl Cell {
    pub fn new(digits: &[u64]) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::invalid("cell requires at least one digit"));
        }
        if digits.iter().any(|&b| b == 0) {
            return Err(Error::invalid("cell digits must be >= 1"));
        }
        let (mut p_prev, mut q_prev) = (1u128, 0u128);
        let (mut p, mut q) = (0u128, 1u128);
        for &b in digits {
            let np = (b as u128)
                .checked_mul(p)
                .and_then(|v| v.checked_add(p_prev))
                .ok_or_else(|| Error::Numeric("cell convergent overflow".into()))?;
            let nq = (b as u128)
                .checked_mul(q)
                .and_then(|v| v.checked_add(q_prev))
                .ok_or_else(|| Error::Numeric("cell convergent overflow".into()))?;
            (p_prev, q_prev) = (p, q);
            (p, q) = (np, nq);
        }
        Ok(Self {
            digits: digits.to_vec(),
            p_s: p,
            q_s: q,
            p_prev,
            q_prev,
        })
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Endpoints in increasing order. Consecutive convergents are coprime
    /// cross-wise, so both fractions are already reduced.
    pub fn endpoints(&self) -> (ReducedFraction, ReducedFraction) {
        let a = ReducedFraction {
            num: self.p_s,
            den: self.q_s,
        };
        let b = ReducedFraction {
            num: self.p_s + self.p_prev,
            den: self.q_s + self.q_prev,
        };
        if a.to_f64() <= b.to_f64() {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn convergent(&self) -> (u128, u128) {
        (self.p_s, self.q_s)
    }

    pub fn previous_convergent(&self) -> (u128, u128) {
        (self.p_prev, self.q_prev)
    }

    /// Exact length 1/(q_s (q_s + q_{s-1})), if the denominator fits u128.
    pub fn length(&self) -> Result<ReducedFraction> {
        let den = self
            .q_s
            .checked_mul(self.q_s + self.q_prev)
            .ok_or_else(|| Error::Numeric("cell length denominator overflows u128".into()))?;
        Ok(ReducedFraction { num: 1, den })
    }

    /// log of the exact length, computed from the integer denominators.
    pub fn length_ln(&self) -> f64 {
        -((self.q_s as f64).ln() + ((self.q_s + self.q_prev) as f64).ln())
    }

    /// Weak containment of a floating point.
    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.endpoints();
        lo.to_f64() <= x && x <= hi.to_f64()
    }
}

/// The unique depth-s cell containing x, from the first s digits of x.
pub fn locate_cell(x: f64, s: usize) -> Result<Cell> {
    if s == 0 {
        return Err(Error::invalid("cell depth must be >= 1"));
    }
    let cf = CFExpansion::of_f64(x, s)?;
    if cf.depth() < s {
        return Err(Error::DepthExhausted(format!(
            "x = {x} has only {} digits (requested depth {s}, {:?})",
            cf.depth(),
            cf.termination()
        )));
    }
    Cell::new(cf.digits())
}

/// Gauss measure of [a, b]: (log((1+b)/(1+a)))/log 2.
pub fn gauss_measure(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
        return Err(Error::invalid("gauss_measure requires 0 <= a <= b <= 1"));
    }
    Ok(((1.0 + b) / (1.0 + a)).ln() / std::f64::consts::LN_2)
}

/// Gauss measure of the preimage alpha^{-1}([a, b]) = union over n >= 1 of
/// [1/(n+b), 1/(n+a)], as the sum of the first `branches` branch measures
/// plus the exact telescoped tail. Invariance of m means this equals
/// m([a, b]) for every interval.
pub fn gauss_measure_preimage(a: f64, b: f64, branches: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
        return Err(Error::invalid("interval must satisfy 0 <= a <= b <= 1"));
    }
    let mut acc = crate::KahanSum::new();
    for n in 1..=branches {
        let n = n as f64;
        acc.add(gauss_measure(1.0 / (n + b), 1.0 / (n + a))?);
    }
    // sum_{n > N} of the branch measures telescopes to log((N+1+b)/(N+1+a))
    let n = branches as f64;
    let tail = ((n + 1.0 + b) / (n + 1.0 + a)).ln() / std::f64::consts::LN_2;
    Ok(acc.value() + tail)
}
