//! Exact integer arithmetic: Moebius and divisor-count sieves, modular
//! inverses, and the Vaughan-identity coefficients c1, c2, c3, c4 and A(u).
//!
//! Everything here is integer-exact; no floating point enters this module.

use crate::{Error, Result};

/// Table of Moebius values mu(n) for 1 <= n <= limit.
#[derive(Debug, Clone)]
pub struct MoebiusTable {
    limit: u64,
    values: Vec<i8>,
}

impl MoebiusTable {
    /// Linear sieve. mu(1) = 1, mu(p) = -1, mu(n) = 0 iff n has a square factor.
    pub fn build(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::invalid("moebius sieve limit must be >= 1"));
        }
        let n = limit as usize;
        let mut mu = vec![0i8; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        let mut composite = vec![false; n + 1];
        mu[1] = 1;
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                mu[i] = -1;
            }
            for &p in &primes {
                let ip = i.checked_mul(p);
                match ip {
                    Some(ip) if ip <= n => {
                        composite[ip] = true;
                        if i % p == 0 {
                            mu[ip] = 0;
                            break;
                        }
                        mu[ip] = -mu[i];
                    }
                    _ => break,
                }
            }
        }
        Ok(Self { limit, values: mu })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// mu(n); panics if n is 0 or past the sieve limit.
    #[inline]
    pub fn mu(&self, n: u64) -> i64 {
        self.values[n as usize] as i64
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

/// Divisor-count tables: d(n) and the order-4 count d4(n) = sum_{ab=n} d(a)d(b).
#[derive(Debug, Clone)]
pub struct DivisorTables {
    limit: u64,
    d: Vec<u32>,
    d4: Vec<u64>,
}

impl DivisorTables {
    pub fn build(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::invalid("divisor sieve limit must be >= 1"));
        }
        let n = limit as usize;
        let mut d = vec![0u32; n + 1];
        for a in 1..=n {
            for m in (a..=n).step_by(a) {
                d[m] += 1;
            }
        }
        // d4 = d * d (Dirichlet convolution)
        let mut d4 = vec![0u64; n + 1];
        for a in 1..=n {
            let da = d[a] as u64;
            for m in (a..=n).step_by(a) {
                d4[m] += da * d[m / a] as u64;
            }
        }
        Ok(Self { limit, d, d4 })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    #[inline]
    pub fn d(&self, n: u64) -> u64 {
        self.d[n as usize] as u64
    }

    #[inline]
    pub fn d4(&self, n: u64) -> u64 {
        self.d4[n as usize]
    }
}

/// Smallest-prime-factor sieve; spf[1] = 1.
pub fn smallest_prime_factors(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut spf: Vec<u32> = (0..=n as u64).map(|i| i as u32).collect();
    let mut i = 2usize;
    while i * i <= n {
        if spf[i] == i as u32 {
            for m in (i * i..=n).step_by(i) {
                if spf[m] == m as u32 {
                    spf[m] = i as u32;
                }
            }
        }
        i += 1;
    }
    spf
}

pub fn is_prime(n: u64, spf: &[u32]) -> bool {
    n >= 2 && spf[n as usize] == n as u32
}

/// Unordered divisor list of h, via trial division (fine at desk scale).
pub fn divisors(h: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut a = 1u64;
    while a * a <= h {
        if h % a == 0 {
            small.push(a);
            if a * a != h {
                large.push(h / a);
            }
        }
        a += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Modular inverse of h mod k: the unique hbar in [1, k-1] with h*hbar = 1 (mod k).
pub fn mod_inverse(h: u64, k: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::invalid("mod_inverse requires k >= 2"));
    }
    let (mut old_r, mut r) = ((h % k) as i128, k as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::invalid(format!(
            "mod_inverse({h}, {k}): arguments are not coprime"
        )));
    }
    Ok(old_s.rem_euclid(k as i128) as u64)
}

/// Vaughan cutoff. The identity mu = c1 + c2 + c3 holds for any real w > 1;
/// we require w >= 2 so the bilinear pieces are nonempty at desk scale.
#[derive(Debug, Clone, Copy)]
pub struct VaughanParams {
    w: f64,
}

impl VaughanParams {
    pub fn new(w: f64) -> Result<Self> {
        if !(w >= 2.0) {
            return Err(Error::invalid("Vaughan cutoff w must be >= 2"));
        }
        Ok(Self { w })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    /// Largest integer d with d <= w.
    pub fn w_floor(&self) -> u64 {
        self.w.floor() as u64
    }
}

/// c4(alpha) = -sum_{d1 d2 = alpha, d1 <= w} mu(d1).
pub fn vaughan_c4(alpha: u64, params: &VaughanParams, mu: &MoebiusTable) -> i64 {
    let mut s = 0i64;
    for d in divisors(alpha) {
        if d as f64 <= params.w() {
            s += mu.mu(d);
        }
    }
    -s
}

/// The three Vaughan pieces of mu(h):
///   c1(h) = sum_{a b g = h, a >= w, b >= w} mu(g) c4(a) c4(b)
///   c2(h) = 2 mu(h) for h <= w, else 0
///   c3(h) = -sum_{a b g = h, a <= w, b <= w} mu(a) mu(b)
///
/// Exactness c1 + c2 + c3 = mu(h) is a theorem; the test suite checks it for
/// every h up to 1e5 at several w.
pub fn vaughan_c(h: u64, params: &VaughanParams, mu: &MoebiusTable) -> Result<(i64, i64, i64)> {
    if h == 0 {
        return Err(Error::invalid("vaughan_c requires h >= 1"));
    }
    if mu.limit() < h {
        return Err(Error::invalid("Moebius table does not cover h"));
    }
    let w = params.w();
    let divs = divisors(h);

    let mut c1 = 0i64;
    let mut c3 = 0i64;
    for &a in &divs {
        let rest = h / a;
        for &b in divisors(rest).iter() {
            let g = rest / b;
            if a as f64 >= w && b as f64 >= w {
                c1 += mu.mu(g) * vaughan_c4(a, params, mu) * vaughan_c4(b, params, mu);
            }
            if a as f64 <= w && b as f64 <= w {
                c3 -= mu.mu(a) * mu.mu(b);
            }
        }
    }
    let c2 = if h as f64 <= w { 2 * mu.mu(h) } else { 0 };
    Ok((c1, c2, c3))
}

/// A(u) = sum_{st=u} (sum_{d1 d2 = s, d1 <= w} mu(d1)) (sum_{e1 e2 = t, e1 <= w} mu(e1)).
/// Satisfies |A(u)| <= d4(u).
pub fn vaughan_coeff_a(u: u64, params: &VaughanParams, mu: &MoebiusTable) -> Result<i64> {
    if u == 0 {
        return Err(Error::invalid("vaughan_coeff_a requires u >= 1"));
    }
    if mu.limit() < u {
        return Err(Error::invalid("Moebius table does not cover u"));
    }
    let mut total = 0i64;
    for s in divisors(u) {
        let t = u / s;
        // inner(x) = sum_{d | x, d <= w} mu(d) = -c4(x)
        let inner_s = -vaughan_c4(s, params, mu);
        let inner_t = -vaughan_c4(t, params, mu);
        total += inner_s * inner_t;
    }
    Ok(total)
}

/// Bulk Vaughan coefficients on a range [lo, hi), computed by sieving rather
/// than per-h divisor enumeration. Used by the sweep experiments where the
/// range holds ~1e6 values of h.
#[derive(Debug)]
pub struct VaughanRange {
    pub lo: u64,
    pub hi: u64,
    /// c1(h) for h in [lo, hi), indexed by h - lo.
    pub c1: Vec<i64>,
    /// c3(h), same indexing.
    pub c3: Vec<i64>,
    /// P(m) = sum_{a b = m, a >= w, b >= w} c4(a) c4(b) for m <= hi - 1,
    /// dense. c1(h) = sum_{m | h} P(m) mu(h/m); the sweep splits sigma_1 by
    /// the size of m = s t.
    pub bilinear: Vec<i64>,
}

pub fn vaughan_range(
    lo: u64,
    hi: u64,
    params: &VaughanParams,
    mu: &MoebiusTable,
) -> Result<VaughanRange> {
    if lo == 0 || hi <= lo {
        return Err(Error::invalid("vaughan_range requires 1 <= lo < hi"));
    }
    if mu.limit() + 1 < hi {
        return Err(Error::invalid("Moebius table does not cover the range"));
    }
    let w = params.w();
    let len = (hi - lo) as usize;
    let top = (hi - 1) as usize;

    // c4 up to ceil(top / w): only alpha <= m / w <= top / w matter in P.
    let c4_limit = (top as f64 / w).floor() as usize + 1;
    let mut c4 = vec![0i64; c4_limit + 1];
    let w_floor = params.w_floor().min(c4_limit as u64) as usize;
    for d in 1..=w_floor {
        let mud = mu.mu(d as u64);
        if mud == 0 {
            continue;
        }
        for m in (d..=c4_limit).step_by(d) {
            c4[m] -= mud;
        }
    }

    // P(m) over a >= w, b >= w, ab = m <= top.
    let a_min = w.ceil() as usize;
    let mut bilinear = vec![0i64; top + 1];
    for a in a_min..=c4_limit {
        if c4[a] == 0 {
            continue;
        }
        let b_max = top / a;
        if b_max < a_min {
            break;
        }
        for b in a_min..=b_max.min(c4_limit) {
            if c4[b] != 0 {
                bilinear[a * b] += c4[a] * c4[b];
            }
        }
    }

    // c1 on the range by sieving multiples of each m with P(m) != 0.
    let mut c1 = vec![0i64; len];
    let m_min = (a_min * a_min).max(1);
    for m in m_min..=top {
        let p = bilinear[m];
        if p == 0 {
            continue;
        }
        let mut h = lo.div_ceil(m as u64) * m as u64;
        while h < hi {
            let mug = mu.mu(h / m as u64);
            if mug != 0 {
                c1[(h - lo) as usize] += p * mug;
            }
            h += m as u64;
        }
    }

    // c3 via Q(m) = sum_{a b = m, a <= w, b <= w} mu(a) mu(b), m <= w^2.
    let q_limit = (w_floor * w_floor).min(top);
    let mut q = vec![0i64; q_limit + 1];
    for a in 1..=w_floor.min(q_limit) {
        let mua = mu.mu(a as u64);
        if mua == 0 {
            continue;
        }
        for b in 1..=w_floor {
            let m = a * b;
            if m > q_limit {
                break;
            }
            let mub = mu.mu(b as u64);
            if mub != 0 {
                q[m] += mua * mub;
            }
        }
    }
    let mut c3 = vec![0i64; len];
    for m in 1..=q_limit {
        if q[m] == 0 {
            continue;
        }
        let mut h = lo.div_ceil(m as u64) * m as u64;
        while h < hi {
            c3[(h - lo) as usize] -= q[m];
            h += m as u64;
        }
    }

    Ok(VaughanRange {
        lo,
        hi,
        c1,
        c3,
        bilinear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_basics() {
        let t = MoebiusTable::build(100).unwrap();
        assert_eq!(t.mu(1), 1);
        assert_eq!(t.mu(2), -1);
        assert_eq!(t.mu(12), 0); // 4 | 12
        assert_eq!(t.mu(30), -1); // three distinct primes
        assert_eq!(t.mu(6), 1);
        assert!(MoebiusTable::build(0).is_err());
    }

    #[test]
    fn moebius_dirichlet_inverse() {
        // sum_{d | n} mu(d) = [n = 1]
        let t = MoebiusTable::build(5000).unwrap();
        for n in 1..=5000u64 {
            let s: i64 = divisors(n).iter().map(|&d| t.mu(d)).sum();
            assert_eq!(s, i64::from(n == 1), "n = {n}");
        }
    }

    #[test]
    fn divisor_tables_values() {
        let t = DivisorTables::build(100).unwrap();
        assert_eq!(t.d(1), 1);
        assert_eq!(t.d(12), 6);
        assert_eq!(t.d4(1), 1);
        assert_eq!(t.d4(7), 4); // prime
        assert!(DivisorTables::build(0).is_err());
    }

    /// Oracle: d4(n) counted by direct enumeration of ordered 4-tuples.
    fn d4_brute(n: u64) -> u64 {
        let mut count = 0;
        for a in divisors(n) {
            for b in divisors(n / a) {
                for c in divisors(n / a / b) {
                    let _d = n / a / b / c;
                    debug_assert_eq!(a * b * c * _d, n);
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn d4_matches_enumeration() {
        let t = DivisorTables::build(60).unwrap();
        assert_eq!(d4_brute(6), 16);
        for n in 1..=60 {
            assert_eq!(t.d4(n), d4_brute(n), "n = {n}");
        }
    }

    #[test]
    fn d4_multiplicative() {
        let t = DivisorTables::build(1000).unwrap();
        // coprime pairs
        for (a, b) in [(3u64, 8u64), (5, 9), (7, 11), (4, 25)] {
            assert_eq!(t.d4(a * b), t.d4(a) * t.d4(b));
        }
    }

    #[test]
    fn mod_inverse_values() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 2).unwrap(), 1);
        assert_eq!(mod_inverse(5, 12).unwrap(), 5);
        assert!(mod_inverse(2, 4).is_err());
        assert!(mod_inverse(3, 1).is_err());
        for k in 2..200u64 {
            for h in 1..k {
                if gcd(h, k) == 1 {
                    let hb = mod_inverse(h, k).unwrap();
                    assert!(hb >= 1 && hb < k);
                    assert_eq!((h * hb) % k, 1);
                }
            }
        }
    }

    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b > 0 {
            (a, b) = (b, a % b);
        }
        a
    }

    #[test]
    fn vaughan_examples() {
        let mu = MoebiusTable::build(100).unwrap();
        let w3 = VaughanParams::new(3.0).unwrap();
        assert_eq!(vaughan_c(5, &w3, &mu).unwrap(), (0, 0, -1));
        assert_eq!(vaughan_c(2, &w3, &mu).unwrap(), (0, -2, 1));
        assert_eq!(vaughan_c(6, &w3, &mu).unwrap(), (0, 0, 1));
        // first h with a nonzero bilinear piece at w = 3: h = 25 = 5 * 5
        let (c1, c2, c3) = vaughan_c(25, &w3, &mu).unwrap();
        assert_eq!((c1, c2, c3), (1, 0, -1));
        assert_eq!(c1 + c2 + c3, mu.mu(25));
    }

    #[test]
    fn vaughan_exactness_small() {
        let mu = MoebiusTable::build(3000).unwrap();
        for w in [2.0, 3.0, 5.5, 10.0] {
            let params = VaughanParams::new(w).unwrap();
            for h in 1..=3000u64 {
                let (c1, c2, c3) = vaughan_c(h, &params, &mu).unwrap();
                assert_eq!(c1 + c2 + c3, mu.mu(h), "h = {h}, w = {w}");
            }
        }
    }

    #[test]
    fn vaughan_coeff_a_examples() {
        let mu = MoebiusTable::build(200).unwrap();
        let w3 = VaughanParams::new(3.0).unwrap();
        assert_eq!(vaughan_coeff_a(1, &w3, &mu).unwrap(), 1);
        assert_eq!(vaughan_coeff_a(2, &w3, &mu).unwrap(), 0);
        assert_eq!(vaughan_coeff_a(4, &w3, &mu).unwrap(), 0);
        let w10 = VaughanParams::new(10.0).unwrap();
        assert_eq!(vaughan_coeff_a(1, &w10, &mu).unwrap(), 1);
    }

    #[test]
    fn coeff_a_bounded_by_d4() {
        let mu = MoebiusTable::build(2000).unwrap();
        let dt = DivisorTables::build(2000).unwrap();
        for w in [3.0, 10.0] {
            let params = VaughanParams::new(w).unwrap();
            for u in 1..=2000u64 {
                let a = vaughan_coeff_a(u, &params, &mu).unwrap();
                assert!(a.unsigned_abs() <= dt.d4(u), "u = {u}, w = {w}");
            }
        }
    }

    #[test]
    fn range_sieve_matches_per_h() {
        let mu = MoebiusTable::build(20_000).unwrap();
        for w in [3.0, 10.0] {
            let params = VaughanParams::new(w).unwrap();
            let (lo, hi) = (9_000u64, 11_000u64);
            let range = vaughan_range(lo, hi, &params, &mu).unwrap();
            for h in lo..hi {
                let (c1, _c2, c3) = vaughan_c(h, &params, &mu).unwrap();
                let i = (h - lo) as usize;
                assert_eq!(range.c1[i], c1, "c1 at h = {h}, w = {w}");
                assert_eq!(range.c3[i], c3, "c3 at h = {h}, w = {w}");
            }
        }
    }

    #[test]
    fn bilinear_consistent_with_c1() {
        // c1(h) = sum_{m | h} P(m) mu(h/m) with P from the range sieve
        let mu = MoebiusTable::build(5000).unwrap();
        let params = VaughanParams::new(3.0).unwrap();
        let range = vaughan_range(1, 5000, &params, &mu).unwrap();
        for h in [25u64, 100, 625, 1250, 2310, 4900] {
            let direct: i64 = divisors(h)
                .iter()
                .map(|&m| range.bilinear[m as usize] * mu.mu(h / m))
                .sum();
            let (c1, _, _) = vaughan_c(h, &params, &mu).unwrap();
            assert_eq!(direct, c1, "h = {h}");
        }
    }
}
