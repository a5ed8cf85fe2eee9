//! Integer and special-function substrate: prime enumeration, primitive
//! roots, discrete logarithms, squarefree parts and the Dickman function.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest value accepted by [`primes_in`] and [`squarefree_part`].
pub const MAX_INTEGER: u64 = 1 << 40;

/// Widest interval [`primes_in`] will enumerate in one call.
pub const MAX_PRIME_RANGE_WIDTH: u64 = 1 << 30;

/// Largest modulus for which a [`PrimeContext`] (two `u32` tables of length q) is built.
pub const MAX_CONTEXT_MODULUS: u64 = 100_000_000;

const SIEVE_SEGMENT: u64 = 1 << 18;

/// Simple sieve of Eratosthenes for all primes `<= limit`.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for n in 2..=limit {
        if composite[n] {
            continue;
        }
        primes.push(n as u64);
        let mut m = n * n;
        while m <= limit {
            composite[m] = true;
            m += n;
        }
    }
    primes
}

/// All primes in the closed interval `[lo, hi]`, ascending.
///
/// Segmented sieve over blocks of 2^18 integers with base primes up to √hi.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo < 2 || lo > hi {
        return Err(Error::invalid(format!(
            "prime range [{lo}, {hi}] must satisfy 2 <= lo <= hi"
        )));
    }
    if hi > MAX_INTEGER {
        return Err(Error::invalid(format!("prime range upper end {hi} exceeds 2^40")));
    }
    if hi - lo >= MAX_PRIME_RANGE_WIDTH {
        return Err(Error::invalid(format!(
            "prime range width {} exceeds {MAX_PRIME_RANGE_WIDTH}",
            hi - lo + 1
        )));
    }
    let base = small_primes(isqrt(hi));
    let mut out = Vec::new();
    let mut seg_lo = lo;
    while seg_lo <= hi {
        let seg_hi = hi.min(seg_lo + SIEVE_SEGMENT - 1);
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let first = (p * p).max(seg_lo.div_ceil(p) * p);
            let mut m = first;
            while m <= seg_hi {
                composite[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| seg_lo + i as u64),
        );
        seg_lo = seg_hi + 1;
    }
    Ok(out)
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest prime factor for every integer in `0..=limit` (entries 0 and 1 are 0).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for n in 2..=limit {
        if spf[n] != 0 {
            continue;
        }
        let mut m = n;
        while m <= limit {
            if spf[m] == 0 {
                spf[m] = n as u32;
            }
            m += n;
        }
    }
    spf
}

/// Smallest generator of the multiplicative group mod the prime `q` (1 for q = 2).
pub fn primitive_root(q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q == 2 {
        return Ok(1);
    }
    let order = q - 1;
    let divisors: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
    (2..q)
        .find(|&g| divisors.iter().all(|&p| pow_mod(g, order / p, q) != 1))
        .ok_or(Error::NotPrime(q))
}

/// `n` divided by its largest square divisor.
pub fn squarefree_part(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::invalid("squarefree part of 0 is undefined"));
    }
    if n > MAX_INTEGER {
        return Err(Error::invalid(format!("{n} exceeds 2^40")));
    }
    Ok(factorize(n)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product())
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// A prime modulus with its smallest primitive root and discrete-log table.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    q: u64,
    g: u64,
    dlog: Vec<u32>,
    powers: Vec<u32>,
}

impl PrimeContext {
    /// One pass over the powers of g fills both tables; O(q) time and memory.
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_CONTEXT_MODULUS {
            return Err(Error::invalid(format!(
                "modulus {q} exceeds the table cap {MAX_CONTEXT_MODULUS}"
            )));
        }
        let g = primitive_root(q)?;
        let order = (q - 1) as usize;
        let mut dlog = vec![0u32; q as usize];
        let mut powers = Vec::with_capacity(order.max(1));
        let mut x = 1u64;
        for t in 0..order.max(1) {
            dlog[x as usize] = t as u32;
            powers.push(x as u32);
            x = x * g % q;
        }
        Ok(PrimeContext { q, g, dlog, powers })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the multiplicative group, q − 1.
    pub fn group_order(&self) -> u64 {
        self.q - 1
    }

    /// Discrete log of `n` to base g; `None` when q | n.
    pub fn dlog(&self, n: i64) -> Option<u64> {
        let r = n.rem_euclid(self.q as i64) as usize;
        (r != 0).then(|| self.dlog[r] as u64)
    }

    /// `g^t mod q`.
    pub fn power(&self, t: u64) -> u64 {
        self.powers[(t % self.group_order().max(1)) as usize] as u64
    }
}

/// Step of the fixed-step integrator for [`dickman_rho`].
pub const DICKMAN_STEP: f64 = 1e-4;
const DICKMAN_MAX_U: f64 = 10.0;

fn dickman_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let per_unit = (1.0 / DICKMAN_STEP).round() as usize;
        let n = per_unit * DICKMAN_MAX_U as usize;
        let h = DICKMAN_STEP;
        let mut rho = vec![1.0f64; n + 1];
        // Delayed value rho(s) for s on the half-step grid, s in [0, 10].
        let delayed = |rho: &[f64], i2: usize| -> f64 {
            // i2 indexes the half-grid: s = i2 * h / 2.
            if i2 <= 2 * per_unit {
                return 1.0;
            }
            if i2 % 2 == 0 {
                return rho[i2 / 2];
            }
            let i = i2 / 2;
            // Cubic Lagrange midpoint; the stencil stays on one side of the
            // integer points where rho loses smoothness.
            if i % per_unit == 0 {
                (5.0 * rho[i] + 15.0 * rho[i + 1] - 5.0 * rho[i + 2] + rho[i + 3]) / 16.0
            } else if (i + 1) % per_unit == 0 {
                (rho[i - 2] - 5.0 * rho[i - 1] + 15.0 * rho[i] + 5.0 * rho[i + 1]) / 16.0
            } else {
                (-rho[i - 1] + 9.0 * rho[i] + 9.0 * rho[i + 1] - rho[i + 2]) / 16.0
            }
        };
        // RK4 for rho'(u) = -rho(u - 1) / u starting from rho(1) = 1.
        for i in per_unit..n {
            let u = i as f64 * h;
            let base = 2 * (i - per_unit);
            let k1 = -delayed(&rho, base) / u;
            let k23 = -delayed(&rho, base + 1) / (u + 0.5 * h);
            let k4 = -delayed(&rho, base + 2) / (u + h);
            rho[i + 1] = rho[i] + h / 6.0 * (k1 + 4.0 * k23 + k4);
        }
        rho
    })
}

/// Dickman's function ρ(u) for 0 ≤ u ≤ 10, accurate to about 1e−10 absolute.
pub fn dickman_rho(u: f64) -> Result<f64> {
    if !(0.0..=DICKMAN_MAX_U).contains(&u) {
        return Err(Error::invalid(format!("dickman_rho argument {u} outside [0, 10]")));
    }
    if u <= 1.0 {
        return Ok(1.0);
    }
    let table = dickman_table();
    let pos = u / DICKMAN_STEP;
    let i = (pos.floor() as usize).min(table.len() - 2);
    let t = pos - i as f64;
    if t == 0.0 {
        return Ok(table[i]);
    }
    // Cubic interpolation on four nodes inside the same unit interval as u.
    let per_unit = (1.0 / DICKMAN_STEP).round() as usize;
    let start = (i / per_unit) * per_unit;
    let lo = i.saturating_sub(1).clamp(start, start + per_unit - 3);
    let xs = [lo, lo + 1, lo + 2, lo + 3];
    let mut acc = 0.0;
    for (a, &xa) in xs.iter().enumerate() {
        let mut w = 1.0;
        for (b, &xb) in xs.iter().enumerate() {
            if a != b {
                w *= (pos - xb as f64) / (xa as f64 - xb as f64);
            }
        }
        acc += w * table[xa];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primes_in_small_ranges() {
        assert_eq!(primes_in(10, 20).unwrap(), vec![11, 13, 17, 19]);
        assert_eq!(primes_in(2, 2).unwrap(), vec![2]);
        assert!(primes_in(90, 96).unwrap().is_empty());
    }

    #[test]
    fn primes_in_rejects_bad_ranges() {
        assert!(primes_in(20, 10).is_err());
        assert!(primes_in(0, 10).is_err());
        assert!(primes_in(2, MAX_INTEGER + 1).is_err());
        assert!(primes_in(2, MAX_PRIME_RANGE_WIDTH + 5).is_err());
    }

    #[test]
    fn segmented_sieve_matches_trial_division() {
        let lo = 999_000;
        let hi = 1_300_000; // spans two segments
        let fast = primes_in(lo, hi).unwrap();
        let slow: Vec<u64> = (lo..=hi).filter(|&n| factorize(n) == vec![(n, 1)]).collect();
        assert_eq!(fast, slow);
        assert_eq!(primes_in(2, 100_000).unwrap().len(), 9592);
    }

    #[test]
    fn primes_near_the_cap() {
        let hi = MAX_INTEGER;
        let ps = primes_in(hi - 200, hi).unwrap();
        assert!(!ps.is_empty());
        assert!(ps.iter().all(|&p| is_prime(p)));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(2).unwrap(), 1);
        assert_eq!(primitive_root(5).unwrap(), 2);
        assert_eq!(primitive_root(101).unwrap(), 2);
        assert!(matches!(primitive_root(9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn primitive_root_is_smallest_by_exhaustive_order() {
        fn order(g: u64, q: u64) -> u64 {
            let mut x = g % q;
            let mut t = 1;
            while x != 1 {
                x = x * g % q;
                t += 1;
            }
            t
        }
        for q in primes_in(3, 2000).unwrap() {
            let g = primitive_root(q).unwrap();
            assert_eq!(order(g, q), q - 1);
            assert!((2..g).all(|h| order(h, q) < q - 1));
        }
    }

    #[test]
    fn discrete_log_table_is_bijective() {
        for q in primes_in(2, 100_000).unwrap().into_iter().step_by(97) {
            let ctx = PrimeContext::new(q).unwrap();
            let mut seen = vec![false; q as usize];
            for t in 0..ctx.group_order() {
                let x = ctx.power(t);
                assert!(!seen[x as usize]);
                seen[x as usize] = true;
                assert_eq!(ctx.dlog(x as i64), Some(t));
            }
            assert!(seen[1..].iter().all(|&s| s));
            assert_eq!(ctx.dlog(0), None);
        }
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(12).unwrap(), 3);
        assert_eq!(squarefree_part(1).unwrap(), 1);
        assert_eq!(squarefree_part(360).unwrap(), 10);
        assert!(squarefree_part(0).is_err());
    }

    #[test]
    fn jacobi_matches_euler_criterion() {
        for q in primes_in(3, 500).unwrap() {
            for n in -50i64..600 {
                let r = n.rem_euclid(q as i64) as u64;
                let euler = match pow_mod(r, (q - 1) / 2, q) {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(jacobi(n, q), euler, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn dickman_on_first_interval() {
        assert_eq!(dickman_rho(0.5).unwrap(), 1.0);
        assert_eq!(dickman_rho(0.0).unwrap(), 1.0);
        assert_eq!(dickman_rho(1.0).unwrap(), 1.0);
        for u in [1.1, 1.5, 1.99, 2.0] {
            let exact = 1.0 - f64::ln(u);
            assert!((dickman_rho(u).unwrap() - exact).abs() < 1e-9, "u={u}");
        }
        assert!((dickman_rho(2.0).unwrap() - 0.306853).abs() < 1e-6);
    }

    /// On [2, 3], ρ(u) = 1 − ln u + ∫_2^u ln(t − 1)/t dt; the integral by fine Simpson.
    fn rho_closed_form_second_interval(u: f64) -> f64 {
        let n = 200_000;
        let h = (u - 2.0) / n as f64;
        let f = |t: f64| (t - 1.0).ln() / t;
        let mut s = f(2.0) + f(u);
        for i in 1..n {
            let t = 2.0 + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
        }
        1.0 - u.ln() + s * h / 3.0
    }

    #[test]
    fn dickman_on_second_interval_matches_quadrature() {
        for u in [2.25, 2.5, 2.75, 3.0] {
            let oracle = rho_closed_form_second_interval(u);
            assert!((dickman_rho(u).unwrap() - oracle).abs() < 1e-8, "u={u}");
        }
        assert!((dickman_rho(3.0).unwrap() - 0.048608).abs() < 1e-6);
    }

    #[test]
    fn dickman_reference_values() {
        // Tabulated ρ(4), ρ(5), ρ(10).
        assert!((dickman_rho(4.0).unwrap() - 4.910_925_648_93e-3).abs() < 1e-9);
        assert!((dickman_rho(5.0).unwrap() - 3.547_247_005_96e-4).abs() < 1e-9);
        assert!((dickman_rho(10.0).unwrap() - 2.770_171_837_79e-11).abs() < 1e-12);
        assert!(dickman_rho(10.5).is_err());
        assert!(dickman_rho(-0.1).is_err());
    }

    #[test]
    fn dickman_monotone_and_positive() {
        let mut prev = dickman_rho(1.0).unwrap();
        let mut u = 1.0f64;
        while u < 10.0 {
            u += 0.013;
            let r = dickman_rho(u.min(10.0)).unwrap();
            assert!(r > 0.0 && r <= prev + 1e-15, "u={u}");
            prev = r;
        }
    }

    proptest! {
        #[test]
        fn squarefree_part_is_multiplicative_mod_squares(n in 1u64..=10_000, m in 1u64..=10_000) {
            let lhs = squarefree_part(n * m).unwrap();
            let rhs = squarefree_part(squarefree_part(n).unwrap() * squarefree_part(m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn miller_rabin_agrees_with_trial_division(n in 0u64..2_000_000) {
            let trial = n >= 2 && factorize(n) == vec![(n, 1)];
            prop_assert_eq!(is_prime(n), trial);
        }
    }
}
