//! Random multiplicative functions, exact and Monte Carlo moment
//! discrepancies, tuple-counting oracles, and the Legendre-average
//! comparison over dyadic prime ranges.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{jacobi, primes_in, smallest_prime_factors, squarefree_part};
use crate::error::{Error, Result};
use crate::polya::{grid_size_for, Harmonic, TrigPolynomial};
use crate::scalar::{expi, Scalar};
use crate::short_sums::gaussian_moment;

pub const MAX_SAMPLE_LENGTH: usize = 1_000_000;
pub const MAX_EXACT_LENGTH: usize = 30;
pub const MAX_EXACT_ORDER: u32 = 4;
pub const MIN_MC_SAMPLES: usize = 100;
pub const ENUMERATION_BUDGET: u128 = 1_000_000_000;
pub const MAX_SECOND_MOMENT_LENGTH: usize = 100_000;
pub const MAX_DYADIC_Q: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RmfKind {
    ExtendedRademacher,
    Steinhaus,
}

/// Draws f(1..=N) for a fixed kind and length. The value at the i-th prime
/// for replica r depends only on (seed, i, r).
#[derive(Debug, Clone)]
pub struct RmfSampler {
    kind: RmfKind,
    n: usize,
    spf: Vec<u32>,
    /// prime_index[p] = position of p among the primes, for primes p ≤ N
    prime_index: Vec<u32>,
    primes: Vec<u64>,
}

impl RmfSampler {
    pub fn new(kind: RmfKind, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SAMPLE_LENGTH {
            return Err(Error::invalid(format!("RMF length {n} outside 1..={MAX_SAMPLE_LENGTH}")));
        }
        let spf = smallest_prime_factors(n);
        let mut prime_index = vec![u32::MAX; n + 1];
        let mut primes = Vec::new();
        for p in 2..=n {
            if spf[p] as usize == p {
                prime_index[p] = primes.len() as u32;
                primes.push(p as u64);
            }
        }
        Ok(RmfSampler {
            kind,
            n,
            spf,
            prime_index,
            primes,
        })
    }

    pub fn kind(&self) -> RmfKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    fn prime_value<T: Scalar>(&self, seed: u64, index: u32, replica: u64) -> Complex<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        rng.set_word_pos(replica as u128 * 16);
        match self.kind {
            RmfKind::ExtendedRademacher => {
                let s = if rng.random_bool(0.5) { T::one() } else { -T::one() };
                Complex::new(s, T::zero())
            }
            RmfKind::Steinhaus => expi(T::of(rng.random::<f64>())),
        }
    }

    pub fn draw<T: Scalar>(&self, seed: u64, replica: u64) -> RmfSample<T> {
        let prime_values: Vec<Complex<T>> = (0..self.primes.len() as u32)
            .map(|i| self.prime_value(seed, i, replica))
            .collect();
        let mut values = vec![Complex::new(T::zero(), T::zero()); self.n + 1];
        values[1] = Complex::new(T::one(), T::zero());
        for m in 2..=self.n {
            let p = self.spf[m] as usize;
            values[m] = values[m / p] * prime_values[self.prime_index[p] as usize];
        }
        RmfSample {
            kind: self.kind,
            n: self.n,
            seed,
            replica,
            primes: self.primes.clone(),
            prime_values,
            values,
        }
    }
}

/// One realisation f(1..=N).
#[derive(Debug, Clone)]
pub struct RmfSample<T> {
    pub kind: RmfKind,
    pub n: usize,
    pub seed: u64,
    pub replica: u64,
    pub primes: Vec<u64>,
    pub prime_values: Vec<Complex<T>>,
    /// values[m] = f(m) for 1 ≤ m ≤ N; values[0] is unused and zero
    values: Vec<Complex<T>>,
}

impl<T: Scalar> RmfSample<T> {
    pub fn value(&self, m: usize) -> Complex<T> {
        assert!((1..=self.n).contains(&m), "f({m}) outside 1..={}", self.n);
        self.values[m]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values[1..]
    }

    /// f(p) for a prime p ≤ N.
    pub fn prime_value(&self, p: u64) -> Option<Complex<T>> {
        self.primes.binary_search(&p).ok().map(|i| self.prime_values[i])
    }
}

pub fn sample_rmf<T: Scalar>(kind: RmfKind, n: usize, seed: u64) -> Result<RmfSample<T>> {
    Ok(RmfSampler::new(kind, n)?.draw(seed, 0))
}

fn add_exponents(acc: &mut BTreeMap<u64, i64>, m: u64, sign: i64) {
    for (p, e) in crate::arith::factorize(m) {
        *acc.entry(p).or_insert(0) += sign * e as i64;
    }
}

/// E[Π f(m_i) · conj Π f(n_i)]: 1 when the combined product is a square
/// (Rademacher) or the two products agree (Steinhaus), else 0.
pub fn expected_product(kind: RmfKind, m: &[u64], n: &[u64]) -> Result<u8> {
    if m.iter().chain(n).any(|&v| v == 0) {
        return Err(Error::invalid("tuple entries must be at least 1"));
    }
    let mut exps = BTreeMap::new();
    let sign = match kind {
        RmfKind::ExtendedRademacher => 1,
        RmfKind::Steinhaus => -1,
    };
    m.iter().for_each(|&v| add_exponents(&mut exps, v, 1));
    n.iter().for_each(|&v| add_exponents(&mut exps, v, sign));
    let hit = match kind {
        RmfKind::ExtendedRademacher => exps.values().all(|e| e % 2 == 0),
        RmfKind::Steinhaus => exps.values().all(|&e| e == 0),
    };
    Ok(hit as u8)
}

/// ∫_0^1 Π h(v_i θ) dθ over the listed frequencies; `first` of them belong
/// to the unconjugated factor (only the exponential harmonic cares).
pub(crate) fn harmonic_integral(harmonic: Harmonic, freqs: &[i64], first: usize) -> Complex<f64> {
    let r = freqs.len();
    match harmonic {
        Harmonic::Exponential => {
            let s: i64 = freqs[..first].iter().sum::<i64>() - freqs[first..].iter().sum::<i64>();
            Complex::new(if s == 0 { 1.0 } else { 0.0 }, 0.0)
        }
        Harmonic::Cosine | Harmonic::Sine => {
            let mut hits = 0i64;
            for signs in 0..(1u32 << r) {
                let mut s = 0i64;
                let mut parity = 1i64;
                for (b, &f) in freqs.iter().enumerate() {
                    if signs >> b & 1 == 1 {
                        s -= f;
                        parity = -parity;
                    } else {
                        s += f;
                    }
                }
                if s == 0 {
                    hits += if harmonic == Harmonic::Cosine { 1 } else { parity };
                }
            }
            if hits == 0 {
                return Complex::new(0.0, 0.0);
            }
            let denom = if harmonic == Harmonic::Cosine {
                Complex::new(2f64.powi(r as i32), 0.0)
            } else {
                Complex::new(0.0, 2.0).powu(r as u32)
            };
            Complex::new(hits as f64, 0.0) / denom
        }
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// The Gaussian main term subtracted inside the discrepancy.
pub fn moment_main_term<T: Scalar>(kind: RmfKind, coeffs: &[Complex<T>], j: u32, k: u32, harmonic: Harmonic) -> Result<T> {
    let s2: T = coeffs.iter().map(|a| a.norm_sqr()).sum();
    let fact = |n: u32| T::of(factorial(n));
    Ok(match (harmonic, kind) {
        (Harmonic::Exponential, _) => {
            if j == k {
                fact(k) * s2.powi(k as i32)
            } else {
                T::zero()
            }
        }
        (_, RmfKind::Steinhaus) => {
            if j == k {
                fact(k) * (s2 / T::of(2.0)).powi(k as i32)
            } else {
                T::zero()
            }
        }
        (_, RmfKind::ExtendedRademacher) => {
            if coeffs.iter().any(|a| a.im != T::zero()) {
                return Err(Error::invalid(
                    "Rademacher cosine/sine moments need real coefficients",
                ));
            }
            let r = j + k;
            if r % 2 == 1 {
                T::zero()
            } else {
                T::of(gaussian_moment(r)) * (s2 / T::of(2.0)).powi((r / 2) as i32)
            }
        }
    })
}

fn check_exact_size(n: u64, j: u32, k: u32) -> Result<()> {
    if n as usize > MAX_EXACT_LENGTH {
        return Err(Error::invalid(format!("exact oracle needs N <= {MAX_EXACT_LENGTH}, got {n}")));
    }
    if j + k > MAX_EXACT_ORDER {
        return Err(Error::invalid(format!("exact oracle needs j + k <= {MAX_EXACT_ORDER}")));
    }
    Ok(())
}

/// Product key of a tuple: the exponent vector of Πm/Πn (Steinhaus) or the
/// parity vector of Πm·Πn (Rademacher). Two tuples have correlated f-products
/// exactly when their keys agree.
fn product_key(kind: RmfKind, m: &[u64], n: &[u64]) -> Vec<(u64, i64)> {
    let mut exps = BTreeMap::new();
    m.iter().for_each(|&v| add_exponents(&mut exps, v, 1));
    let sign = if kind == RmfKind::Steinhaus { -1 } else { 1 };
    n.iter().for_each(|&v| add_exponents(&mut exps, v, sign));
    exps.into_iter()
        .map(|(p, e)| (p, if kind == RmfKind::Steinhaus { e } else { e.rem_euclid(2) }))
        .filter(|&(_, e)| e != 0)
        .collect()
}

/// E|∫ P^j conj(P)^k dθ − main|² with P(θ) = Σ a_n f(n) h(nθ), computed
/// exactly from the support list of (n, a_n) pairs.
pub fn exact_moment_discrepancy_support<T: Scalar>(
    kind: RmfKind,
    support: &[(u64, Complex<T>)],
    j: u32,
    k: u32,
    harmonic: Harmonic,
) -> Result<T> {
    let max_n = support.iter().map(|&(n, _)| n).max().unwrap_or(0);
    check_exact_size(max_n, j, k)?;
    if support.iter().any(|&(n, _)| n == 0) {
        return Err(Error::invalid("coefficient index must be at least 1"));
    }
    let coeffs: Vec<Complex<T>> = support.iter().map(|&(_, a)| a).collect();
    let main = moment_main_term(kind, &coeffs, j, k, harmonic)?;
    let r = (j + k) as usize;
    if r == 0 {
        return Ok(T::zero());
    }
    let live: Vec<(u64, Complex<T>)> = support.iter().copied().filter(|(_, a)| a.norm_sqr() > T::zero()).collect();
    let s = live.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut buckets: BTreeMap<Vec<(u64, i64)>, Complex<T>> = BTreeMap::new();
    if s > 0 {
        let mut idx = vec![0usize; r];
        'outer: loop {
            let freqs: Vec<i64> = idx.iter().map(|&i| live[i].0 as i64).collect();
            let integral = harmonic_integral(harmonic, &freqs, j as usize);
            if integral.norm_sqr() > 0.0 {
                let mut w = Complex::new(T::of(integral.re), T::of(integral.im));
                for (slot, &i) in idx.iter().enumerate() {
                    let a = live[i].1;
                    w = w * if slot < j as usize { a } else { a.conj() };
                }
                let m: Vec<u64> = idx[..j as usize].iter().map(|&i| live[i].0).collect();
                let n: Vec<u64> = idx[j as usize..].iter().map(|&i| live[i].0).collect();
                *buckets.entry(product_key(kind, &m, &n)).or_insert(zero) += w;
            }
            for pos in 0..r {
                idx[pos] += 1;
                if idx[pos] < s {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    let diag = buckets.remove(&Vec::new()).unwrap_or(zero);
    let off: T = buckets.values().map(|w| w.norm_sqr()).sum();
    Ok(off + (diag - Complex::new(main, T::zero())).norm_sqr())
}

/// Dense form: `coeffs[n − 1]` is a_n.
pub fn exact_moment_discrepancy<T: Scalar>(
    kind: RmfKind,
    coeffs: &[Complex<T>],
    j: u32,
    k: u32,
    harmonic: Harmonic,
) -> Result<T> {
    check_exact_size(coeffs.len() as u64, j, k)?;
    let support: Vec<(u64, Complex<T>)> = coeffs.iter().enumerate().map(|(i, &a)| (i as u64 + 1, a)).collect();
    exact_moment_discrepancy_support(kind, &support, j, k, harmonic)
}

/// One draw of |∫ P^j conj(P)^k dθ − main|², the θ-integral taken on an
/// equispaced grid that is exact for P's degree.
pub fn moment_discrepancy_draw<T: Scalar>(
    sample: &RmfSample<T>,
    coeffs: &[Complex<T>],
    j: u32,
    k: u32,
    harmonic: Harmonic,
    main: T,
) -> Result<T> {
    let poly = TrigPolynomial::new(
        coeffs.iter().enumerate().map(|(i, &a)| a * sample.value(i + 1)).collect(),
        harmonic,
    );
    let m = poly.grid_moment(j, k, grid_size_for(j + k, coeffs.len() + 1))?;
    Ok((m - Complex::new(main, T::zero())).norm_sqr())
}

/// Monte Carlo estimate of [`exact_moment_discrepancy`] with its standard error.
pub fn mc_moment_discrepancy<T: Scalar>(
    kind: RmfKind,
    coeffs: &[Complex<T>],
    j: u32,
    k: u32,
    harmonic: Harmonic,
    samples: usize,
    seed: u64,
) -> Result<(T, T)> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::invalid(format!("need at least {MIN_MC_SAMPLES} samples")));
    }
    if coeffs.is_empty() {
        return Err(Error::invalid("empty coefficient array"));
    }
    if j + k == 0 {
        return Ok((T::zero(), T::zero()));
    }
    let main = moment_main_term(kind, coeffs, j, k, harmonic)?;
    let sampler = RmfSampler::new(kind, coeffs.len())?;
    let draws: Vec<T> = (0..samples as u64)
        .into_par_iter()
        .map(|r| moment_discrepancy_draw(&sampler.draw(seed, r), coeffs, j, k, harmonic, main))
        .collect::<Result<_>>()?;
    Ok(mean_and_stderr(&draws))
}

pub(crate) fn mean_and_stderr<T: Scalar>(draws: &[T]) -> (T, T) {
    let n = T::of_usize(draws.len());
    let mean = draws.iter().copied().sum::<T>() / n;
    let var = draws.iter().map(|&d| (d - mean) * (d - mean)).sum::<T>() / (n - T::one());
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TupleSet {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationOrder {
    /// Every tuple visited in odometer order.
    Lexicographic,
    /// Sub-blocks grouped by (signed sum, product key) and joined.
    Bucketed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleCountReport {
    pub set: TupleSet,
    pub order: EnumerationOrder,
    pub n: u64,
    pub j: usize,
    #[serde(rename = "J")]
    pub cap_j: usize,
    pub k: usize,
    #[serde(rename = "K")]
    pub cap_k: usize,
    pub total: u64,
    pub non_permutation: u64,
}

/// Exponent vectors of 1..=N over the primes up to N.
struct Factored {
    exps: Vec<Vec<i32>>,
}

impl Factored {
    fn new(n: u64) -> Self {
        let spf = smallest_prime_factors(n as usize);
        let primes: Vec<usize> = (2..=n as usize).filter(|&p| spf[p] as usize == p).collect();
        let mut exps = vec![vec![0i32; primes.len()]; n as usize + 1];
        for m in 2..=n as usize {
            let p = spf[m] as usize;
            let mut v = exps[m / p].clone();
            v[primes.binary_search(&p).expect("spf is prime")] += 1;
            exps[m] = v;
        }
        Factored { exps }
    }

    fn add(&self, acc: &mut [i32], m: u64, sign: i32) {
        acc.iter_mut().zip(&self.exps[m as usize]).for_each(|(a, &e)| *a += sign * e);
    }
}

#[derive(Clone, Copy)]
struct Shape {
    j: usize,
    cap_j: usize,
    k: usize,
    cap_k: usize,
}

impl Shape {
    fn block_sum(&self, m: &[u64], n: &[u64]) -> i64 {
        let sm: i64 = m.iter().enumerate().map(|(i, &v)| if i < self.j { v as i64 } else { -(v as i64) }).sum();
        let sn: i64 = n.iter().enumerate().map(|(i, &v)| if i < self.k { v as i64 } else { -(v as i64) }).sum();
        sm - sn
    }

    fn weighted_set(first: usize, xs: &[u64]) -> BTreeMap<u64, i32> {
        let mut w = BTreeMap::new();
        for (i, &x) in xs.iter().enumerate() {
            *w.entry(x).or_insert(0) += if i < first { 1 } else { -1 };
        }
        w.retain(|_, v| *v != 0);
        w
    }

    fn weighted_sets_differ(&self, m: &[u64], n: &[u64]) -> bool {
        Self::weighted_set(self.j, m) != Self::weighted_set(self.k, n)
    }
}

fn is_permutation(a: &[u64], b: &[u64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

fn checked_visits(n: u64, len: usize) -> Result<()> {
    let needed = (n as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            cap: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Calls `visit` on every tuple in [1, N]^len whose first entry is `head`.
fn for_each_tuple_with_head(n: u64, len: usize, head: u64, mut visit: impl FnMut(&[u64])) {
    let mut t = vec![1u64; len];
    t[0] = head;
    loop {
        visit(&t);
        let mut pos = len - 1;
        loop {
            if pos == 0 {
                return;
            }
            t[pos] += 1;
            if t[pos] <= n {
                break;
            }
            t[pos] = 1;
            pos -= 1;
        }
    }
}

fn all_tuples(n: u64, len: usize) -> Vec<Vec<u64>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for head in 1..=n {
        for_each_tuple_with_head(n, len, head, |t| out.push(t.to_vec()));
    }
    out
}

/// Exhaustive count of the sets A, B and C together with the tuples that
/// violate the weighted-set (A) or permutation (B, C) conclusion.
pub fn count_set(
    set: TupleSet,
    n: u64,
    (j, cap_j): (usize, usize),
    (k, cap_k): (usize, usize),
    order: EnumerationOrder,
) -> Result<TupleCountReport> {
    if n == 0 || j > cap_j || k > cap_k || cap_j + cap_k == 0 {
        return Err(Error::invalid(format!(
            "need N >= 1, j <= J, k <= K and J + K >= 1 (got N={n}, j={j}, J={cap_j}, k={k}, K={cap_k})"
        )));
    }
    let len = cap_j + cap_k;
    checked_visits(n, if set == TupleSet::C { 2 * len } else { len })?;
    let shape = Shape { j, cap_j, k, cap_k };
    let fac = Factored::new(n);
    let (total, non_permutation) = match (set, order) {
        (TupleSet::C, EnumerationOrder::Lexicographic) => count_c_lex(&fac, n, shape),
        (TupleSet::C, EnumerationOrder::Bucketed) => count_c_bucketed(&fac, n, shape),
        (_, EnumerationOrder::Lexicographic) => count_ab_lex(set, &fac, n, shape),
        (_, EnumerationOrder::Bucketed) => count_ab_bucketed(set, &fac, n, shape),
    };
    Ok(TupleCountReport {
        set,
        order,
        n,
        j,
        cap_j,
        k,
        cap_k,
        total,
        non_permutation,
    })
}

fn ab_member(set: TupleSet, fac: &Factored, shape: Shape, m: &[u64], nn: &[u64]) -> bool {
    if shape.block_sum(m, nn) != 0 {
        return false;
    }
    let mut acc = vec![0i32; fac.exps[1].len()];
    m.iter().for_each(|&v| fac.add(&mut acc, v, 1));
    match set {
        TupleSet::A => {
            nn.iter().for_each(|&v| fac.add(&mut acc, v, 1));
            acc.iter().all(|e| e % 2 == 0)
        }
        _ => {
            nn.iter().for_each(|&v| fac.add(&mut acc, v, -1));
            acc.iter().all(|&e| e == 0)
        }
    }
}

fn ab_violates(set: TupleSet, shape: Shape, m: &[u64], nn: &[u64]) -> bool {
    match set {
        TupleSet::A => shape.weighted_sets_differ(m, nn),
        _ => !is_permutation(m, nn),
    }
}

fn count_ab_lex(set: TupleSet, fac: &Factored, n: u64, shape: Shape) -> (u64, u64) {
    let len = shape.cap_j + shape.cap_k;
    (1..=n)
        .into_par_iter()
        .map(|head| {
            let (mut total, mut bad) = (0u64, 0u64);
            for_each_tuple_with_head(n, len, head, |t| {
                let (m, nn) = t.split_at(shape.cap_j);
                if ab_member(set, fac, shape, m, nn) {
                    total += 1;
                    bad += ab_violates(set, shape, m, nn) as u64;
                }
            });
            (total, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Key of one side: signed sum plus the exponent (B) or parity (A) vector.
fn side_key(set: TupleSet, fac: &Factored, first: usize, xs: &[u64]) -> (i64, Vec<i32>) {
    let s: i64 = xs.iter().enumerate().map(|(i, &v)| if i < first { v as i64 } else { -(v as i64) }).sum();
    let mut acc = vec![0i32; fac.exps[1].len()];
    xs.iter().for_each(|&v| fac.add(&mut acc, v, 1));
    if set == TupleSet::A {
        acc.iter_mut().for_each(|e| *e = e.rem_euclid(2));
    }
    (s, acc)
}

fn count_ab_bucketed(set: TupleSet, fac: &Factored, n: u64, shape: Shape) -> (u64, u64) {
    let mut buckets: BTreeMap<(i64, Vec<i32>), Vec<Vec<u64>>> = BTreeMap::new();
    for nn in all_tuples(n, shape.cap_k) {
        buckets.entry(side_key(set, fac, shape.k, &nn)).or_default().push(nn);
    }
    all_tuples(n, shape.cap_j)
        .par_iter()
        .map(|m| {
            let (mut total, mut bad) = (0u64, 0u64);
            if let Some(list) = buckets.get(&side_key(set, fac, shape.j, m)) {
                for nn in list {
                    total += 1;
                    bad += ab_violates(set, shape, m, nn) as u64;
                }
            }
            (total, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn ratio_key(fac: &Factored, shape: Shape, block: &[u64]) -> Vec<i32> {
    let (m, nn) = block.split_at(shape.cap_j);
    let mut acc = vec![0i32; fac.exps[1].len()];
    m.iter().for_each(|&v| fac.add(&mut acc, v, 1));
    nn.iter().for_each(|&v| fac.add(&mut acc, v, -1));
    acc
}

fn count_c_lex(fac: &Factored, n: u64, shape: Shape) -> (u64, u64) {
    let len = shape.cap_j + shape.cap_k;
    (1..=n)
        .into_par_iter()
        .map(|head| {
            let (mut total, mut bad) = (0u64, 0u64);
            for_each_tuple_with_head(n, 2 * len, head, |t| {
                let (b1, b2) = t.split_at(len);
                let (m1, n1) = b1.split_at(shape.cap_j);
                let (m2, n2) = b2.split_at(shape.cap_j);
                if shape.block_sum(m1, n1) != 0 || shape.block_sum(m2, n2) != 0 {
                    return;
                }
                // Πm1·Πn2 = Πm2·Πn1
                let mut acc = vec![0i32; fac.exps[1].len()];
                m1.iter().chain(n2).for_each(|&v| fac.add(&mut acc, v, 1));
                m2.iter().chain(n1).for_each(|&v| fac.add(&mut acc, v, -1));
                if acc.iter().all(|&e| e == 0) {
                    total += 1;
                    bad += (!is_permutation(m1, n1) || !is_permutation(m2, n2)) as u64;
                }
            });
            (total, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn count_c_bucketed(fac: &Factored, n: u64, shape: Shape) -> (u64, u64) {
    // Blocks satisfying their own linear equation, bucketed by Πm/Πn;
    // per bucket keep (all blocks, permutation blocks).
    let mut buckets: BTreeMap<Vec<i32>, (u64, u64)> = BTreeMap::new();
    for block in all_tuples(n, shape.cap_j + shape.cap_k) {
        let (m, nn) = block.split_at(shape.cap_j);
        if shape.block_sum(m, nn) != 0 {
            continue;
        }
        let e = buckets.entry(ratio_key(fac, shape, &block)).or_insert((0, 0));
        e.0 += 1;
        e.1 += is_permutation(m, nn) as u64;
    }
    buckets
        .values()
        .fold((0, 0), |(t, b), &(c, p)| (t + c * c, b + c * c - p * p))
}

/// Σ over (m, n) ∈ [N]^k × [N]^k with n a permutation of m of
/// Π a_{m_i} · Π conj a_{n_i}, by literal enumeration.
pub fn diagonal_contribution<T: Scalar>(coeffs: &[Complex<T>], k: usize) -> Result<Complex<T>> {
    let n = coeffs.len() as u64;
    if n == 0 {
        return Err(Error::invalid("empty coefficient array"));
    }
    checked_visits(n, 2 * k)?;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    if k == 0 {
        return Ok(one);
    }
    let tuples = all_tuples(n, k);
    let prod = |t: &[u64], conj: bool| {
        t.iter().fold(one, |acc, &v| {
            let a = coeffs[v as usize - 1];
            acc * if conj { a.conj() } else { a }
        })
    };
    Ok(tuples
        .iter()
        .map(|m| {
            tuples
                .iter()
                .filter(|nn| is_permutation(m, nn))
                .fold(zero, |acc, nn| acc + prod(m, false) * prod(nn, true))
        })
        .fold(zero, |a, b| a + b))
}

/// E|Σ α_n f(n)|² for extended Rademacher f: Σ over squarefree s of
/// |Σ_{s(n)=s} α_n|², with `alpha[n − 1]` = α_n.
pub fn rmf_second_moment<T: Scalar>(alpha: &[Complex<T>]) -> Result<T> {
    if alpha.len() > MAX_SECOND_MOMENT_LENGTH {
        return Err(Error::invalid(format!("N = {} exceeds {MAX_SECOND_MOMENT_LENGTH}", alpha.len())));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut classes: BTreeMap<u64, Complex<T>> = BTreeMap::new();
    for (i, &a) in alpha.iter().enumerate() {
        *classes.entry(squarefree_part(i as u64 + 1)?).or_insert(zero) += a;
    }
    Ok(classes.values().map(|c| c.norm_sqr()).sum())
}

/// (log Q/Q) Σ_{Q ≤ q ≤ 2Q prime} |Σ_{n≤N} α_n (n/q)|².
pub fn dyadic_prime_average<T: Scalar>(big_q: u64, alpha: &[Complex<T>]) -> Result<T> {
    let n = alpha.len() as u64;
    if big_q < 3 || big_q > MAX_DYADIC_Q {
        return Err(Error::invalid(format!("Q = {big_q} outside 3..={MAX_DYADIC_Q}")));
    }
    if n > big_q {
        return Err(Error::invalid(format!("N = {n} exceeds Q = {big_q}")));
    }
    let primes = primes_in(big_q, 2 * big_q)?;
    let zero = Complex::new(T::zero(), T::zero());
    let terms: Vec<T> = primes
        .par_iter()
        .map(|&q| {
            alpha
                .iter()
                .enumerate()
                .fold(zero, |acc, (i, &a)| acc + a * T::of(jacobi(i as i64 + 1, q) as f64))
                .norm_sqr()
        })
        .collect();
    let total: T = terms.into_iter().sum();
    Ok(T::of_u64(big_q).ln() / T::of_u64(big_q) * total)
}
