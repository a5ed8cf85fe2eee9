//! Bias coefficient, the scaled Dirichlet kernel G, the residual variance
//! E|S − G|²/H, and exhaustive searches for biased characters.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{jacobi, primes_in, PrimeContext};
use crate::characters::{Character, CharacterGroup};
use crate::error::{Error, Result};
use crate::scalar::{unit_root, unit_root_table, Scalar};
use crate::short_sums::{sliding_sums, EmpiricalDistribution, Provenance};

/// Largest modulus accepted by [`biased_real_search`].
pub const MAX_SEARCH_MODULUS: u64 = 10_000_000;

/// L = ⌊δq/H⌋, the kernel length. A relative slack of 1e−12 keeps exact
/// ratios such as δ = 6/7, q = 7, H = 2 from rounding down.
pub fn kernel_length(q: u64, h: u64, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta = {delta} outside (0, 1]")));
    }
    if h == 0 || h > q {
        return Err(Error::invalid(format!("window length {h} outside 1..={q}")));
    }
    let l = (delta * q as f64 / h as f64 * (1.0 + 1e-12)).floor() as u64;
    if l == 0 {
        return Err(Error::invalid(format!(
            "empty kernel range: δq/H = {} < 1",
            delta * q as f64 / h as f64
        )));
    }
    Ok(l)
}

/// Mean of conj χ(−k) over 1 ≤ k ≤ ⌊δq/H⌋.
pub fn alpha<T: Scalar>(chr: &Character<T>, h: u64, delta: f64) -> Result<Complex<T>> {
    let l = kernel_length(chr.modulus(), h, delta)?;
    let zero = Complex::new(T::zero(), T::zero());
    let total = (1..=l as i64).fold(zero, |acc, k| acc + chr.conj_value(-k));
    Ok(total / T::of_u64(l))
}

/// G(x) = c·Σ_{k=1}^{L} e(kx/q) with c = α·τ(χ)·H/q.
#[derive(Debug, Clone)]
pub struct DirichletKernel<T> {
    pub q: u64,
    pub h: u64,
    pub len: u64,
    pub alpha: Complex<T>,
    pub scale: Complex<T>,
}

impl<T: Scalar> DirichletKernel<T> {
    pub fn new(chr: &Character<T>, h: u64, delta: f64) -> Result<Self> {
        let a = alpha(chr, h, delta)?;
        Self::with_alpha(chr, h, delta, a)
    }

    /// Same kernel shape with a caller-chosen α.
    pub fn with_alpha(chr: &Character<T>, h: u64, delta: f64, alpha: Complex<T>) -> Result<Self> {
        let q = chr.modulus();
        let len = kernel_length(q, h, delta)?;
        let tau = chr.gauss_sum()?;
        let scale = alpha * tau * (T::of_u64(h) / T::of_u64(q));
        Ok(DirichletKernel { q, h, len, alpha, scale })
    }

    pub fn direct(&self, x: i64) -> Complex<T> {
        let q = self.q as i64;
        let x = x.rem_euclid(q) as u64;
        let zero = Complex::new(T::zero(), T::zero());
        let sum = (1..=self.len).fold(zero, |acc, k| acc + unit_root::<T>(k * x % self.q, self.q));
        self.scale * sum
    }

    /// Geometric-sum form e((L+1)x/2q)·sin(πLx/q)/sin(πx/q).
    pub fn closed(&self, x: i64) -> Complex<T> {
        let q = self.q;
        let x = x.rem_euclid(q as i64) as u64;
        if x == 0 {
            return self.scale * T::of_u64(self.len);
        }
        let two_q = 2 * q as u128;
        let phase = unit_root::<T>(((self.len as u128 + 1) * x as u128 % two_q) as u64, 2 * q);
        let num = (T::PI() * T::of_u64((self.len as u128 * x as u128 % two_q) as u64) / T::of_u64(q)).sin();
        let den = (T::PI() * T::of_u64(x) / T::of_u64(q)).sin();
        self.scale * phase * (num / den)
    }

    /// G(x) for x = 0..q.
    pub fn values(&self) -> Vec<Complex<T>> {
        (0..self.q as i64).map(|x| self.closed(x)).collect()
    }
}

#[allow(non_snake_case)]
pub fn kernel_G<T: Scalar>(chr: &Character<T>, h: u64, delta: f64, x: i64) -> Result<Complex<T>> {
    Ok(DirichletKernel::new(chr, h, delta)?.closed(x))
}

fn residuals<T: Scalar>(chr: &Character<T>, kernel: &DirichletKernel<T>) -> Result<Vec<Complex<T>>> {
    let s = sliding_sums(chr, kernel.h)?;
    Ok(s.iter().zip(kernel.values()).map(|(&s, g)| s - g).collect())
}

fn mean_sq<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>() / T::of_usize(v.len())
}

/// (1/(qH)) Σ_x |S_{χ,H}(x) − G(x)|².
pub fn variance_deficit<T: Scalar>(chr: &Character<T>, h: u64, delta: f64) -> Result<T> {
    let kernel = DirichletKernel::new(chr, h, delta)?;
    Ok(mean_sq(&residuals(chr, &kernel)?) / T::of_u64(h))
}

/// As [`variance_deficit`] with α replaced by `alpha`.
pub fn variance_deficit_with_alpha<T: Scalar>(chr: &Character<T>, h: u64, delta: f64, alpha: Complex<T>) -> Result<T> {
    let kernel = DirichletKernel::with_alpha(chr, h, delta, alpha)?;
    Ok(mean_sq(&residuals(chr, &kernel)?) / T::of_u64(h))
}

/// (1/q) Σ_x |G(x)| / √H.
#[allow(non_snake_case)]
pub fn mean_abs_G<T: Scalar>(chr: &Character<T>, h: u64, delta: f64) -> Result<T> {
    let kernel = DirichletKernel::new(chr, h, delta)?;
    let total: T = kernel.values().iter().map(|g| g.norm()).sum();
    Ok(total / T::of_u64(kernel.q) / T::of_u64(h).sqrt())
}

/// The values (S − G)/√H over all start points.
pub fn residual_distribution<T: Scalar>(chr: &Character<T>, h: u64, delta: f64) -> Result<EmpiricalDistribution<T>> {
    let kernel = DirichletKernel::new(chr, h, delta)?;
    EmpiricalDistribution::new(
        residuals(chr, &kernel)?,
        T::one() / T::of_u64(h).sqrt(),
        Provenance {
            q: chr.modulus(),
            h,
            character: Some(chr.index()),
            nodes: None,
        },
    )
}

/// One measured row of the kernel-subtraction pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelExperiment<T> {
    pub q: u64,
    pub character: u64,
    pub h: u64,
    pub delta: f64,
    pub alpha: Complex<T>,
    /// E|S − G|²/H
    pub deficit: T,
    /// E|G|/√H
    pub gmean: T,
}

impl<T: Scalar> KernelExperiment<T> {
    pub fn run(chr: &Character<T>, h: u64, delta: f64) -> Result<Self> {
        let kernel = DirichletKernel::new(chr, h, delta)?;
        let g = kernel.values();
        let s = sliding_sums(chr, h)?;
        let diff: Vec<Complex<T>> = s.iter().zip(&g).map(|(&s, &g)| s - g).collect();
        let hf = T::of_u64(h);
        let gmean = g.iter().map(|z| z.norm()).sum::<T>() / T::of_u64(kernel.q) / hf.sqrt();
        Ok(KernelExperiment {
            q: chr.modulus(),
            character: chr.index(),
            h,
            delta,
            alpha: kernel.alpha,
            deficit: mean_sq(&diff) / hf,
            gmean,
        })
    }
}

/// Odd primes q in [qlo, qhi] with their bias Σ_{n≤x}(n/q)/x, sorted by
/// bias (descending) then q.
pub fn biased_real_search(qlo: u64, qhi: u64, x: u64) -> Result<Vec<(u64, f64)>> {
    if x == 0 {
        return Err(Error::invalid("bias search needs x >= 1"));
    }
    if qhi > MAX_SEARCH_MODULUS {
        return Err(Error::invalid(format!("qhi = {qhi} exceeds {MAX_SEARCH_MODULUS}")));
    }
    let lo = qlo.max(3);
    if lo > qhi {
        return Ok(Vec::new());
    }
    let primes = primes_in(lo, qhi)?;
    let mut hits: Vec<(u64, f64)> = primes
        .par_iter()
        .map(|&q| {
            let s: i64 = (1..=x as i64).map(|n| jacobi(n, q) as i64).sum();
            (q, s as f64 / x as f64)
        })
        .collect();
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(hits)
}

/// Non-principal characters with |Σ_{n≤x} χ(n)| ≥ thresh·x, as
/// (index, |sum|/x) sorted by ratio (descending) then index.
pub fn biased_complex_search<T: Scalar>(group: &CharacterGroup<T>, x: u64, thresh: f64) -> Result<Vec<(u64, T)>> {
    let q = group.modulus();
    if x < 2 || x >= q {
        return Err(Error::invalid(format!("x = {x} outside 2..{q}")));
    }
    if !(thresh > 0.0) {
        return Err(Error::invalid(format!("threshold {thresh} must be positive")));
    }
    let ctx: &PrimeContext = group.context();
    let order = ctx.group_order();
    let logs: Vec<u64> = (1..=x as i64).map(|n| ctx.dlog(n).expect("n < q is a unit")).collect();
    let roots: Vec<Complex<T>> = unit_root_table(order);
    let cut = T::of(thresh);
    let xf = T::of_u64(x);
    let mut hits: Vec<(u64, T)> = (1..order)
        .into_par_iter()
        .filter_map(|a| {
            let zero = Complex::new(T::zero(), T::zero());
            let s = logs.iter().fold(zero, |acc, &t| acc + roots[(a as u128 * t as u128 % order as u128) as usize]);
            let ratio = s.norm() / xf;
            (ratio >= cut).then_some((a, ratio))
        })
        .collect();
    hits.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    Ok(hits)
}
