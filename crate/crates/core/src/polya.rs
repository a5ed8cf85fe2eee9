//! Truncated Pólya Fourier expansion of character sums, the reduction of
//! normalized short sums to cosine/sine series in a uniform phase, and
//! equispaced quadrature that integrates trigonometric polynomials exactly.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::characters::{Character, Parity};
use crate::error::{Error, Result};
use crate::scalar::{unit_root_table, Scalar};
use crate::short_sums::{EmpiricalDistribution, Provenance};

/// Which harmonic multiplies each coefficient: e(kθ), cos(2πkθ) or sin(2πkθ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Harmonic {
    Exponential,
    Cosine,
    Sine,
}

/// Σ_{k=1}^{deg} c_k·h(kθ) with h one of the three harmonics.
#[derive(Debug, Clone)]
pub struct TrigPolynomial<T> {
    /// coeffs[k − 1] multiplies frequency k
    pub coeffs: Vec<Complex<T>>,
    pub harmonic: Harmonic,
}

/// Nodes needed for exact (j, k)-moments of a polynomial with frequencies below `kmax`.
pub fn grid_size_for(order: u32, kmax: usize) -> usize {
    2 * order.max(1) as usize * kmax.max(1) + 1
}

impl<T: Scalar> TrigPolynomial<T> {
    pub fn new(coeffs: Vec<Complex<T>>, harmonic: Harmonic) -> Self {
        TrigPolynomial { coeffs, harmonic }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn evaluate(&self, theta: T) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        self.coeffs.iter().enumerate().fold(zero, |acc, (i, &c)| {
            let angle = T::TAU() * T::of_usize(i + 1) * theta;
            acc + match self.harmonic {
                Harmonic::Exponential => c * Complex::new(angle.cos(), angle.sin()),
                Harmonic::Cosine => c * angle.cos(),
                Harmonic::Sine => c * angle.sin(),
            }
        })
    }

    /// Values at θ_m = m/M for m = 0..M, using one table of M-th roots of unity.
    pub fn evaluate_grid(&self, nodes: usize) -> Vec<Complex<T>> {
        let roots: Vec<Complex<T>> = unit_root_table(nodes as u64);
        self.evaluate_with_roots(&roots)
    }

    pub(crate) fn evaluate_with_roots(&self, roots: &[Complex<T>]) -> Vec<Complex<T>> {
        let nodes = roots.len();
        let zero = Complex::new(T::zero(), T::zero());
        (0..nodes)
            .map(|m| {
                self.coeffs.iter().enumerate().fold(zero, |acc, (i, &c)| {
                    let r = roots[((i + 1) * m) % nodes];
                    acc + match self.harmonic {
                        Harmonic::Exponential => c * r,
                        Harmonic::Cosine => c * r.re,
                        Harmonic::Sine => c * r.im,
                    }
                })
            })
            .collect()
    }

    /// ∫_0^1 P^j conj(P)^k dθ by the equispaced rule; exact when
    /// `nodes > (j + k)·degree`.
    pub fn grid_moment(&self, j: u32, k: u32, nodes: usize) -> Result<Complex<T>> {
        if nodes <= (j + k) as usize * self.degree() {
            return Err(Error::invalid(format!(
                "{nodes} nodes cannot integrate a degree-{} polynomial to order {}",
                self.degree(),
                j + k
            )));
        }
        Ok(power_mean(&self.evaluate_grid(nodes), j, k))
    }
}

/// Mean of v^j conj(v)^k over `values`.
pub fn power_mean<T: Scalar>(values: &[Complex<T>], j: u32, k: u32) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let total = values
        .iter()
        .map(|v| v.powu(j) * v.conj().powu(k))
        .fold(zero, |a, b| a + b);
    total / T::of_usize(values.len().max(1))
}

/// Pólya expansion of a fixed non-principal character, with τ(χ) and the
/// q-th roots of unity computed once.
#[derive(Debug, Clone)]
pub struct PolyaExpansion<T> {
    chr: Character<T>,
    tau: Complex<T>,
    roots: Vec<Complex<T>>,
}

impl<T: Scalar> PolyaExpansion<T> {
    pub fn new(chr: &Character<T>) -> Result<Self> {
        let tau = chr.gauss_sum()?;
        Ok(PolyaExpansion {
            chr: chr.clone(),
            tau,
            roots: unit_root_table(chr.modulus()),
        })
    }

    pub fn gauss_sum(&self) -> Complex<T> {
        self.tau
    }

    fn e(&self, k: i64, x: i64) -> Complex<T> {
        let q = self.chr.modulus() as i64;
        self.roots[(k.rem_euclid(q) * x.rem_euclid(q)).rem_euclid(q) as usize]
    }

    fn prefactor(&self) -> Complex<T> {
        // τ(χ) / (2πi)
        self.tau / Complex::new(T::zero(), T::TAU())
    }

    /// (τ/2πi) Σ_{0<|k|≤K} (conj χ(−k)/k)(e(kx/q) − 1).
    pub fn partial(&self, x: i64, cutoff: u64) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let total = (1..=cutoff as i64).fold(zero, |acc, k| {
            let kf = T::of_i64(k);
            let pos = self.chr.conj_value(-k) * (self.e(k, x) - one) / kf;
            let neg = self.chr.conj_value(k) * (self.e(-k, x) - one) / (-kf);
            acc + pos + neg
        });
        self.prefactor() * total
    }

    /// (τ/2πi) Σ_{0<|k|<q/2} (conj χ(−k)/k) e(kx/q)(e(kH/q) − 1).
    pub fn window(&self, h: u64, x: i64) -> Complex<T> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        let half = (self.chr.modulus() as i64 - 1) / 2;
        let h = h as i64;
        let total = (1..=half).fold(zero, |acc, k| {
            let kf = T::of_i64(k);
            let pos = self.chr.conj_value(-k) * self.e(k, x) * (self.e(k, h) - one) / kf;
            let neg = self.chr.conj_value(k) * self.e(-k, x) * (self.e(-k, h) - one) / (-kf);
            acc + pos + neg
        });
        self.prefactor() * total
    }
}

pub fn polya_partial<T: Scalar>(chr: &Character<T>, x: i64, cutoff: u64) -> Result<Complex<T>> {
    if cutoff == 0 {
        return Err(Error::invalid("Pólya cutoff must be at least 1"));
    }
    Ok(PolyaExpansion::new(chr)?.partial(x, cutoff))
}

pub fn window_series<T: Scalar>(chr: &Character<T>, h: u64, x: i64) -> Result<Complex<T>> {
    if h == 0 || h > chr.modulus() {
        return Err(Error::invalid(format!("window length {h} outside 1..={}", chr.modulus())));
    }
    Ok(PolyaExpansion::new(chr)?.window(h, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFlavor {
    Cosine,
    Sine,
}

impl SeriesFlavor {
    /// Cosine for even characters, sine for odd ones.
    pub fn for_parity(parity: Parity) -> Self {
        match parity {
            Parity::Odd => SeriesFlavor::Sine,
            _ => SeriesFlavor::Cosine,
        }
    }

    pub fn harmonic(self) -> Harmonic {
        match self {
            SeriesFlavor::Cosine => Harmonic::Cosine,
            SeriesFlavor::Sine => Harmonic::Sine,
        }
    }
}

/// Truncation point ⌈(q/H)·ln(q/H)⌉; retained frequencies are 1 ≤ k < kmax.
pub fn truncation(q: u64, h: u64) -> usize {
    let r = q as f64 / h as f64;
    (r * r.ln()).ceil() as usize
}

fn check_series_input<T: Scalar>(chr: &Character<T>, h: u64) -> Result<()> {
    if chr.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let q = chr.modulus();
    if h == 0 || 3 * h > q {
        return Err(Error::invalid(format!(
            "series needs q/H >= 3 (q = {q}, H = {h})"
        )));
    }
    Ok(())
}

/// a_k = q·sin(πkH/q)/(πHk).
pub fn series_coefficient<T: Scalar>(q: u64, h: u64, k: u64) -> T {
    let ratio = T::of_u64(h) / T::of_u64(q);
    let arg = T::PI() * T::of_u64(k) * ratio;
    arg.sin() / arg
}

/// The short cosine (or sine) series standing in for S_{χ,H}(X)/√H:
/// 2√(H/q) Σ_{1≤k<kmax} a_k·conj χ(k)·h(2πkθ).
#[derive(Debug, Clone)]
pub struct CosineSeries<T> {
    pub q: u64,
    pub h: u64,
    pub kmax: usize,
    /// coeffs[k − 1] = a_k
    pub coeffs: Vec<T>,
    /// charvals[k − 1] = conj χ(k)
    pub charvals: Vec<Complex<T>>,
    pub flavor: SeriesFlavor,
    pub character: u64,
}

impl<T: Scalar> CosineSeries<T> {
    /// 2√(H/q), the factor turning the a_k-polynomial into the normalized series.
    pub fn scale(&self) -> T {
        T::of(2.0) * (T::of_u64(self.h) / T::of_u64(self.q)).sqrt()
    }

    /// ½ Σ |a_k|².
    pub fn half_sum_sq(&self) -> T {
        self.coeffs.iter().map(|&a| a * a).sum::<T>() / T::of(2.0)
    }

    /// Σ a_k·conj χ(k)·h(2πkθ), without the normalizing scale.
    pub fn raw_polynomial(&self) -> TrigPolynomial<T> {
        TrigPolynomial::new(
            self.coeffs
                .iter()
                .zip(&self.charvals)
                .map(|(&a, &c)| c * a)
                .collect(),
            self.flavor.harmonic(),
        )
    }

    pub fn polynomial(&self) -> TrigPolynomial<T> {
        let s = self.scale();
        let mut p = self.raw_polynomial();
        p.coeffs.iter_mut().for_each(|c| *c = *c * s);
        p
    }

    pub fn evaluate(&self, theta: T) -> Complex<T> {
        self.polynomial().evaluate(theta)
    }

    /// Exact mean square over θ: (2q/π²H) Σ_{k<kmax} |χ(k)|² sin²(πkH/q)/k².
    pub fn mean_square(&self) -> T {
        let q = T::of_u64(self.q);
        let h = T::of_u64(self.h);
        let pre = T::of(2.0) * q / (T::PI() * T::PI() * h);
        let sum: T = self
            .charvals
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = T::of_usize(i + 1);
                let s = (T::PI() * k * h / q).sin();
                c.norm_sqr() * s * s / (k * k)
            })
            .sum();
        pre * sum
    }

    /// Largest |series(θ) − window form at x| over start points x and phases θ
    /// within 1/(2q) of (x + H/2)/q; the window form uses cos(πk(2x+H)/q).
    pub fn replacement_gap(&self, phases_per_window: usize) -> T {
        let poly = self.polynomial();
        let q = T::of_u64(self.q);
        let h = T::of_u64(self.h);
        let steps = phases_per_window.max(2);
        let mut worst = T::zero();
        for x in 0..self.q {
            let centre = (T::of_u64(x) + h / T::of(2.0)) / q;
            let exact = poly.evaluate(centre);
            for s in 0..steps {
                let offset = (T::of_usize(s) / T::of_usize(steps - 1) - T::of(0.5)) / q;
                let gap = (poly.evaluate(centre + offset) - exact).norm();
                if gap > worst {
                    worst = gap;
                }
            }
        }
        worst
    }
}

pub fn build_series<T: Scalar>(chr: &Character<T>, h: u64, flavor: SeriesFlavor) -> Result<CosineSeries<T>> {
    check_series_input(chr, h)?;
    let q = chr.modulus();
    let kmax = truncation(q, h);
    let coeffs = (1..kmax as u64).map(|k| series_coefficient(q, h, k)).collect();
    let charvals = (1..kmax as i64).map(|k| chr.conj_value(k)).collect();
    Ok(CosineSeries {
        q,
        h,
        kmax,
        coeffs,
        charvals,
        flavor,
        character: chr.index(),
    })
}

/// (2q/π²H) Σ_{kmax ≤ k < q/2} sin²(πkH/q)/k², the mean square of the dropped tail.
pub fn series_l2_tail<T: Scalar>(chr: &Character<T>, h: u64) -> Result<T> {
    check_series_input(chr, h)?;
    let q = chr.modulus();
    let kmax = truncation(q, h) as u64;
    let qf = T::of_u64(q);
    let hf = T::of_u64(h);
    let tail: T = (kmax..=(q - 1) / 2)
        .map(|k| {
            let kf = T::of_u64(k);
            let s = (T::PI() * kf * hf / qf).sin();
            s * s / (kf * kf)
        })
        .sum();
    Ok(T::of(2.0) * qf / (T::PI() * T::PI() * hf) * tail)
}

/// Series values at θ_m = m/M, m = 0..M.
pub fn series_distribution<T: Scalar>(series: &CosineSeries<T>, nodes: usize) -> Result<EmpiricalDistribution<T>> {
    if nodes < 2 * series.kmax + 1 {
        return Err(Error::invalid(format!(
            "grid of {nodes} nodes is below 2·kmax + 1 = {}",
            2 * series.kmax + 1
        )));
    }
    EmpiricalDistribution::new(
        series.polynomial().evaluate_grid(nodes),
        T::one(),
        Provenance {
            q: series.q,
            h: series.h,
            character: Some(series.character),
            nodes: Some(nodes),
        },
    )
}
