//! Sliding short character sums over every start point, and the empirical
//! law of the resulting values.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::characters::Character;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Highest total order j + k accepted by [`EmpiricalDistribution::moment`].
pub const MAX_MOMENT_ORDER: u32 = 16;

/// Imaginary parts below this are treated as zero by [`ks_distance`].
pub const REAL_SAMPLE_TOLERANCE: f64 = 1e-9;

/// S_{χ,H}(x) = Σ_{x < n ≤ x+H} χ(n) for every x in 0..q.
///
/// One prefix-sum pass over a period; windows that run past q wrap through
/// the period, picking up χ(q) = 0 on the way.
pub fn sliding_sums<T: Scalar>(chr: &Character<T>, h: u64) -> Result<Vec<Complex<T>>> {
    let q = chr.modulus();
    if h == 0 || h > q {
        return Err(Error::invalid(format!("window length {h} outside 1..={q}")));
    }
    let zero = Complex::new(T::zero(), T::zero());
    // prefix[n] = Σ_{1 ≤ m ≤ n} χ(m), n = 0..q
    let mut prefix = Vec::with_capacity(q as usize + 1);
    prefix.push(zero);
    let mut acc = zero;
    for n in 1..=q {
        acc += chr.value(n as i64);
        prefix.push(acc);
    }
    let full = prefix[q as usize];
    Ok((0..q)
        .map(|x| {
            let end = x + h;
            if end <= q {
                prefix[end as usize] - prefix[x as usize]
            } else {
                (full - prefix[x as usize]) + prefix[(end - q) as usize]
            }
        })
        .collect())
}

/// Where a sample set came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub q: u64,
    pub h: u64,
    pub character: Option<u64>,
    /// Quadrature grid size for series evaluations; `None` for start-point scans.
    pub nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateVerdict {
    /// Mean square ≤ τ < 1: no unit-variance limit law is reachable.
    Blocked,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    StdNormal,
}

/// Equally weighted complex samples with deterministic moment and distance queries.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution<T> {
    samples: Vec<Complex<T>>,
    normalization: T,
    meta: Provenance,
}

impl<T: Scalar> EmpiricalDistribution<T> {
    /// Stores `samples` scaled by `normalization`.
    pub fn new(samples: Vec<Complex<T>>, normalization: T, meta: Provenance) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical distribution needs at least one sample"));
        }
        if !normalization.is_finite() || normalization <= T::zero() {
            return Err(Error::invalid("normalization must be positive and finite"));
        }
        let samples: Vec<_> = samples.into_iter().map(|v| v * normalization).collect();
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("non-finite sample"));
        }
        Ok(EmpiricalDistribution {
            samples,
            normalization,
            meta,
        })
    }

    /// The q values S_{χ,H}(x), optionally scaled by 1/√H.
    pub fn from_sliding_sums(chr: &Character<T>, h: u64, normalize: bool) -> Result<Self> {
        let sums = sliding_sums(chr, h)?;
        let scale = if normalize {
            T::one() / T::of_u64(h).sqrt()
        } else {
            T::one()
        };
        Self::new(
            sums,
            scale,
            Provenance {
                q: chr.modulus(),
                h,
                character: Some(chr.index()),
                nodes: None,
            },
        )
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn normalization(&self) -> T {
        self.normalization
    }

    pub fn meta(&self) -> &Provenance {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of |V|².
    pub fn second_moment(&self) -> T {
        let total: T = self.samples.iter().map(|v| v.norm_sqr()).sum();
        total / T::of_usize(self.len())
    }

    /// Mean of V^j · conj(V)^k.
    pub fn moment(&self, j: u32, k: u32) -> Result<Complex<T>> {
        if j + k > MAX_MOMENT_ORDER {
            return Err(Error::invalid(format!(
                "moment order {} exceeds cap {MAX_MOMENT_ORDER}",
                j + k
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let total = self
            .samples
            .iter()
            .map(|v| v.powu(j) * v.conj().powu(k))
            .fold(zero, |a, b| a + b);
        Ok(total / T::of_usize(self.len()))
    }

    /// Real parts, checked to be real within [`REAL_SAMPLE_TOLERANCE`].
    pub fn real_samples(&self) -> Result<Vec<T>> {
        let tol = T::of(REAL_SAMPLE_TOLERANCE);
        self.samples
            .iter()
            .map(|v| {
                if v.im.abs() < tol {
                    Ok(v.re)
                } else {
                    Err(Error::invalid("sample has a non-negligible imaginary part"))
                }
            })
            .collect()
    }
}

/// (1/q) Σ_x |S_{χ,H}(x)|² (or the mean square of whatever samples are held).
pub fn second_moment<T: Scalar>(dist: &EmpiricalDistribution<T>) -> Result<T> {
    if dist.is_empty() {
        return Err(Error::invalid("empty distribution"));
    }
    Ok(dist.second_moment())
}

pub fn empirical_moment<T: Scalar>(dist: &EmpiricalDistribution<T>, j: u32, k: u32) -> Result<Complex<T>> {
    dist.moment(j, k)
}

/// E N(0,1)^j = (j − 1)!! for even j, 0 for odd j.
pub fn gaussian_moment(j: u32) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    (1..j).step_by(2).map(|m| m as f64).product()
}

/// E (Z1 + iZ2)^j (Z1 − iZ2)^k with Z1, Z2 independent N(0, 1/2): k!·1_{j=k}.
pub fn complex_gaussian_moment(j: u32, k: u32) -> f64 {
    if j != k {
        return 0.0;
    }
    (1..=k).map(|m| m as f64).product()
}

/// Kolmogorov distance between the empirical CDF of real samples and Φ.
///
/// Uses both one-sided gaps at each sorted sample, so atoms contribute the
/// larger of their left and right discrepancies.
pub fn ks_distance<T: Scalar>(dist: &EmpiricalDistribution<T>, target: Target) -> Result<T> {
    let mut xs: Vec<f64> = dist
        .real_samples()?
        .into_iter()
        .map(Scalar::to_f64_lossy)
        .collect();
    xs.sort_by(f64::total_cmp);
    let cdf = match target {
        Target::StdNormal => Normal::standard(),
    };
    let n = xs.len() as f64;
    let sup = xs.iter().enumerate().fold(0.0f64, |sup, (i, &x)| {
        let phi = cdf.cdf(x);
        let above = (i + 1) as f64 / n - phi;
        let below = phi - i as f64 / n;
        sup.max(above).max(below)
    });
    Ok(T::of(sup))
}

/// Second-moment gate: blocked iff mean |V|² ≤ τ, for 0 ≤ τ < 1.
pub fn second_moment_gate<T: Scalar>(dist: &EmpiricalDistribution<T>, tau: T) -> Result<GateVerdict> {
    if !(tau >= T::zero() && tau < T::one()) {
        return Err(Error::invalid(format!(
            "gate threshold {tau} must lie in [0, 1)"
        )));
    }
    Ok(if dist.second_moment() <= tau {
        GateVerdict::Blocked
    } else {
        GateVerdict::Inconclusive
    })
}

/// Fixed-width histogram of real parts; returns (bin_left, bin_right, count).
pub fn histogram<T: Scalar>(dist: &EmpiricalDistribution<T>, bins: usize) -> Vec<(f64, f64, u64)> {
    let xs: Vec<f64> = dist.samples().iter().map(|v| v.re.to_f64_lossy()).collect();
    if bins == 0 || xs.is_empty() {
        return Vec::new();
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for x in xs {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (lo + b as f64 * width, lo + (b + 1) as f64 * width, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharacterGroup;
    use proptest::prelude::*;

    fn legendre(q: u64) -> Character<f64> {
        CharacterGroup::for_prime(q).unwrap().legendre_character().unwrap()
    }

    fn brute_sliding(chr: &Character<f64>, h: u64) -> Vec<Complex<f64>> {
        (0..chr.modulus())
            .map(|x| (x + 1..=x + h).map(|n| chr.value(n as i64)).sum())
            .collect()
    }

    fn meta() -> Provenance {
        Provenance {
            q: 0,
            h: 0,
            character: None,
            nodes: None,
        }
    }

    #[test]
    fn sliding_sum_examples() {
        let chi = legendre(7);
        assert_eq!(sliding_sums(&chi, 1).unwrap()[0], Complex::new(1.0, 0.0));
        assert_eq!(sliding_sums(&chi, 2).unwrap()[1], Complex::new(0.0, 0.0));
        let full = sliding_sums(&chi, 7).unwrap();
        assert!(full.iter().all(|v| v.norm() < 1e-12));
        assert!(sliding_sums(&chi, 0).is_err());
        assert!(sliding_sums(&chi, 8).is_err());
    }

    #[test]
    fn sliding_sums_match_double_loop() {
        for q in [7u64, 11, 101, 211, 293] {
            let g: CharacterGroup<f64> = CharacterGroup::for_prime(q).unwrap();
            for a in [1, (q - 1) / 2, q - 2] {
                let chi = g.character(a).unwrap();
                for h in [1, 2, q / 3, q - 1, q] {
                    let fast = sliding_sums(&chi, h).unwrap();
                    let slow = brute_sliding(&chi, h);
                    for (f, s) in fast.iter().zip(&slow) {
                        assert!((f - s).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn second_moment_examples() {
        let d = EmpiricalDistribution::from_sliding_sums(&legendre(7), 2, false).unwrap();
        assert!((second_moment(&d).unwrap() - 10.0 / 7.0).abs() < 1e-12);
        let d = EmpiricalDistribution::from_sliding_sums(&legendre(7), 7, false).unwrap();
        assert!(second_moment(&d).unwrap().abs() < 1e-20);
        let d = EmpiricalDistribution::from_sliding_sums(&legendre(101), 10, false).unwrap();
        assert!((second_moment(&d).unwrap() - (10.0 - 100.0 / 101.0)).abs() < 1e-9);
    }

    #[test]
    fn exact_variance_identity_against_brute_force() {
        for q in crate::arith::primes_in(3, 500).unwrap().into_iter().step_by(5) {
            let g: CharacterGroup<f64> = CharacterGroup::for_prime(q).unwrap();
            for a in [1, (q - 1) / 2] {
                let chi = g.character(a).unwrap();
                for h in [1, q / 4 + 1, q / 2, q] {
                    let brute = brute_sliding(&chi, h);
                    let ms: f64 = brute.iter().map(|v| v.norm_sqr()).sum::<f64>() / q as f64;
                    let expect = h as f64 - (h * h) as f64 / q as f64;
                    assert!((ms - expect).abs() <= 1e-6 * expect.max(1.0), "q={q} h={h}");
                    let d = EmpiricalDistribution::from_sliding_sums(&chi, h, false).unwrap();
                    assert!((d.second_moment() - expect).abs() <= 1e-6 * expect.max(1.0));
                }
            }
        }
    }

    #[test]
    fn moments() {
        let chi = legendre(101);
        let d = EmpiricalDistribution::from_sliding_sums(&chi, 10, true).unwrap();
        assert_eq!(d.moment(0, 0).unwrap(), Complex::new(1.0, 0.0));
        assert!(d.moment(1, 0).unwrap().norm() < 1e-9);
        let m2 = d.moment(2, 0).unwrap();
        assert!((m2.re - (10.0 - 100.0 / 101.0) / 10.0).abs() < 1e-12);
        assert!(d.moment(10, 7).is_err());
        assert_eq!(d.meta().h, 10);
        assert!((d.normalization() - 10f64.sqrt().recip()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_targets() {
        assert_eq!(gaussian_moment(0), 1.0);
        assert_eq!(gaussian_moment(2), 1.0);
        assert_eq!(gaussian_moment(4), 3.0);
        assert_eq!(gaussian_moment(7), 0.0);
        assert_eq!(complex_gaussian_moment(2, 2), 2.0);
        assert_eq!(complex_gaussian_moment(2, 1), 0.0);
    }

    #[test]
    fn ks_point_mass_at_zero() {
        let d = EmpiricalDistribution::new(vec![Complex::new(0.0f64, 0.0); 10], 1.0, meta()).unwrap();
        assert!((ks_distance(&d, Target::StdNormal).unwrap() - 0.5).abs() < 1e-15);
        let c = EmpiricalDistribution::new(vec![Complex::new(0.0, 1.0)], 1.0, meta()).unwrap();
        assert!(ks_distance(&c, Target::StdNormal).is_err());
    }

    #[test]
    fn ks_normal_draws() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<Complex<f64>> = (0..1_000_000)
            .map(|_| Complex::new(StandardNormal.sample(&mut rng), 0.0))
            .collect();
        let d = EmpiricalDistribution::new(xs, 1.0, meta()).unwrap();
        assert!(ks_distance(&d, Target::StdNormal).unwrap() < 0.005);
    }

    #[test]
    fn gate() {
        let zeros = EmpiricalDistribution::new(vec![Complex::new(0.0, 0.0); 4], 1.0, meta()).unwrap();
        assert_eq!(second_moment_gate(&zeros, 0.9).unwrap(), GateVerdict::Blocked);
        let circle: Vec<_> = (0..8)
            .map(|t| Complex::from_polar(1.0, t as f64 * 0.7))
            .collect();
        let circle = EmpiricalDistribution::new(circle, 1.0, meta()).unwrap();
        assert_eq!(second_moment_gate(&circle, 0.9).unwrap(), GateVerdict::Inconclusive);
        assert!(second_moment_gate(&circle, 1.0).is_err());
        assert!(second_moment_gate(&circle, -0.1).is_err());
    }

    #[test]
    fn histogram_counts_every_sample() {
        let d = EmpiricalDistribution::from_sliding_sums(&legendre(101), 10, true).unwrap();
        let h = histogram(&d, 12);
        assert_eq!(h.len(), 12);
        assert_eq!(h.iter().map(|b| b.2).sum::<u64>(), 101);
    }

    proptest! {
        #[test]
        fn ks_is_permutation_invariant(mut xs in proptest::collection::vec(-4.0f64..4.0, 1..60), seed in 0u64..1000) {
            let a = EmpiricalDistribution::new(xs.iter().map(|&x| Complex::new(x, 0.0)).collect(), 1.0, meta()).unwrap();
            let ka = ks_distance(&a, Target::StdNormal).unwrap();
            let n = xs.len();
            for i in 0..n {
                xs.swap(i, (seed as usize * 31 + i * 17) % n);
            }
            let b = EmpiricalDistribution::new(xs.iter().map(|&x| Complex::new(x, 0.0)).collect(), 1.0, meta()).unwrap();
            let kb = ks_distance(&b, Target::StdNormal).unwrap();
            prop_assert!((ka - kb).abs() < 1e-15);
            prop_assert!((0.0..=1.0).contains(&ka));
        }

        #[test]
        fn mean_of_sliding_sums_vanishes(a in 1u64..100, h in 1u64..=101) {
            let chi = CharacterGroup::<f64>::for_prime(101).unwrap().character(a).unwrap();
            let s: Complex<f64> = sliding_sums(&chi, h).unwrap().into_iter().sum();
            prop_assert!(s.norm() < 1e-9);
        }
    }
}
