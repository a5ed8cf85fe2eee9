//! Dirichlet characters modulo a prime, indexed against the smallest
//! primitive root: χ_a(g^t) = e(a·t/(q−1)).

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::{pow_mod, PrimeContext};
use crate::error::{Error, Result};
use crate::scalar::{unit_root, unit_root_table, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Principal,
}

/// All q − 1 characters mod q, sharing one table of (q−1)-th roots of unity.
#[derive(Debug, Clone)]
pub struct CharacterGroup<T> {
    ctx: Arc<PrimeContext>,
    roots: Arc<[Complex<T>]>,
}

impl<T: Scalar> CharacterGroup<T> {
    pub fn new(ctx: Arc<PrimeContext>) -> Self {
        let roots = unit_root_table(ctx.group_order().max(1)).into();
        CharacterGroup { ctx, roots }
    }

    pub fn for_prime(q: u64) -> Result<Self> {
        Ok(Self::new(Arc::new(PrimeContext::new(q)?)))
    }

    pub fn context(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    pub fn modulus(&self) -> u64 {
        self.ctx.modulus()
    }

    pub fn len(&self) -> u64 {
        self.ctx.group_order()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn character(&self, index: u64) -> Result<Character<T>> {
        if index >= self.len().max(1) {
            return Err(Error::invalid(format!(
                "character index {index} out of range for q = {}",
                self.modulus()
            )));
        }
        Ok(Character {
            ctx: Arc::clone(&self.ctx),
            roots: Arc::clone(&self.roots),
            index,
        })
    }

    /// The quadratic character (Legendre symbol); requires odd q.
    pub fn legendre_character(&self) -> Result<Character<T>> {
        if self.modulus() == 2 {
            return Err(Error::invalid("no quadratic character mod 2"));
        }
        self.character(self.len() / 2)
    }

    /// Characters in index order 0, 1, ..., q − 2.
    pub fn iter(&self) -> impl Iterator<Item = Character<T>> + '_ {
        (0..self.len().max(1)).map(move |a| Character {
            ctx: Arc::clone(&self.ctx),
            roots: Arc::clone(&self.roots),
            index: a,
        })
    }
}

/// A Dirichlet character mod a prime q.
#[derive(Debug, Clone)]
pub struct Character<T> {
    ctx: Arc<PrimeContext>,
    roots: Arc<[Complex<T>]>,
    index: u64,
}

impl<T: Scalar> Character<T> {
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn modulus(&self) -> u64 {
        self.ctx.modulus()
    }

    pub fn context(&self) -> &Arc<PrimeContext> {
        &self.ctx
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// True for the principal and the quadratic character.
    pub fn is_real(&self) -> bool {
        let order = self.ctx.group_order();
        self.index == 0 || (order % 2 == 0 && self.index == order / 2)
    }

    pub fn is_legendre(&self) -> bool {
        self.index != 0 && self.is_real()
    }

    /// Discrete exponent a·dlog(n) mod (q−1), or `None` when q | n.
    fn exponent(&self, n: i64) -> Option<u64> {
        let order = self.ctx.group_order().max(1);
        self.ctx
            .dlog(n)
            .map(|t| ((self.index as u128 * t as u128) % order as u128) as u64)
    }

    /// χ(n), reduced mod q internally.
    pub fn value(&self, n: i64) -> Complex<T> {
        match self.exponent(n) {
            Some(e) => self.roots[e as usize],
            None => Complex::new(T::zero(), T::zero()),
        }
    }

    pub fn conj_value(&self, n: i64) -> Complex<T> {
        self.value(n).conj()
    }

    /// χ(n) for n = 0..q−1.
    pub fn period_values(&self) -> Vec<Complex<T>> {
        (0..self.modulus() as i64).map(|n| self.value(n)).collect()
    }

    pub fn parity(&self) -> Parity {
        if self.is_principal() {
            return Parity::Principal;
        }
        match self.exponent(-1) {
            Some(0) => Parity::Even,
            _ => Parity::Odd,
        }
    }

    /// τ(χ) = Σ_{n mod q} χ(n) e(n/q) by direct summation.
    pub fn gauss_sum(&self) -> Result<Complex<T>> {
        if self.is_principal() {
            return Err(Error::PrincipalCharacter);
        }
        let q = self.modulus();
        Ok((1..q)
            .map(|n| self.value(n as i64) * unit_root::<T>(n, q))
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b))
    }

    /// Σ_{1 ≤ n ≤ x} χ(n).
    pub fn partial_sum(&self, x: u64) -> Complex<T> {
        let q = self.modulus();
        let zero = Complex::new(T::zero(), T::zero());
        let period: Complex<T> = if x >= q {
            (1..q).map(|n| self.value(n as i64)).fold(zero, |a, b| a + b)
        } else {
            zero
        };
        let full = T::of_u64(x / q);
        (1..=(x % q))
            .map(|n| self.value(n as i64))
            .fold(period * full, |a, b| a + b)
    }
}

/// Legendre symbol (n/q) by Euler's criterion.
pub fn legendre(n: i64, ctx: &PrimeContext) -> Result<i8> {
    legendre_mod(n, ctx.modulus())
}

/// Legendre symbol for an odd prime modulus given directly.
pub fn legendre_mod(n: i64, q: u64) -> Result<i8> {
    if q == 2 {
        return Err(Error::invalid("Legendre symbol needs an odd prime modulus"));
    }
    let r = n.rem_euclid(q as i64) as u64;
    Ok(match pow_mod(r, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    })
}

/// (1/(q−1)) Σ_χ χ(n1)·conj χ(n2), by summing over every character.
pub fn orthogonality_sum<T: Scalar>(group: &CharacterGroup<T>, n1: i64, n2: i64) -> Result<Complex<T>> {
    let q = group.modulus() as i64;
    if n1.rem_euclid(q) == 0 || n2.rem_euclid(q) == 0 {
        return Err(Error::invalid("orthogonality needs arguments coprime to q"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let total = group
        .iter()
        .map(|chi| chi.value(n1) * chi.conj_value(n2))
        .fold(zero, |a, b| a + b);
    Ok(total / T::of_u64(group.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn group(q: u64) -> CharacterGroup<f64> {
        CharacterGroup::for_prime(q).unwrap()
    }

    #[test]
    fn legendre_mod_seven() {
        let ctx = PrimeContext::new(7).unwrap();
        assert_eq!(legendre(0, &ctx).unwrap(), 0);
        assert_eq!(legendre(2, &ctx).unwrap(), 1);
        assert_eq!(legendre(3, &ctx).unwrap(), -1);
        assert!(legendre(1, &PrimeContext::new(2).unwrap()).is_err());
    }

    #[test]
    fn basic_values() {
        let g = group(101);
        let chi = g.character(17).unwrap();
        assert_eq!(chi.value(1), Complex::new(1.0, 0.0));
        assert_eq!(chi.value(101 * 3), Complex::new(0.0, 0.0));
        let gen = g.context().generator() as i64;
        let expect = Complex::from_polar(1.0, std::f64::consts::TAU * 17.0 / 100.0);
        assert!((chi.value(gen) - expect).norm() < 1e-12);
        assert!((chi.value(gen + 101) - expect).norm() < 1e-12);
    }

    #[test]
    fn legendre_character_is_exactly_real() {
        for q in [7u64, 13, 101, 1009] {
            let g = group(q);
            let chi = g.legendre_character().unwrap();
            assert!(chi.is_legendre());
            for n in 0..q as i64 {
                let v = chi.value(n);
                assert_eq!(v.im, 0.0);
                assert_eq!(v.re as i8, legendre_mod(n, q).unwrap());
            }
        }
    }

    #[test]
    fn legendre_agrees_with_index_half_for_all_small_primes() {
        for q in crate::arith::primes_in(3, 10_000).unwrap().into_iter().step_by(37) {
            let chi = group(q).legendre_character().unwrap();
            for n in 0..q as i64 {
                assert_eq!(chi.value(n).re, legendre_mod(n, q).unwrap() as f64);
            }
        }
    }

    #[test]
    fn gauss_sums_of_quadratic_characters() {
        let t5 = group(5).legendre_character().unwrap().gauss_sum().unwrap();
        assert!((t5 - Complex::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let t7 = group(7).legendre_character().unwrap().gauss_sum().unwrap();
        assert!((t7 - Complex::new(0.0, 7f64.sqrt())).norm() < 1e-12);
        assert!(matches!(
            group(7).character(0).unwrap().gauss_sum(),
            Err(Error::PrincipalCharacter)
        ));
    }

    #[test]
    fn gauss_sum_modulus_is_sqrt_q() {
        for q in [101u64, 1009] {
            let g = group(q);
            let root = (q as f64).sqrt();
            for chi in g.iter().skip(1) {
                let tau = chi.gauss_sum().unwrap();
                assert!((tau.norm() - root).abs() <= 1e-6 * root, "q={q} a={}", chi.index());
            }
        }
    }

    #[test]
    fn partial_sums() {
        let chi = group(7).legendre_character().unwrap();
        assert_eq!(chi.partial_sum(0), Complex::new(0.0, 0.0));
        assert_eq!(chi.partial_sum(3), Complex::new(1.0, 0.0));
        let g = group(101);
        for chi in g.iter().skip(1) {
            assert!(chi.partial_sum(101).norm() < 1e-9);
            let direct: Complex<f64> = (1..=250).map(|n| chi.value(n)).sum();
            assert!((chi.partial_sum(250) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn orthogonality() {
        let g = group(101);
        assert!((orthogonality_sum(&g, 5, 5).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-9);
        assert!(orthogonality_sum(&g, 2, 3).unwrap().norm() < 1e-9);
        let g13 = group(13);
        assert!((orthogonality_sum(&g13, 3, 3).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-9);
        assert!(orthogonality_sum(&g13, 13, 3).is_err());
    }

    #[test]
    fn parities() {
        assert_eq!(group(13).legendre_character().unwrap().parity(), Parity::Even);
        assert_eq!(group(7).legendre_character().unwrap().parity(), Parity::Odd);
        assert_eq!(group(7).character(0).unwrap().parity(), Parity::Principal);
        let g = group(101);
        let even = g.iter().filter(|c| c.parity() == Parity::Even).count();
        // χ(−1) = 1 iff the index is even; index 0 is principal.
        assert_eq!(even, 49);
    }

    #[test]
    fn full_period_sum_vanishes() {
        let g = group(1009);
        for chi in g.iter().skip(1).step_by(7) {
            let s: Complex<f64> = chi.period_values().into_iter().sum();
            assert!(s.norm() < 1e-9);
        }
    }

    #[test]
    fn single_precision_characters() {
        let g: CharacterGroup<f32> = CharacterGroup::for_prime(101).unwrap();
        let chi = g.character(5).unwrap();
        assert!((chi.gauss_sum().unwrap().norm() - 101f32.sqrt()).abs() < 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn multiplicativity(a in 0u64..1008, m in -5000i64..5000, n in -5000i64..5000) {
            thread_local!(static G: CharacterGroup<f64> = CharacterGroup::for_prime(1009).unwrap());
            G.with(|g| {
                let chi = g.character(a).unwrap();
                let lhs = chi.value(m * n);
                let rhs = chi.value(m) * chi.value(n);
                assert!((lhs - rhs).norm() <= 1e-12);
                assert!((chi.value(m + 1009) - chi.value(m)).norm() == 0.0);
            });
        }
    }
}
