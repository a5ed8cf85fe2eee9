//! Floating-point scalar abstraction shared by the character, distribution,
//! series and random-multiplicative-function layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Scalar")
    }

    fn of_u64(n: u64) -> Self {
        Self::from_u64(n).expect("u64 converts to every Scalar")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to every Scalar")
    }

    fn of_i64(n: i64) -> Self {
        Self::from_i64(n).expect("i64 converts to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `e(num/den) = exp(2πi·num/den)`, exact at the four quarter turns.
pub fn unit_root<T: Scalar>(num: u64, den: u64) -> Complex<T> {
    debug_assert!(den > 0);
    let num = num % den;
    if (4 * num as u128) % den as u128 == 0 {
        return match (4 * num as u128) / den as u128 {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    // Reduce to (-1/2, 1/2] turns before scaling to keep the angle small.
    let frac = if 2 * num > den {
        -((den - num) as f64) / den as f64
    } else {
        num as f64 / den as f64
    };
    let angle = T::of(frac) * T::TAU();
    Complex::new(angle.cos(), angle.sin())
}

/// Table of `e(t/den)` for `t` in `0..den`.
pub fn unit_root_table<T: Scalar>(den: u64) -> Vec<Complex<T>> {
    (0..den).map(|t| unit_root(t, den)).collect()
}

/// `e(x) = exp(2πi·x)` for a real argument.
pub fn expi<T: Scalar>(turns: T) -> Complex<T> {
    let angle = turns * T::TAU();
    Complex::new(angle.cos(), angle.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        let t: Vec<Complex<f64>> = unit_root_table(8);
        assert_eq!(t[0], Complex::new(1.0, 0.0));
        assert_eq!(t[2], Complex::new(0.0, 1.0));
        assert_eq!(t[4], Complex::new(-1.0, 0.0));
        assert_eq!(t[6], Complex::new(0.0, -1.0));
        assert!((t[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_angle_matches_polar() {
        for den in [7u64, 101, 1008] {
            for num in 0..den {
                let z: Complex<f64> = unit_root(num, den);
                let w = Complex::from_polar(1.0, std::f64::consts::TAU * num as f64 / den as f64);
                assert!((z - w).norm() < 1e-12, "{num}/{den}");
            }
        }
    }
}
