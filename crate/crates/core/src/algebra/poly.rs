use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use super::Rational;
use crate::scalar::Real;

/// Coefficient ring of a [`Poly`].
pub trait Coefficient:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn to_real<F: Real>(&self) -> F;
}

impl Coefficient for Rational {
    fn to_real<F: Real>(&self) -> F {
        F::lit(self.to_f64().unwrap_or(f64::NAN))
    }
}

impl Coefficient for f64 {
    fn to_real<F: Real>(&self) -> F {
        F::lit(*self)
    }
}

/// Dense univariate polynomial in `h`, coefficients lowest power first.
///
/// The zero polynomial has an empty coefficient list; otherwise the last
/// coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> Poly<T> {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * h^k`.
    pub fn monomial(c: T, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.push(c);
        Poly { coeffs }
    }

    /// The polynomial `h`.
    pub fn h() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    /// Multiplies by `h^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Divides by `h`; the constant term must be zero.
    pub fn shift_down(&self) -> Self {
        debug_assert!(self.coeff(0).is_zero(), "shift_down of a polynomial with nonzero constant term");
        if self.is_zero() {
            return Self::zero();
        }
        Poly { coeffs: self.coeffs[1..].to_vec() }
    }

    pub fn divisible_by_h(&self) -> bool {
        self.coeff(0).is_zero()
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Horner evaluation in floating point.
    pub fn eval<F: Real>(&self, h: F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * h + c.to_real::<F>())
    }

    /// Exact evaluation at a coefficient-ring point.
    pub fn eval_exact(&self, h: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * h + c)
    }
}

impl<T: Coefficient> Default for Poly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a, T: Coefficient> Add<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a, T: Coefficient> Sub<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|k| self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a, T: Coefficient> Mul<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        Poly::from_coeffs(out)
    }
}

impl<T: Coefficient> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Coefficient> $tr<Poly<T>> for Poly<T> {
            type Output = Poly<T>;
            fn $m(self, rhs: Poly<T>) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Coefficient> Neg for Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        -&self
    }
}

impl fmt::Display for Poly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})h")?,
                _ => write!(f, "({c})h^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};

    type P = Poly<Rational>;

    fn p(cs: &[i64]) -> P {
        P::from_coeffs(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn additive_identity() {
        let q = p(&[3, 0, -1]);
        assert_eq!(&P::zero() + &q, q);
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
    }

    #[test]
    fn disjoint_powers() {
        let sum = &p(&[0, 2]) + &p(&[0, 0, 3]);
        assert_eq!(sum.coeffs(), &[int(0), int(2), int(3)]);
    }

    #[test]
    fn trailing_zeros_stripped() {
        let a = p(&[1, 2, 3]);
        let b = p(&[0, 0, 3]);
        assert_eq!((&a - &b).degree(), Some(1));
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).degree(), None);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p(&[-1, 0, 1]).eval(1.0_f64), 0.0);
        assert_eq!(P::zero().eval(0.37_f64), 0.0);
        let q = P::from_coeffs(vec![frac(1, 2), int(3)]);
        assert_eq!(q.eval(-0.25_f64), -0.25);
        assert_eq!(q.eval_exact(&frac(-1, 4)), frac(-1, 4));
    }

    #[test]
    fn degree_of_product() {
        let a = p(&[1, 2, 3]);
        let b = p(&[4, 0, 0, 5]);
        assert_eq!((&a * &b).degree(), Some(5));
        assert!((&a * &P::zero()).is_zero());
    }

    #[test]
    fn shifts() {
        let a = p(&[1, 2]);
        assert_eq!(a.shift_up(2), p(&[0, 0, 1, 2]));
        assert_eq!(a.shift_up(2).shift_down(), p(&[0, 1, 2]));
        assert!(!a.divisible_by_h());
        assert!(P::zero().divisible_by_h());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, 0, -2]).to_string(), "(-2)h^2 + 1");
    }
}
