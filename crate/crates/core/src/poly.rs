//! Univariate polynomials over `Q` in the power basis.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rational = BigRational;

pub fn q(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Ascending coefficients, trailing zeros trimmed; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The monomial `c t^d`.
    pub fn monomial(c: Rational, d: usize) -> Self {
        let mut v = vec![Rational::zero(); d + 1];
        v[d] = c;
        Self::new(v)
    }

    pub fn t() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| qi(v)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(d, c)| c * qi(d as i64))
                .collect(),
        )
    }

    /// Multiply by `t`.
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(Rational::zero());
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `p(-t)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(d, c)| if d % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    /// Euclidean division: `self = quo * d + rem`, `deg rem < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Rational::zero(); rem.len() - dd];
        for s in (0..quo.len()).rev() {
            let c = &rem[s + dd] / &lead;
            if !c.is_zero() {
                for (t, dc) in d.coeffs.iter().enumerate() {
                    rem[s + t] -= &c * dc;
                }
            }
            quo[s] = c;
        }
        rem.truncate(dd);
        (Self::new(quo), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Square-free part `p / gcd(p, p')` (monic) and the gcd itself.
    pub fn square_free(&self) -> (Self, Self) {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return (self.monic(), Self::one());
        }
        (self.div_rem(&g).0.monic(), g)
    }

    /// Floating evaluation by Horner; only for low degree or diagnostics.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::special::ratio_to_f64(c);
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, o: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPolynomial::new((0..n).map(|d| self.coeff(d) + o.coeff(d)).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, o: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPolynomial::new((0..n).map(|d| self.coeff(d) - o.coeff(d)).collect())
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, o: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || o.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        RationalPolynomial::new(v)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*t", c)?,
                _ => write!(f, "({})*t^{}", c, d)?,
            }
        }
        Ok(())
    }
}
