//! Gamma functions, sphere constants and harmonic dimensions.
//!
//! Two evaluation paths: a log-space path built on a Lanczos `ln_gamma`, and an
//! exact path for arguments in `Z/2`, where every value is `q * pi^(e/2)` with
//! `q` rational.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

/// `ln |Gamma(x)|` and the sign of `Gamma(x)`; `x` must not be a non-positive integer.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (statrs::function::gamma::ln_gamma(x), 1.0);
    }
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    let s = (PI * x).sin();
    let lg = PI.ln() - s.abs().ln() - statrs::function::gamma::ln_gamma(1.0 - x);
    (lg, s.signum())
}

/// A value `coeff * pi^(sqrt_pi_exp / 2)`, closed under products and quotients.
#[derive(Clone, Debug, PartialEq)]
pub struct PiMonomial {
    pub coeff: BigRational,
    pub sqrt_pi_exp: i64,
}

impl PiMonomial {
    pub fn rational(q: BigRational) -> Self {
        PiMonomial { coeff: q, sqrt_pi_exp: 0 }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    /// `Gamma(m/2)` for an integer `m` that is not a non-positive even number.
    pub fn gamma_half(m: i64) -> Self {
        assert!(!(m <= 0 && m % 2 == 0), "Gamma pole at {}/2", m);
        let (mut x2, mut q, e) = if m % 2 == 0 {
            (2i64, BigRational::one(), 0)
        } else {
            (1i64, BigRational::one(), 1)
        };
        // x2 tracks 2x for the current x with known Gamma(x) = q * sqrt(pi)^e
        while x2 < m {
            q *= BigRational::new(BigInt::from(x2), BigInt::from(2));
            x2 += 2;
        }
        while x2 > m {
            x2 -= 2;
            q /= BigRational::new(BigInt::from(x2), BigInt::from(2));
        }
        PiMonomial { coeff: q, sqrt_pi_exp: e }
    }

    pub fn mul(&self, o: &Self) -> Self {
        PiMonomial {
            coeff: &self.coeff * &o.coeff,
            sqrt_pi_exp: self.sqrt_pi_exp + o.sqrt_pi_exp,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        PiMonomial {
            coeff: &self.coeff / &o.coeff,
            sqrt_pi_exp: self.sqrt_pi_exp - o.sqrt_pi_exp,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt_pi_exp == 0 || self.coeff.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.coeff) * PI.powf(self.sqrt_pi_exp as f64 / 2.0)
    }
}

impl std::fmt::Display for PiMonomial {
    /// `q`, `q*pi^m`, or `q*pi^(e/2)` for odd powers of `sqrt(pi)`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let e = self.sqrt_pi_exp;
        if e == 0 || self.coeff == BigRational::from_integer(0.into()) {
            write!(f, "{}", self.coeff)
        } else if e % 2 == 0 {
            write!(f, "{}*pi^{}", self.coeff, e / 2)
        } else {
            write!(f, "{}*pi^({}/2)", self.coeff, e)
        }
    }
}

/// Rational to `f64` without overflow for huge numerators and denominators.
pub fn ratio_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() && (v != 0.0 || q.is_zero()) {
            return v;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        BigRational::new(q.numer().clone(), q.denom() << (shift as usize))
    } else {
        BigRational::new(q.numer() << ((-shift) as usize), q.denom().clone())
    };
    let m = scaled.round().to_integer().to_f64().unwrap_or(0.0);
    let v = m * 2f64.powi(shift as i32);
    if q.is_negative() && v > 0.0 {
        -v
    } else {
        v
    }
}

/// Surface area of `S^(m-1)`: `2 pi^(m/2) / Gamma(m/2)`.
pub fn omega(m: usize) -> f64 {
    omega_exact(m).to_f64()
}

pub fn omega_exact(m: usize) -> PiMonomial {
    assert!(m >= 1);
    let two = PiMonomial::rational(BigRational::from_integer(BigInt::from(2)));
    let pow = PiMonomial { coeff: BigRational::one(), sqrt_pi_exp: m as i64 };
    two.mul(&pow).div(&PiMonomial::gamma_half(m as i64))
}

/// Volume of the unit ball in `R^m`: `omega(m) / m`.
pub fn kappa(m: usize) -> f64 {
    omega(m) / m as f64
}

/// Binomial coefficient as a big integer; zero outside `0 <= r <= m`.
pub fn binom_big(m: i64, r: i64) -> BigInt {
    if r < 0 || m < 0 || r > m {
        return BigInt::zero();
    }
    let r = r.min(m - r);
    let mut acc = BigInt::one();
    for t in 0..r {
        acc = acc * BigInt::from(m - t) / BigInt::from(t + 1);
    }
    acc
}

pub fn binom(m: i64, r: i64) -> f64 {
    binom_big(m, r).to_f64().unwrap_or(f64::INFINITY)
}

/// Dimension of the space of degree-`k` spherical harmonics on `S^(n-1)`.
pub fn dim_harmonics_exact(n: usize, k: usize) -> BigInt {
    let (n, k) = (n as i64, k as i64);
    binom_big(n + k - 1, n - 1) - binom_big(n + k - 3, n - 1)
}

pub fn dim_harmonics(n: usize, k: usize) -> f64 {
    // (2k+n-2)/(k+n-2) * C(k+n-2, n-2), formed as a running product to stay finite
    if k == 0 {
        return 1.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    let mut c = 1.0;
    for t in 1..=(n - 2) {
        c *= (kf + t as f64) / t as f64;
    }
    c * (2.0 * kf + nf - 2.0) / (kf + nf - 2.0)
}

/// Precomputed constants for one ambient dimension.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SphereConstants {
    pub n: usize,
    /// area of `S^(n-1)`
    pub omega_n: f64,
    /// area of `S^(n-2)`
    pub omega_n1: f64,
    /// volume of the unit `(n-1)`-ball
    pub kappa_n1: f64,
}

impl SphereConstants {
    pub fn new(n: usize) -> Self {
        SphereConstants {
            n,
            omega_n: omega(n),
            omega_n1: omega(n - 1),
            kappa_n1: kappa(n - 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_gamma() {
        assert_eq!(PiMonomial::gamma_half(2).to_f64(), 1.0);
        assert!((PiMonomial::gamma_half(1).to_f64() - PI.sqrt()).abs() < 1e-15);
        assert!((PiMonomial::gamma_half(-1).to_f64() + 2.0 * PI.sqrt()).abs() < 1e-14);
        assert!((PiMonomial::gamma_half(9).to_f64() - 11.631728396567448).abs() < 1e-12);
        assert_eq!(PiMonomial::gamma_half(10).coeff, BigRational::from_integer(24.into()));
    }

    #[test]
    fn log_gamma_agrees_with_exact() {
        for m in [-5i64, -3, -1, 1, 2, 3, 7, 20, 41, 300] {
            let (lg, s) = ln_gamma_signed(m as f64 / 2.0);
            let ex = PiMonomial::gamma_half(m);
            let ex_ln = ratio_to_f64(&ex.coeff.abs()).ln() + ex.sqrt_pi_exp as f64 * 0.5 * PI.ln();
            assert!((lg - ex_ln).abs() <= 1e-13 * ex_ln.abs().max(1.0), "m={m}");
            assert_eq!(s, if ex.coeff.is_negative() { -1.0 } else { 1.0 });
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((omega(2) - 2.0 * PI).abs() < 1e-14);
        assert!((omega(3) - 4.0 * PI).abs() < 1e-14);
        assert!((omega(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!(omega_exact(5).sqrt_pi_exp % 2 == 0);
        assert!((kappa(2) - PI).abs() < 1e-14);
    }

    #[test]
    fn harmonic_dimensions() {
        for n in 3..9 {
            for k in 0..30 {
                let e = dim_harmonics_exact(n, k).to_f64().unwrap();
                assert!((dim_harmonics(n, k) - e).abs() <= 1e-12 * e, "n={n} k={k}");
            }
        }
        assert_eq!(dim_harmonics_exact(3, 4), BigInt::from(9));
        assert_eq!(dim_harmonics_exact(4, 2), BigInt::from(9));
    }
}
