//! Exact Legendre polynomials of dimension `n`, normalised by `P(1) = 1`.

use crate::error::{check_dim, Result};
use crate::poly::{q, qi, Rational, RationalPolynomial};
use num_traits::Zero;

/// `P^n_k` from the three-term recurrence.
pub fn legendre(n: usize, k: usize) -> Result<RationalPolynomial> {
    check_dim(n)?;
    Ok(legendre_family(n, k).pop().unwrap())
}

/// `[P^n_0, ..., P^n_kmax]`.
pub fn legendre_family(n: usize, kmax: usize) -> Vec<RationalPolynomial> {
    let n = n as i64;
    let mut fam = vec![RationalPolynomial::one()];
    if kmax >= 1 {
        fam.push(RationalPolynomial::t());
    }
    for k in 2..=kmax as i64 {
        let a = fam[k as usize - 1].shift_up().scale(&qi(2 * k + n - 4));
        let b = fam[k as usize - 2].scale(&qi(k - 1));
        fam.push((&a - &b).scale(&q(1, k + n - 3)));
    }
    fam
}

/// Coefficients `c` with `p = sum_k c_k P^n_k`, computed exactly by peeling leading terms.
pub fn to_legendre_basis(p: &RationalPolynomial, n: usize) -> Vec<Rational> {
    let Some(d) = p.degree() else { return Vec::new() };
    let fam = legendre_family(n, d);
    let mut rest = p.clone();
    let mut out = vec![Rational::zero(); d + 1];
    for k in (0..=d).rev() {
        let c = rest.coeff(k) / fam[k].leading();
        if !c.is_zero() {
            rest = &rest - &fam[k].scale(&c);
        }
        out[k] = c;
    }
    debug_assert!(rest.is_zero());
    out
}

/// `sum_k c_k P^n_k` in the power basis.
pub fn from_legendre_basis(c: &[Rational], n: usize) -> RationalPolynomial {
    if c.is_empty() {
        return RationalPolynomial::zero();
    }
    let fam = legendre_family(n, c.len() - 1);
    c.iter()
        .zip(fam.iter())
        .fold(RationalPolynomial::zero(), |acc, (ck, p)| &acc + &p.scale(ck))
}

/// Residual of `(1-t^2)P'' - (n-1)tP' + k(k+n-2)P`; identically zero.
pub fn ode_residual(n: usize, k: usize) -> RationalPolynomial {
    let p = legendre_family(n, k).pop().unwrap();
    let (n, ki) = (n as i64, k as i64);
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let one_m_t2 = RationalPolynomial::from_ints(&[1, 0, -1]);
    let a = &one_m_t2 * &d2;
    let b = d1.shift_up().scale(&qi(n - 1));
    let c = p.scale(&qi(ki * (ki + n - 2)));
    &(&a - &b) + &c
}

/// Residual of `d/dt P^n_k - k(k+n-2)/(n-1) P^{n+2}_{k-1}`; identically zero.
pub fn derivative_identity_residual(n: usize, k: usize) -> RationalPolynomial {
    let d = legendre_family(n, k).pop().unwrap().derivative();
    if k == 0 {
        return d;
    }
    let (ni, ki) = (n as i64, k as i64);
    let rhs = legendre_family(n + 2, k - 1)
        .pop()
        .unwrap()
        .scale(&q(ki * (ki + ni - 2), ni - 1));
    &d - &rhs
}
