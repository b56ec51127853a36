//! Multiplier sequences: Berg's functions, the `box` transfer, recurrences, decay and
//! Szegő-type bounds.

use crate::special::PiMonomial;
use serde::Serialize;

/// Funk–Hecke multipliers `a_0, ..., a_K` of a zonal measure on `S^(n-1)`.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierSequence {
    pub n: usize,
    pub values: Vec<f64>,
    /// Exact values `q * pi^(e/2)` where available.
    #[serde(skip)]
    pub exact: Option<Vec<PiMonomial>>,
    pub source: String,
    /// Difference against a refined quadrature, relative to `max |a_k|`; zero for exact data.
    pub quadrature_error: f64,
}

impl MultiplierSequence {
    pub fn explicit(n: usize, values: Vec<f64>, source: impl Into<String>) -> Self {
        MultiplierSequence { n, values, exact: None, source: source.into(), quadrature_error: 0.0 }
    }

    pub fn kmax(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `|a_K| / max |a_k|`, the truncation guard.
    pub fn tail_ratio(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            self.values.last().unwrap().abs() / m
        }
    }
}

use crate::error::{check_dim, Error, Result};
use crate::legendre::to_legendre_basis;
use crate::poly::{q, Rational, RationalPolynomial};
use crate::special::{dim_harmonics_exact, ln_gamma_signed};
use crate::zonal::{a1_poly, a2_poly, box_eigenvalue};
use num_traits::Zero;
use std::f64::consts::PI;

fn check_berg(n: usize, j: usize) -> Result<()> {
    check_dim(n)?;
    if j < 2 || j > n {
        return Err(Error::BergIndex { n, j });
    }
    Ok(())
}

/// Exact multiplier of Berg's function `g_j` lifted to `S^(n-1)`, `k != 1`.
pub fn berg_multiplier_exact(n: usize, j: usize, k: usize) -> Result<PiMonomial> {
    check_berg(n, j)?;
    if k == 1 {
        return Err(Error::Degree { k, reason: "the linear slot is not defined" });
    }
    let (n, j, k) = (n as i64, j as i64, k as i64);
    let g = PiMonomial::gamma_half;
    let num = g(n - j + 2).mul(&g(k - 1)).mul(&g(k + j - 1));
    let den = g(k + n - j + 1).mul(&g(k + n + 1));
    let pre = PiMonomial { coeff: q(-(j - 1), 4), sqrt_pi_exp: n - j };
    Ok(pre.mul(&num).div(&den))
}

/// Float multiplier of Berg's function via log-Gamma sums, `k != 1`.
pub fn berg_multiplier(n: usize, j: usize, k: usize) -> Result<f64> {
    check_berg(n, j)?;
    if k == 1 {
        return Err(Error::Degree { k, reason: "the linear slot is not defined" });
    }
    let (nf, jf, kf) = (n as f64, j as f64, k as f64);
    let terms = [
        ((nf - jf + 2.0) / 2.0, 1.0),
        ((kf - 1.0) / 2.0, 1.0),
        ((kf + jf - 1.0) / 2.0, 1.0),
        ((kf + nf - jf + 1.0) / 2.0, -1.0),
        ((kf + nf + 1.0) / 2.0, -1.0),
    ];
    let (mut l, mut s) = ((nf - jf) / 2.0 * PI.ln() + ((jf - 1.0) / 4.0).ln(), -1.0);
    for (x, e) in terms {
        let (lg, sg) = ln_gamma_signed(x);
        l += e * lg;
        s *= sg;
    }
    Ok(s * l.exp())
}

/// `a_0, ..., a_K` of `(Id - pi_1) g_j` on `S^(n-1)`; the linear slot is zero.
/// Exact values are attached when `K <= exact_limit`.
pub fn berg_multipliers(n: usize, j: usize, kmax: usize) -> Result<MultiplierSequence> {
    const EXACT_LIMIT: usize = 160;
    check_berg(n, j)?;
    let values = (0..=kmax).map(|k| if k == 1 { Ok(0.0) } else { berg_multiplier(n, j, k) }).collect::<Result<_>>()?;
    let exact = if kmax <= EXACT_LIMIT {
        Some(
            (0..=kmax)
                .map(|k| if k == 1 { Ok(PiMonomial::rational(Rational::zero())) } else { berg_multiplier_exact(n, j, k) })
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    Ok(MultiplierSequence { n, values, exact, source: format!("berg(n={n}, j={j})"), quadrature_error: 0.0 })
}

/// Exact `box_n` eigenvalue `-(k-1)(k+n-1)/(n-1)`.
pub fn box_eigenvalue_exact(n: usize, k: usize) -> Rational {
    let (n, k) = (n as i64, k as i64);
    q(-(k - 1) * (k + n - 1), n - 1)
}

/// Multipliers of `box_n f` from those of `f`.
pub fn box_transfer(m: &MultiplierSequence) -> MultiplierSequence {
    let n = m.n;
    MultiplierSequence {
        n,
        values: m.values.iter().enumerate().map(|(k, a)| a * box_eigenvalue(n, k)).collect(),
        exact: m.exact.as_ref().map(|ex| {
            ex.iter()
                .enumerate()
                .map(|(k, a)| a.mul(&PiMonomial::rational(box_eigenvalue_exact(n, k))))
                .collect()
        }),
        source: format!("box of {}", m.source),
        quadrature_error: m.quadrature_error,
    }
}

/// `a_k[box g_j] / a_0[box g_j]` with `i = n + 1 - j`, via log-Gamma sums.
pub fn berg_box_ratio(n: usize, j: usize, k: usize) -> Result<f64> {
    check_berg(n, j)?;
    if k == 1 {
        return Err(Error::Degree { k, reason: "the linear slot is not defined" });
    }
    let (nf, kf) = (n as f64, k as f64);
    let i = (n + 1 - j) as f64;
    let lg = |x: f64| ln_gamma_signed(x).0;
    let l = lg((nf - 1.0) / 2.0) + lg((i + 2.0) / 2.0) + lg((kf + 1.0) / 2.0) + lg((kf + nf - i) / 2.0)
        - lg((nf - i) / 2.0)
        - lg(1.5)
        - lg((kf + i) / 2.0)
        - lg((kf + nf - 1.0) / 2.0);
    Ok(l.exp() / i)
}

/// Exact form of [`berg_box_ratio`]: rational for even `k`, a rational multiple of `pi^-2`,
/// `pi^0` or `pi^2` for odd `k`.
pub fn berg_box_ratio_exact(n: usize, j: usize, k: usize) -> Result<PiMonomial> {
    check_berg(n, j)?;
    if k == 1 {
        return Err(Error::Degree { k, reason: "the linear slot is not defined" });
    }
    let (n, k, i) = (n as i64, k as i64, (n + 1 - j) as i64);
    let g = PiMonomial::gamma_half;
    let num = g(n - 1).mul(&g(i + 2)).mul(&g(k + 1)).mul(&g(k + n - i));
    let den = g(n - i).mul(&g(3)).mul(&g(k + i)).mul(&g(k + n - 1));
    Ok(PiMonomial::rational(q(1, i)).mul(&num).div(&den))
}

/// Which first-order operator a recurrence transports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RecurrenceOp {
    A1,
    A2,
}

/// Coefficients `(x_k, y_k)` with `x_k a^n_k + y_k a^n_{k+2} = -(1/2pi) a^{n+2}_k[A g]`.
pub fn recurrence_coefficients(op: RecurrenceOp, n: usize, k: usize) -> (Rational, Rational) {
    let (n, k) = (n as i64, k as i64);
    let d = 2 * k + n;
    match op {
        RecurrenceOp::A1 => (q(k - 1, d), q(k + n + 1, d)),
        RecurrenceOp::A2 => (q((k - 1) * (k + 1), d), q(-(k + n - 1) * (k + n + 1), d)),
    }
}

/// Float residuals `x_k a^n_k + y_k a^n_{k+2} + (1/2pi) a^{n+2}_k[A g]` for `k <= kmax`.
pub fn recurrence_residuals(
    op: RecurrenceOp,
    g: &MultiplierSequence,
    ag_lifted: &MultiplierSequence,
    kmax: usize,
) -> Vec<f64> {
    let n = g.n;
    (0..=kmax)
        .map(|k| {
            let (x, y) = recurrence_coefficients(op, n, k);
            let (x, y) = (crate::special::ratio_to_f64(&x), crate::special::ratio_to_f64(&y));
            x * g.get(k) + y * g.get(k + 2) + ag_lifted.get(k) / (2.0 * PI)
        })
        .collect()
}

/// Exact residuals for a polynomial profile, divided by `omega_n`; all zero.
pub fn recurrence_residuals_exact(op: RecurrenceOp, n: usize, g: &RationalPolynomial, kmax: usize) -> Vec<Rational> {
    let ag = match op {
        RecurrenceOp::A1 => a1_poly(g),
        RecurrenceOp::A2 => a2_poly(g),
    };
    let r_of = |p: &RationalPolynomial, dim: usize| {
        let c = to_legendre_basis(p, dim);
        move |k: usize| {
            c.get(k).cloned().unwrap_or_else(Rational::zero) / Rational::from_integer(dim_harmonics_exact(dim, k))
        }
    };
    let r = r_of(g, n);
    let s = r_of(&ag, n + 2);
    // a^n_k = omega_n r_k,  a^{n+2}_k / (2 pi) = omega_n s_k / n
    (0..=kmax)
        .map(|k| {
            let (x, y) = recurrence_coefficients(op, n, k);
            x * r(k) + y * r(k + 2) + s(k) / q(n as i64, 1)
        })
        .collect()
}

/// Running supremum of the weighted Legendre bound on the shrinking window.
#[derive(Clone, Debug, Serialize)]
pub struct SzegoScan {
    pub n: usize,
    pub delta: f64,
    pub weighted: bool,
    /// `sup` over the window for each `k = 1..=kmax`.
    pub per_degree: Vec<f64>,
    pub running_sup: Vec<f64>,
}

/// `sup |P^n_k(t)| k^((n-2)/2) (1-t^2)^((n-2)/4)` over `|t| <= cos(delta/k)`. With
/// `weighted = false` the endpoint weight `(1-t^2)^((n-2)/4)` is dropped, which makes the
/// supremum grow like `k^((n-2)/2)`.
pub fn szego_scan(n: usize, delta: f64, kmax: usize, weighted: bool) -> Result<SzegoScan> {
    check_dim(n)?;
    if !(delta > 0.0) {
        return Err(Error::Invalid("delta must be positive".into()));
    }
    let e = (n as f64 - 2.0) / 2.0;
    let mut per = Vec::with_capacity(kmax);
    let mut run = Vec::with_capacity(kmax);
    let mut best = 0.0f64;
    for k in 1..=kmax {
        let kf = k as f64;
        let lo = (delta / kf).min(PI / 2.0);
        let hi = PI - lo;
        let m = 8 * k + 1;
        let mut s = 0.0f64;
        for i in 0..m {
            let th = lo + (hi - lo) * i as f64 / (m - 1) as f64;
            let mut v = crate::series::legendre_value(n, k, th.cos()).abs() * kf.powf(e);
            if weighted {
                v *= th.sin().powf(e);
            }
            s = s.max(v);
        }
        best = best.max(s);
        per.push(s);
        run.push(best);
    }
    Ok(SzegoScan { n, delta, weighted, per_degree: per, running_sup: run })
}

/// Polynomial decay rate of a multiplier sequence.
#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    /// `alpha` in `|a_k| ~ k^-alpha`; `None` when the tail vanishes.
    pub alpha: Option<f64>,
    /// Two standard errors of the fitted slope.
    pub band: f64,
    pub superpolynomial: bool,
    pub k_range: (usize, usize),
}

/// Least-squares fit of `log |a_k|` against `log k` over even `k` in the upper half of the range.
pub fn decay_fit(m: &MultiplierSequence) -> DecayFit {
    let kmax = m.kmax();
    let k0 = (kmax / 2).max(2);
    let scale = m.max_abs();
    let ks: Vec<usize> = (k0..=kmax).filter(|k| k % 2 == 0).collect();
    let tail_zero = ks.iter().all(|&k| m.get(k).abs() <= 1e-14 * scale);
    if tail_zero || ks.len() < 3 {
        return DecayFit { alpha: None, band: 0.0, superpolynomial: tail_zero, k_range: (k0, kmax) };
    }
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = ks.iter().map(|&k| m.get(k).abs()).collect();
    match crate::zonal::loglog_slope(&xs, &ys) {
        Some((s, se)) => DecayFit { alpha: Some(-s), band: 2.0 * se, superpolynomial: false, k_range: (k0, kmax) },
        None => DecayFit { alpha: None, band: 0.0, superpolynomial: true, k_range: (k0, kmax) },
    }
}
