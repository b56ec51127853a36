//! The family `Q^n_{k,i} = P^n_k + (n-1-i)/((k-1)(k+n-1)) A1 P^n_k`, its certified extrema and
//! the pencil intervals built from them.

use crate::error::{check_dim, Error, Result};
use crate::legendre::legendre;
use crate::poly::{q, qi, Rational, RationalPolynomial};
use crate::roots::{minmax_on_interval, Certainty, CertifiedExtremum};
use crate::special::ratio_to_f64;
use crate::zonal::{a1_poly, a2_poly};
use num_traits::{One, Zero};
use serde::Serialize;

fn check(n: usize, k: usize, i: usize) -> Result<()> {
    check_dim(n)?;
    if k < 2 {
        return Err(Error::Degree { k, reason: "Q is defined for k >= 2" });
    }
    if i < 1 || i > n - 1 {
        return Err(Error::Index { n, i });
    }
    Ok(())
}

pub fn q_polynomial(n: usize, k: usize, i: usize) -> Result<RationalPolynomial> {
    check(n, k, i)?;
    let p = legendre(n, k)?;
    let (ni, ki, ii) = (n as i64, k as i64, i as i64);
    let c = q(ni - 1 - ii, (ki - 1) * (ki + ni - 1));
    Ok(&p + &a1_poly(&p).scale(&c))
}

/// Certified `m = min Q`, `M = max Q` on `[-1, 1]` with conjecture checks.
#[derive(Clone, Debug)]
pub struct QExtrema {
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub min: CertifiedExtremum,
    pub max: CertifiedExtremum,
    /// `M = Q(1) = i/(n-1)`.
    pub max_at_one: Certainty,
    /// `-1/(n-1) < m`, recorded for even `k >= 4`.
    pub min_above: Option<Certainty>,
}

pub fn q_extrema(n: usize, k: usize, i: usize, tol: &Rational) -> Result<QExtrema> {
    let qp = q_polynomial(n, k, i)?;
    let (mn, mx) = minmax_on_interval(&qp, &-Rational::one(), &Rational::one(), tol)?;
    let q1 = q(i as i64, n as i64 - 1);
    debug_assert_eq!(qp.eval(&Rational::one()), q1);
    let max_at_one = if mx.value_hi <= q1 {
        Certainty::Holds
    } else if mx.value_lo > q1 {
        Certainty::Fails
    } else {
        Certainty::Inconclusive
    };
    let min_above = (k.is_multiple_of(2) && k >= 4).then(|| {
        let b = q(-1, n as i64 - 1);
        if mn.value_lo > b {
            Certainty::Holds
        } else if mn.value_hi <= b {
            Certainty::Fails
        } else {
            Certainty::Inconclusive
        }
    });
    Ok(QExtrema { n, k, i, min: mn, max: mx, max_at_one, min_above })
}

/// Whether `m_{k,1} < m_{k,2} < ... < m_{k,n-1}` holds, from certified enclosures.
pub fn minima_increasing(cells: &[QExtrema]) -> Certainty {
    let mut verdict = Certainty::Holds;
    for w in cells.windows(2) {
        if w[0].min.value_hi < w[1].min.value_lo {
            continue;
        }
        if w[0].min.value_lo >= w[1].min.value_hi {
            return Certainty::Fails;
        }
        verdict = Certainty::Inconclusive;
    }
    verdict
}

/// `min A1 P^n_k = A1 P^n_k(1) = -(k-1)(k+n-1)/(n-1)`, certified.
pub fn a1_legendre_min_at_one(n: usize, k: usize, tol: &Rational) -> Result<Certainty> {
    check_dim(n)?;
    let a = a1_poly(&legendre(n, k)?);
    let want = q(-((k as i64) - 1) * (k as i64 + n as i64 - 1), n as i64 - 1);
    let (mn, _) = minmax_on_interval(&a, &-Rational::one(), &Rational::one(), tol)?;
    Ok(if mn.value_lo >= want && a.eval(&Rational::one()) == want {
        Certainty::Holds
    } else if mn.value_hi < want {
        Certainty::Fails
    } else {
        Certainty::Inconclusive
    })
}

/// Both identities expressing `c A_j P^n_k`, `c = (n-1)/((k-1)(k+n-1))`, through `P^{n+2}_{k-2}` and `P^{n+2}_k`:
/// `c A1 P = -(k/(2k+n-2)) P_{k-2} - ((k+n-2)/(2k+n-2)) P_k` and
/// `c A2 P = (k(k+n-3)/(2k+n-2)) P_{k-2} - ((k+1)(k+n-2)/(2k+n-2)) P_k`.
pub fn legendre_ev_identity_check(n: usize, k: usize) -> Result<(bool, bool)> {
    check(n, k, 1)?;
    let p = legendre(n, k)?;
    let (lo, hi) = (legendre(n + 2, k - 2)?, legendre(n + 2, k)?);
    let (ni, ki) = (n as i64, k as i64);
    let c = q(ni - 1, (ki - 1) * (ki + ni - 1));
    let d = 2 * ki + ni - 2;
    let combo = |a: Rational, b: Rational| &lo.scale(&a) + &hi.scale(&b);
    let one = a1_poly(&p).scale(&c) == combo(q(-ki, d), q(-(ki + ni - 2), d));
    let two = a2_poly(&p).scale(&c) == combo(q(ki * (ki + ni - 3), d), q(-(ki + 1) * (ki + ni - 2), d));
    Ok((one, two))
}

/// Rational enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn exact(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }
    pub fn mid_f64(&self) -> f64 {
        ratio_to_f64(&((&self.lo + &self.hi) / qi(2)))
    }
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
    fn overlaps(&self, o: &Enclosure) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }
    /// Image under the increasing map `x -> c / x` with `c < 0` on an interval not containing 0.
    fn neg_recip(&self, c: &Rational) -> Self {
        Enclosure { lo: c / &self.lo, hi: c / &self.hi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    /// Endpoints read off the closed-form expression in the extrema of `Q_{k,1}`.
    ExtremaFormula,
    /// `{lambda : A1(1 + lambda P) >= 0, A2(1 + lambda P) >= 0}` from certified extrema.
    DirectCriterion,
}

/// A pencil interval `[lower, upper]`; `None` marks an unbounded side. `reversed` is set when a
/// formula produced a left endpoint larger than the right one (the pair is kept as produced).
#[derive(Clone, Debug)]
pub struct PencilInterval {
    pub lower: Option<Enclosure>,
    pub upper: Option<Enclosure>,
    pub method: IntervalMethod,
    pub reversed: bool,
}

impl PencilInterval {
    pub fn contains(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| &l.hi <= x) && self.upper.as_ref().is_none_or(|u| x <= &u.lo)
    }
    pub fn endpoints_f64(&self) -> (f64, f64) {
        (
            self.lower.as_ref().map_or(f64::NEG_INFINITY, |e| e.mid_f64()),
            self.upper.as_ref().map_or(f64::INFINITY, |e| e.mid_f64()),
        )
    }
}

fn enclosure_of(e: &CertifiedExtremum) -> Enclosure {
    Enclosure { lo: e.value_lo.clone(), hi: e.value_hi.clone() }
}

/// `[-i/((n-1) M), -i/((n-1) m)]` for `Q^n_{k,i}`.
pub fn interval_j(n: usize, k: usize, i: usize, tol: &Rational) -> Result<PencilInterval> {
    let e = q_extrema(n, k, i, tol)?;
    let c = q(-(i as i64), n as i64 - 1);
    let (mx, mn) = (enclosure_of(&e.max), enclosure_of(&e.min));
    Ok(PencilInterval {
        lower: (mx.lo > Rational::zero()).then(|| mx.neg_recip(&c)),
        upper: (mn.hi < Rational::zero()).then(|| mn.neg_recip(&c)),
        method: IntervalMethod::DirectCriterion,
        reversed: false,
    })
}

/// `{lambda : 1 + lambda q >= 0 on [-1, 1]}` from certified extrema of `q`.
fn positivity_range(p: &RationalPolynomial, tol: &Rational) -> Result<(Option<Enclosure>, Option<Enclosure>)> {
    let (mn, mx) = minmax_on_interval(p, &-Rational::one(), &Rational::one(), tol)?;
    let (mn, mx) = (enclosure_of(&mn), enclosure_of(&mx));
    let m1 = -Rational::one();
    Ok((
        (mx.lo > Rational::zero()).then(|| mx.neg_recip(&m1)),
        (mn.hi < Rational::zero()).then(|| mn.neg_recip(&m1)),
    ))
}

fn tighter(a: Option<Enclosure>, b: Option<Enclosure>, lower: bool) -> Option<Enclosure> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if lower {
            Enclosure { lo: a.lo.max(b.lo), hi: a.hi.max(b.hi) }
        } else {
            Enclosure { lo: a.lo.min(b.lo), hi: a.hi.min(b.hi) }
        }),
    }
}

/// Valid pencil `{lambda : 1 + lambda P^n_k is a support function}` by either method.
pub fn interval_i(n: usize, k: usize, method: IntervalMethod, tol: &Rational) -> Result<PencilInterval> {
    check(n, k, 1)?;
    match method {
        IntervalMethod::DirectCriterion => {
            let p = legendre(n, k)?;
            let (l1, u1) = positivity_range(&a1_poly(&p), tol)?;
            let (l2, u2) = positivity_range(&a2_poly(&p), tol)?;
            Ok(PencilInterval {
                lower: tighter(l1, l2, true),
                upper: tighter(u1, u2, false),
                method,
                reversed: false,
            })
        }
        IntervalMethod::ExtremaFormula => {
            let e = q_extrema(n, k, 1, tol)?;
            let c = q(-1, (k as i64 - 1) * (k as i64 + n as i64 - 1));
            let left = enclosure_of(&e.min).neg_recip(&c);
            let right = enclosure_of(&e.max).neg_recip(&c);
            let reversed = left.lo > right.hi;
            Ok(PencilInterval { lower: Some(left), upper: Some(right), method, reversed })
        }
    }
}

/// Both computations of `I^n_k` side by side.
#[derive(Clone, Debug)]
pub struct IntervalComparison {
    pub formula: PencilInterval,
    pub direct: PencilInterval,
    pub mismatch: bool,
}

pub fn compare_interval_i(n: usize, k: usize, tol: &Rational) -> Result<IntervalComparison> {
    let formula = interval_i(n, k, IntervalMethod::ExtremaFormula, tol)?;
    let direct = interval_i(n, k, IntervalMethod::DirectCriterion, tol)?;
    let same = |a: &Option<Enclosure>, b: &Option<Enclosure>| match (a, b) {
        (Some(a), Some(b)) => a.overlaps(b),
        (None, None) => true,
        _ => false,
    };
    let mismatch = formula.reversed || !same(&formula.lower, &direct.lower) || !same(&formula.upper, &direct.upper);
    Ok(IntervalComparison { formula, direct, mismatch })
}
