//! Certified real-root isolation (Sturm sequences) and certified extrema on an interval.

use crate::error::{Error, Result};
use crate::poly::{q, Rational, RationalPolynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Multiplicity {
    Simple,
    Unknown,
}

/// Closed interval `[lo, hi]` holding exactly one root; `lo == hi` means the root is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEnclosure {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: Multiplicity,
}

impl RootEnclosure {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / q(2, 1)
    }
}

/// Extremum of a polynomial on an interval: the true value lies in `[value_lo, value_hi]`
/// and is attained inside `arg`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedExtremum {
    pub value_lo: Rational,
    pub value_hi: Rational,
    pub arg: RootEnclosure,
}

impl CertifiedExtremum {
    pub fn is_exact(&self) -> bool {
        self.value_lo == self.value_hi
    }
    pub fn mid_f64(&self) -> f64 {
        crate::special::ratio_to_f64(&((&self.value_lo + &self.value_hi) / q(2, 1)))
    }
}

/// Integer-coefficient copy of a rational polynomial with the same sign pattern.
#[derive(Clone, Debug)]
struct IntPoly(Vec<BigInt>);

impl IntPoly {
    fn from_rational(p: &RationalPolynomial) -> Self {
        let l = p
            .coeffs()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        IntPoly(p.coeffs().iter().map(|c| (c * &l).to_integer()).collect())
    }

    /// `p(x)` for the rational polynomial `orig` this was built from, with a single final division.
    fn eval(&self, x: &Rational, orig: &RationalPolynomial) -> Rational {
        let d = self.0.len();
        if d == 0 {
            return Rational::zero();
        }
        let (a, b) = (x.numer(), x.denom());
        let mut acc = self.0[d - 1].clone();
        let mut bp = BigInt::one();
        for c in self.0[..d - 1].iter().rev() {
            bp *= b;
            acc = acc * a + c * &bp;
        }
        // self = l * orig, so the scale is recovered from the leading coefficients
        let l = Rational::from_integer(self.0[d - 1].clone()) / orig.leading();
        Rational::new(acc, bp) / l
    }

    /// Sign of `p(a/b)` for `b > 0`, via homogeneous Horner.
    fn sign_at(&self, x: &Rational) -> i8 {
        let (a, b) = (x.numer(), x.denom());
        let d = self.0.len();
        if d == 0 {
            return 0;
        }
        let mut acc = self.0[d - 1].clone();
        let mut bp = BigInt::one();
        for c in self.0[..d - 1].iter().rev() {
            bp *= b;
            acc = acc * a + c * &bp;
        }
        if acc.is_zero() {
            0
        } else if acc.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// Sturm sequence of a polynomial; callers pass a square-free input.
pub struct SturmSequence {
    seq: Vec<IntPoly>,
}

impl SturmSequence {
    pub fn new(p: &RationalPolynomial) -> Self {
        let mut polys = vec![p.clone(), p.derivative()];
        while let Some(last) = polys.last() {
            if last.is_zero() {
                polys.pop();
                break;
            }
            let prev = &polys[polys.len() - 2];
            let (_, r) = prev.div_rem(last);
            if r.is_zero() {
                break;
            }
            polys.push(-&r);
        }
        SturmSequence { seq: polys.iter().map(IntPoly::from_rational).collect() }
    }

    pub fn variations(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut v = 0;
        for p in &self.seq {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    fn sign(&self, x: &Rational) -> i8 {
        self.seq[0].sign_at(x)
    }

    /// Distinct roots in `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

fn mid(a: &Rational, b: &Rational) -> Rational {
    (a + b) / q(2, 1)
}

/// Isolate every distinct real root of `p` in `[lo, hi]` into pairwise disjoint enclosures.
pub fn sturm_isolate_roots(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<RootEnclosure>> {
    if lo > hi {
        return Err(Error::EmptyInterval);
    }
    if p.is_zero() {
        return Err(Error::Invalid("zero polynomial has no isolated roots".into()));
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let (sf, g) = p.square_free();
    let st = SturmSequence::new(&sf);
    let gst = (g.degree().unwrap_or(0) > 0).then(|| SturmSequence::new(&g.square_free().0));
    let mut out = Vec::new();
    if st.sign(lo) == 0 {
        out.push(RootEnclosure { lo: lo.clone(), hi: lo.clone(), multiplicity: Multiplicity::Simple });
    }
    if lo < hi {
        let (va, vb) = (st.variations(lo), st.variations(hi));
        isolate_rec(&st, lo.clone(), va, hi.clone(), vb, &mut out);
    }
    // separate enclosures that share an endpoint
    let ip = IntPoly::from_rational(&sf);
    for i in 0..out.len().saturating_sub(1) {
        while out[i].hi >= out[i + 1].lo {
            let (l, r) = out.split_at_mut(i + 1);
            if !l[i].is_exact() {
                bisect_once(&ip, &mut l[i]);
            }
            if !r[0].is_exact() {
                bisect_once(&ip, &mut r[0]);
            }
        }
    }
    for e in out.iter_mut() {
        if let Some(gs) = &gst {
            let hit = gs.sign(&e.lo) == 0 || gs.count(&e.lo, &e.hi) > 0;
            if hit {
                e.multiplicity = Multiplicity::Unknown;
            }
        }
    }
    Ok(out)
}

fn isolate_rec(st: &SturmSequence, a: Rational, va: usize, b: Rational, vb: usize, out: &mut Vec<RootEnclosure>) {
    let c = va - vb;
    if c == 0 {
        return;
    }
    if c == 1 {
        if st.sign(&b) == 0 {
            out.push(RootEnclosure { lo: b.clone(), hi: b, multiplicity: Multiplicity::Simple });
            return;
        }
        // move the left end off a neighbouring exact root
        let (mut a, mut va) = (a, va);
        while st.sign(&a) == 0 {
            let m = mid(&a, &b);
            let vm = st.variations(&m);
            if va - vm == 1 {
                if st.sign(&m) == 0 {
                    out.push(RootEnclosure { lo: m.clone(), hi: m, multiplicity: Multiplicity::Simple });
                    return;
                }
                return isolate_rec(st, a, va, m, vm, out);
            }
            a = m;
            va = vm;
        }
        out.push(RootEnclosure { lo: a, hi: b, multiplicity: Multiplicity::Simple });
        return;
    }
    let m = mid(&a, &b);
    let vm = st.variations(&m);
    isolate_rec(st, a, va, m.clone(), vm, out);
    isolate_rec(st, m, vm, b, vb, out);
}

/// Bisect a sign-changing enclosure of a root of `p` (square-free near the root) once.
fn bisect_once(sign: &IntPoly, e: &mut RootEnclosure) {
    if e.is_exact() {
        return;
    }
    let m = e.midpoint();
    let sm = sign.sign_at(&m);
    if sm == 0 {
        e.lo = m.clone();
        e.hi = m;
        return;
    }
    if sm == sign.sign_at(&e.lo) {
        e.lo = m;
    } else {
        e.hi = m;
    }
}

/// Shrink an enclosure produced by [`sturm_isolate_roots`] to width at most `width`.
pub fn refine_root(p: &RationalPolynomial, e: &RootEnclosure, width: &Rational) -> RootEnclosure {
    let ip = IntPoly::from_rational(&p.square_free().0);
    let mut e = e.clone();
    while !e.is_exact() && &e.width() > width {
        bisect_once(&ip, &mut e);
    }
    e
}

fn sum_abs(p: &RationalPolynomial) -> Rational {
    p.coeffs().iter().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
}

/// Certified bounds of `p` at the critical point inside `e`, refined until width `<= tol`.
fn critical_value(
    p: &RationalPolynomial,
    dp: &RationalPolynomial,
    dsign: &IntPoly,
    b2: &Rational,
    mut e: RootEnclosure,
    tol: &Rational,
) -> CertifiedExtremum {
    let ip = IntPoly::from_rational(p);
    let ipd = IntPoly::from_rational(dp);
    // dp vanishes inside e, so |p'(c)| <= b2 h and the bound below is at most 3 b2 h^2 / 2;
    // shrink with sign tests alone until that is small enough
    let three_b2 = b2 * q(3, 1);
    let quarter = q(1, 4);
    while !e.is_exact() && &three_b2 * e.width() * e.width() * &quarter > *tol {
        bisect_once(dsign, &mut e);
    }
    if e.is_exact() {
        let v = ip.eval(&e.lo, p);
        return CertifiedExtremum { value_lo: v.clone(), value_hi: v, arg: e };
    }
    let c = e.midpoint();
    let h = e.width() / q(2, 1);
    let pc = ip.eval(&c, p);
    // |p(r) - p(c)| <= |p'(c)| h + max|p''| h^2 / 2, with max|p''| <= sum |coeffs|
    let bound = ipd.eval(&c, dp).abs() * &h + b2 * &h * &h / q(2, 1);
    CertifiedExtremum { value_lo: &pc - &bound, value_hi: &pc + &bound, arg: e }
}

/// Rational bounds `lo <= sqrt(x) <= hi` with `hi - lo <= 2^-bits`; exact for perfect squares.
pub fn sqrt_bounds(x: &Rational, bits: usize) -> (Rational, Rational) {
    assert!(!x.is_negative());
    let (a, b) = (x.numer(), x.denom());
    let (ra, rb) = (a.sqrt(), b.sqrt());
    if &(&ra * &ra) == a && &(&rb * &rb) == b {
        let r = Rational::new(ra, rb);
        return (r.clone(), r);
    }
    let scale = BigInt::one() << (2 * bits);
    let v = (a * &scale).div_floor(b);
    let s = v.sqrt();
    let den = BigInt::one() << bits;
    (Rational::new(s.clone(), den.clone()), Rational::new(s + 1, den))
}

/// `sum_m c_{2m + shift} u^m`.
fn parity_part(p: &RationalPolynomial, shift: usize) -> RationalPolynomial {
    RationalPolynomial::new(p.coeffs().iter().skip(shift).step_by(2).cloned().collect())
}

/// Roots of `dp` in `[-h, h]` when `dp` is even or odd, isolated through `u = t^2`.
fn isolate_by_parity(dp: &RationalPolynomial, h: &Rational) -> Result<Vec<RootEnclosure>> {
    let odd = !dp.is_even();
    let s = parity_part(dp, usize::from(odd));
    let mut pos = Vec::new();
    if odd {
        pos.push(RootEnclosure { lo: Rational::zero(), hi: Rational::zero(), multiplicity: Multiplicity::Simple });
    }
    let ip = IntPoly::from_rational(&dp.square_free().0);
    let ssf = IntPoly::from_rational(&s.square_free().0);
    let zero = Rational::zero();
    for mut e in sturm_isolate_roots(&s, &zero, &(h * h))? {
        if e.hi == zero {
            if !odd {
                pos.push(RootEnclosure { lo: zero.clone(), hi: zero.clone(), multiplicity: e.multiplicity });
            }
            continue;
        }
        let mut bits = 64;
        loop {
            if e.lo == zero {
                bisect_once(&ssf, &mut e);
                continue;
            }
            let (lo, _) = sqrt_bounds(&e.lo, bits);
            let (_, hi) = sqrt_bounds(&e.hi, bits);
            let t = RootEnclosure { lo, hi, multiplicity: e.multiplicity };
            let (sl, sh) = (ip.sign_at(&t.lo), ip.sign_at(&t.hi));
            if t.is_exact() || (sl != 0 && sh != 0 && sl != sh) {
                pos.push(t);
                break;
            }
            bisect_once(&ssf, &mut e);
            bits += 8;
        }
    }
    let mut out: Vec<RootEnclosure> = pos
        .iter()
        .rev()
        .filter(|e| e.hi > zero)
        .map(|e| RootEnclosure { lo: -&e.hi, hi: -&e.lo, multiplicity: e.multiplicity })
        .collect();
    out.extend(pos);
    Ok(out)
}

/// Certified minimum and maximum of `p` on `[lo, hi]`; value enclosures have width `<= tol`.
pub fn minmax_on_interval(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
    tol: &Rational,
) -> Result<(CertifiedExtremum, CertifiedExtremum)> {
    if lo > hi {
        return Err(Error::EmptyInterval);
    }
    let endpoint = |x: &Rational| {
        let v = p.eval(x);
        CertifiedExtremum {
            value_lo: v.clone(),
            value_hi: v,
            arg: RootEnclosure { lo: x.clone(), hi: x.clone(), multiplicity: Multiplicity::Simple },
        }
    };
    let mut cands = vec![endpoint(lo), endpoint(hi)];
    let dp = p.derivative();
    if dp.degree().unwrap_or(0) > 0 {
        let (dsf, _) = dp.square_free();
        let dsign = IntPoly::from_rational(&dsf);
        let b2 = sum_abs(&dp.derivative());
        // on symmetric intervals a polynomial of definite parity is handled through t^2,
        // and for even p only t >= 0 needs evaluating
        let symmetric = lo == &-hi && hi.is_positive();
        let parity = dp.is_even() || parity_part(&dp, 0).is_zero();
        let even = p.is_even() && symmetric;
        let crit = if symmetric && parity && dp.degree().unwrap_or(0) >= 3 {
            isolate_by_parity(&dp, hi)?
        } else {
            sturm_isolate_roots(&dp, lo, hi)?
        };
        for e in crit {
            if even && e.hi < Rational::zero() {
                continue;
            }
            if (&e.lo == lo && &e.hi == lo) || (&e.lo == hi && &e.hi == hi) {
                continue;
            }
            cands.push(critical_value(p, &dp, &dsign, &b2, e, tol));
        }
    }
    let pick = |is_min: bool| {
        let mut best = cands[0].clone();
        for c in &cands[1..] {
            let better = if is_min { c.value_hi < best.value_hi } else { c.value_lo > best.value_lo };
            if better {
                best = c.clone();
            }
        }
        let lo_b = cands.iter().map(|c| c.value_lo.clone());
        let hi_b = cands.iter().map(|c| c.value_hi.clone());
        if is_min {
            best.value_lo = lo_b.min().unwrap();
            best.value_hi = hi_b.min().unwrap();
        } else {
            best.value_lo = lo_b.max().unwrap();
            best.value_hi = hi_b.max().unwrap();
        }
        best
    };
    Ok((pick(true), pick(false)))
}

/// Tri-state certified verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    Holds,
    Fails,
    Inconclusive,
}

/// Whether `p >= 0` on `[lo, hi]`, with an argument enclosure witnessing failure.
pub fn certify_nonnegative(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
    tol: &Rational,
) -> Result<(Certainty, CertifiedExtremum)> {
    let (m, _) = minmax_on_interval(p, lo, hi, tol)?;
    let c = if m.value_lo >= Rational::zero() {
        Certainty::Holds
    } else if m.value_hi < Rational::zero() {
        Certainty::Fails
    } else {
        Certainty::Inconclusive
    };
    Ok((c, m))
}

/// Default tolerance `2^-60`.
pub fn default_tol() -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << 60)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qi;
    use proptest::prelude::*;

    fn from_roots(r: &[Rational]) -> RationalPolynomial {
        r.iter().fold(RationalPolynomial::one(), |acc, x| {
            &acc * &RationalPolynomial::new(vec![-x.clone(), qi(1)])
        })
    }

    #[test]
    fn quadratic_minimum_is_exact() {
        // (9t^2 - 5)/8
        let p = RationalPolynomial::new(vec![q(-5, 8), qi(0), q(9, 8)]);
        let (mn, mx) = minmax_on_interval(&p, &qi(-1), &qi(1), &default_tol()).unwrap();
        assert_eq!(mn.value_lo, q(-5, 8));
        assert!(mn.is_exact());
        assert_eq!(mx.value_hi, q(1, 2));
    }

    #[test]
    fn irrational_roots_enclosed() {
        let p = RationalPolynomial::from_ints(&[-2, 0, 1]); // roots +-sqrt 2
        let r = sturm_isolate_roots(&p, &qi(-2), &qi(2)).unwrap();
        assert_eq!(r.len(), 2);
        let e = refine_root(&p, &r[1], &q(1, 1 << 30));
        let s = std::f64::consts::SQRT_2;
        assert!(crate::special::ratio_to_f64(&e.lo) <= s && s <= crate::special::ratio_to_f64(&e.hi));
    }

    #[test]
    fn double_root_flagged() {
        let p = &from_roots(&[q(1, 3), q(1, 3)]) * &from_roots(&[q(-1, 2)]);
        let r = sturm_isolate_roots(&p, &qi(-1), &qi(1)).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|e| e.multiplicity == Multiplicity::Unknown));
        assert!(r.iter().any(|e| e.multiplicity == Multiplicity::Simple));
    }

    #[test]
    fn rejects_inverted_interval() {
        assert_eq!(
            sturm_isolate_roots(&RationalPolynomial::t(), &qi(1), &qi(0)),
            Err(Error::EmptyInterval)
        );
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let (l, h) = sqrt_bounds(&q(2, 1), 64);
        assert!(&l * &l <= q(2, 1) && q(2, 1) <= &h * &h);
        assert_eq!(sqrt_bounds(&q(9, 4), 64), (q(3, 2), q(3, 2)));
    }

    #[test]
    fn parity_route_agrees_with_direct() {
        let tol = default_tol();
        for k in [5usize, 8, 13] {
            let p = crate::legendre::legendre(5, k).unwrap();
            let (a, b) = minmax_on_interval(&p, &qi(-1), &qi(1), &tol).unwrap();
            let dp = p.derivative();
            let direct = sturm_isolate_roots(&dp, &qi(-1), &qi(1)).unwrap();
            let par = isolate_by_parity(&dp, &qi(1)).unwrap();
            assert_eq!(direct.len(), par.len());
            for (x, y) in direct.iter().zip(&par) {
                assert!(x.lo <= y.hi && y.lo <= x.hi);
            }
            assert!(a.value_lo <= b.value_hi);
        }
    }

    proptest! {
        #[test]
        fn isolates_planted_roots(nums in prop::collection::btree_set(-40i64..40, 1..7)) {
            let roots: Vec<Rational> = nums.iter().map(|&v| q(v, 37)).collect();
            let p = from_roots(&roots);
            let encl = sturm_isolate_roots(&p, &qi(-2), &qi(2)).unwrap();
            prop_assert_eq!(encl.len(), roots.len());
            for (e, r) in encl.iter().zip(roots.iter()) {
                prop_assert!(&e.lo <= r && r <= &e.hi);
            }
            for w in encl.windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
        }

        #[test]
        fn extremum_bounds_bracket_samples(c in prop::collection::vec(-9i64..9, 2..8)) {
            let p = RationalPolynomial::from_ints(&c);
            let tol = q(1, 1 << 40);
            let (mn, mx) = minmax_on_interval(&p, &qi(-1), &qi(1), &tol).unwrap();
            prop_assert!(&mn.value_hi - &mn.value_lo <= tol);
            for s in -16..=16 {
                let v = p.eval(&q(s, 16));
                prop_assert!(mn.value_lo <= v && v <= mx.value_hi);
            }
        }
    }
}
