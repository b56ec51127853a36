//! Convex bodies of revolution about the north pole, given by their support profiles.

use crate::error::{check_dim, Error, Result};
use crate::legendre::legendre;
use crate::multiplier::box_eigenvalue_exact;
use crate::poly::{qi, Rational, RationalPolynomial};
use crate::roots::{certify_nonnegative, default_tol, Certainty};
use crate::series::LegendreSeries;
use crate::special::{binom, binom_big, kappa, omega, ratio_to_f64};
use crate::zonal::{
    a1_poly, a2_poly, apply_a1, apply_a2, cap_mass, exact_multipliers, loglog_slope, multipliers, Atom, ClosedForm,
    Kink, Representation, ZonalProfile,
};
use num_traits::Signed;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BodyKind {
    Ball,
    Segment,
    Disk,
    Spheroid(f64),
    CapSum(f64),
    Pencil { k: usize, lambda: String },
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidityFlag {
    CertifiedValid,
    CertifiedInvalid,
    Unchecked,
}

#[derive(Clone, Debug)]
pub struct BodyOfRevolution {
    pub name: String,
    pub n: usize,
    pub kind: BodyKind,
    pub support: ZonalProfile,
    pub validity: ValidityFlag,
}

fn abs_kinked(n: usize, alpha: f64, c0: f64, label: String) -> Result<ZonalProfile> {
    let c = ClosedForm::new(label, Arc::new(move |t: f64| c0 + alpha * t.abs()))
        .with_jet(Arc::new(move |t: f64| [c0 + alpha * t.abs(), alpha * t.signum(), 0.0]))
        .with_kinks(vec![Kink { t: 0.0, slope_jump: 2.0 * alpha }]);
    ZonalProfile::closed(n, c)
}

fn disk_profile(n: usize) -> Result<ZonalProfile> {
    let c = ClosedForm::new("disk", Arc::new(|_| 1.0)).with_exponent(1.0).with_jet(Arc::new(|t: f64| {
        let s = (1.0 - t * t).sqrt();
        [s, -t / s, -1.0 / (s * s * s)]
    }));
    ZonalProfile::closed(n, c)
}

/// Prolate spheroid `sqrt(1 - e^2 + e^2 t^2)`, scaled so that `a_0` equals that of the ball.
fn spheroid_profile(n: usize, e: f64) -> Result<ZonalProfile> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::Invalid(format!("spheroid eccentricity {e} outside [0, 1)")));
    }
    let e2 = e * e;
    let raw = ClosedForm::new("spheroid", Arc::new(move |t: f64| (1.0 - e2 + e2 * t * t).sqrt()));
    let a0 = multipliers(&ZonalProfile::closed(n, raw)?, 0)?.values[0];
    let s = omega(n) / a0;
    let c = ClosedForm::new(format!("spheroid({e})"), Arc::new(move |t: f64| s * (1.0 - e2 + e2 * t * t).sqrt()))
        .with_jet(Arc::new(move |t: f64| {
            let g = 1.0 - e2 + e2 * t * t;
            let r = g.sqrt();
            [s * r, s * e2 * t / r, s * e2 * (1.0 - e2) / (g * r)]
        }));
    ZonalProfile::closed(n, c)
}

fn parse_param(name: &str, head: &str) -> Option<Result<f64>> {
    let rest = name.strip_prefix(head)?;
    let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).or_else(|| rest.strip_prefix(':'))?;
    Some(inner.trim().parse::<f64>().map_err(|_| Error::UnknownBody(name.to_string())))
}

/// `ball`, `segment`, `disk`, `spheroid(e)` and `cap-sum(alpha)` (ball plus `alpha` times the segment).
pub fn canonical_body(name: &str, n: usize) -> Result<BodyOfRevolution> {
    check_dim(n)?;
    let (kind, support) = match name {
        "ball" => (BodyKind::Ball, ZonalProfile::exact(n, RationalPolynomial::one())?),
        "segment" => (BodyKind::Segment, abs_kinked(n, 1.0, 0.0, "segment".into())?),
        "disk" => (BodyKind::Disk, disk_profile(n)?),
        _ => {
            if let Some(e) = parse_param(name, "spheroid") {
                let e = e?;
                (BodyKind::Spheroid(e), spheroid_profile(n, e)?)
            } else if let Some(a) = parse_param(name, "cap-sum") {
                let a = a?;
                if !(a >= 0.0) {
                    return Err(Error::Invalid("cap-sum needs alpha >= 0".into()));
                }
                (BodyKind::CapSum(a), abs_kinked(n, a, 1.0, format!("cap-sum({a})"))?)
            } else {
                return Err(Error::UnknownBody(name.to_string()));
            }
        }
    };
    Ok(BodyOfRevolution { name: name.to_string(), n, kind, support, validity: ValidityFlag::CertifiedValid })
}

/// The pencil body `1 + lambda P^n_k`, with certified validity.
pub fn pencil_body(n: usize, k: usize, lambda: Rational) -> Result<BodyOfRevolution> {
    let p = &RationalPolynomial::one() + &legendre(n, k)?.scale(&lambda);
    let support = ZonalProfile::exact(n, p)?;
    let validity = match is_support_function(&support)?.verdict {
        Certainty::Holds => ValidityFlag::CertifiedValid,
        Certainty::Fails => ValidityFlag::CertifiedInvalid,
        Certainty::Inconclusive => ValidityFlag::Unchecked,
    };
    Ok(BodyOfRevolution {
        name: format!("1 + ({lambda}) P[{n},{k}]"),
        n,
        kind: BodyKind::Pencil { k, lambda: lambda.to_string() },
        support,
        validity,
    })
}

/// A body from an arbitrary support profile.
pub fn general_body(name: impl Into<String>, support: ZonalProfile) -> BodyOfRevolution {
    BodyOfRevolution { name: name.into(), n: support.n, kind: BodyKind::General, support, validity: ValidityFlag::Unchecked }
}

/// Outcome of the support-function test `A1 h >= 0`, `A2 h >= 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Validity {
    pub verdict: Certainty,
    /// Certified by exact arithmetic rather than sampling.
    pub certified: bool,
    /// A point `t` where the test fails.
    pub witness: Option<f64>,
    pub min_a1: f64,
    pub min_a2: f64,
}

pub const SAMPLE_POINTS: usize = 10_000;
pub const SAMPLE_TOL: f64 = 1e-12;

/// Whether `h` is the support function of a convex body of revolution.
pub fn is_support_function(h: &ZonalProfile) -> Result<Validity> {
    if !h.atoms.is_empty() {
        return Err(Error::AtomDerivative);
    }
    if let Representation::Exact(p, _) = &h.repr {
        let tol = default_tol();
        let (one, m1) = (qi(1), qi(-1));
        let (c1, e1) = certify_nonnegative(&a1_poly(p), &m1, &one, &tol)?;
        let (c2, e2) = certify_nonnegative(&a2_poly(p), &m1, &one, &tol)?;
        let verdict = match (c1, c2) {
            (Certainty::Holds, Certainty::Holds) => Certainty::Holds,
            (Certainty::Fails, _) | (_, Certainty::Fails) => Certainty::Fails,
            _ => Certainty::Inconclusive,
        };
        let witness = match (c1, c2) {
            (Certainty::Fails, _) => Some(ratio_to_f64(&e1.arg.midpoint())),
            (_, Certainty::Fails) => Some(ratio_to_f64(&e2.arg.midpoint())),
            _ => None,
        };
        return Ok(Validity {
            verdict,
            certified: true,
            witness,
            min_a1: e1.mid_f64(),
            min_a2: e2.mid_f64(),
        });
    }
    let kinks: Vec<Kink> = match &h.repr {
        Representation::Closed(c) => c.kinks.clone(),
        _ => Vec::new(),
    };
    // series derivatives are formed once rather than per sample
    let derived = match &h.repr {
        Representation::Series(s) => Some((s.clone(), s.derivative(), s.derivative().derivative())),
        _ => None,
    };
    let jet = |t: f64| -> Result<[f64; 3]> {
        match &derived {
            Some((s, d1, d2)) => Ok([s.eval(t), d1.eval(t), d2.eval(t)]),
            None => h.jet(t),
        }
    };
    let (mut min1, mut min2) = (f64::INFINITY, f64::INFINITY);
    let mut witness = None;
    for j in 0..SAMPLE_POINTS {
        let t = ((j as f64 + 0.5) * std::f64::consts::PI / SAMPLE_POINTS as f64).cos();
        let [f, d1, d2] = jet(t)?;
        let a1 = f - t * d1;
        let s = (1.0 - t * t) * d2;
        let a2 = s + a1;
        let scale = f.abs() + (t * d1).abs() + s.abs();
        min1 = min1.min(a1 / scale.max(f64::MIN_POSITIVE));
        min2 = min2.min(a2 / scale.max(f64::MIN_POSITIVE));
        if witness.is_none() && (a1 < -SAMPLE_TOL * scale || a2 < -SAMPLE_TOL * scale) {
            witness = Some(t);
        }
    }
    if let Some(k) = kinks.iter().find(|k| k.slope_jump < 0.0) {
        witness = witness.or(Some(k.t));
    }
    Ok(Validity {
        verdict: if witness.is_some() { Certainty::Fails } else { Certainty::Holds },
        certified: false,
        witness,
        min_a1: min1,
        min_a2: min2,
    })
}

fn check_order(n: usize, i: usize) -> Result<()> {
    if i < 1 || i > n - 1 {
        return Err(Error::Index { n, i });
    }
    Ok(())
}

/// Exact density of `S_i` for a polynomial support function.
pub fn area_density_poly(p: &RationalPolynomial, n: usize, i: usize) -> RationalPolynomial {
    let (n, i) = (n as i64, i as i64);
    let a1 = a1_poly(p);
    let a2 = a2_poly(p);
    let pow = |x: &RationalPolynomial, e: i64| (0..e).fold(RationalPolynomial::one(), |acc, _| &acc * x);
    let c1 = Rational::from_integer(binom_big(n - 2, i));
    let c2 = Rational::from_integer(binom_big(n - 2, i - 1));
    let d = Rational::from_integer(binom_big(n - 1, i));
    let term1 = pow(&a1, i).scale(&c1);
    let term2 = (&pow(&a1, i - 1) * &a2).scale(&c2);
    (&term1 + &term2).scale(&(qi(1) / d))
}

/// The area measure `S_i(K, .)` as a zonal measure (density plus atoms).
pub fn area_measure(body: &BodyOfRevolution, i: usize) -> Result<ZonalProfile> {
    let n = body.n;
    check_order(n, i)?;
    if body.kind == BodyKind::Disk {
        if i == n - 1 {
            let k = kappa(n - 1);
            return ZonalProfile::atomic(n, vec![Atom { t: 1.0, mass: k }, Atom { t: -1.0, mass: k }]);
        }
        let c = (n - 1 - i) as f64 / (n - 1) as f64;
        let f = ClosedForm::new(format!("S_{i}(disk)"), Arc::new(move |_| c)).with_exponent(-(i as f64));
        return ZonalProfile::closed(n, f);
    }
    support_area_measure(&body.support, i)
}

/// `S_i` of a support profile that is `C^2` off finitely many corners.
pub fn support_area_measure(h: &ZonalProfile, i: usize) -> Result<ZonalProfile> {
    let n = h.n;
    check_order(n, i)?;
    match &h.repr {
        Representation::Exact(p, _) => return ZonalProfile::exact(n, area_density_poly(p, n, i)),
        Representation::Series(s) if s.is_constant() && h.atoms.is_empty() => {
            let c = s.coeffs.first().copied().unwrap_or(0.0);
            return ZonalProfile::series(LegendreSeries::new(n, vec![c.powi(i as i32)]));
        }
        _ => {}
    }
    let a1 = apply_a1(h)?;
    let a2 = apply_a2(h)?;
    let (c1, c2, d) = (binom(n as i64 - 2, i as i64), binom(n as i64 - 2, i as i64 - 1), binom(n as i64 - 1, i as i64));
    let atoms: Vec<Atom> = a2
        .atoms
        .iter()
        .map(|a| Atom { t: a.t, mass: c2 * a1.eval(a.t).powi(i as i32 - 1) * a.mass / d })
        .filter(|a| a.mass != 0.0)
        .collect();
    let kinks = match &a1.repr {
        Representation::Closed(c) => c.kinks.clone(),
        _ => Vec::new(),
    };
    let (p1, p2) = (a1.clone(), a2.clone());
    let dens = move |t: f64| {
        let x = p1.eval(t);
        let y = p2.eval(t);
        (c1 * x.powi(i as i32) + c2 * x.powi(i as i32 - 1) * y) / d
    };
    let c = ClosedForm::new(format!("S_{i}"), Arc::new(dens)).with_kinks(kinks);
    Ok(ZonalProfile::closed(n, c)?.with_atoms(atoms))
}

/// `a_2[box h] / a_0[box h]`, in `[-1/(n-1), 1/(n-1)^2]` for every body.
#[derive(Clone, Debug, Serialize)]
pub struct SecondRatio {
    pub value: f64,
    pub exact: Option<String>,
    pub lower: f64,
    pub upper: f64,
}

pub fn second_multiplier_ratio(body: &BodyOfRevolution) -> Result<SecondRatio> {
    let n = body.n;
    let nf = n as f64;
    let (lower, upper) = (-1.0 / (nf - 1.0), 1.0 / ((nf - 1.0) * (nf - 1.0)));
    if let Some(p) = body.support.as_exact() {
        let ex = exact_multipliers(n, p, 2);
        let r = ex[2].div(&ex[0]).coeff * box_eigenvalue_exact(n, 2);
        return Ok(SecondRatio { value: ratio_to_f64(&r), exact: Some(r.to_string()), lower, upper });
    }
    let m = multipliers(&body.support, 4)?;
    let ev = ratio_to_f64(&box_eigenvalue_exact(n, 2));
    Ok(SecondRatio { value: ev * m.values[2] / m.values[0], exact: None, lower, upper })
}

/// `kappa_{n-1} (sin r)^(n-1-i)`, a lower bound for `S_i(disk, cap_r)`.
pub fn disk_cap_lower_bound(n: usize, i: usize, r: f64) -> f64 {
    kappa(n - 1) * r.sin().powi((n - 1 - i) as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct FireyReport {
    pub fitted_exponent: f64,
    pub required_exponent: usize,
    /// `max_r S_i(K, cap_r) / (diam^i r^(n-1-i))` over the grid.
    pub constant: f64,
    pub holds: bool,
}

/// Small-cap behaviour `S_i(K, cap_r) <= C diam(K)^i r^(n-1-i)` about both poles.
pub fn firey_scaling_check(body: &BodyOfRevolution, i: usize, rs: &[f64]) -> Result<FireyReport> {
    let n = body.n;
    let s = area_measure(body, i)?;
    let sr = s.reflect();
    let masses: Vec<f64> = rs.iter().map(|&r| Ok(cap_mass(&s, r)?.max(cap_mass(&sr, r)?))).collect::<Result<_>>()?;
    let h = &body.support;
    let diam = (0..2001)
        .map(|j| {
            let t = -1.0 + 2.0 * j as f64 / 2000.0;
            h.eval(t) + h.eval(-t)
        })
        .fold(0.0f64, f64::max);
    let e = n - 1 - i;
    let constant = rs
        .iter()
        .zip(&masses)
        .map(|(r, m)| m / (diam.powi(i as i32) * r.powi(e as i32)))
        .fold(0.0f64, f64::max);
    let fitted = loglog_slope(rs, &masses).map_or(f64::INFINITY, |s| s.0);
    Ok(FireyReport { fitted_exponent: fitted, required_exponent: e, constant, holds: fitted >= e as f64 - 0.02 })
}

/// `lambda K` for `lambda > 0`, exact for polynomial supports.
pub fn scale_body(body: &BodyOfRevolution, lambda: &Rational) -> Result<BodyOfRevolution> {
    if !lambda.is_positive() {
        return Err(Error::Invalid("scaling factor must be positive".into()));
    }
    let p = body
        .support
        .as_exact()
        .ok_or_else(|| Error::Invalid("exact scaling needs a polynomial support".into()))?;
    Ok(BodyOfRevolution {
        name: format!("({lambda}) {}", body.name),
        n: body.n,
        kind: BodyKind::General,
        support: ZonalProfile::exact(body.n, p.scale(lambda))?,
        validity: body.validity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;
    use crate::zonal::apply_box;

    #[test]
    fn pencil_validity() {
        let ok = pencil_body(3, 2, q(3, 10)).unwrap();
        let v = is_support_function(&ok.support).unwrap();
        assert_eq!(v.verdict, Certainty::Holds);
        assert!(v.certified);
        assert_eq!(ok.validity, ValidityFlag::CertifiedValid);
        let bad = pencil_body(3, 2, q(3, 5)).unwrap();
        assert_eq!(bad.validity, ValidityFlag::CertifiedInvalid);
        let v = is_support_function(&bad.support).unwrap();
        assert_eq!(v.verdict, Certainty::Fails);
        assert!(v.witness.unwrap().abs() > 0.9);
        // the endpoints of [-2/5, 1/2] are valid, just outside is not
        for (l, want) in [(q(1, 2), Certainty::Holds), (q(-2, 5), Certainty::Holds), (q(51, 100), Certainty::Fails), (q(-41, 100), Certainty::Fails)] {
            assert_eq!(is_support_function(&pencil_body(3, 2, l).unwrap().support).unwrap().verdict, want);
        }
    }

    #[test]
    fn canonical_bodies_are_valid() {
        for n in 3..7 {
            for name in ["ball", "segment", "disk", "spheroid(0.6)", "cap-sum(0.5)"] {
                let b = canonical_body(name, n).unwrap();
                assert_eq!(is_support_function(&b.support).unwrap().verdict, Certainty::Holds, "{name} n={n}");
            }
        }
        assert!(canonical_body("torus", 3).is_err());
    }

    #[test]
    fn first_area_measure_is_box() {
        for n in 3..7 {
            let b = pencil_body(n, 4, q(1, 7)).unwrap();
            let s1 = area_measure(&b, 1).unwrap();
            let bx = apply_box(&b.support).unwrap();
            assert_eq!(s1.as_exact(), bx.as_exact());
        }
        let seg = canonical_body("segment", 4).unwrap();
        let s1 = area_measure(&seg, 1).unwrap();
        assert_eq!(s1.atoms.len(), 1);
        assert!((s1.atoms[0].mass - 2.0 * omega(3) / 3.0).abs() < 1e-12);
        assert!(area_measure(&seg, 2).unwrap().atoms.is_empty());
    }

    #[test]
    fn disk_area_measures() {
        for n in 3..7 {
            let d = canonical_body("disk", n).unwrap();
            let top = area_measure(&d, n - 1).unwrap();
            assert_eq!(top.atoms.len(), 2);
            let total = multipliers(&top, 0).unwrap().values[0];
            assert!((total - 2.0 * kappa(n - 1)).abs() < 1e-12);
            for i in 1..n - 1 {
                let s = area_measure(&d, i).unwrap();
                for r in [1e-3, 3e-3, 1e-2] {
                    let m = cap_mass(&s, r).unwrap();
                    let lb = disk_cap_lower_bound(n, i, r);
                    assert!(m >= lb && m / lb - 1.0 < 0.01, "n={n} i={i} r={r}");
                }
            }
        }
    }

    #[test]
    fn second_ratio_extremes() {
        for n in 3..9 {
            let nf = n as f64;
            let s = second_multiplier_ratio(&canonical_body("segment", n).unwrap()).unwrap();
            assert!((s.value + 1.0 / (nf - 1.0)).abs() < 1e-10);
            let d = second_multiplier_ratio(&canonical_body("disk", n).unwrap()).unwrap();
            assert!((d.value - 1.0 / ((nf - 1.0) * (nf - 1.0))).abs() < 1e-10);
            let b = second_multiplier_ratio(&canonical_body("ball", n).unwrap()).unwrap();
            assert_eq!(b.exact.as_deref(), Some("0"));
        }
    }

    #[test]
    fn firey_exponents() {
        let rs: Vec<f64> = (0..8).map(|j| 1e-2 * 0.5f64.powi(j)).collect();
        for n in 3..7 {
            let d = canonical_body("disk", n).unwrap();
            for i in 1..n {
                let f = firey_scaling_check(&d, i, &rs).unwrap();
                assert!((f.fitted_exponent - (n - 1 - i) as f64).abs() < 0.02 && f.holds, "n={n} i={i}");
            }
            let b = canonical_body("ball", n).unwrap();
            let f = firey_scaling_check(&b, 1, &rs).unwrap();
            assert!((f.fitted_exponent - (n - 1) as f64).abs() < 0.02);
        }
    }

    #[test]
    fn homogeneity_exact() {
        let b = pencil_body(5, 2, q(1, 5)).unwrap();
        for i in 1..5 {
            let s = area_measure(&b, i).unwrap();
            let s2 = area_measure(&scale_body(&b, &qi(2)).unwrap(), i).unwrap();
            let f = qi(2i64.pow(i as u32));
            assert_eq!(s2.as_exact().unwrap(), &s.as_exact().unwrap().scale(&f));
        }
    }

    proptest::proptest! {
        #[test]
        fn area_density_homogeneous(n in 3usize..8, half_k in 1usize..6, num in -20i64..20, c in 1i64..5, i_seed in 0usize..8) {
            let i = 1 + i_seed % (n - 1);
            let p = &RationalPolynomial::one() + &legendre(n, 2 * half_k).unwrap().scale(&q(num, 40));
            let s = area_density_poly(&p, n, i);
            let scaled = area_density_poly(&p.scale(&q(c, 3)), n, i);
            proptest::prop_assert_eq!(scaled, s.scale(&q(c, 3).pow(i as i32)));
        }

        #[test]
        fn first_area_density_is_box(n in 3usize..8, k in 0usize..12, num in -20i64..20) {
            let p = &RationalPolynomial::one() + &legendre(n, k).unwrap().scale(&q(num, 7));
            proptest::prop_assert_eq!(area_density_poly(&p, n, 1), crate::zonal::box_poly(&p, n));
        }
    }
}
