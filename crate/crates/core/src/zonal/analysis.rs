use super::ops::apply_laplacian;
use super::profile::{sampled_series, Atom, ClosedForm, Representation, ZonalProfile};
use crate::error::{Error, Result};
use crate::legendre::{from_legendre_basis, to_legendre_basis};
use crate::multiplier::MultiplierSequence;
use crate::poly::{Rational, RationalPolynomial};
use crate::quadrature::{jacobi_rule, polar_nodes};
use crate::series::{legendre_values, legendre_values_into, LegendreSeries};
use crate::special::{dim_harmonics, dim_harmonics_exact, omega, omega_exact, PiMonomial};
use num_traits::Zero;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

const T_ROUTE_MAX_FREQ: usize = 256;
const QUAD_TOL: f64 = 1e-10;

/// Polar angles splitting `[0, pi]` at the equator and at the kinks.
fn breakpoints(c: &ClosedForm, lo: f64, hi: f64) -> Vec<f64> {
    let mut b = vec![lo, hi];
    if lo < FRAC_PI_2 && FRAC_PI_2 < hi {
        b.push(FRAC_PI_2);
    }
    for k in &c.kinks {
        let th = k.t.clamp(-1.0, 1.0).acos();
        if lo < th && th < hi {
            b.push(th);
        }
    }
    b.sort_by(|x, y| x.total_cmp(y));
    b.dedup();
    b
}

/// `(t, w)` with `int_{-1}^{1} phi(t) f(t) (1-t^2)^((n-3)/2) dt ~ sum w phi(t)` for the density
/// part of a closed-form profile, resolving test functions up to degree `freq`.
fn closed_nodes(n: usize, c: &ClosedForm, freq: usize) -> Result<Vec<(f64, f64)>> {
    if c.kinks.is_empty() && freq <= T_ROUTE_MAX_FREQ {
        let a = (n as f64 - 3.0 + c.exponent) / 2.0;
        let r = jacobi_rule((4 * freq).max(32), a, a)?;
        return Ok(r.nodes.iter().zip(&r.weights).map(|(&t, &w)| (t, w * (c.smooth)(t))).collect());
    }
    polar_density_nodes(n, c, 0.0, PI, freq)
}

fn polar_density_nodes(n: usize, c: &ClosedForm, lo: f64, hi: f64, freq: usize) -> Result<Vec<(f64, f64)>> {
    let q = n as f64 - 2.0 + c.exponent;
    let b = breakpoints(c, lo, hi);
    let mut out = Vec::new();
    for w in b.windows(2) {
        for (th, wt) in polar_nodes(q, w[0], w[1], freq)? {
            let t = th.cos();
            out.push((t, wt * (c.smooth)(t)));
        }
    }
    Ok(out)
}

fn project_nodes(n: usize, nodes: &[(f64, f64)], kmax: usize) -> Vec<f64> {
    let mut acc = vec![0.0; kmax + 1];
    let mut p = Vec::with_capacity(kmax + 1);
    for &(t, w) in nodes {
        legendre_values_into(n, t, kmax, &mut p);
        for k in 0..=kmax {
            acc[k] += w * p[k];
        }
    }
    let on1 = omega(n - 1);
    acc.iter_mut().for_each(|a| *a *= on1);
    acc
}

fn add_atoms(n: usize, atoms: &[Atom], vals: &mut [f64]) {
    let kmax = vals.len() - 1;
    for a in atoms {
        let p = legendre_values(n, a.t, kmax);
        for k in 0..=kmax {
            vals[k] += a.mass * p[k];
        }
    }
}

fn series_multipliers(s: &LegendreSeries, kmax: usize) -> Vec<f64> {
    let on = omega(s.n);
    (0..=kmax).map(|k| s.coeffs.get(k).copied().unwrap_or(0.0) * on / dim_harmonics(s.n, k)).collect()
}

/// Exact `a_k = omega_n c_k / dim H_k` for a polynomial profile.
pub fn exact_multipliers(n: usize, p: &RationalPolynomial, kmax: usize) -> Vec<PiMonomial> {
    let c = to_legendre_basis(p, n);
    let on = omega_exact(n);
    (0..=kmax)
        .map(|k| {
            let ck = c.get(k).cloned().unwrap_or_else(Rational::zero);
            on.mul(&PiMonomial::rational(ck / Rational::from_integer(dim_harmonics_exact(n, k))))
        })
        .collect()
}

/// Funk–Hecke multipliers `a_k = omega_{n-1} int P^n_k(t) (1-t^2)^((n-3)/2) f(dt)` for `k <= kmax`.
pub fn multipliers(f: &ZonalProfile, kmax: usize) -> Result<MultiplierSequence> {
    let n = f.n;
    let (mut values, exact, err) = match &f.repr {
        Representation::Exact(p, _) => {
            let ex = exact_multipliers(n, p, kmax);
            (ex.iter().map(|m| m.to_f64()).collect::<Vec<_>>(), Some(ex), 0.0)
        }
        Representation::Series(s) => (series_multipliers(s, kmax), None, 0.0),
        Representation::Sampled(s) => {
            let nodes: Vec<(f64, f64)> =
                s.rule.nodes.iter().zip(&s.rule.weights).zip(&s.values).map(|((&t, &w), &v)| (t, w * v)).collect();
            (project_nodes(n, &nodes, kmax), None, 0.0)
        }
        Representation::Closed(c) => {
            let a = project_nodes(n, &closed_nodes(n, c, kmax.max(8))?, kmax);
            let b = project_nodes(n, &closed_nodes(n, c, 2 * kmax.max(8) + 16)?, kmax);
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
            let err = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale;
            if !(err <= QUAD_TOL) {
                return Err(Error::Quadrature(err));
            }
            (b, None, err)
        }
    };
    add_atoms(n, &f.atoms, &mut values);
    let exact = if f.atoms.is_empty() { exact } else { None };
    Ok(MultiplierSequence { n, values, exact, source: f.label(), quadrature_error: err })
}

/// Legendre coefficients of `f` up to `kmax`: `c_k = dim H_k a_k / omega_n`.
pub fn legendre_coefficients(f: &ZonalProfile, kmax: usize) -> Result<LegendreSeries> {
    if let (Representation::Series(s), true) = (&f.repr, f.atoms.is_empty()) {
        let mut c = s.coeffs.clone();
        c.resize(kmax + 1, 0.0);
        return Ok(LegendreSeries::new(f.n, c));
    }
    Ok(synthesize(&multipliers(f, kmax)?))
}

/// `sum_k (dim H_k / omega_n) a_k P^n_k`.
pub fn synthesize(m: &MultiplierSequence) -> LegendreSeries {
    let on = omega(m.n);
    LegendreSeries::new(
        m.n,
        m.values.iter().enumerate().map(|(k, a)| a * dim_harmonics(m.n, k) / on).collect(),
    )
}

/// Exact synthesis when every multiplier is a rational multiple of `omega_n`.
pub fn synthesize_exact(m: &MultiplierSequence) -> Option<RationalPolynomial> {
    let ex = m.exact.as_ref()?;
    let on = omega_exact(m.n);
    let mut c = Vec::with_capacity(ex.len());
    for (k, a) in ex.iter().enumerate() {
        let r = a.div(&on);
        if !r.is_rational() {
            return None;
        }
        c.push(r.coeff * Rational::from_integer(dim_harmonics_exact(m.n, k)));
    }
    Some(from_legendre_basis(&c, m.n))
}

/// `phi * nu` through Funk–Hecke: coefficients `c_k[phi] a_k[nu]` up to `kmax`.
pub fn convolve(phi: &ZonalProfile, nu: &ZonalProfile, kmax: usize) -> Result<ZonalProfile> {
    if phi.n != nu.n {
        return Err(Error::DimensionMismatch(phi.n, nu.n));
    }
    let c = legendre_coefficients(phi, kmax)?;
    let a = multipliers(nu, kmax)?;
    ZonalProfile::series(LegendreSeries::new(
        phi.n,
        c.coeffs.iter().zip(&a.values).map(|(x, y)| x * y).collect(),
    ))
}

// int_{cos r}^1 P^n_k (1-t^2)^((n-3)/2) dt = (sin r)^(n-1) P^{n+2}_{k-1}(cos r) / (n-1), k >= 1
fn series_cap(s: &LegendreSeries, r: f64) -> Result<f64> {
    let n = s.n;
    let on1 = omega(n - 1);
    let c0 = s.coeffs.first().copied().unwrap_or(0.0);
    let mut m = 0.0;
    if c0 != 0.0 {
        m += c0 * crate::quadrature::integrate_polar(&|_| 1.0, n as f64 - 2.0, 0.0, r.min(PI), 0)?;
    }
    if s.coeffs.len() > 1 {
        let st = r.sin().powi(n as i32 - 1) / (n as f64 - 1.0);
        let p = legendre_values(n + 2, r.cos(), s.coeffs.len() - 2);
        m += st * s.coeffs[1..].iter().zip(&p).map(|(c, p)| c * p).sum::<f64>();
    }
    Ok(on1 * m)
}

/// `f(cap_r(e))`, the mass of the open cap of angular radius `r` about the north pole.
pub fn cap_mass(f: &ZonalProfile, r: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&r) {
        return Err(Error::Invalid(format!("cap radius {r} outside [0, pi]")));
    }
    let n = f.n;
    let dens = match &f.repr {
        Representation::Exact(_, s) | Representation::Series(s) => series_cap(s, r)?,
        Representation::Sampled(s) => series_cap(&sampled_series(s, n), r)?,
        Representation::Closed(c) => {
            omega(n - 1) * polar_density_nodes(n, c, 0.0, r, 64)?.iter().map(|&(_, w)| w).sum::<f64>()
        }
    };
    let at: f64 = f.atoms.iter().filter(|a| a.t.clamp(-1.0, 1.0).acos() < r).map(|a| a.mass).sum();
    Ok(dens + at)
}

/// Largest deviation in `(Delta f)(cap_r) = -omega_{n-1} (sin r)^(n-1) f'(cos r)` over `rs`,
/// relative to the largest right-hand side.
pub fn laplacian_cap_identity_residual(f: &ZonalProfile, rs: &[f64]) -> Result<f64> {
    let lap = apply_laplacian(f)?;
    let on1 = omega(f.n - 1);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &r in rs {
        let lhs = cap_mass(&lap, r)?;
        let rhs = -on1 * r.sin().powi(f.n as i32 - 1) * f.jet(r.cos())?[1];
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    Ok(if worst == 0.0 { 0.0 } else { worst / scale.max(f64::MIN_POSITIVE) })
}

/// Profile of `|f|` (densities and atoms), for total-variation cap masses.
pub fn abs_profile(f: &ZonalProfile) -> Result<ZonalProfile> {
    let atoms: Vec<Atom> = f.atoms.iter().map(|a| Atom { t: a.t, mass: a.mass.abs() }).collect();
    let c = match &f.repr {
        Representation::Closed(c) => {
            let s = c.smooth.clone();
            ClosedForm::new(format!("|{}|", c.label), Arc::new(move |t| s(t).abs()))
                .with_exponent(c.exponent)
                .with_kinks(c.kinks.clone())
        }
        _ => {
            let s = match &f.repr {
                Representation::Exact(_, s) | Representation::Series(s) => s.clone(),
                Representation::Sampled(s) => sampled_series(s, f.n),
                Representation::Closed(_) => unreachable!(),
            };
            ClosedForm::new("|series|", Arc::new(move |t| s.eval(t).abs()))
        }
    };
    Ok(ZonalProfile::closed(f.n, c)?.with_atoms(atoms))
}

/// Least-squares slope of `log y` against `log x` over positive samples.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let se = (resid / (m - 2.0) / sxx).sqrt();
    Some((slope, se))
}

/// Cap-integral diagnostic about one pole.
#[derive(Clone, Debug, Serialize)]
pub struct PoleRegularity {
    /// `int_{r_min}^{pi/2} |mu|(cap_r) dr / r`
    pub integral: f64,
    /// Fitted exponent of `|mu|(cap_r) ~ r^alpha` on the small-radius end; `None` without mass there.
    pub alpha: Option<f64>,
    /// Share of the integral contributed by `r < 2^-10`.
    pub tail_fraction: f64,
    pub divergent: bool,
    pub partial_sums: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub north: PoleRegularity,
    pub south: PoleRegularity,
}

impl RegularityReport {
    pub fn holds(&self) -> bool {
        !self.north.divergent && !self.south.divergent
    }
}

pub const R_MIN: f64 = 1.0 / 1048576.0;

fn pole_regularity(absf: &ZonalProfile) -> Result<PoleRegularity> {
    // r_j = (pi/2) 2^(-j/4) down to 2^-20
    let mut rs = Vec::new();
    let mut r = FRAC_PI_2;
    while r >= R_MIN {
        rs.push(r);
        r *= 0.5f64.powf(0.25);
    }
    rs.push(R_MIN);
    let masses: Vec<f64> = rs.iter().map(|&r| cap_mass(absf, r)).collect::<Result<_>>()?;
    let mut partial = Vec::with_capacity(rs.len());
    let mut acc = 0.0;
    let mut tail = 0.0;
    partial.push((rs[0], 0.0));
    for j in 1..rs.len() {
        let d = 0.5 * (masses[j] + masses[j - 1]) * (rs[j - 1] / rs[j]).ln();
        acc += d;
        if rs[j - 1] <= 1.0 / 1024.0 {
            tail += d;
        }
        partial.push((rs[j], acc));
    }
    let small: Vec<usize> = (0..rs.len()).filter(|&j| rs[j] <= 1.0 / 1024.0).collect();
    let xs: Vec<f64> = small.iter().map(|&j| rs[j]).collect();
    let ys: Vec<f64> = small.iter().map(|&j| masses[j]).collect();
    let alpha = if ys.iter().all(|&y| y == 0.0) { None } else { loglog_slope(&xs, &ys).map(|s| s.0) };
    let tail_fraction = if acc > 0.0 { tail / acc } else { 0.0 };
    Ok(PoleRegularity {
        integral: acc,
        alpha,
        tail_fraction,
        divergent: tail_fraction > 0.25 || alpha.is_some_and(|a| a < 0.05),
        partial_sums: partial,
    })
}

/// Cap-integral regularity test of a measure at both poles.
pub fn regularity_diagnostic(mu: &ZonalProfile) -> Result<RegularityReport> {
    let a = abs_profile(mu)?;
    Ok(RegularityReport { north: pole_regularity(&a)?, south: pole_regularity(&a.reflect())? })
}

/// Decomposition `mu = nu + c t` with `nu >= 0` searched over `c`.
#[derive(Clone, Debug, Serialize)]
pub struct WeakPositivityReport {
    pub min_density: f64,
    pub best_linear: f64,
    pub min_after_linear: f64,
    pub negative_atoms: bool,
    pub weakly_positive: bool,
    /// `max_r |mu|(caps about both poles) / r^(i-1)` on the small-radius grid.
    pub cap_constant: f64,
    pub cap_exponent: Option<f64>,
}

pub fn weak_positivity_diagnostic(mu: &ZonalProfile, i: usize) -> Result<WeakPositivityReport> {
    let m = 4001;
    let ts: Vec<f64> = (0..m).map(|j| ((j as f64 + 0.5) * PI / m as f64).cos()).collect();
    let d: Vec<f64> = ts.iter().map(|&t| mu.eval(t)).collect();
    let min_density = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let g = |c: f64| ts.iter().zip(&d).map(|(t, v)| v - c * t).fold(f64::INFINITY, f64::min);
    let bound = 2.0 * d.iter().fold(0.0f64, |a, v| a.max(v.abs())) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1) < g(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let c = 0.5 * (lo + hi);
    let after = g(c);
    let negative_atoms = mu.atoms.iter().any(|a| a.mass < 0.0);
    let tol = 1e-12 * bound;
    let a = abs_profile(mu)?;
    let ar = a.reflect();
    let rs: Vec<f64> = (0..21).map(|j| 1e-2 * 0.5f64.powi(j)).collect();
    let caps: Vec<f64> =
        rs.iter().map(|&r| Ok(cap_mass(&a, r)? + cap_mass(&ar, r)?)).collect::<Result<_>>()?;
    let cap_constant = rs.iter().zip(&caps).map(|(r, c)| c / r.powi(i as i32 - 1)).fold(0.0f64, f64::max);
    let cap_exponent =
        if caps.iter().all(|&c| c == 0.0) { None } else { loglog_slope(&rs, &caps).map(|s| s.0) };
    Ok(WeakPositivityReport {
        min_density,
        best_linear: c,
        min_after_linear: after,
        negative_atoms,
        weakly_positive: after >= -tol && !negative_atoms,
        cap_constant,
        cap_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::legendre;
    use crate::poly::{q, qi};
    use crate::quadrature::jacobi_rule;
    use crate::zonal::{apply_a1, apply_a2, apply_box, Kink};
    use proptest::prelude::*;

    fn abs_t(n: usize) -> ZonalProfile {
        let c = ClosedForm::new("|t|", Arc::new(|t: f64| t.abs()))
            .with_jet(Arc::new(|t: f64| [t.abs(), t.signum(), 0.0]))
            .with_kinks(vec![Kink { t: 0.0, slope_jump: 2.0 }]);
        ZonalProfile::closed(n, c).unwrap()
    }

    fn closed(n: usize, f: fn(f64) -> f64) -> ZonalProfile {
        ZonalProfile::closed(n, ClosedForm::new("test", Arc::new(f))).unwrap()
    }

    #[test]
    fn constant_and_abs_examples() {
        let m = multipliers(&ZonalProfile::constant(3, 1.0).unwrap(), 6).unwrap();
        assert!((m.values[0] - 4.0 * PI).abs() < 1e-13);
        assert!(m.values[1..].iter().all(|v| v.abs() < 1e-13));
        let a = multipliers(&abs_t(3), 4).unwrap();
        assert!((a.values[0] - 2.0 * PI).abs() < 1e-12);
        assert!((a.values[2] / a.values[0] - 0.25).abs() < 1e-12);
        assert!(a.values[1].abs() < 1e-13 && a.values[3].abs() < 1e-13);
    }

    #[test]
    fn synthesis_inverts_analysis() {
        let s = synthesize(&multipliers(&ZonalProfile::constant(5, 1.0).unwrap(), 3).unwrap());
        assert!((s.coeffs[0] - 1.0).abs() < 1e-15);
        for n in 3..8 {
            let p = &legendre(n, 4).unwrap().scale(&q(2, 3)) + &RationalPolynomial::from_ints(&[1, -2, 0, 5]);
            let m = multipliers(&ZonalProfile::exact(n, p.clone()).unwrap(), 6).unwrap();
            assert_eq!(synthesize_exact(&m).unwrap(), p);
        }
    }

    #[test]
    fn box_examples() {
        let one = ZonalProfile::exact(4, RationalPolynomial::one()).unwrap();
        assert_eq!(apply_box(&one).unwrap().as_exact().unwrap(), &RationalPolynomial::one());
        let t = ZonalProfile::exact(4, RationalPolynomial::t()).unwrap();
        assert!(apply_box(&t).unwrap().as_exact().unwrap().is_zero());
        let p = ZonalProfile::exact(3, legendre(3, 2).unwrap()).unwrap();
        assert_eq!(apply_a1(&p).unwrap().as_exact().unwrap(), &RationalPolynomial::new(vec![q(-1, 2), qi(0), q(-3, 2)]));
        assert_eq!(apply_a2(&p).unwrap().as_exact().unwrap(), &RationalPolynomial::new(vec![q(5, 2), qi(0), q(-9, 2)]));
        // closed forms
        let disk = ZonalProfile::closed(
            5,
            ClosedForm::new("disk", Arc::new(|_| 1.0)).with_exponent(1.0).with_jet(Arc::new(|t: f64| {
                let s = (1.0 - t * t).sqrt();
                [s, -t / s, -1.0 / (s * s * s)]
            })),
        )
        .unwrap();
        let a2 = apply_a2(&disk).unwrap();
        for &t in &[-0.9, -0.3, 0.2, 0.7] {
            assert!(a2.eval(t).abs() < 1e-12);
        }
        let a1 = apply_a1(&abs_t(3)).unwrap();
        assert!(a1.eval(0.4).abs() < 1e-15 && a1.eval(-0.8).abs() < 1e-15);
        let a2 = apply_a2(&abs_t(3)).unwrap();
        assert_eq!(a2.atoms.len(), 1);
        assert!((a2.atoms[0].mass - 2.0 * 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn box_multipliers_scale_by_eigenvalue() {
        let f = abs_t(4);
        let a = multipliers(&f, 10).unwrap();
        let b = multipliers(&apply_box(&f).unwrap(), 10).unwrap();
        for k in 0..=10 {
            let ev = crate::zonal::box_eigenvalue(4, k);
            assert!((b.values[k] - ev * a.values[k]).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn sampled_profiles_reject_derivatives() {
        let s = ZonalProfile::sampled(3, 16, |t| t * t).unwrap();
        assert!(matches!(apply_box(&s), Err(Error::NotDifferentiable(_))));
        let m = multipliers(&s, 4).unwrap();
        assert!((m.values[0] - 2.0 * PI * 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn cap_mass_examples() {
        for n in 3..7 {
            let one = ZonalProfile::constant(n, 1.0).unwrap();
            assert!((cap_mass(&one, PI).unwrap() - omega(n)).abs() < 1e-12);
            let at = ZonalProfile::atomic(n, vec![Atom { t: 1.0, mass: 1.0 }]).unwrap();
            for r in [1e-9, 0.1, 3.0] {
                assert_eq!(cap_mass(&at, r).unwrap(), 1.0);
            }
            assert_eq!(cap_mass(&at, 0.0).unwrap(), 0.0);
        }
        // series cap formula against closed-form quadrature
        let f = closed(4, |t| (2.0 * t).exp());
        let s = ZonalProfile::series(legendre_coefficients(&f, 40).unwrap()).unwrap();
        for r in [1e-3, 0.4, 1.7, 3.1] {
            let (a, b) = (cap_mass(&f, r).unwrap(), cap_mass(&s, r).unwrap());
            assert!((a - b).abs() < 1e-11 * a.abs().max(1e-12), "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn laplacian_identity() {
        let rs: Vec<f64> = (1..40).map(|j| j as f64 * PI / 40.0).collect();
        let one = ZonalProfile::exact(3, RationalPolynomial::one()).unwrap();
        assert_eq!(laplacian_cap_identity_residual(&one, &rs).unwrap(), 0.0);
        for n in 3..8 {
            let p = ZonalProfile::exact(n, legendre(n, 4).unwrap()).unwrap();
            assert!(laplacian_cap_identity_residual(&p, &rs).unwrap() < 1e-10);
        }
        let f = ZonalProfile::closed(
            5,
            ClosedForm::new("exp", Arc::new(|t: f64| t.exp())).with_jet(Arc::new(|t: f64| [t.exp(); 3])),
        )
        .unwrap();
        assert!(laplacian_cap_identity_residual(&f, &rs).unwrap() < 1e-10);
    }

    /// `(phi * f)(u)` by direct integration over the sphere, `u` at height `s`.
    fn brute_convolution(n: usize, phi: fn(f64) -> f64, f: fn(f64) -> f64, s: f64) -> f64 {
        let at = jacobi_rule(80, (n as f64 - 3.0) / 2.0, (n as f64 - 3.0) / 2.0).unwrap();
        let ax = jacobi_rule(80, (n as f64 - 4.0) / 2.0, (n as f64 - 4.0) / 2.0).unwrap();
        let c = (1.0 - s * s).sqrt();
        let mut acc = 0.0;
        for (&t, &wt) in at.nodes.iter().zip(&at.weights) {
            let st = (1.0 - t * t).sqrt();
            for (&x, &wx) in ax.nodes.iter().zip(&ax.weights) {
                acc += wt * wx * phi(t) * f(s * t + c * st * x);
            }
        }
        omega(n - 2) * acc
    }

    #[test]
    fn funk_hecke_matches_direct_integration() {
        let cases: [(fn(f64) -> f64, fn(f64) -> f64); 3] =
            [(|t| t.exp(), |t| 1.0 / (2.0 - t)), (|t| (3.0 * t).cos(), |t| t * t * t + t), (|t| t * t, |t| (t + 0.3).sin())];
        for n in [4usize, 5, 7] {
            for (phi, f) in cases {
                let out = convolve(&closed(n, phi), &closed(n, f), 40).unwrap();
                for s in [-0.8, 0.0, 0.35, 0.9] {
                    let b = brute_convolution(n, phi, f, s);
                    assert!((out.eval(s) - b).abs() < 1e-8 * b.abs().max(1.0), "n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn quadrature_failure_is_reported() {
        // an undeclared corner at t = 0.3 converges too slowly
        let f = ZonalProfile::closed(3, ClosedForm::new("corner", Arc::new(|t: f64| (t - 0.3).abs()))).unwrap();
        assert!(matches!(multipliers(&f, 20), Err(Error::Quadrature(_))));
    }

    #[test]
    fn regularity_examples() {
        // atom at the pole: logarithmic divergence
        let mut p = ZonalProfile::constant(3, 0.0).unwrap();
        p.atoms.push(Atom { t: 1.0, mass: 1.0 });
        let r = regularity_diagnostic(&p).unwrap();
        assert!(r.north.divergent && !r.holds());
        for n in 3..7 {
            let u = regularity_diagnostic(&ZonalProfile::constant(n, 1.0).unwrap()).unwrap();
            assert!((u.north.alpha.unwrap() - (n as f64 - 1.0)).abs() < 1e-3 && u.holds());
            let c = ZonalProfile::closed(n, ClosedForm::new("cos", Arc::new(|_| 1.0)).with_exponent(-1.0)).unwrap();
            let d = regularity_diagnostic(&c).unwrap();
            assert!((d.north.alpha.unwrap() - (n as f64 - 2.0)).abs() < 1e-3, "n={n}");
        }
    }

    #[test]
    fn weak_positivity_examples() {
        let neg = ZonalProfile::constant(3, -1.0).unwrap();
        assert!(!weak_positivity_diagnostic(&neg, 2).unwrap().weakly_positive);
        let lin = ZonalProfile::exact(3, RationalPolynomial::from_ints(&[1, 3])).unwrap();
        let w = weak_positivity_diagnostic(&lin, 2).unwrap();
        assert!(w.min_density < 0.0 && w.weakly_positive);
        assert!((w.best_linear - 3.0).abs() < 1.5);
    }

    proptest! {
        #[test]
        fn funk_hecke_commutes(a in prop::collection::vec(-1.0f64..1.0, 1..8), b in prop::collection::vec(-1.0f64..1.0, 1..8), n in 3usize..8) {
            let f = ZonalProfile::series(LegendreSeries::new(n, a)).unwrap();
            let g = ZonalProfile::series(LegendreSeries::new(n, b)).unwrap();
            let fg = convolve(&f, &g, 10).unwrap();
            let gf = convolve(&g, &f, 10).unwrap();
            for t in [-0.7, 0.1, 0.9] {
                prop_assert!((fg.eval(t) - gf.eval(t)).abs() < 1e-10 * (1.0 + fg.eval(t).abs()));
            }
        }

        #[test]
        fn exact_round_trip(c in prop::collection::vec((-9i64..9, 1i64..5), 1..7), n in 3usize..9) {
            let p = RationalPolynomial::new(c.into_iter().map(|(a, b)| q(a, b)).collect());
            let m = multipliers(&ZonalProfile::exact(n, p.clone()).unwrap(), 8).unwrap();
            prop_assert_eq!(synthesize_exact(&m).unwrap(), p);
        }
    }
}
