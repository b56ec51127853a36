//! Minkowski valuations `Phi_i` acting on zonal support functions through their multipliers.

use crate::bodies::{is_support_function, support_area_measure, BodyKind, BodyOfRevolution, Validity};
use crate::error::{check_dim, Error, Result};
use crate::multiplier::{berg_multipliers, box_transfer, decay_fit, DecayFit, MultiplierSequence};
use crate::roots::Certainty;
use crate::series::LegendreSeries;
use crate::special::{dim_harmonics, omega};
use crate::zonal::{apply_box, cap_mass, ClosedForm, legendre_coefficients, multipliers, Representation, ZonalProfile};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct ValuationSpec {
    pub n: usize,
    pub i: usize,
    /// `a_k[f]` with the linear slot zeroed.
    pub f_multipliers: MultiplierSequence,
    /// `a_k[box f]`.
    pub box_multipliers: MultiplierSequence,
    /// `box f` as a measure, when the generator is known pointwise.
    pub box_profile: Option<ZonalProfile>,
    pub even: bool,
    pub weakly_monotone: bool,
    pub label: String,
}

fn check_degree(n: usize, i: usize) -> Result<()> {
    check_dim(n)?;
    if i < 1 || i > n - 1 {
        return Err(Error::Index { n, i });
    }
    Ok(())
}

fn centered(mut m: MultiplierSequence) -> MultiplierSequence {
    if m.values.len() > 1 {
        m.values[1] = 0.0;
    }
    if let Some(ex) = m.exact.as_mut() {
        if ex.len() > 1 {
            ex[1] = crate::special::PiMonomial::rational(crate::poly::qi(0));
        }
    }
    m
}

impl ValuationSpec {
    fn build(
        n: usize,
        i: usize,
        f: MultiplierSequence,
        box_profile: Option<ZonalProfile>,
        weakly_monotone: bool,
        label: String,
    ) -> Result<Self> {
        check_degree(n, i)?;
        let f = centered(f);
        let scale = f.max_abs();
        let even = f.values.iter().skip(1).step_by(2).all(|a| a.abs() <= 1e-12 * scale);
        let b = box_transfer(&f);
        if !(b.get(0) > 0.0) {
            return Err(Error::Invalid(format!("degenerate spec {label}: a_0[box f] <= 0")));
        }
        Ok(ValuationSpec { n, i, f_multipliers: f, box_multipliers: b, box_profile, even, weakly_monotone, label })
    }

    /// Generated by a body of revolution: `f = h_L` up to a linear term.
    pub fn from_generating_body(body: &BodyOfRevolution, i: usize, kmax: usize) -> Result<Self> {
        if is_support_function(&body.support)?.verdict != Certainty::Holds {
            return Err(Error::InvalidBody(body.name.clone()));
        }
        let f = multipliers(&body.support, kmax)?;
        let bx = if body.kind == BodyKind::Disk {
            // box of sqrt(1 - t^2) in closed form; pointwise jets break down at the poles
            let c = (body.n as f64 - 2.0) / (body.n as f64 - 1.0);
            Some(ZonalProfile::closed(body.n, ClosedForm::new("box(disk)", Arc::new(move |_| c)).with_exponent(-1.0))?)
        } else {
            apply_box(&body.support).ok()
        };
        Self::build(body.n, i, f, bx, true, format!("body:{}", body.name))
    }

    /// Mean section operator from the centered Berg function, of degree `i = n + 1 - j`.
    pub fn from_berg(n: usize, j: usize, kmax: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::BergIndex { n, j });
        }
        let f = berg_multipliers(n, j, kmax)?;
        Self::build(n, n + 1 - j, f, None, true, format!("berg({n},{j})"))
    }

    /// From explicit generator multipliers.
    pub fn from_multipliers(n: usize, i: usize, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        Self::build(n, i, MultiplierSequence::explicit(n, values, label.clone()), None, false, label)
    }

    pub fn kmax(&self) -> usize {
        self.f_multipliers.kmax()
    }

    /// `a_k[box f] / a_0[box f]`.
    pub fn ratio(&self, k: usize) -> f64 {
        self.box_multipliers.get(k) / self.box_multipliers.get(0)
    }

    /// Predicted factor on mode `k` per application of `Phi`, `i a_k[box f] / a_0[box f]`.
    pub fn linear_factor(&self, k: usize) -> f64 {
        self.i as f64 * self.ratio(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Equality,
    Fail,
}

pub const EQUALITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct ConditionRow {
    pub k: usize,
    pub ratio: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionTable {
    pub condition: &'static str,
    pub rows: Vec<ConditionRow>,
    pub min_margin: f64,
    pub verdict: Verdict,
}

fn condition_table(spec: &ValuationSpec, kmax: usize, signed: bool) -> ConditionTable {
    let bound = 1.0 / spec.i as f64;
    let rows: Vec<ConditionRow> = (2..=kmax.min(spec.kmax()))
        .map(|k| {
            let ratio = spec.ratio(k);
            let margin = bound - if signed { ratio } else { ratio.abs() };
            let verdict = if margin.abs() <= EQUALITY_TOL {
                Verdict::Equality
            } else if margin > 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            ConditionRow { k, ratio, margin, verdict }
        })
        .collect();
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let verdict = rows.iter().map(|r| r.verdict).fold(Verdict::Pass, |acc, v| match (acc, v) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Equality, _) | (_, Verdict::Equality) => Verdict::Equality,
        _ => Verdict::Pass,
    });
    ConditionTable { condition: if signed { "C3'" } else { "C3" }, rows, min_margin, verdict }
}

/// `|a_k[box f]| / a_0[box f] < 1/i` for `2 <= k <= kmax`.
pub fn check_c3(spec: &ValuationSpec, kmax: usize) -> ConditionTable {
    condition_table(spec, kmax, false)
}

/// `a_k[box f] / a_0[box f] < 1/i` for `2 <= k <= kmax`.
pub fn check_c3prime(spec: &ValuationSpec, kmax: usize) -> ConditionTable {
    condition_table(spec, kmax, true)
}

#[derive(Clone, Debug, Serialize)]
pub struct C2Report {
    pub fit: DecayFit,
    pub verdict: Verdict,
}

/// Polynomial decay of `a_k[box f]`; needs `kmax >= 64`.
pub fn check_c2(spec: &ValuationSpec) -> Result<C2Report> {
    if spec.kmax() < 64 {
        return Err(Error::Degree { k: spec.kmax(), reason: "decay fits need K >= 64" });
    }
    let fit = decay_fit(&spec.box_multipliers);
    let ok = fit.superpolynomial || fit.alpha.is_some_and(|a| a > fit.band.max(0.05));
    Ok(C2Report { fit, verdict: if ok { Verdict::Pass } else { Verdict::Fail } })
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Report {
    /// `"measure"` when `box f` is known pointwise, `"heat-smoothed"` for multiplier-only specs.
    pub method: &'static str,
    /// Estimates of the cap integral of `|box f|(cap_r(+-e)) / r` at both poles.
    pub integral: [f64; 2],
    /// Cap-mass exponents near both poles.
    pub alpha: [Option<f64>; 2],
    /// Smallest radius resolved.
    pub r_min: f64,
    pub verdict: Verdict,
}

/// Cap-integral diagnostic for `box f` being a measure regular enough at the poles.
pub fn check_c1(spec: &ValuationSpec) -> Result<C1Report> {
    if let Some(bx) = &spec.box_profile {
        let rep = crate::zonal::regularity_diagnostic(bx)?;
        return Ok(C1Report {
            method: "measure",
            integral: [rep.north.integral, rep.south.integral],
            alpha: [rep.north.alpha, rep.south.alpha],
            r_min: crate::zonal::R_MIN,
            verdict: if rep.holds() { Verdict::Pass } else { Verdict::Fail },
        });
    }
    // Only multipliers are known: synthesize with a heat factor exp(-k(k+n-2)/K^2), which
    // resolves caps down to about 1/K, and read off signed cap masses on [4/K, pi/2].
    let n = spec.n;
    let kk = spec.kmax();
    let on = omega(n);
    let c: Vec<f64> = spec
        .box_multipliers
        .values
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let kf = k as f64;
            a * dim_harmonics(n, k) / on * (-kf * (kf + n as f64 - 2.0) / (kk * kk) as f64).exp()
        })
        .collect();
    let smooth = ZonalProfile::series(LegendreSeries::new(n, c))?;
    let r_min = 4.0 / kk as f64;
    let mut rs = Vec::new();
    let mut r = std::f64::consts::FRAC_PI_2;
    while r >= r_min {
        rs.push(r);
        r *= 0.5f64.powf(0.25);
    }
    let mut integral = [0.0; 2];
    let mut alpha = [None; 2];
    for (p, prof) in [smooth.clone(), smooth.reflect()].iter().enumerate() {
        let m: Vec<f64> = rs.iter().map(|&r| cap_mass(prof, r).map(f64::abs)).collect::<Result<_>>()?;
        integral[p] = (1..rs.len()).map(|j| 0.5 * (m[j] + m[j - 1]) * (rs[j - 1] / rs[j]).ln()).sum();
        let tail = rs.len().saturating_sub(8);
        alpha[p] = crate::zonal::loglog_slope(&rs[tail..], &m[tail..]).map(|s| s.0);
    }
    let ok = alpha.iter().all(|a| a.is_none_or(|a| a >= 0.05));
    Ok(C1Report {
        method: "heat-smoothed",
        integral,
        alpha,
        r_min,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Default spectral truncation for iteration.
pub const DEFAULT_K: usize = 64;
/// Largest admissible share of energy above the truncation degree.
pub const TAIL_ENERGY_MAX: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Applied {
    /// `h(Phi_i K)` truncated at degree `K`.
    pub support: LegendreSeries,
    /// Energy in degrees `K < k <= 2K` relative to the total.
    pub tail_energy: f64,
}

/// `h(Phi_i K) = S_i(K) * f`, mode by mode; needs generator multipliers up to `2K`.
pub fn apply(spec: &ValuationSpec, h: &ZonalProfile, kmax: usize) -> Result<Applied> {
    if h.n != spec.n {
        return Err(Error::DimensionMismatch(h.n, spec.n));
    }
    let a = &spec.f_multipliers;
    if let Representation::Series(s) = &h.repr {
        if s.is_constant() && h.atoms.is_empty() {
            let c0 = s.coeffs.first().copied().unwrap_or(0.0);
            let mut out = vec![0.0; kmax + 1];
            out[0] = a.get(0) * c0.powi(spec.i as i32);
            return Ok(Applied { support: LegendreSeries::new(spec.n, out), tail_energy: 0.0 });
        }
    }
    if a.kmax() < 2 * kmax {
        return Err(Error::Degree { k: a.kmax(), reason: "generator multipliers must reach 2K" });
    }
    let s = support_area_measure(h, spec.i)?;
    let cs = legendre_coefficients(&s, 2 * kmax)?;
    let full = LegendreSeries::new(spec.n, cs.coeffs.iter().enumerate().map(|(k, c)| a.get(k) * c).collect());
    let e = full.mode_energies();
    let total: f64 = e.iter().sum();
    let tail: f64 = e[kmax + 1..].iter().sum();
    let mut out = full.coeffs;
    out.truncate(kmax + 1);
    Ok(Applied {
        support: LegendreSeries::new(spec.n, out),
        tail_energy: if total > 0.0 { tail / total } else { 0.0 },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointStep {
    pub step: usize,
    /// Coefficients after normalization; `c_0 = 1`, `c_1 = 0`.
    pub coeffs: Vec<f64>,
    /// Factor applied to reach `c_0 = 1`.
    pub scale: f64,
    /// Linear coefficient removed by recentering.
    pub shift: f64,
    pub tail_energy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointTrace {
    pub label: String,
    pub square: bool,
    pub steps: Vec<FixedPointStep>,
    /// The iterate left the set of support functions, or its tail energy exceeded the budget.
    pub truncated: bool,
    pub reason: Option<String>,
}

impl FixedPointTrace {
    pub fn amplitudes(&self, k: usize) -> Vec<f64> {
        self.steps.iter().map(|s| s.coeffs.get(k).copied().unwrap_or(0.0)).collect()
    }

    /// Step-to-step ratios of mode `k`.
    pub fn factors(&self, k: usize) -> Vec<f64> {
        self.amplitudes(k).windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Geometric mean of `|c_k|` ratios over the whole trace.
    pub fn mean_factor(&self, k: usize) -> f64 {
        let a = self.amplitudes(k);
        let m = a.len() - 1;
        if m == 0 {
            return 1.0;
        }
        (a[m].abs() / a[0].abs()).powf(1.0 / m as f64)
    }
}

fn normalize(mut c: Vec<f64>, step: usize, tail_energy: f64) -> Result<FixedPointStep> {
    let c0 = c[0];
    if !(c0 > 0.0) {
        return Err(Error::Invalid("iterate has nonpositive mean".into()));
    }
    let scale = 1.0 / c0;
    c.iter_mut().for_each(|x| *x *= scale);
    c[0] = 1.0;
    // adding 0.0 turns -0 into 0
    let shift = if c.len() > 1 { std::mem::replace(&mut c[1], 0.0) + 0.0 } else { 0.0 };
    Ok(FixedPointStep { step, coeffs: c, scale, shift, tail_energy })
}

/// Iterate `Phi` (or `Phi^2`, as two applications) with mean and Steiner-point normalization.
pub fn fixed_point_iterate(
    spec: &ValuationSpec,
    h0: &LegendreSeries,
    steps: usize,
    square: bool,
    kmax: usize,
) -> Result<FixedPointTrace> {
    let mut c = h0.coeffs.clone();
    if c.len() > kmax + 1 {
        return Err(Error::Degree { k: c.len() - 1, reason: "initial body exceeds the truncation degree" });
    }
    c.resize(kmax + 1, 0.0);
    let mut trace = FixedPointTrace {
        label: spec.label.clone(),
        square,
        steps: vec![normalize(c, 0, 0.0)?],
        truncated: false,
        reason: None,
    };
    let start = ZonalProfile::series(LegendreSeries::new(spec.n, trace.steps[0].coeffs.clone()))?;
    if is_support_function(&start)?.verdict != Certainty::Holds {
        trace.truncated = true;
        trace.reason = Some("step 0: initial body is not a support function".into());
        return Ok(trace);
    }
    for step in 1..=steps {
        let mut h = LegendreSeries::new(spec.n, trace.steps.last().unwrap().coeffs.clone());
        let mut tail = 0.0f64;
        for _ in 0..if square { 2 } else { 1 } {
            let out = apply(spec, &ZonalProfile::series(h)?, kmax)?;
            tail = tail.max(out.tail_energy);
            h = out.support;
        }
        let next = normalize(h.coeffs, step, tail)?;
        let prof = ZonalProfile::series(LegendreSeries::new(spec.n, next.coeffs.clone()))?;
        let valid: Validity = is_support_function(&prof)?;
        let stop = if valid.verdict != Certainty::Holds {
            Some(format!("step {step}: iterate is not a support function"))
        } else if tail > TAIL_ENERGY_MAX {
            Some(format!("step {step}: tail energy {tail:e} above budget"))
        } else {
            None
        };
        trace.steps.push(next);
        if stop.is_some() {
            trace.truncated = true;
            trace.reason = stop;
            break;
        }
    }
    Ok(trace)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearResponse {
    pub k: usize,
    pub eps: f64,
    pub measured: f64,
    pub predicted: f64,
    pub rel_error: f64,
    /// `|measured - measured at eps/10|`.
    pub richardson_gap: f64,
}

/// Central difference of mode `k` of `h(Phi(1 + eps P_k))` against `i a_k[box f]`.
pub fn linear_response(spec: &ValuationSpec, k: usize, eps: f64, kmax: usize) -> Result<LinearResponse> {
    let run = |e: f64| -> Result<f64> {
        let mut c = vec![0.0; k + 1];
        c[0] = 1.0;
        c[k] += e;
        let out = apply(spec, &ZonalProfile::series(LegendreSeries::new(spec.n, c))?, kmax)?;
        Ok(out.support.coeffs.get(k).copied().unwrap_or(0.0))
    };
    let measured = (run(eps)? - run(-eps)?) / (2.0 * eps);
    let fine = (run(eps / 10.0)? - run(-eps / 10.0)?) / (0.2 * eps);
    let predicted = spec.i as f64 * spec.box_multipliers.get(k);
    Ok(LinearResponse {
        k,
        eps,
        measured,
        predicted,
        rel_error: ((measured - predicted) / predicted).abs(),
        richardson_gap: (measured - fine).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::canonical_body;

    #[test]
    fn berg_spec_conditions() {
        let s = ValuationSpec::from_berg(3, 2, 500).unwrap();
        assert_eq!(s.i, 2);
        assert_eq!(s.f_multipliers.get(1), 0.0);
        assert!((s.ratio(2) - 0.25).abs() < 1e-12);
        let c3 = check_c3(&s, 500);
        assert_eq!(c3.verdict, Verdict::Pass);
        assert!(c3.min_margin > 0.0);
        assert_eq!(check_c2(&s).unwrap().verdict, Verdict::Pass);
        assert!(ValuationSpec::from_berg(4, 4, 10).is_err());
        let s = ValuationSpec::from_berg(6, 5, 10).unwrap();
        assert_eq!(s.i, 2);
    }

    #[test]
    fn segment_equality_case() {
        for n in 3..7 {
            let seg = canonical_body("segment", n).unwrap();
            let s = ValuationSpec::from_generating_body(&seg, n - 1, 64).unwrap();
            assert!(s.even);
            let c3 = check_c3(&s, 64);
            assert_eq!(c3.verdict, Verdict::Equality, "n={n}");
            assert_eq!(c3.rows[0].verdict, Verdict::Equality);
            assert_eq!(check_c3prime(&s, 64).verdict, Verdict::Pass);
            assert!((s.ratio(2) + 1.0 / (n as f64 - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn synthetic_and_degenerate() {
        let s = ValuationSpec::from_multipliers(3, 1, vec![1.0; 65], "ones").unwrap();
        assert_eq!(check_c2(&s).unwrap().verdict, Verdict::Fail);
        assert!(ValuationSpec::from_multipliers(3, 1, vec![-1.0; 65], "neg").is_err());
        let b = ValuationSpec::from_generating_body(&canonical_body("ball", 4).unwrap(), 2, 16).unwrap();
        assert_eq!(check_c3(&b, 16).verdict, Verdict::Pass);
        assert!(check_c3(&b, 16).rows.iter().all(|r| r.ratio.abs() < 1e-12));
    }

    #[test]
    fn ball_is_fixed() {
        let s = ValuationSpec::from_berg(3, 2, 128).unwrap();
        let t = fixed_point_iterate(&s, &LegendreSeries::new(3, vec![1.0]), 5, true, 64).unwrap();
        assert!(!t.truncated);
        for st in &t.steps {
            assert_eq!(st.coeffs[0], 1.0);
            assert!(st.coeffs[1..].iter().all(|&c| c == 0.0));
        }
    }

    #[test]
    fn invalid_start_truncates() {
        let s = ValuationSpec::from_berg(3, 2, 128).unwrap();
        let t = fixed_point_iterate(&s, &LegendreSeries::new(3, vec![1.0, 0.0, 0.8]), 5, true, 64).unwrap();
        assert!(t.truncated && t.steps.len() == 1);
    }

    #[test]
    fn linear_response_matches() {
        let s = ValuationSpec::from_berg(3, 2, 128).unwrap();
        for k in 2..5 {
            let r = linear_response(&s, k, 1e-4, 64).unwrap();
            assert!(r.rel_error < 1e-4, "{r:?}");
        }
    }

    #[test]
    fn homogeneity_and_reflection() {
        let seg = canonical_body("segment", 3).unwrap();
        let s = ValuationSpec::from_generating_body(&seg, 2, 128).unwrap();
        let h = LegendreSeries::new(3, vec![1.0, 0.05, 0.02, 0.01]);
        let out = apply(&s, &ZonalProfile::series(h.clone()).unwrap(), 64).unwrap().support;
        let h2 = LegendreSeries::new(3, h.coeffs.iter().map(|c| 2.0 * c).collect());
        let out2 = apply(&s, &ZonalProfile::series(h2).unwrap(), 64).unwrap().support;
        for (a, b) in out.coeffs.iter().zip(&out2.coeffs) {
            assert!((4.0 * a - b).abs() < 1e-12);
        }
        let hr = LegendreSeries::new(3, h.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { *c }).collect());
        let outr = apply(&s, &ZonalProfile::series(hr).unwrap(), 64).unwrap().support;
        for (k, (a, b)) in out.coeffs.iter().zip(&outr.coeffs).enumerate() {
            let sgn = if k % 2 == 1 { -1.0 } else { 1.0 };
            assert!((sgn * a - b).abs() < 1e-12);
        }
    }
}
