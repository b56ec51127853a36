use crate::range::{parse_orders, parse_range, parse_rational};
use crate::table::{g17, Cell, Table};
use clap::Args;
use rayon::prelude::*;
use zonalis::bodies::{area_measure, firey_scaling_check, second_multiplier_ratio};
use zonalis::legendre::{derivative_identity_residual, ode_residual};
use zonalis::multiplier::box_transfer;
use zonalis::qpoly::{compare_interval_i, interval_j, minima_increasing, PencilInterval};
use zonalis::roots::default_tol;
use zonalis::valuation::{check_c1, check_c2, check_c3, check_c3prime, ConditionTable};
use zonalis::zonal::{legendre_coefficients, multipliers as profile_multipliers};
use zonalis::{
    berg_multipliers, canonical_body, fixed_point_iterate, is_support_function, legendre, q_extrema, Certainty,
    LegendreSeries, Rational, ValuationSpec, Verdict,
};

pub type CmdResult = Result<Report, String>;

#[derive(Default)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Verdicts that failed or could not be certified.
    pub findings: Vec<String>,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cert(c: Certainty) -> &'static str {
    match c {
        Certainty::Holds => "holds",
        Certainty::Fails => "fails",
        Certainty::Inconclusive => "inconclusive",
    }
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Equality => "equality",
        Verdict::Fail => "fail",
    }
}

fn exact(r: &Rational) -> Cell {
    Cell::Exact(r.to_string())
}

fn tolerance(s: &Option<String>) -> Result<Rational, String> {
    let t = match s {
        Some(s) => parse_rational(s)?,
        None => default_tol(),
    };
    if t <= Rational::from_integer(0.into()) {
        return Err("tolerance must be positive".into());
    }
    Ok(t)
}

#[derive(Args)]
pub struct LegendreArgs {
    #[arg(value_name = "N")]
    n_pos: Option<usize>,
    #[arg(value_name = "K")]
    k_pos: Option<usize>,
    #[arg(long = "n")]
    n: Option<usize>,
    #[arg(long = "k")]
    k: Option<usize>,
    /// Evaluate at a rational point, e.g. 1/3.
    #[arg(long)]
    eval: Option<String>,
    /// Check the Legendre ODE and the derivative identity exactly.
    #[arg(long)]
    check_identities: bool,
}

pub fn legendre_cmd(a: &LegendreArgs) -> CmdResult {
    let n = a.n_pos.or(a.n).ok_or("missing dimension n")?;
    let k = a.k_pos.or(a.k).ok_or("missing degree k")?;
    let p = legendre(n, k).map_err(err)?;
    let mut t = Table::new("legendre", &["quantity", "value"]);
    t.push(vec!["n".into(), n.into()]);
    t.push(vec!["k".into(), k.into()]);
    t.push(vec!["polynomial".into(), p.to_string().into()]);
    for (d, c) in p.coeffs().iter().enumerate() {
        t.push(vec![format!("coeff[{d}]").into(), exact(c)]);
    }
    t.push(vec!["P(1)".into(), exact(&p.eval(&Rational::from_integer(1.into())))]);
    let mut findings = Vec::new();
    if let Some(x) = &a.eval {
        let x = parse_rational(x)?;
        t.push(vec![format!("P({x})").into(), exact(&p.eval(&x))]);
    }
    if a.check_identities {
        let ode = ode_residual(n, k);
        let der = derivative_identity_residual(n, k).is_zero();
        t.push(vec!["ode_residual".into(), ode.to_string().into()]);
        t.push(vec!["derivative_identity".into(), der.into()]);
        if !ode.is_zero() || !der {
            findings.push(format!("legendre ({n},{k}): identity residual nonzero"));
        }
    }
    Ok(Report { tables: vec![t], findings })
}


#[derive(Args, Clone)]
pub struct SpecSource {
    /// Mean section kernel in dimension N with index J.
    #[arg(long, num_args = 2, value_names = ["N", "J"], conflicts_with = "body")]
    berg: Option<Vec<usize>>,
    /// Generating body: ball, segment, disk, spheroid(e), cap-sum(a).
    #[arg(long)]
    body: Option<String>,
    #[arg(long = "n", default_value_t = 3)]
    n: usize,
    /// Degree of the valuation for body generators; `n-1` or an integer.
    #[arg(long = "i", default_value = "n-1")]
    i: String,
}

impl SpecSource {
    fn build(&self, kmax: usize) -> Result<ValuationSpec, String> {
        match (&self.berg, &self.body) {
            (Some(b), _) => ValuationSpec::from_berg(b[0], b[1], kmax).map_err(err),
            (None, Some(name)) => {
                let body = canonical_body(name, self.n).map_err(err)?;
                let i = *parse_orders(&self.i, self.n)?.first().ok_or("missing order i")?;
                ValuationSpec::from_generating_body(&body, i, kmax).map_err(err)
            }
            (None, None) => Err("give --berg N J or --body NAME".into()),
        }
    }
}

#[derive(Args)]
pub struct MultipliersArgs {
    #[command(flatten)]
    src: SpecSource,
    #[arg(long = "K", default_value_t = 16)]
    kmax: usize,
}

pub fn multipliers(a: &MultipliersArgs) -> CmdResult {
    let m = match (&a.src.berg, &a.src.body) {
        (Some(b), _) => berg_multipliers(b[0], b[1], a.kmax).map_err(err)?,
        (None, Some(name)) => {
            let body = canonical_body(name, a.src.n).map_err(err)?;
            profile_multipliers(&body.support, a.kmax).map_err(err)?
        }
        (None, None) => return Err("give --berg N J or --body NAME".into()),
    };
    let b = box_transfer(&m);
    let mut t = Table::new("multipliers", &["k", "a_k", "exact", "box_a_k", "box_ratio"]);
    for k in 0..=m.kmax() {
        let ex = m.exact.as_ref().map(|e| Cell::Exact(e[k].to_string())).unwrap_or(Cell::Empty);
        t.push(vec![k.into(), m.values[k].into(), ex, b.values[k].into(), (b.values[k] / b.values[0]).into()]);
    }
    Ok(Report { tables: vec![t], findings: Vec::new() })
}

#[derive(Args)]
pub struct QscanArgs {
    #[arg(long = "n", default_value = "3..8")]
    n: String,
    #[arg(long = "k", default_value = "2..40:2")]
    k: String,
    /// Orders: `all`, `n-1`, or a range.
    #[arg(long = "i", default_value = "all")]
    i: String,
    /// Width of value enclosures: p/q, 2^-e, or a decimal.
    #[arg(long)]
    tol: Option<String>,
}

pub fn qscan(a: &QscanArgs) -> CmdResult {
    let tol = tolerance(&a.tol)?;
    let ns = parse_range(&a.n)?;
    let ks = parse_range(&a.k)?;
    let mut cells = Vec::new();
    for &n in &ns {
        let orders = parse_orders(&a.i, n)?;
        for &k in &ks {
            for &i in &orders {
                cells.push((n, k, i));
            }
        }
    }
    let results: Vec<_> =
        cells.par_iter().map(|&(n, k, i)| q_extrema(n, k, i, &tol)).collect::<Result<_, _>>().map_err(err)?;
    let mut t = Table::new(
        "qscan",
        &[
            "n", "k", "i", "min_lo", "min_hi", "min_approx", "argmin", "max_lo", "max_hi", "max_approx", "max_at_one",
            "min_above", "minima_increasing",
        ],
    );
    let mut findings = Vec::new();
    let mut start = 0;
    while start < results.len() {
        let (n, k) = (results[start].n, results[start].k);
        let end = start + results[start..].iter().take_while(|e| e.n == n && e.k == k).count();
        let group = &results[start..end];
        let full = group.len() == n - 1;
        let mono = (full && k % 2 == 0).then(|| minima_increasing(group));
        if let Some(m) = mono.filter(|&m| m != Certainty::Holds) {
            findings.push(format!("qscan ({n},{k}): minima increasing in i {}", cert(m)));
        }
        for e in group {
            if e.max_at_one != Certainty::Holds {
                findings.push(format!("qscan ({n},{k},{}): maximum at t = 1 {}", e.i, cert(e.max_at_one)));
            }
            if let Some(c) = e.min_above.filter(|&c| c != Certainty::Holds) {
                findings.push(format!("qscan ({n},{k},{}): minimum above -1/(n-1) {}", e.i, cert(c)));
            }
            t.push(vec![
                e.n.into(),
                e.k.into(),
                e.i.into(),
                exact(&e.min.value_lo),
                exact(&e.min.value_hi),
                e.min.mid_f64().into(),
                zonalis::special::ratio_to_f64(&e.min.arg.midpoint()).into(),
                exact(&e.max.value_lo),
                exact(&e.max.value_hi),
                e.max.mid_f64().into(),
                cert(e.max_at_one).into(),
                e.min_above.map(cert).into(),
                mono.map(cert).into(),
            ]);
        }
        start = end;
    }
    Ok(Report { tables: vec![t], findings })
}

#[derive(Args)]
pub struct IntervalsArgs {
    #[arg(long = "n", default_value = "3")]
    n: String,
    #[arg(long = "k", default_value = "2")]
    k: String,
    #[arg(long = "i", default_value = "all")]
    i: String,
    #[arg(long)]
    tol: Option<String>,
}

fn interval_row(name: &str, n: usize, k: usize, i: Option<usize>, p: &PencilInterval, mismatch: Option<bool>) -> Vec<Cell> {
    let end = |e: &Option<zonalis::Enclosure>, lo: bool, inf: &str| match e {
        Some(e) => exact(if lo { &e.lo } else { &e.hi }),
        None => Cell::Str(inf.into()),
    };
    let method = match p.method {
        zonalis::IntervalMethod::DirectCriterion => "direct-criterion",
        zonalis::IntervalMethod::ExtremaFormula => "extrema-formula",
    };
    vec![
        name.into(),
        n.into(),
        k.into(),
        i.into(),
        method.into(),
        end(&p.lower, true, "-inf"),
        end(&p.lower, false, "-inf"),
        end(&p.upper, true, "inf"),
        end(&p.upper, false, "inf"),
        p.reversed.into(),
        mismatch.into(),
    ]
}

pub fn intervals(a: &IntervalsArgs) -> CmdResult {
    let tol = tolerance(&a.tol)?;
    let mut t = Table::new(
        "intervals",
        &["interval", "n", "k", "i", "method", "lower_lo", "lower_hi", "upper_lo", "upper_hi", "reversed", "mismatch"],
    );
    let mut findings = Vec::new();
    let mut cells = Vec::new();
    for n in parse_range(&a.n)? {
        let orders = parse_orders(&a.i, n)?;
        for k in parse_range(&a.k)? {
            cells.push((n, k, orders.clone()));
        }
    }
    let computed: Vec<_> = cells
        .par_iter()
        .map(|(n, k, orders)| {
            let js = orders.iter().map(|&i| interval_j(*n, *k, i, &tol)).collect::<Result<Vec<_>, _>>()?;
            Ok((js, compare_interval_i(*n, *k, &tol)?))
        })
        .collect::<Result<_, zonalis::Error>>()
        .map_err(err)?;
    for ((n, k, orders), (js, cmp)) in cells.iter().zip(computed) {
        for (i, j) in orders.iter().zip(&js) {
            t.push(interval_row("J", *n, *k, Some(*i), j, None));
            if j.lower.is_none() || j.upper.is_none() {
                findings.push(format!("intervals J({n},{k},{i}): extrema do not straddle 0, interval is one-sided"));
            }
        }
        t.push(interval_row("I", *n, *k, None, &cmp.direct, Some(cmp.mismatch)));
        t.push(interval_row("I", *n, *k, None, &cmp.formula, Some(cmp.mismatch)));
        if cmp.mismatch {
            let (dl, du) = cmp.direct.endpoints_f64();
            let (fl, fu) = cmp.formula.endpoints_f64();
            findings.push(format!(
                "intervals I({n},{k}): extrema formula gives ({}, {}), direct criterion gives [{}, {}]",
                g17(fl),
                g17(fu),
                g17(dl),
                g17(du)
            ));
        }
    }
    Ok(Report { tables: vec![t], findings })
}

#[derive(Args)]
pub struct BodiesArgs {
    #[arg(long = "n", default_value = "3")]
    n: String,
    /// Comma-separated canonical body names.
    #[arg(long, default_value = "ball,segment,disk,spheroid(0.5),cap-sum(0.5)")]
    body: String,
    #[arg(long = "i", default_value = "all")]
    i: String,
}

pub fn bodies(a: &BodiesArgs) -> CmdResult {
    let names: Vec<&str> = a.body.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let mut cells = Vec::new();
    for n in parse_range(&a.n)? {
        let orders = parse_orders(&a.i, n)?;
        for name in &names {
            cells.push((name.to_string(), n, orders.clone()));
        }
    }
    let rs: Vec<f64> = (0..8).map(|j| 1e-2 * 0.5f64.powi(j)).collect();
    type Row = (zonalis::Validity, zonalis::bodies::SecondRatio, Vec<(usize, f64, zonalis::bodies::FireyReport)>);
    let computed: Vec<Row> = cells
        .par_iter()
        .map(|(name, n, orders)| {
            let body = canonical_body(name, *n)?;
            let v = is_support_function(&body.support)?;
            let r = second_multiplier_ratio(&body)?;
            let per_i = orders
                .iter()
                .map(|&i| {
                    let s = area_measure(&body, i)?;
                    let total = profile_multipliers(&s, 0)?.values[0];
                    Ok((i, total, firey_scaling_check(&body, i, &rs)?))
                })
                .collect::<Result<Vec<_>, zonalis::Error>>()?;
            Ok((v, r, per_i))
        })
        .collect::<Result<_, zonalis::Error>>()
        .map_err(err)?;
    let mut t = Table::new(
        "bodies",
        &[
            "body", "n", "i", "validity", "certified", "second_ratio", "second_exact", "ratio_lower", "ratio_upper",
            "area_total", "firey_exponent", "firey_required", "firey_holds",
        ],
    );
    let mut findings = Vec::new();
    for ((name, n, _), (v, r, per_i)) in cells.iter().zip(computed) {
        if v.verdict != Certainty::Holds {
            findings.push(format!("bodies {name} (n={n}): support test {}", cert(v.verdict)));
        }
        if r.value < r.lower - 1e-10 || r.value > r.upper + 1e-10 {
            findings.push(format!("bodies {name} (n={n}): second ratio {} outside bounds", g17(r.value)));
        }
        for (i, total, f) in per_i {
            if !f.holds {
                findings.push(format!("bodies {name} (n={n}, i={i}): cap exponent {}", g17(f.fitted_exponent)));
            }
            t.push(vec![
                name.as_str().into(),
                (*n).into(),
                i.into(),
                cert(v.verdict).into(),
                v.certified.into(),
                r.value.into(),
                r.exact.clone().map(Cell::Exact).unwrap_or(Cell::Empty),
                r.lower.into(),
                r.upper.into(),
                total.into(),
                f.fitted_exponent.into(),
                f.required_exponent.into(),
                f.holds.into(),
            ]);
        }
    }
    Ok(Report { tables: vec![t], findings })
}

#[derive(Args)]
pub struct ConditionsArgs {
    #[command(flatten)]
    src: SpecSource,
    #[arg(long = "K", default_value_t = 128)]
    kmax: usize,
}

fn c3_row(c: &ConditionTable) -> Vec<Cell> {
    let worst = c.rows.iter().min_by(|a, b| a.margin.total_cmp(&b.margin));
    let first_bad = c.rows.iter().find(|r| r.verdict != Verdict::Pass).map(|r| r.k);
    vec![
        c.condition.into(),
        verdict(c.verdict).into(),
        c.min_margin.into(),
        worst.map(|r| r.k).into(),
        match first_bad {
            Some(k) => format!("first k not passing: {k}").into(),
            None => "margin = 1/i - ratio".into(),
        },
    ]
}

pub fn conditions(a: &ConditionsArgs) -> CmdResult {
    let spec = a.src.build(a.kmax)?;
    let c1 = check_c1(&spec).map_err(err)?;
    let c2 = check_c2(&spec).map_err(err)?;
    let c3 = check_c3(&spec, a.kmax);
    let c3p = check_c3prime(&spec, a.kmax);
    let opt = |x: Option<f64>| x.map_or("none".to_string(), g17);
    let mut t = Table::new("conditions", &["condition", "verdict", "value", "k", "detail"]);
    t.push(vec![
        "C1".into(),
        verdict(c1.verdict).into(),
        c1.integral[0].max(c1.integral[1]).into(),
        Cell::Empty,
        format!(
            "method={}; alpha=({}, {}); integral=({}, {}); r_min={}",
            c1.method,
            opt(c1.alpha[0]),
            opt(c1.alpha[1]),
            g17(c1.integral[0]),
            g17(c1.integral[1]),
            g17(c1.r_min)
        )
        .into(),
    ]);
    t.push(vec![
        "C2".into(),
        verdict(c2.verdict).into(),
        c2.fit.alpha.into(),
        Cell::Empty,
        format!(
            "band={}; k_range={}..{}; superpolynomial={}",
            g17(c2.fit.band),
            c2.fit.k_range.0,
            c2.fit.k_range.1,
            c2.fit.superpolynomial
        )
        .into(),
    ]);
    t.push(c3_row(&c3));
    t.push(c3_row(&c3p));
    let mut r = Table::new("ratios", &["k", "ratio", "c3_margin", "c3", "c3prime_margin", "c3prime"]);
    for (x, y) in c3.rows.iter().zip(&c3p.rows) {
        r.push(vec![x.k.into(), x.ratio.into(), x.margin.into(), verdict(x.verdict).into(), y.margin.into(), verdict(y.verdict).into()]);
    }
    let mut s = Table::new("spec", &["label", "n", "i", "K", "even", "weakly_monotone"]);
    s.push(vec![spec.label.clone().into(), spec.n.into(), spec.i.into(), spec.kmax().into(), spec.even.into(), spec.weakly_monotone.into()]);
    let findings = [("C1", c1.verdict), ("C2", c2.verdict), ("C3", c3.verdict), ("C3'", c3p.verdict)]
        .iter()
        .filter(|(_, v)| *v != Verdict::Pass)
        .map(|(c, v)| format!("conditions {}: {c} {}", spec.label, verdict(*v)))
        .collect();
    Ok(Report { tables: vec![s, t, r], findings })
}

#[derive(Args)]
pub struct IterateArgs {
    /// Perturbed mode of the initial body `1 + eps P_k`.
    #[arg(long = "k", default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Spectral truncation.
    #[arg(long = "K", default_value_t = zonalis::valuation::DEFAULT_K)]
    kmax: usize,
    /// Iterate Phi instead of Phi^2.
    #[arg(long)]
    single: bool,
}

#[derive(Args)]
pub struct MsoArgs {
    #[arg(long = "n", default_value_t = 3)]
    n: usize,
    #[arg(long = "j", default_value_t = 2)]
    j: usize,
    #[command(flatten)]
    it: IterateArgs,
}

#[derive(Args)]
pub struct FixpointArgs {
    #[command(flatten)]
    src: SpecSource,
    /// Canonical body to start from instead of the ball.
    #[arg(long)]
    init: Option<String>,
    #[command(flatten)]
    it: IterateArgs,
}

fn iterate(spec: &ValuationSpec, init: Option<&str>, it: &IterateArgs) -> CmdResult {
    if it.k < 2 || it.k > it.kmax {
        return Err(format!("mode k = {} outside [2, K]", it.k));
    }
    let n = spec.n;
    let mut c = match init {
        Some(name) => {
            let b = canonical_body(name, n).map_err(err)?;
            legendre_coefficients(&b.support, it.kmax).map_err(err)?.coeffs
        }
        None => vec![1.0],
    };
    c.resize(it.k.max(c.len() - 1) + 1, 0.0);
    c[it.k] += it.eps;
    let square = !it.single;
    let trace = fixed_point_iterate(spec, &LegendreSeries::new(n, c), it.steps, square, it.kmax).map_err(err)?;
    let predicted = spec.linear_factor(it.k).abs().powi(if square { 2 } else { 1 });
    let amps = trace.amplitudes(it.k);
    let measured = if amps[0] == 0.0 { f64::NAN } else { trace.mean_factor(it.k) };
    let mut s = Table::new(
        "summary",
        &["label", "n", "i", "k", "eps", "steps", "square", "predicted_factor", "measured_factor", "relative_deviation", "truncated", "reason"],
    );
    s.push(vec![
        spec.label.clone().into(),
        n.into(),
        spec.i.into(),
        it.k.into(),
        it.eps.into(),
        (trace.steps.len() - 1).into(),
        square.into(),
        predicted.into(),
        measured.into(),
        ((measured - predicted) / predicted).abs().into(),
        trace.truncated.into(),
        trace.reason.clone().into(),
    ]);
    let mut t = Table::new("trace", &["step", "scale", "shift", "amplitude", "factor", "max_other", "tail_energy"]);
    for (j, st) in trace.steps.iter().enumerate() {
        let other = st
            .coeffs
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != 0 && m != it.k)
            .fold(0.0f64, |acc, (_, v)| acc.max(v.abs()));
        let factor = if j == 0 || amps[j - 1] == 0.0 { Cell::Empty } else { (amps[j] / amps[j - 1]).into() };
        t.push(vec![st.step.into(), st.scale.into(), st.shift.into(), amps[j].into(), factor, other.into(), st.tail_energy.into()]);
    }
    let findings = trace.reason.iter().map(|r| format!("fixpoint {}: truncated, {r}", spec.label)).collect();
    Ok(Report { tables: vec![s, t], findings })
}

pub fn msofixpoint(a: &MsoArgs) -> CmdResult {
    let spec = ValuationSpec::from_berg(a.n, a.j, 2 * a.it.kmax).map_err(err)?;
    iterate(&spec, None, &a.it)
}

pub fn fixpoint(a: &FixpointArgs) -> CmdResult {
    let spec = a.src.build(2 * a.it.kmax)?;
    iterate(&spec, a.init.as_deref(), &a.it)
}
