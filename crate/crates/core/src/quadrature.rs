//! Gauss–Jacobi rules and panel integration on the sphere's polar angle.
//!
//! Nodes come from Newton iteration on the orthonormal three-term recurrence, seeded by
//! the ultraspherical asymptotic; if the seeded run does not produce `m` distinct roots
//! the Golub–Welsch eigenvalues are used instead. Weights are Christoffel numbers.

use crate::error::{Error, Result};
use crate::special::ln_gamma_signed;
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss rule for the weight `(1-x)^alpha (1+x)^beta` on `[-1, 1]`.
#[derive(Debug)]
pub struct JacobiRule {
    pub alpha: f64,
    pub beta: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss rule for the zonal weight `(1-t^2)^((n-3)/2)` with `m` nodes.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub n: usize,
    pub m: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

type Key = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<JacobiRule>>> {
    static C: OnceLock<Mutex<HashMap<Key, Arc<JacobiRule>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn half_int(x: f64) -> Option<i64> {
    let d = 2.0 * x;
    (d.fract() == 0.0 && d.abs() < 1e6).then_some(d as i64)
}

fn mass(alpha: f64, beta: f64) -> f64 {
    // 2^(a+b+1) Gamma(a+1) Gamma(b+1) / Gamma(a+b+2), exactly when a, b are in Z/2
    if let (Some(a2), Some(b2)) = (half_int(alpha), half_int(beta)) {
        use crate::special::PiMonomial;
        let g = PiMonomial::gamma_half(a2 + 2)
            .mul(&PiMonomial::gamma_half(b2 + 2))
            .div(&PiMonomial::gamma_half(a2 + b2 + 4));
        return g.to_f64() * 2f64.powf(alpha + beta + 1.0);
    }
    let l = (alpha + beta + 1.0) * 2f64.ln() + ln_gamma_signed(alpha + 1.0).0 + ln_gamma_signed(beta + 1.0).0
        - ln_gamma_signed(alpha + beta + 2.0).0;
    l.exp()
}

/// Recurrence: `x q_j = b_{j+1} q_{j+1} + a_j q_j + b_j q_{j-1}`.
fn recurrence(m: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let a = (0..m)
        .map(|j| {
            let j = j as f64;
            if j == 0.0 {
                (beta - alpha) / (ab + 2.0)
            } else {
                (beta * beta - alpha * alpha) / ((2.0 * j + ab) * (2.0 * j + ab + 2.0))
            }
        })
        .collect();
    let b = (0..=m)
        .map(|j| {
            if j == 0 {
                return 0.0;
            }
            if j == 1 {
                // (j + ab) / (s - 1) = 1 here; the generic form is 0/0 when ab = -1
                return (4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))).sqrt();
            }
            let j = j as f64;
            let s = 2.0 * j + ab;
            (4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
        })
        .collect();
    (a, b)
}

/// Orthonormal `q_m(x)`, `q_m'(x)` and `sum_{j<m} q_j(x)^2`.
fn eval_orthonormal(x: f64, m: usize, a: &[f64], b: &[f64], q0: f64) -> (f64, f64, f64) {
    let (mut qm1, mut q) = (0.0, q0);
    let (mut dm1, mut d) = (0.0, 0.0);
    let mut s = 0.0;
    for j in 0..m {
        s += q * q;
        let qn = ((x - a[j]) * q - b[j] * qm1) / b[j + 1];
        let dn = ((x - a[j]) * d + q - b[j] * dm1) / b[j + 1];
        qm1 = q;
        q = qn;
        dm1 = d;
        d = dn;
    }
    (q, d, s)
}

fn polish(seeds: Vec<f64>, m: usize, a: &[f64], b: &[f64], q0: f64) -> Vec<f64> {
    seeds
        .into_iter()
        .map(|mut x| {
            for _ in 0..100 {
                let (q, d, _) = eval_orthonormal(x, m, a, b, q0);
                let dx = q / d;
                x -= dx;
                if dx.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                    break;
                }
            }
            x
        })
        .collect()
}

fn seeds_asymptotic(m: usize, alpha: f64, beta: f64) -> Vec<f64> {
    // cos((i + 3/4 + alpha/2 - ...) pi / (m + (alpha+beta+1)/2)), ascending
    let denom = m as f64 + (alpha + beta + 1.0) / 2.0;
    let mut v: Vec<f64> = (0..m)
        .map(|i| {
            let th = (i as f64 + 0.75 + alpha / 2.0 - 0.25 * (alpha + beta) / 2.0 + 0.0) * PI / denom;
            th.min(PI * (1.0 - 1e-12)).cos()
        })
        .collect();
    v.reverse();
    v
}

fn seeds_eigen(m: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut t = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        t[(j, j)] = a[j];
        if j + 1 < m {
            t[(j, j + 1)] = b[j + 1];
            t[(j + 1, j)] = b[j + 1];
        }
    }
    let mut ev: Vec<f64> = t.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

fn distinct_in_range(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite() && v.abs() < 1.0)
        && x.windows(2).all(|w| w[1] - w[0] > 1e-3 * (1.0 - w[0].abs()).max(1e-14) * 1e-6)
}

/// Gauss–Jacobi rule built from scratch, bypassing the cache.
pub fn build_jacobi_rule(m: usize, alpha: f64, beta: f64) -> Result<JacobiRule> {
    assert!(m >= 1 && alpha > -1.0 && beta > -1.0);
    build(m, alpha, beta)
}

fn build(m: usize, alpha: f64, beta: f64) -> Result<JacobiRule> {
    let (a, b) = recurrence(m, alpha, beta);
    let mu0 = mass(alpha, beta);
    let q0 = 1.0 / mu0.sqrt();
    let mut nodes = polish(seeds_asymptotic(m, alpha, beta), m, &a, &b, q0);
    nodes.sort_by(|x, y| x.total_cmp(y));
    if !distinct_in_range(&nodes) {
        nodes = polish(seeds_eigen(m, &a, &b), m, &a, &b, q0);
        nodes.sort_by(|x, y| x.total_cmp(y));
    }
    if alpha == beta {
        for i in 0..m / 2 {
            let s = 0.5 * (nodes[m - 1 - i] - nodes[i]);
            nodes[i] = -s;
            nodes[m - 1 - i] = s;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
    }
    let weights: Vec<f64> = nodes.iter().map(|&x| 1.0 / eval_orthonormal(x, m, &a, &b, q0).2).collect();
    // identity check: zeroth and first moments
    let s0: f64 = weights.iter().sum();
    let s1: f64 = weights.iter().zip(&nodes).map(|(w, x)| w * x).sum();
    let m1 = mu0 * (beta - alpha) / (alpha + beta + 2.0);
    let res = ((s0 - mu0).abs() + (s1 - m1).abs()) / mu0;
    if !distinct_in_range(&nodes) || !(res <= 1e-10) {
        return Err(Error::QuadratureIdentity(res));
    }
    Ok(JacobiRule { alpha, beta, nodes, weights })
}

/// Cached Gauss–Jacobi rule with `m` nodes.
pub fn jacobi_rule(m: usize, alpha: f64, beta: f64) -> Result<Arc<JacobiRule>> {
    assert!(m >= 1 && alpha > -1.0 && beta > -1.0);
    let key = (m, alpha.to_bits(), beta.to_bits());
    if let Some(r) = cache().lock().unwrap().get(&key) {
        return Ok(r.clone());
    }
    let r = Arc::new(build(m, alpha, beta)?);
    cache().lock().unwrap().insert(key, r.clone());
    Ok(r)
}

/// Gauss–Jacobi rule for `(1-t^2)^((n-3)/2)`, exact through degree `2m-1`.
pub fn gauss_jacobi_rule(n: usize, m: usize) -> Result<QuadratureRule> {
    crate::error::check_dim(n)?;
    let a = (n as f64 - 3.0) / 2.0;
    let r = jacobi_rule(m, a, a)?;
    Ok(QuadratureRule { n, m, nodes: r.nodes.clone(), weights: r.weights.clone() })
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

const PANEL_NODES: usize = 48;

/// Nodes `(th, w)` with `int_lo^hi sin(th)^q g(th) d th ~ sum w g(th)` for `0 <= lo < hi <= pi`,
/// `q > -1` and `g` smooth on the closed interval. `freq` bounds the oscillation of `g`
/// (its degree in `cos th`).
pub fn polar_nodes(q: f64, lo: f64, hi: f64, freq: usize) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    if !(lo < hi) {
        return Ok(out);
    }
    let touches_north = lo == 0.0;
    let touches_south = hi == PI;
    let min_panels = if touches_north && touches_south { 2.0 } else { 1.0 };
    let panels = ((freq as f64 + q.abs() + 1.0) * (hi - lo) / (PI * 6.0)).ceil().max(min_panels) as usize;
    let h = (hi - lo) / panels as f64;
    let gl = jacobi_rule(PANEL_NODES, 0.0, 0.0)?;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let b = if p + 1 == panels { hi } else { a + h };
        let half = 0.5 * (b - a);
        if p == 0 && touches_north {
            // weight th^q on [0, b]
            let r = jacobi_rule(PANEL_NODES, 0.0, q)?;
            let scale = half.powf(q + 1.0);
            for (&x, &w) in r.nodes.iter().zip(&r.weights) {
                let th = half * (1.0 + x);
                let fac = if th == 0.0 { 1.0 } else { (th.sin() / th).powf(q) };
                out.push((th, scale * w * fac));
            }
        } else if p + 1 == panels && touches_south {
            // weight (pi - th)^q on [a, pi]
            let r = jacobi_rule(PANEL_NODES, q, 0.0)?;
            let scale = half.powf(q + 1.0);
            for (&x, &w) in r.nodes.iter().zip(&r.weights) {
                let th = a + half * (1.0 + x);
                let u = PI - th;
                let fac = if u == 0.0 { 1.0 } else { (u.sin() / u).powf(q) };
                out.push((th, scale * w * fac));
            }
        } else {
            for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
                let th = a + half * (1.0 + x);
                out.push((th, half * w * th.sin().powf(q)));
            }
        }
    }
    Ok(out)
}

/// `int_lo^hi sin(th)^q g(th) d th`; see [`polar_nodes`].
pub fn integrate_polar(g: &dyn Fn(f64) -> f64, q: f64, lo: f64, hi: f64, freq: usize) -> Result<f64> {
    Ok(polar_nodes(q, lo, hi, freq)?.iter().map(|&(th, w)| w * g(th)).sum())
}
