use crate::error::{check_dim, Error, Result};
use crate::legendre::to_legendre_basis;
use crate::poly::RationalPolynomial;
use crate::quadrature::{gauss_jacobi_rule, QuadratureRule};
use crate::series::{legendre_values, LegendreSeries};
use crate::special::{dim_harmonics, omega, ratio_to_f64};
use std::fmt;
use std::sync::Arc;

pub type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Jet = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// A corner of `f`: `f'` jumps by `slope_jump` at `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kink {
    pub t: f64,
    pub slope_jump: f64,
}

/// `f(t) = (1-t^2)^(exponent/2) * smooth(t)` with `smooth` analytic on each piece between kinks.
#[derive(Clone)]
pub struct ClosedForm {
    pub label: String,
    pub exponent: f64,
    pub smooth: Scalar,
    /// `(f, f', f'')` inside `(-1, 1)`, off the kinks.
    pub jet: Option<Jet>,
    pub kinks: Vec<Kink>,
}

impl ClosedForm {
    pub fn new(label: impl Into<String>, smooth: Scalar) -> Self {
        ClosedForm { label: label.into(), exponent: 0.0, smooth, jet: None, kinks: Vec::new() }
    }

    pub fn with_exponent(mut self, e: f64) -> Self {
        self.exponent = e;
        self
    }

    pub fn with_jet(mut self, jet: Jet) -> Self {
        self.jet = Some(jet);
        self
    }

    pub fn with_kinks(mut self, kinks: Vec<Kink>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = (self.smooth)(t);
        if self.exponent == 0.0 {
            s
        } else {
            (1.0 - t * t).powf(self.exponent / 2.0) * s
        }
    }
}

/// Profile values at the nodes of a Gauss–Jacobi rule.
#[derive(Clone, Debug)]
pub struct Samples {
    pub rule: QuadratureRule,
    pub values: Vec<f64>,
}

#[derive(Clone)]
pub enum Representation {
    /// Exact polynomial, with its float Legendre coefficients for stable evaluation.
    Exact(RationalPolynomial, LegendreSeries),
    Series(LegendreSeries),
    Closed(ClosedForm),
    Sampled(Samples),
}

/// Mass concentrated on `{u : <e, u> = t}`: a point for `t = +-1`, otherwise a uniform band.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Atom {
    pub t: f64,
    pub mass: f64,
}

/// A zonal function or measure on `S^(n-1)`, written through its profile in `t = <e, u>`.
#[derive(Clone)]
pub struct ZonalProfile {
    pub n: usize,
    pub repr: Representation,
    pub atoms: Vec<Atom>,
}

impl fmt::Debug for ZonalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match &self.repr {
            Representation::Exact(p, _) => format!("Exact({})", p),
            Representation::Series(s) => format!("Series(deg {})", s.degree()),
            Representation::Closed(c) => format!("Closed({})", c.label),
            Representation::Sampled(s) => format!("Sampled(m = {})", s.rule.m),
        };
        write!(f, "ZonalProfile {{ n: {}, {}, atoms: {:?} }}", self.n, r, self.atoms)
    }
}

pub(crate) fn float_series(p: &RationalPolynomial, n: usize) -> LegendreSeries {
    LegendreSeries::new(n, to_legendre_basis(p, n).iter().map(ratio_to_f64).collect())
}

impl ZonalProfile {
    pub fn exact(n: usize, p: RationalPolynomial) -> Result<Self> {
        check_dim(n)?;
        let s = float_series(&p, n);
        Ok(ZonalProfile { n, repr: Representation::Exact(p, s), atoms: Vec::new() })
    }

    pub fn series(s: LegendreSeries) -> Result<Self> {
        check_dim(s.n)?;
        Ok(ZonalProfile { n: s.n, repr: Representation::Series(s), atoms: Vec::new() })
    }

    pub fn closed(n: usize, c: ClosedForm) -> Result<Self> {
        check_dim(n)?;
        if !(c.exponent + n as f64 - 2.0 > -1.0) {
            return Err(Error::Invalid(format!("profile '{}' is not integrable", c.label)));
        }
        Ok(ZonalProfile { n, repr: Representation::Closed(c), atoms: Vec::new() })
    }

    /// Sample `f` at the nodes of the `m`-point rule for dimension `n`.
    pub fn sampled(n: usize, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let rule = gauss_jacobi_rule(n, m)?;
        let values = rule.nodes.iter().map(|&t| f(t)).collect();
        Ok(ZonalProfile { n, repr: Representation::Sampled(Samples { rule, values }), atoms: Vec::new() })
    }

    /// A pure atomic measure.
    pub fn atomic(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        let mut p = Self::series(LegendreSeries::new(n, Vec::new()))?;
        p.atoms = atoms;
        Ok(p)
    }

    pub fn with_atoms(mut self, atoms: Vec<Atom>) -> Self {
        self.atoms.extend(atoms);
        self
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::series(LegendreSeries::new(n, vec![c]))
    }

    pub fn label(&self) -> String {
        match &self.repr {
            Representation::Exact(p, _) => p.to_string(),
            Representation::Series(s) => format!("series of degree {}", s.degree()),
            Representation::Closed(c) => c.label.clone(),
            Representation::Sampled(s) => format!("samples on {} nodes", s.rule.m),
        }
    }

    pub fn as_exact(&self) -> Option<&RationalPolynomial> {
        match &self.repr {
            Representation::Exact(p, _) if self.atoms.is_empty() => Some(p),
            _ => None,
        }
    }

    /// Density value at `t`, ignoring atoms.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.repr {
            Representation::Exact(_, s) | Representation::Series(s) => s.eval(t),
            Representation::Closed(c) => c.eval(t),
            Representation::Sampled(s) => sampled_series(s, self.n).eval(t),
        }
    }

    /// `(f, f', f'')` at `t` when derivative data is available.
    pub fn jet(&self, t: f64) -> Result<[f64; 3]> {
        match &self.repr {
            Representation::Exact(_, s) | Representation::Series(s) => Ok(s.jet(t)),
            Representation::Closed(c) => match &c.jet {
                Some(j) => Ok(j(t)),
                None => Err(Error::NotDifferentiable(c.label.clone())),
            },
            Representation::Sampled(_) => Err(Error::NotDifferentiable("sampled profile".into())),
        }
    }

    /// Profile of `u -> f(-u)`.
    pub fn reflect(&self) -> ZonalProfile {
        let repr = match &self.repr {
            Representation::Exact(p, _) => {
                let p = p.reflect();
                let s = float_series(&p, self.n);
                Representation::Exact(p, s)
            }
            Representation::Series(s) => Representation::Series(reflect_series(s)),
            Representation::Closed(c) => {
                let sm = c.smooth.clone();
                let jet = c.jet.clone().map(|j| -> Jet {
                    Arc::new(move |t| {
                        let v = j(-t);
                        [v[0], -v[1], v[2]]
                    })
                });
                Representation::Closed(ClosedForm {
                    label: format!("reflected {}", c.label),
                    exponent: c.exponent,
                    smooth: Arc::new(move |t| sm(-t)),
                    jet,
                    kinks: c.kinks.iter().map(|k| Kink { t: -k.t, slope_jump: -k.slope_jump }).collect(),
                })
            }
            Representation::Sampled(s) => Representation::Series(reflect_series(&sampled_series(s, self.n))),
        };
        ZonalProfile {
            n: self.n,
            repr,
            atoms: self.atoms.iter().map(|a| Atom { t: -a.t, mass: a.mass }).collect(),
        }
    }
}

fn reflect_series(s: &LegendreSeries) -> LegendreSeries {
    LegendreSeries::new(
        s.n,
        s.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { *c }).collect(),
    )
}

/// Interpolating series of degree `m - 1` through the samples.
pub(crate) fn sampled_series(s: &Samples, n: usize) -> LegendreSeries {
    let kmax = s.rule.m - 1;
    let mut acc = vec![0.0; kmax + 1];
    for ((&t, &w), &v) in s.rule.nodes.iter().zip(&s.rule.weights).zip(&s.values) {
        let p = legendre_values(n, t, kmax);
        for k in 0..=kmax {
            acc[k] += w * v * p[k];
        }
    }
    let on = omega(n);
    let on1 = omega(n - 1);
    LegendreSeries::new(n, acc.iter().enumerate().map(|(k, a)| a * on1 * dim_harmonics(n, k) / on).collect())
}
