use super::profile::{Atom, ClosedForm, Jet, Kink, Representation, ZonalProfile};
use crate::error::{Error, Result};
use crate::poly::{q, qi, RationalPolynomial};
use crate::series::LegendreSeries;
use crate::special::omega;
use std::sync::Arc;

/// `A1 p = p - t p'`.
pub fn a1_poly(p: &RationalPolynomial) -> RationalPolynomial {
    p - &p.derivative().shift_up()
}

/// `A2 p = (1 - t^2) p'' + p - t p'`.
pub fn a2_poly(p: &RationalPolynomial) -> RationalPolynomial {
    let one_m_t2 = RationalPolynomial::from_ints(&[1, 0, -1]);
    &(&one_m_t2 * &p.derivative().derivative()) + &a1_poly(p)
}

/// `box_n p = (A2 p + (n-2) A1 p) / (n-1)`.
pub fn box_poly(p: &RationalPolynomial, n: usize) -> RationalPolynomial {
    let n = n as i64;
    (&a2_poly(p) + &a1_poly(p).scale(&qi(n - 2))).scale(&q(1, n - 1))
}

/// Spherical Laplacian `(n-1)(box_n - Id)` on a polynomial profile.
pub fn laplacian_poly(p: &RationalPolynomial, n: usize) -> RationalPolynomial {
    (&box_poly(p, n) - p).scale(&qi(n as i64 - 1))
}

/// Eigenvalue of `box_n` on degree-`k` harmonics: `-(k-1)(k+n-1)/(n-1)`.
pub fn box_eigenvalue(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    -(k - 1.0) * (k + n - 1.0) / (n - 1.0)
}

#[derive(Clone, Copy, PartialEq)]
enum Op {
    A1,
    A2,
    Box,
    Laplacian,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::A1 => "A1",
            Op::A2 => "A2",
            Op::Box => "box",
            Op::Laplacian => "laplacian",
        }
    }

    fn poly(self, p: &RationalPolynomial, n: usize) -> RationalPolynomial {
        match self {
            Op::A1 => a1_poly(p),
            Op::A2 => a2_poly(p),
            Op::Box => box_poly(p, n),
            Op::Laplacian => laplacian_poly(p, n),
        }
    }

    /// Pointwise value from `(f, f', f'')`.
    fn point(self, n: usize, t: f64, j: [f64; 3]) -> f64 {
        let nf = n as f64;
        let a1 = j[0] - t * j[1];
        let s = (1.0 - t * t) * j[2];
        match self {
            Op::A1 => a1,
            Op::A2 => s + a1,
            Op::Box => s / (nf - 1.0) + a1,
            Op::Laplacian => s - (nf - 1.0) * t * j[1],
        }
    }

    /// Weight of the `(1 - t^2) f''` term, which turns slope jumps into atoms.
    fn second_order_weight(self, n: usize) -> f64 {
        match self {
            Op::A1 => 0.0,
            Op::A2 | Op::Laplacian => 1.0,
            Op::Box => 1.0 / (n as f64 - 1.0),
        }
    }
}

fn apply(op: Op, f: &ZonalProfile) -> Result<ZonalProfile> {
    if !f.atoms.is_empty() {
        return Err(Error::AtomDerivative);
    }
    let n = f.n;
    match &f.repr {
        Representation::Exact(p, _) => ZonalProfile::exact(n, op.poly(p, n)),
        Representation::Series(s) if matches!(op, Op::Box | Op::Laplacian) => {
            let nf = n as f64;
            let c = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let ev = match op {
                        Op::Box => box_eigenvalue(n, k),
                        _ => -(k as f64) * (k as f64 + nf - 2.0),
                    };
                    c * ev
                })
                .collect();
            ZonalProfile::series(LegendreSeries::new(n, c))
        }
        Representation::Series(s) => {
            let s = s.clone();
            let (d1, d2) = (s.derivative(), s.derivative().derivative());
            let d3 = d2.derivative();
            let d4 = d3.derivative();
            let value = {
                let (s, d1, d2) = (s.clone(), d1.clone(), d2.clone());
                move |t: f64| op.point(n, t, [s.eval(t), d1.eval(t), d2.eval(t)])
            };
            let jet: Jet = {
                let value = value.clone();
                Arc::new(move |t: f64| {
                    let (f2, f3, f4) = (d2.eval(t), d3.eval(t), d4.eval(t));
                    let (a, b) = match op {
                        Op::A1 => (-t * f2, -f2 - t * f3),
                        _ => (-3.0 * t * f2 + (1.0 - t * t) * f3, -3.0 * f2 - 5.0 * t * f3 + (1.0 - t * t) * f4),
                    };
                    [value(t), a, b]
                })
            };
            let c = ClosedForm::new(format!("{} of series", op.name()), Arc::new(value)).with_jet(jet);
            ZonalProfile::closed(n, c)
        }
        Representation::Closed(c) => {
            let jet = c.jet.clone().ok_or_else(|| Error::NotDifferentiable(c.label.clone()))?;
            let e_out = if c.exponent == 0.0 { 0.0 } else { c.exponent - 2.0 };
            let smooth = move |t: f64| {
                let v = op.point(n, t, jet(t));
                if e_out == 0.0 {
                    v
                } else {
                    v / (1.0 - t * t).powf(e_out / 2.0)
                }
            };
            let w2 = op.second_order_weight(n);
            let on1 = omega(n - 1);
            let atoms = c
                .kinks
                .iter()
                .filter(|k| w2 != 0.0 && k.slope_jump != 0.0)
                .map(|k| Atom {
                    t: k.t,
                    mass: w2 * on1 * (1.0 - k.t * k.t).powf((n as f64 - 1.0) / 2.0) * k.slope_jump,
                })
                .collect();
            let out = ClosedForm::new(format!("{}({})", op.name(), c.label), Arc::new(smooth))
                .with_exponent(e_out)
                .with_kinks(c.kinks.iter().map(|k| Kink { t: k.t, slope_jump: 0.0 }).collect());
            Ok(ZonalProfile::closed(n, out)?.with_atoms(atoms))
        }
        Representation::Sampled(_) => Err(Error::NotDifferentiable("sampled profile".into())),
    }
}

/// `A1 f = f - t f'`.
pub fn apply_a1(f: &ZonalProfile) -> Result<ZonalProfile> {
    apply(Op::A1, f)
}

/// `A2 f = (1 - t^2) f'' + f - t f'`; slope jumps become band atoms.
pub fn apply_a2(f: &ZonalProfile) -> Result<ZonalProfile> {
    apply(Op::A2, f)
}

/// `box_n f = (1/(n-1)) (1 - t^2) f'' + f - t f'`.
pub fn apply_box(f: &ZonalProfile) -> Result<ZonalProfile> {
    apply(Op::Box, f)
}

/// Spherical Laplacian of a zonal function.
pub fn apply_laplacian(f: &ZonalProfile) -> Result<ZonalProfile> {
    apply(Op::Laplacian, f)
}
