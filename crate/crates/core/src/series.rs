//! Floating-point Legendre series in dimension `n`.

use crate::special::{dim_harmonics, omega};
use serde::Serialize;

/// `[P^n_0(t), ..., P^n_kmax(t)]` by the stable forward recurrence.
pub fn legendre_values(n: usize, t: f64, kmax: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(kmax + 1);
    legendre_values_into(n, t, kmax, &mut v);
    v
}

pub fn legendre_values_into(n: usize, t: f64, kmax: usize, v: &mut Vec<f64>) {
    v.clear();
    v.push(1.0);
    if kmax >= 1 {
        v.push(t);
    }
    let nf = n as f64;
    for k in 2..=kmax {
        let kf = k as f64;
        let p = ((2.0 * kf + nf - 4.0) * t * v[k - 1] - (kf - 1.0) * v[k - 2]) / (kf + nf - 3.0);
        v.push(p);
    }
}

pub fn legendre_value(n: usize, k: usize, t: f64) -> f64 {
    let (mut a, mut b) = (1.0, t);
    if k == 0 {
        return 1.0;
    }
    let nf = n as f64;
    for j in 2..=k {
        let jf = j as f64;
        let c = ((2.0 * jf + nf - 4.0) * t * b - (jf - 1.0) * a) / (jf + nf - 3.0);
        a = b;
        b = c;
    }
    b
}

/// `sum_k c_k P^n_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LegendreSeries {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl LegendreSeries {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Self {
        LegendreSeries { n, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&c| c == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = legendre_values(self.n, t, self.degree());
        self.coeffs.iter().zip(&p).map(|(c, p)| c * p).sum()
    }

    /// Derivative as a series in dimension `n + 2`.
    pub fn derivative(&self) -> LegendreSeries {
        let nf = self.n as f64;
        let c = (1..self.coeffs.len())
            .map(|k| {
                let kf = k as f64;
                self.coeffs[k] * kf * (kf + nf - 2.0) / (nf - 1.0)
            })
            .collect();
        LegendreSeries::new(self.n + 2, c)
    }

    /// `(f, f', f'')` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        [self.eval(t), d1.eval(t), d2.eval(t)]
    }

    /// Squared `L^2(S^(n-1))` norm of each mode.
    pub fn mode_energies(&self) -> Vec<f64> {
        let w = omega(self.n);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * c * w / dim_harmonics(self.n, k))
            .collect()
    }
}
