//! Zonal harmonic analysis on `S^(n-1)` and fixed points of Minkowski valuations acting on
//! bodies of revolution.
//!
//! Profiles are functions of `t = <e, u>` for the north pole `e`. Legendre polynomials are
//! normalized by `P^n_k(1) = 1`, and multipliers follow the Funk–Hecke convention
//! `a_k[f] = omega_{n-1} int f P^n_k (1 - t^2)^((n-3)/2) dt`.

pub mod bodies;
pub mod error;
pub mod legendre;
pub mod multiplier;
pub mod poly;
pub mod qpoly;
pub mod quadrature;
pub mod roots;
pub mod series;
pub mod special;
pub mod valuation;
pub mod zonal;

pub use bodies::{canonical_body, is_support_function, pencil_body, BodyKind, BodyOfRevolution, Validity, ValidityFlag};
pub use error::{Error, Result};
pub use legendre::legendre;
pub use multiplier::{berg_box_ratio, berg_multipliers, MultiplierSequence};
pub use poly::{Rational, RationalPolynomial};
pub use qpoly::{interval_i, interval_j, q_extrema, Enclosure, IntervalMethod, PencilInterval, QExtrema};
pub use roots::{Certainty, CertifiedExtremum};
pub use series::LegendreSeries;
pub use special::PiMonomial;
pub use valuation::{fixed_point_iterate, FixedPointTrace, ValuationSpec, Verdict};
pub use zonal::{Atom, ClosedForm, ZonalProfile};
