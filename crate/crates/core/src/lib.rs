//! Exact operator algebra and lattice spectra for `H = p^2 + i g x^eps p`.

pub mod analysis;
pub mod coeff;
pub mod eig;
pub mod hparser;
pub mod lattice;
pub mod opalg;
pub mod random;

pub use coeff::{Coefficient, ComplexRational};
pub use hparser::{format, parse, ParseError, ParseErrorKind};
pub use opalg::{Monomial, OperatorPolynomial, Variant, XFunction};
