//! Semi-inner-products, Birkhoff-James orthogonality and operator norm
//! attainment in finite-dimensional real normed spaces.
//!
//! Spaces are `ℝⁿ` with an ℓ_p, weighted ℓ_p or polyhedral norm. Supporting
//! functionals are kept in vertex form, which makes one-sided derivatives,
//! orthogonality classification and Giles selections exact finite maxima.
//!
//! ```
//! use sipgeom::{classify, NormedSpace, SipSelection};
//!
//! let linf = NormedSpace::lp(2, f64::INFINITY).unwrap();
//! let c = classify(&linf, &[1.0, 1.0], &[1.0, -1.0], 1e-9).unwrap();
//! assert!(c.is_orthogonal());
//!
//! let sel = SipSelection::default_selection(&linf);
//! assert_eq!(sel.eval(&[1.0, 0.0], &[1.0, 1.0]).unwrap(), 0.5);
//! ```

pub mod bjortho;
pub mod cli;
pub mod duality;
pub mod error;
pub mod linalg;
pub mod normspace;
pub mod opnorm;
pub mod sip;
pub mod theorems;

pub use bjortho::{brute_force_bj, classify, is_bj_orthogonal, BjClassification, Cell};
pub use duality::{directional_derivative, supporting_functionals, Functional, Side, SupportSet};
pub use error::{Error, Result};
pub use normspace::{Exponent, NormSpec, NormedSpace};
pub use opnorm::{functional_attainers, is_in_mt, operator_norm, oracle_norm, NormAttainment, Operator, OperatorSpec};
pub use sip::{default_selection, sip_eval, verify_axioms, with_override, SelectionSpec, SipSelection};
pub use theorems::Certificate;
