//! Right classification of univariate power series over finite fields of
//! characteristic `p`.
//!
//! [`ff`] provides the coefficient fields, [`pseries`] truncated series and
//! coordinate changes, [`profile`] the support invariants, [`reduce`] normal
//! forms and jet matching, [`moduli`] Milnor number and modality, and
//! [`oracle`] brute-force orbit enumeration for cross-checking.

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod ff;
pub mod moduli;
pub mod oracle;
pub mod profile;
pub mod pseries;
pub mod reduce;
pub mod report;

pub use error::{Error, Result};
