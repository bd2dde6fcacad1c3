//! Numerical evaluation of multiple Dirichlet L-series
//!
//! ```text
//! L(s; a) = sum_{n_1, ..., n_r >= 1} a_1(n_1) ... a_r(n_r) / prod_i (n0 + n_1 + ... + n_i)^{s_i}
//! ```
//!
//! where each a_i has bounded partial sums (non-principal Dirichlet
//! characters, the alternating sequence, zero-sum periodic tables, ...).
//! Two families of evaluators are provided: [`integrator`], built on an
//! integral representation valid in the whole conditional-convergence region,
//! and the series-based [`oracle`] used to cross-check it.

pub mod characters;
pub mod compositions;
pub mod error;
pub mod integrator;
pub mod kernel;
pub mod oracle;
mod periodic;
pub mod sum;

pub use characters::{BoundedSequence, DirichletCharacter};
pub use error::{MdlError, Result};
pub use integrator::{evaluate_integral, EvaluationResult, Method};
pub use kernel::SPoint;
pub use oracle::{evaluate_direct, evaluate_iterated_abel, SummationReport};
