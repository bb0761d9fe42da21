//! Block-by-block construction of an entire function that is frequently
//! hypercyclic for the differentiation operator and has the smallest possible
//! growth, together with the numerical machinery that checks every
//! quantitative step of the growth and approximation arguments.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel_polys`]: Rudin–Shapiro, Fejér and de la Vallée-Poussin
//!   polynomials and circle `L^p` norms.
//! * [`enumeration`]: the dense sequence of target polynomials `(q_k, ℓ_k)`,
//!   the partition of the even integers into classes `A_k` and the spacings
//!   `α_k`.
//! * [`construction`]: the exact sparse Taylor coefficient stream of `f`.
//! * [`analysis`]: log-domain evaluation on circles, `p`-means, and the
//!   inequality checks (multipliers, heat kernel, block and glue bounds).
//! * [`hypercyclicity`]: derivative approximation at visit indices, visit
//!   densities and lower-bound probes.
//! * [`cli`]: the `fhc` command-line front end.

pub mod analysis;
pub mod cli;
pub mod construction;
pub mod enumeration;
mod error;
pub mod exponent;
pub mod hypercyclicity;
pub mod kernel_polys;
pub mod logmath;
pub mod source;
pub mod trig;

pub use error::{FhcError, Result};
pub use exponent::Exponent;
