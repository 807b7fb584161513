//! T-spaces of the one-generator free algebra `k<x>_0` over small finite
//! fields.
//!
//! The crate computes in the quotient algebras `A_n = k<x>_0 / U_n`, builds
//! the explicit bases of the T-spaces `W_n`, computes T-space closures with
//! replayable certificates, and evaluates the binomial congruences and
//! two-variable identities behind the maximality of `W_1`.

pub mod binom;
pub mod bivar;
pub mod constructions;
pub mod gf;
pub mod poly;
pub mod quotient;
pub mod report;
pub mod subspace;
pub mod suites;
pub mod tclosure;

pub use gf::{field_make, Fe, FieldElement, FieldSpec, Gf};
pub use poly::{q_class, Poly};
pub use quotient::{QuotCtx, QuotElt};
pub use subspace::EchelonBasis;
pub use tclosure::{s_closure, t_closure, verify_certificate, Certificate, ClosureStrategy, Engine};
