//! Exact computation behind the question of whether Euler's totient of a Pell
//! or associated Pell number can be a repdigit.
//!
//! The crate is layered bottom-up: [`arith`] (big-integer number theory),
//! [`sequences`] (Pell, associated Pell, balancing numbers), [`repdigit`],
//! [`modular`] (period tables and residue filters), and [`verifier`], which
//! runs bounded searches and case replays and returns [`VerificationReport`]s.
//! [`claims`] maps stable claim ids onto verifier runs and [`render`] turns
//! reports and tables into text or JSON.

pub mod arith;
pub mod claims;
pub mod modular;
pub mod render;
pub mod repdigit;
pub mod sequences;
pub mod verifier;

pub use arith::{ArithError, Factorization, Nat};
pub use modular::{PeriodTable, ResidueSet};
pub use repdigit::RepdigitForm;
pub use sequences::{PellPair, SequenceKind};

pub use verifier::{ProofTrace, Status, TraceStep, VerificationReport, Verifier, Witness};
