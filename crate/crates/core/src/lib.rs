//! Exact computations in `sl_n`: root systems and Weyl groups, standard
//! parabolic subalgebras, polarized gradients of the basic invariants, and
//! a verification harness for the span identities they satisfy.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod exact;
pub mod invariants;
pub mod par;
pub mod parabolic;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
