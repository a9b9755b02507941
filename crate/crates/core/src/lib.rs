//! Tail and mean analysis of Nudge-type scheduling policies for two job classes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fluid;
pub mod linalg;
pub mod phtype;
pub mod policy;
pub mod recipes;
pub mod report;
pub mod resp2;
pub mod sim;
pub mod swap;
pub mod tol;
pub mod verify;

pub use asymptotics::{decay_rate, AtirReport, DecayInfo};
pub use error::{Error, Result};
pub use phtype::{fit_hyperexp, JobMix, MixSpec, PhaseType, SizeShape};
pub use policy::{NamedPolicy, PolicyFn};
