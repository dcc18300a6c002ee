//! Frequency-domain stability certificates for second-order evolutionary
//! equations with memory and delay, with time-domain cross-checks.
//!
//! The pipeline is: pick a spatial operator ([`spatial`]), a material law
//! ([`law`], built from kernels in [`kernel`]), reformulate it as a
//! first-order system ([`reformulation`]), certify positivity and resolvent
//! bounds ([`certifier`]), and validate the predicted decay by simulation
//! ([`time_domain`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certifier;
pub mod commands;
pub mod error;
pub mod io;
pub mod kernel;
pub mod law;
pub mod linalg;
pub mod reformulation;
pub mod scenario;
pub mod spatial;
pub mod time_domain;

pub use error::{Error, Result};
