#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod channel;
pub mod config;
pub mod constellation;
pub mod demod;
pub mod error;
pub mod format;
pub mod interp;
pub mod ldpc;
pub mod mi;
pub mod quadrature;
pub mod rate;
pub mod sim;
pub mod table;

pub use error::{Error, Result};
