#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated forms also reject NaN

pub mod dynamics;
pub mod error;
pub mod export;
pub mod model;
pub mod propagation;
pub mod special;
pub mod spectra;
pub mod validation;
