//! Command-line front end for `dnorm-core`: channel files, the `compute`,
//! `convert` and `selftest` commands, and the acceptance suite.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod files;
pub mod selftest;

pub use commands::{compute, render, ComputeOptions, Method, OutputFormat, ResultRecord};
pub use files::{ChannelFile, MatrixFile};
