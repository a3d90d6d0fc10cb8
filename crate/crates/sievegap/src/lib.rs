//! Sieving systems, long gaps in their sifted sets, and the tools built on
//! them: a randomized gap construction, hypergraph covering, moment checks,
//! composite runs of polynomial values and coprimality witnesses.

// Range checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod poly;
pub mod primes;
pub mod rng;
pub mod system;
pub mod window;
pub mod cover;
pub mod construction;
pub mod applications;
pub mod moments;
pub mod report;
pub mod cli;
