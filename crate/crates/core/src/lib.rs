//! Capacity bounds for the AWGN channel under a `(sigma, rho)` power constraint.
//!
//! A transmitter with a battery of capacity `sigma` that harvests `rho` units
//! of energy per slot can send a codeword `x` only if every window satisfies
//! `sum x_j^2 <= sigma + (window length) * rho`. The crate computes the pieces
//! needed to bracket the capacity of such a channel:
//!
//! - [`geometry`]: battery-state recursion, feasibility and burstiness.
//! - [`growth`]: the volume growth exponent `v(sigma, rho)` of the feasible
//!   set, via the dominant eigenvalue of a discretised integral operator.
//! - [`steiner`]: the amplitude-constrained (`sigma = 0`) case in closed form,
//!   including the parallel-body exponent `ell(nu)` and its asymptotics.
//! - [`subconv`]: convex-conjugate machinery for general intrinsic-volume
//!   sequences.
//! - [`bounds`]: the lower and upper capacity bounds assembled from the above.
//!
//! Everything is `no_std` (with `alloc`). All rates are in nats.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
mod error;
pub mod geometry;
pub mod growth;
pub mod numerics;
pub mod rng;
pub mod steiner;
pub mod subconv;

pub use error::{Error, Result};
