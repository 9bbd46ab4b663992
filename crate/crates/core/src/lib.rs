//! Gradient Kähler Ricci solitons at desk scale.
//!
//! * [`ckgeom`]: metric, Ricci form, scalar curvature and the holomorphic
//!   field `Z` from potentials or metric evaluators, by finite differences.
//! * [`families`]: closed-form solitons (cigar, products, Cao's
//!   `U(n)`-invariant soliton).
//! * [`holodata`]: the linear field `Z_h`, the lattice `Λ_h` and the
//!   resonance dimension `d_h`.
//! * [`toric`]: truncated power series and the order-by-order solver for
//!   the reduced toric Monge–Ampère equation.
//! * [`verify`]: the identity-checking harness.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ckgeom;
pub mod error;
pub mod exec;
pub mod families;
pub mod holodata;
pub mod special;
pub mod toric;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
