//! Extremal parabolas and horocycles.
//!
//! * [`exparabola`]: the three exparabolas of a triangle, from the roots of a
//!   cubic in the pencil of parabolas tangent to the three side lines.
//! * [`max_parabola`]: the maximal parabola inscribed in an unbounded
//!   intersection of half-planes.
//! * [`horocycle`] and [`min_horocycle`]: horocycles of the Cayley–Klein disk
//!   and the minimal horocycle enclosing a finite point set.
//!
//! Conics are symmetric 3×3 matrices over homogeneous coordinates
//! `[x0, x1, x2]` with `x = x1 / x0` and `y = x2 / x0` ([`projective`]).

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cubic;
pub mod error;
pub mod exparabola;
pub mod horocycle;
mod lp;
pub mod max_parabola;
pub mod min_horocycle;
pub mod parabola;
pub mod pencil;
pub mod projective;

pub use error::{Error, Result};
