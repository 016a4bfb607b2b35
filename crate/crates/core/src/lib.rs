//! Making a fixed-point free increasing bijection of the line into a group
//! shift, and exact constructions showing where that stops working.
//!
//! * [`expr`] and [`monotone`]: user-supplied maps, sample-based
//!   certification and numeric inversion.
//! * [`conjugacy`]: the conjugacy `g` with `g(u + 1) = f(g(u))`.
//! * [`group`]: the operation `x (+) y = g(g^{-1}(x) + g^{-1}(y))` under which
//!   `f` is translation by `f(0)`.
//! * [`tricolor`]: a three-set cover with `f(F_i)` disjoint from `F_i`.
//! * [`qexact`]: a periodic-point free partial homeomorphism of the rationals,
//!   built exactly over `Q(sqrt 2, sqrt 7)`, that is not a shift.
//! * [`orbit3`]: a periodic-point free homeomorphism of `R^3` whose orbits
//!   accumulate.
#![no_std]

extern crate alloc;

pub mod conjugacy;
pub mod expr;
pub mod group;
pub mod monotone;
mod num;
pub mod orbit3;
pub mod qexact;
pub mod sampling;
pub mod tricolor;

pub use conjugacy::{ConjugacyError, ConjugacyMap};
pub use expr::{parse_expr, Expr};
pub use group::RebuiltGroup;
pub use monotone::{certify_map, invert_map, Displacement, Grid, MonotoneMap1D};
