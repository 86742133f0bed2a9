//! Generalized discrete Fourier transforms over finite groups.
//!
//! A generalized DFT maps a group algebra element `α ∈ C[G]` to the
//! block-diagonal matrix `Σ_g α_g ⊕_ρ ρ(g)`, one block per irreducible
//! representation. Besides the `O(|G|²)` direct evaluation this crate
//! implements three recursive reductions to subgroups:
//!
//! * the single-subgroup reduction (`[G:H]` many `H`-DFTs),
//! * the prime-index reduction for a normal subgroup of prime index,
//! * the triple-subgroup reduction, which combines `H`-DFTs, `K`-DFTs and
//!   inverse `N`-DFTs for `H ∩ K = N` normal, then lifts an intermediate
//!   representation with one folded block-diagonal product.
//!
//! [`planner`] chooses among them recursively and every arithmetic step is
//! tallied by an [`counter::OpCounter`].

pub mod catalog;
pub mod counter;
pub mod dft;
pub mod error;
pub mod group;
pub mod linalg;
pub mod planner;
pub mod reductions;
pub mod repr;

pub use counter::OpCounter;
pub use error::{GdftError, Result};
pub use group::{FiniteGroup, Subgroup};
pub use repr::{Irrep, IrrepSet};
pub use dft::{BlockDiagonal, GroupAlgebraElement};
