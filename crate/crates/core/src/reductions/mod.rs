//! Reductions of a `G`-DFT to DFTs over subgroups.
//!
//! Each reduction takes the recursive transforms it needs as callbacks, so a
//! planner can plug in any strategy (including another reduction) below it.

mod format;
mod lift;
mod prime;
mod single;
mod sparse;
mod triple;

use crate::counter::OpCounter;
use crate::dft::{BlockDiagonal, GroupAlgebraElement};
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::repr::BlockPlan;

pub use format::{build_labeling, build_target_format, ColumnPlacement, Coord, Labeling, TargetFormat};
pub use lift::{build_lift_plan, lift_to_g_dft, IntermediateRep, LiftPlan};
pub use prime::{prime_index_dft, PrimePlan};
pub use single::{single_subgroup_dft, SinglePlan};
pub use sparse::{reconstruct, sparse_rewrite, ParentMatrix};
pub use triple::{
    intermediate_rep, supported_dft_to_full, triple_subgroup_dft, TriplePlan, TripleStats,
};

/// A transform over some fixed group and irrep set.
pub type DftFn<'a> = &'a (dyn Fn(&GroupAlgebraElement, &OpCounter) -> Result<BlockDiagonal> + Sync);

/// Subgroup transform blocks placed at their layout offsets inside an irrep of the big group.
pub(crate) fn lifted<'a>(plan: &BlockPlan, small: &'a BlockDiagonal) -> Vec<(usize, &'a CMatrix)> {
    plan.layout.iter().map(|e| (e.offset, &small.blocks[e.irrep])).collect()
}

/// Dense copy of a lifted block-diagonal matrix.
pub(crate) fn lifted_dense(plan: &BlockPlan, small: &BlockDiagonal, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for e in &plan.layout {
        out.view_mut((e.offset, e.offset), (e.dim, e.dim)).copy_from(&small.blocks[e.irrep]);
    }
    out
}

/// `B* F B`, skipped when `B` is the identity.
pub(crate) fn from_adapted(plan: &BlockPlan, f: CMatrix, ops: &OpCounter) -> CMatrix {
    if plan.identity {
        f
    } else {
        let b = &plan.basis_change;
        crate::linalg::matmul(&crate::linalg::matmul(&b.adjoint(), &f, ops), b, ops)
    }
}
