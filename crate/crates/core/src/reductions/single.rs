//! `[G:H]` many `H`-DFTs, lifted into adapted bases and translated by coset representatives.

use rayon::prelude::*;

use super::{from_adapted, lifted, lifted_dense, DftFn};
use crate::counter::OpCounter;
use crate::dft::{BlockDiagonal, GroupAlgebraElement};
use crate::error::Result;
use crate::group::{coset_reps, CosetSide};
use crate::linalg::{add_assign, block_diag_mul, CMatrix};
use crate::repr::RestrictionPlan;

#[derive(Debug, Clone)]
pub struct SinglePlan {
    pub restriction: RestrictionPlan,
    /// Right coset representatives `x` of `H·x`, identity first.
    pub reps: Vec<usize>,
    /// `B ρ(x) B*` per representative and irrep.
    pub twisted: Vec<Vec<CMatrix>>,
}

impl SinglePlan {
    pub fn new(restriction: RestrictionPlan) -> Self {
        let reps = coset_reps(&restriction.subgroup, CosetSide::Right);
        let twisted = reps
            .iter()
            .map(|&x| {
                restriction
                    .big
                    .irreps()
                    .iter()
                    .zip(&restriction.blocks)
                    .map(|(rho, bp)| &bp.basis_change * rho.matrix(x) * bp.basis_change.adjoint())
                    .collect()
            })
            .collect();
        SinglePlan { restriction, reps, twisted }
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }
}

/// `Σ_x lift(s_x)·ρ̃(x)` with `s_x = Σ_h α_{hx} ⊕σ(h)`, converted back from the
/// adapted basis. Cosets on which `α` vanishes are skipped. Returns the
/// transform and the number of recursive calls made.
pub fn single_subgroup_dft(
    alpha: &GroupAlgebraElement,
    plan: &SinglePlan,
    recurse: DftFn,
    ops: &OpCounter,
) -> Result<(BlockDiagonal, usize)> {
    let rp = &plan.restriction;
    let h = &rp.subgroup;
    let g = h.parent();
    let small_group = rp.small.group();
    let parts: Vec<Option<Vec<CMatrix>>> = plan
        .reps
        .par_iter()
        .enumerate()
        .map(|(xi, &x)| -> Result<Option<Vec<CMatrix>>> {
            let coeffs: Vec<_> = h.elements().iter().map(|&e| alpha.coeff(g.mul(e, x))).collect();
            let sub = GroupAlgebraElement::new(small_group, coeffs)?.with_support();
            if sub.is_zero() {
                return Ok(None);
            }
            let s = recurse(&sub, ops)?;
            let blocks = rp
                .blocks
                .iter()
                .enumerate()
                .map(|(r, bp)| {
                    let d = rp.big.get(r).dim();
                    if xi == 0 && x == 0 {
                        lifted_dense(bp, &s, d)
                    } else {
                        block_diag_mul(&lifted(bp, &s), &plan.twisted[xi][r], ops)
                    }
                })
                .collect();
            Ok(Some(blocks))
        })
        .collect::<Result<_>>()?;
    let calls = parts.iter().filter(|p| p.is_some()).count();
    let mut acc: Option<Vec<CMatrix>> = None;
    for part in parts.into_iter().flatten() {
        match &mut acc {
            None => acc = Some(part),
            Some(a) => {
                for (x, y) in a.iter_mut().zip(&part) {
                    add_assign(x, y, ops);
                }
            }
        }
    }
    let dims = rp.big.dims();
    let blocks = match acc {
        None => BlockDiagonal::zeros(&dims).blocks,
        Some(a) => a
            .into_iter()
            .zip(&rp.blocks)
            .map(|(f, bp)| from_adapted(bp, f, ops))
            .collect(),
    };
    Ok((BlockDiagonal { blocks }, calls))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::naive_dft;
    use crate::group::{all_subgroups, dihedral, symmetric, FiniteGroup, Subgroup};
    use crate::repr::{compute_irreps, restriction_plan, IrrepOptions, IrrepSet};
    use std::sync::Arc;

    fn plan_for(g: FiniteGroup, h_order: usize) -> (Arc<IrrepSet>, SinglePlan) {
        let g = Arc::new(g);
        let big = Arc::new(compute_irreps(&g, &IrrepOptions::default()).unwrap());
        let h = all_subgroups(&g, None).unwrap().into_iter().find(|s| s.order() == h_order).unwrap();
        plan_with(&big, &h)
    }

    fn plan_with(big: &Arc<IrrepSet>, h: &Subgroup) -> (Arc<IrrepSet>, SinglePlan) {
        let small = Arc::new(compute_irreps(&Arc::new(h.to_group()), &IrrepOptions::default()).unwrap());
        (Arc::clone(big), SinglePlan::new(restriction_plan(big, h, &small).unwrap()))
    }

    fn naive_cb(plan: &SinglePlan) -> impl Fn(&GroupAlgebraElement, &OpCounter) -> Result<BlockDiagonal> + Sync + '_ {
        move |a, ops| naive_dft(a, &plan.restriction.small, ops)
    }

    #[test]
    fn s3_over_c3_matches_oracle() {
        let (big, plan) = plan_for(symmetric(3).unwrap(), 3);
        let g = big.group();
        for seed in 0..5 {
            let a = GroupAlgebraElement::random(g, seed);
            let (f, calls) = single_subgroup_dft(&a, &plan, &naive_cb(&plan), &OpCounter::new()).unwrap();
            assert_eq!(calls, 2);
            let oracle = naive_dft(&a, &big, &OpCounter::new()).unwrap();
            assert!(f.max_block_residual(&oracle) < 1e-9);
        }
    }

    #[test]
    fn whole_group_is_one_call_without_assembly() {
        let g = Arc::new(dihedral(4).unwrap());
        let big = Arc::new(compute_irreps(&g, &IrrepOptions::default()).unwrap());
        let whole = Subgroup::whole(&g);
        let plan = SinglePlan::new(restriction_plan(&big, &whole, &big).unwrap());
        let a = GroupAlgebraElement::random(&g, 1);
        let ops = OpCounter::new();
        let inner = OpCounter::new();
        let cb = |x: &GroupAlgebraElement, _: &OpCounter| naive_dft(x, &big, &inner);
        let (f, calls) = single_subgroup_dft(&a, &plan, &cb, &ops).unwrap();
        assert_eq!(calls, 1);
        assert_eq!(ops.snapshot().total(), 0);
        assert!(f.max_block_residual(&naive_dft(&a, &big, &OpCounter::new()).unwrap()) < 1e-12);
    }

    #[test]
    fn single_coset_support_uses_one_call() {
        let (big, plan) = plan_for(symmetric(4).unwrap(), 6);
        let g = big.group();
        let x = plan.reps[2];
        let coset: Vec<usize> = plan.restriction.subgroup.elements().iter().map(|&h| g.mul(h, x)).collect();
        let a = GroupAlgebraElement::random_on(g, &coset, 5);
        let (f, calls) = single_subgroup_dft(&a, &plan, &naive_cb(&plan), &OpCounter::new()).unwrap();
        assert_eq!(calls, 1);
        assert!(f.max_block_residual(&naive_dft(&a, &big, &OpCounter::new()).unwrap()) < 1e-9);
    }
}
