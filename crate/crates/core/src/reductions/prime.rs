//! Normal subgroup of prime index `p`: `p` many `N`-DFTs combined by Horner's
//! rule in powers of one coset generator `t`.

use super::{from_adapted, lifted_dense, DftFn};
use crate::counter::OpCounter;
use crate::dft::{BlockDiagonal, GroupAlgebraElement};
use crate::error::{GdftError, Result};
use crate::group::is_prime;
use crate::linalg::{matmul, CMatrix};
use crate::repr::RestrictionPlan;

#[derive(Debug, Clone)]
pub struct PrimePlan {
    pub restriction: RestrictionPlan,
    /// Smallest element outside `N`.
    pub t: usize,
    /// `t^j` for `j < p`.
    pub powers: Vec<usize>,
    /// `B ρ(t) B*` per irrep.
    pub twisted_t: Vec<CMatrix>,
}

impl PrimePlan {
    pub fn new(restriction: RestrictionPlan) -> Result<Self> {
        let n = &restriction.subgroup;
        let g = n.parent();
        let p = n.index();
        if !is_prime(p) {
            return Err(GdftError::NotApplicable {
                strategy: "prime".into(),
                group: g.label().into(),
                reason: format!("index {p} is not prime"),
            });
        }
        if !n.is_normal() {
            return Err(GdftError::NotNormal);
        }
        let t = (0..g.order()).find(|&x| !n.contains(x)).expect("proper subgroup");
        let mut powers = vec![0];
        for j in 1..p {
            powers.push(g.mul(powers[j - 1], t));
        }
        let twisted_t = restriction
            .big
            .irreps()
            .iter()
            .zip(&restriction.blocks)
            .map(|(rho, bp)| &bp.basis_change * rho.matrix(t) * bp.basis_change.adjoint())
            .collect();
        Ok(PrimePlan {
            restriction,
            t,
            powers,
            twisted_t,
        })
    }

    pub fn p(&self) -> usize {
        self.powers.len()
    }
}

/// `Σ_j lift(s_j)·ρ̃(t)^j`, `s_j` the `N`-DFT of `α` on the coset `N·t^j`.
/// Returns the transform and the number of recursive calls.
pub fn prime_index_dft(
    alpha: &GroupAlgebraElement,
    plan: &PrimePlan,
    recurse: DftFn,
    ops: &OpCounter,
) -> Result<(BlockDiagonal, usize)> {
    let rp = &plan.restriction;
    let n = &rp.subgroup;
    let g = n.parent();
    let small_group = rp.small.group();
    let mut lifts: Vec<Option<Vec<CMatrix>>> = Vec::with_capacity(plan.p());
    for &tj in &plan.powers {
        let coeffs: Vec<_> = n.elements().iter().map(|&e| alpha.coeff(g.mul(e, tj))).collect();
        let sub = GroupAlgebraElement::new(small_group, coeffs)?.with_support();
        if sub.is_zero() {
            lifts.push(None);
            continue;
        }
        let s = recurse(&sub, ops)?;
        lifts.push(Some(
            rp.blocks
                .iter()
                .enumerate()
                .map(|(r, bp)| lifted_dense(bp, &s, rp.big.get(r).dim()))
                .collect(),
        ));
    }
    let calls = lifts.iter().filter(|l| l.is_some()).count();
    let dims = rp.big.dims();
    let mut blocks = Vec::with_capacity(dims.len());
    for (r, bp) in rp.blocks.iter().enumerate() {
        let mut acc: Option<CMatrix> = None;
        for l in lifts.iter().rev() {
            if let Some(a) = acc.take() {
                acc = Some(matmul(&a, &plan.twisted_t[r], ops));
            }
            if let Some(l) = l {
                match &mut acc {
                    None => acc = Some(l[r].clone()),
                    Some(a) => {
                        // only the block-diagonal entries of the lift are nonzero
                        let nz: u64 = bp.layout.iter().map(|e| (e.dim * e.dim) as u64).sum();
                        ops.add(nz);
                        *a += &l[r];
                    }
                }
            }
        }
        let f = acc.unwrap_or_else(|| CMatrix::zeros(dims[r], dims[r]));
        blocks.push(from_adapted(bp, f, ops));
    }
    Ok((BlockDiagonal { blocks }, calls))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::naive_dft;
    use crate::group::{cyclic, normal_subgroups, symmetric, FiniteGroup};
    use crate::repr::{compute_irreps, restriction_plan, IrrepOptions, IrrepSet};
    use std::sync::Arc;

    fn plan_for(g: FiniteGroup, n_order: usize) -> (Arc<IrrepSet>, PrimePlan) {
        let g = Arc::new(g);
        let big = Arc::new(compute_irreps(&g, &IrrepOptions::default()).unwrap());
        let n = normal_subgroups(&g).into_iter().find(|s| s.order() == n_order).unwrap();
        let small = Arc::new(compute_irreps(&Arc::new(n.to_group()), &IrrepOptions::default()).unwrap());
        (Arc::clone(&big), PrimePlan::new(restriction_plan(&big, &n, &small).unwrap()).unwrap())
    }

    fn check(g: FiniteGroup, n_order: usize) {
        let (big, plan) = plan_for(g, n_order);
        let cb = |a: &GroupAlgebraElement, ops: &OpCounter| naive_dft(a, &plan.restriction.small, ops);
        for seed in 0..5 {
            let a = GroupAlgebraElement::random(big.group(), seed);
            let (f, calls) = prime_index_dft(&a, &plan, &cb, &OpCounter::new()).unwrap();
            assert_eq!(calls, plan.p());
            assert!(f.max_block_residual(&naive_dft(&a, &big, &OpCounter::new()).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn c6_over_c3() {
        check(cyclic(6).unwrap(), 3);
    }

    #[test]
    fn s4_over_a4() {
        check(symmetric(4).unwrap(), 12);
    }

    #[test]
    fn c7_over_trivial() {
        check(cyclic(7).unwrap(), 1);
    }

    #[test]
    fn support_on_n_is_one_lift() {
        let (big, plan) = plan_for(symmetric(4).unwrap(), 12);
        let cb = |a: &GroupAlgebraElement, ops: &OpCounter| naive_dft(a, &plan.restriction.small, ops);
        let a = GroupAlgebraElement::random_on(big.group(), plan.restriction.subgroup.elements(), 3);
        let (f, calls) = prime_index_dft(&a, &plan, &cb, &OpCounter::new()).unwrap();
        assert_eq!(calls, 1);
        assert!(f.max_block_residual(&naive_dft(&a, &big, &OpCounter::new()).unwrap()) < 1e-9);
    }

    #[test]
    fn rejects_composite_index() {
        let g = Arc::new(cyclic(8).unwrap());
        let big = Arc::new(compute_irreps(&g, &IrrepOptions::default()).unwrap());
        let n = normal_subgroups(&g).into_iter().find(|s| s.order() == 2).unwrap();
        let small = Arc::new(compute_irreps(&Arc::new(n.to_group()), &IrrepOptions::default()).unwrap());
        assert!(PrimePlan::new(restriction_plan(&big, &n, &small).unwrap()).is_err());
    }
}
