//! The triple-subgroup reduction for `H ∩ K = N` with `N ◁ H`.
//!
//! For `α` supported on `HK = ⊔_y H·y` (`y` over coset representatives of
//! `N` in `K`): one `H`-transform per `y`, a sparse rewrite of each into
//! parent matrices `P_{n,y}`, one `K`-transform per occupied label of the
//! function `ny ↦ P_{n,y}[label]`, and a single lift. General inputs are
//! split over a translate cover of `HK`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{build_labeling, build_lift_plan, build_target_format, lift_to_g_dft, sparse_rewrite};
use super::{DftFn, IntermediateRep, LiftPlan, Labeling};
use crate::counter::OpCounter;
use crate::dft::{BlockDiagonal, GroupAlgebraElement};
use crate::error::{GdftError, Result};
use crate::group::{translate_cover, FiniteGroup, Triple};
use crate::linalg::{add_assign, matmul, ZERO};
use crate::repr::{clifford_data, restriction_plan, CliffordData, IrrepSet, RestrictionPlan};

#[derive(Debug, Clone)]
pub struct TriplePlan {
    pub triple: Triple,
    pub irr_g: Arc<IrrepSet>,
    /// Irreps of `H` in a basis adapted to `N`.
    pub irr_h: Arc<IrrepSet>,
    pub irr_k: Arc<IrrepSet>,
    pub irr_n: Arc<IrrepSet>,
    pub plan_h: RestrictionPlan,
    pub plan_k: RestrictionPlan,
    pub clifford: CliffordData,
    pub labeling: Labeling,
    pub lift: LiftPlan,
    /// Coset representatives of `N` in `K`, ascending, identity first.
    pub y_reps: Vec<usize>,
    pub support: FixedBitSet,
    pub cover: Vec<usize>,
}

impl TriplePlan {
    /// Builds every precomputed piece; `irreps_for` supplies canonical irreps
    /// of `H`, `K` and `N` as standalone groups.
    pub fn build(
        irr_g: &Arc<IrrepSet>,
        triple: &Triple,
        irreps_for: &dyn Fn(&Arc<FiniteGroup>) -> Result<Arc<IrrepSet>>,
    ) -> Result<Self> {
        let g = irr_g.group();
        let Triple { n, h, k } = triple;
        if !h.is_proper() || !k.is_proper() {
            return Err(GdftError::NotApplicable {
                strategy: "triple".into(),
                group: g.label().into(),
                reason: "H and K must be proper subgroups".into(),
            });
        }
        if h.elements().iter().filter(|&&x| k.contains(x)).ne(n.elements().iter()) {
            return Err(GdftError::NotApplicable {
                strategy: "triple".into(),
                group: g.label().into(),
                reason: "H ∩ K differs from N".into(),
            });
        }
        let hg = Arc::new(h.to_group());
        let kg = Arc::new(k.to_group());
        let ng = Arc::new(n.to_group());
        let n_in_h = n.restrict_to(h, &hg);
        if !n_in_h.is_normal() {
            return Err(GdftError::NotNormal);
        }
        let irr_n = irreps_for(&ng)?;
        let irr_h0 = irreps_for(&hg)?;
        let plan_hn = restriction_plan(&irr_h0, &n_in_h, &irr_n)?.into_adapted()?;
        let irr_h = Arc::clone(&plan_hn.big);
        let clifford = clifford_data(&n_in_h, &irr_h, &irr_n, &plan_hn)?;
        let format = build_target_format(clifford.index)?;
        let labeling = build_labeling(&clifford, &irr_h.dims(), &format)?;
        let irr_k = irreps_for(&kg)?;
        let plan_h = restriction_plan(irr_g, h, &irr_h)?;
        let plan_k = restriction_plan(irr_g, k, &irr_k)?;
        let lift = build_lift_plan(&plan_h, &plan_k, &clifford, &labeling)?;

        let mut seen = FixedBitSet::with_capacity(g.order());
        let mut y_reps = Vec::new();
        for &y in k.elements() {
            if seen.contains(y) {
                continue;
            }
            y_reps.push(y);
            for &x in n.elements() {
                seen.insert(g.mul(x, y));
            }
        }
        let support = triple.product_mask();
        let cover = translate_cover(g, &support);
        Ok(TriplePlan {
            triple: triple.clone(),
            irr_g: Arc::clone(irr_g),
            irr_h,
            irr_k,
            irr_n,
            plan_h,
            plan_k,
            clifford,
            labeling,
            lift,
            y_reps,
            support,
            cover,
        })
    }

    pub fn r(&self) -> usize {
        self.labeling.r()
    }

    pub fn occupied(&self) -> usize {
        self.labeling.occupied.len()
    }
}

/// Recursive calls made by one triple-subgroup transform.
#[derive(Debug, Default)]
pub struct TripleStats {
    pub repetitions: AtomicUsize,
    pub h_dfts: AtomicUsize,
    pub inverse_n_dfts: AtomicUsize,
    pub k_dfts: AtomicUsize,
}

impl TripleStats {
    pub fn get(&self) -> (usize, usize, usize, usize) {
        (
            self.repetitions.load(Ordering::Relaxed),
            self.h_dfts.load(Ordering::Relaxed),
            self.inverse_n_dfts.load(Ordering::Relaxed),
            self.k_dfts.load(Ordering::Relaxed),
        )
    }

    /// Whether the counts stay within `|K/N|` `H`-transforms, `r·|K/N|`
    /// inverse `N`-transforms and `r` `K`-transforms per repetition.
    pub fn within_budget(&self, plan: &TriplePlan) -> bool {
        let (reps, h, inv_n, k) = self.get();
        let y = plan.y_reps.len();
        let r = plan.r();
        h == reps * y && inv_n <= reps * r * y && k <= reps * r
    }
}

/// The intermediate representation of `α` supported on `HK`.
pub fn intermediate_rep(
    alpha: &GroupAlgebraElement,
    plan: &TriplePlan,
    recurse_h: DftFn,
    recurse_k: DftFn,
    ops: &OpCounter,
    stats: &TripleStats,
) -> Result<IntermediateRep> {
    let Triple { n, h, k } = &plan.triple;
    let g = h.parent();
    let outside: Vec<usize> = (0..g.order())
        .filter(|&x| !plan.support.contains(x) && alpha.coeff(x) != ZERO)
        .collect();
    if !outside.is_empty() {
        return Err(GdftError::SupportOutside(outside));
    }
    let parents = plan
        .y_reps
        .par_iter()
        .map(|&y| {
            let coeffs = h.elements().iter().map(|&x| alpha.coeff(g.mul(x, y))).collect();
            let sub = GroupAlgebraElement::new(plan.irr_h.group(), coeffs)?.with_support();
            let m = recurse_h(&sub, ops)?;
            stats.h_dfts.fetch_add(1, Ordering::Relaxed);
            let p = sparse_rewrite(&m, &plan.clifford, &plan.labeling, &plan.irr_n, &ops.tagged("triple.sparse"))?;
            stats.inverse_n_dfts.fetch_add(plan.occupied(), Ordering::Relaxed);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    // local position in K of n·y, per (y, n)
    let positions: Vec<Vec<usize>> = plan
        .y_reps
        .iter()
        .map(|&y| {
            n.elements()
                .iter()
                .map(|&x| k.local_index(g.mul(x, y)).expect("ny lies in K"))
                .collect()
        })
        .collect();
    let kg = plan.irr_k.group();
    let per_label = (0..plan.occupied())
        .into_par_iter()
        .map(|l| {
            let mut beta = vec![Complex64::new(0.0, 0.0); kg.order()];
            for (yi, ps) in parents.iter().enumerate() {
                for (ni, p) in ps.iter().enumerate() {
                    beta[positions[yi][ni]] = p.values[l];
                }
            }
            let beta = GroupAlgebraElement::new(kg, beta)?.with_support();
            let f = recurse_k(&beta, ops)?;
            stats.k_dfts.fetch_add(1, Ordering::Relaxed);
            Ok(BlockDiagonal {
                blocks: f.blocks.into_iter().map(|b| b.transpose()).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntermediateRep { per_label })
}

/// The full transform from transforms of inputs supported on `support`,
/// using a greedy translate cover. Returns the transform and the number of
/// nonzero translates evaluated.
pub fn supported_dft_to_full(
    alpha: &GroupAlgebraElement,
    support: &FixedBitSet,
    supported: &(dyn Fn(&GroupAlgebraElement, &OpCounter) -> Result<BlockDiagonal> + Sync),
    irreps: &IrrepSet,
    ops: &OpCounter,
) -> Result<(BlockDiagonal, usize)> {
    supported_with_cover(alpha, support, &translate_cover(irreps.group(), support), supported, irreps, ops)
}

fn supported_with_cover(
    alpha: &GroupAlgebraElement,
    support: &FixedBitSet,
    cover: &[usize],
    supported: &(dyn Fn(&GroupAlgebraElement, &OpCounter) -> Result<BlockDiagonal> + Sync),
    irreps: &IrrepSet,
    ops: &OpCounter,
) -> Result<(BlockDiagonal, usize)> {
    let g = irreps.group();
    let members: Vec<usize> = support.ones().collect();
    let mut covered = FixedBitSet::with_capacity(g.order());
    let mut pieces = Vec::new();
    for &t in cover {
        let mut beta = vec![Complex64::new(0.0, 0.0); g.order()];
        for &s in &members {
            let x = g.mul(s, t);
            if !covered.contains(x) {
                covered.insert(x);
                beta[s] = alpha.coeff(x);
            }
        }
        let beta = GroupAlgebraElement::new(g, beta)?.with_support();
        if !beta.is_zero() {
            pieces.push((t, beta));
        }
    }
    if covered.count_ones(..) != g.order() {
        return Err(GdftError::Numerical("translate cover misses group elements".into()));
    }
    let assembly = ops.tagged("cover");
    let parts = pieces
        .par_iter()
        .map(|(t, beta)| {
            let f = supported(beta, ops)?;
            if *t == g.identity() {
                return Ok(f);
            }
            Ok(BlockDiagonal {
                blocks: f
                    .blocks
                    .iter()
                    .zip(irreps.irreps())
                    .map(|(b, rho)| matmul(b, rho.matrix(*t), &assembly))
                    .collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut iter = parts.into_iter();
    let Some(mut acc) = iter.next() else {
        return Ok((BlockDiagonal::zeros(&irreps.dims()), 0));
    };
    let mut used = 1;
    for p in iter {
        for (a, b) in acc.blocks.iter_mut().zip(&p.blocks) {
            add_assign(a, b, &assembly);
        }
        used += 1;
    }
    Ok((acc, used))
}

/// The `G`-transform of an arbitrary `α` through the triple-subgroup reduction.
pub fn triple_subgroup_dft(
    alpha: &GroupAlgebraElement,
    plan: &TriplePlan,
    recurse_h: DftFn,
    recurse_k: DftFn,
    ops: &OpCounter,
) -> Result<(BlockDiagonal, TripleStats)> {
    let stats = TripleStats::default();
    let supported = |beta: &GroupAlgebraElement, ops: &OpCounter| -> Result<BlockDiagonal> {
        stats.repetitions.fetch_add(1, Ordering::Relaxed);
        let ir = intermediate_rep(beta, plan, recurse_h, recurse_k, ops, &stats)?;
        lift_to_g_dft(&ir, &plan.lift, &ops.tagged("triple.lift"))
    };
    let (f, _) = supported_with_cover(alpha, &plan.support, &plan.cover, &supported, &plan.irr_g, ops)?;
    Ok((f, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::naive_dft;
    use crate::group::{alternating, cyclic, direct_product, find_triple, special_linear2, TripleSearch};
    use crate::repr::{compute_irreps, IrrepOptions};

    fn irreps(g: &Arc<FiniteGroup>) -> Result<Arc<IrrepSet>> {
        Ok(Arc::new(compute_irreps(g, &IrrepOptions::default())?))
    }

    fn plan(g: FiniteGroup) -> TriplePlan {
        let g = Arc::new(g);
        let TripleSearch::TripleCase(t) = find_triple(&g).unwrap() else { panic!("expected a triple") };
        TriplePlan::build(&irreps(&g).unwrap(), &t, &irreps).unwrap()
    }

    fn run(plan: &TriplePlan, alpha: &GroupAlgebraElement) -> (BlockDiagonal, TripleStats, f64) {
        let (ih, ik) = (Arc::clone(&plan.irr_h), Arc::clone(&plan.irr_k));
        let rh = move |a: &GroupAlgebraElement, o: &OpCounter| naive_dft(a, &ih, o);
        let rk = move |a: &GroupAlgebraElement, o: &OpCounter| naive_dft(a, &ik, o);
        let (f, stats) = triple_subgroup_dft(alpha, plan, &rh, &rk, &OpCounter::new()).unwrap();
        let oracle = naive_dft(alpha, &plan.irr_g, &OpCounter::new()).unwrap();
        let res = f.max_block_residual(&oracle);
        (f, stats, res)
    }

    #[test]
    fn a5_matches_oracle() {
        let p = plan(alternating(5).unwrap());
        assert_eq!((p.triple.n.order(), p.triple.h.order(), p.triple.k.order()), (1, 12, 5));
        assert_eq!(p.cover.len(), 1);
        for seed in 0..3 {
            let alpha = GroupAlgebraElement::random(p.irr_g.group(), seed);
            let (_, stats, res) = run(&p, &alpha);
            assert!(res < 1e-7 * alpha.l1_norm(), "residual {res}");
            assert!(stats.within_budget(&p));
            assert_eq!(stats.get().0, 1);
        }
    }

    #[test]
    fn c2_times_a5_and_sl25() {
        let c2 = Arc::new(cyclic(2).unwrap());
        let a5 = Arc::new(alternating(5).unwrap());
        for g in [direct_product(&c2, &a5).unwrap(), special_linear2(5).unwrap()] {
            let p = plan(g);
            assert_eq!(p.triple.n.order(), 2);
            let alpha = GroupAlgebraElement::random(p.irr_g.group(), 5);
            let (_, stats, res) = run(&p, &alpha);
            assert!(res < 1e-7 * alpha.l1_norm(), "residual {res}");
            assert!(stats.within_budget(&p));
        }
    }

    #[test]
    fn identity_input_gives_identity_blocks() {
        let p = plan(alternating(5).unwrap());
        let alpha = GroupAlgebraElement::delta(p.irr_g.group(), 0);
        let (f, _, res) = run(&p, &alpha);
        assert!(res < 1e-10);
        assert!(f.max_block_residual(&BlockDiagonal::identity(&p.irr_g.dims())) < 1e-10);
    }

    #[test]
    fn support_outside_product_is_rejected() {
        let p = plan(alternating(5).unwrap());
        let outside = (0..60).find(|&x| !p.support.contains(x));
        let Some(x) = outside else { return };
        let alpha = GroupAlgebraElement::delta(p.irr_g.group(), x);
        let rh = |a: &GroupAlgebraElement, o: &OpCounter| naive_dft(a, &p.irr_h, o);
        let rk = |a: &GroupAlgebraElement, o: &OpCounter| naive_dft(a, &p.irr_k, o);
        let err = intermediate_rep(&alpha, &p, &rh, &rk, &OpCounter::new(), &TripleStats::default()).unwrap_err();
        assert!(matches!(err, GdftError::SupportOutside(_)));
    }

    #[test]
    fn supported_transform_on_c6() {
        let g = Arc::new(cyclic(6).unwrap());
        let irr = irreps(&g).unwrap();
        let mut s = FixedBitSet::with_capacity(6);
        s.insert_range(0..3);
        let alpha = GroupAlgebraElement::random(&g, 4);
        let irr2 = Arc::clone(&irr);
        let cb = move |a: &GroupAlgebraElement, o: &OpCounter| naive_dft(a, &irr2, o);
        let (f, used) = supported_dft_to_full(&alpha, &s, &cb, &irr, &OpCounter::new()).unwrap();
        assert!(used >= 2);
        let oracle = naive_dft(&alpha, &irr, &OpCounter::new()).unwrap();
        assert!(f.max_block_residual(&oracle) < 1e-10);
        let mut whole = FixedBitSet::with_capacity(6);
        whole.insert_range(..);
        let (_, used) = supported_dft_to_full(&alpha, &whole, &cb, &irr, &OpCounter::new()).unwrap();
        assert_eq!(used, 1);
    }
}
