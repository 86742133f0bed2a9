//! Lifting the intermediate representation to the `G`-transform on `HK`.
//!
//! With `S = B_H*` and `T = B_K*` the adapted bases of `ρ` for `H` and `K`,
//! the transform of `α` supported on `HK` is `S·(*)·T*` where
//! `(*) = Σ_{n,y} D_{n,y}·Q·⊕τ(ny)` and `Q = S*T`. Because every `D_{n,y}` is
//! `⊕(M ⊗ J)`, `Q` only enters through its column sums over the copies `k` of
//! an orbit, and every entry of `M` is a parent matrix label. Grouping those
//! folded rows of `Q` by the parent block holding their label turns the map
//! into one product `Z·X₃` per (parent block, irrep of `K`), where `Z` holds
//! the intermediate representation of that block.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Labeling;
use crate::counter::OpCounter;
use crate::dft::BlockDiagonal;
use crate::error::{GdftError, Result};
use crate::linalg::{cplx, frobenius, frobenius_diff, identity, kron, matmul, vec_kron_apply, CMatrix};
use crate::repr::{CliffordData, RestrictionPlan};

const PROBE_TOL: f64 = 1e-6;
const PROBE_SEED: u64 = 0x11F7;

/// Per occupied label, a transform over the irreps of `K` holding
/// `(Σ_{n,y} P_{n,y}[label]·τ(ny))ᵀ` for every `τ`.
#[derive(Debug, Clone)]
pub struct IntermediateRep {
    pub per_label: Vec<BlockDiagonal>,
}

/// Where column `w` of a folded block lands in `(*)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Target {
    rho: usize,
    row: usize,
    col: usize,
    d_sigma: usize,
    height: usize,
}

#[derive(Debug, Clone)]
struct LiftBlock {
    level: usize,
    tau: usize,
    d_tau: usize,
    /// Label at `(x, y')` of the parent block, row-major.
    labels: Vec<Option<usize>>,
    x3: CMatrix,
    targets: Vec<Target>,
}

impl LiftBlock {
    fn a(&self) -> usize {
        (1 << self.level) * self.d_tau
    }

    fn w(&self) -> usize {
        self.x3.ncols()
    }

    fn z(&self, ir: &IntermediateRep) -> CMatrix {
        let side = 1 << self.level;
        let dt = self.d_tau;
        let mut z = CMatrix::zeros(side * dt, side * dt);
        for x in 0..side {
            for y in 0..side {
                if let Some(l) = self.labels[x * side + y] {
                    z.view_mut((x * dt, y * dt), (dt, dt)).copy_from(&ir.per_label[l].blocks[self.tau]);
                }
            }
        }
        z
    }
}

#[derive(Debug, Clone)]
pub struct LiftPlan {
    blocks: Vec<LiftBlock>,
    dims: Vec<usize>,
    k_dims: Vec<usize>,
    labels: usize,
    /// `B_H` per irrep of `G`, `None` when it is the identity.
    outer_h: Vec<Option<CMatrix>>,
    /// `B_K` per irrep of `G`, `None` when it is the identity.
    outer_k: Vec<Option<CMatrix>>,
    pub sum_a_squared: usize,
    pub sum_a_w: usize,
    pub r: usize,
    pub k_order: usize,
    pub g_order: usize,
    pub probe_residual: f64,
    /// Direct-evaluation data for the probe: per irrep of `G`, `Q = B_H·B_K*`.
    q: Vec<CMatrix>,
    h_layout: Vec<Vec<(usize, usize)>>,
    k_layout: Vec<Vec<(usize, usize, usize)>>,
}

impl LiftPlan {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `(aᵢ, wᵢ)` per folded block.
    pub fn block_shapes(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.a(), b.w())).collect()
    }

    /// Operation count of one lift, in complex multiplications and additions.
    pub fn estimated_ops(&self) -> (u64, u64) {
        let mut mults = 0u64;
        let mut adds = 0u64;
        for b in &self.blocks {
            let (a, w) = (b.a() as u64, b.w() as u64);
            mults += a * a * w;
            adds += a * (a - 1) * w;
            adds += b.targets.iter().map(|t| (t.height * b.d_tau) as u64).sum::<u64>();
        }
        for (rho, &d) in self.dims.iter().enumerate() {
            let d = d as u64;
            let outer = self.outer_h[rho].is_some() as u64 + self.outer_k[rho].is_some() as u64;
            mults += outer * d * d * d;
            adds += outer * d * d * (d - 1);
        }
        (mults, adds)
    }
}

/// Folds `Q` into the per-block matrices `X₃`, checks the size bounds and
/// verifies the folded map against direct evaluation on a random probe.
pub fn build_lift_plan(
    plan_h: &RestrictionPlan,
    plan_k: &RestrictionPlan,
    cd: &CliffordData,
    lab: &Labeling,
) -> Result<LiftPlan> {
    let irr_g = &plan_h.big;
    if plan_k.big.len() != irr_g.len() {
        return Err(GdftError::GroupMismatch("restriction plans over different irrep sets".into()));
    }
    let dims = irr_g.dims();
    let k_dims = plan_k.small.dims();
    let q: Vec<CMatrix> = plan_h
        .blocks
        .iter()
        .zip(&plan_k.blocks)
        .map(|(bh, bk)| &bh.basis_change * bk.basis_change.adjoint())
        .collect();
    let h_layout: Vec<Vec<(usize, usize)>> = plan_h
        .blocks
        .iter()
        .map(|b| b.layout.iter().map(|e| (e.irrep, e.offset)).collect())
        .collect();
    let k_layout: Vec<Vec<(usize, usize, usize)>> = plan_k
        .blocks
        .iter()
        .map(|b| b.layout.iter().map(|e| (e.irrep, e.offset, e.dim)).collect())
        .collect();

    // Q̃_{s,t}[(j, α), c'] = Σ_k Q[rowoff_s + (j|O| + k)d + α, coloff_t + c']
    let folded = |rho: usize, sigma: usize, row0: usize, col0: usize, j: usize, alpha: usize, c: usize| {
        let sc = cd.sigma[sigma];
        let width = cd.orbits[sc.orbit].len();
        let mut s = Complex64::new(0.0, 0.0);
        for k in 0..width {
            s += q[rho][(row0 + (j * width + k) * sc.d + alpha, col0 + c)];
        }
        s
    };

    let fmt = &lab.format;
    let mut blocks = Vec::new();
    for level in 0..=fmt.i_max {
        let side = 1usize << level;
        for block in 0..fmt.counts[level] {
            let mut labels = vec![None; side * side];
            let mut any = false;
            for x in 0..side {
                for y in 0..side {
                    let c = super::Coord { level, block, row: x, col: y };
                    if let Some(&l) = lab.label_index.get(&c) {
                        labels[x * side + y] = Some(l);
                        any = true;
                    }
                }
            }
            if !any {
                continue;
            }
            // σ with a column in this block: σ ↦ [(j, y')]
            let in_block = |sigma: usize| -> Vec<(usize, usize)> {
                lab.columns[sigma]
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.level == level && p.block == block)
                    .map(|(j, p)| (j, p.col))
                    .collect()
            };
            for (tau, &dt) in k_dims.iter().enumerate() {
                let mut cols: Vec<Vec<Complex64>> = Vec::new();
                let mut targets = Vec::new();
                for rho in 0..dims.len() {
                    for &(sigma, row0) in &h_layout[rho] {
                        let here = in_block(sigma);
                        if here.is_empty() {
                            continue;
                        }
                        let ds = cd.sigma[sigma].d;
                        for &(t_irrep, col0, _) in &k_layout[rho] {
                            if t_irrep != tau {
                                continue;
                            }
                            for alpha in 0..ds {
                                let mut col = vec![Complex64::new(0.0, 0.0); side * dt];
                                for &(j, y) in &here {
                                    for c in 0..dt {
                                        col[y * dt + c] = folded(rho, sigma, row0, col0, j, alpha, c);
                                    }
                                }
                                cols.push(col);
                                targets.push(Target {
                                    rho,
                                    row: row0 + alpha,
                                    col: col0,
                                    d_sigma: ds,
                                    height: lab.heights[sigma],
                                });
                            }
                        }
                    }
                }
                if cols.is_empty() {
                    continue;
                }
                let x3 = CMatrix::from_fn(side * dt, cols.len(), |i, w| cols[w][i]);
                blocks.push(LiftBlock {
                    level,
                    tau,
                    d_tau: dt,
                    labels: labels.clone(),
                    x3,
                    targets,
                });
            }
        }
    }

    let outer = |p: &RestrictionPlan| -> Vec<Option<CMatrix>> {
        p.blocks
            .iter()
            .map(|b| (!b.identity).then(|| b.basis_change.clone()))
            .collect()
    };
    let sum_a_squared = blocks.iter().map(|b| b.a() * b.a()).sum();
    let sum_a_w = blocks.iter().map(|b| b.a() * b.w()).sum();
    let mut plan = LiftPlan {
        blocks,
        dims,
        k_dims,
        labels: lab.occupied.len(),
        outer_h: outer(plan_h),
        outer_k: outer(plan_k),
        sum_a_squared,
        sum_a_w,
        r: fmt.total_entries(),
        k_order: plan_k.small.group().order(),
        g_order: irr_g.group().order(),
        probe_residual: 0.0,
        q,
        h_layout,
        k_layout,
    };
    if plan.sum_a_squared > plan.r * plan.k_order {
        return Err(GdftError::Numerical(format!(
            "lift blocks: Σa² = {} exceeds r·|K| = {}",
            plan.sum_a_squared,
            plan.r * plan.k_order
        )));
    }
    if plan.sum_a_w > 4 * plan.g_order {
        return Err(GdftError::Numerical(format!(
            "lift blocks: Σaw = {} exceeds 4|G| = {}",
            plan.sum_a_w,
            4 * plan.g_order
        )));
    }
    plan.probe_residual = probe(&plan, cd, lab);
    if !(plan.probe_residual <= PROBE_TOL) {
        return Err(GdftError::Numerical(format!(
            "lift plan probe residual {:.3e}",
            plan.probe_residual
        )));
    }
    Ok(plan)
}

/// `(*)` per irrep of `G` through the folded blocks.
fn folded_core(ir: &IntermediateRep, plan: &LiftPlan, ops: &OpCounter) -> Vec<CMatrix> {
    let products: Vec<CMatrix> = plan
        .blocks
        .par_iter()
        .map(|b| matmul(&b.z(ir), &b.x3, ops))
        .collect();
    let mut core: Vec<CMatrix> = plan.dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
    let mut adds = 0u64;
    for (b, y3) in plan.blocks.iter().zip(&products) {
        let dt = b.d_tau;
        for (w, t) in b.targets.iter().enumerate() {
            let m = &mut core[t.rho];
            for x in 0..t.height {
                for c in 0..dt {
                    m[(t.row + x * t.d_sigma, t.col + c)] += y3[(x * dt + c, w)];
                }
            }
            adds += (t.height * dt) as u64;
        }
    }
    ops.add(adds);
    core
}

/// `S·(*)·T*` per irrep of `G`: the transform of the input that produced `ir`.
pub fn lift_to_g_dft(ir: &IntermediateRep, plan: &LiftPlan, ops: &OpCounter) -> Result<BlockDiagonal> {
    if ir.per_label.len() != plan.labels {
        return Err(GdftError::DimensionMismatch(format!(
            "intermediate representation has {} labels, plan expects {}",
            ir.per_label.len(),
            plan.labels
        )));
    }
    for bd in &ir.per_label {
        if bd.dims() != plan.k_dims {
            return Err(GdftError::DimensionMismatch("intermediate representation block shapes".into()));
        }
    }
    let core = folded_core(ir, plan, ops);
    let blocks = core
        .into_iter()
        .enumerate()
        .map(|(rho, m)| {
            let left = match &plan.outer_h[rho] {
                Some(b) => b.adjoint(),
                None => return Ok(right_outer(m, plan, rho, ops)),
            };
            Ok(match &plan.outer_k[rho] {
                Some(bk) => vec_kron_apply(&left, &m, bk, ops)?,
                None => matmul(&left, &m, ops),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDiagonal { blocks })
}

fn right_outer(m: CMatrix, plan: &LiftPlan, rho: usize, ops: &OpCounter) -> CMatrix {
    match &plan.outer_k[rho] {
        Some(bk) => matmul(&m, bk, ops),
        None => m,
    }
}

/// `(*)` evaluated as `Σ_label D_label·Q·R_label`, uncounted.
fn direct_core(ir: &IntermediateRep, plan: &LiftPlan, cd: &CliffordData, lab: &Labeling) -> Vec<CMatrix> {
    (0..plan.dims.len())
        .map(|rho| {
            let d = plan.dims[rho];
            let mut acc = CMatrix::zeros(d, d);
            for (l, bd) in ir.per_label.iter().enumerate() {
                let mut dl = CMatrix::zeros(d, d);
                for &(sigma, off) in &plan.h_layout[rho] {
                    let sc = cd.sigma[sigma];
                    let width = cd.orbits[sc.orbit].len();
                    let indicator = CMatrix::from_fn(lab.heights[sigma], sc.e, |i, j| {
                        if lab.label(sigma, i, j) == l {
                            cplx(1.0, 0.0)
                        } else {
                            cplx(0.0, 0.0)
                        }
                    });
                    let mut j_mat = CMatrix::zeros(sc.d, sc.d * width);
                    for k in 0..width {
                        j_mat.view_mut((0, k * sc.d), (sc.d, sc.d)).copy_from(&identity(sc.d));
                    }
                    let blk = kron(&indicator, &j_mat);
                    dl.view_mut((off, off), blk.shape()).copy_from(&blk);
                }
                let mut rl = CMatrix::zeros(d, d);
                for &(tau, off, dt) in &plan.k_layout[rho] {
                    rl.view_mut((off, off), (dt, dt)).copy_from(&bd.blocks[tau].transpose());
                }
                acc += dl * &plan.q[rho] * rl;
            }
            acc
        })
        .collect()
}

fn probe(plan: &LiftPlan, cd: &CliffordData, lab: &Labeling) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let ir = IntermediateRep {
        per_label: (0..plan.labels)
            .map(|_| BlockDiagonal {
                blocks: plan
                    .k_dims
                    .iter()
                    .map(|&d| CMatrix::from_fn(d, d, |_, _| cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                    .collect(),
            })
            .collect(),
    };
    let fast = folded_core(&ir, plan, &OpCounter::new());
    let slow = direct_core(&ir, plan, cd, lab);
    fast.iter()
        .zip(&slow)
        .map(|(a, b)| frobenius_diff(a, b) / frobenius(b).max(1.0))
        .fold(0.0, f64::max)
}
