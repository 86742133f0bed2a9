//! Subgroup-adapted bases.
//!
//! For an irrep `ρ` of `G` and a subgroup `H`, a unitary `B` is chosen with
//! `B ρ(h) B* = ⊕ σ(h)` over a fixed layout of irreps `σ` of `H`. The layout is
//! copy-major: slot `c` lists, in id order, every `σ` of multiplicity `> c`.

use std::sync::Arc;

use super::{character_inner, Irrep, IrrepSet};
use crate::error::{GdftError, Result};
use crate::group::Subgroup;
use crate::linalg::{cplx, frobenius_diff, identity, is_identity, projector_range, CMatrix, ZERO};

/// Tolerance below which a basis change is replaced by the exact identity.
const SNAP_TOL: f64 = 1e-12;
/// Largest block residual accepted for a restriction.
const RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutEntry {
    /// Irrep id in the subgroup's set.
    pub irrep: usize,
    /// Copy number of this irrep within the restriction.
    pub slot: usize,
    /// Row offset of the block.
    pub offset: usize,
    pub dim: usize,
}

#[derive(Debug, Clone)]
pub struct BlockPlan {
    pub layout: Vec<LayoutEntry>,
    /// `B`, with `B ρ(h) B* = ⊕ σ(h)`.
    pub basis_change: CMatrix,
    /// `B` is exactly the identity, so products with it can be skipped.
    pub identity: bool,
}

impl BlockPlan {
    pub fn multiplicity(&self, sigma: usize) -> usize {
        self.layout.iter().filter(|e| e.irrep == sigma).count()
    }
}

#[derive(Debug, Clone)]
pub struct RestrictionPlan {
    pub big: Arc<IrrepSet>,
    pub small: Arc<IrrepSet>,
    /// `H` as a subgroup of `big.group()`; the small set is indexed by its local element order.
    pub subgroup: Subgroup,
    pub blocks: Vec<BlockPlan>,
}

impl RestrictionPlan {
    /// `big` re-expressed in the adapted bases: `ρ'(g) = B ρ(g) B*`.
    pub fn adapted_big(&self) -> IrrepSet {
        let us: Vec<CMatrix> = self.blocks.iter().map(|b| b.basis_change.clone()).collect();
        self.big.conjugated(&us)
    }

    /// The plan for the adapted set itself: same layouts, identity basis
    /// changes. The residual `ρ'(h) = ⊕σ(h)` is re-checked.
    pub fn into_adapted(self) -> Result<RestrictionPlan> {
        let big = Arc::new(self.adapted_big());
        let blocks: Vec<BlockPlan> = self
            .blocks
            .into_iter()
            .map(|b| BlockPlan {
                basis_change: identity(b.basis_change.nrows()),
                identity: true,
                layout: b.layout,
            })
            .collect();
        for (rho, bp) in big.irreps().iter().zip(&blocks) {
            let d = rho.dim();
            for (local, &x) in self.subgroup.elements().iter().enumerate() {
                let r = frobenius_diff(rho.matrix(x), &block_diag(&bp.layout, &self.small, local, d));
                if r > RESIDUAL_TOL {
                    return Err(GdftError::Numerical(format!("adapted irrep residual {r:.3e}")));
                }
            }
        }
        Ok(RestrictionPlan {
            big,
            small: self.small,
            subgroup: self.subgroup,
            blocks,
        })
    }

    /// `true` when every basis change is the identity.
    pub fn all_identity(&self) -> bool {
        self.blocks.iter().all(|b| b.identity)
    }
}

/// Builds adapted bases of every irrep of `big` for the subgroup `h`, whose
/// irreps `small` are indexed by the local element order of `h`.
pub fn restriction_plan(big: &Arc<IrrepSet>, h: &Subgroup, small: &Arc<IrrepSet>) -> Result<RestrictionPlan> {
    let g = big.group();
    if !Arc::ptr_eq(h.parent(), g) && h.parent().table_hash() != g.table_hash() {
        return Err(GdftError::GroupMismatch("subgroup is not in the irrep set's group".into()));
    }
    if small.group().order() != h.order() {
        return Err(GdftError::GroupMismatch(format!(
            "subgroup of order {} but small irreps for order {}",
            h.order(),
            small.group().order()
        )));
    }
    let blocks = big
        .irreps()
        .iter()
        .map(|rho| adapt(rho, h, small))
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictionPlan {
        big: Arc::clone(big),
        small: Arc::clone(small),
        subgroup: h.clone(),
        blocks,
    })
}

fn adapt(rho: &Irrep, h: &Subgroup, small: &IrrepSet) -> Result<BlockPlan> {
    let d = rho.dim();
    let hg = small.group();
    let res_chi: Vec<_> = h.elements().iter().map(|&x| rho.character()[x]).collect();
    let mut mult = Vec::with_capacity(small.len());
    for sigma in small.irreps() {
        let m = character_inner(&res_chi, sigma.character(), hg);
        let r = m.re.round();
        if (m.re - r).abs() > 1e-6 || m.im.abs() > 1e-6 || r < 0.0 {
            return Err(GdftError::Numerical(format!("restriction multiplicity {m} is not an integer")));
        }
        mult.push(r as usize);
    }
    let total: usize = mult.iter().zip(small.irreps()).map(|(m, s)| m * s.dim()).sum();
    if total != d {
        return Err(GdftError::Numerical(format!("restriction dims sum to {total}, expected {d}")));
    }

    // For each σ: the copies' basis vectors v[c][i] = E_{i1} u_c.
    let mut vectors: Vec<Vec<Vec<CMatrix>>> = vec![Vec::new(); small.len()];
    for (sid, sigma) in small.irreps().iter().enumerate() {
        let m = mult[sid];
        if m == 0 {
            continue;
        }
        let ds = sigma.dim();
        let scale = ds as f64 / h.order() as f64;
        let e_col = |i: usize| -> CMatrix {
            let mut acc = CMatrix::zeros(d, d);
            for (local, &x) in h.elements().iter().enumerate() {
                let c = sigma.matrix(local)[(i, 0)].conj();
                if c != ZERO {
                    acc += rho.matrix(x) * c;
                }
            }
            acc * cplx(scale, 0.0)
        };
        let e11 = e_col(0);
        let u = projector_range(&e11, m)?;
        let es: Vec<CMatrix> = (0..ds).map(|i| if i == 0 { e11.clone() } else { e_col(i) }).collect();
        for c in 0..m {
            let uc = u.column(c).into_owned();
            vectors[sid].push(es.iter().map(|e| CMatrix::from_column_slice(d, 1, (e * &uc).as_slice())).collect());
        }
    }

    let mut layout = Vec::new();
    let mut bstar = CMatrix::zeros(d, d);
    let mut offset = 0;
    let max_mult = mult.iter().copied().max().unwrap_or(0);
    for slot in 0..max_mult {
        for (sid, sigma) in small.irreps().iter().enumerate() {
            if mult[sid] <= slot {
                continue;
            }
            for (i, v) in vectors[sid][slot].iter().enumerate() {
                bstar.set_column(offset + i, &v.column(0));
            }
            layout.push(LayoutEntry {
                irrep: sid,
                slot,
                offset,
                dim: sigma.dim(),
            });
            offset += sigma.dim();
        }
    }
    let mut b = bstar.adjoint();
    let identity_basis = is_identity(&b, SNAP_TOL);
    if identity_basis {
        b = identity(d);
    }
    if frobenius_diff(&(&b * b.adjoint()), &identity(d)) > RESIDUAL_TOL {
        return Err(GdftError::Numerical("adapted basis is not unitary".into()));
    }
    let plan = BlockPlan {
        layout,
        basis_change: b,
        identity: identity_basis,
    };
    let bad = h.elements().iter().enumerate().find_map(|(local, &x)| {
        let lhs = &plan.basis_change * rho.matrix(x) * plan.basis_change.adjoint();
        let rhs = block_diag(&plan.layout, small, local, d);
        let r = frobenius_diff(&lhs, &rhs);
        (r > RESIDUAL_TOL).then_some(r)
    });
    if let Some(r) = bad {
        return Err(GdftError::Numerical(format!("restriction block residual {r:.3e}")));
    }
    Ok(plan)
}

/// `⊕ σ(h)` over a layout.
pub(crate) fn block_diag(layout: &[LayoutEntry], small: &IrrepSet, local: usize, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, d);
    for e in layout {
        out.view_mut((e.offset, e.offset), (e.dim, e.dim))
            .copy_from(small.get(e.irrep).matrix(local));
    }
    out
}

/// A unitary `T` with `a(g) = T b(g) T*` for all `g`, or `None` when the
/// characters differ.
pub fn irrep_equivalence(a: &Irrep, b: &Irrep) -> Option<CMatrix> {
    let n = a.matrices().len();
    if a.dim() != b.dim()
        || n != b.matrices().len()
        || a.character().iter().zip(b.character()).any(|(x, y)| (x - y).norm() > 1e-6)
    {
        return None;
    }
    let d = a.dim();
    for i in 0..d {
        for j in 0..d {
            // T = (1/|G|) Σ_g a(g) E_ij b(g)*, a scalar multiple of a unitary
            let mut t = CMatrix::zeros(d, d);
            for g in 0..n {
                let col = a.matrix(g).column(i);
                let row = b.matrix(g).column(j).adjoint();
                t += col * row;
            }
            t /= num_complex::Complex64::from(n as f64);
            let c2 = (&t * t.adjoint()).trace().re / d as f64;
            if c2 > 1e-6 {
                return Some(t / num_complex::Complex64::from(c2.sqrt()));
            }
        }
    }
    None
}
