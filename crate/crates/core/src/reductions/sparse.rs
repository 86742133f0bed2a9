//! Rewriting an `H`-transform as a sum over `N` of sparse parent matrices.
//!
//! For `N ◁ H` and an irrep `σ` of `H` lying over the orbit `O` (with
//! multiplicity `e`, irreps of dimension `d`), every `M^σ` in an `N`-adapted
//! basis can be written `Σ_n (M_n^σ ⊗ J)·σ(n)` with `M_n^σ` of shape
//! `(dim σ / d) × e` and `J = (I_d | … | I_d)`. Entry `(i, j)` of `M_n^σ` is an
//! inverse `N`-transform of the blocks `(i; j, k)`, `k < |O|`, so one inverse
//! transform per label of the target format suffices: labels shared between
//! orbits are resolved by the disjoint `N`-spectra of the orbits.

use num_complex::Complex64;
use rayon::prelude::*;

use super::Labeling;
use crate::counter::OpCounter;
use crate::dft::{trace_of_product, BlockDiagonal};
use crate::error::{GdftError, Result};
use crate::linalg::{cplx, kron, CMatrix};
use crate::repr::{CliffordData, IrrepSet};

/// The entries of one parent matrix, one per occupied label.
#[derive(Debug, Clone, PartialEq)]
pub struct ParentMatrix {
    pub values: Vec<Complex64>,
}

impl ParentMatrix {
    /// Dense blocks per level of the target format; unoccupied entries are zero.
    pub fn to_blocks(&self, lab: &Labeling) -> Vec<Vec<CMatrix>> {
        let fmt = &lab.format;
        let mut out: Vec<Vec<CMatrix>> = (0..=fmt.i_max)
            .map(|l| vec![CMatrix::zeros(1 << l, 1 << l); fmt.counts[l]])
            .collect();
        for (c, v) in lab.occupied.iter().zip(&self.values) {
            out[c.level][c.block][(c.row, c.col)] = *v;
        }
        out
    }

    /// `M_n^σ` read off the labels.
    pub fn sigma_matrix(&self, lab: &Labeling, cd: &CliffordData, sigma: usize) -> CMatrix {
        let e = cd.sigma[sigma].e;
        CMatrix::from_fn(lab.heights[sigma], e, |i, j| self.values[lab.label(sigma, i, j)])
    }
}

/// Block `(i; j, k)` of `M^σ`.
fn source_block(m: &CMatrix, d: usize, width: usize, i: usize, j: usize, k: usize) -> CMatrix {
    m.view((i * d, (j * width + k) * d), (d, d)).into_owned()
}

/// Parent matrices `P_n`, indexed by the local element order of `N`, for a
/// transform `m` over the `N`-adapted irreps of `H`.
pub fn sparse_rewrite(
    m: &BlockDiagonal,
    cd: &CliffordData,
    lab: &Labeling,
    irr_n: &IrrepSet,
    ops: &OpCounter,
) -> Result<Vec<ParentMatrix>> {
    if m.blocks.len() != cd.sigma.len() {
        return Err(GdftError::DimensionMismatch(format!(
            "{} blocks for {} irreps",
            m.blocks.len(),
            cd.sigma.len()
        )));
    }
    let ng = irr_n.group();
    let n = ng.order();
    let inverses: Vec<usize> = (0..n).map(|x| ng.inv(x)).collect();
    let per_label: Vec<Vec<Complex64>> = lab
        .sources
        .par_iter()
        .map(|sources| {
            // (λ, F_λ) for every irrep of N present at this label
            let mut spectrum: Vec<(usize, CMatrix)> = Vec::new();
            for &(sigma, i, j) in sources {
                let sc = cd.sigma[sigma];
                let orbit = &cd.orbits[sc.orbit];
                for (k, &lam) in orbit.iter().enumerate() {
                    spectrum.push((lam, source_block(&m.blocks[sigma], sc.d, orbit.len(), i, j, k)));
                }
            }
            if n == 1 {
                return spectrum.iter().map(|(_, f)| f[(0, 0)]).collect();
            }
            let entries: u64 = spectrum.iter().map(|(_, f)| f.len() as u64).sum();
            ops.record(entries + n as u64 * entries, n as u64 * entries.saturating_sub(1));
            let scaled: Vec<(usize, CMatrix)> = spectrum
                .into_iter()
                .map(|(lam, f)| {
                    let s = cplx(f.nrows() as f64 / n as f64, 0.0);
                    (lam, f * s)
                })
                .collect();
            inverses
                .iter()
                .map(|&xi| {
                    scaled
                        .iter()
                        .map(|(lam, f)| trace_of_product(irr_n.get(*lam).matrix(xi), f))
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok((0..n)
        .map(|x| ParentMatrix {
            values: per_label.iter().map(|v| v[x]).collect(),
        })
        .collect())
}

/// `M^σ = Σ_n (M_n^σ ⊗ J)·σ(n)` evaluated densely, with `σ(n) = ⊕λ(n)` in
/// copy-major order.
pub fn reconstruct(
    parents: &[ParentMatrix],
    cd: &CliffordData,
    lab: &Labeling,
    irr_n: &IrrepSet,
) -> BlockDiagonal {
    let blocks = cd
        .sigma
        .iter()
        .enumerate()
        .map(|(sigma, sc)| {
            let orbit = &cd.orbits[sc.orbit];
            let width = orbit.len();
            let dim = sc.d * sc.e * width;
            let mut j_mat = CMatrix::zeros(sc.d, sc.d * width);
            for k in 0..width {
                for a in 0..sc.d {
                    j_mat[(a, k * sc.d + a)] = cplx(1.0, 0.0);
                }
            }
            let mut acc = CMatrix::zeros(dim, dim);
            for (x, p) in parents.iter().enumerate() {
                let mut rep = CMatrix::zeros(dim, dim);
                for j in 0..sc.e {
                    for (k, &lam) in orbit.iter().enumerate() {
                        let off = (j * width + k) * sc.d;
                        rep.view_mut((off, off), (sc.d, sc.d)).copy_from(irr_n.get(lam).matrix(x));
                    }
                }
                acc += kron(&p.sigma_matrix(lab, cd, sigma), &j_mat) * rep;
            }
            acc
        })
        .collect();
    BlockDiagonal { blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::{naive_dft, GroupAlgebraElement};
    use crate::group::{alternating, dihedral, normal_subgroups, special_linear2, symmetric, FiniteGroup};
    use crate::reductions::{build_labeling, build_target_format};
    use crate::repr::{clifford_data, compute_irreps, restriction_plan, IrrepOptions};
    use std::sync::Arc;

    struct Setup {
        irr_h: Arc<IrrepSet>,
        irr_n: Arc<IrrepSet>,
        cd: CliffordData,
        lab: Labeling,
    }

    fn setup(g: FiniteGroup, n_order: usize) -> Setup {
        let g = Arc::new(g);
        let irr = Arc::new(compute_irreps(&g, &IrrepOptions::default()).unwrap());
        let n = normal_subgroups(&g).into_iter().find(|s| s.order() == n_order).unwrap();
        let irr_n = Arc::new(compute_irreps(&Arc::new(n.to_group()), &IrrepOptions::default()).unwrap());
        let plan = restriction_plan(&irr, &n, &irr_n).unwrap().into_adapted().unwrap();
        let irr_h = Arc::clone(&plan.big);
        let cd = clifford_data(&n, &irr_h, &irr_n, &plan).unwrap();
        let fmt = build_target_format(cd.index).unwrap();
        let lab = build_labeling(&cd, &irr_h.dims(), &fmt).unwrap();
        Setup { irr_h, irr_n, cd, lab }
    }

    fn roundtrip(g: FiniteGroup, n_order: usize, seed: u64) -> f64 {
        let s = setup(g, n_order);
        let alpha = GroupAlgebraElement::random(s.irr_h.group(), seed);
        let m = naive_dft(&alpha, &s.irr_h, &OpCounter::new()).unwrap();
        let parents = sparse_rewrite(&m, &s.cd, &s.lab, &s.irr_n, &OpCounter::new()).unwrap();
        assert_eq!(parents.len(), n_order);
        reconstruct(&parents, &s.cd, &s.lab, &s.irr_n).max_block_residual(&m)
    }

    #[test]
    fn reconstructs_transforms() {
        assert!(roundtrip(symmetric(3).unwrap(), 3, 1) < 1e-8);
        assert!(roundtrip(dihedral(6).unwrap(), 6, 2) < 1e-8);
        assert!(roundtrip(alternating(4).unwrap(), 4, 3) < 1e-8);
        assert!(roundtrip(symmetric(4).unwrap(), 4, 4) < 1e-8);
        assert!(roundtrip(special_linear2(5).unwrap(), 2, 5) < 1e-8);
        assert!(roundtrip(alternating(5).unwrap(), 1, 6) < 1e-8);
    }

    #[test]
    fn trivial_normal_subgroup_is_free() {
        let s = setup(alternating(5).unwrap(), 1);
        let alpha = GroupAlgebraElement::random(s.irr_h.group(), 9);
        let m = naive_dft(&alpha, &s.irr_h, &OpCounter::new()).unwrap();
        let ops = OpCounter::new();
        let parents = sparse_rewrite(&m, &s.cd, &s.lab, &s.irr_n, &ops).unwrap();
        assert_eq!(ops.snapshot().total(), 0);
        // with N trivial the parent matrix is M itself, blockwise
        for (sigma, blk) in m.blocks.iter().enumerate() {
            assert_eq!(&parents[0].sigma_matrix(&s.lab, &s.cd, sigma), blk);
        }
    }

    #[test]
    fn shared_labels_hold_one_value() {
        let s = setup(dihedral(6).unwrap(), 6);
        let shared = s.lab.sources.iter().filter(|v| v.len() > 1).count();
        assert!(shared > 0);
        let alpha = GroupAlgebraElement::random(s.irr_h.group(), 11);
        let m = naive_dft(&alpha, &s.irr_h, &OpCounter::new()).unwrap();
        let parents = sparse_rewrite(&m, &s.cd, &s.lab, &s.irr_n, &OpCounter::new()).unwrap();
        for p in &parents {
            assert_eq!(p.values.len(), s.lab.occupied.len());
            let blocks = p.to_blocks(&s.lab);
            for (c, v) in s.lab.occupied.iter().zip(&p.values) {
                assert_eq!(blocks[c.level][c.block][(c.row, c.col)], *v);
            }
        }
    }
}
