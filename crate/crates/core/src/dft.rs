//! Group algebra elements, block-diagonal transforms, and the direct
//! (`O(|G|²)`) transform used as the reference oracle.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counter::OpCounter;
use crate::error::{GdftError, Result};
use crate::group::FiniteGroup;
use crate::linalg::{cplx, frobenius_diff, matmul, CMatrix, ZERO};
use crate::repr::IrrepSet;

/// `α = Σ_g α_g g ∈ C[G]`.
#[derive(Debug, Clone)]
pub struct GroupAlgebraElement {
    group: Arc<FiniteGroup>,
    coeffs: Vec<Complex64>,
    support: Option<Vec<usize>>,
}

impl GroupAlgebraElement {
    pub fn new(group: &Arc<FiniteGroup>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(GdftError::DimensionMismatch(format!(
                "{} coefficients for a group of order {}",
                coeffs.len(),
                group.order()
            )));
        }
        Ok(GroupAlgebraElement {
            group: Arc::clone(group),
            coeffs,
            support: None,
        })
    }

    pub fn zero(group: &Arc<FiniteGroup>) -> Self {
        GroupAlgebraElement {
            group: Arc::clone(group),
            coeffs: vec![ZERO; group.order()],
            support: Some(Vec::new()),
        }
    }

    pub fn delta(group: &Arc<FiniteGroup>, g: usize) -> Self {
        let mut a = Self::zero(group);
        a.coeffs[g] = cplx(1.0, 0.0);
        a.support = Some(vec![g]);
        a
    }

    /// Coefficients with real and imaginary parts uniform on `[−1, 1]`.
    pub fn random(group: &Arc<FiniteGroup>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..group.order())
            .map(|_| cplx(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        GroupAlgebraElement {
            group: Arc::clone(group),
            coeffs,
            support: None,
        }
    }

    /// Random coefficients on the given elements, zero elsewhere.
    pub fn random_on(group: &Arc<FiniteGroup>, elements: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Self::zero(group);
        for &g in elements {
            a.coeffs[g] = cplx(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        }
        a.with_support()
    }

    /// Records the support (indices of nonzero coefficients).
    pub fn with_support(mut self) -> Self {
        self.support = Some((0..self.coeffs.len()).filter(|&g| self.coeffs[g] != ZERO).collect());
        self
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> Complex64 {
        self.coeffs[g]
    }

    pub fn support(&self) -> Option<&[usize]> {
        self.support.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        match &self.support {
            Some(s) => s.is_empty(),
            None => self.coeffs.iter().all(|&z| z == ZERO),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    pub fn max_abs_diff(&self, other: &GroupAlgebraElement) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// One square block per irrep, in the irrep set's order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonal {
    pub blocks: Vec<CMatrix>,
}

impl BlockDiagonal {
    pub fn zeros(dims: &[usize]) -> Self {
        BlockDiagonal {
            blocks: dims.iter().map(|&d| CMatrix::zeros(d, d)).collect(),
        }
    }

    pub fn identity(dims: &[usize]) -> Self {
        BlockDiagonal {
            blocks: dims.iter().map(|&d| CMatrix::identity(d, d)).collect(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn entry_count(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Largest per-block Frobenius distance.
    pub fn max_block_residual(&self, other: &BlockDiagonal) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| if a.shape() == b.shape() { frobenius_diff(a, b) } else { f64::INFINITY })
            .fold(if self.blocks.len() == other.blocks.len() { 0.0 } else { f64::INFINITY }, f64::max)
    }

    /// Blockwise product, counted.
    pub fn mul(&self, other: &BlockDiagonal, ops: &OpCounter) -> BlockDiagonal {
        BlockDiagonal {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| matmul(a, b, ops)).collect(),
        }
    }

    pub fn check_dims(&self, irreps: &IrrepSet) -> Result<()> {
        if self.dims() != irreps.dims() {
            return Err(GdftError::DimensionMismatch(format!(
                "block dims {:?} do not match irreps {:?}",
                self.dims(),
                irreps.dims()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self, group: &FiniteGroup) -> BlockDiagonalJson {
        BlockDiagonalJson {
            group: group.label().to_string(),
            order: group.order(),
            blocks: self
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| BlockJson {
                    irrep: i,
                    dim: b.nrows(),
                    data: b.transpose().iter().map(|z| [z.re, z.im]).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &BlockDiagonalJson) -> Result<Self> {
        let blocks = j
            .blocks
            .iter()
            .map(|b| {
                if b.data.len() != b.dim * b.dim {
                    return Err(GdftError::Parse(format!("block {} has {} entries, expected {}", b.irrep, b.data.len(), b.dim * b.dim)));
                }
                Ok(CMatrix::from_row_iterator(b.dim, b.dim, b.data.iter().map(|&[re, im]| cplx(re, im))))
            })
            .collect::<Result<_>>()?;
        Ok(BlockDiagonal { blocks })
    }
}

/// Serialized form: one entry per irrep, data row-major as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDiagonalJson {
    pub group: String,
    pub order: usize,
    pub blocks: Vec<BlockJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockJson {
    pub irrep: usize,
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

fn check_group(alpha: &GroupAlgebraElement, irreps: &IrrepSet) -> Result<()> {
    if alpha.coeffs.len() != irreps.group().order() {
        return Err(GdftError::DimensionMismatch(format!(
            "element of length {} for irreps of a group of order {}",
            alpha.coeffs.len(),
            irreps.group().order()
        )));
    }
    Ok(())
}

/// `M^ρ = Σ_g α_g ρ(g)` for every irrep.
///
/// Counts one multiplication per term and entry and one addition per
/// additional term and entry; zero coefficients are skipped when the support
/// is known. The trivial group is a free copy.
pub fn naive_dft(alpha: &GroupAlgebraElement, irreps: &IrrepSet, ops: &OpCounter) -> Result<BlockDiagonal> {
    check_group(alpha, irreps)?;
    let n = alpha.coeffs.len();
    if n == 1 {
        return Ok(BlockDiagonal {
            blocks: vec![CMatrix::from_element(1, 1, alpha.coeffs[0])],
        });
    }
    let terms: Vec<usize> = match &alpha.support {
        Some(s) => s.clone(),
        None => (0..n).collect(),
    };
    let entries: u64 = irreps.sum_dim_squares() as u64;
    let t = terms.len() as u64;
    ops.record(t * entries, t.saturating_sub(1) * entries);
    let blocks = irreps
        .irreps()
        .iter()
        .map(|rho| {
            let d = rho.dim();
            let mut acc = CMatrix::zeros(d, d);
            for &g in &terms {
                acc += rho.matrix(g) * alpha.coeffs[g];
            }
            acc
        })
        .collect();
    Ok(BlockDiagonal { blocks })
}

/// Fourier inversion: `α_g = (1/|G|) Σ_ρ dim(ρ)·tr(ρ(g⁻¹) M^ρ)`.
pub fn inverse_dft(m: &BlockDiagonal, irreps: &IrrepSet, ops: &OpCounter) -> Result<GroupAlgebraElement> {
    m.check_dims(irreps)?;
    let g = irreps.group();
    let n = g.order();
    if n == 1 {
        return GroupAlgebraElement::new(g, vec![m.blocks[0][(0, 0)]]);
    }
    // pre-scale each block by dim/|G|
    let scaled: Vec<CMatrix> = m
        .blocks
        .iter()
        .map(|b| b * cplx(b.nrows() as f64 / n as f64, 0.0))
        .collect();
    let entries = irreps.sum_dim_squares() as u64;
    ops.mul(entries);
    ops.record(n as u64 * entries, n as u64 * (entries - 1));
    let coeffs = (0..n)
        .map(|x| {
            let xi = g.inv(x);
            irreps
                .irreps()
                .iter()
                .zip(&scaled)
                .map(|(rho, b)| trace_of_product(rho.matrix(xi), b))
                .sum()
        })
        .collect();
    GroupAlgebraElement::new(g, coeffs)
}

/// `tr(A·B)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let d = a.nrows();
    let mut s = ZERO;
    for i in 0..d {
        for k in 0..d {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// `(α * β)_g = Σ_h α_h β_{h⁻¹g}`.
pub fn convolve(a: &GroupAlgebraElement, b: &GroupAlgebraElement, ops: &OpCounter) -> Result<GroupAlgebraElement> {
    if !Arc::ptr_eq(&a.group, &b.group) && a.group.table_hash() != b.group.table_hash() {
        return Err(GdftError::GroupMismatch(format!("{} vs {}", a.group.label(), b.group.label())));
    }
    let g = &a.group;
    let n = g.order();
    let mut out = vec![ZERO; n];
    let mut terms = 0u64;
    for h in 0..n {
        if a.coeffs[h] == ZERO {
            continue;
        }
        for k in 0..n {
            if b.coeffs[k] == ZERO {
                continue;
            }
            out[g.mul(h, k)] += a.coeffs[h] * b.coeffs[k];
            terms += 1;
        }
    }
    ops.record(terms, terms);
    GroupAlgebraElement::new(g, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral, quaternion8, symmetric};
    use crate::repr::{compute_irreps, IrrepOptions};

    fn setup(g: FiniteGroup) -> (Arc<FiniteGroup>, IrrepSet) {
        let g = Arc::new(g);
        let irr = compute_irreps(&g, &IrrepOptions::default()).unwrap();
        (g, irr)
    }

    #[test]
    fn c2_deltas() {
        let (g, irr) = setup(cyclic(2).unwrap());
        let ops = OpCounter::new();
        let m = naive_dft(&GroupAlgebraElement::delta(&g, 0), &irr, &ops).unwrap();
        assert_eq!(m.blocks, vec![CMatrix::identity(1, 1); 2]);
        let m = naive_dft(&GroupAlgebraElement::delta(&g, 1), &irr, &ops).unwrap();
        assert!((m.blocks[0][(0, 0)] - 1.0).norm() < 1e-15);
        assert!((m.blocks[1][(0, 0)] + 1.0).norm() < 1e-15);
    }

    #[test]
    fn matches_reverse_order_summation() {
        let (g, irr) = setup(symmetric(3).unwrap());
        let a = GroupAlgebraElement::random(&g, 11);
        let m = naive_dft(&a, &irr, &OpCounter::new()).unwrap();
        for (rho, blk) in irr.irreps().iter().zip(&m.blocks) {
            let d = rho.dim();
            for i in 0..d {
                for j in 0..d {
                    let mut s = ZERO;
                    for x in (0..6).rev() {
                        s += a.coeff(x) * rho.matrix(x)[(i, j)];
                    }
                    assert!((s - blk[(i, j)]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn support_skips_zeros() {
        let (g, irr) = setup(dihedral(4).unwrap());
        let ops = OpCounter::new();
        let a = GroupAlgebraElement::random_on(&g, &[1, 5], 3);
        let full = GroupAlgebraElement::new(&g, a.coeffs().to_vec()).unwrap();
        let m1 = naive_dft(&a, &irr, &ops).unwrap();
        assert_eq!(ops.mults(), 2 * 8);
        let m2 = naive_dft(&full, &irr, &OpCounter::new()).unwrap();
        assert!(m1.max_block_residual(&m2) < 1e-14);
    }

    #[test]
    fn op_count_sanity_bound() {
        let (g, irr) = setup(quaternion8().unwrap());
        let ops = OpCounter::new();
        naive_dft(&GroupAlgebraElement::random(&g, 1), &irr, &ops).unwrap();
        assert!(ops.snapshot().total() <= 8 * 8 * 8 + 8);
    }

    #[test]
    fn inverse_examples() {
        let (g, irr) = setup(symmetric(4).unwrap());
        let id = inverse_dft(&BlockDiagonal::identity(&irr.dims()), &irr, &OpCounter::new()).unwrap();
        assert!(id.max_abs_diff(&GroupAlgebraElement::delta(&g, 0)) < 1e-12);

        let (g, irr) = setup(cyclic(3).unwrap());
        // blocks (0, 1, 0) on the canonical order (trivial, ω-type, ω²-type)
        let m = BlockDiagonal {
            blocks: vec![CMatrix::zeros(1, 1), CMatrix::identity(1, 1), CMatrix::zeros(1, 1)],
        };
        let a = inverse_dft(&m, &irr, &OpCounter::new()).unwrap();
        for x in 0..3 {
            let expected = irr.get(1).matrix(g.inv(x))[(0, 0)] / 3.0;
            assert!((a.coeff(x) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn convolution_deltas() {
        let (g, _) = setup(symmetric(3).unwrap());
        let ops = OpCounter::new();
        let b = GroupAlgebraElement::random(&g, 4);
        let c = convolve(&GroupAlgebraElement::delta(&g, 0), &b, &ops).unwrap();
        assert!(c.max_abs_diff(&b) < 1e-15);
        for x in 0..6 {
            for y in 0..6 {
                let c = convolve(&GroupAlgebraElement::delta(&g, x), &GroupAlgebraElement::delta(&g, y), &ops).unwrap();
                assert!(c.max_abs_diff(&GroupAlgebraElement::delta(&g, g.mul(x, y))) < 1e-15);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let (g, irr) = setup(dihedral(5).unwrap());
        let m = naive_dft(&GroupAlgebraElement::random(&g, 2), &irr, &OpCounter::new()).unwrap();
        let s = serde_json::to_string(&m.to_json(&g)).unwrap();
        let back = BlockDiagonal::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
