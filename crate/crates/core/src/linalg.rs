//! Dense complex matrices and the counted kernels used by every transform.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::counter::OpCounter;
use crate::error::{GdftError, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Classical product `a·b`, counted as `n·k·m` multiplications and
/// `n·(k−1)·m` additions.
pub fn matmul(a: &CMatrix, b: &CMatrix, ops: &OpCounter) -> CMatrix {
    debug_assert_eq!(a.ncols(), b.nrows());
    let (n, k, m) = (a.nrows() as u64, a.ncols() as u64, b.ncols() as u64);
    ops.record(n * k * m, n * k.saturating_sub(1) * m);
    a * b
}

/// `acc += b`, counted entrywise.
pub fn add_assign(acc: &mut CMatrix, b: &CMatrix, ops: &OpCounter) {
    debug_assert_eq!(acc.shape(), b.shape());
    ops.add((b.nrows() * b.ncols()) as u64);
    *acc += b;
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn is_identity(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && frobenius_diff(m, &identity(m.nrows())) <= tol
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Row-major vectorization: entry `(i, j)` goes to position `i·cols + j`.
pub fn vec_rows(m: &CMatrix) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec_rows`].
pub fn unvec_rows(v: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    assert_eq!(v.len(), rows * cols, "unvec: length {} != {rows}x{cols}", v.len());
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// `A·B·C` for shapes `n1×n2`, `n2×n3`, `n3×n4`, evaluated in whichever
/// association order needs fewer multiplications.
pub fn vec_kron_apply(a: &CMatrix, b: &CMatrix, c: &CMatrix, ops: &OpCounter) -> Result<CMatrix> {
    if a.ncols() != b.nrows() || b.ncols() != c.nrows() {
        return Err(GdftError::DimensionMismatch(format!(
            "cannot compose {}x{} · {}x{} · {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    let (n1, n2, n3, n4) = (a.nrows(), a.ncols(), b.ncols(), c.ncols());
    let left_first = n1 * n2 * n3 + n1 * n3 * n4;
    let right_first = n2 * n3 * n4 + n1 * n2 * n4;
    Ok(if left_first <= right_first {
        matmul(&matmul(a, b, ops), c, ops)
    } else {
        matmul(a, &matmul(b, c, ops), ops)
    })
}

/// The same product through `(A ⊗ Cᵀ)·vec(B)`, returned unvectorized.
pub fn kron_vec_product(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    if a.ncols() != b.nrows() || b.ncols() != c.nrows() {
        return Err(GdftError::DimensionMismatch("kron_vec_product shapes".into()));
    }
    let big = kron(a, &c.transpose());
    let v = CMatrix::from_column_slice(b.len(), 1, &vec_rows(b));
    let out = big * v;
    Ok(unvec_rows(out.as_slice(), a.nrows(), c.ncols()))
}

/// Multiplies a block-diagonal matrix (blocks placed at the given row/column
/// offsets, covering the whole diagonal) by a dense matrix, counting only the
/// nonzero block work.
pub fn block_diag_mul(blocks: &[(usize, &CMatrix)], dense: &CMatrix, ops: &OpCounter) -> CMatrix {
    let mut out = CMatrix::zeros(dense.nrows(), dense.ncols());
    for &(off, blk) in blocks {
        let d = blk.nrows();
        let rows = dense.rows(off, d).into_owned();
        let prod = matmul(blk, &rows, ops);
        out.rows_mut(off, d).copy_from(&prod);
    }
    out
}

/// Dense matrix times a block-diagonal one.
pub fn mul_block_diag(dense: &CMatrix, blocks: &[(usize, &CMatrix)], ops: &OpCounter) -> CMatrix {
    let mut out = CMatrix::zeros(dense.nrows(), dense.ncols());
    for &(off, blk) in blocks {
        let d = blk.nrows();
        let cols = dense.columns(off, d).into_owned();
        let prod = matmul(&cols, blk, ops);
        out.columns_mut(off, d).copy_from(&prod);
    }
    out
}

/// Orthonormal basis of the range of a Hermitian projector, columns ordered by
/// descending eigenvalue, each column phase-normalized so its first entry of
/// largest magnitude is real and positive.
pub fn projector_range(p: &CMatrix, rank: usize) -> Result<CMatrix> {
    let n = p.nrows();
    if rank == 0 {
        return Ok(CMatrix::zeros(n, 0));
    }
    let herm = (p + p.adjoint()) * cplx(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let top = eig.eigenvalues[order[rank - 1]];
    let next = if rank < n { eig.eigenvalues[order[rank]] } else { 0.0 };
    if (top - 1.0).abs() > 1e-6 || next.abs() > 1e-6 {
        return Err(GdftError::Numerical(format!(
            "projector spectrum not {{0,1}} with rank {rank}: λ_r = {top:.3e}, λ_r+1 = {next:.3e}"
        )));
    }
    let mut out = CMatrix::zeros(n, rank);
    for (c, &idx) in order[..rank].iter().enumerate() {
        let mut col = eig.eigenvectors.column(idx).into_owned();
        normalize_phase(col.as_mut_slice());
        out.set_column(c, &col);
    }
    Ok(out)
}

/// Rotates a vector so that its first entry of (near-)maximal modulus is real positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied().unwrap();
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}
