//! Irrep constructions: explicit formulas for the named families, exact
//! characters for abelian groups, numeric splitting of the regular
//! representation otherwise.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{character_inner, compute_irreps, Irrep, IrrepOptions, IrrepSet, CHARACTER_TOL};
use crate::error::{GdftError, Result};
use crate::group::{Construction, FiniteGroup};
use crate::linalg::{cplx, kron, CMatrix, ONE, ZERO};

const RETRY_BUDGET: usize = 5;

pub(super) fn build(g: &Arc<FiniteGroup>, opts: &IrrepOptions) -> Result<IrrepSet> {
    let irreps = match g.construction() {
        Construction::Cyclic(n) => cyclic(*n),
        Construction::Dihedral(n) => dihedral(*n),
        Construction::Symmetric(n) if g.permutation(0).is_some() => symmetric(g, *n)?,
        Construction::DirectProduct(a, b) => {
            let ia = compute_irreps(a, opts)?;
            let ib = compute_irreps(b, opts)?;
            direct_product(&ia, &ib)
        }
        _ if g.is_abelian() => abelian(g),
        _ => return regular_splitting(g, opts.seed),
    };
    Ok(IrrepSet::from_unsorted(g, irreps))
}

fn scalar(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

fn root_of_unity(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

fn cyclic(n: usize) -> Vec<Irrep> {
    (0..n)
        .map(|j| Irrep::new(j, (0..n).map(|k| scalar(root_of_unity(j * k, n))).collect()))
        .collect()
}

/// Element `k + n·e` is `r^k s^e`.
fn dihedral(n: usize) -> Vec<Irrep> {
    let elems = |f: &dyn Fn(usize, usize) -> CMatrix| -> Vec<CMatrix> {
        (0..2 * n).map(|x| f(x % n, x / n)).collect()
    };
    let sign = |b: bool| if b { -ONE } else { ONE };
    let mut out = vec![
        Irrep::new(0, elems(&|_, _| scalar(ONE))),
        Irrep::new(0, elems(&|_, e| scalar(sign(e == 1)))),
    ];
    if n % 2 == 0 {
        out.push(Irrep::new(0, elems(&|k, _| scalar(sign(k % 2 == 1)))));
        out.push(Irrep::new(0, elems(&|k, e| scalar(sign((k + e) % 2 == 1)))));
    }
    for j in 1..n.div_ceil(2) {
        if 2 * j == n {
            continue;
        }
        out.push(Irrep::new(
            0,
            elems(&|k, e| {
                let t = 2.0 * PI * (j * k) as f64 / n as f64;
                let (c, s) = (t.cos(), t.sin());
                let f = if e == 1 { -1.0 } else { 1.0 };
                CMatrix::from_row_slice(2, 2, &[cplx(c, 0.0), cplx(-s * f, 0.0), cplx(s, 0.0), cplx(c * f, 0.0)])
            }),
        ));
    }
    out
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Standard Young tableaux of a shape, each as the (row, col) of entries `0..n`.
fn standard_tableaux(shape: &[usize]) -> Vec<Vec<(usize, usize)>> {
    fn rec(shape: &[usize], filled: &mut Vec<usize>, pos: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if pos.len() == shape.iter().sum::<usize>() {
            out.push(pos.clone());
            return;
        }
        for r in 0..shape.len() {
            let c = filled[r];
            if c < shape[r] && (r == 0 || filled[r - 1] > c) {
                filled[r] += 1;
                pos.push((r, c));
                rec(shape, filled, pos, out);
                pos.pop();
                filled[r] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(shape, &mut vec![0; shape.len()], &mut Vec::new(), &mut out);
    out
}

/// Young's orthogonal form on the adjacent transpositions, extended to the
/// whole group along a breadth-first spanning tree.
fn symmetric(g: &FiniteGroup, n: usize) -> Result<Vec<Irrep>> {
    let order = g.order();
    let index: HashMap<&[usize], usize> = (0..order).map(|x| (g.permutation(x).unwrap(), x)).collect();
    let degree = g.permutation(0).unwrap().len();
    let transpositions: Vec<usize> = (0..n.saturating_sub(1))
        .map(|k| {
            let mut p: Vec<usize> = (0..degree).collect();
            p.swap(k, k + 1);
            index
                .get(p.as_slice())
                .copied()
                .ok_or_else(|| GdftError::Numerical("adjacent transposition missing from symmetric group".into()))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for shape in partitions(n.max(1)) {
        let tabs = standard_tableaux(&shape);
        let d = tabs.len();
        let tab_index: HashMap<&Vec<(usize, usize)>, usize> = tabs.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let gens: Vec<CMatrix> = (0..transpositions.len())
            .map(|k| {
                let mut m = CMatrix::zeros(d, d);
                for (i, t) in tabs.iter().enumerate() {
                    let (a, b) = (t[k], t[k + 1]);
                    let r = (b.1 as f64 - b.0 as f64) - (a.1 as f64 - a.0 as f64);
                    m[(i, i)] = cplx(1.0 / r, 0.0);
                    let mut s = t.clone();
                    s.swap(k, k + 1);
                    if let Some(&j) = tab_index.get(&s) {
                        m[(j, i)] = cplx((1.0 - 1.0 / (r * r)).sqrt(), 0.0);
                    }
                }
                m
            })
            .collect();
        let mut mats: Vec<Option<CMatrix>> = vec![None; order];
        mats[0] = Some(CMatrix::identity(d, d));
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for (k, &s) in transpositions.iter().enumerate() {
                let y = g.mul(x, s);
                if mats[y].is_none() {
                    mats[y] = Some(mats[x].as_ref().unwrap() * &gens[k]);
                    queue.push(y);
                }
            }
        }
        let mats: Vec<CMatrix> = mats
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| GdftError::Numerical("adjacent transpositions do not generate".into()))?;
        out.push(Irrep::new(0, mats));
    }
    Ok(out)
}

fn direct_product(a: &IrrepSet, b: &IrrepSet) -> Vec<Irrep> {
    let na = a.group().order();
    let nb = b.group().order();
    let mut out = Vec::new();
    for ra in a.irreps() {
        for rb in b.irreps() {
            let mats = (0..na * nb).map(|x| kron(ra.matrix(x % na), rb.matrix(x / na))).collect();
            out.push(Irrep::new(0, mats));
        }
    }
    out
}

/// Exact characters of an abelian group, stored as exponents `a` with
/// `χ(x) = exp(2πi·a/|G|)`, extended one generator at a time.
fn abelian(g: &FiniteGroup) -> Vec<Irrep> {
    let n = g.order();
    // chars[c][x] for x in the current subgroup (None outside)
    let mut members = vec![0usize];
    let mut in_sub = vec![false; n];
    in_sub[0] = true;
    let mut chars: Vec<Vec<usize>> = vec![vec![0; n]];
    for s in g.generators() {
        if in_sub[s] {
            continue;
        }
        let mut m = 1;
        let mut p = s;
        while !in_sub[p] {
            p = g.mul(p, s);
            m += 1;
        }
        // p = s^m lies in the current subgroup
        let mut new_members = Vec::with_capacity(members.len() * m);
        let mut powers = vec![0usize; m];
        for j in 1..m {
            powers[j] = g.mul(powers[j - 1], s);
        }
        for &pw in &powers {
            for &h in &members {
                new_members.push(g.mul(h, pw));
            }
        }
        let mut new_chars = Vec::with_capacity(chars.len() * m);
        for chi in &chars {
            let a0 = chi[p];
            let b0 = (0..n).find(|&b| (m * b) % n == a0).expect("m-th root of a |G|-th root of unity");
            for t in 0..m {
                let b = (b0 + t * (n / m)) % n;
                let mut c = vec![0; n];
                for (j, &pw) in powers.iter().enumerate() {
                    for &h in &members {
                        c[g.mul(h, pw)] = (chi[h] + j * b) % n;
                    }
                }
                new_chars.push(c);
            }
        }
        for &x in &new_members {
            in_sub[x] = true;
        }
        members = new_members;
        chars = new_chars;
    }
    chars
        .into_iter()
        .map(|c| Irrep::new(0, c.into_iter().map(|a| scalar(root_of_unity(a, n))).collect()))
        .collect()
}

/// Splits the left regular representation with the eigenspaces of a random
/// Hermitian element of its commutant (a combination of right multiplications).
/// Each eigenspace carries one copy of an irrep; copies are deduplicated by character.
fn regular_splitting(g: &Arc<FiniteGroup>, seed: u64) -> Result<IrrepSet> {
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut last_err = None;
    for attempt in 0..RETRY_BUDGET {
        match split_once(g, &mut rng) {
            Ok(irreps) => return Ok(IrrepSet::from_unsorted(g, irreps)),
            Err(e) => {
                log::debug!("irrep splitting attempt {attempt} for {} failed: {e}", g.label());
                last_err = Some(e);
            }
        }
    }
    Err(GdftError::Numerical(format!(
        "irrep splitting for {} did not converge after {RETRY_BUDGET} attempts: {}",
        g.label(),
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn split_once(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Result<Vec<Irrep>> {
    let n = g.order();
    // A = Σ_c w_c R(c) with R(c) e_x = e_{x·c⁻¹} and w_{c⁻¹} = conj(w_c).
    let mut w = vec![ZERO; n];
    for c in 0..n {
        let ci = g.inv(c);
        if ci < c {
            continue;
        }
        let z = cplx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if ci == c {
            w[c] = cplx(z.re, 0.0);
        } else {
            w[c] = z;
            w[ci] = z.conj();
        }
    }
    let mut a = CMatrix::zeros(n, n);
    for x in 0..n {
        for c in 0..n {
            a[(g.mul(x, g.inv(c)), x)] += w[c];
        }
    }
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let same = 1e-9 * scale;
    let gap_min = 1e-6 * scale;
    let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
    for k in 1..n {
        let gap = vals[k] - vals[k - 1];
        if gap <= same {
            clusters.last_mut().unwrap().push(order[k]);
        } else if gap < gap_min {
            return Err(GdftError::Numerical(format!("near-degenerate eigenvalue gap {gap:.3e}")));
        } else {
            clusters.push(vec![order[k]]);
        }
    }
    let mut found: Vec<Irrep> = Vec::new();
    let mut total = 0;
    for cluster in clusters {
        let d = cluster.len();
        if d * d > n {
            return Err(GdftError::Numerical(format!("eigenspace of dimension {d} is too large")));
        }
        let mut q = CMatrix::zeros(n, d);
        for (c, &idx) in cluster.iter().enumerate() {
            q.set_column(c, &eig.eigenvectors.column(idx));
        }
        // ρ(x)_{ij} = Σ_y conj(Q[x·y, i]) Q[y, j]
        let chi_id = Complex64::from(d as f64);
        let mut chi = vec![ZERO; n];
        chi[0] = chi_id;
        for x in 1..n {
            chi[x] = (0..n)
                .map(|y| {
                    let xy = g.mul(x, y);
                    (0..d).map(|i| q[(xy, i)].conj() * q[(y, i)]).sum::<Complex64>()
                })
                .sum();
        }
        let norm = character_inner(&chi, &chi, g);
        if (norm.re - 1.0).abs() > CHARACTER_TOL {
            return Err(GdftError::Numerical(format!("eigenspace character norm {:.6}", norm.re)));
        }
        if found
            .iter()
            .any(|r| character_inner(r.character(), &chi, g).norm() > 0.5)
        {
            continue;
        }
        let qa = q.adjoint();
        let mats: Vec<CMatrix> = (0..n)
            .map(|x| {
                let mut lq = CMatrix::zeros(n, d);
                for y in 0..n {
                    lq.set_row(g.mul(x, y), &q.row(y));
                }
                &qa * lq
            })
            .collect();
        total += d * d;
        found.push(Irrep::new(0, mats));
        if total == n {
            break;
        }
    }
    if total != n {
        return Err(GdftError::Numerical(format!("found irreps with Σ dim² = {total} of {n}")));
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic as cyclic_group, direct_product as dp, group_from_generators};

    #[test]
    fn partitions_and_tableaux() {
        assert_eq!(partitions(4).len(), 5);
        let dims: Vec<usize> = partitions(5).iter().map(|p| standard_tableaux(p).len()).collect();
        assert_eq!(dims, vec![1, 4, 5, 6, 5, 4, 1]);
    }

    #[test]
    fn abelian_exact_characters() {
        let a = Arc::new(cyclic_group(4).unwrap());
        let b = Arc::new(cyclic_group(6).unwrap());
        let g = Arc::new(dp(&a, &b).unwrap().with_label("generic"));
        let set = IrrepSet::from_unsorted(&g, abelian(&g));
        set.validate().unwrap();
        assert_eq!(set.len(), 24);
    }

    #[test]
    fn splitting_of_permutation_groups() {
        // A4 given by permutations, no family information
        let g = Arc::new(group_from_generators(4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).unwrap());
        let set = regular_splitting(&g, 7).unwrap();
        set.validate().unwrap();
        assert_eq!(set.dims(), vec![1, 1, 1, 3]);
    }
}
