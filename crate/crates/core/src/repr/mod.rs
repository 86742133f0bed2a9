//! Unitary irreducible representations, adapted bases and Clifford data.
//!
//! Every [`IrrepSet`] is sorted canonically: by dimension, then by the
//! character table row (values compared per element with real part and then
//! imaginary part in decreasing order, quantized to `1e-6`). The trivial
//! representation is therefore always irrep `0`.

mod cache;
mod clifford;
mod construct;
mod restriction;

use std::cmp::Ordering;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GdftError, Result};
use crate::group::FiniteGroup;
use crate::linalg::{frobenius_diff, is_identity, CMatrix};

pub use clifford::{clifford_data, CliffordData, SigmaClifford};
pub use restriction::{irrep_equivalence, restriction_plan, BlockPlan, LayoutEntry, RestrictionPlan};

/// Residual allowed when validating constructed irreps, per unit of dimension.
pub const CONSTRUCTION_TOL: f64 = 1e-9;
/// Tolerance on character inner products.
pub const CHARACTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Irrep {
    id: usize,
    dim: usize,
    matrices: Vec<CMatrix>,
    character: Vec<Complex64>,
}

impl Irrep {
    pub fn new(id: usize, matrices: Vec<CMatrix>) -> Self {
        let dim = matrices.first().map_or(0, |m| m.nrows());
        let character = matrices.iter().map(|m| m.trace()).collect();
        Irrep {
            id,
            dim,
            matrices,
            character,
        }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn character(&self) -> &[Complex64] {
        &self.character
    }

    /// Checks homomorphism and unitarity (all pairs up to order 128, a seeded
    /// sample of 20 000 pairs above) and irreducibility.
    pub fn validate(&self, g: &FiniteGroup, tol: f64) -> Result<()> {
        let n = g.order();
        if self.matrices.len() != n {
            return Err(GdftError::DimensionMismatch(format!(
                "irrep {} has {} matrices for a group of order {n}",
                self.id,
                self.matrices.len()
            )));
        }
        let bound = tol * self.dim as f64;
        let fail = |what: String| Err(GdftError::Numerical(format!("irrep {} of {}: {what}", self.id, g.label())));
        for (x, m) in self.matrices.iter().enumerate() {
            let r = frobenius_diff(&(m * m.adjoint()), &CMatrix::identity(self.dim, self.dim));
            if r > bound {
                return fail(format!("unitarity residual {r:.3e} at element {x}"));
            }
        }
        let check = |a: usize, b: usize| frobenius_diff(&(&self.matrices[a] * &self.matrices[b]), &self.matrices[g.mul(a, b)]);
        if n <= 128 {
            for a in 0..n {
                for b in 0..n {
                    let r = check(a, b);
                    if r > bound {
                        return fail(format!("homomorphism residual {r:.3e} at ({a}, {b})"));
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x1EE7);
            for _ in 0..20_000 {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let r = check(a, b);
                if r > bound {
                    return fail(format!("homomorphism residual {r:.3e} at ({a}, {b})"));
                }
            }
        }
        let norm = character_inner(&self.character, &self.character, g);
        if (norm.re - 1.0).abs() > CHARACTER_TOL || norm.im.abs() > CHARACTER_TOL {
            return fail(format!("character norm {norm} is not 1"));
        }
        Ok(())
    }
}

/// Normalized inner product `(1/|G|) Σ_g χ(g) conj(ψ(g))`.
pub fn character_inner(chi: &[Complex64], psi: &[Complex64], g: &FiniteGroup) -> Complex64 {
    chi.iter().zip(psi).map(|(a, b)| a * b.conj()).sum::<Complex64>() / g.order() as f64
}

fn character_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    let q = |x: f64| (x * 1e6).round() as i64;
    for (x, y) in a.iter().zip(b) {
        let o = q(y.re).cmp(&q(x.re)).then_with(|| q(y.im).cmp(&q(x.im)));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// A complete set of pairwise inequivalent unitary irreps.
#[derive(Debug, Clone)]
pub struct IrrepSet {
    group: Arc<FiniteGroup>,
    irreps: Vec<Irrep>,
}

impl IrrepSet {
    /// Sorts irreps canonically and assigns ids.
    pub fn from_unsorted(group: &Arc<FiniteGroup>, mut irreps: Vec<Irrep>) -> Self {
        irreps.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| character_cmp(&a.character, &b.character)));
        for (i, r) in irreps.iter_mut().enumerate() {
            r.id = i;
        }
        IrrepSet {
            group: Arc::clone(group),
            irreps,
        }
    }

    /// Keeps the given order; ids are positions.
    pub(crate) fn from_ordered(group: &Arc<FiniteGroup>, mut irreps: Vec<Irrep>) -> Self {
        for (i, r) in irreps.iter_mut().enumerate() {
            r.id = i;
        }
        IrrepSet {
            group: Arc::clone(group),
            irreps,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn get(&self, id: usize) -> &Irrep {
        &self.irreps[id]
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }

    pub fn sum_dim_squares(&self) -> usize {
        self.irreps.iter().map(|r| r.dim * r.dim).sum()
    }

    /// Id of the irrep with the given character, if any.
    pub fn find_by_character(&self, chi: &[Complex64]) -> Option<usize> {
        self.irreps.iter().position(|r| {
            r.character
                .iter()
                .zip(chi)
                .all(|(a, b)| (a - b).norm() <= 1e-6)
        })
    }

    /// Every irrep invariant plus completeness and pairwise inequivalence.
    pub fn validate(&self) -> Result<()> {
        let g = &self.group;
        if self.sum_dim_squares() != g.order() {
            return Err(GdftError::Numerical(format!(
                "{}: Σ dim² = {} ≠ {}",
                g.label(),
                self.sum_dim_squares(),
                g.order()
            )));
        }
        for r in &self.irreps {
            r.validate(g, CONSTRUCTION_TOL)?;
        }
        for (i, a) in self.irreps.iter().enumerate() {
            for b in &self.irreps[..i] {
                let ip = character_inner(&a.character, &b.character, g).norm();
                if ip > CHARACTER_TOL {
                    return Err(GdftError::Numerical(format!(
                        "{}: irreps {} and {} are not orthogonal ({ip:.3e})",
                        g.label(),
                        a.id,
                        b.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same irreps conjugated by per-irrep unitaries: `ρ'(g) = U ρ(g) U*`.
    pub fn conjugated(&self, unitaries: &[CMatrix]) -> IrrepSet {
        let irreps = self
            .irreps
            .iter()
            .zip(unitaries)
            .map(|(r, u)| {
                if is_identity(u, 0.0) {
                    return r.clone();
                }
                let ud = u.adjoint();
                let mut out = Irrep::new(r.id, r.matrices.iter().map(|m| u * m * &ud).collect());
                // keep the exact character of the source
                out.character = r.character.clone();
                out
            })
            .collect();
        IrrepSet {
            group: Arc::clone(&self.group),
            irreps,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IrrepOptions {
    /// Seed for the numeric splitting of the regular representation.
    pub seed: u64,
    /// Directory for the JSON irrep cache.
    pub cache_dir: Option<PathBuf>,
}

impl Default for IrrepOptions {
    fn default() -> Self {
        IrrepOptions {
            seed: 0x5EED,
            cache_dir: None,
        }
    }
}

impl IrrepOptions {
    /// Defaults, with the cache directory taken from `GDFT_CACHE_DIR`.
    pub fn from_env() -> Self {
        IrrepOptions {
            cache_dir: std::env::var_os("GDFT_CACHE_DIR").map(PathBuf::from),
            ..Default::default()
        }
    }
}

/// Builds and validates a complete irrep set for `g`.
pub fn compute_irreps(g: &Arc<FiniteGroup>, opts: &IrrepOptions) -> Result<IrrepSet> {
    if let Some(dir) = &opts.cache_dir {
        if let Some(set) = cache::load(dir, g)? {
            return Ok(set);
        }
    }
    let set = construct::build(g, opts)?;
    set.validate()?;
    if let Some(dir) = &opts.cache_dir {
        cache::store(dir, &set)?;
    }
    Ok(set)
}

pub use cache::{load as load_cached, store as store_cached};
