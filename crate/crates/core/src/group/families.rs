//! Group constructors: permutation closure and the named families.
//!
//! Canonical element orders:
//! * permutation groups: breadth-first order from the identity, multiplying
//!   on the right by the generators in the order given;
//! * `cyclic(n)`: index `k` is `g^k`;
//! * `dihedral(n)` (order `2n`): index `k + n·e` is `r^k s^e` with `s r s = r⁻¹`;
//! * `quaternion8`: `1, −1, i, −i, j, −j, k, −k`;
//! * `heisenberg(p)`: index `a + p·b + p²·c` is the matrix `[[1,a,c],[0,1,b],[0,0,1]]` over `F_p`;
//! * `direct_product(A, B)`: index `a + |A|·b` is `(a, b)`;
//! * `symmetric`, `alternating`, `special_linear2`: permutation groups (BFS order).

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Construction, FiniteGroup, DEFAULT_ORDER_CAP};
use crate::error::{GdftError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cyclic,
    Dihedral,
    Symmetric,
    Alternating,
    Quaternion8,
    HeisenbergP,
    DirectProduct,
    #[serde(rename = "sl2")]
    SpecialLinear2,
}

impl FromStr for Family {
    type Err = GdftError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cyclic" => Family::Cyclic,
            "dihedral" => Family::Dihedral,
            "symmetric" => Family::Symmetric,
            "alternating" => Family::Alternating,
            "quaternion8" => Family::Quaternion8,
            "heisenberg_p" | "heisenberg" => Family::HeisenbergP,
            "direct_product" => Family::DirectProduct,
            "sl2" | "special_linear2" => Family::SpecialLinear2,
            other => return Err(GdftError::UnknownFamily(other.to_string())),
        })
    }
}

pub fn group_from_generators(degree: usize, generators: &[Vec<usize>]) -> Result<FiniteGroup> {
    group_from_generators_capped(degree, generators, DEFAULT_ORDER_CAP)
}

/// Closes a set of permutations of `{0..degree−1}` under composition.
pub fn group_from_generators_capped(degree: usize, generators: &[Vec<usize>], cap: usize) -> Result<FiniteGroup> {
    for (i, g) in generators.iter().enumerate() {
        if g.len() != degree {
            return Err(GdftError::InvalidPermutation(format!(
                "generator {i} has length {}, expected {degree}",
                g.len()
            )));
        }
        let mut seen = vec![false; degree];
        for &x in g {
            if x >= degree || std::mem::replace(&mut seen[x], true) {
                return Err(GdftError::InvalidPermutation(format!("generator {i} is not a bijection")));
            }
        }
    }
    let identity: Vec<usize> = (0..degree).collect();
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
    let mut parent: Vec<(usize, usize)> = vec![(0, 0)];
    // right[s][x] = index of x·s
    let mut right: Vec<Vec<u32>> = vec![Vec::new(); generators.len()];
    let mut head = 0;
    while head < elements.len() {
        let x = elements[head].clone();
        for (si, s) in generators.iter().enumerate() {
            let y: Vec<usize> = (0..degree).map(|p| x[s[p]]).collect();
            let yi = match index.get(&y) {
                Some(&i) => i,
                None => {
                    let i = elements.len();
                    if i >= cap {
                        return Err(GdftError::GroupTooLarge { order: i + 1, cap });
                    }
                    index.insert(y.clone(), i);
                    elements.push(y);
                    parent.push((head, si));
                    i
                }
            };
            right[si].push(yi as u32);
        }
        head += 1;
    }
    let n = elements.len();
    let mut mult = vec![0u32; n * n];
    for a in 0..n {
        mult[a * n] = a as u32;
        for b in 1..n {
            let (p, s) = parent[b];
            let ap = mult[a * n + p] as usize;
            mult[a * n + b] = right[s][ap];
        }
    }
    FiniteGroup::from_flat(
        n,
        mult,
        format!("Perm({degree}; order {n})"),
        Construction::Generic,
        Some(Arc::new(elements)),
    )
}

pub fn group_from_named_family(family: Family, parameter: i64) -> Result<FiniteGroup> {
    let bad = || GdftError::BadParameter {
        family: format!("{family:?}"),
        param: parameter,
    };
    let n = usize::try_from(parameter).map_err(|_| bad())?;
    match family {
        Family::Cyclic if (1..=DEFAULT_ORDER_CAP).contains(&n) => cyclic(n),
        Family::Dihedral if n >= 1 && 2 * n <= DEFAULT_ORDER_CAP => dihedral(n),
        Family::Symmetric if (1..=6).contains(&n) => symmetric(n),
        Family::Alternating if (1..=7).contains(&n) => alternating(n),
        Family::Quaternion8 if n == 8 || n == 0 => quaternion8(),
        Family::HeisenbergP if is_prime(n) && n.pow(3) <= DEFAULT_ORDER_CAP => heisenberg(n),
        Family::SpecialLinear2 if is_prime(n) && n * (n * n - 1) <= DEFAULT_ORDER_CAP => special_linear2(n),
        _ => Err(bad()),
    }
}

pub(crate) fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn table_group(n: usize, label: String, construction: Construction, f: impl Fn(usize, usize) -> usize) -> Result<FiniteGroup> {
    let mut mult = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            mult.push(f(a, b) as u32);
        }
    }
    FiniteGroup::from_flat(n, mult, label, construction, None)
}

pub fn cyclic(n: usize) -> Result<FiniteGroup> {
    table_group(n, format!("C{n}"), Construction::Cyclic(n), |a, b| (a + b) % n)
}

pub fn dihedral(n: usize) -> Result<FiniteGroup> {
    table_group(2 * n, format!("D{n}"), Construction::Dihedral(n), |x, y| {
        let (a, e) = (x % n, x / n);
        let (b, f) = (y % n, y / n);
        let k = if e == 0 { (a + b) % n } else { (a + n - b) % n };
        k + n * ((e + f) % 2)
    })
}

pub fn quaternion8() -> Result<FiniteGroup> {
    // units 1, i, j, k as 0..4; u·v = sign · unit
    const UNIT: [[(u8, usize); 4]; 4] = [
        [(0, 0), (0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 0), (0, 3), (1, 2)],
        [(0, 2), (1, 3), (1, 0), (0, 1)],
        [(0, 3), (0, 2), (1, 1), (1, 0)],
    ];
    table_group(8, "Q8".into(), Construction::Quaternion8, |x, y| {
        let (su, u) = (x % 2, x / 2);
        let (sv, v) = (y % 2, y / 2);
        let (s, w) = UNIT[u][v];
        2 * w + ((su + sv + s as usize) % 2)
    })
}

pub fn heisenberg(p: usize) -> Result<FiniteGroup> {
    table_group(p * p * p, format!("Heis({p})"), Construction::Heisenberg(p), |x, y| {
        let (a, b, c) = (x % p, (x / p) % p, x / (p * p));
        let (a2, b2, c2) = (y % p, (y / p) % p, y / (p * p));
        let na = (a + a2) % p;
        let nb = (b + b2) % p;
        let nc = (c + c2 + a * b2) % p;
        na + p * nb + p * p * nc
    })
}

fn cycle(degree: usize, points: &[usize]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..degree).collect();
    for w in 0..points.len() {
        p[points[w]] = points[(w + 1) % points.len()];
    }
    p
}

pub fn symmetric(n: usize) -> Result<FiniteGroup> {
    let gens: Vec<Vec<usize>> = match n {
        0 | 1 => vec![(0..n.max(1)).collect()],
        2 => vec![cycle(2, &[0, 1])],
        _ => vec![cycle(n, &(0..n).collect::<Vec<_>>()), cycle(n, &[0, 1])],
    };
    Ok(group_from_generators(n.max(1), &gens)?
        .with_label(format!("S{n}"))
        .with_construction(Construction::Symmetric(n)))
}

pub fn alternating(n: usize) -> Result<FiniteGroup> {
    let gens: Vec<Vec<usize>> = match n {
        0..=2 => vec![(0..n.max(1)).collect()],
        3 => vec![cycle(3, &[0, 1, 2])],
        _ if n % 2 == 1 => vec![cycle(n, &(0..n).collect::<Vec<_>>()), cycle(n, &[0, 1, 2])],
        _ => vec![cycle(n, &[0, 1, 2]), cycle(n, &(1..n).collect::<Vec<_>>())],
    };
    Ok(group_from_generators(n.max(1), &gens)?
        .with_label(format!("A{n}"))
        .with_construction(Construction::Alternating(n)))
}

/// `SL(2, p)` acting on the `p² − 1` nonzero vectors of `F_p²`; point
/// `(x, y)` has index `x + p·y − 1`.
pub fn special_linear2(p: usize) -> Result<FiniteGroup> {
    let act = |m: [[usize; 2]; 2]| -> Vec<usize> {
        (1..p * p)
            .map(|v| {
                let (x, y) = (v % p, v / p);
                let nx = (m[0][0] * x + m[0][1] * y) % p;
                let ny = (m[1][0] * x + m[1][1] * y) % p;
                nx + p * ny - 1
            })
            .collect()
    };
    let gens = vec![act([[1, 1], [0, 1]]), act([[0, p - 1], [1, 0]])];
    Ok(group_from_generators(p * p - 1, &gens)?
        .with_label(format!("SL(2,{p})"))
        .with_construction(Construction::SpecialLinear2(p)))
}

pub fn direct_product(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    if na * nb > DEFAULT_ORDER_CAP {
        return Err(GdftError::GroupTooLarge {
            order: na * nb,
            cap: DEFAULT_ORDER_CAP,
        });
    }
    table_group(
        na * nb,
        format!("{}x{}", a.label(), b.label()),
        Construction::DirectProduct(Arc::clone(a), Arc::clone(b)),
        |x, y| a.mul(x % na, y % na) + na * b.mul(x / na, y / na),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_closure_order(degree: usize, gens: &[Vec<usize>]) -> usize {
        // independent oracle: saturate a set under composition with all members
        let mut set: std::collections::BTreeSet<Vec<usize>> = gens.iter().cloned().collect();
        set.insert((0..degree).collect());
        loop {
            let items: Vec<_> = set.iter().cloned().collect();
            let before = set.len();
            for a in &items {
                for b in &items {
                    set.insert((0..degree).map(|p| a[b[p]]).collect());
                }
            }
            if set.len() == before {
                return before;
            }
        }
    }

    #[test]
    fn s3_from_generators() {
        let g = group_from_generators(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn a5_from_generators() {
        let gens = vec![vec![1, 2, 3, 4, 0], vec![1, 2, 0, 3, 4]];
        let g = group_from_generators(5, &gens).unwrap();
        assert_eq!(g.order(), 60);
        assert_eq!(brute_closure_order(5, &gens), 60);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn trivial_from_identity() {
        let g = group_from_generators(2, &[vec![0, 1]]).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn cap_enforced() {
        let err = group_from_generators_capped(5, &[vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]], 50).unwrap_err();
        assert!(matches!(err, GdftError::GroupTooLarge { .. }));
    }

    #[test]
    fn invalid_generator_rejected() {
        assert!(matches!(
            group_from_generators(3, &[vec![0, 0, 1]]),
            Err(GdftError::InvalidPermutation(_))
        ));
    }

    #[test]
    fn permutation_table_is_composition() {
        let g = symmetric(4).unwrap();
        for a in 0..g.order() {
            for b in 0..g.order() {
                let (pa, pb) = (g.permutation(a).unwrap(), g.permutation(b).unwrap());
                let comp: Vec<usize> = (0..4).map(|x| pa[pb[x]]).collect();
                assert_eq!(g.permutation(g.mul(a, b)).unwrap(), comp.as_slice());
            }
        }
    }

    #[test]
    fn named_families() {
        let c8 = group_from_named_family(Family::Cyclic, 8).unwrap();
        assert_eq!(c8.order(), 8);
        assert!(c8.is_abelian());
        assert_eq!(group_from_named_family(Family::Dihedral, 6).unwrap().order(), 12);
        let h = group_from_named_family(Family::HeisenbergP, 3).unwrap();
        assert_eq!(h.order(), 27);
        assert!(h.validate().is_ok());
        assert!(!h.is_abelian());
        let q = quaternion8().unwrap();
        assert!(q.validate().is_ok());
        assert_eq!((0..8).filter(|&x| q.element_order(x) == 4).count(), 6);
        for n in 1..=6 {
            let s = symmetric(n).unwrap();
            assert_eq!(s.order(), (1..=n).product::<usize>());
        }
        for n in 3..=6 {
            assert_eq!(alternating(n).unwrap().order(), (1..=n).product::<usize>() / 2);
        }
        let sl = special_linear2(5).unwrap();
        assert_eq!(sl.order(), 120);
        assert!(sl.validate().is_ok());
    }

    #[test]
    fn heisenberg_matches_matrix_product() {
        let p = 3;
        let g = heisenberg(p).unwrap();
        let mat = |x: usize| [[1, x % p, x / (p * p)], [0, 1, (x / p) % p], [0, 0, 1]];
        for x in 0..27 {
            for y in 0..27 {
                let (a, b) = (mat(x), mat(y));
                let mut c = [[0usize; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum::<usize>() % p;
                    }
                }
                assert_eq!(mat(g.mul(x, y)), c);
            }
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(group_from_named_family(Family::HeisenbergP, 4).is_err());
        assert!(group_from_named_family(Family::Cyclic, 0).is_err());
        assert!(group_from_named_family(Family::Symmetric, 9).is_err());
        assert!("klein".parse::<Family>().is_err());
    }

    #[test]
    fn direct_product_order_and_axioms() {
        let a = Arc::new(cyclic(2).unwrap());
        let b = Arc::new(alternating(5).unwrap());
        let g = direct_product(&a, &b).unwrap();
        assert_eq!(g.order(), 120);
        assert!(g.validate().is_ok());
    }
}
