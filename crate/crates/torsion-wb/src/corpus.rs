//! Built-in corpus: cell systems of standard spaces (circle, torus, lens
//! spaces) and the shipped analytic families. The JSON files under
//! `data/` are serializations of these constructors; round-trip tests
//! keep them in sync.

use rand::Rng;

use crate::cw::{
    CWSystem, GroupPresentation, GroupRingMatrix, Representation, RingElem, Term, Word,
};
use crate::error::{Error, Result};
use crate::families::{AnalyticFamily, FamilyPayload, Grid, PolyMat};
use crate::detline::GradedComplex;
use crate::linalg::{c64, cre, CMat, C64, ONE, ZERO};
use crate::randgen;

fn elem(terms: &[(i64, &[i64])]) -> RingElem {
    terms
        .iter()
        .map(|&(c, w)| Term { coef: c, word: w.to_vec() })
        .collect()
}

/// S^1 with one 0-cell and one 1-cell; pi_1 = Z generated by t.
pub fn circle() -> CWSystem {
    CWSystem {
        cells: vec![0, 1],
        boundaries: vec![GroupRingMatrix {
            rows: 1,
            cols: 1,
            entries: vec![vec![elem(&[(1, &[1]), (-1, &[])])]],
        }],
        presentation: GroupPresentation { generators: 1, relations: vec![] },
    }
}

/// T^2 with cells (1, 2, 1); pi_1 = Z^2 = <a, b | aba^-1b^-1>.
pub fn torus() -> CWSystem {
    CWSystem {
        cells: vec![0, 1, 1, 2],
        boundaries: vec![
            GroupRingMatrix {
                rows: 1,
                cols: 2,
                entries: vec![vec![
                    elem(&[(1, &[1]), (-1, &[])]),
                    elem(&[(1, &[2]), (-1, &[])]),
                ]],
            },
            GroupRingMatrix {
                rows: 2,
                cols: 1,
                entries: vec![
                    vec![elem(&[(1, &[]), (-1, &[2])])],
                    vec![elem(&[(1, &[1]), (-1, &[])])],
                ],
            },
        ],
        presentation: GroupPresentation {
            generators: 2,
            relations: vec![vec![1, 2, -1, -2]],
        },
    }
}

/// Lens space L(p, 1) with one cell in each dimension 0..3;
/// pi_1 = Z/p generated by t, boundary chain t-1, 1+t+...+t^{p-1}, t-1.
pub fn lens(p: i64) -> CWSystem {
    let tp: Word = (0..p).map(|_| 1).collect();
    let sum: RingElem = (0..p)
        .map(|i| Term { coef: 1, word: (0..i).map(|_| 1).collect() })
        .collect();
    CWSystem {
        cells: vec![0, 1, 2, 3],
        boundaries: vec![
            GroupRingMatrix {
                rows: 1,
                cols: 1,
                entries: vec![vec![elem(&[(1, &[1]), (-1, &[])])]],
            },
            GroupRingMatrix { rows: 1, cols: 1, entries: vec![vec![sum]] },
            GroupRingMatrix {
                rows: 1,
                cols: 1,
                entries: vec![vec![elem(&[(1, &[1]), (-1, &[])])]],
            },
        ],
        presentation: GroupPresentation { generators: 1, relations: vec![tp] },
    }
}

/// Primitive p-th root of unity.
pub fn zeta(p: u32) -> C64 {
    let t = 2.0 * std::f64::consts::PI / p as f64;
    c64(t.cos(), t.sin())
}

/// One-dimensional representation from scalar generator images.
pub fn scalar_rep(vals: &[C64]) -> Result<Representation> {
    Representation::new(
        1,
        vals.iter().map(|&v| CMat::from_row_slice(1, 1, &[v])).collect(),
    )
}

/// Random n-dimensional representation compatible with the relations of
/// the corpus systems: free groups get arbitrary invertible images,
/// cyclic Z/p gets conjugated diagonal p-th roots of unity, and systems
/// with a single commutator relation get simultaneously diagonalized
/// images.
pub fn random_rep<R: Rng>(rng: &mut R, k: &CWSystem, n: usize) -> Result<Representation> {
    let g = &k.presentation;
    let diag = |vals: &[C64]| {
        CMat::from_fn(n, n, |i, j| if i == j { vals[i] } else { ZERO })
    };
    let images: Vec<CMat> = if g.relations.is_empty() {
        (0..g.generators).map(|_| randgen::random_invertible(rng, n)).collect()
    } else if g.generators == 1 && g.relations.len() == 1 && g.relations[0].iter().all(|&s| s == 1)
    {
        // Z/p: conjugated diagonal of p-th roots of unity
        let p = g.relations[0].len() as u32;
        let z = zeta(p);
        let vals: Vec<C64> = (0..n)
            .map(|_| z.powu(rng.gen_range(1..p.max(2))))
            .collect();
        let m = randgen::random_invertible(rng, n);
        let minv = m.clone().try_inverse().unwrap();
        vec![&m * diag(&vals) * &minv]
    } else {
        // commuting generators: one shared eigenbasis
        let m = randgen::random_invertible(rng, n);
        let minv = m.clone().try_inverse().unwrap();
        (0..g.generators)
            .map(|_| {
                let vals: Vec<C64> = (0..n)
                    .map(|_| {
                        let r = rng.gen_range(0.4..2.0);
                        let a = rng.gen_range(0.0..std::f64::consts::TAU);
                        C64::from_polar(r, a)
                    })
                    .collect();
                &m * diag(&vals) * &minv
            })
            .collect()
    };
    let rep = Representation::new(n, images)?;
    crate::cw::validate_rep(g, &rep)?;
    Ok(rep)
}

fn grid5(center: C64, h: f64) -> Grid {
    Grid { center, h, rows: 5, cols: 5 }
}

fn explicit_scalar_family(grid: Grid, f: impl Fn(C64) -> C64) -> AnalyticFamily {
    let cs = grid
        .points()
        .iter()
        .map(|&z| {
            GradedComplex::new(vec![1, 1], vec![CMat::from_row_slice(1, 1, &[f(z)])]).unwrap()
        })
        .collect();
    AnalyticFamily { grid, payload: FamilyPayload::Explicit(cs) }
}

/// Explicit holomorphic family: boundary [[z^3 + 2z + 3]] on a 5x5 grid
/// around z = 0.7.
pub fn family_holo() -> AnalyticFamily {
    explicit_scalar_family(grid5(cre(0.7), 0.01), |z| z * z * z + cre(2.0) * z + cre(3.0))
}

/// CW-mode holomorphic family: the circle twisted along alpha(t) = [[z]]
/// on a 5x5 grid around z = 3, with torsion z - 1.
pub fn family_circle() -> AnalyticFamily {
    AnalyticFamily {
        grid: grid5(cre(3.0), 0.05),
        payload: FamilyPayload::Cw {
            system: circle(),
            n: 1,
            images: vec![PolyMat { rows: 1, cols: 1, coeffs: vec![vec![vec![ZERO, ONE]]] }],
        },
    }
}

/// Explicit anti-holomorphic control: boundary [[conj(z) + 2]] on a 5x5
/// grid around z = 0.3.
pub fn family_antiholo() -> AnalyticFamily {
    explicit_scalar_family(grid5(cre(0.3), 0.01), |z| z.conj() + cre(2.0))
}

/// Corpus entry names understood by name-based lookups.
pub fn system_by_name(name: &str) -> Result<CWSystem> {
    match name {
        "circle" => Ok(circle()),
        "torus" => Ok(torus()),
        "lens_5_1" => Ok(lens(5)),
        "lens_7_1" => Ok(lens(7)),
        other => Err(Error::validation(format!("unknown corpus system {other:?}"))),
    }
}

/// The shipped family corpus as (name, family) pairs.
pub fn families() -> Vec<(&'static str, AnalyticFamily)> {
    vec![
        ("family_holo", family_holo()),
        ("family_circle", family_circle()),
        ("family_antiholo", family_antiholo()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn corpus_systems_validate() {
        for name in ["circle", "torus", "lens_5_1", "lens_7_1"] {
            system_by_name(name).unwrap().validate().unwrap();
        }
        assert!(system_by_name("klein").is_err());
    }

    #[test]
    fn random_reps_satisfy_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..=3 {
            for name in ["circle", "torus", "lens_5_1", "lens_7_1"] {
                let k = system_by_name(name).unwrap();
                let a = random_rep(&mut rng, &k, n).unwrap();
                assert_eq!(a.n, n);
            }
        }
    }

    #[test]
    fn families_validate() {
        for (_, f) in families() {
            f.validate().unwrap();
        }
    }
}
