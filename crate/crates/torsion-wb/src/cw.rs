//! CW systems twisted by representations.
//!
//! Cells carry boundary words in the integral group ring of a finitely
//! presented group. Evaluating the group-ring boundary under a
//! representation produces the twisted cochain complex; its canonical-map
//! image of the standard frame is the combinatorial torsion section.
//! Lift shifts (Euler structures) and cell-order flips (cohomological
//! orientations) act on that section by explicit factors.

use serde_json::{json, Value};

use crate::detline::{cohomology, phi, validate_complex, DetElement, Frame, GradedComplex};
use crate::error::{Error, Result};
use crate::linalg::{det, identity, mat_from_value, mat_to_value, norm, CMat, ONE};

/// A word in group generators: signed 1-based indices, left to right.
pub type Word = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: usize,
    pub relations: Vec<Word>,
}

impl GroupPresentation {
    pub fn check_word(&self, w: &Word) -> Result<()> {
        for &i in w {
            if i == 0 || i.unsigned_abs() as usize > self.generators {
                return Err(Error::validation(format!(
                    "word index {i} out of range for {} generators",
                    self.generators
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Representation {
    pub n: usize,
    pub images: Vec<CMat>,
}

/// Maximum allowed relation residual ||alpha(w) - I||.
pub const REP_TOL: f64 = 1e-8;

impl Representation {
    pub fn new(n: usize, images: Vec<CMat>) -> Result<Self> {
        for (k, m) in images.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::validation(format!(
                    "generator image {k} is not {n}x{n}"
                )));
            }
            if det(m).norm() == 0.0 {
                return Err(Error::validation(format!("generator image {k} is singular")));
            }
        }
        Ok(Representation { n, images })
    }

    /// alpha(w): product of generator images along the word.
    pub fn evaluate_word(&self, w: &Word) -> Result<CMat> {
        let mut out = identity(self.n);
        for &i in w {
            let k = i.unsigned_abs() as usize;
            if i == 0 || k > self.images.len() {
                return Err(Error::validation(format!("word index {i} out of range")));
            }
            let g = &self.images[k - 1];
            if i > 0 {
                out = out * g;
            } else {
                let inv = g.clone().try_inverse().ok_or_else(|| {
                    Error::numerical(format!("generator image {k} is numerically singular"))
                })?;
                out = out * inv;
            }
        }
        Ok(out)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "n": self.n,
            "images": self.images.iter().map(mat_to_value).collect::<Vec<_>>(),
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::validation("representation needs a fiber dimension n"))? as usize;
        let images = v
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::validation("representation needs generator images"))?
            .iter()
            .map(mat_from_value)
            .collect::<Result<Vec<_>>>()?;
        Representation::new(n, images)
    }
}

/// Maximum relation residual of the representation over the presentation.
pub fn rep_check(g: &GroupPresentation, a: &Representation) -> Result<f64> {
    if a.images.len() != g.generators {
        return Err(Error::validation(format!(
            "{} generator images for {} generators",
            a.images.len(),
            g.generators
        )));
    }
    let mut worst = 0.0f64;
    let id = identity(a.n);
    for w in &g.relations {
        g.check_word(w)?;
        let m = a.evaluate_word(w)?;
        worst = worst.max(norm(&(m - &id)));
    }
    Ok(worst)
}

pub fn validate_rep(g: &GroupPresentation, a: &Representation) -> Result<()> {
    let r = rep_check(g, a)?;
    if r > REP_TOL {
        return Err(Error::validation(format!(
            "representation violates a relation (residual {r:.3e})"
        )));
    }
    Ok(())
}

/// A term c * g of a group-ring element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coef: i64,
    pub word: Word,
}

/// A formal sum of terms; the empty sum is zero.
pub type RingElem = Vec<Term>;

/// Matrix over the integral group ring, stored chain-level:
/// entries[p][q] is the coefficient of row-cell p in the boundary of
/// column-cell q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<RingElem>>,
}

impl GroupRingMatrix {
    pub fn check_shape(&self) -> Result<()> {
        if self.entries.len() != self.rows
            || self.entries.iter().any(|row| row.len() != self.cols)
        {
            return Err(Error::validation("group-ring matrix entries do not match its shape"));
        }
        Ok(())
    }
}

/// Evaluate one group-ring element to an n x n block.
fn evaluate_elem(e: &RingElem, a: &Representation) -> Result<CMat> {
    let mut out = CMat::zeros(a.n, a.n);
    for t in e {
        let m = a.evaluate_word(&t.word)?;
        out += m * crate::linalg::cre(t.coef as f64);
    }
    Ok(out)
}

/// Evaluate a chain-level group-ring matrix into the cochain differential:
/// the (q, p) block of the output is the evaluated (p, q) entry, so a
/// chain boundary of shape (k_j, k_{j+1}) becomes an
/// (n k_{j+1}) x (n k_j) cochain matrix.
pub fn evaluate_boundary(b: &GroupRingMatrix, a: &Representation) -> Result<CMat> {
    b.check_shape()?;
    let n = a.n;
    let mut out = CMat::zeros(n * b.cols, n * b.rows);
    for p in 0..b.rows {
        for q in 0..b.cols {
            let block = evaluate_elem(&b.entries[p][q], a)?;
            out.view_mut((q * n, p * n), (n, n)).copy_from(&block);
        }
    }
    Ok(out)
}

/// A CW system: ordered cells (the ordering is the cohomological
/// orientation), chain-level group-ring boundaries per degree (the words
/// encode the chosen lifts, i.e. the Euler structure), and the group
/// presentation the words live in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CWSystem {
    /// Dimension of each cell, in order.
    pub cells: Vec<usize>,
    /// boundaries[j]: chain boundary from (j+1)-cells to j-cells,
    /// shape (k_j, k_{j+1}).
    pub boundaries: Vec<GroupRingMatrix>,
    pub presentation: GroupPresentation,
}

impl CWSystem {
    /// Cell counts per dimension, up to the top dimension.
    pub fn cell_counts(&self) -> Vec<usize> {
        let top = self.cells.iter().copied().max().unwrap_or(0);
        let mut k = vec![0usize; top + 1];
        for &d in &self.cells {
            k[d] += 1;
        }
        k
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::validation("CW system has no cells"));
        }
        let k = self.cell_counts();
        if k.iter().any(|&c| c == 0) {
            return Err(Error::validation("CW system skips a cell dimension"));
        }
        if self.boundaries.len() + 1 != k.len() {
            return Err(Error::validation(format!(
                "{} boundary matrices for {} cell dimensions",
                self.boundaries.len(),
                k.len()
            )));
        }
        for (j, b) in self.boundaries.iter().enumerate() {
            b.check_shape()?;
            if b.rows != k[j] || b.cols != k[j + 1] {
                return Err(Error::validation(format!(
                    "boundary {j} has shape ({}, {}), expected ({}, {})",
                    b.rows,
                    b.cols,
                    k[j],
                    k[j + 1]
                )));
            }
            for row in &b.entries {
                for e in row {
                    for t in e {
                        self.presentation.check_word(&t.word)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Indices into `cells` of the dimension-j cells, in order.
    fn cells_of_dim(&self, d: usize) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|&(_, &cd)| cd == d)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_value(&self) -> Value {
        let term_v = |t: &Term| json!([t.coef, t.word]);
        let elem_v = |e: &RingElem| Value::Array(e.iter().map(term_v).collect());
        json!({
            "cells": self.cells.iter().map(|&d| json!({"dim": d})).collect::<Vec<_>>(),
            "boundaries": self.boundaries.iter().map(|b| json!({
                "shape": [b.rows, b.cols],
                "entries": b.entries.iter()
                    .map(|row| Value::Array(row.iter().map(elem_v).collect()))
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "presentation": {
                "generators": self.presentation.generators,
                "relations": self.presentation.relations,
            },
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let cells = v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::validation("CW system needs a cells list"))?
            .iter()
            .map(|c| {
                c.get("dim")
                    .and_then(Value::as_u64)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::validation("each cell needs a dim"))
            })
            .collect::<Result<Vec<_>>>()?;
        let parse_word = |w: &Value| -> Result<Word> {
            w.as_array()
                .ok_or_else(|| Error::validation("word must be an array of indices"))?
                .iter()
                .map(|i| {
                    i.as_i64()
                        .filter(|&i| i != 0)
                        .ok_or_else(|| Error::validation("word indices are nonzero integers"))
                })
                .collect()
        };
        let parse_elem = |e: &Value| -> Result<RingElem> {
            e.as_array()
                .ok_or_else(|| Error::validation("entry must be an array of terms"))?
                .iter()
                .map(|t| {
                    let pair = t
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| Error::validation("term must be [coef, word]"))?;
                    let coef = pair[0]
                        .as_i64()
                        .ok_or_else(|| Error::validation("term coefficient must be an integer"))?;
                    Ok(Term { coef, word: parse_word(&pair[1])? })
                })
                .collect()
        };
        let boundaries = v
            .get("boundaries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::validation("CW system needs a boundaries list"))?
            .iter()
            .map(|b| {
                let shape = b
                    .get("shape")
                    .and_then(Value::as_array)
                    .filter(|s| s.len() == 2)
                    .ok_or_else(|| Error::validation("boundary needs a shape [rows, cols]"))?;
                let rows = shape[0].as_u64().unwrap_or(0) as usize;
                let cols = shape[1].as_u64().unwrap_or(0) as usize;
                let entries = b
                    .get("entries")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::validation("boundary needs entries"))?
                    .iter()
                    .map(|row| {
                        row.as_array()
                            .ok_or_else(|| Error::validation("entries rows must be arrays"))?
                            .iter()
                            .map(parse_elem)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = GroupRingMatrix { rows, cols, entries };
                m.check_shape()?;
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let pres = v
            .get("presentation")
            .ok_or_else(|| Error::validation("CW system needs a presentation"))?;
        let generators = pres
            .get("generators")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::validation("presentation needs a generator count"))?
            as usize;
        let relations = pres
            .get("relations")
            .and_then(Value::as_array)
            .map(|rels| rels.iter().map(parse_word).collect::<Result<Vec<_>>>())
            .transpose()?
            .unwrap_or_default();
        let out = CWSystem {
            cells,
            boundaries,
            presentation: GroupPresentation { generators, relations },
        };
        out.validate()?;
        Ok(out)
    }
}

/// The alpha-twisted cochain complex of the system.
pub fn twisted_complex(k: &CWSystem, a: &Representation) -> Result<GradedComplex> {
    k.validate()?;
    validate_rep(&k.presentation, a)?;
    let counts = k.cell_counts();
    let dims: Vec<usize> = counts.iter().map(|&c| c * a.n).collect();
    let boundaries = k
        .boundaries
        .iter()
        .map(|b| evaluate_boundary(b, a))
        .collect::<Result<Vec<_>>>()?;
    let c = GradedComplex::new(dims, boundaries)?;
    validate_complex(&c)?;
    Ok(c)
}

/// Farber-Turaev torsion section: the canonical-map image of the
/// standard frame of the twisted complex, in the deterministic
/// cohomology frame. Flipping the orientation multiplies by (-1)^n.
pub fn ft_torsion(k: &CWSystem, a: &Representation, flip_orientation: bool) -> Result<DetElement> {
    let c = twisted_complex(k, a)?;
    let h = cohomology(&c, 1e-10)?;
    let elem = DetElement { value: ONE, frame: Frame::Standard };
    let mut out = phi(&c, &elem, &h)?;
    if flip_orientation && a.n % 2 != 0 {
        out.value = -out.value;
    }
    Ok(out)
}

fn word_inverse(w: &Word) -> Word {
    w.iter().rev().map(|&i| -i).collect()
}

fn word_concat(parts: &[&Word]) -> Word {
    let mut out = Word::new();
    for p in parts {
        out.extend_from_slice(p);
    }
    out
}

/// Replace each lift of cell j by shifts[j] times it. The chain-level
/// entry for (row cell p, column cell q) becomes g_q * entry * g_p^{-1};
/// the induced torsion ratio is the product over cells of
/// det alpha(g_j)^{(-1)^{dim + 1}} (convention frozen by the circle and
/// lens corpus).
pub fn shift_lifts(k: &CWSystem, shifts: &[Word]) -> Result<CWSystem> {
    k.validate()?;
    if shifts.len() != k.cells.len() {
        return Err(Error::validation(format!(
            "{} shifts for {} cells",
            shifts.len(),
            k.cells.len()
        )));
    }
    for w in shifts {
        k.presentation.check_word(w)?;
    }
    let mut out = k.clone();
    for (j, b) in out.boundaries.iter_mut().enumerate() {
        let row_cells = k.cells_of_dim(j);
        let col_cells = k.cells_of_dim(j + 1);
        for (p, &pc) in row_cells.iter().enumerate() {
            for (q, &qc) in col_cells.iter().enumerate() {
                let gp_inv = word_inverse(&shifts[pc]);
                let gq = &shifts[qc];
                for t in &mut b.entries[p][q] {
                    t.word = word_concat(&[gq, &t.word, &gp_inv]);
                }
            }
        }
    }
    Ok(out)
}

/// Predicted torsion ratio of `shift_lifts` under a representation.
pub fn shift_ratio(k: &CWSystem, shifts: &[Word], a: &Representation) -> Result<crate::linalg::C64> {
    let mut ratio = ONE;
    for (j, w) in shifts.iter().enumerate() {
        let d = det_rep_word(a, w)?;
        if k.cells[j] % 2 == 1 {
            ratio *= d;
        } else {
            ratio /= d;
        }
    }
    Ok(ratio)
}

/// det alpha(w) for a word representing a first-homology class.
pub fn det_rep_word(a: &Representation, w: &Word) -> Result<crate::linalg::C64> {
    let m = a.evaluate_word(w)?;
    let d = det(&m);
    if d.norm() == 0.0 {
        return Err(Error::numerical("word evaluates to a singular matrix"));
    }
    Ok(d)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::{c64, cre, C64, ZERO};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn elem(terms: &[(i64, &[i64])]) -> RingElem {
        terms
            .iter()
            .map(|&(c, w)| Term { coef: c, word: w.to_vec() })
            .collect()
    }

    pub(crate) fn circle() -> CWSystem {
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

    fn lens(p: i64) -> CWSystem {
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

    fn torus() -> CWSystem {
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

    fn scalar_rep(vals: &[C64]) -> Representation {
        Representation::new(
            1,
            vals.iter().map(|&v| CMat::from_row_slice(1, 1, &[v])).collect(),
        )
        .unwrap()
    }

    fn zeta(p: u32) -> C64 {
        let t = 2.0 * std::f64::consts::PI / p as f64;
        c64(t.cos(), t.sin())
    }

    #[test]
    fn rep_check_examples() {
        // free group: no relations
        let g = GroupPresentation { generators: 1, relations: vec![] };
        let a = scalar_rep(&[cre(3.0)]);
        assert_eq!(rep_check(&g, &a).unwrap(), 0.0);
        // Z/5 with a fifth root of unity
        let g5 = GroupPresentation { generators: 1, relations: vec![vec![1, 1, 1, 1, 1]] };
        let a5 = scalar_rep(&[zeta(5)]);
        assert!(rep_check(&g5, &a5).unwrap() < 1e-12);
        // Z/5 with alpha(t) = 2: residual |2^5 - 1| = 31
        let bad = scalar_rep(&[cre(2.0)]);
        let r = rep_check(&g5, &bad).unwrap();
        assert!((r - 31.0).abs() < 1e-12, "residual {r}");
        assert!(validate_rep(&g5, &bad).is_err());
    }

    #[test]
    fn evaluate_boundary_examples() {
        let a = scalar_rep(&[cre(3.0)]);
        let b = circle().boundaries[0].clone();
        let m = evaluate_boundary(&b, &a).unwrap();
        assert!((m[(0, 0)] - cre(2.0)).norm() < 1e-14);
        // geometric sum of a fifth root of unity vanishes
        let a5 = scalar_rep(&[zeta(5)]);
        let sum = GroupRingMatrix {
            rows: 1,
            cols: 1,
            entries: vec![vec![(0..5)
                .map(|i| Term { coef: 1, word: vec![1; i] })
                .collect()]],
        };
        let m = evaluate_boundary(&sum, &a5).unwrap();
        assert!(m[(0, 0)].norm() < 1e-14);
        // empty formal sum evaluates to zero
        let z = GroupRingMatrix { rows: 1, cols: 1, entries: vec![vec![vec![]]] };
        let m = evaluate_boundary(&z, &a).unwrap();
        assert_eq!(m[(0, 0)], ZERO);
    }

    #[test]
    fn circle_torsion_closed_form() {
        let k = circle();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let l = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if (l - ONE).norm() < 0.2 {
                continue;
            }
            let a = scalar_rep(&[l]);
            let t = ft_torsion(&k, &a, false).unwrap();
            assert!(matches!(t.frame, Frame::Cohomology { .. }));
            let expect = l - ONE;
            assert!(
                (t.value - expect).norm() <= 1e-10 * expect.norm(),
                "lambda {l}: got {} expected {expect}",
                t.value
            );
        }
    }

    #[test]
    fn circle_trivial_rep_unit_modulus() {
        let k = circle();
        let a = scalar_rep(&[ONE]);
        let t = ft_torsion(&k, &a, false).unwrap();
        assert_eq!(t.frame, Frame::Cohomology { betti: vec![1, 1] });
        assert!((t.value.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lens_5_1_modulus() {
        let k = lens(5);
        let a = scalar_rep(&[zeta(5)]);
        let t = ft_torsion(&k, &a, false).unwrap();
        let s = 2.0 * (std::f64::consts::PI / 5.0).sin();
        let m = t.value.norm();
        let lo = s.powi(-2);
        let hi = s.powi(2);
        assert!(
            (m - lo).abs() < 1e-9 || (m - hi).abs() < 1e-9,
            "modulus {m}, expected {lo} or {hi}"
        );
        // pin the exact value against the brute-force canonical map
        let c = twisted_complex(&k, &a).unwrap();
        let o = crate::detline::oracle::torsion_oracle(&c);
        assert!((t.value - o).norm() < 1e-10 * o.norm(), "{} vs {o}", t.value);
    }

    #[test]
    fn torus_flat_and_acyclic() {
        let k = torus();
        let a = scalar_rep(&[cre(2.0), cre(3.0)]);
        let c = twisted_complex(&k, &a).unwrap();
        let h = cohomology(&c, 1e-10).unwrap();
        assert!(h.is_acyclic());
        let t = ft_torsion(&k, &a, false).unwrap();
        let o = crate::detline::oracle::torsion_oracle(&c);
        assert!((t.value - o).norm() < 1e-10 * o.norm());
        // trivial representation: full betti of the torus
        let triv = scalar_rep(&[ONE, ONE]);
        let c = twisted_complex(&k, &triv).unwrap();
        assert_eq!(cohomology(&c, 1e-10).unwrap().betti, vec![1, 2, 1]);
    }

    #[test]
    fn euler_shift_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..60 {
            let (k, a) = if trial % 2 == 0 {
                let l = c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if (l - ONE).norm() < 0.2 || l.norm() < 0.2 {
                    continue;
                }
                (circle(), scalar_rep(&[l]))
            } else {
                (lens(5), scalar_rep(&[zeta(5)]))
            };
            let shifts: Vec<Word> = k
                .cells
                .iter()
                .map(|_| {
                    let len = rng.gen_range(0..3);
                    (0..len).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
                })
                .collect();
            let shifted = shift_lifts(&k, &shifts).unwrap();
            let t0 = ft_torsion(&k, &a, false).unwrap().value;
            let t1 = ft_torsion(&shifted, &a, false).unwrap().value;
            let predicted = shift_ratio(&k, &shifts, &a).unwrap();
            let actual = t1 / t0;
            assert!(
                (actual - predicted).norm() <= 1e-9 * predicted.norm(),
                "trial {trial}: ratio {actual} predicted {predicted}"
            );
        }
    }

    #[test]
    fn empty_shift_is_identity() {
        let k = lens(5);
        let shifts = vec![Word::new(); 4];
        let shifted = shift_lifts(&k, &shifts).unwrap();
        assert_eq!(k, shifted);
    }

    #[test]
    fn orientation_flip() {
        let k = circle();
        let a = scalar_rep(&[cre(3.0)]);
        let plain = ft_torsion(&k, &a, false).unwrap().value;
        let flip = ft_torsion(&k, &a, true).unwrap().value;
        assert_eq!(flip, -plain);
        // even fiber dimension: no sign
        let a2 = Representation::new(
            2,
            vec![CMat::from_row_slice(2, 2, &[cre(2.0), ZERO, ZERO, cre(3.0)])],
        )
        .unwrap();
        let plain = ft_torsion(&k, &a2, false).unwrap().value;
        let flip = ft_torsion(&k, &a2, true).unwrap().value;
        assert_eq!(flip, plain);
    }

    #[test]
    fn det_rep_word_examples() {
        let a = scalar_rep(&[c64(0.0, 2.0)]);
        assert!((det_rep_word(&a, &vec![1]).unwrap() - c64(0.0, 2.0)).norm() < 1e-14);
        assert!((det_rep_word(&a, &vec![1, -1]).unwrap() - ONE).norm() < 1e-14);
        let a2 = Representation::new(
            2,
            vec![CMat::from_row_slice(2, 2, &[cre(2.0), ZERO, ZERO, cre(3.0)])],
        )
        .unwrap();
        assert!((det_rep_word(&a2, &vec![1, 1]).unwrap() - cre(36.0)).norm() < 1e-12);
        // homomorphism property on random words
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let w1: Word = (0..rng.gen_range(0..4))
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let w2: Word = (0..rng.gen_range(0..4))
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let d1 = det_rep_word(&a2, &w1).unwrap();
            let d2 = det_rep_word(&a2, &w2).unwrap();
            let dw = det_rep_word(&a2, &word_concat(&[&w1, &w2])).unwrap();
            assert!((dw - d1 * d2).norm() <= 1e-12 * dw.norm().max(1.0));
        }
    }

    #[test]
    fn json_round_trip() {
        for k in [circle(), lens(5), torus()] {
            let v = k.to_value();
            let back = CWSystem::from_value(&v).unwrap();
            assert_eq!(k, back);
        }
        let a = Representation::new(
            2,
            vec![CMat::from_row_slice(2, 2, &[cre(2.0), ONE, ZERO, cre(3.0)])],
        )
        .unwrap();
        let back = Representation::from_value(&a.to_value()).unwrap();
        assert_eq!(a.n, back.n);
        assert!(norm(&(&a.images[0] - &back.images[0])) == 0.0);
    }

    #[test]
    fn malformed_inputs_rejected() {
        let mut k = circle();
        k.boundaries[0].entries[0][0][0].word = vec![2];
        assert!(k.validate().is_err());
        let v = serde_json::json!({"cells": [{"dim": 0}]});
        assert!(CWSystem::from_value(&v).is_err());
    }
}
