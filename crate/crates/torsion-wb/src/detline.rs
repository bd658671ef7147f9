//! Based graded complexes, cohomology with chosen representative bases,
//! and the canonical map from the determinant line of a complex to the
//! determinant line of its cohomology.
//!
//! The map is computed by the complement-and-basis algorithm: in every
//! degree pick a complement of the cocycles and a complement of the
//! coboundaries inside the cocycles, write the standard basis against
//! the assembled basis (coboundary images, cohomology representatives,
//! complement vectors), and take the alternating product of the block
//! determinants.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{
    self, cre, det, hcat, mat_from_value, mat_to_value, norm, row_space_basis,
    CMat, C64, ONE,
};

/// A finite cochain complex 0 -> C^0 -> ... -> C^d -> 0 with chosen
/// standard bases in every degree.
#[derive(Debug, Clone)]
pub struct GradedComplex {
    /// Dimensions m_0 .. m_d.
    pub dims: Vec<usize>,
    /// boundaries[j] has shape m_{j+1} x m_j for j = 0..d-1.
    pub boundaries: Vec<CMat>,
}

impl GradedComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<CMat>) -> Result<Self> {
        let c = GradedComplex { dims, boundaries };
        c.check_shapes()?;
        Ok(c)
    }

    /// Top degree d.
    pub fn degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The boundary leaving degree j, as a matrix even when absent
    /// (degree d gets an empty 0 x m_d matrix).
    pub fn boundary(&self, j: usize) -> CMat {
        if j < self.boundaries.len() {
            self.boundaries[j].clone()
        } else {
            CMat::zeros(0, self.dims[j])
        }
    }

    /// The boundary entering degree j (empty m_... x 0 for j = 0).
    pub fn boundary_into(&self, j: usize) -> CMat {
        if j == 0 {
            CMat::zeros(self.dims[0], 0)
        } else {
            self.boundaries[j - 1].clone()
        }
    }

    fn check_shapes(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::validation("complex needs at least one degree"));
        }
        if self.boundaries.len() + 1 != self.dims.len() {
            return Err(Error::validation(format!(
                "expected {} boundaries for {} degrees, got {}",
                self.dims.len() - 1,
                self.dims.len(),
                self.boundaries.len()
            )));
        }
        for (j, b) in self.boundaries.iter().enumerate() {
            if b.nrows() != self.dims[j + 1] || b.ncols() != self.dims[j] {
                return Err(Error::validation(format!(
                    "boundary {} has shape {}x{}, expected {}x{}",
                    j,
                    b.nrows(),
                    b.ncols(),
                    self.dims[j + 1],
                    self.dims[j]
                )));
            }
            if !linalg::is_finite(b) {
                return Err(Error::validation(format!("boundary {j} has non-finite entries")));
            }
        }
        Ok(())
    }

    pub fn to_value(&self) -> Value {
        json!({
            "dims": self.dims,
            "boundaries": self.boundaries.iter().map(mat_to_value).collect::<Vec<_>>(),
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let dims = v
            .get("dims")
            .and_then(|d| d.as_array())
            .ok_or_else(|| Error::validation("complex JSON needs a dims array"))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|n| n as usize)
                    .ok_or_else(|| Error::validation("dims must be nonnegative integers"))
            })
            .collect::<Result<Vec<_>>>()?;
        let boundaries = v
            .get("boundaries")
            .and_then(|b| b.as_array())
            .ok_or_else(|| Error::validation("complex JSON needs a boundaries array"))?
            .iter()
            .map(mat_from_value)
            .collect::<Result<Vec<_>>>()?;
        GradedComplex::new(dims, boundaries)
    }
}

/// Normalized composition residual max_j ||d_{j+1} d_j|| / (||d_{j+1}|| ||d_j|| + 1).
pub fn check_complex(c: &GradedComplex) -> Result<f64> {
    c.check_shapes()?;
    let mut worst: f64 = 0.0;
    for j in 0..c.boundaries.len().saturating_sub(1) {
        let a = &c.boundaries[j + 1];
        let b = &c.boundaries[j];
        let comp = a * b;
        let denom = norm(a) * norm(b) + 1.0;
        worst = worst.max(norm(&comp) / denom);
    }
    Ok(worst)
}

pub const COMPLEX_TOL: f64 = 1e-10;

pub fn validate_complex(c: &GradedComplex) -> Result<()> {
    let r = check_complex(c)?;
    if r > COMPLEX_TOL {
        return Err(Error::validation(format!(
            "boundary maps do not compose to zero (residual {r:.3e})"
        )));
    }
    Ok(())
}

/// Cohomology of a graded complex: betti numbers and cocycle
/// representative bases, one m_j x b_j matrix per degree.
#[derive(Debug, Clone)]
pub struct CohomologyData {
    pub betti: Vec<usize>,
    pub rep_bases: Vec<CMat>,
}

impl CohomologyData {
    pub fn is_acyclic(&self) -> bool {
        self.betti.iter().all(|&b| b == 0)
    }
}

/// Deterministic cohomology: representatives are the orthogonal
/// complement of Im d_{j-1} inside Ker d_j.
pub fn cohomology(c: &GradedComplex, tol: f64) -> Result<CohomologyData> {
    validate_complex(c)?;
    let d = c.degree();
    // one rank scale for the whole complex, so that a boundary block that
    // is numerically zero is not promoted to full rank by its own noise
    let scale = c
        .boundaries
        .iter()
        .map(linalg::sigma_max)
        .fold(0.0f64, f64::max);
    let cut = tol * scale;
    let mut betti = Vec::with_capacity(d + 1);
    let mut rep_bases = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let out = c.boundary(j);
        let inc = c.boundary_into(j);
        check_tol_gap(&out, cut)?;
        let (rank_out, kernel) = linalg::rank_nullspace_abs(&out, cut);
        let rank_in = rank_of(&inc, cut);
        if rank_out + rank_in > c.dims[j] {
            return Err(Error::numerical(format!(
                "rank estimates exceed dimension in degree {j}"
            )));
        }
        let b_j = c.dims[j] - rank_out - rank_in;
        // project Im(inc) out of the kernel basis
        let reps = if b_j == 0 {
            CMat::zeros(c.dims[j], 0)
        } else if rank_in == 0 {
            kernel.columns(0, b_j.min(kernel.ncols())).into_owned()
        } else {
            let im = row_space_basis(&inc.adjoint(), tol);
            // components of kernel vectors orthogonal to Im(inc)
            let proj = &kernel - &im * (im.adjoint() * &kernel);
            let basis = row_space_basis(&proj.adjoint(), tol);
            if basis.ncols() != b_j {
                return Err(Error::numerical(format!(
                    "cohomology basis dimension mismatch in degree {j}: got {}, expected {b_j}",
                    basis.ncols()
                )));
            }
            basis
        };
        betti.push(b_j);
        rep_bases.push(reps);
    }
    Ok(CohomologyData { betti, rep_bases })
}

fn rank_of(a: &CMat, cut: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let parts = linalg::svd(a);
    parts.s.iter().filter(|&&s| s > cut).count()
}

/// Reject when a singular value sits within a factor 10 of the rank
/// threshold on either side: the rank decision would be a guess.
fn check_tol_gap(a: &CMat, cut: f64) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 || cut == 0.0 {
        return Ok(());
    }
    let parts = linalg::svd(a);
    for &s in &parts.s {
        if s > cut / 10.0 && s < cut * 10.0 {
            return Err(Error::numerical(format!(
                "singular value {s:.3e} is inside the rank-tolerance ambiguity band around {cut:.3e}"
            )));
        }
    }
    Ok(())
}

/// Which basis a determinant-line coordinate refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    /// The standard basis element of Det(C•).
    Standard,
    /// The frame of Det(H•) determined by cocycle representative bases.
    Cohomology { betti: Vec<usize> },
}

/// A coordinate of a determinant-line element against an explicit frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DetElement {
    pub value: C64,
    pub frame: Frame,
}

impl DetElement {
    pub fn standard(value: C64) -> Result<Self> {
        if value.norm() == 0.0 || !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::validation("determinant-line coordinate must be nonzero and finite"));
        }
        Ok(DetElement { value, frame: Frame::Standard })
    }
}

/// Pluggable overall sign convention: an integer-valued function of the
/// dimensions. The default is identically zero.
pub type SignConvention = fn(&GradedComplex) -> i64;

pub fn sign_zero(_c: &GradedComplex) -> i64 {
    0
}

/// Canonical map from Det(C•) to Det(H•) applied to the coordinate `c`,
/// evaluated against the frame of `h`. Default sign convention.
pub fn phi(c: &GradedComplex, elem: &DetElement, h: &CohomologyData) -> Result<DetElement> {
    phi_with(c, elem, h, sign_zero, None)
}

/// As `phi`, with an explicit sign convention and an optional override of
/// the internal complement bases (used to test choice-independence:
/// `complements[j]`, when present and nonempty, must be a basis of a
/// complement of Ker d_j in degree j).
pub fn phi_with(
    c: &GradedComplex,
    elem: &DetElement,
    h: &CohomologyData,
    sign: SignConvention,
    complements: Option<&[CMat]>,
) -> Result<DetElement> {
    validate_complex(c)?;
    if elem.frame != Frame::Standard {
        return Err(Error::validation("phi expects a coordinate in the standard frame"));
    }
    let d = c.degree();
    if h.betti.len() != d + 1 || h.rep_bases.len() != d + 1 {
        return Err(Error::validation("cohomology data has wrong number of degrees"));
    }
    let tol = 1e-12;
    // rank decisions against one scale for the whole complex
    let scale = c
        .boundaries
        .iter()
        .map(linalg::sigma_max)
        .fold(0.0f64, f64::max);
    let cut = tol * scale;
    // complements V_j of Ker d_j, degree by degree
    let mut v: Vec<CMat> = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let out = c.boundary(j);
        if let Some(over) = complements {
            if j < over.len() && over[j].ncols() > 0 {
                v.push(over[j].clone());
                continue;
            }
        }
        v.push(linalg::row_space_basis_abs(&out, cut));
    }
    let mut log_abs = 0.0;
    let mut phase = ONE;
    for j in 0..=d {
        let m_j = c.dims[j];
        if h.rep_bases[j].nrows() != m_j || h.rep_bases[j].ncols() != h.betti[j] {
            return Err(Error::validation(format!(
                "cohomology representatives have wrong shape in degree {j}"
            )));
        }
        let image = if j == 0 {
            CMat::zeros(m_j, 0)
        } else {
            &c.boundaries[j - 1] * &v[j - 1]
        };
        let a_j = hcat(&[&image, &h.rep_bases[j], &v[j]]);
        if a_j.ncols() != m_j {
            return Err(Error::validation(format!(
                "betti numbers inconsistent with the complex in degree {j} ({} columns vs dimension {m_j})",
                a_j.ncols()
            )));
        }
        let det_a = det(&a_j);
        if det_a.norm() == 0.0 || !det_a.re.is_finite() {
            return Err(Error::numerical(format!(
                "assembled basis is singular in degree {j}"
            )));
        }
        // alternate: det(A_j)^{(-1)^{j+1}} multiplies the coordinate
        if j % 2 == 1 {
            log_abs += det_a.norm().ln();
            phase *= det_a / cre(det_a.norm());
        } else {
            log_abs -= det_a.norm().ln();
            phase /= det_a / cre(det_a.norm());
        }
    }
    let mut value = elem.value * phase * cre(log_abs.exp());
    if sign(c) % 2 != 0 {
        value = -value;
    }
    Ok(DetElement {
        value,
        frame: Frame::Cohomology { betti: h.betti.clone() },
    })
}

/// Torsion of an acyclic complex: phi of the standard element, as a
/// plain scalar.
pub fn torsion_acyclic(c: &GradedComplex) -> Result<C64> {
    torsion_acyclic_with(c, sign_zero)
}

pub fn torsion_acyclic_with(c: &GradedComplex, sign: SignConvention) -> Result<C64> {
    let h = cohomology(c, 1e-10)?;
    if !h.is_acyclic() {
        return Err(Error::validation(format!(
            "complex is not acyclic (betti {:?})",
            h.betti
        )));
    }
    let out = phi_with(c, &DetElement::standard(ONE)?, &h, sign, None)?;
    Ok(out.value)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Independent brute-force evaluation of the canonical map used to
    //! pin the production implementation: complements are chosen by
    //! pivoted Gaussian elimination on coordinate vectors instead of
    //! SVD, and determinants come from plain LU.

    use super::*;
    use crate::linalg::rank_nullspace;

    /// Complement of Ker d_j spanned by standard coordinate vectors
    /// picked by column pivoting.
    fn pivot_complement(out: &CMat, tol: f64) -> CMat {
        let n = out.ncols();
        let (rank, _) = rank_nullspace(out, tol);
        let mut chosen: Vec<usize> = Vec::new();
        let mut current = CMat::zeros(out.nrows(), 0);
        for col in 0..n {
            if chosen.len() == rank {
                break;
            }
            let colmat = CMat::from_fn(out.nrows(), 1, |i, _| out[(i, col)]);
            let cand = hcat(&[&current, &colmat]);
            let r = {
                let parts = linalg::svd(&cand);
                let smax = parts.s.first().copied().unwrap_or(0.0);
                parts.s.iter().filter(|&&s| s > 1e-10 * smax.max(1.0)).count()
            };
            if r > chosen.len() {
                chosen.push(col);
                current = cand;
            }
        }
        let mut v = CMat::zeros(n, chosen.len());
        for (k, &col) in chosen.iter().enumerate() {
            v[(col, k)] = ONE;
        }
        v
    }

    pub fn phi_oracle(c: &GradedComplex, h: &CohomologyData) -> C64 {
        let d = c.degree();
        let tol = 1e-10;
        let v: Vec<CMat> = (0..=d).map(|j| pivot_complement(&c.boundary(j), tol)).collect();
        let mut acc = ONE;
        for j in 0..=d {
            let image = if j == 0 {
                CMat::zeros(c.dims[j], 0)
            } else {
                &c.boundaries[j - 1] * &v[j - 1]
            };
            let a_j = hcat(&[&image, &h.rep_bases[j], &v[j]]);
            let det_a = det(&a_j);
            if j % 2 == 1 {
                acc *= det_a;
            } else {
                acc /= det_a;
            }
        }
        acc
    }

    pub fn torsion_oracle(c: &GradedComplex) -> C64 {
        let h = cohomology(c, 1e-10).unwrap();
        assert!(h.is_acyclic());
        phi_oracle(c, &h)
    }
}
