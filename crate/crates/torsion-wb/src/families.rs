//! One-parameter families, mapping cones, and holomorphy diagnostics.
//!
//! A family is a complex per point of an axis-aligned square grid in the
//! parameter plane, given either explicitly or as a CW system with a
//! polynomial representation curve. Torsion along the family is probed
//! with a discrete Cauchy-Riemann stencil at two spacings, which yields
//! a scaling exponent separating holomorphic from anti-holomorphic
//! behavior. The equal-modulus argument is implemented as a
//! locally-constant-phase detector on paired sample sets.

use serde_json::{json, Value};

use crate::cw::{twisted_complex, CWSystem, Representation};
use crate::detline::{
    cohomology, phi, validate_complex, DetElement, Frame, GradedComplex,
};
use crate::error::{Error, Result};
use crate::jsonfmt;
use crate::linalg::{c64, cre, det, hcat, lstsq, norm, CMat, C64, ONE};

// ---------------------------------------------------------------------------
// Mapping cones
// ---------------------------------------------------------------------------

/// Tolerance for the chain-map residual of J.
pub const CHAIN_MAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ConeComplex {
    pub source: GradedComplex,
    pub target: GradedComplex,
    pub j: Vec<CMat>,
    /// Cone^k = W^k (+) C^{k-1} with the block differential
    /// [[d_k, 0], [J_k, del_{k-1}]].
    pub assembled: GradedComplex,
}

/// Degree-alternating sign twist J_k -> (-1)^k J_k. Turns a commuting
/// chain map into one compatible with the unsigned block differential.
pub fn sign_twist(j: &[CMat]) -> Vec<CMat> {
    j.iter()
        .enumerate()
        .map(|(k, m)| if k % 2 == 0 { m.clone() } else { -m })
        .collect()
}

/// Assemble the mapping cone of J: W -> C with the block differential
/// taken verbatim (no sign inserted on any block).
pub fn cone(w: &GradedComplex, c: &GradedComplex, j: &[CMat]) -> Result<ConeComplex> {
    validate_complex(w)?;
    validate_complex(c)?;
    let d = w.degree();
    if c.degree() != d {
        return Err(Error::validation("cone requires source and target of equal length"));
    }
    if j.len() != d + 1 {
        return Err(Error::validation(format!(
            "expected {} cone maps, got {}",
            d + 1,
            j.len()
        )));
    }
    for (k, m) in j.iter().enumerate() {
        if m.nrows() != c.dims[k] || m.ncols() != w.dims[k] {
            return Err(Error::validation(format!(
                "cone map {k} has shape {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                c.dims[k],
                w.dims[k]
            )));
        }
    }
    // commuting chain-map residual, for diagnostics only
    let mut commuting = 0.0f64;
    for k in 0..d {
        let r = &c.boundaries[k] * &j[k] - &j[k + 1] * &w.boundaries[k];
        commuting = commuting.max(norm(&r) / (norm(&j[k]).max(1.0) + norm(&c.boundaries[k])));
    }
    let mut dims = Vec::with_capacity(d + 2);
    for k in 0..=d + 1 {
        let wk = if k <= d { w.dims[k] } else { 0 };
        let ck = if k >= 1 { c.dims[k - 1] } else { 0 };
        dims.push(wk + ck);
    }
    let mut boundaries = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let rows = dims[k + 1];
        let cols = dims[k];
        let mut b = CMat::zeros(rows, cols);
        let wk = w.dims[k];
        let wk1 = if k + 1 <= d { w.dims[k + 1] } else { 0 };
        if k < d {
            b.view_mut((0, 0), (wk1, wk)).copy_from(&w.boundaries[k]);
        }
        b.view_mut((wk1, 0), (c.dims[k], wk)).copy_from(&j[k]);
        if k >= 1 {
            b.view_mut((wk1, wk), (c.dims[k], c.dims[k - 1]))
                .copy_from(&c.boundaries[k - 1]);
        }
        boundaries.push(b);
    }
    let assembled = GradedComplex::new(dims, boundaries)?;
    if let Err(e) = validate_complex(&assembled) {
        if commuting <= CHAIN_MAP_TOL {
            return Err(Error::validation(format!(
                "cone differential does not square to zero although J commutes with the \
                 differentials; the unsigned block differential requires the anticommuting \
                 convention — apply sign_twist to J (original error: {e})"
            )));
        }
        return Err(e);
    }
    Ok(ConeComplex {
        source: w.clone(),
        target: c.clone(),
        j: j.to_vec(),
        assembled,
    })
}

/// Determinant correction of a cone map in the modulus form of the
/// multiplicativity law: prod_k |det J~_k|^{2 (-1)^k}, where J~_k is
/// J_k restricted to a complement of its kernel (the product of its
/// singular values above the rank cut). Each J_k borders two cone
/// degrees, which is where the squared exponent comes from.
pub fn cone_det_correction(j: &[CMat]) -> Result<f64> {
    let scale = j.iter().map(crate::linalg::sigma_max).fold(0.0f64, f64::max);
    let cut = 1e-10 * scale;
    let mut out = 1.0f64;
    for (k, m) in j.iter().enumerate() {
        let sv = crate::linalg::singular_values(m);
        let d: f64 = sv.iter().filter(|&&s| s > cut).product();
        if d == 0.0 && sv.iter().any(|&s| s > cut) {
            return Err(Error::numerical(format!("cone map {k} has degenerate spectrum")));
        }
        let d2 = d * d;
        if k % 2 == 0 {
            out *= d2;
        } else {
            out /= d2;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Analytic families
// ---------------------------------------------------------------------------

/// Axis-aligned square grid of parameter values, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub center: C64,
    pub h: f64,
    pub rows: usize,
    pub cols: usize,
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 3 || self.cols < 3 {
            return Err(Error::validation("grid must be at least 3x3 for the CR stencil"));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::validation("grid spacing must be positive"));
        }
        Ok(())
    }

    /// z at (row r, col c): center + h*(c - c_mid) + i*h*(r - r_mid).
    pub fn point(&self, r: usize, c: usize) -> C64 {
        let rc = (self.rows as f64 - 1.0) / 2.0;
        let cc = (self.cols as f64 - 1.0) / 2.0;
        self.center + c64(self.h * (c as f64 - cc), self.h * (r as f64 - rc))
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| self.point(r, c)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Matrix of polynomials in the parameter, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMat {
    pub rows: usize,
    pub cols: usize,
    pub coeffs: Vec<Vec<Vec<C64>>>,
}

impl PolyMat {
    pub fn evaluate(&self, z: C64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| {
            let mut acc = crate::linalg::ZERO;
            for &c in self.coeffs[i][j].iter().rev() {
                acc = acc * z + c;
            }
            acc
        })
    }
}

#[derive(Debug, Clone)]
pub enum FamilyPayload {
    /// One complex per grid point, row-major grid order.
    Explicit(Vec<GradedComplex>),
    /// A CW system with a polynomial representation curve alpha(z).
    Cw { system: CWSystem, n: usize, images: Vec<PolyMat> },
}

#[derive(Debug, Clone)]
pub struct AnalyticFamily {
    pub grid: Grid,
    pub payload: FamilyPayload,
}

impl AnalyticFamily {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        match &self.payload {
            FamilyPayload::Explicit(cs) => {
                if cs.len() != self.grid.len() {
                    return Err(Error::validation(format!(
                        "{} complexes for {} grid points",
                        cs.len(),
                        self.grid.len()
                    )));
                }
                let dims = &cs[0].dims;
                for c in cs {
                    if &c.dims != dims {
                        return Err(Error::validation("family dimensions vary across the grid"));
                    }
                    validate_complex(c)?;
                }
            }
            FamilyPayload::Cw { system, n, images } => {
                system.validate()?;
                if images.len() != system.presentation.generators {
                    return Err(Error::validation("one image curve per generator required"));
                }
                for m in images {
                    if m.rows != *n || m.cols != *n {
                        return Err(Error::validation("image curve shape differs from fiber dim"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluate the family into one complex per grid point.
    pub fn complexes(&self) -> Result<Vec<GradedComplex>> {
        self.validate()?;
        match &self.payload {
            FamilyPayload::Explicit(cs) => Ok(cs.clone()),
            FamilyPayload::Cw { system, n, images } => self
                .grid
                .points()
                .iter()
                .map(|&z| {
                    let mats: Vec<CMat> = images.iter().map(|m| m.evaluate(z)).collect();
                    let rep = Representation::new(*n, mats)?;
                    twisted_complex(system, &rep)
                })
                .collect(),
        }
    }

    pub fn to_value(&self) -> Value {
        let payload = match &self.payload {
            FamilyPayload::Explicit(cs) => {
                json!(cs.iter().map(|c| c.to_value()).collect::<Vec<_>>())
            }
            FamilyPayload::Cw { system, n, images } => json!({
                "system": system.to_value(),
                "n": n,
                "images": images.iter().map(|m| {
                    json!(m.coeffs.iter().map(|row| {
                        row.iter().map(|cs| {
                            cs.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>()
                        }).collect::<Vec<_>>()
                    }).collect::<Vec<_>>())
                }).collect::<Vec<_>>(),
            }),
        };
        json!({
            "grid": {
                "center": [self.grid.center.re, self.grid.center.im],
                "h": self.grid.h,
                "shape": [self.grid.rows, self.grid.cols],
            },
            "mode": match &self.payload {
                FamilyPayload::Explicit(_) => "explicit",
                FamilyPayload::Cw { .. } => "cw",
            },
            "payload": payload,
        })
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let g = v
            .get("grid")
            .ok_or_else(|| Error::validation("family needs a grid"))?;
        let center = g
            .get("center")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .and_then(|a| Some(c64(a[0].as_f64()?, a[1].as_f64()?)))
            .ok_or_else(|| Error::validation("grid center must be [re, im]"))?;
        let h = g
            .get("h")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::validation("grid needs a spacing h"))?;
        let shape = g
            .get("shape")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::validation("grid needs a shape [rows, cols]"))?;
        let grid = Grid {
            center,
            h,
            rows: shape[0].as_u64().unwrap_or(0) as usize,
            cols: shape[1].as_u64().unwrap_or(0) as usize,
        };
        let mode = v
            .get("mode")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::validation("family needs a mode"))?;
        let payload = v
            .get("payload")
            .ok_or_else(|| Error::validation("family needs a payload"))?;
        let payload = match mode {
            "explicit" => {
                let cs = payload
                    .as_array()
                    .ok_or_else(|| Error::validation("explicit payload must be a list"))?
                    .iter()
                    .map(GradedComplex::from_value)
                    .collect::<Result<Vec<_>>>()?;
                FamilyPayload::Explicit(cs)
            }
            "cw" => {
                let system = CWSystem::from_value(
                    payload
                        .get("system")
                        .ok_or_else(|| Error::validation("cw payload needs a system"))?,
                )?;
                let n = payload
                    .get("n")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::validation("cw payload needs a fiber dim n"))?
                    as usize;
                let images = payload
                    .get("images")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::validation("cw payload needs image curves"))?
                    .iter()
                    .map(|m| {
                        let rows = m
                            .as_array()
                            .ok_or_else(|| Error::validation("image curve must be rows"))?;
                        let coeffs = rows
                            .iter()
                            .map(|row| {
                                row.as_array()
                                    .ok_or_else(|| Error::validation("image curve row invalid"))?
                                    .iter()
                                    .map(|cs| {
                                        cs.as_array()
                                            .ok_or_else(|| {
                                                Error::validation("coefficient list invalid")
                                            })?
                                            .iter()
                                            .map(|c| {
                                                let p = c
                                                    .as_array()
                                                    .filter(|p| p.len() == 2)
                                                    .ok_or_else(|| {
                                                        Error::validation(
                                                            "coefficient must be [re, im]",
                                                        )
                                                    })?;
                                                Ok(c64(
                                                    p[0].as_f64().unwrap_or(f64::NAN),
                                                    p[1].as_f64().unwrap_or(f64::NAN),
                                                ))
                                            })
                                            .collect::<Result<Vec<_>>>()
                                    })
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let r = coeffs.len();
                        let c = coeffs.first().map_or(0, |row| row.len());
                        if coeffs.iter().any(|row| row.len() != c) {
                            return Err(Error::validation("ragged image curve"));
                        }
                        Ok(PolyMat { rows: r, cols: c, coeffs })
                    })
                    .collect::<Result<Vec<_>>>()?;
                FamilyPayload::Cw { system, n, images }
            }
            other => {
                return Err(Error::validation(format!("unknown family mode {other:?}")))
            }
        };
        let out = AnalyticFamily { grid, payload };
        out.validate()?;
        Ok(out)
    }
}

/// Torsion at every grid point with the frame frozen at the first point.
///
/// Acyclic members give plain canonical-map values. Non-acyclic members
/// are expressed against the cohomology frame of the first grid point by
/// least-squares transport; a betti jump across the grid is reported as
/// a stratum crossing, never averaged over.
pub fn torsion_family(f: &AnalyticFamily) -> Result<Vec<(C64, C64)>> {
    let cs = f.complexes()?;
    let zs = f.grid.points();
    let h0 = cohomology(&cs[0], 1e-10)?;
    let mut out = Vec::with_capacity(cs.len());
    for (idx, c) in cs.iter().enumerate() {
        let h = cohomology(c, 1e-10)?;
        if h.betti != h0.betti {
            return Err(Error::validation(format!(
                "stratum crossing: betti {:?} at z = {} differ from {:?} at the base point",
                h.betti, zs[idx], h0.betti
            )));
        }
        let elem = DetElement { value: ONE, frame: Frame::Standard };
        let mut t = phi(c, &elem, &h)?.value;
        // transport the frame of this point onto the frozen base frame
        for j in 0..=c.degree() {
            let b_j = h0.betti[j];
            if b_j == 0 {
                continue;
            }
            let inc = c.boundary_into(j);
            let sys = hcat(&[&h0.rep_bases[j], &inc]);
            let x = lstsq(&sys, &h.rep_bases[j]);
            let tj = det(&x.view((0, 0), (b_j, b_j)).into_owned());
            if tj.norm() == 0.0 {
                return Err(Error::numerical(format!(
                    "frame transport degenerate in degree {j} at z = {}",
                    zs[idx]
                )));
            }
            if j % 2 == 0 {
                t *= tj;
            } else {
                t /= tj;
            }
        }
        out.push((zs[idx], t));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cauchy-Riemann diagnostics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct HolomorphyReport {
    /// (z, f(z), |CR residual|) at interior points, finest stencil.
    pub residuals: Vec<(C64, C64, f64)>,
    pub max_residual: f64,
    /// Residual at the doubled spacing, for the scaling estimate.
    pub max_residual_coarse: f64,
    /// log2(coarse / fine); ~2 for holomorphic families, ~0 for
    /// anti-holomorphic ones.
    pub exponent: f64,
}

impl HolomorphyReport {
    pub fn to_value(&self) -> Value {
        json!({
            "max_residual": self.max_residual,
            "max_residual_coarse": self.max_residual_coarse,
            "exponent": self.exponent,
            "points": self.residuals.iter().map(|(z, f, r)| {
                json!({"z": [z.re, z.im], "f": [f.re, f.im], "cr_abs": r})
            }).collect::<Vec<_>>(),
        })
    }

    /// CSV rows: z_re, z_im, f_re, f_im, cr_abs.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z_re,z_im,f_re,f_im,cr_abs\n");
        for (z, f, r) in &self.residuals {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                jsonfmt::fmt_f64(z.re),
                jsonfmt::fmt_f64(z.im),
                jsonfmt::fmt_f64(f.re),
                jsonfmt::fmt_f64(f.im),
                jsonfmt::fmt_f64(*r)
            ));
        }
        s
    }
}

fn stencil_max(samples: &[C64], grid: &Grid, step: usize, h: f64) -> (Vec<(usize, usize, f64)>, f64)
{
    let mut out = Vec::new();
    let mut max_r = 0.0f64;
    for r in step..grid.rows - step {
        for c in step..grid.cols - step {
            let at = |rr: usize, cc: usize| samples[rr * grid.cols + cc];
            // z + h -> column + step; z + i h -> row + step
            let fx1 = at(r, c + step);
            let fx0 = at(r, c - step);
            let fy1 = at(r + step, c);
            let fy0 = at(r - step, c);
            let i = c64(0.0, 1.0);
            let res = (fx1 - fx0 + i * fy1 - i * fy0) / cre(4.0 * h * step as f64);
            let a = res.norm();
            max_r = max_r.max(a);
            out.push((r, c, a));
        }
    }
    (out, max_r)
}

/// Discrete Cauchy-Riemann residual of torsion samples over the grid,
/// evaluated at spacings h and 2h; the scaling exponent is
/// log2(max residual at 2h / max residual at h).
pub fn cr_residual(samples: &[(C64, C64)], grid: &Grid) -> Result<HolomorphyReport> {
    grid.validate()?;
    if samples.len() != grid.len() {
        return Err(Error::validation("sample count does not match the grid"));
    }
    if grid.rows < 5 || grid.cols < 5 {
        return Err(Error::validation(
            "grid must be at least 5x5 for the two-spacing CR stencil",
        ));
    }
    let f: Vec<C64> = samples.iter().map(|&(_, v)| v).collect();
    let (fine, max_fine) = stencil_max(&f, grid, 1, grid.h);
    let (_, max_coarse) = stencil_max(&f, grid, 2, grid.h);
    let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let floor = 1e-13 * scale / grid.h;
    let exponent = if max_fine <= floor && max_coarse <= floor {
        // both stencils vanish to rounding: the samples are holomorphic
        // to machine precision (e.g. polynomial of degree <= 2)
        2.0
    } else {
        (max_coarse.max(f64::MIN_POSITIVE) / max_fine.max(f64::MIN_POSITIVE)).log2()
    };
    let residuals = fine
        .into_iter()
        .map(|(r, c, a)| (grid.point(r, c), f[r * grid.cols + c], a))
        .collect();
    Ok(HolomorphyReport {
        residuals,
        max_residual: max_fine,
        max_residual_coarse: max_coarse,
        exponent,
    })
}

// ---------------------------------------------------------------------------
// Equal-modulus / locally-constant-phase detector
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVerdict {
    pub constant: bool,
    /// Estimated constant phase of f/g (circular mean), in (-pi, pi].
    pub theta: f64,
    /// Largest angular deviation from the estimate.
    pub max_deviation: f64,
}

/// Tests whether f/g has locally constant phase. Preconditions: both
/// sample sets nonvanishing and of equal modulus pointwise within
/// `modulus_tol` (relative) — this is the hypothesis of the equal-modulus
/// argument and is enforced, not assumed.
pub fn phase_constancy(
    f: &[C64],
    g: &[C64],
    modulus_tol: f64,
    phase_tol: f64,
) -> Result<PhaseVerdict> {
    if f.len() != g.len() || f.is_empty() {
        return Err(Error::validation("phase detector needs matching nonempty samples"));
    }
    let mut ratios = Vec::with_capacity(f.len());
    for (k, (&a, &b)) in f.iter().zip(g).enumerate() {
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(Error::validation(format!("vanishing sample at index {k}")));
        }
        if (a.norm() - b.norm()).abs() > modulus_tol * b.norm() {
            return Err(Error::validation(format!(
                "modulus mismatch at index {k}: |f| = {}, |g| = {}",
                a.norm(),
                b.norm()
            )));
        }
        let r = a / b;
        ratios.push(r.unscale(r.norm()));
    }
    let mean: C64 = ratios.iter().sum();
    if mean.norm() == 0.0 {
        return Ok(PhaseVerdict {
            constant: false,
            theta: 0.0,
            max_deviation: std::f64::consts::PI,
        });
    }
    let theta = mean.arg();
    let unit = mean.unscale(mean.norm());
    let max_deviation = ratios
        .iter()
        .map(|r| (r * unit.conj()).arg().abs())
        .fold(0.0, f64::max);
    Ok(PhaseVerdict {
        constant: max_deviation < phase_tol,
        theta,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detline::torsion_acyclic;
    use crate::linalg::{identity, ZERO};
    use crate::randgen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// C := W with negated, conjugated differential; J_k := M_k is then
    /// compatible with the unsigned cone block differential.
    fn cone_instance<R: Rng>(
        rng: &mut R,
        w: &GradedComplex,
    ) -> (GradedComplex, Vec<CMat>) {
        let d = w.degree();
        let ms: Vec<CMat> = w.dims.iter().map(|&m| randgen::random_invertible(rng, m)).collect();
        let mut bs = Vec::with_capacity(d);
        for k in 0..d {
            let minv = ms[k].clone().try_inverse().unwrap();
            bs.push(-(&ms[k + 1] * &w.boundaries[k] * minv));
        }
        let c = GradedComplex::new(w.dims.clone(), bs).unwrap();
        (c, ms)
    }

    #[test]
    fn cone_of_identity_has_unit_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let w = randgen::random_acyclic(&mut rng, 3, 3);
            let negated: Vec<CMat> = w.boundaries.iter().map(|b| -b).collect();
            let c = GradedComplex::new(w.dims.clone(), negated).unwrap();
            let j: Vec<CMat> = w.dims.iter().map(|&m| identity(m)).collect();
            let cone = cone(&w, &c, &j).unwrap();
            let t = torsion_acyclic(&cone.assembled).unwrap();
            assert!((t.norm() - 1.0).abs() < 1e-10, "|torsion| = {}", t.norm());
        }
    }

    #[test]
    fn commuting_chain_map_gets_pointed_at_sign_twist() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let w = randgen::random_acyclic(&mut rng, 3, 3);
        let j: Vec<CMat> = w.dims.iter().map(|&m| identity(m)).collect();
        // identity commutes with d, so the verbatim block fails...
        let err = cone(&w, &w, &j).unwrap_err();
        assert!(format!("{err}").contains("sign_twist"), "{err}");
        // ...and the twisted map assembles fine
        let cone2 = cone(&w, &w, &sign_twist(&j)).unwrap();
        let t = torsion_acyclic(&cone2.assembled).unwrap();
        assert!((t.norm() - 1.0).abs() < 1e-9, "|torsion| = {}", t.norm());
    }

    #[test]
    fn cone_over_zero_source_is_shifted_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let c = randgen::random_acyclic(&mut rng, 2, 3);
        let d = c.degree();
        let w = GradedComplex::new(
            vec![0; d + 1],
            (0..d).map(|_| CMat::zeros(0, 0)).collect(),
        )
        .unwrap();
        let j: Vec<CMat> = c.dims.iter().map(|&m| CMat::zeros(m, 0)).collect();
        let cone = cone(&w, &c, &j).unwrap();
        let tc = torsion_acyclic(&c).unwrap();
        let t = torsion_acyclic(&cone.assembled).unwrap();
        // the shift inverts the alternating exponent
        assert!((t * tc - ONE).norm() < 1e-9, "t = {t}, tc = {tc}");
    }

    #[test]
    fn cone_modulus_multiplicativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..40 {
            let w = randgen::random_acyclic(&mut rng, 3, 3);
            let (c, j) = cone_instance(&mut rng, &w);
            let cone = match cone(&w, &c, &j) {
                Ok(k) => k,
                Err(_) => continue,
            };
            let tw = torsion_acyclic(&w).unwrap().norm();
            let tc = torsion_acyclic(&c).unwrap().norm();
            let tk = torsion_acyclic(&cone.assembled).unwrap().norm();
            let corr = cone_det_correction(&j).unwrap();
            let lhs = tk * tw;
            let rhs = tc * corr;
            assert!(
                (lhs - rhs).abs() <= 1e-8 * rhs.max(1e-8),
                "law: {lhs} vs {rhs} (tw {tw} tc {tc} tk {tk} corr {corr})"
            );
        }
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

    fn grid5(center: C64, h: f64) -> Grid {
        Grid { center, h, rows: 5, cols: 5 }
    }

    #[test]
    fn family_torsion_is_the_entry() {
        let fam = explicit_scalar_family(grid5(cre(3.0), 0.01), |z| z);
        let ts = torsion_family(&fam).unwrap();
        for (z, t) in ts {
            assert!((t - z).norm() < 1e-12, "{t} vs {z}");
        }
    }

    #[test]
    fn circle_cw_family_is_z_minus_one() {
        let circle = crate::cw::tests::circle();
        let fam = AnalyticFamily {
            grid: grid5(cre(3.0), 0.05),
            payload: FamilyPayload::Cw {
                system: circle,
                n: 1,
                // alpha(t) = [[z]]
                images: vec![PolyMat { rows: 1, cols: 1, coeffs: vec![vec![vec![ZERO, ONE]]] }],
            },
        };
        let ts = torsion_family(&fam).unwrap();
        for (z, t) in &ts {
            assert!((t - (z - ONE)).norm() < 1e-10);
        }
        let report = cr_residual(&ts, &fam.grid).unwrap();
        assert!(report.max_residual < 1e-10, "residual {}", report.max_residual);
        assert!(report.exponent >= 1.7, "exponent {}", report.exponent);
    }

    #[test]
    fn constant_family_constant_values() {
        let fam = explicit_scalar_family(grid5(cre(2.0), 0.1), |_| cre(7.0));
        let ts = torsion_family(&fam).unwrap();
        assert!(ts.iter().all(|&(_, t)| (t - cre(7.0)).norm() < 1e-12));
    }

    #[test]
    fn stratum_crossing_detected() {
        let grid = grid5(cre(1.0), 0.5);
        // values pass through zero inside the grid: betti jumps
        let fam = explicit_scalar_family(grid, |z| z - ONE);
        let err = torsion_family(&fam).unwrap_err();
        assert!(format!("{err}").contains("stratum crossing"), "{err}");
    }

    #[test]
    fn cr_of_cubic_scales_quadratically() {
        let grid = grid5(cre(0.7), 0.01);
        let fam = explicit_scalar_family(grid.clone(), |z| z * z * z + cre(2.0) * z + cre(3.0));
        let ts = torsion_family(&fam).unwrap();
        let report = cr_residual(&ts, &grid).unwrap();
        assert!(report.exponent >= 1.7, "exponent {}", report.exponent);
        // third-order term leaves an h^2 f'''/6 residual
        assert!((report.max_residual - 1e-4).abs() < 1e-6, "{}", report.max_residual);
    }

    #[test]
    fn cr_of_conjugate_stays_order_one() {
        let grid = grid5(cre(0.3), 0.01);
        let fam = explicit_scalar_family(grid.clone(), |z| z.conj() + cre(2.0));
        let ts = torsion_family(&fam).unwrap();
        let report = cr_residual(&ts, &grid).unwrap();
        assert!((report.max_residual - 1.0).abs() < 1e-10, "{}", report.max_residual);
        assert!(report.max_residual >= 0.5);
        assert!(report.exponent.abs() < 0.1, "exponent {}", report.exponent);
    }

    #[test]
    fn cr_of_exact_square_is_machine_zero() {
        let grid = grid5(cre(1.5), 0.01);
        let samples: Vec<(C64, C64)> =
            grid.points().iter().map(|&z| (z, z * z)).collect();
        let report = cr_residual(&samples, &grid).unwrap();
        assert!(report.max_residual < 1e-11, "{}", report.max_residual);
        assert!(report.exponent >= 1.7);
    }

    #[test]
    fn phase_detector_examples() {
        let g: Vec<C64> = (1..=20).map(|k| cre(k as f64) + c64(0.0, 0.3)).collect();
        let w = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let f: Vec<C64> = g.iter().map(|&v| v * w).collect();
        let v = phase_constancy(&f, &g, 1e-9, 1e-9).unwrap();
        assert!(v.constant);
        assert!((v.theta - std::f64::consts::PI / 3.0).abs() < 1e-9);
        // identical samples: theta exactly zero
        let v = phase_constancy(&g, &g, 1e-12, 1e-12).unwrap();
        assert!(v.constant && v.theta == 0.0);
        // f = z g on the unit circle: modulus matches, phase varies
        let zs: Vec<C64> = (0..16)
            .map(|k| C64::from_polar(1.0, 0.4 * k as f64))
            .collect();
        let f2: Vec<C64> = g.iter().take(16).zip(&zs).map(|(&v, &z)| v * z).collect();
        let v = phase_constancy(&f2, &g[..16], 1e-9, 1e-3).unwrap();
        assert!(!v.constant);
        // modulus mismatch violates the precondition
        let f3: Vec<C64> = g.iter().map(|&v| v * cre(2.0)).collect();
        assert!(phase_constancy(&f3, &g, 1e-9, 1e-9).is_err());
    }

    #[test]
    fn family_json_round_trip() {
        let fam = explicit_scalar_family(grid5(cre(3.0), 0.01), |z| z);
        let v = fam.to_value();
        let back = AnalyticFamily::from_value(&v).unwrap();
        assert_eq!(fam.grid, back.grid);
        let circle = crate::cw::tests::circle();
        let fam = AnalyticFamily {
            grid: grid5(cre(3.0), 0.05),
            payload: FamilyPayload::Cw {
                system: circle,
                n: 1,
                images: vec![PolyMat { rows: 1, cols: 1, coeffs: vec![vec![vec![ZERO, ONE]]] }],
            },
        };
        let back = AnalyticFamily::from_value(&fam.to_value()).unwrap();
        match (&fam.payload, &back.payload) {
            (FamilyPayload::Cw { images: a, .. }, FamilyPayload::Cw { images: b, .. }) => {
                assert_eq!(a, b)
            }
            _ => panic!("mode lost in round trip"),
        }
    }
}
