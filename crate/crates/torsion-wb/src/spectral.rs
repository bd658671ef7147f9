//! Finite odd-signature-operator model.
//!
//! B = Gamma d + d Gamma on the total space of an odd-length complex
//! with chirality. B maps even degrees to even degrees, B^2 preserves
//! every degree, and restricting B to spectral subspaces of B^2 yields
//! the graded determinant and the element rho(lambda), whose
//! lambda-independence is the central consistency check of the crate.
//! The sign-refined eta invariant of a finite operator lives here too.

use num_complex::Complex64;

use crate::detline::{cohomology, CohomologyData, DetElement, Frame, GradedComplex};
use crate::error::{Error, Result};
use crate::linalg::{
    det, det_theta, eig, hcat, lstsq, norm, orthonormalize, AgmonAngle, CMat, C64, ONE,
};
use crate::refined::{self, Chirality};

/// Odd signature operator data: the full endomorphism on the direct sum
/// of all degrees, with the degree offsets needed to slice blocks.
#[derive(Debug, Clone)]
pub struct OddSignatureModel {
    pub complex: GradedComplex,
    pub chirality: Chirality,
    /// B on the total space (dimension = sum of dims).
    pub b_full: CMat,
    offsets: Vec<usize>,
}

pub const COMMUTATION_TOL: f64 = 1e-10;
/// Relative gap a spectral cut must keep from |eigenvalues of B^2|.
pub const GAP_TOL: f64 = 1e-6;

impl OddSignatureModel {
    pub fn total_dim(&self) -> usize {
        self.complex.total_dim()
    }

    pub fn offset(&self, j: usize) -> usize {
        self.offsets[j]
    }

    /// Degree-j diagonal block of B^2 (B^2 preserves degree).
    pub fn b_squared_block(&self, j: usize) -> CMat {
        let b2 = &self.b_full * &self.b_full;
        let (o, m) = (self.offsets[j], self.complex.dims[j]);
        b2.view((o, o), (m, m)).into_owned()
    }

    /// Embed a per-degree coordinate matrix into the total space.
    pub fn embed(&self, j: usize, cols: &CMat) -> CMat {
        let n = self.total_dim();
        let mut out = CMat::zeros(n, cols.ncols());
        out.view_mut((self.offsets[j], 0), (cols.nrows(), cols.ncols()))
            .copy_from(cols);
        out
    }

    /// Full-space differential (degree-raising).
    pub fn d_full(&self) -> CMat {
        let n = self.total_dim();
        let mut m = CMat::zeros(n, n);
        for (j, b) in self.complex.boundaries.iter().enumerate() {
            m.view_mut((self.offsets[j + 1], self.offsets[j]), b.shape())
                .copy_from(b);
        }
        m
    }

    /// Full-space chirality.
    pub fn gamma_full(&self) -> CMat {
        let n = self.total_dim();
        let d = self.complex.degree();
        let mut m = CMat::zeros(n, n);
        for j in 0..=d {
            let g = &self.chirality.blocks[j];
            m.view_mut((self.offsets[d - j], self.offsets[j]), g.shape())
                .copy_from(g);
        }
        m
    }
}

/// Assemble the odd signature operator and verify its symmetries.
pub fn odd_signature(c: &GradedComplex, g: &Chirality) -> Result<OddSignatureModel> {
    crate::detline::validate_complex(c)?;
    refined::validate_chirality(c, g)?;
    let mut offsets = Vec::with_capacity(c.dims.len());
    let mut at = 0;
    for &m in &c.dims {
        offsets.push(at);
        at += m;
    }
    let model = OddSignatureModel {
        complex: c.clone(),
        chirality: g.clone(),
        b_full: CMat::zeros(at, at),
        offsets,
    };
    let dm = model.d_full();
    let gm = model.gamma_full();
    let b = &gm * &dm + &dm * &gm;
    let scale = norm(&b).max(1.0);
    let comm = &gm * &b - &b * &gm;
    if norm(&comm) > COMMUTATION_TOL * scale {
        return Err(Error::numerical(format!(
            "Gamma does not commute with B (residual {:.3e})",
            norm(&comm) / scale
        )));
    }
    Ok(OddSignatureModel { b_full: b, ..model })
}

/// Which absolute-value window of the B^2 spectrum is selected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralCut {
    /// [0, lambda]
    UpTo(f64),
    /// (lambda, mu]
    Between(f64, f64),
    /// (lambda, infinity)
    Above(f64),
}

impl SpectralCut {
    pub fn contains(&self, abs: f64) -> bool {
        match *self {
            SpectralCut::UpTo(l) => abs <= l,
            SpectralCut::Between(l, m) => abs > l && abs <= m,
            SpectralCut::Above(l) => abs > l,
        }
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains(0.0)
    }

    fn circle_radii(&self) -> Vec<f64> {
        match *self {
            SpectralCut::UpTo(l) => vec![l],
            SpectralCut::Between(l, m) => vec![l, m],
            SpectralCut::Above(l) => vec![l],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectralCut::UpTo(l) => l >= 0.0,
            SpectralCut::Between(l, m) => l >= 0.0 && m > l,
            SpectralCut::Above(l) => l >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation("spectral cut bounds must satisfy 0 <= lambda < mu"))
        }
    }
}

/// Per-degree orthonormal bases of the spectral subspace of B^2.
pub struct SpectralSubspace {
    pub bases: Vec<CMat>,
    /// Distance from the cut circle(s) to the nearest |eigenvalue|.
    pub gap: f64,
}

/// Cluster tolerance handed to the eigensolver.
const EIG_TOL: f64 = 1e-8;

pub fn spectral_subspace(m: &OddSignatureModel, cut: SpectralCut) -> Result<SpectralSubspace> {
    cut.validate()?;
    let d = m.complex.degree();
    let mut max_abs = 0.0f64;
    let mut specs = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let b2 = m.b_squared_block(j);
        let spec = eig(&b2, EIG_TOL)?;
        for g in &spec.groups {
            max_abs = max_abs.max(g.value.norm());
        }
        specs.push(spec);
    }
    let mut gap = f64::INFINITY;
    for spec in &specs {
        for g in &spec.groups {
            for r in cut.circle_radii() {
                gap = gap.min((g.value.norm() - r).abs());
            }
        }
    }
    if gap < GAP_TOL * max_abs.max(1.0) {
        return Err(Error::validation(format!(
            "spectral cut touches the spectrum of B^2 (gap {gap:.3e})"
        )));
    }
    let mut bases = Vec::with_capacity(d + 1);
    for (j, spec) in specs.iter().enumerate() {
        let picked: Vec<&CMat> = spec
            .groups
            .iter()
            .filter(|g| cut.contains(g.value.norm()))
            .map(|g| &g.basis)
            .collect();
        let raw = if picked.is_empty() {
            CMat::zeros(m.complex.dims[j], 0)
        } else {
            hcat(&picked)
        };
        let q = if raw.ncols() == 0 { raw } else { orthonormalize(&raw)? };
        bases.push(q);
    }
    Ok(SpectralSubspace { bases, gap })
}

/// Positive/negative grading of a zero-free spectral subspace:
/// Omega_+ = Ker(d Gamma), Omega_- = Ker(d), intersected degree-wise.
pub struct PlusMinus {
    pub plus: Vec<CMat>,
    pub minus: Vec<CMat>,
}

pub fn split_pm(m: &OddSignatureModel, sub: &SpectralSubspace, cut: SpectralCut) -> Result<PlusMinus> {
    if !cut.excludes_zero() {
        return Err(Error::validation("the +/- grading requires 0 outside the cut interval"));
    }
    let dm = m.d_full();
    let gm = m.gamma_full();
    let dg = &dm * &gm;
    let d = m.complex.degree();
    let mut plus = Vec::with_capacity(d + 1);
    let mut minus = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let q = &sub.bases[j];
        if q.ncols() == 0 {
            plus.push(q.clone());
            minus.push(q.clone());
            continue;
        }
        let emb = m.embed(j, q);
        // kernels against the ambient operator scales: a restriction that
        // is numerically zero must count as zero, not as full rank
        let (_, ker_dg) =
            crate::linalg::rank_nullspace_abs(&(&dg * &emb), 1e-10 * norm(&dg).max(1e-300));
        let (_, ker_d) =
            crate::linalg::rank_nullspace_abs(&(&dm * &emb), 1e-10 * norm(&dm).max(1e-300));
        let p = q * ker_dg;
        let n = q * ker_d;
        if p.ncols() + n.ncols() != q.ncols() {
            return Err(Error::numerical(format!(
                "grading defect in degree {j}: {} + {} != {}",
                p.ncols(),
                n.ncols(),
                q.ncols()
            )));
        }
        plus.push(p);
        minus.push(n);
    }
    Ok(PlusMinus { plus, minus })
}

/// Restrict B to the span of the embedded orthonormal columns.
fn restrict_b(m: &OddSignatureModel, emb: &CMat) -> CMat {
    emb.adjoint() * &m.b_full * emb
}

/// Even-degree part of a per-degree family, embedded in the total space
/// and orthonormalized.
fn even_embedded(m: &OddSignatureModel, fam: &[CMat]) -> Result<CMat> {
    let n = m.total_dim();
    let mut blocks: Vec<CMat> = Vec::new();
    for (j, q) in fam.iter().enumerate() {
        if j % 2 == 0 && q.ncols() > 0 {
            blocks.push(m.embed(j, q));
        }
    }
    if blocks.is_empty() {
        return Ok(CMat::zeros(n, 0));
    }
    let refs: Vec<&CMat> = blocks.iter().collect();
    orthonormalize(&hcat(&refs))
}

/// Pick an admissible Agmon angle: the preferred one if admissible,
/// otherwise the angle in (-pi, 0) farthest from every spectral ray.
pub fn choose_theta(eigenvalues: &[C64], preferred: Option<f64>) -> Result<AgmonAngle> {
    let pi = std::f64::consts::PI;
    if let Some(t) = preferred {
        let th = AgmonAngle::new(t)?;
        if th.admissible_for(eigenvalues) {
            return Ok(th);
        }
        return Err(Error::validation(format!(
            "requested theta {t} is not admissible for the spectrum"
        )));
    }
    let default = AgmonAngle::new(-pi / 2.0)?;
    if default.admissible_for(eigenvalues) {
        return Ok(default);
    }
    // forbidden directions folded into (-pi, 0)
    let mut rays: Vec<f64> = eigenvalues
        .iter()
        .filter(|l| l.norm() > 0.0)
        .map(|l| {
            let mut a = l.arg();
            while a >= 0.0 {
                a -= pi;
            }
            while a < -pi {
                a += pi;
            }
            a
        })
        .collect();
    rays.push(-pi);
    rays.push(0.0);
    rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = (-pi / 2.0, 0.0);
    for w in rays.windows(2) {
        let width = w[1] - w[0];
        if width > best.1 {
            best = ((w[0] + w[1]) / 2.0, width);
        }
    }
    let th = AgmonAngle::new(best.0)?;
    if !th.admissible_for(eigenvalues) {
        return Err(Error::numerical("no admissible Agmon angle found"));
    }
    Ok(th)
}

/// Calibrated sign exponent of the graded determinant. With p_j the rank
/// of the differential restricted to the selected subspace in degree j,
/// N = sum_j binom(p_j + (j mod 2), 2). With this sign the
/// whole-spectrum graded determinant of an acyclic pair reproduces the
/// refined torsion and rho(lambda) is independent of lambda.
pub fn calibration_sign(ranks: &[usize]) -> i64 {
    let mut n = 0i64;
    for (j, &p) in ranks.iter().enumerate() {
        let q = p as i64 + (j % 2) as i64;
        n += q * (q - 1) / 2;
    }
    n
}

/// Ranks of the differential restricted to per-degree subspace bases.
fn restricted_ranks(m: &OddSignatureModel, bases: &[CMat]) -> Vec<usize> {
    let d = m.complex.degree();
    // rank decisions against the ambient differential scale, not the
    // (possibly numerically zero) restricted block's own noise
    let scale = m
        .complex
        .boundaries
        .iter()
        .map(crate::linalg::sigma_max)
        .fold(0.0f64, f64::max);
    let mut out = Vec::with_capacity(d);
    for j in 0..d {
        let dj = &m.complex.boundaries[j];
        let sub = bases[j + 1].adjoint() * dj * &bases[j];
        let (rank, _) = crate::linalg::rank_nullspace_abs(&sub, 1e-10 * scale);
        out.push(rank);
    }
    out
}

/// Graded determinant Det_theta(B restricted to Omega^even_+) divided by
/// Det_theta(-B restricted to Omega^even_-), times the calibrated sign.
pub fn graded_det(m: &OddSignatureModel, cut: SpectralCut, theta: Option<f64>) -> Result<C64> {
    let sub = spectral_subspace(m, cut)?;
    graded_det_on(m, &sub, cut, theta)
}

fn graded_det_on(
    m: &OddSignatureModel,
    sub: &SpectralSubspace,
    cut: SpectralCut,
    theta: Option<f64>,
) -> Result<C64> {
    let pm = split_pm(m, sub, cut)?;
    let plus = even_embedded(m, &pm.plus)?;
    let minus = even_embedded(m, &pm.minus)?;
    let bp = restrict_b(m, &plus);
    let bm = -restrict_b(m, &minus);
    let mut all = Vec::new();
    if bp.nrows() > 0 {
        all.extend(eig(&bp, EIG_TOL)?.eigenvalues());
    }
    if bm.nrows() > 0 {
        all.extend(eig(&bm, EIG_TOL)?.eigenvalues());
    }
    let th = choose_theta(&all, theta)?;
    let num = det_theta(&bp, th, EIG_TOL)?;
    let den = det_theta(&bm, th, EIG_TOL)?;
    let mut out = num / den;
    if calibration_sign(&restricted_ranks(m, &sub.bases)) % 2 != 0 {
        out = -out;
    }
    Ok(out)
}

/// The element rho(lambda): graded determinant over (lambda, infinity)
/// times the refined torsion of the small subcomplex, expressed against
/// the cohomology frame of the ambient complex.
pub fn rho_lambda(m: &OddSignatureModel, lambda: f64, theta: Option<f64>) -> Result<DetElement> {
    if lambda < 0.0 {
        return Err(Error::validation("lambda must be nonnegative"));
    }
    let h_full = cohomology(&m.complex, 1e-10)?;
    let small = spectral_subspace(m, SpectralCut::UpTo(lambda))?;
    let large_det = if small.bases.iter().map(|q| q.ncols()).sum::<usize>() == m.total_dim() {
        ONE
    } else {
        let cut = SpectralCut::Above(lambda);
        let large = spectral_subspace(m, cut)?;
        let mut v = graded_det_on(m, &large, cut, theta)?;
        // Koszul-type interaction between the two spectral parts: the
        // calibrated signs of the pieces compose to the sign of the whole
        // only after this rank cross term.
        let ps = restricted_ranks(m, &small.bases);
        let pl = restricted_ranks(m, &large.bases);
        let cross: usize = ps.iter().zip(&pl).map(|(a, b)| a * b).sum();
        if cross % 2 != 0 {
            v = -v;
        }
        v
    };
    let (rho_small, transport) = small_refined_torsion(m, &small, &h_full)?;
    Ok(DetElement {
        value: large_det * rho_small * transport,
        frame: Frame::Cohomology { betti: h_full.betti.clone() },
    })
}

/// Refined torsion of the subcomplex spanned by the small spectral
/// bases, returned in the small complex's own cohomology frame, plus the
/// determinant factor transporting that frame to the ambient one.
fn small_refined_torsion(
    m: &OddSignatureModel,
    small: &SpectralSubspace,
    h_full: &CohomologyData,
) -> Result<(C64, C64)> {
    let d = m.complex.degree();
    let dims: Vec<usize> = small.bases.iter().map(|q| q.ncols()).collect();
    if dims.iter().all(|&k| k == 0) {
        if !h_full.is_acyclic() {
            return Err(Error::numerical(
                "empty small subcomplex but nonzero ambient cohomology",
            ));
        }
        return Ok((ONE, ONE));
    }
    // restricted differential and chirality in the orthonormal bases
    let mut bs = Vec::with_capacity(d);
    for j in 0..d {
        let dj = &m.complex.boundaries[j];
        bs.push(small.bases[j + 1].adjoint() * dj * &small.bases[j]);
    }
    let sub = GradedComplex::new(dims.clone(), bs)?;
    let mut gblocks = Vec::with_capacity(d + 1);
    for j in 0..=d {
        gblocks.push(small.bases[d - j].adjoint() * &m.chirality.blocks[j] * &small.bases[j]);
    }
    let gsub = Chirality { blocks: gblocks };
    let h_sub = cohomology(&sub, 1e-10)?;
    if h_sub.betti != h_full.betti {
        return Err(Error::numerical(format!(
            "small subcomplex betti {:?} differ from ambient betti {:?}",
            h_sub.betti, h_full.betti
        )));
    }
    let rho = refined::refined_torsion_with(&sub, &gsub, crate::detline::sign_zero, Some(&h_sub))?;
    // transport: write each small cohomology class against the ambient
    // representatives modulo coboundaries
    let mut transport = ONE;
    for j in 0..=d {
        let b_j = h_full.betti[j];
        if b_j == 0 {
            continue;
        }
        let classes = &small.bases[j] * &h_sub.rep_bases[j];
        let inc = m.complex.boundary_into(j);
        let sys = hcat(&[&h_full.rep_bases[j], &inc]);
        let x = lstsq(&sys, &classes);
        let t = x.view((0, 0), (b_j, b_j)).into_owned();
        let dt = det(&t);
        if dt.norm() == 0.0 {
            return Err(Error::numerical(format!(
                "degenerate cohomology frame transport in degree {j}"
            )));
        }
        if j % 2 == 0 {
            transport *= dt;
        } else {
            transport /= dt;
        }
    }
    Ok((rho.value, transport))
}

/// Eta-invariant bookkeeping of a finite (not necessarily self-adjoint)
/// operator. Counts use algebraic multiplicities; eta is exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaData {
    /// Signed count: eigenvalues with Re > 0 minus those with Re < 0.
    pub eta_zero: i64,
    /// Algebraic multiplicity on the positive imaginary axis.
    pub m_plus: i64,
    /// Algebraic multiplicity on the negative imaginary axis.
    pub m_minus: i64,
    /// Algebraic multiplicity of the eigenvalue zero.
    pub m_zero: i64,
    /// Numerator of eta over 2.
    pub numerator: i64,
}

impl EtaData {
    pub fn eta(&self) -> f64 {
        self.numerator as f64 / 2.0
    }

    /// Exact rational rendering "p/q" in lowest terms.
    pub fn eta_string(&self) -> String {
        if self.numerator % 2 == 0 {
            format!("{}", self.numerator / 2)
        } else {
            format!("{}/2", self.numerator)
        }
    }
}

/// Relative tolerance snapping an eigenvalue onto an axis.
pub const AXIS_TOL: f64 = 1e-9;

pub fn eta_invariant(d: &CMat) -> Result<EtaData> {
    if d.nrows() != d.ncols() {
        return Err(Error::validation("eta invariant needs a square matrix"));
    }
    let scale = norm(d).max(f64::MIN_POSITIVE);
    let tol = AXIS_TOL * scale;
    let spec = eig(d, EIG_TOL)?;
    let (mut pos, mut neg, mut m_plus, mut m_minus, mut m_zero) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for g in &spec.groups {
        let l = g.value;
        let mult = g.multiplicity as i64;
        let n = l.norm();
        if n <= tol {
            m_zero += mult;
            continue;
        }
        if n < 10.0 * tol {
            return Err(Error::numerical(format!(
                "eigenvalue {l} is ambiguously close to zero"
            )));
        }
        if l.re.abs() <= tol {
            if l.im > 0.0 {
                m_plus += mult;
            } else {
                m_minus += mult;
            }
            continue;
        }
        if l.re.abs() < 10.0 * tol {
            return Err(Error::numerical(format!(
                "eigenvalue {l} is ambiguously close to the imaginary axis"
            )));
        }
        if l.re > 0.0 {
            pos += mult;
        } else {
            neg += mult;
        }
    }
    let eta_zero = pos - neg;
    Ok(EtaData {
        eta_zero,
        m_plus,
        m_minus,
        m_zero,
        numerator: eta_zero + m_plus - m_minus + m_zero,
    })
}

/// Apply an optional unit phase constant to a reported torsion value.
pub fn apply_phase(value: C64, phase: Option<Complex64>) -> C64 {
    match phase {
        Some(p) => value * p,
        None => value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, cre, identity, ZERO};
    use crate::randgen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar_model(b: f64, g: f64) -> OddSignatureModel {
        let c = GradedComplex::new(vec![1, 1], vec![CMat::from_row_slice(1, 1, &[cre(b)])]).unwrap();
        let gam =
            Chirality::from_lower_half(&c, vec![CMat::from_row_slice(1, 1, &[cre(g)])]).unwrap();
        odd_signature(&c, &gam).unwrap()
    }

    #[test]
    fn b_of_scalar_model() {
        let m = scalar_model(2.0, 1.0);
        // hand computation: B e0 = 2 e0, B e1 = 2 e1
        assert!((m.b_full[(0, 0)] - cre(2.0)).norm() < 1e-14);
        assert!((m.b_full[(1, 1)] - cre(2.0)).norm() < 1e-14);
        assert!(m.b_full[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn b_zero_when_d_zero() {
        let c = GradedComplex::new(vec![1, 1], vec![CMat::zeros(1, 1)]).unwrap();
        let g = Chirality::from_lower_half(&c, vec![identity(1)]).unwrap();
        let m = odd_signature(&c, &g).unwrap();
        assert_eq!(norm(&m.b_full), 0.0);
    }

    #[test]
    fn spectral_subspace_selects_windows() {
        // B^2 = diag(4,4) in the scalar model with b = 2
        let m = scalar_model(2.0, 1.0);
        let s = spectral_subspace(&m, SpectralCut::UpTo(1.0)).unwrap();
        assert!(s.bases.iter().all(|q| q.ncols() == 0));
        let s = spectral_subspace(&m, SpectralCut::Above(1.0)).unwrap();
        assert!(s.bases.iter().all(|q| q.ncols() == 1));
        assert!(spectral_subspace(&m, SpectralCut::UpTo(4.0)).is_err());
    }

    #[test]
    fn split_pm_scalar_model() {
        let m = scalar_model(2.0, 1.0);
        let s = spectral_subspace(&m, SpectralCut::Above(1.0)).unwrap();
        let pm = split_pm(&m, &s, SpectralCut::Above(1.0)).unwrap();
        // degree 0: d Gamma kills it -> plus; d does not -> minus empty
        assert_eq!(pm.plus[0].ncols(), 1);
        assert_eq!(pm.minus[0].ncols(), 0);
    }

    #[test]
    fn graded_det_scalar_model() {
        let m = scalar_model(2.0, 1.0);
        let v = graded_det(&m, SpectralCut::Above(1.0), None).unwrap();
        assert!((v - cre(2.0)).norm() < 1e-12, "got {v}");
        let m = scalar_model(2.0, -1.0);
        let v = graded_det(&m, SpectralCut::Above(1.0), None).unwrap();
        assert!((v + cre(2.0)).norm() < 1e-10, "got {v}");
    }

    #[test]
    fn graded_det_forced_ratio() {
        // one plus-eigenvalue 2 and one minus-eigenvalue -3 in even
        // degrees of a direct sum of scalar models
        let c = GradedComplex::new(
            vec![2, 2],
            vec![CMat::from_row_slice(2, 2, &[cre(2.0), ZERO, ZERO, cre(3.0)])],
        )
        .unwrap();
        let g = Chirality::from_lower_half(
            &c,
            vec![CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, cre(-1.0)])],
        )
        .unwrap();
        let m = odd_signature(&c, &g).unwrap();
        // B = diag(2, -3, 2, -3); on degree 0 both are in Omega_+
        let v = graded_det(&m, SpectralCut::Above(1.0), None).unwrap();
        assert!((v.norm() - 6.0).abs() < 1e-10, "got {v}");
        // whole-spectrum graded determinant agrees with refined torsion
        let t = refined::refined_torsion_scalar(&c, &g).unwrap();
        assert!((v - t).norm() < 1e-10, "graded {v} vs torsion {t}");
    }

    #[test]
    fn rho_lambda_scalar_model() {
        let m = scalar_model(2.0, 1.0);
        let r = rho_lambda(&m, 1.0, None).unwrap();
        assert!((r.value - cre(2.0)).norm() < 1e-12);
        // whole spectrum below the cut: equals refined torsion
        let r = rho_lambda(&m, 10.0, None).unwrap();
        let t = refined::refined_torsion_scalar(&m.complex, &m.chirality).unwrap();
        assert!((r.value - t).norm() < 1e-12);
        assert!((t - cre(2.0)).norm() < 1e-12);
    }

    #[test]
    fn rho_lambda_negative_chirality() {
        let m = scalar_model(2.0, -1.0);
        let below = rho_lambda(&m, 10.0, None).unwrap().value;
        let above = rho_lambda(&m, 1.0, None).unwrap().value;
        assert!((below + cre(2.0)).norm() < 1e-10, "below {below}");
        assert!((above - below).norm() < 1e-10, "above {above} below {below}");
    }

    #[test]
    fn rho_lambda_independent_on_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut tested = 0;
        for _ in 0..120 {
            let d = if rng.gen_bool(0.5) { 1 } else { 3 };
            let (c, g) = randgen::random_chirality_model(&mut rng, d, 3);
            let m = odd_signature(&c, &g).unwrap();
            let mut radii: Vec<f64> = (0..=d)
                .flat_map(|j| {
                    let spec = eig(&m.b_squared_block(j), EIG_TOL).unwrap();
                    spec.groups.iter().map(|gr| gr.value.norm()).collect::<Vec<_>>()
                })
                .collect();
            radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
            radii.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            // midpoints between consecutive distinct radii, plus outside
            let mut cuts = vec![];
            for w in radii.windows(2) {
                cuts.push((w[0] + w[1]) / 2.0);
            }
            cuts.push(radii.last().unwrap() * 2.0 + 1.0);
            if let Some(&r0) = radii.first() {
                if r0 > 1e-6 {
                    cuts.insert(0, r0 / 2.0);
                }
            }
            let vals: Vec<C64> = cuts
                .iter()
                .filter_map(|&l| rho_lambda(&m, l, None).ok().map(|e| e.value))
                .collect();
            if vals.len() < 2 {
                continue;
            }
            tested += 1;
            for w in vals.windows(2) {
                assert!(
                    (w[0] - w[1]).norm() <= 1e-8 * w[0].norm().max(1e-10),
                    "lambda dependence: {:?} on dims {:?}",
                    vals,
                    c.dims
                );
            }
        }
        assert!(tested >= 20, "only {tested} models exercised");
    }

    #[test]
    fn theta_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (c, g) = randgen::random_chirality_model(&mut rng, 3, 2);
        let m = odd_signature(&c, &g).unwrap();
        let thetas = [-0.1, -std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_2, -2.3561944901923449, -3.0];
        let mut vals = vec![];
        for t in thetas {
            if let Ok(v) = graded_det(&m, SpectralCut::Above(1e-3), Some(t)) {
                vals.push(v);
            }
        }
        assert!(vals.len() >= 2);
        for w in vals.windows(2) {
            assert!((w[0] - w[1]).norm() <= 1e-10 * w[0].norm());
        }
    }

    fn diag(vals: &[C64]) -> CMat {
        let n = vals.len();
        CMat::from_fn(n, n, |i, j| if i == j { vals[i] } else { ZERO })
    }

    #[test]
    fn eta_examples() {
        let e = eta_invariant(&diag(&[ONE, cre(-1.0)])).unwrap();
        assert_eq!((e.eta_zero, e.m_plus, e.m_minus, e.m_zero), (0, 0, 0, 0));
        assert_eq!(e.eta_string(), "0");

        let e = eta_invariant(&diag(&[cre(2.0), c64(0.0, 3.0), cre(-5.0)])).unwrap();
        assert_eq!((e.eta_zero, e.m_plus, e.m_minus, e.m_zero), (0, 1, 0, 0));
        assert_eq!(e.eta_string(), "1/2");

        let e = eta_invariant(&diag(&[ZERO, ZERO, c64(0.0, 1.0), c64(0.0, -1.0), cre(7.0)]))
            .unwrap();
        assert_eq!((e.eta_zero, e.m_plus, e.m_minus, e.m_zero), (1, 1, 1, 2));
        assert_eq!(e.eta_string(), "3/2");
    }

    #[test]
    fn eta_additive_and_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..100 {
            let a = randgen::random_offaxis_operator(&mut rng, 4);
            let b = randgen::random_offaxis_operator(&mut rng, 4);
            let ea = eta_invariant(&a).unwrap();
            let eb = eta_invariant(&b).unwrap();
            let eab = eta_invariant(&randgen::direct_sum(&a, &b)).unwrap();
            assert_eq!(eab.numerator, ea.numerator + eb.numerator);
            let en = eta_invariant(&(-&a)).unwrap();
            assert_eq!(en.numerator, -ea.numerator + 2 * ea.m_zero);
        }
    }

    #[test]
    fn eta_ambiguous_axis_rejected() {
        let scalei = c64(5e-9, 1.0);
        let d = diag(&[scalei, ONE]);
        // 5e-9 relative to norm ~ sqrt(2) sits in the ambiguity band
        assert!(eta_invariant(&d).is_err());
    }

    #[test]
    fn gamma_commutes_with_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let (c, g) = randgen::random_chirality_model(&mut rng, 3, 4);
            let m = odd_signature(&c, &g).unwrap();
            let gm = m.gamma_full();
            let r = &gm * &m.b_full - &m.b_full * &gm;
            assert!(norm(&r) <= 1e-10 * norm(&m.b_full).max(1.0));
        }
    }
}
