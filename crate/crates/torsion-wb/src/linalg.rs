//! Dense complex linear algebra substrate.
//!
//! Everything downstream works with `CMat`, a dense row-major complex
//! matrix. This module provides the general (non-Hermitian) eigensolver
//! with algebraic multiplicities, rank / nullspace with explicit
//! tolerances, and the branch-cut logarithm and determinant associated to
//! an Agmon angle in (-pi, 0).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cre(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Frobenius norm.
pub fn norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Horizontal concatenation. All blocks must share the row count.
pub fn hcat(blocks: &[&CMat]) -> CMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hcat row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

// ---------------------------------------------------------------------------
// JSON (de)serialization: a matrix is an array of rows, each entry [re, im].
// ---------------------------------------------------------------------------

pub fn mat_to_value(a: &CMat) -> Value {
    let rows: Vec<Value> = (0..a.nrows())
        .map(|i| {
            let row: Vec<Value> = (0..a.ncols())
                .map(|j| json!([a[(i, j)].re, a[(i, j)].im]))
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

pub fn mat_from_value(v: &Value) -> Result<CMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::validation("matrix must be an array of rows"))?;
    let nrows = rows.len();
    let mut data: Vec<C64> = Vec::new();
    let mut ncols = None;
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| Error::validation("matrix row must be an array"))?;
        match ncols {
            None => ncols = Some(row.len()),
            Some(n) if n != row.len() => {
                return Err(Error::validation("ragged matrix rows"))
            }
            _ => {}
        }
        for e in row {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::validation("matrix entry must be [re, im]"))?;
            let re = pair[0].as_f64().ok_or_else(|| Error::validation("entry re not a number"))?;
            let im = pair[1].as_f64().ok_or_else(|| Error::validation("entry im not a number"))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::validation("matrix entry not finite"));
            }
            data.push(c64(re, im));
        }
    }
    let ncols = ncols.unwrap_or(0);
    Ok(CMat::from_row_slice(nrows, ncols, &data))
}

// ---------------------------------------------------------------------------
// SVD helpers
// ---------------------------------------------------------------------------

pub struct SvdParts {
    /// Left singular vectors as columns, one per column of the input;
    /// columns belonging to zero singular values are zero.
    pub u: CMat,
    /// All ncols singular values, sorted descending.
    pub s: Vec<f64>,
    /// Full set of right singular vectors as columns (ncols x ncols).
    pub v: CMat,
}

/// One-sided Jacobi SVD. Chosen over a bidiagonalization approach for
/// its robustness on rank-deficient complex matrices; all matrices here
/// are small and dense, so the extra sweeps are cheap.
pub fn svd(a: &CMat) -> SvdParts {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = identity(n);
    let eps = 1e-15;
    // columns this far below the matrix norm are numerically zero and
    // are left alone, otherwise they shrink forever without meeting the
    // relative convergence criterion
    let fro = norm(a);
    let dead = (fro * 1e-150).powi(2);
    let mut rotated = true;
    let mut sweeps = 0;
    while rotated && sweeps < 60 {
        rotated = false;
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for i in 0..m {
                    alpha += w[(i, p)].norm_sqr();
                    beta += w[(i, q)].norm_sqr();
                    gamma += w[(i, p)].conj() * w[(i, q)];
                }
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == 0.0 || alpha <= dead || beta <= dead {
                    continue;
                }
                rotated = true;
                // phase the q column so the off-diagonal Gram entry is
                // real, then apply the standard real Jacobi rotation
                let phase = gamma.unscale(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)] * phase.conj();
                    w[(i, p)] = cre(cs) * wp - cre(sn) * wq;
                    w[(i, q)] = cre(sn) * wp + cre(cs) * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] * phase.conj();
                    v[(i, p)] = cre(cs) * vp - cre(sn) * vq;
                    v[(i, q)] = cre(sn) * vp + cre(cs) * vq;
                }
            }
        }
    }
    let mut sig: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sig[j].partial_cmp(&sig[i]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = CMat::zeros(m, n);
    let mut v_sorted = CMat::zeros(n, n);
    let mut s_sorted = vec![0.0; n];
    // zero-threshold relative to the largest column norm
    let smax = sig.iter().cloned().fold(0.0, f64::max);
    for (new, &old) in order.iter().enumerate() {
        s_sorted[new] = sig[old];
        for i in 0..n {
            v_sorted[(i, new)] = v[(i, old)];
        }
        if sig[old] > smax * 1e-300 && sig[old] > 0.0 {
            for i in 0..m {
                u[(i, new)] = w[(i, old)].unscale(sig[old]);
            }
        }
    }
    sig = s_sorted;
    SvdParts { u, s: sig, v: v_sorted }
}

/// Alias retained for call sites that need the full right-singular
/// basis; the Jacobi SVD always produces it.
pub fn svd_full_v(a: &CMat) -> SvdParts {
    svd(a)
}

/// Numerical rank and an orthonormal kernel basis.
///
/// rank = number of singular values > tol * sigma_max.
pub fn rank_nullspace(a: &CMat, tol: f64) -> (usize, CMat) {
    let smax = sigma_max(a);
    rank_nullspace_abs(a, tol * smax)
}

/// As `rank_nullspace`, with an absolute singular-value cutoff (used when
/// the rank decision must be taken relative to an external scale rather
/// than the matrix's own largest singular value).
pub fn rank_nullspace_abs(a: &CMat, cut: f64) -> (usize, CMat) {
    let cols = a.ncols();
    if cols == 0 {
        return (0, CMat::zeros(0, 0));
    }
    if a.nrows() == 0 {
        return (0, identity(cols));
    }
    let parts = svd_full_v(a);
    let rank = parts.s.iter().filter(|&&s| s > cut).count();
    let kernel = parts.v.columns(rank, cols - rank).into_owned();
    (rank, kernel)
}

/// Singular values in descending order (empty for empty matrices).
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    svd(a).s
}

/// Largest singular value (0 for empty matrices).
pub fn sigma_max(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    svd(a).s.first().copied().unwrap_or(0.0)
}

/// As `row_space_basis`, with an absolute singular-value cutoff.
pub fn row_space_basis_abs(a: &CMat, cut: f64) -> CMat {
    let (rank, _) = rank_nullspace_abs(a, cut);
    let parts = svd_full_v(a);
    parts.v.columns(0, rank).into_owned()
}

/// Orthonormal basis of the row space (orthogonal complement of the kernel).
pub fn row_space_basis(a: &CMat, tol: f64) -> CMat {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMat::zeros(a.ncols(), 0);
    }
    let parts = svd(a);
    let smax = parts.s.first().copied().unwrap_or(0.0);
    let rank = parts.s.iter().filter(|&&s| s > tol * smax).count();
    parts.v.columns(0, rank).into_owned()
}

/// Orthonormalize the columns of `a` (QR); errors if rank-deficient.
pub fn orthonormalize(a: &CMat) -> Result<CMat> {
    if a.ncols() == 0 {
        return Ok(a.clone());
    }
    let scale = norm(a);
    let parts = svd(a);
    let smin = parts.s.last().copied().unwrap_or(0.0);
    if smin <= 1e-12 * scale.max(1.0) {
        return Err(Error::numerical("basis is numerically rank-deficient"));
    }
    Ok(parts.u.columns(0, a.ncols()).into_owned())
}

/// Least-squares solve A x = b via SVD pseudo-inverse.
pub fn lstsq(a: &CMat, b: &CMat) -> CMat {
    let parts = svd_full_v(a);
    let smax = parts.s.first().copied().unwrap_or(0.0);
    let r = parts.s.iter().filter(|&&s| s > 1e-13 * smax).count();
    // x = V S^-1 U^H b on the numerically nonzero part of the spectrum
    let ut_b = parts.u.columns(0, parts.s.len()).adjoint() * b;
    let mut scaled = ut_b.rows(0, r).into_owned();
    for i in 0..r {
        for j in 0..scaled.ncols() {
            scaled[(i, j)] = scaled[(i, j)].unscale(parts.s[i]);
        }
    }
    parts.v.columns(0, r) * scaled
}

pub fn det(a: &CMat) -> C64 {
    if a.nrows() == 0 {
        return ONE;
    }
    a.clone().lu().determinant()
}

// ---------------------------------------------------------------------------
// General complex eigensolver: balancing + Hessenberg + shifted QR.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EigGroup {
    pub value: C64,
    pub multiplicity: usize,
    /// Orthonormal basis of the generalized eigenspace, one column per
    /// unit of algebraic multiplicity.
    pub basis: CMat,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub dim: usize,
    pub groups: Vec<EigGroup>,
}

impl Spectrum {
    /// All eigenvalues repeated by algebraic multiplicity.
    pub fn eigenvalues(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.dim);
        for g in &self.groups {
            out.extend(std::iter::repeat(g.value).take(g.multiplicity));
        }
        out
    }

    pub fn total_multiplicity(&self) -> usize {
        self.groups.iter().map(|g| g.multiplicity).sum()
    }
}

/// Parlett-Reinsch balancing with radix-2 scaling. Returns the balanced
/// matrix; the similarity is diagonal so eigenvalues are unchanged.
fn balance(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut m = a.clone();
    let radix: f64 = 2.0;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 50 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut row_norm = 0.0;
            let mut col_norm = 0.0;
            for j in 0..n {
                if j != i {
                    row_norm += m[(i, j)].norm();
                    col_norm += m[(j, i)].norm();
                }
            }
            if row_norm == 0.0 || col_norm == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = row_norm + col_norm;
            let mut cn = col_norm;
            while cn < row_norm / radix {
                f *= radix;
                cn *= radix * radix;
            }
            let rn = row_norm;
            while cn >= rn * radix {
                f /= radix;
                cn /= radix * radix;
            }
            if (row_norm / f + col_norm * f) < 0.95 * s {
                done = false;
                let fc = cre(f);
                for j in 0..n {
                    m[(i, j)] /= fc;
                    m[(j, i)] *= fc;
                }
            }
        }
    }
    m
}

/// Reduce to upper Hessenberg form by Householder reflections.
fn hessenberg(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        // annihilate column k below the subdiagonal
        let mut x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = if x[0].norm() == 0.0 {
            cre(-xnorm)
        } else {
            -x[0].unscale(x[0].norm()).scale(xnorm)
        };
        x[0] -= alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in x.iter_mut() {
            *z = z.unscale(vnorm);
        }
        // H := (I - 2vv^H) H (I - 2vv^H)
        for j in 0..n {
            let dot: C64 = x.iter().enumerate().map(|(i, v)| v.conj() * h[(k + 1 + i, j)]).sum();
            let two_dot = dot * cre(2.0);
            for (i, v) in x.iter().enumerate() {
                h[(k + 1 + i, j)] -= *v * two_dot;
            }
        }
        for i in 0..n {
            let dot: C64 = x.iter().enumerate().map(|(jj, v)| h[(i, k + 1 + jj)] * *v).sum();
            let two_dot = dot * cre(2.0);
            for (jj, v) in x.iter().enumerate() {
                h[(i, k + 1 + jj)] -= two_dot * v.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Eigenvalues of a general complex matrix by single-shift QR iteration on
/// the Hessenberg form. Unordered, repeated by multiplicity.
fn qr_eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let scale = norm(a);
    if scale == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let mut h = hessenberg(&balance(a));
    let eps = f64::EPSILON;
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n - 1; // active block is 0..=hi
    let mut iter_since_deflation = 0usize;
    let mut total_iter = 0usize;
    let max_total = 60 * n;
    loop {
        // zero out negligible subdiagonals
        for i in 1..=hi {
            let s = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(i, i - 1)].norm() <= eps * s {
                h[(i, i - 1)] = ZERO;
            }
        }
        // deflate converged trailing eigenvalues
        while hi > 0 && h[(hi, hi - 1)] == ZERO {
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            iter_since_deflation = 0;
        }
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // find the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != ZERO {
            lo -= 1;
        }
        if total_iter >= max_total {
            let resid = (1..=hi).map(|i| h[(i, i - 1)].norm()).fold(0.0, f64::max);
            return Err(Error::numerical(format!(
                "eigensolver failed to converge; max subdiagonal residual {resid:.3e}"
            )));
        }
        total_iter += 1;
        iter_since_deflation += 1;
        // Wilkinson shift from the trailing 2x2 of the active block
        let shift = if iter_since_deflation % 20 == 0 {
            // exceptional shift to break symmetry stalls
            h[(hi, hi)] + cre(1.5) * h[(hi, hi - 1)].norm() * ONE
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let tr = a11 + a22;
            let disc = (tr * tr - cre(4.0) * (a11 * a22 - a12 * a21)).sqrt();
            let l1 = (tr + disc) * cre(0.5);
            let l2 = (tr - disc) * cre(0.5);
            if (l1 - a22).norm() <= (l2 - a22).norm() {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

/// One explicit single-shift QR sweep on the active window lo..=hi.
fn qr_step(h: &mut CMat, lo: usize, hi: usize, shift: C64) {
    let n = h.nrows();
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    // QR by Givens rotations on the subdiagonal
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let f = h[(k, k)];
        let g = h[(k + 1, k)];
        let (cth, sth) = givens(f, g);
        rots.push((cth, sth));
        for j in k..n.min(hi + 1) {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = cre(cth) * a + sth * b;
            h[(k + 1, j)] = -sth.conj() * a + cre(cth) * b;
        }
    }
    // RQ: apply the conjugated rotations on the right
    for (k, (cth, sth)) in rots.iter().enumerate() {
        let k = lo + k;
        let top = if k == 0 { 0 } else { lo.min(k.saturating_sub(0)) };
        let _ = top;
        for i in lo..=(k + 1).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * cre(*cth) + b * sth.conj();
            h[(i, k + 1)] = -b_mul_s(a, *sth) + b * cre(*cth);
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

#[inline]
fn b_mul_s(a: C64, s: C64) -> C64 {
    a * s
}

/// Givens rotation zeroing g: returns (c, s) with c real, so that
/// [c s; -conj(s) c] * [f; g] = [r; 0].
fn givens(f: C64, g: C64) -> (f64, C64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, ZERO);
    }
    let fn_ = f.norm();
    let r = (fn_ * fn_ + gn * gn).sqrt();
    if fn_ == 0.0 {
        // pure swap with phase
        (0.0, g.conj().unscale(gn))
    } else {
        let c = fn_ / r;
        let s = f.unscale(fn_) * g.conj().unscale(r);
        (c, s)
    }
}

/// Eigenvalues with algebraic multiplicities and generalized eigenspaces.
///
/// Eigenvalues whose pairwise distance is below `tol * ||A||` are merged
/// into one group; groups are ordered by (Re, Im) lexicographically.
pub fn eig(a: &CMat, tol: f64) -> Result<Spectrum> {
    if a.nrows() != a.ncols() {
        return Err(Error::validation("eig: matrix must be square"));
    }
    if tol <= 0.0 {
        return Err(Error::validation("eig: tol must be positive"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Spectrum { dim: 0, groups: vec![] });
    }
    let scale = norm(a).max(f64::MIN_POSITIVE);
    let vals = qr_eigenvalues(a)?;
    // cluster by union-find on pairwise distance
    let thresh = tol * scale;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() < thresh {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut clusters: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        clusters.entry(r).or_default().push(i);
    }
    let mut groups: Vec<EigGroup> = Vec::new();
    for (_, members) in clusters {
        let m = members.len();
        let mean = members.iter().map(|&i| vals[i]).sum::<C64>() / cre(m as f64);
        let basis = generalized_eigenspace(a, mean, m);
        groups.push(EigGroup { value: mean, multiplicity: m, basis });
    }
    groups.sort_by(|x, y| {
        (x.value.re, x.value.im)
            .partial_cmp(&(y.value.re, y.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(Spectrum { dim: n, groups })
}

/// Orthonormal basis of Ker (A - lambda I)^m, dimension forced to m by
/// taking the m right singular vectors of smallest singular value.
fn generalized_eigenspace(a: &CMat, lambda: C64, m: usize) -> CMat {
    let n = a.nrows();
    let shifted = a - identity(n) * lambda;
    let scale = norm(&shifted);
    if scale == 0.0 {
        return identity(n).columns(0, m).into_owned();
    }
    let mut p = identity(n);
    let normalized = shifted / cre(scale);
    for _ in 0..m {
        p = &p * &normalized;
    }
    let parts = svd_full_v(&p);
    parts.v.columns(n - m, m).into_owned()
}

// ---------------------------------------------------------------------------
// Agmon angles, branch-cut logarithm, Det_theta
// ---------------------------------------------------------------------------

/// Angular tolerance used to decide that a spectrum touches a branch ray.
pub const ANGULAR_TOL: f64 = 1e-9;

/// An Agmon angle: a ray direction theta in (-pi, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgmonAngle {
    theta: f64,
}

impl AgmonAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > -std::f64::consts::PI && theta < 0.0 {
            Ok(AgmonAngle { theta })
        } else {
            Err(Error::validation(format!(
                "Agmon angle must lie in (-pi, 0), got {theta}"
            )))
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// True when no eigenvalue lies on the rays arg = theta or
    /// arg = theta + pi within the angular tolerance.
    pub fn admissible_for(&self, eigenvalues: &[C64]) -> bool {
        eigenvalues.iter().all(|&lam| {
            if lam.norm() == 0.0 {
                return true;
            }
            let d1 = ray_distance(lam.arg(), self.theta);
            let d2 = ray_distance(lam.arg(), self.theta + std::f64::consts::PI);
            d1 >= ANGULAR_TOL && d2 >= ANGULAR_TOL
        })
    }
}

fn ray_distance(arg: f64, ray: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut d = (arg - ray) % two_pi;
    if d < 0.0 {
        d += two_pi;
    }
    d.min(two_pi - d)
}

/// Branch of log with Im log in (theta, theta + 2 pi).
pub fn log_branch(lambda: C64, theta: AgmonAngle) -> Result<C64> {
    if lambda.norm() == 0.0 {
        return Err(Error::validation("log_branch: lambda must be nonzero"));
    }
    let th = theta.theta();
    if ray_distance(lambda.arg(), th) < ANGULAR_TOL {
        return Err(Error::validation(
            "log_branch: lambda lies on the branch ray (inadmissible angle)",
        ));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut arg = lambda.arg();
    while arg <= th {
        arg += two_pi;
    }
    while arg > th + two_pi {
        arg -= two_pi;
    }
    Ok(c64(lambda.norm().ln(), arg))
}

/// Det_theta(A) = exp(sum of multiplicity-weighted branch logs), together
/// with the accumulated imaginary part (phase bookkeeping).
pub fn det_theta_with_phase(a: &CMat, theta: AgmonAngle, tol: f64) -> Result<(C64, f64)> {
    if a.nrows() != a.ncols() {
        return Err(Error::validation("det_theta: matrix must be square"));
    }
    if a.nrows() == 0 {
        return Ok((ONE, 0.0));
    }
    let spec = eig(a, tol)?;
    let scale = norm(a);
    let mut log_sum = ZERO;
    for g in &spec.groups {
        if g.value.norm() <= tol * scale {
            return Err(Error::validation("det_theta: matrix is singular"));
        }
    }
    if !theta.admissible_for(&spec.eigenvalues()) {
        return Err(Error::validation(
            "det_theta: theta is not admissible for the spectrum",
        ));
    }
    for g in &spec.groups {
        log_sum += log_branch(g.value, theta)? * cre(g.multiplicity as f64);
    }
    Ok((log_sum.exp(), log_sum.im))
}

pub fn det_theta(a: &CMat, theta: AgmonAngle, tol: f64) -> Result<C64> {
    det_theta_with_phase(a, theta, tol).map(|(d, _)| d)
}
