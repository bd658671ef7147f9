//! Seeded random model generation for property suites.
//!
//! Complexes are built exactly: start from a direct sum of elementary
//! two-term pieces and harmonic generators (so the composition law holds
//! to machine precision and betti numbers are known), then conjugate by
//! well-conditioned random base changes in every degree.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::detline::GradedComplex;
use crate::linalg::{c64, cre, identity, norm, svd, CMat, ZERO};
use crate::refined::Chirality;

pub type Seeded = ChaCha8Rng;

fn random_entry<R: Rng>(rng: &mut R) -> crate::linalg::C64 {
    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_entry(rng))
}

/// Random invertible matrix with condition guard: resampled until the
/// smallest singular value is above 0.1 relative to the norm.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    loop {
        let m = random_matrix(rng, n, n);
        let parts = svd(&m);
        let smin = parts.s.last().copied().unwrap_or(0.0);
        if smin > 0.1 * norm(&m).max(1.0) / (n as f64) {
            return m;
        }
    }
}

/// Random complex with length <= max_d and per-degree dimensions
/// <= max_dim, generated from elementary pieces and base-changed.
pub fn random_complex<R: Rng>(rng: &mut R, max_d: usize, max_dim: usize) -> GradedComplex {
    let d = rng.gen_range(1..=max_d);
    let dims: Vec<usize> = (0..=d).map(|_| rng.gen_range(1..=max_dim)).collect();
    random_complex_with_dims(rng, &dims)
}

/// Random acyclic complex: dims are chosen so that full cancellation is
/// possible, boundaries have exact complementary ranks and no harmonic
/// generators.
pub fn random_acyclic<R: Rng>(rng: &mut R, max_d: usize, max_dim: usize) -> GradedComplex {
    let d = rng.gen_range(1..=max_d);
    // pick pair counts p_j = rank of boundary j, then m_j = p_{j-1} + p_j
    // with p_{-1} = p_d = 0; acyclic iff the ranks exactly tile the dims.
    loop {
        let p: Vec<usize> = (0..d).map(|_| rng.gen_range(0..=max_dim / 2)).collect();
        let dims: Vec<usize> = (0..=d)
            .map(|j| {
                let before = if j == 0 { 0 } else { p[j - 1] };
                let after = if j == d { 0 } else { p[j] };
                before + after
            })
            .collect();
        if dims.iter().all(|&m| m >= 1) {
            return build_from_ranks(rng, &dims, &p);
        }
    }
}

/// Random complex with the given dims (ranks are sampled to fit).
pub fn random_complex_with_dims<R: Rng>(rng: &mut R, dims: &[usize]) -> GradedComplex {
    let d = dims.len() - 1;
    // sample feasible ranks p_j <= min(m_j - p_{j-1}, m_{j+1})
    let mut p = vec![0usize; d];
    let mut used_prev = 0usize;
    for j in 0..d {
        let cap = (dims[j] - used_prev).min(dims[j + 1]);
        p[j] = if cap == 0 { 0 } else { rng.gen_range(0..=cap) };
        used_prev = p[j];
    }
    build_from_ranks(rng, dims, &p)
}

/// Assemble a complex whose boundary j sends the last p_j basis vectors
/// of degree j onto the first p_j of degree j+1, then conjugate every
/// degree by a random invertible base change.
fn build_from_ranks<R: Rng>(rng: &mut R, dims: &[usize], p: &[usize]) -> GradedComplex {
    let d = dims.len() - 1;
    let mut boundaries: Vec<CMat> = Vec::with_capacity(d);
    for j in 0..d {
        let mut b = CMat::zeros(dims[j + 1], dims[j]);
        for k in 0..p[j] {
            let col = dims[j] - p[j] + k;
            b[(k, col)] = random_entry(rng) + cre(2.0); // keep away from 0
        }
        boundaries.push(b);
    }
    // base changes: b_j -> M_{j+1} b_j M_j^{-1}
    let ms: Vec<CMat> = dims.iter().map(|&m| random_invertible(rng, m)).collect();
    let minvs: Vec<CMat> = ms.iter().map(|m| m.clone().try_inverse().unwrap()).collect();
    for j in 0..d {
        boundaries[j] = &ms[j + 1] * &boundaries[j] * &minvs[j];
    }
    GradedComplex::new(dims.to_vec(), boundaries).unwrap()
}

/// Random chirality-compatible model: odd length d, palindromic dims,
/// random invertible lower-half chirality blocks, and a boundary that
/// composes to zero.
pub fn random_chirality_model<R: Rng>(
    rng: &mut R,
    d: usize,
    max_dim: usize,
) -> (GradedComplex, Chirality) {
    assert!(d % 2 == 1, "chirality needs odd length");
    let r = (d + 1) / 2;
    loop {
        let half: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=max_dim)).collect();
        let dims: Vec<usize> = (0..=d).map(|j| half[j.min(d - j)]).collect();
        let c = random_complex_with_dims(rng, &dims);
        let gamma: Vec<CMat> = (0..r).map(|j| random_invertible(rng, dims[j])).collect();
        let g = Chirality::from_lower_half(&c, gamma);
        if let Ok(g) = g {
            return (c, g);
        }
    }
}

/// Random matrix with eigenvalues forced off both coordinate axes, for
/// eta-invariant property runs: diagonal blocks with generic complex
/// entries conjugated by a random base change.
pub fn random_offaxis_operator<R: Rng>(rng: &mut R, max_dim: usize) -> CMat {
    let n = rng.gen_range(1..=max_dim);
    let mut diag = CMat::zeros(n, n);
    for i in 0..n {
        // keep a safe margin from both axes
        let re = rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let im = rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        diag[(i, i)] = c64(re, im);
    }
    // occasional Jordan coupling between equal diagonal entries
    for i in 0..n.saturating_sub(1) {
        if rng.gen_bool(0.2) {
            diag[(i, i + 1)] = cre(1.0);
            let v = diag[(i, i)];
            diag[(i + 1, i + 1)] = v;
        }
    }
    let m = random_invertible(rng, n);
    let minv = m.clone().try_inverse().unwrap();
    &m * diag * &minv
}

/// Direct sum of two square matrices.
pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows() + b.nrows();
    let mut out = CMat::from_element(n, n, ZERO);
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Identity-based chirality on a palindromic complex (used by examples).
pub fn unit_chirality(c: &GradedComplex) -> crate::error::Result<Chirality> {
    let d = c.degree();
    let r = (d + 1) / 2;
    let gamma = (0..r).map(|j| identity(c.dims[j])).collect();
    Chirality::from_lower_half(c, gamma)
}
