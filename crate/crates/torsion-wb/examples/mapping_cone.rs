//! Mapping cones: the block differential convention, the sign twist for
//! commuting chain maps, and the modulus form of the multiplicativity
//! law.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torsion_wb::detline::torsion_acyclic;
use torsion_wb::families::{cone, cone_det_correction, sign_twist};
use torsion_wb::linalg::{identity, CMat};
use torsion_wb::randgen;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let w = randgen::random_acyclic(&mut rng, 3, 3);
    let id: Vec<CMat> = w.dims.iter().map(|&m| identity(m)).collect();

    // the identity commutes with the differential, so the unsigned
    // block differential does not square to zero...
    match cone(&w, &w, &id) {
        Err(e) => println!("verbatim block with commuting J:\n  {e}\n"),
        Ok(_) => unreachable!(),
    }

    // ...while the degree-alternating twist assembles cleanly
    let k = cone(&w, &w, &sign_twist(&id)).unwrap();
    let t = torsion_acyclic(&k.assembled).unwrap();
    println!("cone of the identity: |torsion| = {}", t.norm());

    // modulus multiplicativity for a degreewise-invertible cone map
    let js: Vec<CMat> = w.dims.iter().map(|&m| randgen::random_invertible(&mut rng, m)).collect();
    let mut bs = Vec::new();
    for j in 0..w.degree() {
        let jinv = js[j].clone().try_inverse().unwrap();
        bs.push(-(&js[j + 1] * &w.boundaries[j] * jinv));
    }
    let c = torsion_wb::detline::GradedComplex::new(w.dims.clone(), bs).unwrap();
    let k = cone(&w, &c, &js).unwrap();
    let (tw, tc, tk) = (
        torsion_acyclic(&w).unwrap().norm(),
        torsion_acyclic(&c).unwrap().norm(),
        torsion_acyclic(&k.assembled).unwrap().norm(),
    );
    let corr = cone_det_correction(&js).unwrap();
    println!("modulus law: |tau(Cone)|*|tau(W)| = {:.12e}", tk * tw);
    println!("             |tau(C)|*correction  = {:.12e}", tc * corr);
}
