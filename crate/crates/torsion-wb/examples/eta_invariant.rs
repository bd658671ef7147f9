//! Sign-refined eta invariant of a finite operator: half-plane counting
//! with careful bookkeeping on the imaginary axis and at zero, reported
//! as an exact rational.

use torsion_wb::linalg::{c64, cre, CMat, C64, ONE, ZERO};
use torsion_wb::randgen;
use torsion_wb::spectral::eta_invariant;

fn diag(vals: &[C64]) -> CMat {
    let n = vals.len();
    CMat::from_fn(n, n, |i, j| if i == j { vals[i] } else { ZERO })
}

fn main() {
    let examples: [(&str, CMat); 3] = [
        ("diag(1, -1)", diag(&[ONE, cre(-1.0)])),
        ("diag(2, 3i, -5)", diag(&[cre(2.0), c64(0.0, 3.0), cre(-5.0)])),
        (
            "diag(0, 0, i, -i, 7)",
            diag(&[ZERO, ZERO, c64(0.0, 1.0), c64(0.0, -1.0), cre(7.0)]),
        ),
    ];
    for (name, d) in examples {
        let e = eta_invariant(&d).unwrap();
        println!(
            "{name:24} eta = {:>4}   (plane asymmetry {}, axis +{}/-{}, kernel {})",
            e.eta_string(),
            e.eta_zero,
            e.m_plus,
            e.m_minus,
            e.m_zero
        );
    }

    // additivity under direct sums, exact in the rational numerators
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let a = randgen::random_offaxis_operator(&mut rng, 3);
    let b = randgen::random_offaxis_operator(&mut rng, 3);
    let (ea, eb) = (eta_invariant(&a).unwrap(), eta_invariant(&b).unwrap());
    let eab = eta_invariant(&randgen::direct_sum(&a, &b)).unwrap();
    println!(
        "additivity: {} + {} = {}",
        ea.eta_string(),
        eb.eta_string(),
        eab.eta_string()
    );
    assert_eq!(eab.numerator, ea.numerator + eb.numerator);
}
