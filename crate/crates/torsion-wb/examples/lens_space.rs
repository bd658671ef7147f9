//! Combinatorial torsion of the lens space L(5,1) twisted by a
//! representation of Z/5, with the classical modulus 2 sin(pi/5) to a
//! power, plus the Euler-structure shift law and the orientation flip.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torsion_wb::corpus;
use torsion_wb::cw::{ft_torsion, shift_lifts, shift_ratio, Word};

fn main() {
    let k = corpus::lens(5);
    let a = corpus::scalar_rep(&[corpus::zeta(5)]).unwrap();

    let t = ft_torsion(&k, &a, false).unwrap();
    let s = 2.0 * (std::f64::consts::PI / 5.0).sin();
    println!("torsion of L(5,1): {}", t.value);
    println!("modulus {} vs (2 sin pi/5)^±2 = {} / {}", t.value.norm(), s.powi(-2), s.powi(2));

    // shifting the cell lifts multiplies torsion by a determinant ratio
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shifts: Vec<Word> = k
        .cells
        .iter()
        .map(|_| {
            use rand::Rng;
            let len = rng.gen_range(0..3);
            (0..len).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
        })
        .collect();
    let shifted = shift_lifts(&k, &shifts).unwrap();
    let t1 = ft_torsion(&shifted, &a, false).unwrap();
    let predicted = shift_ratio(&k, &shifts, &a).unwrap();
    println!("shift law: ratio {} predicted {}", t1.value / t.value, predicted);

    // orientation flip is the sign (-1)^n in the fiber dimension
    let flipped = ft_torsion(&k, &a, true).unwrap();
    println!("orientation flip (n = 1): {} -> {}", t.value, flipped.value);
    assert_eq!(flipped.value, -t.value);
}
