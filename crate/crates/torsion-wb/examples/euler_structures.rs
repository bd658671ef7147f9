//! Euler-structure bookkeeping on the circle: the closed-form torsion
//! lambda - 1, how shifting cell lifts rescales it by determinants of
//! holonomies, and the phase-constancy detector on paired sample sets.

use torsion_wb::corpus;
use torsion_wb::cw::{ft_torsion, shift_lifts, shift_ratio};
use torsion_wb::families::phase_constancy;
use torsion_wb::linalg::{c64, C64, ONE};

fn main() {
    let k = corpus::circle();

    println!("circle torsion vs closed form lambda - 1:");
    for l in [c64(3.0, 0.0), c64(0.5, 1.0), c64(-2.0, 0.3)] {
        let a = corpus::scalar_rep(&[l]).unwrap();
        let t = ft_torsion(&k, &a, false).unwrap();
        println!("  lambda = {l}: torsion {} (expected {})", t.value, l - ONE);
    }

    // shifting the 1-cell lift by t multiplies torsion by det(alpha(t))
    let l = c64(2.0, 1.0);
    let a = corpus::scalar_rep(&[l]).unwrap();
    let shifted = shift_lifts(&k, &[vec![], vec![1]]).unwrap();
    let t0 = ft_torsion(&k, &a, false).unwrap().value;
    let t1 = ft_torsion(&shifted, &a, false).unwrap().value;
    println!("shift of the 1-cell: ratio {} = {}", t1 / t0, shift_ratio(&k, &[vec![], vec![1]], &a).unwrap());

    // paired families differing by a constant phase
    let g: Vec<C64> = (1..=12).map(|k| c64(k as f64, 0.4)).collect();
    let w = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
    let f: Vec<C64> = g.iter().map(|&v| v * w).collect();
    let verdict = phase_constancy(&f, &g, 1e-9, 1e-9).unwrap();
    println!(
        "phase detector: constant = {}, theta = {} (pi/3 = {})",
        verdict.constant,
        verdict.theta,
        std::f64::consts::PI / 3.0
    );
}
