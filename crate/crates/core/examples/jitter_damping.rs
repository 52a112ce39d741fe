//! Compares the numerically smeared diagonal of M_H(t) with its analytic
//! Gaussian damping 1/2 + 1/2·exp(-2π²σ²)·cos(2πt).

use std::f64::consts::PI;

use timetomo::measurement::{jittered_operator, JitterModel};
use timetomo::{DynamicsParams, Polarization};

fn main() -> timetomo::Result<()> {
    let p = DynamicsParams::default();
    let h = Polarization::H.projector();
    println!(
        "{:>6} {:>8} {:>12} {:>12}",
        "sigma", "nodes", "max_err", "damping"
    );
    for sigma in [0.05, 0.1, 0.2, 0.3, 0.5, 0.75] {
        let j = JitterModel::new(sigma)?;
        let damp = (-2.0 * PI * PI * sigma * sigma).exp();
        let mut worst: f64 = 0.0;
        for k in 0..=400 {
            let t = 2.0 * k as f64 / 400.0;
            let m = jittered_operator(&h, &p, &j, t)?.matrix;
            worst = worst.max((m[(0, 0)].re - (0.5 + 0.5 * damp * (2.0 * PI * t).cos())).abs());
        }
        println!(
            "{sigma:>6} {:>8} {worst:>12.3e} {damp:>12.6}",
            j.weights().len()
        );
    }
    Ok(())
}
