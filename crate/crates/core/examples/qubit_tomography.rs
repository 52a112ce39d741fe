//! One qubit through the whole pipeline: six time-tagged counts, maximum
//! likelihood reconstruction and fidelity, with and without jitter.

use timetomo::counts::{qubit_count_set, stream_rng, NoiseConfig, ESTIMATOR_STREAM};
use timetomo::estimator::{estimate_state, EstimatorConfig};
use timetomo::measurement::JitterModel;
use timetomo::metrics::{fidelity, trace_distance};
use timetomo::states::bloch_state;
use timetomo::{BlochParams, DynamicsParams};

fn main() -> timetomo::Result<()> {
    let p = DynamicsParams::default();
    let input = BlochParams::new(0.8, 1.1, 2.3)?;
    let rho = bloch_state(&input)?;
    println!("input Bloch vector {:?}", rho.bloch_vector()?);
    for sigma in [0.0, 0.1, 0.3] {
        let j = JitterModel::new(sigma)?;
        let noise = NoiseConfig::new(1000.0, 42, true)?;
        let records = qubit_count_set(&rho, &p, &j, &noise, 0)?;
        let est = estimate_state(
            &records,
            2,
            1000.0,
            &p,
            &EstimatorConfig::default(),
            &mut stream_rng(42, 0, ESTIMATOR_STREAM),
        )?;
        println!("\nsigma = {sigma}");
        for r in &records {
            println!(
                "  t = {:<5} n_E = {:>8.2} n_M = {:>8.2}",
                r.t_i, r.expected, r.measured
            );
        }
        let b = est.rho_out.bloch_vector()?;
        println!(
            "  estimate [{:.4}, {:.4}, {:.4}] fidelity {:.5} trace distance {:.5} ({} iterations)",
            b[0],
            b[1],
            b[2],
            fidelity(&rho, &est.rho_out)?,
            trace_distance(&rho, &est.rho_out)?,
            est.iterations
        );
    }
    Ok(())
}
