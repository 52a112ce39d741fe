//! Bloch-ball trajectory of the time-evolved H projector for a few jitter
//! values, written as CSV to the directory given on the command line
//! (default `out/trajectory`).

use std::path::PathBuf;

use timetomo::harness::{
    emit_trajectory, write_trajectory_outputs, OperatorSpec, TrajectoryConfig,
};

fn main() -> timetomo::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out/trajectory"));
    let cfg = TrajectoryConfig {
        operator: OperatorSpec::Named("H".into()),
        sigma_list: vec![0.0, 0.1, 0.2, 0.3, 0.5, 0.75],
        ..Default::default()
    };
    let trajectories = emit_trajectory(&cfg)?;
    for (sigma, points) in &trajectories {
        let max_r = points.iter().map(|p| p.radius()).fold(0.0, f64::max);
        let min_r = points
            .iter()
            .map(|p| p.radius())
            .fold(f64::INFINITY, f64::min);
        println!("sigma = {sigma:<5} radius in [{min_r:.4}, {max_r:.4}]");
    }
    let manifest = write_trajectory_outputs(&trajectories, &cfg, 0, &dir)?;
    println!("wrote {}", manifest.display());
    Ok(())
}
