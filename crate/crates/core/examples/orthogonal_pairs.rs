//! Average trace distance between reconstructions of orthogonal input
//! pairs as jitter grows.

use timetomo::harness::sweep::METRIC_TRACE_DISTANCE;
use timetomo::harness::{run_orthogonality_sweep, ExperimentConfig, Mode};

fn main() -> timetomo::Result<()> {
    let mut cfg = ExperimentConfig::preset(Mode::QubitOrthogonalPairs);
    cfg.paper_scale = std::env::args().any(|a| a == "--paper-scale");
    let report = run_orthogonality_sweep(&cfg)?;
    println!(
        "{:>6} {:>18} {:>18} {:>18}",
        "sigma", "N=10", "N=100", "N=1000"
    );
    for &s in &cfg.sigma_list {
        print!("{s:>6}");
        for &n in &cfg.photon_list {
            let r = report
                .row(s, n, METRIC_TRACE_DISTANCE)
                .expect("row per cell");
            print!(" {:>18}", format!("{:.4} ± {:.4}", r.mean, r.sd));
        }
        println!();
    }
    Ok(())
}
