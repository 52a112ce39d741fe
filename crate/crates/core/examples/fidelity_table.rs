//! Average reconstruction fidelity (with SD) of mixed and pure qubit
//! ensembles over a jitter × photon-number grid. Pass `--paper-scale` for
//! the full 8820 / 420 state samples.

use timetomo::harness::sweep::METRIC_FIDELITY;
use timetomo::harness::{run_qubit_sweep, ExperimentConfig, Mode};

fn main() -> timetomo::Result<()> {
    let paper_scale = std::env::args().any(|a| a == "--paper-scale");
    let sigmas = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let photons = [10.0, 100.0, 1000.0];
    let mut reports = Vec::new();
    for mode in [Mode::QubitMixed, Mode::QubitPure] {
        let mut cfg = ExperimentConfig::preset(mode);
        cfg.sigma_list = sigmas.to_vec();
        cfg.photon_list = photons.to_vec();
        cfg.paper_scale = paper_scale;
        reports.push(run_qubit_sweep(&cfg)?);
    }
    print!("{:>6}", "sigma");
    for n in photons {
        print!(
            " | {:>13} {:>13}",
            format!("mixed N={n}"),
            format!("pure N={n}")
        );
    }
    println!();
    for s in sigmas {
        print!("{s:>6}");
        for n in photons {
            print!(" |");
            for report in &reports {
                let r = report.row(s, n, METRIC_FIDELITY).expect("row per cell");
                print!(" {:>13}", format!("{:.3}({:.3})", r.mean, r.sd));
            }
        }
        println!();
    }
    Ok(())
}
