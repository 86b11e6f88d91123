//! Runs a bundled scenario file through the Monte Carlo engine and prints
//! the summary plus the first rows of the CSV the CLI would write.

use std::path::PathBuf;

use gasloc::sim::{run_monte_carlo, simulate_csv, CsvHeader, Scenario};

fn main() -> gasloc::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "a2g_uav_range.toml".into());
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name);
    let s = Scenario::load(&path)?.with_trials(300)?;
    let report = run_monte_carlo(&s, 1)?;
    if let Some(sum) = &report.summary {
        println!(
            "{} trials, {} failed: rmse {:.3} m, median {:.3} m, p95 {:.3} m",
            report.trials.len(),
            report.failures,
            sum.rmse_3d,
            sum.median_3d,
            sum.p95_3d
        );
    }
    let csv = simulate_csv(CsvHeader::new("simulate", &s.config_hash, s.seed), &report);
    for line in csv.lines().take(12) {
        println!("{line}");
    }
    Ok(())
}
