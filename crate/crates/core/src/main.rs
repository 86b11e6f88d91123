use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use gasloc::anchors::parse_tle_file;
use gasloc::geometry::{rotation_from_attitude, Attitude};
use gasloc::sim::{
    altitude_sweep, doppler_csv, doppler_pipeline, gdop_csv, gdop_map, run_monte_carlo, simulate_csv, sweep_csv,
    trajopt_csv, trajopt_pipeline, CsvHeader, Scenario,
};
use gasloc::{Error, Result};

/// Radio-localization simulator for ground, aerial and satellite anchors.
#[derive(Parser)]
#[command(name = "gasloc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo positioning trials; one CSV row per trial.
    Simulate(RunArgs),
    /// DOP over the grid in `[gdop_map]`.
    GdopMap(RunArgs),
    /// Elevation, Doppler and Doppler rate over every visible pass.
    DopplerProfile(RunArgs),
    /// Mean projected ranging error of a hovering anchor versus altitude.
    AltitudeSweep(RunArgs),
    /// Optimise the aerial anchor trajectory in `[trajopt]`.
    Trajopt(RunArgs),
    /// Parse and validate a TLE file; prints one row per record.
    Tle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotation matrix of an attitude given in degrees.
    Geometry {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        pitch_deg: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        roll_deg: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        yaw_deg: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `run.trials`.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl RunArgs {
    fn load(&self) -> Result<Scenario> {
        let mut s = Scenario::load(&self.scenario)?;
        if let Some(n) = self.trials {
            s = s.with_trials(n)?;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        Ok(s)
    }

    fn base_dir(&self) -> &Path {
        self.scenario.parent().unwrap_or(Path::new("."))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn header(name: &str, s: &Scenario) -> CsvHeader {
    CsvHeader::new(name, &s.config_hash, s.seed)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let s = a.load()?;
            let report = run_monte_carlo(&s, a.workers)?;
            eprintln!(
                "{} trials, {} failed, {:.3} s",
                report.trials.len(),
                report.failures,
                report.wall_time.as_secs_f64()
            );
            emit(a.out.as_deref(), &simulate_csv(header("simulate", &s), &report))
        }
        Command::GdopMap(a) => {
            let s = a.load()?;
            emit(a.out.as_deref(), &gdop_csv(header("gdop-map", &s), &gdop_map(&s)?))
        }
        Command::DopplerProfile(a) => {
            let s = a.load()?;
            let output = doppler_pipeline(&s, a.base_dir())?;
            if let Some(n) = &output.notice {
                eprintln!("notice: {n}");
            }
            emit(a.out.as_deref(), &doppler_csv(header("doppler-profile", &s), &output))
        }
        Command::AltitudeSweep(a) => {
            let s = a.load()?;
            emit(a.out.as_deref(), &sweep_csv(header("altitude-sweep", &s), &altitude_sweep(&s, a.workers)?))
        }
        Command::Trajopt(a) => {
            let s = a.load()?;
            emit(a.out.as_deref(), &trajopt_csv(header("trajopt", &s), &trajopt_pipeline(&s, a.workers)?))
        }
        Command::Tle { input, out } => {
            let text = std::fs::read_to_string(&input).map_err(|source| Error::Io { path: input.clone(), source })?;
            let records = parse_tle_file(&text)?;
            let hash = hex::encode(Sha256::digest(text.as_bytes()));
            let mut csv = format!(
                "# gasloc tle\n# config_sha256: {hash}\n# seed: 0\n# records: {}\n\
                 name,catalog,epoch_year,epoch_day,inclination_deg,raan_deg,eccentricity,arg_perigee_deg,mean_anomaly_deg,mean_motion_rev_per_day,altitude_km\n",
                records.len()
            );
            for (name, r) in &records {
                let alt = r.orbit_elements()?.altitude_m / 1e3;
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    name.as_deref().unwrap_or("").replace(',', " "),
                    r.catalog_number,
                    r.full_epoch_year(),
                    r.epoch_day,
                    r.inclination_deg,
                    r.raan_deg,
                    r.eccentricity,
                    r.arg_perigee_deg,
                    r.mean_anomaly_deg,
                    r.mean_motion_rev_per_day,
                    alt
                ));
            }
            emit(out.as_deref(), &csv)
        }
        Command::Geometry { pitch_deg, roll_deg, yaw_deg } => {
            let m = *rotation_from_attitude(&Attitude::from_degrees(pitch_deg, roll_deg, yaw_deg)).matrix();
            for r in 0..3 {
                println!("{},{},{}", m[(r, 0)], m[(r, 1)], m[(r, 2)]);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
