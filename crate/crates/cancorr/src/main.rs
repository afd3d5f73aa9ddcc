//! Thin command-line front end over the library: theory queries, single
//! simulations, Monte Carlo campaigns, CSV detection, the identity lab,
//! and the GOE reference sampler.

use std::path::PathBuf;
use std::process::ExitCode;

use cancorr::error::Error;
use cancorr::harness::{
    detect_from_csv, run_campaign, run_simulation, run_theory, write_summary_json, CampaignKind,
    ExperimentConfig,
};
use cancorr::spectrum::goe_edge_samples;

const USAGE: &str = "\
cancorr: spectra of high-dimensional sample canonical correlations

USAGE:
  cancorr <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
  theory              Print derived constants, outlier locations, quantiles
  simulate            One replicate: spectra, interlacing, detection
  campaign            Monte Carlo campaign from the config's `campaign` kind
  detect <X> <Y>      Spike detection on two CSV matrices (rows = variables)
  verify-identities   Exact finite-size resolvent identity suite
  goe                 Rescaled GOE largest-eigenvalue reference samples

FLAGS:
  --config <path.json>   Experiment configuration (JSON)
  --seed <u64>           Override the master seed
  --reps <usize>         Override the replicate count
  --workers <usize>      Worker threads (0 = default pool)
  --out-dir <dir>        Write records.csv / summary.json here
  --eps-tol <f64>        Override the slack exponent eps_tol
  --help                 Show this message

Without --config, a built-in default geometry (p, q, n) = (100, 80, 400)
with spikes t = (0.6, 0.1) is used. Exit codes: 0 success, 2 constraint
violation, 3 campaign failure budget exceeded.
";

struct Cli {
    subcommand: String,
    positional: Vec<String>,
    config: Option<PathBuf>,
    seed: Option<u64>,
    reps: Option<usize>,
    workers: Option<usize>,
    out_dir: Option<PathBuf>,
    eps_tol: Option<f64>,
}

fn parse_args(args: &[String]) -> Result<Cli, String> {
    if args.is_empty() {
        return Err("missing subcommand".into());
    }
    let mut cli = Cli {
        subcommand: args[0].clone(),
        positional: Vec::new(),
        config: None,
        seed: None,
        reps: None,
        workers: None,
        out_dir: None,
        eps_tol: None,
    };
    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        let mut take = || -> Result<String, String> {
            it.next()
                .map(|s| s.to_string())
                .ok_or_else(|| format!("flag {arg} needs a value"))
        };
        match arg.as_str() {
            "--config" => cli.config = Some(PathBuf::from(take()?)),
            "--seed" => cli.seed = Some(take()?.parse().map_err(|e| format!("--seed: {e}"))?),
            "--reps" => cli.reps = Some(take()?.parse().map_err(|e| format!("--reps: {e}"))?),
            "--workers" => {
                cli.workers = Some(take()?.parse().map_err(|e| format!("--workers: {e}"))?)
            }
            "--out-dir" => cli.out_dir = Some(PathBuf::from(take()?)),
            "--eps-tol" => {
                cli.eps_tol = Some(take()?.parse().map_err(|e| format!("--eps-tol: {e}"))?)
            }
            "--help" | "-h" => return Err(String::new()),
            other if other.starts_with("--") => return Err(format!("unknown flag {other}")),
            other => cli.positional.push(other.to_string()),
        }
    }
    Ok(cli)
}

fn default_config() -> ExperimentConfig {
    let loading = |t: f64| (t.sqrt() / (1.0 - t.sqrt())).sqrt();
    ExperimentConfig::from_json(
        &serde_json::json!({
            "dims": {"p": 100, "q": 80, "n": 400},
            "spike": {
                "a_values": [loading(0.6), loading(0.1)],
                "b_values": [loading(0.6), loading(0.1)],
                "alignment": {"kind": "identity"}
            },
            "campaign": "detect"
        })
        .to_string(),
    )
    .expect("built-in default config is valid")
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => default_config(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(reps) = cli.reps {
        config.replicates = reps;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    if let Some(dir) = &cli.out_dir {
        config.out_dir = Some(dir.clone());
    }
    if let Some(eps) = cli.eps_tol {
        config.tolerances.eps_tol = eps;
    }
    Ok(config)
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = load_config(cli)?;
    match cli.subcommand.as_str() {
        "theory" => {
            let report = run_theory(&config)?;
            if let Some(dir) = &config.out_dir {
                std::fs::create_dir_all(dir)?;
                write_summary_json(&dir.join("summary.json"), &report)?;
            }
            print_json(&report);
        }
        "simulate" => {
            let (report, _) = run_simulation(&config, 0)?;
            print_json(&report);
        }
        "campaign" => {
            if config.replicates == 0 {
                eprintln!("warning: zero replicates requested; emitting an empty report");
            }
            let (report, _) = run_campaign(&config)?;
            print_json(&report);
        }
        "detect" => {
            if cli.positional.len() != 2 {
                return Err(Error::Argument(
                    "detect needs exactly two CSV paths: cancorr detect <X> <Y>".into(),
                ));
            }
            let report = detect_from_csv(
                std::path::Path::new(&cli.positional[0]),
                std::path::Path::new(&cli.positional[1]),
                &config,
            )?;
            if let Some(dir) = &config.out_dir {
                std::fs::create_dir_all(dir)?;
                write_summary_json(&dir.join("summary.json"), &report)?;
            }
            print_json(&report);
        }
        "verify-identities" => {
            let mut cfg = config;
            cfg.campaign = CampaignKind::Identities;
            let (report, _) = run_campaign(&cfg)?;
            print_json(&report);
            if let cancorr::harness::CampaignSummary::Identities(suite) = &report.summary {
                if !suite.all_pass {
                    return Err(Error::Campaign(
                        "identity residuals exceeded tolerance".into(),
                    ));
                }
            }
        }
        "goe" => {
            let samples = goe_edge_samples(
                config.goe.matrix_size,
                config.goe.samples,
                config.master_seed,
            )?;
            if let Some(dir) = &config.out_dir {
                std::fs::create_dir_all(dir)?;
                let mut text = String::from("index,rescaled_edge\n");
                for (i, s) in samples.iter().enumerate() {
                    text.push_str(&format!("{i},{s:?}\n"));
                }
                std::fs::write(dir.join("goe.csv"), text)?;
            }
            let mean = samples.iter().sum::<f64>() / samples.len().max(1) as f64;
            print_json(&serde_json::json!({
                "matrix_size": config.goe.matrix_size,
                "samples": samples.len(),
                "mean": mean,
            }));
        }
        other => {
            return Err(Error::Argument(format!(
                "unknown subcommand `{other}`; see --help"
            )))
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(cli) => cli,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
