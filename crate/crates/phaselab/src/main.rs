use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phaselab::harness::{
    emit_csv, emit_metadata, run_checks, run_convergence, run_single_eps, seed_check,
    RunConfig, RunRecord,
};

#[derive(Parser)]
#[command(name = "phaselab", about = "Wigner-Hartree vs. Vlasov phase-space laboratory")]
struct Cli {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV, metadata, and field dumps.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Suppress progress and report printing (exit code still reports).
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single-epsilon run (largest epsilon in the list); dumps both fields.
    Evolve,
    /// Epsilon sweep with a convergence-rate fit.
    Converge,
    /// Full invariant and acceptance check suite.
    Checks,
    /// Admissibility and cutoff-seed report for the data family.
    SeedCheck,
}

fn load_config(cli: &Cli) -> phaselab::Result<RunConfig> {
    match &cli.config {
        Some(path) => RunConfig::load(path),
        None => {
            let cfg = RunConfig::default();
            cfg.validate()?;
            Ok(cfg)
        }
    }
}

fn run(cli: &Cli) -> phaselab::Result<bool> {
    let cfg = load_config(cli)?;
    std::fs::create_dir_all(&cli.out)?;
    emit_metadata(&cfg, cli.out.join("metadata.toml"))?;
    let say = |s: &str| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match cli.cmd {
        Cmd::Evolve => {
            let eps = cfg.eps[0];
            let (rows, summary) = run_single_eps(&cfg, eps)?;
            let record = RunRecord { rows, summaries: vec![summary.clone()] };
            emit_csv(&record, cli.out.join("evolve.csv"))?;

            // rebuild final fields for the dump (the sweep keeps only rows)
            let grid = cfg.grid()?;
            let profile = cfg.profile()?;
            let phi = cfg.potential()?;
            let mut wrun = phaselab::wigner::WignerRun::new(
                phaselab::initial_data::coherent_mixture(&profile, &grid, eps)?,
                phi.clone(),
                cfg.dt,
            )?;
            let mut vrun =
                phaselab::vlasov::VlasovRun::new(profile.sample(&grid)?, phi, cfg.dt, cfg.m0)?;
            wrun.run_until(cfg.t_end)?;
            vrun.run_until(cfg.t_end)?;
            wrun.state.dump(cli.out.join("wigner_final.wvf"))?;
            vrun.state.dump(cli.out.join("vlasov_final.wvf"))?;
            say(&format!(
                "eps = {eps}: final L2 distance {:.6e} (initial {:.6e})",
                summary.final_error, summary.initial_distance
            ));
            Ok(true)
        }
        Cmd::Converge => {
            let (record, fit) = run_convergence(&cfg)?;
            emit_csv(&record, cli.out.join("converge.csv"))?;
            say(&format!("fitted rate: {:.6}", fit.slope));
            for (s, r) in record.summaries.iter().zip(&fit.residuals) {
                say(&format!(
                    "  eps = {:<8} final error {:.6e}  fit residual {:+.3e}",
                    s.eps, s.final_error, r
                ));
            }
            let pass = record.summaries.len() < 2 || fit.slope >= 2.0 / 7.0;
            say(if pass { "rate check: pass" } else { "rate check: FAIL" });
            Ok(pass)
        }
        Cmd::Checks => {
            let (record, report) = run_checks(&cfg)?;
            emit_csv(&record, cli.out.join("checks.csv"))?;
            for row in &report.rows {
                say(&format!(
                    "{:<26} {}  ({})",
                    row.name,
                    if row.passed { "pass" } else { "FAIL" },
                    row.detail
                ));
            }
            Ok(report.all_pass())
        }
        Cmd::SeedCheck => {
            let (adm, seeds) = seed_check(&cfg)?;
            let mut pass = adm.mass_ok && adm.nonneg_ok && adm.moment_ok && adm.h3_uniform && adm.tails_ok;
            say(&format!(
                "admissibility: mass {} nonneg {} moment {} h3 {} tails {} \
                 (tail slopes L2 {:.3} L1 {:.3})",
                adm.mass_ok, adm.nonneg_ok, adm.moment_ok, adm.h3_uniform, adm.tails_ok,
                adm.tail_l2_slope, adm.tail_l1_slope
            ));
            for (eps, seed) in cfg.eps.iter().zip(&seeds) {
                let seed_ok = seed.g0.min() >= -1e-12 * seed.g0.max();
                pass &= seed_ok;
                say(&format!(
                    "eps = {:<8} |1-N| = {:.3e}  ||f0-g0|| = {:.3e}  H3 = {:.4}  \
                     support {:.4}  nonneg {}",
                    eps, seed.gap, seed.l2_distance, seed.h3_norm, seed.support_radius, seed_ok
                ));
            }
            let mut csv = String::from("eps,mass,min_value,h3_norm,l1_norm,second_moment_k,tail_l2,tail_l1\n");
            for r in &adm.rows {
                csv.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    r.eps, r.mass, r.min_value, r.h3_norm, r.l1_norm, r.second_moment_k,
                    r.tail_l2, r.tail_l1
                ));
            }
            std::fs::write(cli.out.join("seed_check.csv"), csv)?;
            say(if pass { "seed check: pass" } else { "seed check: FAIL" });
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
