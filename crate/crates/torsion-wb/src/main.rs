//! Command-line front end: torsion evaluation, property-suite
//! verification, and family scans over parameter grids.
//!
//! Exit codes: 0 success, 1 property-suite failure, 2 validation
//! failure, 3 numerical failure. Failures print a machine-readable JSON
//! object on stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use torsion_wb::config::{OutputFormat, RunConfig};
use torsion_wb::cw::{CWSystem, Representation};
use torsion_wb::detline::{cohomology, phi, DetElement, Frame, GradedComplex};
use torsion_wb::error::{Error, Result};
use torsion_wb::families::{cr_residual, phase_constancy, AnalyticFamily};
use torsion_wb::linalg::{c64, C64};
use torsion_wb::refined::{refined_torsion, Chirality};
use torsion_wb::spectral::{apply_phase, odd_signature, rho_lambda};
use torsion_wb::{corpus, jsonfmt, verify};

#[derive(Parser)]
#[command(name = "torsion-wb", about = "Finite-dimensional refined-torsion workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Input file (JSON); some commands also accept corpus names.
    #[arg(long)]
    input: Option<String>,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Agmon angle in (-pi, 0); default is automatic selection.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Spectral cut radius (rho) or scalar holonomy (cw inputs).
    #[arg(long)]
    lambda: Option<f64>,
    /// Phase constant, as an angle in radians (unit modulus enforced).
    #[arg(long)]
    phase: Option<f64>,
    /// Rank decision tolerance.
    #[arg(long = "tol-rank", default_value_t = 1e-10)]
    tol_rank: f64,
    /// Spectral gap tolerance.
    #[arg(long = "tol-gap", default_value_t = 1e-6)]
    tol_gap: f64,
    /// Cauchy-Riemann residual tolerance.
    #[arg(long = "tol-cr", default_value_t = 1e-8)]
    tol_cr: f64,
    /// Generic relative comparison tolerance.
    #[arg(long = "tol-rel", default_value_t = 1e-9)]
    tol_rel: f64,
    /// Output format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a torsion value from a complex, model, or CW input file.
    Torsion {
        #[command(flatten)]
        common: CommonArgs,
        /// Compute the spectral-cut invariant instead of refined torsion
        /// (requires --lambda; model inputs only).
        #[arg(long)]
        rho: bool,
        /// Flip the orientation (CW inputs only).
        #[arg(long)]
        flip: bool,
    },
    /// Run a named property suite.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Suite name: basis, lambda, theta, euler, orientation, cone,
        /// cr, eta, or all.
        #[arg(long)]
        suite: String,
        /// Random instances per property.
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
    /// Scan an analytic family over its grid.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        /// Second family for the paired phase-constancy verdict.
        #[arg(long)]
        pair: Option<String>,
    },
}

fn build_config(c: &CommonArgs) -> Result<RunConfig> {
    let format = match c.format.as_str() {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => return Err(Error::validation(format!("unknown format {other:?}"))),
    };
    let cfg = RunConfig {
        seed: c.seed,
        rank_tol: c.tol_rank,
        gap_tol: c.tol_gap,
        cr_tol: c.tol_cr,
        rel_tol: c.tol_rel,
        theta: c.theta,
        phase_constant: c.phase.map(|t| C64::from_polar(1.0, t)),
        format,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn read_input(c: &CommonArgs) -> Result<Value> {
    let name = c
        .input
        .as_deref()
        .ok_or_else(|| Error::validation("--input is required"))?;
    let text = std::fs::read_to_string(name)
        .map_err(|e| Error::validation(format!("cannot read {name}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::validation(format!("malformed JSON: {e}")))
}

fn emit(c: &CommonArgs, text: &str) -> Result<()> {
    match &c.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn frame_value(f: &Frame) -> Value {
    match f {
        Frame::Standard => json!({"kind": "standard"}),
        Frame::Cohomology { betti } => json!({"kind": "cohomology", "betti": betti}),
    }
}

fn torsion_report(elem: &DetElement, cfg: &RunConfig) -> Value {
    let v = apply_phase(elem.value, cfg.phase_constant);
    json!({
        "torsion": [v.re, v.im],
        "frame": frame_value(&elem.frame),
    })
}

fn cmd_torsion(common: &CommonArgs, rho: bool, flip: bool) -> Result<()> {
    let cfg = build_config(common)?;
    let input = read_input(common)?;
    let report = if input.get("system").is_some() {
        // CW system, with an explicit representation or a scalar holonomy
        let k = CWSystem::from_value(input.get("system").unwrap())?;
        let a = match input.get("representation") {
            Some(r) => Representation::from_value(r)?,
            None => {
                let l = common.lambda.ok_or_else(|| {
                    Error::validation(
                        "cw input without a representation needs --lambda for the scalar holonomy",
                    )
                })?;
                if k.presentation.generators != 1 {
                    return Err(Error::validation(
                        "--lambda shorthand needs a single-generator system",
                    ));
                }
                corpus::scalar_rep(&[c64(l, 0.0)])?
            }
        };
        let t = torsion_wb::cw::ft_torsion(&k, &a, flip)?;
        torsion_report(&t, &cfg)
    } else if input.get("chirality").is_some() {
        let c = GradedComplex::from_value(
            input
                .get("complex")
                .ok_or_else(|| Error::validation("model input needs a complex"))?,
        )?;
        let g = Chirality::from_value(&c, input.get("chirality").unwrap())?;
        if rho {
            let l = common
                .lambda
                .ok_or_else(|| Error::validation("--rho needs --lambda"))?;
            let m = odd_signature(&c, &g)?;
            let r = rho_lambda(&m, l, cfg.theta)?;
            torsion_report(&r, &cfg)
        } else {
            let t = refined_torsion(&c, &g)?;
            torsion_report(&t, &cfg)
        }
    } else {
        let c = GradedComplex::from_value(&input)?;
        let h = cohomology(&c, cfg.rank_tol)?;
        let t = phi(&c, &DetElement::standard(torsion_wb::linalg::ONE)?, &h)?;
        torsion_report(&t, &cfg)
    };
    emit(common, &jsonfmt::to_string(&report))
}

fn cmd_verify(common: &CommonArgs, suite: &str, instances: usize) -> Result<bool> {
    let cfg = build_config(common)?;
    let reports = verify::run_suite(suite, cfg.seed, instances)?;
    let all_passed = reports.iter().all(|r| r.passed);
    let value = json!({
        "suite": suite,
        "seed": cfg.seed,
        "instances": instances,
        "passed": all_passed,
        "properties": reports.iter().map(|r| r.to_value()).collect::<Vec<_>>(),
    });
    emit(common, &jsonfmt::to_string(&value))?;
    Ok(all_passed)
}

fn family_from(name: &str) -> Result<AnalyticFamily> {
    let text = std::fs::read_to_string(name)
        .map_err(|e| Error::validation(format!("cannot read {name}: {e}")))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("malformed JSON: {e}")))?;
    AnalyticFamily::from_value(&v)
}

fn cmd_scan(common: &CommonArgs, pair: Option<&str>) -> Result<()> {
    let cfg = build_config(common)?;
    let name = common
        .input
        .as_deref()
        .ok_or_else(|| Error::validation("--input is required"))?;
    let fam = family_from(name)?;
    let samples = torsion_wb::families::torsion_family(&fam)?;
    let report = cr_residual(&samples, &fam.grid)?;
    let body = match cfg.format {
        OutputFormat::Json => jsonfmt::to_string(&report.to_value()),
        OutputFormat::Csv => {
            // one row per grid point; the CR residual column is filled
            // on interior points only
            let mut rows = String::from("z_re,z_im,f_re,f_im,cr_abs\n");
            for &(z, f) in &samples {
                let residual = report
                    .residuals
                    .iter()
                    .find(|(rz, _, _)| (rz - z).norm() < 1e-12)
                    .map(|&(_, _, a)| jsonfmt::fmt_f64(a))
                    .unwrap_or_default();
                rows.push_str(&format!(
                    "{},{},{},{},{}\n",
                    jsonfmt::fmt_f64(z.re),
                    jsonfmt::fmt_f64(z.im),
                    jsonfmt::fmt_f64(f.re),
                    jsonfmt::fmt_f64(f.im),
                    residual
                ));
            }
            rows
        }
    };
    emit(common, &body)?;
    if let Some(other) = pair {
        let fam2 = family_from(other)?;
        let samples2 = torsion_wb::families::torsion_family(&fam2)?;
        if samples.len() != samples2.len() {
            return Err(Error::validation("paired families have different grids"));
        }
        let f: Vec<C64> = samples.iter().map(|&(_, v)| v).collect();
        let g: Vec<C64> = samples2.iter().map(|&(_, v)| v).collect();
        let verdict = phase_constancy(&f, &g, cfg.rel_tol.max(1e-9), 1e-6)?;
        let value = json!({
            "phase_constant": verdict.constant,
            "theta": verdict.theta,
            "max_deviation": verdict.max_deviation,
        });
        let text = jsonfmt::to_string(&value);
        match &common.out {
            Some(path) => {
                let mut p = path.clone();
                p.set_extension("phase.json");
                std::fs::write(&p, &text)
                    .map_err(|e| Error::validation(format!("cannot write {}: {e}", p.display())))?;
            }
            None => println!("{text}"),
        }
    }
    Ok(())
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Torsion { common, rho, flip } => {
            cmd_torsion(common, *rho, *flip)?;
            Ok(0)
        }
        Cmd::Verify { common, suite, instances } => {
            let ok = cmd_verify(common, suite, *instances)?;
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::Scan { common, pair } => {
            cmd_scan(common, pair.as_deref())?;
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            let value = json!({
                "error": {
                    "kind": e.kind(),
                    "message": e.to_string(),
                }
            });
            eprintln!("{}", jsonfmt::to_string(&value));
            std::process::exit(e.exit_code());
        }
    }
}
