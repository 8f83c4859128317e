//! Command-line interface: synthesize amplifier networks, print noise
//! bounds, factor symplectic matrices, check physical realizability of
//! saved models, and sweep frequency responses to CSV.
//!
//! Exit codes: 0 success (and all checks passed), 1 a verification check
//! failed, 2 domain or numerical error, 3 I/O error, 4 malformed input.
//! The environment variable QAMP_TOL overrides the default verification
//! tolerance.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::path::PathBuf;

use crate::amp_synth::{
    frequency_sweep, measure_three_db, network_core_realization, network_from_json,
    network_realization, network_to_json, network_transfer_at, synthesize, verify_synthesis_with,
    GridSpacing, DEFAULT_SYNTHESIS_TOL,
};
use crate::caves_bound::{min_added_noise, optimal_dc_matrix, AmplifierDcSpec};
use crate::dup_linalg::{j_matrix, MatrixJson, C64};
use crate::error::{Error, Result};
use crate::qsys::system_from_json;
use crate::shale::{beamsplitter_params, shale_decompose};

#[derive(Parser)]
#[command(
    name = "qamp",
    version,
    about = "Synthesize and verify phase-insensitive quantum amplifier networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a minimum-added-noise amplifier network and write it as JSON.
    Synthesize {
        /// Complex signal gain, e.g. 2, -1.5, 1+0.5j or 2j (|gain| >= 1).
        #[arg(long, value_parser = parse_gain_flag)]
        gain: C64,
        /// Bandwidth scale epsilon in rad/s.
        #[arg(long)]
        bandwidth: f64,
        /// Output path for the network description.
        #[arg(long, default_value = "network.json")]
        out: PathBuf,
    },
    /// Print the added-noise floor and the optimal DC transfer matrix.
    Bound {
        /// Complex signal gain (|gain| >= 1).
        #[arg(long, value_parser = parse_gain_flag)]
        gain: C64,
    },
    /// Factor a 4x4 doubled-up symplectic matrix (JSON) into two squeeze
    /// parameters and two beamsplitters.
    Decompose {
        /// Path to a matrix JSON file {rows, cols, re, im}.
        #[arg(long)]
        input: PathBuf,
    },
    /// Check physical realizability of a saved network or state-space model.
    Check {
        /// Path to a network JSON (with 'bs_in') or state-space JSON (with 'A').
        #[arg(long)]
        input: PathBuf,
    },
    /// Sweep a network's frequency response and write it as CSV.
    Bode {
        /// Path to a network JSON file.
        #[arg(long)]
        network: PathBuf,
        /// Lowest frequency in rad/s.
        #[arg(long, default_value_t = 1e4)]
        min: f64,
        /// Highest frequency in rad/s.
        #[arg(long, default_value_t = 1e9)]
        max: f64,
        /// Number of grid points (inclusive endpoints).
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Grid layout: 'log' or 'linear'.
        #[arg(long, default_value = "log", value_parser = parse_spacing_flag)]
        spacing: GridSpacing,
        /// Output path for the CSV table.
        #[arg(long, default_value = "bode.csv")]
        out: PathBuf,
    },
}

/// Parse arguments from the process environment, run the selected command
/// and return its exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::Parse(_) => 4,
        _ => 2,
    }
}

fn execute(command: Command) -> Result<i32> {
    let tolerance = base_tolerance()?;
    match command {
        Command::Synthesize {
            gain,
            bandwidth,
            out,
        } => cmd_synthesize(gain, bandwidth, &out, tolerance),
        Command::Bound { gain } => cmd_bound(gain),
        Command::Decompose { input } => cmd_decompose(&input),
        Command::Check { input } => cmd_check(&input, tolerance),
        Command::Bode {
            network,
            min,
            max,
            points,
            spacing,
            out,
        } => cmd_bode(&network, min, max, points, spacing, &out),
    }
}

/// Verification tolerance: QAMP_TOL when set, else the library default.
fn base_tolerance() -> Result<f64> {
    match std::env::var("QAMP_TOL") {
        Err(_) => Ok(DEFAULT_SYNTHESIS_TOL),
        Ok(text) => {
            let value: f64 = text.trim().parse().map_err(|_| {
                Error::Domain(format!("QAMP_TOL must be a positive number, got '{text}'"))
            })?;
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Domain(format!(
                    "QAMP_TOL must be a positive finite number, got {value}"
                )));
            }
            Ok(value)
        }
    }
}

/// Frequencies used for realizability probes: DC plus a 50-point log grid
/// spanning scale * [1e-3, 1e3].
fn probe_frequencies(scale: f64) -> Vec<f64> {
    let mut omegas = vec![0.0];
    omegas.extend((0..50).map(|k| scale * 10f64.powf(-3.0 + 6.0 * k as f64 / 49.0)));
    omegas
}

fn print_pretty(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn cmd_synthesize(gain: C64, bandwidth: f64, out: &PathBuf, tolerance: f64) -> Result<i32> {
    let spec = AmplifierDcSpec::new(gain)?;
    let network = synthesize(&spec, bandwidth)?;
    std::fs::write(out, network_to_json(&network))?;
    let report = verify_synthesis_with(&network, &probe_frequencies(network.epsilon()), tolerance)?;
    let pass = report.pass;
    print_pretty(&serde_json::json!({
        "network_path": out,
        "report": report,
    }));
    Ok(if pass { 0 } else { 1 })
}

fn cmd_bound(gain: C64) -> Result<i32> {
    let spec = AmplifierDcSpec::new(gain)?;
    let matrix = optimal_dc_matrix(&spec);
    print_pretty(&serde_json::json!({
        "g11": { "re": spec.g11.re, "im": spec.g11.im },
        "power_gain_db": spec.power_gain_db(),
        "min_added_noise_quanta": min_added_noise(&spec),
        "optimal_transfer": MatrixJson::from_matrix(&matrix.full()),
        "symplectic_residual": matrix.bogoliubov_residual(),
    }));
    Ok(0)
}

fn cmd_decompose(input: &PathBuf) -> Result<i32> {
    let text = std::fs::read_to_string(input)?;
    let carrier: MatrixJson = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    let full = carrier.to_matrix()?;
    let factors = shale_decompose(&full)?;
    let bs_out = beamsplitter_params(factors.s1())?;
    let bs_in = beamsplitter_params(factors.s2())?;
    print_pretty(&serde_json::json!({
        "r1": factors.r1(),
        "r2": factors.r2(),
        "s1": MatrixJson::from_matrix(factors.s1()),
        "s2": MatrixJson::from_matrix(factors.s2()),
        "bs_out": bs_out,
        "bs_in": bs_in,
    }));
    Ok(0)
}

fn cmd_check(input: &PathBuf, tolerance: f64) -> Result<i32> {
    let text = std::fs::read_to_string(input)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("input JSON: {e}")))?;
    if value.get("bs_in").is_some() {
        let network = network_from_json(&text)?;
        let core = network_core_realization(&network);
        let certificate = core.check_realizability_with(&j_matrix(2), tolerance)?;
        let system = network_realization(&network);
        let omegas = probe_frequencies(network.epsilon());
        let probe = system.tf_realizability_probe(&omegas, tolerance / 10.0)?;
        let report = verify_synthesis_with(&network, &omegas, tolerance)?;
        let pass = certificate.passes() && probe.passes() && report.pass;
        print_pretty(&serde_json::json!({
            "kind": "network",
            "core_certificate": certificate.to_json(),
            "tf_probe": probe,
            "synthesis_report": report,
            "pass": pass,
        }));
        return Ok(if pass { 0 } else { 1 });
    }
    if value.get("A").is_some() {
        let system = system_from_json(&text)?;
        let theta = system.solve_theta()?;
        let certificate = system.check_realizability_with(&theta, tolerance)?;
        let scale = system.a().expand().norm().max(1.0);
        let probe = system.tf_realizability_probe(&probe_frequencies(scale), tolerance / 10.0)?;
        let pass = certificate.passes() && probe.passes();
        print_pretty(&serde_json::json!({
            "kind": "state_space",
            "theta": MatrixJson::from_matrix(&theta),
            "certificate": certificate.to_json(),
            "tf_probe": probe,
            "pass": pass,
        }));
        return Ok(if pass { 0 } else { 1 });
    }
    Err(Error::Parse(
        "input is neither an amplifier network (no 'bs_in' field) nor a state-space model (no 'A' field)"
            .into(),
    ))
}

fn cmd_bode(
    network_path: &PathBuf,
    min: f64,
    max: f64,
    points: usize,
    spacing: GridSpacing,
    out: &PathBuf,
) -> Result<i32> {
    let network = network_from_json(&std::fs::read_to_string(network_path)?)?;
    let sweep = frequency_sweep(&network, min, max, points, spacing)?;
    std::fs::write(out, sweep.to_csv())?;
    let dc = network_transfer_at(&network, C64::new(0.0, 0.0))?;
    let three_db = measure_three_db(&network)?;
    print_pretty(&serde_json::json!({
        "csv_path": out,
        "points": sweep.points.len(),
        "spacing": spacing.to_string(),
        "dc_g11_db": 20.0 * dc[(0, 0)].norm().log10(),
        "dc_h12_db": 20.0 * dc[(0, 3)].norm().log10(),
        "three_db_frequency_rad_s": three_db,
    }));
    Ok(0)
}

/// Parse a complex literal: a real part, an imaginary part with a trailing
/// 'j' or 'i', or both joined by a sign, e.g. "2", "-1.5", "1+0.5j",
/// "2j", "-j", "1e3-2e-2i".
pub fn parse_complex(text: &str) -> Result<C64> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let reject = |reason: &str| {
        Err(Error::Parse(format!(
            "cannot parse '{text}' as a complex number ({reason}); use forms like 2, -1.5, 1+0.5j or 2j"
        )))
    };
    let finite = |value: C64| {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(value)
        } else {
            Err(Error::Parse(format!(
                "complex literal '{text}' must be finite"
            )))
        }
    };
    if let Ok(re) = compact.parse::<f64>() {
        return finite(C64::new(re, 0.0));
    }
    let last = compact.chars().last().unwrap().to_ascii_lowercase();
    if last != 'j' && last != 'i' {
        return reject("no trailing imaginary unit");
    }
    let body = &compact[..compact.len() - 1];
    // Split before the last sign that does not belong to an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for (idx, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && bytes[idx - 1] != b'e' && bytes[idx - 1] != b'E' {
            split = Some(idx);
        }
    }
    let imaginary = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s
                .parse()
                .map_err(|_| Error::Parse(format!("cannot parse imaginary part '{s}' of '{text}'"))),
        }
    };
    match split {
        None => finite(C64::new(0.0, imaginary(body)?)),
        Some(idx) => {
            let re: f64 = body[..idx].parse().map_err(|_| {
                Error::Parse(format!(
                    "cannot parse real part '{}' of '{text}'",
                    &body[..idx]
                ))
            })?;
            finite(C64::new(re, imaginary(&body[idx..])?))
        }
    }
}

fn parse_gain_flag(text: &str) -> std::result::Result<C64, String> {
    parse_complex(text).map_err(|e| e.to_string())
}

fn parse_spacing_flag(text: &str) -> std::result::Result<GridSpacing, String> {
    use std::str::FromStr;
    GridSpacing::from_str(text).map_err(|e| e.to_string())
}
