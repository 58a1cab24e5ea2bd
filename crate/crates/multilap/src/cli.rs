//! Command-line surface.
//!
//! Subcommands:
//!
//! * `run <manifest>` — execute one experiment; writes the trajectory CSV
//!   and a consensus report next to it, prints the report.
//! * `sweep <manifest>` — execute the manifest's sweep grid; writes the
//!   result CSV.
//! * `spectrum <network-file>` — print supra-Laplacian eigenvalues as
//!   `index,value` CSV rows.
//! * `validate <network-file>` — parse and check structural invariants;
//!   prints a report, exits 1 on violation.
//! * `builtin <name>` — emit a builtin topology as a network file, or as a
//!   ready-to-run manifest with `--manifest`.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime/numerical
//! failure, 64 usage error. Output files land in the current directory
//! unless `MULTILAP_OUT_DIR` points elsewhere.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, run_sweep, ExperimentManifest};
use crate::format::{parse_network, write_network};
use crate::laplacian::LaplacianTensor;
use crate::network::Builtin;

/// Environment variable that redirects where output files are written.
pub const OUT_DIR_ENV: &str = "MULTILAP_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "multilap",
    version,
    about = "Tensor Laplacians, diffusion, and saddle-point consensus flows on multilayer networks"
)]
struct Cli {
    /// Override the manifest's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment from a manifest; write trajectory CSV and report.
    Run {
        /// Experiment manifest (JSON).
        manifest: PathBuf,
    },
    /// Run a manifest's sweep grid; write one CSV row per grid point.
    Sweep {
        /// Experiment manifest (JSON) with a `sweep` section.
        manifest: PathBuf,
    },
    /// Print supra-Laplacian eigenvalues of a network as `index,value` rows.
    Spectrum {
        /// Network text file.
        network: PathBuf,
    },
    /// Check a network file's structural invariants and print a report.
    Validate {
        /// Network text file.
        network: PathBuf,
    },
    /// Emit a builtin topology as a network file on stdout.
    Builtin {
        /// Which topology: two-layer, four-layer, or multiplex-2x5.
        name: BuiltinArg,
        /// Emit a ready-to-run experiment manifest (JSON) instead.
        #[arg(long)]
        manifest: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BuiltinArg {
    #[value(name = "two-layer")]
    TwoLayer,
    #[value(name = "four-layer")]
    FourLayer,
    #[value(name = "multiplex-2x5")]
    Multiplex2x5,
}

impl From<BuiltinArg> for Builtin {
    fn from(arg: BuiltinArg) -> Self {
        match arg {
            BuiltinArg::TwoLayer => Builtin::TwoLayer,
            BuiltinArg::FourLayer => Builtin::FourLayer,
            BuiltinArg::Multiplex2x5 => Builtin::Multiplex2x5,
        }
    }
}

/// Parse arguments and execute, returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { manifest } => cmd_run(&manifest, cli.seed),
        Command::Sweep { manifest } => cmd_sweep(&manifest, cli.seed),
        Command::Spectrum { network } => cmd_spectrum(&network),
        Command::Validate { network } => cmd_validate(&network),
        Command::Builtin { name, manifest } => cmd_builtin(name.into(), manifest),
    }
}

fn out_dir() -> Result<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Resolve an output file name against the output directory; absolute names
/// win.
fn out_path(name: &Path) -> Result<PathBuf> {
    if name.is_absolute() {
        Ok(name.to_path_buf())
    } else {
        Ok(out_dir()?.join(name))
    }
}

fn load_manifest(path: &Path, seed: Option<u64>) -> Result<ExperimentManifest> {
    let mut manifest = ExperimentManifest::load(path)?;
    if let Some(seed) = seed {
        manifest.seed = seed;
    }
    Ok(manifest)
}

fn manifest_base(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_run(manifest_path: &Path, seed: Option<u64>) -> Result<()> {
    let manifest = load_manifest(manifest_path, seed)?;
    let outcome = run_experiment(&manifest, &manifest_base(manifest_path))?;

    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    let csv_name = manifest
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    let csv_path = out_path(&csv_name)?;
    std::fs::write(&csv_path, outcome.trajectory.to_csv())?;

    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trajectory".to_string());
    let report_path = csv_path.with_file_name(format!("{stem}.report.txt"));
    let report_text = outcome.report.to_text();
    std::fs::write(&report_path, &report_text)?;

    println!("network_hash: {}", outcome.network_hash);
    println!("connected: {}", outcome.connected);
    if let Some(l2) = outcome.lambda2 {
        println!("lambda2: {l2}");
    }
    if let Some(x) = outcome.x_star {
        println!("x_star: {x}");
    }
    print!("{report_text}");
    eprintln!("wrote {}", csv_path.display());
    eprintln!("wrote {}", report_path.display());
    Ok(())
}

fn cmd_sweep(manifest_path: &Path, seed: Option<u64>) -> Result<()> {
    let manifest = load_manifest(manifest_path, seed)?;
    let result = run_sweep(&manifest, &manifest_base(manifest_path))?;

    let csv_name = manifest
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("sweep.csv"));
    let csv_path = out_path(&csv_name)?;
    std::fs::write(&csv_path, result.to_csv())?;

    let failures = result.rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "sweep over {} finished: {} rows, {} failed",
        result.parameters.join(" x "),
        result.rows.len(),
        failures
    );
    for row in result.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: grid point {:?} failed: {}",
            row.values,
            row.error.as_deref().unwrap_or("")
        );
    }
    eprintln!("wrote {}", csv_path.display());
    Ok(())
}

fn read_network_file(path: &Path) -> Result<crate::format::NetworkFile> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Manifest(format!("cannot read network file {}: {e}", path.display()))
    })?;
    parse_network(&text)
}

fn cmd_spectrum(network_path: &Path) -> Result<()> {
    let parsed = read_network_file(network_path)?;
    let lap = LaplacianTensor::from_network(&parsed.network);
    let spectrum = lap.spectrum()?;
    let mut out = String::new();
    for (i, v) in spectrum.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    print!("{out}");
    Ok(())
}

fn cmd_validate(network_path: &Path) -> Result<()> {
    // Parsing already enforces the structural invariants: symmetric weights,
    // no self-loops, indices in range, non-negative weights.
    let parsed = read_network_file(network_path)?;
    let net = &parsed.network;
    let lap = LaplacianTensor::from_network(net);
    let n = lap.n_total();
    let m = lap.matrix();

    let mut row_sum_max = 0.0f64;
    for i in 0..n {
        let sum: f64 = (0..n).map(|j| m[[i, j]]).sum();
        row_sum_max = row_sum_max.max(sum.abs());
    }
    let symmetric = (0..n).all(|i| (0..n).all(|j| m[[i, j]] == m[[j, i]]));
    let spectrum = lap.spectrum()?;
    let lambda_min = spectrum[0];
    let lambda2 = (n >= 2).then(|| spectrum[1]);
    let connected = net.is_connected();

    println!("layers: {}", net.layer_count());
    println!(
        "sizes: {}",
        net.layer_sizes()
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!("n_total: {n}");
    println!("intra_edges: {}", net.intra_edges().count());
    println!("inter_edges: {}", net.inter_edges().count());
    println!("gammas: {}", parsed.gammas.len());
    println!("connected: {connected}");
    println!("row_sum_max: {row_sum_max:e}");
    println!("symmetric: {symmetric}");
    println!("lambda_min: {lambda_min:e}");
    if let Some(l2) = lambda2 {
        println!("lambda2: {l2}");
    }

    if row_sum_max > 1e-12 {
        return Err(Error::InvalidLaplacian(format!(
            "row sums reach {row_sum_max:e}, expected ≤ 1e-12"
        )));
    }
    if !symmetric {
        return Err(Error::InvalidLaplacian(
            "supra matrix is not symmetric".to_string(),
        ));
    }
    if lambda_min < -1e-9 {
        return Err(Error::InvalidLaplacian(format!(
            "smallest eigenvalue {lambda_min:e} below -1e-9"
        )));
    }
    println!("status: ok");
    Ok(())
}

fn cmd_builtin(builtin: Builtin, as_manifest: bool) -> Result<()> {
    if as_manifest {
        print!("{}", ExperimentManifest::for_builtin(builtin).to_json());
        return Ok(());
    }
    let mut out = String::new();
    out.push_str(&format!("# builtin: {}\n", builtin.name()));
    for note in builtin.assumptions() {
        out.push_str(&format!("# {note}\n"));
    }
    out.push_str(&write_network(&builtin.network(), &BTreeMap::new()));
    print!("{out}");
    Ok(())
}
