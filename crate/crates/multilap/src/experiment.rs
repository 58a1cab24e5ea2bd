//! Experiment manifests and the runners that execute them.
//!
//! A manifest is a JSON file that fully determines a run: network source,
//! cost specification, integrator settings, consensus tube width, optional
//! scale overrides and sweep grids, and the master seed. Two runs of the
//! same manifest produce byte-identical outputs.
//!
//! ```
//! use multilap::experiment::{run_experiment, ExperimentManifest};
//! use multilap::network::Builtin;
//! use std::path::Path;
//!
//! let manifest = ExperimentManifest::for_builtin(Builtin::Multiplex2x5);
//! let outcome = run_experiment(&manifest, Path::new(".")).unwrap();
//! assert!(outcome.report.reached);
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::{seeded_gammas, CostModel, QuadraticCost};
use crate::dynamics::{
    consensus_epsilon, detect_consensus, integrate_saddle, seeded_initial_y, ConsensusReport,
    Trajectory, TrajectoryMeta,
};
use crate::error::{Error, Result};
use crate::format::parse_network;
use crate::laplacian::{LaplacianTensor, SupraIndexMap};
use crate::network::{Builtin, MultilayerNetwork, NodeLayerId};
use crate::ode::IntegratorConfig;

fn default_seed() -> u64 {
    42
}

/// Where the experiment's network comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSource {
    /// One of the built-in topologies, by name.
    Builtin { builtin: Builtin },
    /// A network text file, resolved relative to the manifest's directory.
    File { file: PathBuf },
}

/// How per-node costs are assigned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CostSpec {
    /// Quadratic terms with γ drawn from U(−2, 2) using the master seed.
    SeededQuadratic,
    /// Quadratic terms with explicit coefficients in flat supra order.
    Quadratic { gammas: Vec<f64> },
    /// No cost: the flow only seeks agreement.
    Zero,
}

/// A named diffusion scale pinned to a specific value, using the same
/// parameter grammar as the network text format: `dintra h` or `dinter h k`
/// with 1-based layer indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleOverride {
    pub parameter: String,
    pub value: f64,
}

/// Annotation for a default that is an assumption rather than an established
/// value; carried verbatim into emitted manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assumption {
    pub parameter: String,
    pub value: f64,
    pub assumed: bool,
}

/// One sweep axis: a parameter (same grammar as [`ScaleOverride`]) and the
/// grid of values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Complete description of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub network: NetworkSource,
    /// Cost specification; when omitted, `gamma` lines from the network file
    /// are used if present, otherwise seeded quadratic costs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    /// Master seed for γ draws and initial conditions.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Consensus tube half-width ε_c; default 1e-3·max(1, |x*|).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Output file name (trajectory CSV for `run`, result CSV for `sweep`),
    /// resolved against the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Diffusion scales pinned before the run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<ScaleOverride>,
    /// Sweep grid; the cartesian product of all axes is run, rows in grid
    /// order with the last axis varying fastest.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepSpec>,
    /// Assumed-value annotations (informational).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<Assumption>,
}

impl ExperimentManifest {
    /// Minimal manifest with library defaults.
    pub fn new(network: NetworkSource) -> Self {
        Self {
            network,
            cost: None,
            integrator: IntegratorConfig::default(),
            seed: default_seed(),
            epsilon: None,
            output: None,
            overrides: Vec::new(),
            sweep: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    /// Ready-to-run manifest for a builtin topology: seeded quadratic costs
    /// and a horizon long enough for the saddle-point flow to reach the
    /// consensus tube, with assumed scales flagged.
    pub fn for_builtin(builtin: Builtin) -> Self {
        let mut manifest = Self::new(NetworkSource::Builtin { builtin });
        manifest.cost = Some(CostSpec::SeededQuadratic);
        // Horizons sized from each topology's algebraic connectivity, with
        // rough 1.5–3× headroom over the observed consensus time at the
        // default seed (t_C ≈ 42, 280, and 21 respectively).
        manifest.integrator.t_end = match builtin {
            Builtin::TwoLayer => 120.0,
            Builtin::FourLayer => 400.0,
            Builtin::Multiplex2x5 => 60.0,
        };
        if builtin == Builtin::FourLayer {
            manifest.assumptions.push(Assumption {
                parameter: "dinter 2 4".to_string(),
                value: 0.1,
                assumed: true,
            });
        }
        manifest
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: Self = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut json =
            serde_json::to_string_pretty(self).expect("manifest serialization cannot fail");
        json.push('\n');
        json
    }

    /// Read and parse a manifest file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Manifest(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json(inner) => {
                Error::Manifest(format!("in manifest {}: {inner}", path.display()))
            }
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() || eps <= 0.0 {
                return Err(Error::Manifest(format!(
                    "epsilon must be finite and positive, got {eps}"
                )));
            }
        }
        if let Some(CostSpec::Quadratic { gammas }) = &self.cost {
            if let Some(bad) = gammas.iter().find(|g| !g.is_finite()) {
                return Err(Error::Manifest(format!(
                    "quadratic cost coefficient {bad} is not finite"
                )));
            }
        }
        for spec in &self.sweep {
            if spec.values.is_empty() {
                return Err(Error::Manifest(format!(
                    "sweep over '{}' has no values",
                    spec.parameter
                )));
            }
        }
        Ok(())
    }
}

/// A diffusion scale addressed by the text-format directive grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScaleTarget {
    Intra(usize),
    Inter(usize, usize),
}

/// Parse `dintra h` / `dinter h k` (1-based layers) against a layer count.
fn parse_scale_parameter(parameter: &str, layer_count: usize) -> Result<ScaleTarget> {
    let err = |msg: String| Error::Manifest(format!("parameter '{parameter}': {msg}"));
    let tokens: Vec<&str> = parameter.split_whitespace().collect();
    let layer = |tok: &str| -> Result<usize> {
        let one_based: usize = tok
            .parse()
            .map_err(|_| err(format!("'{tok}' is not a layer index")))?;
        if one_based == 0 || one_based > layer_count {
            return Err(err(format!(
                "layer {one_based} out of range (network has {layer_count} layers)"
            )));
        }
        Ok(one_based - 1)
    };
    match tokens.as_slice() {
        ["dintra", h] => Ok(ScaleTarget::Intra(layer(h)?)),
        ["dinter", h, k] => {
            let (h, k) = (layer(h)?, layer(k)?);
            if h == k {
                return Err(err("layers must differ".to_string()));
            }
            Ok(ScaleTarget::Inter(h, k))
        }
        _ => Err(err(
            "expected 'dintra <layer>' or 'dinter <layer> <layer>'".to_string()
        )),
    }
}

fn apply_override(network: MultilayerNetwork, o: &ScaleOverride) -> Result<MultilayerNetwork> {
    if !o.value.is_finite() || o.value < 0.0 {
        return Err(Error::Manifest(format!(
            "override '{}': scale must be finite and non-negative, got {}",
            o.parameter, o.value
        )));
    }
    match parse_scale_parameter(&o.parameter, network.layer_count())? {
        ScaleTarget::Intra(h) => network.with_intra_scale(h, o.value),
        ScaleTarget::Inter(h, k) => network.with_inter_scale(h, k, o.value),
    }
}

/// Load the network named by a source, plus any γ coefficients the file
/// declares. Relative file paths resolve against `base`.
pub fn resolve_network(
    source: &NetworkSource,
    base: &Path,
) -> Result<(MultilayerNetwork, BTreeMap<NodeLayerId, f64>)> {
    match source {
        NetworkSource::Builtin { builtin } => Ok((builtin.network(), BTreeMap::new())),
        NetworkSource::File { file } => {
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base.join(file)
            };
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Manifest(format!("cannot read network file {}: {e}", path.display()))
            })?;
            let parsed = parse_network(&text)?;
            Ok((parsed.network, parsed.gammas))
        }
    }
}

/// Cost model with enough structure retained to know the expected optimum.
#[derive(Debug, Clone, PartialEq)]
enum ResolvedCost {
    Quadratic(QuadraticCost),
    Zero(usize),
}

impl ResolvedCost {
    fn model(&self) -> CostModel {
        match self {
            ResolvedCost::Quadratic(q) => q.model(),
            ResolvedCost::Zero(n) => CostModel::zero(*n),
        }
    }

    fn x_star(&self) -> Option<f64> {
        match self {
            ResolvedCost::Quadratic(q) => Some(q.analytic_optimum()),
            ResolvedCost::Zero(_) => None,
        }
    }

    fn describe(&self, seed: u64) -> String {
        match self {
            ResolvedCost::Quadratic(q) => format!("quadratic(n={}, seed={seed})", q.len()),
            ResolvedCost::Zero(n) => format!("zero(n={n})"),
        }
    }
}

fn gammas_from_map(
    map: &BTreeMap<NodeLayerId, f64>,
    index_map: &SupraIndexMap,
) -> Result<Array1<f64>> {
    let mut gammas = Array1::zeros(index_map.n_total());
    for (&id, &value) in map {
        gammas[index_map.flatten(id)?] = value;
    }
    Ok(gammas)
}

fn resolve_cost(
    spec: Option<&CostSpec>,
    file_gammas: &BTreeMap<NodeLayerId, f64>,
    index_map: &SupraIndexMap,
    seed: u64,
) -> Result<ResolvedCost> {
    let n = index_map.n_total();
    match spec {
        Some(CostSpec::SeededQuadratic) => Ok(ResolvedCost::Quadratic(QuadraticCost::new(
            seeded_gammas(n, seed),
        ))),
        Some(CostSpec::Quadratic { gammas }) => {
            if gammas.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: gammas.len(),
                    context: "manifest quadratic cost coefficients".to_string(),
                });
            }
            Ok(ResolvedCost::Quadratic(QuadraticCost::new(
                Array1::from_vec(gammas.clone()),
            )))
        }
        Some(CostSpec::Zero) => Ok(ResolvedCost::Zero(n)),
        None if !file_gammas.is_empty() => Ok(ResolvedCost::Quadratic(QuadraticCost::new(
            gammas_from_map(file_gammas, index_map)?,
        ))),
        None => Ok(ResolvedCost::Quadratic(QuadraticCost::new(seeded_gammas(
            n, seed,
        )))),
    }
}

/// First 16 hex characters of the SHA-256 digest of the network's canonical
/// text form; identifies a topology-plus-scales combination in metadata.
pub fn network_digest(network: &MultilayerNetwork) -> String {
    let text = crate::format::write_network(network, &BTreeMap::new());
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Everything a single experiment produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub report: ConsensusReport,
    /// Algebraic connectivity of the supra Laplacian; `None` for a single
    /// node-layer pair.
    pub lambda2: Option<f64>,
    /// Expected consensus value for quadratic costs.
    pub x_star: Option<f64>,
    pub network_hash: String,
    pub connected: bool,
    pub warnings: Vec<String>,
    pub seed: u64,
}

/// Execute one experiment: build the network (overrides applied), resolve
/// costs, integrate the saddle-point flow from seeded initial conditions
/// (λ(0) = 0), and detect consensus. Disconnected networks run with a
/// warning; the report then ends with `reached: false` for any cost whose
/// optimum requires global agreement.
pub fn run_experiment(manifest: &ExperimentManifest, base: &Path) -> Result<RunOutcome> {
    manifest.validate()?;
    let (mut network, file_gammas) = resolve_network(&manifest.network, base)?;
    for o in &manifest.overrides {
        network = apply_override(network, o)?;
    }

    let lap = LaplacianTensor::from_network(&network);
    let n = lap.n_total();
    let connected = network.is_connected();
    let mut warnings = Vec::new();
    if !connected {
        warnings.push(
            "network is not connected; expect reached=false for global consensus".to_string(),
        );
    }

    let cost = resolve_cost(
        manifest.cost.as_ref(),
        &file_gammas,
        lap.index_map(),
        manifest.seed,
    )?;
    let y0 = seeded_initial_y(n, manifest.seed);
    let lambda0 = Array1::zeros(n);
    let mut trajectory = integrate_saddle(&lap, &cost.model(), y0, lambda0, &manifest.integrator)?;

    let network_hash = network_digest(&network);
    trajectory.set_meta(TrajectoryMeta {
        integrator: Some(manifest.integrator),
        network_hash: Some(network_hash.clone()),
        cost: Some(cost.describe(manifest.seed)),
    });

    let x_star = cost.x_star();
    let epsilon = manifest
        .epsilon
        .unwrap_or_else(|| consensus_epsilon(x_star));
    let report = detect_consensus(&trajectory, lap.index_map(), epsilon)?;
    let lambda2 = if n >= 2 { Some(lap.lambda2()?) } else { None };

    Ok(RunOutcome {
        trajectory,
        report,
        lambda2,
        x_star,
        network_hash,
        connected,
        warnings,
        seed: manifest.seed,
    })
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Swept parameter values, in axis order.
    pub values: Vec<f64>,
    pub lambda2: Option<f64>,
    pub reached: bool,
    pub t_consensus: Option<f64>,
    pub consensus_value: Option<f64>,
    /// Runtime failure for this grid point, if any; the sweep continues.
    pub error: Option<String>,
}

/// All grid points of a sweep, rows in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Swept parameter names, in axis order.
    pub parameters: Vec<String>,
    pub rows: Vec<SweepRow>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl SweepResult {
    /// CSV with one row per grid point: the swept values, then `lambda2`,
    /// `reached`, `t_consensus`, `consensus_value`, `error`. Unavailable
    /// numbers render as empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in &self.parameters {
            out.push_str(&csv_field(&p.replace(' ', "_")));
            out.push(',');
        }
        out.push_str("lambda2,reached,t_consensus,consensus_value,error\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for row in &self.rows {
            for v in &row.values {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                opt(row.lambda2),
                row.reached,
                opt(row.t_consensus),
                opt(row.consensus_value),
                csv_field(row.error.as_deref().unwrap_or("")),
            ));
        }
        out
    }
}

/// Cartesian product of the sweep axes, last axis fastest.
fn grid_points(axes: &[SweepSpec]) -> Vec<Vec<f64>> {
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for prefix in &points {
            for &v in &axis.values {
                let mut point = prefix.clone();
                point.push(v);
                next.push(point);
            }
        }
        points = next;
    }
    points
}

/// Run every grid point of the manifest's sweep. Each point is exactly
/// `run_experiment` with the point's values appended as scale overrides, so
/// a sweep row always matches the corresponding single run. Points execute
/// concurrently; rows come back in grid order. Runtime failures (divergence,
/// step underflow) are recorded in-row and the sweep continues; invalid
/// manifests fail the whole sweep.
pub fn run_sweep(manifest: &ExperimentManifest, base: &Path) -> Result<SweepResult> {
    manifest.validate()?;
    if manifest.sweep.is_empty() {
        return Err(Error::Manifest(
            "sweep manifest needs at least one sweep axis".to_string(),
        ));
    }
    // Validate axis names against the network before launching the grid.
    let (network, _) = resolve_network(&manifest.network, base)?;
    for spec in &manifest.sweep {
        parse_scale_parameter(&spec.parameter, network.layer_count())?;
        if let Some(bad) = spec.values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Manifest(format!(
                "sweep over '{}': scale must be finite and non-negative, got {bad}",
                spec.parameter
            )));
        }
    }

    let points = grid_points(&manifest.sweep);
    let point_manifest = |point: &[f64]| {
        let mut m = manifest.clone();
        m.sweep = Vec::new();
        for (axis, &value) in manifest.sweep.iter().zip(point) {
            m.overrides.push(ScaleOverride {
                parameter: axis.parameter.clone(),
                value,
            });
        }
        m
    };

    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|point| match run_experiment(&point_manifest(point), base) {
            Ok(outcome) => SweepRow {
                values: point.clone(),
                lambda2: outcome.lambda2,
                reached: outcome.report.reached,
                t_consensus: outcome.report.t_consensus,
                consensus_value: outcome.report.consensus_value,
                error: None,
            },
            Err(e) => SweepRow {
                values: point.clone(),
                lambda2: None,
                reached: false,
                t_consensus: None,
                consensus_value: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    Ok(SweepResult {
        parameters: manifest.sweep.iter().map(|s| s.parameter.clone()).collect(),
        rows,
    })
}
