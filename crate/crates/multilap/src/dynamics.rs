//! The two flows driven by the supra Laplacian.
//!
//! *Diffusion*: ẋ = −𝓛x. Mass moves along edges at rates set by the scaled
//! weights; the state relaxes toward the constant vector, with the closed
//! form x(t) = e^{−𝓛t} x(0) available for cross-checking integrators.
//!
//! *Saddle-point flow*: the distributed-optimization dynamics
//!
//! ```text
//! ẏ = −∇f̃(y) − 𝓛y − 𝓛λ
//! λ̇ = 𝓛y
//! ```
//!
//! which is a primal descent / dual ascent on the augmented Lagrangian
//! f̃(y) + λᵀ𝓛y + ½yᵀ𝓛y. On a connected network it drives every node-layer
//! state to the common minimizer of Σ f_{ih̃}, while the multiplier mean is
//! conserved exactly.
//!
//! ```
//! use multilap::cost::QuadraticCost;
//! use multilap::dynamics::{integrate_saddle, seeded_initial_y};
//! use multilap::laplacian::LaplacianTensor;
//! use multilap::network::Builtin;
//! use multilap::ode::IntegratorConfig;
//! use ndarray::Array1;
//!
//! let lap = LaplacianTensor::from_network(&Builtin::Multiplex2x5.network());
//! let n = lap.n_total();
//! let cost = QuadraticCost::seeded(n, 7);
//! let config = IntegratorConfig { t_end: 120.0, ..Default::default() };
//! let traj = integrate_saddle(
//!     &lap,
//!     &cost.model(),
//!     seeded_initial_y(n, 7),
//!     Array1::zeros(n),
//!     &config,
//! )
//! .unwrap();
//! let y_final = &traj.final_sample().y;
//! let x_star = cost.analytic_optimum();
//! assert!(y_final.iter().all(|y| (y - x_star).abs() < 1e-3));
//! ```

use ndarray::linalg::general_mat_vec_mul;
use ndarray::{s, Array1, ArrayView1, ArrayViewMut1};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::{CostModel, QuadraticCost};
use crate::error::{Error, Result};
use crate::laplacian::{LaplacianTensor, SupraIndexMap};
use crate::linalg::min_norm_solve;
use crate::ode::{integrate, IntegratorConfig, TimedState};

/// One recorded trajectory point: primal state, and the multiplier state
/// when the flow has one.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub y: Array1<f64>,
    pub lambda: Option<Array1<f64>>,
}

/// Provenance attached to a trajectory: how it was integrated and, when the
/// experiment layer produced it, which inputs fed it.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryMeta {
    pub integrator: Option<IntegratorConfig>,
    /// Digest of the network's canonical text form.
    pub network_hash: Option<String>,
    /// Short description of the cost specification.
    pub cost: Option<String>,
}

/// A recorded flow, in time order. The first sample is the initial state and
/// the last lands exactly on the integration horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    n: usize,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    /// Attach or extend provenance; used by the experiment layer.
    pub fn set_meta(&mut self, meta: TrajectoryMeta) {
        self.meta = meta;
    }

    /// Supra dimension of the primal state.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("a trajectory is never empty")
    }

    /// Render as CSV: a `t` column, `y_1..y_n`, and `lambda_1..lambda_n`
    /// when the flow carries multipliers. Floats print in Rust's shortest
    /// round-trip form, so equal trajectories serialize byte-identically.
    pub fn to_csv(&self) -> String {
        let with_lambda = self.samples.first().is_some_and(|s| s.lambda.is_some());
        let mut out = String::new();
        out.push('t');
        for i in 1..=self.n {
            out.push_str(&format!(",y_{i}"));
        }
        if with_lambda {
            for i in 1..=self.n {
                out.push_str(&format!(",lambda_{i}"));
            }
        }
        out.push('\n');
        for sample in &self.samples {
            out.push_str(&format!("{}", sample.t));
            for v in sample.y.iter() {
                out.push_str(&format!(",{v}"));
            }
            if let Some(lambda) = &sample.lambda {
                for v in lambda.iter() {
                    out.push_str(&format!(",{v}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn check_dim(expected: usize, got: usize, context: &str) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch {
            expected,
            got,
            context: context.to_string(),
        });
    }
    Ok(())
}

/// Integrate the diffusion flow ẋ = −𝓛x.
pub fn integrate_diffusion(
    lap: &LaplacianTensor,
    x0: Array1<f64>,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let n = lap.n_total();
    check_dim(n, x0.len(), "diffusion initial state")?;
    let m = lap.matrix();
    let raw = integrate(config, x0, |_t, x, out| {
        general_mat_vec_mul(-1.0, m, x, 0.0, out);
    })?;
    Ok(Trajectory {
        samples: raw
            .into_iter()
            .map(|(t, y)| Sample { t, y, lambda: None })
            .collect(),
        n,
        meta: TrajectoryMeta {
            integrator: Some(*config),
            ..Default::default()
        },
    })
}

/// Closed-form diffusion state x(t) = e^{−𝓛t} x(0), via the spectral
/// decomposition of the supra matrix.
pub fn diffusion_closed_form(
    lap: &LaplacianTensor,
    x0: &Array1<f64>,
    t: f64,
) -> Result<Array1<f64>> {
    check_dim(lap.n_total(), x0.len(), "diffusion initial state")?;
    let propagator = crate::linalg::expm_symmetric(lap.matrix(), -t)?;
    Ok(propagator.dot(x0))
}

/// Integrate the saddle-point flow ẏ = −∇f̃(y) − 𝓛y − 𝓛λ, λ̇ = 𝓛y.
pub fn integrate_saddle(
    lap: &LaplacianTensor,
    cost: &CostModel,
    y0: Array1<f64>,
    lambda0: Array1<f64>,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let n = lap.n_total();
    check_dim(n, y0.len(), "saddle initial primal state")?;
    check_dim(n, lambda0.len(), "saddle initial multiplier state")?;
    check_dim(n, cost.len(), "saddle cost terms")?;
    let m = lap.matrix();

    let mut z0 = Array1::zeros(2 * n);
    z0.slice_mut(s![..n]).assign(&y0);
    z0.slice_mut(s![n..]).assign(&lambda0);

    let raw = integrate(config, z0, |_t, z, out| {
        let zs = z.as_slice().expect("packed state is contiguous");
        let (y, lambda) = zs.split_at(n);
        let outs = out.as_slice_mut().expect("rhs buffer is contiguous");
        let (dy, dlambda) = outs.split_at_mut(n);

        // dy = −∇f̃(y) − 𝓛y − 𝓛λ, assembled in place.
        cost.gradient_into(y, dy);
        let y_view = ArrayView1::from(y);
        let lambda_view = ArrayView1::from(lambda);
        let mut dy_view = ArrayViewMut1::from(&mut *dy);
        general_mat_vec_mul(-1.0, m, &y_view, -1.0, &mut dy_view);
        general_mat_vec_mul(-1.0, m, &lambda_view, 1.0, &mut dy_view);

        // dλ = 𝓛y.
        let mut dlambda_view = ArrayViewMut1::from(&mut *dlambda);
        general_mat_vec_mul(1.0, m, &y_view, 0.0, &mut dlambda_view);
    })?;

    Ok(Trajectory {
        samples: raw
            .into_iter()
            .map(|(t, z): TimedState| Sample {
                t,
                y: z.slice(s![..n]).to_owned(),
                lambda: Some(z.slice(s![n..]).to_owned()),
            })
            .collect(),
        n,
        meta: TrajectoryMeta {
            integrator: Some(*config),
            ..Default::default()
        },
    })
}

/// Initial primal state drawn componentwise from U(−5, 5), on a dedicated
/// generator stream so it never interferes with seeded cost coefficients.
pub fn seeded_initial_y(n: usize, seed: u64) -> Array1<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Array1::from_iter((0..n).map(|_| rng.random_range(-5.0..5.0)))
}

/// A stationary point (y*, λ*) of the saddle-point flow.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint {
    pub y: Array1<f64>,
    pub lambda: Array1<f64>,
}

/// The stationary point the quadratic saddle-point flow converges to.
///
/// The primal part is the consensus vector x*·1 with x* = −mean(γ). The
/// multiplier part solves 𝓛λ̄ = −∇f̃(y*) (minimum-norm, so λ̄ ⊥ 1), shifted
/// by the conserved multiplier mean: λ* = λ̄ + mean(λ(0))·1.
pub fn quadratic_saddle_star(
    lap: &LaplacianTensor,
    cost: &QuadraticCost,
    lambda0_mean: f64,
) -> Result<SaddlePoint> {
    let n = lap.n_total();
    check_dim(n, cost.len(), "quadratic saddle cost terms")?;
    let x_star = cost.analytic_optimum();
    let y = Array1::from_elem(n, x_star);
    // ∇f̃(y*) = y* + γ; its components sum to zero, so the singular system
    // below is consistent exactly when the network is connected.
    let rhs = -(&y + cost.gammas());
    let lambda_bar = min_norm_solve(lap.matrix(), &rhs)?;
    Ok(SaddlePoint {
        y,
        lambda: lambda_bar + lambda0_mean,
    })
}

/// Candidate-function value V = ½‖y − y*‖² + ½‖λ − λ*‖² measuring distance
/// to a stationary point; non-increasing along saddle-point trajectories.
pub fn lyapunov(sample: &Sample, star: &SaddlePoint) -> f64 {
    let dy = &sample.y - &star.y;
    let mut v = 0.5 * dy.dot(&dy);
    if let Some(lambda) = &sample.lambda {
        let dl = lambda - &star.lambda;
        v += 0.5 * dl.dot(&dl);
    }
    v
}

/// Outcome of consensus detection on a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusReport {
    /// Half-width of the agreement tube around the running mean.
    pub epsilon: f64,
    /// Whether the final state sits inside the tube.
    pub reached: bool,
    /// Time of the *last* entry into the tube — the start of the suffix run
    /// of in-tube samples. Transient dips into the tube don't count.
    pub t_consensus: Option<f64>,
    /// Mean primal state at the end of the run, when consensus was reached.
    pub consensus_value: Option<f64>,
    /// Per-layer consensus times under the same rule, restricted to each
    /// layer's nodes and that layer's own running mean.
    pub per_layer: Vec<Option<f64>>,
}

impl ConsensusReport {
    /// Human-readable report: one `key: value` line per field, with
    /// per-layer times listed 1-based.
    pub fn to_text(&self) -> String {
        let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
        let mut out = String::new();
        out.push_str(&format!("reached: {}\n", self.reached));
        out.push_str(&format!("epsilon: {}\n", self.epsilon));
        out.push_str(&format!("t_consensus: {}\n", fmt_opt(self.t_consensus)));
        out.push_str(&format!(
            "consensus_value: {}\n",
            fmt_opt(self.consensus_value)
        ));
        for (h, t) in self.per_layer.iter().enumerate() {
            out.push_str(&format!("t_consensus_layer_{}: {}\n", h + 1, fmt_opt(*t)));
        }
        out
    }
}

/// Default tube half-width: 1e-3 scaled by the magnitude of the expected
/// consensus value when one is known.
pub fn consensus_epsilon(expected_value: Option<f64>) -> f64 {
    1e-3 * expected_value.map_or(1.0, |x| x.abs().max(1.0))
}

/// Last time the states indexed by `range` enter (and stay in) the ±ε tube
/// around their own mean; `None` if the final sample is outside the tube.
fn last_entry_time(samples: &[Sample], range: std::ops::Range<usize>, epsilon: f64) -> Option<f64> {
    let mut entry = None;
    for sample in samples {
        let seg = sample.y.slice(s![range.clone()]);
        let mean = seg.sum() / seg.len() as f64;
        let max_dev = seg.iter().fold(0.0f64, |acc, &v| acc.max((v - mean).abs()));
        if max_dev <= epsilon {
            entry.get_or_insert(sample.t);
        } else {
            entry = None;
        }
    }
    entry
}

/// Detect consensus on the primal states of a trajectory: the whole supra
/// vector for the global report, each layer separately for per-layer times.
/// Resolution is limited to the recorded samples.
pub fn detect_consensus(
    traj: &Trajectory,
    map: &SupraIndexMap,
    epsilon: f64,
) -> Result<ConsensusReport> {
    check_dim(traj.n(), map.n_total(), "consensus index map")?;
    let t_consensus = last_entry_time(traj.samples(), 0..traj.n(), epsilon);
    let consensus_value = t_consensus.map(|_| {
        let y = &traj.final_sample().y;
        y.sum() / y.len() as f64
    });
    let per_layer = (0..map.layer_count())
        .map(|h| {
            let range = map.layer_range(h)?;
            Ok(last_entry_time(traj.samples(), range, epsilon))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConsensusReport {
        epsilon,
        reached: t_consensus.is_some(),
        t_consensus,
        consensus_value,
        per_layer,
    })
}
