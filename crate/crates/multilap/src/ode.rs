//! Time integration of first-order ODE systems ẋ = F(t, x).
//!
//! Two steppers are available: a fixed-step classical fourth-order
//! Runge–Kutta scheme, which is the default because its step sequence —
//! hence its output — is bit-reproducible, and an embedded
//! Runge–Kutta–Fehlberg 4(5) pair with proportional step-size control for
//! stiff-ish or long-horizon runs where a fixed step would waste work.
//!
//! Both steppers watch for divergence (a state component leaving ±1e9 or
//! turning non-finite) and report it as an error carrying the time reached
//! instead of returning garbage.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// State magnitude beyond which a trajectory is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

fn default_dt() -> f64 {
    1e-3
}

fn default_rel_tol() -> f64 {
    1e-6
}

fn default_abs_tol() -> f64 {
    1e-8
}

fn default_dt_min() -> f64 {
    1e-12
}

/// Step-size strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum StepperConfig {
    /// Classical fourth-order Runge–Kutta with a fixed step. Deterministic:
    /// the same configuration always takes the same steps.
    FixedRk4 {
        #[serde(default = "default_dt")]
        dt: f64,
    },
    /// Runge–Kutta–Fehlberg 4(5) embedded pair with adaptive steps,
    /// advancing on the fifth-order solution.
    Adaptive {
        #[serde(default = "default_rel_tol")]
        rel_tol: f64,
        #[serde(default = "default_abs_tol")]
        abs_tol: f64,
        #[serde(default = "default_dt")]
        dt_init: f64,
        #[serde(default = "default_dt_min")]
        dt_min: f64,
    },
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig::FixedRk4 { dt: default_dt() }
    }
}

impl StepperConfig {
    /// Adaptive stepper with the default tolerances (rel 1e-6, abs 1e-8).
    pub fn adaptive() -> Self {
        StepperConfig::Adaptive {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            dt_init: default_dt(),
            dt_min: default_dt_min(),
        }
    }
}

/// Full integration job description: stepper, horizon, and how densely the
/// trajectory is sampled (every `record_stride`-th accepted step, plus the
/// initial and final states unconditionally).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub stepper: StepperConfig,
    pub t_end: f64,
    pub record_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            stepper: StepperConfig::default(),
            t_end: 50.0,
            record_stride: 100,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(Error::Manifest(format!(
                "t_end must be finite and non-negative, got {}",
                self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::Manifest(
                "record_stride must be at least 1".to_string(),
            ));
        }
        match self.stepper {
            StepperConfig::FixedRk4 { dt } => {
                if !dt.is_finite() || dt <= 0.0 {
                    return Err(Error::Manifest(format!(
                        "fixed step dt must be finite and positive, got {dt}"
                    )));
                }
            }
            StepperConfig::Adaptive {
                rel_tol,
                abs_tol,
                dt_init,
                dt_min,
            } => {
                for (name, v) in [
                    ("rel_tol", rel_tol),
                    ("abs_tol", abs_tol),
                    ("dt_init", dt_init),
                    ("dt_min", dt_min),
                ] {
                    if !v.is_finite() || v <= 0.0 {
                        return Err(Error::Manifest(format!(
                            "adaptive {name} must be finite and positive, got {v}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One recorded point of a trajectory.
pub type TimedState = (f64, Array1<f64>);

fn check_divergence(t: f64, x: &Array1<f64>) -> Result<()> {
    for &v in x.iter() {
        if !v.is_finite() || v.abs() > DIVERGENCE_LIMIT {
            return Err(Error::Numerical {
                t,
                message: format!("state diverged (component {v:e} beyond ±{DIVERGENCE_LIMIT:e})"),
            });
        }
    }
    Ok(())
}

/// Integrate ẋ = F(t, x) from x(0) = `x0` to `config.t_end`, returning the
/// recorded samples in time order. `rhs(t, x, out)` must write F(t, x) into
/// `out`.
pub fn integrate<F>(config: &IntegratorConfig, x0: Array1<f64>, rhs: F) -> Result<Vec<TimedState>>
where
    F: FnMut(f64, &Array1<f64>, &mut Array1<f64>),
{
    config.validate()?;
    check_divergence(0.0, &x0)?;
    match config.stepper {
        StepperConfig::FixedRk4 { dt } => fixed_rk4(config, x0, rhs, dt),
        StepperConfig::Adaptive {
            rel_tol,
            abs_tol,
            dt_init,
            dt_min,
        } => adaptive_rkf45(config, x0, rhs, rel_tol, abs_tol, dt_init, dt_min),
    }
}

/// One classical RK4 step of size `dt` from (t, x), in place.
fn rk4_step<F>(
    rhs: &mut F,
    t: f64,
    dt: f64,
    x: &mut Array1<f64>,
    k: &mut [Array1<f64>; 4],
    tmp: &mut Array1<f64>,
) where
    F: FnMut(f64, &Array1<f64>, &mut Array1<f64>),
{
    let half = 0.5 * dt;
    rhs(t, x, &mut k[0]);
    azip(tmp, x, &k[0], half);
    rhs(t + half, tmp, &mut k[1]);
    azip(tmp, x, &k[1], half);
    rhs(t + half, tmp, &mut k[2]);
    azip(tmp, x, &k[2], dt);
    rhs(t + dt, tmp, &mut k[3]);
    let sixth = dt / 6.0;
    for i in 0..x.len() {
        x[i] += sixth * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
    }
}

/// tmp ← base + c·k
fn azip(tmp: &mut Array1<f64>, base: &Array1<f64>, k: &Array1<f64>, c: f64) {
    for i in 0..tmp.len() {
        tmp[i] = base[i] + c * k[i];
    }
}

fn fixed_rk4<F>(
    config: &IntegratorConfig,
    mut x: Array1<f64>,
    mut rhs: F,
    dt: f64,
) -> Result<Vec<TimedState>>
where
    F: FnMut(f64, &Array1<f64>, &mut Array1<f64>),
{
    let n = x.len();
    let mut k = [
        Array1::zeros(n),
        Array1::zeros(n),
        Array1::zeros(n),
        Array1::zeros(n),
    ];
    let mut tmp = Array1::zeros(n);

    let t_end = config.t_end;
    // Whole steps of exactly dt; times come from multiplication, not
    // accumulation, so they carry no drift and reproduce bit for bit.
    let n_full = (t_end / dt).floor() as usize;
    let mut samples = vec![(0.0, x.clone())];
    let mut recorded_final = t_end == 0.0;

    for i in 0..n_full {
        let t = i as f64 * dt;
        rk4_step(&mut rhs, t, dt, &mut x, &mut k, &mut tmp);
        let t_next = (i + 1) as f64 * dt;
        check_divergence(t_next, &x)?;
        if (i + 1).is_multiple_of(config.record_stride) {
            samples.push((t_next, x.clone()));
            recorded_final = t_next == t_end;
        } else {
            recorded_final = false;
        }
    }

    // Partial remainder step, if the horizon is not a multiple of dt.
    let t_reached = n_full as f64 * dt;
    let rem = t_end - t_reached;
    if rem > dt * 1e-12 {
        rk4_step(&mut rhs, t_reached, rem, &mut x, &mut k, &mut tmp);
        check_divergence(t_end, &x)?;
        recorded_final = false;
    }
    if !recorded_final {
        samples.push((t_end, x.clone()));
    }
    Ok(samples)
}

// Fehlberg 4(5) tableau.
const B: [[f64; 5]; 5] = [
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [
        -8.0 / 27.0,
        2.0,
        -3544.0 / 2565.0,
        1859.0 / 4104.0,
        -11.0 / 40.0,
    ],
];
const A: [f64; 5] = [1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5];
const C4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -1.0 / 5.0,
    0.0,
];
const C5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

#[allow(clippy::too_many_arguments)]
fn adaptive_rkf45<F>(
    config: &IntegratorConfig,
    mut x: Array1<f64>,
    mut rhs: F,
    rel_tol: f64,
    abs_tol: f64,
    dt_init: f64,
    dt_min: f64,
) -> Result<Vec<TimedState>>
where
    F: FnMut(f64, &Array1<f64>, &mut Array1<f64>),
{
    let n = x.len();
    let t_end = config.t_end;
    let mut t = 0.0f64;
    let mut dt = dt_init;
    let mut k: Vec<Array1<f64>> = (0..6).map(|_| Array1::zeros(n)).collect();
    let mut tmp = Array1::zeros(n);
    let mut x5 = Array1::zeros(n);

    let mut samples = vec![(0.0, x.clone())];
    let mut accepted = 0usize;
    let mut recorded_final = t_end == 0.0;

    while t < t_end {
        if dt < dt_min {
            return Err(Error::Numerical {
                t,
                message: format!("adaptive step size underflow ({dt:e} < dt_min {dt_min:e})"),
            });
        }
        let step = dt.min(t_end - t);

        rhs(t, &x, &mut k[0]);
        for stage in 0..5 {
            for i in 0..n {
                let mut acc = x[i];
                for (j, coeff) in B[stage].iter().enumerate().take(stage + 1) {
                    acc += step * coeff * k[j][i];
                }
                tmp[i] = acc;
            }
            rhs(t + A[stage] * step, &tmp, &mut k[stage + 1]);
        }

        // Fourth- and fifth-order solutions plus component-wise error ratio.
        let mut err_ratio = 0.0f64;
        for i in 0..n {
            let mut v4 = x[i];
            let mut v5 = x[i];
            for j in 0..6 {
                v4 += step * C4[j] * k[j][i];
                v5 += step * C5[j] * k[j][i];
            }
            x5[i] = v5;
            let scale = abs_tol + rel_tol * x[i].abs().max(v5.abs());
            err_ratio = err_ratio.max((v5 - v4).abs() / scale);
        }

        if !err_ratio.is_finite() {
            // Step blew up; retry much smaller.
            dt = step * 0.2;
            continue;
        }

        if err_ratio <= 1.0 {
            t += step;
            x.assign(&x5);
            check_divergence(t, &x)?;
            accepted += 1;
            if accepted.is_multiple_of(config.record_stride) {
                samples.push((t, x.clone()));
                recorded_final = t >= t_end;
            } else {
                recorded_final = false;
            }
        }

        // Proportional controller with the usual safety factor and clamps.
        let factor = if err_ratio == 0.0 {
            5.0
        } else {
            (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
        };
        dt = step * factor;
    }

    if !recorded_final {
        samples.push((t_end, x.clone()));
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn decay(_t: f64, x: &Array1<f64>, out: &mut Array1<f64>) {
        for i in 0..x.len() {
            out[i] = -x[i];
        }
    }

    #[test]
    fn rk4_matches_exponential_decay() {
        let config = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 0.01 },
            t_end: 1.0,
            record_stride: 10,
        };
        let samples = integrate(&config, array![1.0], decay).unwrap();
        let (t_final, x_final) = samples.last().unwrap();
        assert_eq!(*t_final, 1.0);
        assert_abs_diff_eq!(x_final[0], (-1.0f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn rk4_error_scales_as_fourth_order() {
        let run = |dt: f64| {
            let config = IntegratorConfig {
                stepper: StepperConfig::FixedRk4 { dt },
                t_end: 1.0,
                record_stride: usize::MAX,
            };
            let samples = integrate(&config, array![1.0], decay).unwrap();
            (samples.last().unwrap().1[0] - (-1.0f64).exp()).abs()
        };
        let coarse = run(0.1);
        let fine = run(0.05);
        let ratio = coarse / fine;
        assert!(
            (8.0..32.0).contains(&ratio),
            "expected ~16x error reduction, got {ratio}"
        );
    }

    #[test]
    fn harmonic_oscillator_returns_after_a_period() {
        let rhs = |_t: f64, x: &Array1<f64>, out: &mut Array1<f64>| {
            out[0] = x[1];
            out[1] = -x[0];
        };
        let config = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 1e-3 },
            t_end: 2.0 * std::f64::consts::PI,
            record_stride: 1000,
        };
        let samples = integrate(&config, array![1.0, 0.0], rhs).unwrap();
        let (_, x) = samples.last().unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_matches_exponential_decay() {
        let config = IntegratorConfig {
            stepper: StepperConfig::adaptive(),
            t_end: 5.0,
            record_stride: 1,
        };
        let samples = integrate(&config, array![1.0], decay).unwrap();
        let (t_final, x_final) = samples.last().unwrap();
        assert_eq!(*t_final, 5.0);
        assert_abs_diff_eq!(x_final[0], (-5.0f64).exp(), epsilon = 1e-6);
    }

    #[test]
    fn adaptive_takes_larger_steps_on_smooth_problems() {
        let fixed = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 1e-3 },
            t_end: 10.0,
            record_stride: 1,
        };
        let adaptive = IntegratorConfig {
            stepper: StepperConfig::adaptive(),
            t_end: 10.0,
            record_stride: 1,
        };
        let n_fixed = integrate(&fixed, array![1.0], decay).unwrap().len();
        let n_adaptive = integrate(&adaptive, array![1.0], decay).unwrap().len();
        assert!(
            n_adaptive * 10 < n_fixed,
            "adaptive used {n_adaptive} steps vs fixed {n_fixed}"
        );
    }

    #[test]
    fn divergence_is_reported_with_time() {
        // ẋ = x² from x(0) = 2 blows up at t = 0.5.
        let rhs = |_t: f64, x: &Array1<f64>, out: &mut Array1<f64>| {
            out[0] = x[0] * x[0];
        };
        let config = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 1e-3 },
            t_end: 1.0,
            record_stride: 1,
        };
        let err = integrate(&config, array![2.0], rhs).unwrap_err();
        match err {
            Error::Numerical { t, .. } => assert!(t <= 0.6, "diverged at t = {t}"),
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn adaptive_blowup_is_an_error_not_a_hang() {
        let rhs = |_t: f64, x: &Array1<f64>, out: &mut Array1<f64>| {
            out[0] = x[0] * x[0];
        };
        let config = IntegratorConfig {
            stepper: StepperConfig::adaptive(),
            t_end: 1.0,
            record_stride: 1,
        };
        assert!(matches!(
            integrate(&config, array![2.0], rhs),
            Err(Error::Numerical { .. })
        ));
    }

    #[test]
    fn recording_stride_and_endpoints() {
        let config = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 0.1 },
            t_end: 1.0,
            record_stride: 3,
        };
        let samples = integrate(&config, array![1.0], decay).unwrap();
        let times: Vec<f64> = samples.iter().map(|(t, _)| *t).collect();
        // Initial, every 3rd of 10 steps, and the final state.
        assert_eq!(times, vec![0.0, 0.1 * 3.0, 0.1 * 6.0, 0.1 * 9.0, 1.0]);
    }

    #[test]
    fn partial_final_step_lands_exactly_on_t_end() {
        // 33 whole steps of 0.03 reach t = 0.99; the last 0.01 needs a
        // shortened step.
        let config = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 0.03 },
            t_end: 1.0,
            record_stride: usize::MAX,
        };
        let samples = integrate(&config, array![1.0], decay).unwrap();
        let (t_final, x_final) = samples.last().unwrap();
        assert_eq!(*t_final, 1.0);
        assert_abs_diff_eq!(x_final[0], (-1.0f64).exp(), epsilon = 1e-6);
    }

    #[test]
    fn zero_horizon_returns_initial_state_only() {
        let config = IntegratorConfig {
            stepper: StepperConfig::default(),
            t_end: 0.0,
            record_stride: 1,
        };
        let samples = integrate(&config, array![3.0], decay).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0], (0.0, array![3.0]));
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad_dt = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 0.0 },
            ..Default::default()
        };
        assert!(integrate(&bad_dt, array![1.0], decay).is_err());

        let bad_stride = IntegratorConfig {
            record_stride: 0,
            ..Default::default()
        };
        assert!(integrate(&bad_stride, array![1.0], decay).is_err());

        let bad_t = IntegratorConfig {
            t_end: -1.0,
            ..Default::default()
        };
        assert!(integrate(&bad_t, array![1.0], decay).is_err());
    }

    #[test]
    fn identical_runs_are_bitwise_identical() {
        let config = IntegratorConfig {
            stepper: StepperConfig::FixedRk4 { dt: 1e-3 },
            t_end: 2.0,
            record_stride: 100,
        };
        let rhs = |_t: f64, x: &Array1<f64>, out: &mut Array1<f64>| {
            out[0] = -0.5 * x[0] + x[1].sin();
            out[1] = -x[1] + x[0] * 0.25;
        };
        let a = integrate(&config, array![1.0, -1.0], rhs).unwrap();
        let b = integrate(&config, array![1.0, -1.0], rhs).unwrap();
        assert_eq!(a.len(), b.len());
        for ((ta, xa), (tb, xb)) in a.iter().zip(&b) {
            assert!(ta.to_bits() == tb.to_bits());
            for (va, vb) in xa.iter().zip(xb.iter()) {
                assert_eq!(va.to_bits(), vb.to_bits());
            }
        }
    }

    #[test]
    fn stepper_config_serde_round_trip() {
        let fixed = StepperConfig::FixedRk4 { dt: 0.5 };
        let json = serde_json::to_string(&fixed).unwrap();
        assert!(json.contains("fixed-rk4"), "{json}");
        assert_eq!(serde_json::from_str::<StepperConfig>(&json).unwrap(), fixed);

        // Defaults fill in omitted fields.
        let parsed: StepperConfig = serde_json::from_str(r#"{"method":"adaptive"}"#).unwrap();
        assert_eq!(parsed, StepperConfig::adaptive());

        let parsed: IntegratorConfig = serde_json::from_str(r#"{"t_end": 25.0}"#).unwrap();
        assert_eq!(parsed.t_end, 25.0);
        assert_eq!(parsed.stepper, StepperConfig::default());
    }
}
