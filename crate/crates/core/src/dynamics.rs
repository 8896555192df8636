//! Deterministic model of the pheromone level on a single edge.
//!
//! The discrete update `tau(t) = (1 - rho) tau(t-1) + f(t)` is simulated
//! directly, and its continuous approximation `tau' + rho tau = g(t)` is
//! solved in closed form for constant deposition (`g = c`) and for
//! exponentially saturating deposition (`g = c (1 - e^{-(t+1)/T})`).

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum `|rho - 1/T|` for the exponential closed form.
pub const SINGULARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("evaporation rate must be positive, got rho = {0}")]
    Domain(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("singular parameters: rho = {rho} equals 1/T (T = {time_constant})")]
    Singular { rho: f64, time_constant: f64 },
    #[error("non-finite pheromone value at step {step}")]
    Overflow { step: u64 },
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    /// Evaporation rate, > 0.
    pub rho: f64,
    /// Initial level `tau(0)`, >= 0.
    pub tau0: f64,
    /// Total deposit per step over all ants, > 0.
    pub c_sum: f64,
}

impl DynamicsParams {
    pub fn new(rho: f64, tau0: f64, c_sum: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(DynamicsError::Domain(rho));
        }
        if !(tau0 >= 0.0 && tau0.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!(
                "tau0 must be finite and non-negative, got {tau0}"
            )));
        }
        if !(c_sum > 0.0 && c_sum.is_finite()) {
            return Err(DynamicsError::InvalidParameter(format!(
                "c_sum must be positive, got {c_sum}"
            )));
        }
        Ok(Self { rho, tau0, c_sum })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DepositionForm {
    Constant,
    /// Deposit `c (1 - e^{-t/T})`.
    Exponential {
        time_constant: f64,
    },
}

impl DepositionForm {
    /// Deposit added at discrete step `t`.
    pub fn deposit(&self, c_sum: f64, t: f64) -> f64 {
        match *self {
            DepositionForm::Constant => c_sum,
            DepositionForm::Exponential { time_constant } => -c_sum * (-t / time_constant).exp_m1(),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            DepositionForm::Constant => Ok(()),
            DepositionForm::Exponential { time_constant } => {
                if time_constant > 0.0 && time_constant.is_finite() {
                    Ok(())
                } else {
                    Err(DynamicsError::InvalidParameter(format!(
                        "time constant T must be positive, got {time_constant}"
                    )))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: u64,
    pub tau: f64,
}

/// Pheromone level sampled at steps `0, 1, 2, ...`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub points: Vec<TracePoint>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.tau)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.tau)
    }

    /// `t,tau` CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,tau")?;
        for p in &self.points {
            writeln!(out, "{},{}", p.t, p.tau)?;
        }
        Ok(())
    }
}

/// Iterates the discrete update for `steps` steps. The trace holds
/// `steps + 1` points, starting with `tau0` at `t = 0`.
///
/// For `rho > 1` the level can go negative; for `rho > 2` it diverges.
pub fn simulate_recurrence(
    params: &DynamicsParams,
    form: DepositionForm,
    steps: u64,
) -> Result<Trace> {
    form.validate()?;
    if steps == 0 {
        return Err(DynamicsError::InvalidParameter(
            "steps must be at least 1".into(),
        ));
    }
    let keep = 1.0 - params.rho;
    let mut points = Vec::with_capacity(steps as usize + 1);
    let mut tau = params.tau0;
    points.push(TracePoint { t: 0, tau });
    for t in 1..=steps {
        tau = keep * tau + form.deposit(params.c_sum, t as f64);
        if !tau.is_finite() {
            return Err(DynamicsError::Overflow { step: t });
        }
        points.push(TracePoint { t, tau });
    }
    Ok(Trace { points })
}

/// `tau0 e^{-rho t} + (c/rho)(1 - e^{-rho t})`.
pub fn closed_form_constant(params: &DynamicsParams, t: f64) -> Result<f64> {
    let rho = params.rho;
    if !(rho > 0.0) {
        return Err(DynamicsError::Domain(rho));
    }
    let decay = (-rho * t).exp();
    Ok(params.tau0 * decay - params.c_sum / rho * (-rho * t).exp_m1())
}

/// Solution of `tau' + rho tau = c (1 - e^{-(t+1)/T})` with `tau(0) = tau0`:
///
/// ```text
/// tau(t) = tau0 e^{-rho t} + (c/rho)(1 - e^{-rho t})
///        - c e^{-(t+1)/T} (1 - e^{-(rho - 1/T) t}) / (rho - 1/T)
/// ```
pub fn closed_form_exponential(params: &DynamicsParams, time_constant: f64, t: f64) -> Result<f64> {
    let rho = params.rho;
    if !(rho > 0.0) {
        return Err(DynamicsError::Domain(rho));
    }
    DepositionForm::Exponential { time_constant }.validate()?;
    let gap = rho - 1.0 / time_constant;
    if gap.abs() <= SINGULARITY_TOLERANCE {
        return Err(DynamicsError::Singular { rho, time_constant });
    }
    let constant_part = closed_form_constant(params, t)?;
    // e^{-(t+1)/T} (1 - e^{-gap t}), with a non-positive exponent on each branch
    let transient = if gap > 0.0 {
        -(-(t + 1.0) / time_constant).exp() * (-gap * t).exp_m1()
    } else {
        (-rho * t - 1.0 / time_constant).exp() * (gap * t).exp_m1()
    };
    Ok(constant_part - params.c_sum * transient / gap)
}

pub fn closed_form(params: &DynamicsParams, form: DepositionForm, t: f64) -> Result<f64> {
    match form {
        DepositionForm::Constant => closed_form_constant(params, t),
        DepositionForm::Exponential { time_constant } => {
            closed_form_exponential(params, time_constant, t)
        }
    }
}

/// Right-hand side `g(t)` of the continuous model.
pub fn continuous_forcing(params: &DynamicsParams, form: DepositionForm, t: f64) -> f64 {
    form.deposit(params.c_sum, t + 1.0)
}

/// Fixed point `c / rho` shared by both deposition forms.
pub fn steady_state(params: &DynamicsParams) -> Result<f64> {
    if !(params.rho > 0.0) {
        return Err(DynamicsError::Domain(params.rho));
    }
    Ok(params.c_sum / params.rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stability {
    /// Continuous model: transient `e^{-rho t}` decays.
    pub continuous: bool,
    /// Discrete update: `|1 - rho| < 1`.
    pub discrete: bool,
}

pub fn is_stable(rho: f64) -> Stability {
    Stability {
        continuous: rho > 0.0,
        discrete: rho > 0.0 && rho < 2.0,
    }
}

/// Evaluates the closed form at `t = 0, 1, ..., steps`.
pub fn sample_closed_form(
    params: &DynamicsParams,
    form: DepositionForm,
    steps: u64,
) -> Result<Trace> {
    form.validate()?;
    let points = (0..=steps)
        .map(|t| closed_form(params, form, t as f64).map(|tau| TracePoint { t, tau }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trace { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rho: f64, tau0: f64, c: f64) -> DynamicsParams {
        DynamicsParams::new(rho, tau0, c).unwrap()
    }

    #[test]
    fn full_evaporation_leaves_only_the_deposit() {
        let trace = simulate_recurrence(&p(1.0, 5.0, 2.0), DepositionForm::Constant, 2).unwrap();
        let v: Vec<f64> = trace.values().collect();
        assert_eq!(v, vec![5.0, 2.0, 2.0]);
    }

    #[test]
    fn recurrence_approaches_fixed_point() {
        let trace = simulate_recurrence(&p(0.5, 0.0, 1.0), DepositionForm::Constant, 100).unwrap();
        assert!((trace.last().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_recurrence_limit() {
        let form = DepositionForm::Exponential { time_constant: 5.0 };
        let trace = simulate_recurrence(&p(0.3, 0.0, 1.0), form, 500).unwrap();
        assert!((trace.last().unwrap() - 1.0 / 0.3).abs() < 1e-6);
    }

    #[test]
    fn recurrence_reports_overflow() {
        let err =
            simulate_recurrence(&p(3.0, 1e300, 1.0), DepositionForm::Constant, 100).unwrap_err();
        assert!(matches!(err, DynamicsError::Overflow { .. }));
    }

    #[test]
    fn params_reject_nonpositive_rho() {
        assert_eq!(
            DynamicsParams::new(0.0, 0.0, 1.0),
            Err(DynamicsError::Domain(0.0))
        );
        assert!(DynamicsParams::new(-0.1, 0.0, 1.0).is_err());
        assert!(DynamicsParams::new(0.1, 0.0, 0.0).is_err());
        assert!(DynamicsParams::new(0.1, -1.0, 1.0).is_err());
    }

    #[test]
    fn closed_forms_start_at_tau0() {
        let params = p(0.4, 3.25, 1.5);
        assert_eq!(closed_form_constant(&params, 0.0).unwrap(), 3.25);
        assert_eq!(closed_form_exponential(&params, 5.0, 0.0).unwrap(), 3.25);
    }

    #[test]
    fn constant_closed_form_steady_state() {
        let v = closed_form_constant(&p(0.5, 0.0, 1.0), 200.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn larger_rho_settles_lower_and_faster() {
        let slow = p(0.1, 0.0, 1.0);
        let fast = p(0.9, 0.0, 1.0);
        assert!(steady_state(&fast).unwrap() < steady_state(&slow).unwrap());
        // fraction of the way to steady state after t = 3
        let frac =
            |q: &DynamicsParams| closed_form_constant(q, 3.0).unwrap() / steady_state(q).unwrap();
        assert!(frac(&fast) > frac(&slow));
    }

    #[test]
    fn exponential_closed_form_limit() {
        let v = closed_form_exponential(&p(0.3, 0.0, 1.0), 5.0, 1000.0).unwrap();
        assert!((v - 1.0 / 0.3).abs() < 1e-6);
    }

    #[test]
    fn exponential_closed_form_singularity() {
        let err = closed_form_exponential(&p(0.2, 0.0, 1.0), 5.0, 1.0).unwrap_err();
        assert!(matches!(err, DynamicsError::Singular { .. }));
        assert!(closed_form_exponential(&p(0.2 + 1e-6, 0.0, 1.0), 5.0, 1.0).is_ok());
    }

    #[test]
    fn steady_state_values() {
        assert_eq!(steady_state(&p(0.1, 0.0, 1.0)).unwrap(), 10.0);
        assert_eq!(steady_state(&p(1.5, 0.0, 3.0)).unwrap(), 2.0);
    }

    #[test]
    fn stability_predicates() {
        assert_eq!(
            is_stable(0.5),
            Stability {
                continuous: true,
                discrete: true
            }
        );
        assert_eq!(
            is_stable(-0.1),
            Stability {
                continuous: false,
                discrete: false
            }
        );
        assert_eq!(
            is_stable(1.5),
            Stability {
                continuous: true,
                discrete: true
            }
        );
        assert_eq!(
            is_stable(2.5),
            Stability {
                continuous: true,
                discrete: false
            }
        );
        assert_eq!(
            is_stable(0.0),
            Stability {
                continuous: false,
                discrete: false
            }
        );
        assert_eq!(
            is_stable(2.0),
            Stability {
                continuous: true,
                discrete: false
            }
        );
    }

    #[test]
    fn trace_csv_layout() {
        let trace = simulate_recurrence(&p(1.0, 5.0, 2.0), DepositionForm::Constant, 1).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,tau\n0,5\n1,2\n");
    }
}
