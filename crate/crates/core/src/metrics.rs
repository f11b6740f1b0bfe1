//! Cohesion metrics: settling time, deviation, normalized deviation, and
//! peak input.

use crate::error::MetricsError;
use crate::simulator::Trajectory;
use serde::Serialize;

/// Quantified cohesion of one trajectory.
///
/// `delta` integrates the 1-norm spread of the agents around their
/// instantaneous mean over the settling interval, normalized by the step
/// amplitude; `delta_star` divides by the settling time to remove the
/// effect of response speed.
#[derive(Debug, Clone, Serialize)]
pub struct CohesionReport {
    #[serde(rename = "T_s")]
    pub t_s: f64,
    pub delta: f64,
    pub delta_star: f64,
    pub max_input: f64,
    pub preset: String,
    pub params: serde_json::Value,
    /// Mean trajectory, retained for export; not part of the JSON schema.
    #[serde(skip)]
    pub mean_trajectory: Vec<f64>,
    /// True when the horizon leaves less than half a settling time of
    /// post-settling tail, making the settling estimate shaky.
    #[serde(skip)]
    pub short_tail: bool,
}

/// Smallest grid time after which every agent stays within 2% of the
/// final value.
pub fn settling_time(traj: &Trajectory, z_d: f64) -> Result<f64, MetricsError> {
    if z_d == 0.0 {
        return Err(MetricsError::DegenerateSource);
    }
    if let Some(t) = traj.diverged {
        return Err(MetricsError::Diverged(t));
    }
    let band = 0.02 * z_d.abs();
    let inside =
        |row: &[f64]| row.iter().all(|z| (z - z_d).abs() <= band);
    if !inside(traj.states.last().expect("nonempty trajectory")) {
        return Err(MetricsError::NeverSettles {
            horizon: *traj.times.last().unwrap(),
        });
    }
    let mut first_ok = traj.states.len() - 1;
    while first_ok > 0 && inside(&traj.states[first_ok - 1]) {
        first_ok -= 1;
    }
    Ok(traj.times[first_ok])
}

/// Peak input: max over agents and grid of `|u_i(t)|`.
pub fn max_input(traj: &Trajectory) -> Result<f64, MetricsError> {
    if traj.inputs.is_empty() {
        return Err(MetricsError::NoInputs);
    }
    Ok(traj
        .inputs
        .iter()
        .flatten()
        .fold(0.0f64, |m, u| m.max(u.abs())))
}

/// Full cohesion report for a step-like run with final value `z_d`.
pub fn cohesion(traj: &Trajectory, z_d: f64) -> Result<CohesionReport, MetricsError> {
    let t_s = settling_time(traj, z_d)?;
    let h = traj.step();
    let n = traj.n_agents() as f64;
    let mean: Vec<f64> = traj
        .states
        .iter()
        .map(|row| row.iter().sum::<f64>() / n)
        .collect();
    let spread: Vec<f64> = traj
        .states
        .iter()
        .zip(&mean)
        .map(|(row, zbar)| row.iter().map(|z| (z - zbar).abs()).sum::<f64>() / z_d.abs())
        .collect();
    let settle_idx = (t_s / h).round() as usize;
    let mut delta = 0.0;
    for k in 0..settle_idx {
        delta += 0.5 * (spread[k] + spread[k + 1]) * h;
    }
    let delta_star = if t_s > 0.0 { delta / t_s } else { 0.0 };
    let horizon = *traj.times.last().unwrap();
    Ok(CohesionReport {
        t_s,
        delta,
        delta_star,
        max_input: max_input(traj)?,
        preset: traj.mode.clone(),
        params: serde_json::Value::Null,
        mean_trajectory: mean,
        short_tail: horizon < 1.5 * t_s,
    })
}
