//! Fixed-step method-of-steps integrator for every dynamics variant.
//!
//! Classical RK4 over a uniform grid. Delayed arguments are read from the
//! stored grid: the delay is a whole number of steps, so stage times hit
//! either stored samples or exact midpoints, which are linearly
//! interpolated. Pre-history is constant at the initial state with filter
//! stages at zero. Divergence is a flagged outcome, not a crash.

use crate::dynamics::{
    dsr_matrices, dsr_rhs, dsr_tracking_rhs, higher_order_dim, higher_order_rhs, nominal_rhs,
    scaled_nominal_rhs, DsrParams, SourceSignal,
};
use crate::error::{DynamicsError, SimError};
use crate::graph::PinnedSystem;

/// Magnitude beyond which a trajectory is flagged as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Simulation variant.
#[derive(Debug, Clone, PartialEq)]
pub enum SimMode {
    Nominal,
    ScaledNominal { k_gain: f64 },
    Dsr { params: DsrParams },
    DsrTracking { params: DsrParams },
    DsrHigherOrder { params: DsrParams, dsr_term: bool },
    IdealCohesive { alpha: f64, r: usize },
}

impl SimMode {
    pub fn label(&self) -> &'static str {
        match self {
            SimMode::Nominal => "nominal",
            SimMode::ScaledNominal { .. } => "scaled-nominal",
            SimMode::Dsr { .. } => "dsr",
            SimMode::DsrTracking { .. } => "dsr-tracking",
            SimMode::DsrHigherOrder { .. } => "dsr-higher-order",
            SimMode::IdealCohesive { .. } => "ideal-cohesive",
        }
    }

    fn delay(&self) -> Option<f64> {
        match self {
            SimMode::Dsr { params }
            | SimMode::DsrTracking { params }
            | SimMode::DsrHigherOrder {
                params,
                dsr_term: true,
            } => Some(params.tau),
            _ => None,
        }
    }
}

/// Simulation configuration over a uniform grid `[0, step, ..., horizon]`.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub mode: SimMode,
    pub source: SourceSignal,
    pub horizon: f64,
    pub step: f64,
    /// Initial agent states; empty means all zero.
    pub initial: Vec<f64>,
}

/// Time-gridded simulation output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Agent outputs per grid point.
    pub states: Vec<Vec<f64>>,
    /// Agent inputs per grid point.
    pub inputs: Vec<Vec<f64>>,
    /// Source samples per grid point.
    pub source: Vec<f64>,
    pub mode: String,
    /// Set to the divergence time when the run blew up; data stops there.
    pub diverged: Option<f64>,
}

impl Trajectory {
    pub fn n_agents(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn step(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }
}

/// Default integrator step: `min(tau / 20, horizon / 20000)` for delayed
/// modes, snapped so the delay is a whole number of steps; plain
/// `horizon / 20000` otherwise.
pub fn default_step(mode: &SimMode, horizon: f64) -> f64 {
    let base = horizon / 20000.0;
    match mode.delay() {
        Some(tau) => {
            let target = (tau / 20.0).min(base);
            tau / (tau / target).ceil()
        }
        None => base,
    }
}

struct Engine<'a> {
    dim: usize,
    delay_steps: usize,
    source: &'a SourceSignal,
    step: f64,
}

impl Engine<'_> {
    /// Delayed bundle at `grid index - delay_steps (+ offset)`, with
    /// constant pre-history.
    fn delayed<'h>(&self, history: &'h [Vec<f64>], init: &'h [f64], idx: isize) -> &'h [f64] {
        if idx <= 0 {
            init
        } else {
            &history[idx as usize]
        }
    }

    fn delayed_mid(
        &self,
        history: &[Vec<f64>],
        init: &[f64],
        idx: isize,
        buf: &mut Vec<f64>,
    ) {
        let lo = self.delayed(history, init, idx);
        let hi = self.delayed(history, init, idx + 1);
        buf.clear();
        buf.extend(lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)));
    }
}

/// Integrates the configured system and returns the sampled trajectory.
pub fn integrate(cfg: &SimConfig, ps: &PinnedSystem) -> Result<Trajectory, SimError> {
    if let SimMode::IdealCohesive { alpha, r } = cfg.mode {
        return integrate_ideal(
            ps.n(),
            alpha,
            r,
            &cfg.source,
            cfg.horizon,
            cfg.step,
            cfg.initial.first().copied().unwrap_or(0.0),
        );
    }

    let n = ps.n();
    validate_config(cfg, n)?;
    let h = cfg.step;
    let steps = (cfg.horizon / h - 1e-9).ceil().max(1.0) as usize;
    let delay_steps = match cfg.mode.delay() {
        Some(tau) => {
            let ratio = tau / h;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio < 1.0 - 1e-9 {
                return Err(SimError::StepNotDividingDelay {
                    step: h,
                    tau,
                    ratio,
                });
            }
            ratio.round() as usize
        }
        None => 0,
    };

    // Assemble the state bundle and right-hand side for the variant.
    let initial_z = if cfg.initial.is_empty() {
        vec![0.0; n]
    } else {
        cfg.initial.clone()
    };
    let (dim, init, rhs): (usize, Vec<f64>, RhsBox) = match &cfg.mode {
        SimMode::Nominal => {
            let ps = ps.clone();
            (
                n,
                initial_z.clone(),
                Box::new(move |t, y: &[f64], _d: Option<&[f64]>, src: &SourceSignal| {
                    nominal_rhs(&ps, src.value(t), y)
                }),
            )
        }
        SimMode::ScaledNominal { k_gain } => {
            let ps = ps.clone();
            let k_gain = *k_gain;
            (
                n,
                initial_z.clone(),
                Box::new(move |t, y: &[f64], _d, src: &SourceSignal| {
                    scaled_nominal_rhs(&ps, k_gain, src.value(t), y)
                }),
            )
        }
        SimMode::Dsr { params } => {
            let m = dsr_matrices(ps, params);
            (
                n,
                initial_z.clone(),
                Box::new(move |t, y: &[f64], d: Option<&[f64]>, src: &SourceSignal| {
                    dsr_rhs(&m, y, d.expect("delayed state"), src.value(t))
                }),
            )
        }
        SimMode::DsrTracking { params } => {
            let m = dsr_matrices(ps, params);
            let p = *params;
            let ps = ps.clone();
            (
                n,
                initial_z.clone(),
                Box::new(move |t, y: &[f64], d: Option<&[f64]>, src: &SourceSignal| {
                    dsr_tracking_rhs(
                        &m,
                        &p,
                        &ps,
                        y,
                        d.expect("delayed state"),
                        src.value(t),
                        src.derivative(t, 1),
                    )
                }),
            )
        }
        SimMode::DsrHigherOrder { params, dsr_term } => {
            let p = *params;
            let dsr_term = *dsr_term;
            let ps = ps.clone();
            let dim = higher_order_dim(n, p.r);
            let mut init = vec![0.0; dim];
            init[..n].copy_from_slice(&initial_z);
            (
                dim,
                init,
                Box::new(move |t, y: &[f64], d: Option<&[f64]>, src: &SourceSignal| {
                    let zeros;
                    let delayed = match d {
                        Some(d) => d,
                        None => {
                            zeros = vec![0.0; y.len()];
                            &zeros
                        }
                    };
                    let mut out = vec![0.0; y.len()];
                    higher_order_rhs(
                        &ps,
                        &p,
                        dsr_term,
                        y,
                        delayed,
                        src.weighted_derivative_sum(&p, t),
                        &mut out,
                    );
                    out
                }),
            )
        }
        SimMode::IdealCohesive { .. } => unreachable!(),
    };

    // The logged input: the full derivative for first-order variants, the
    // r-th output derivative chunk for the higher-order chain.
    let input_range = match &cfg.mode {
        SimMode::DsrHigherOrder { params, .. } => (params.r - 1) * n..params.r * n,
        _ => 0..n,
    };

    let engine = Engine {
        dim,
        delay_steps,
        source: &cfg.source,
        step: h,
    };
    let (history, inputs, diverged) = run_grid(&engine, steps, init, rhs, input_range.clone());

    let times: Vec<f64> = (0..history.len()).map(|k| k as f64 * h).collect();
    let source: Vec<f64> = times.iter().map(|&t| cfg.source.value(t)).collect();
    let states: Vec<Vec<f64>> = history.iter().map(|b| b[..n].to_vec()).collect();
    Ok(Trajectory {
        times,
        states,
        inputs,
        source,
        mode: cfg.mode.label().to_string(),
        diverged,
    })
}

type RhsBox = Box<dyn Fn(f64, &[f64], Option<&[f64]>, &SourceSignal) -> Vec<f64>>;

fn run_grid(
    engine: &Engine<'_>,
    steps: usize,
    init: Vec<f64>,
    rhs: RhsBox,
    input_range: std::ops::Range<usize>,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Option<f64>) {
    let h = engine.step;
    let m = engine.delay_steps as isize;
    let delayed_enabled = engine.delay_steps > 0;
    let mut history: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    history.push(init.clone());
    let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut diverged = None;
    let mut mid_buf = Vec::with_capacity(engine.dim);

    for k in 0..steps {
        let t = k as f64 * h;
        let y = history[k].clone();

        let (d0, dmid, d1);
        if delayed_enabled {
            d0 = Some(engine.delayed(&history, &init, k as isize - m).to_vec());
            engine.delayed_mid(&history, &init, k as isize - m, &mut mid_buf);
            dmid = Some(mid_buf.clone());
            d1 = Some(engine.delayed(&history, &init, k as isize - m + 1).to_vec());
        } else {
            d0 = None;
            dmid = None;
            d1 = None;
        }

        let k1 = rhs(t, &y, d0.as_deref(), engine.source);
        inputs.push(k1[input_range.clone()].to_vec());

        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = rhs(t + 0.5 * h, &y2, dmid.as_deref(), engine.source);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = rhs(t + 0.5 * h, &y3, dmid.as_deref(), engine.source);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = rhs(t + h, &y4, d1.as_deref(), engine.source);

        let next: Vec<f64> = (0..engine.dim)
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();

        if next.iter().any(|x| !x.is_finite() || x.abs() > DIVERGENCE_LIMIT) {
            diverged = Some((k + 1) as f64 * h);
            break;
        }
        history.push(next);
    }

    if diverged.is_none() {
        // Input sample at the final grid point.
        let k = steps;
        let t = k as f64 * h;
        let d0 = if delayed_enabled {
            Some(engine.delayed(&history, &init, k as isize - m).to_vec())
        } else {
            None
        };
        let k1 = rhs(t, &history[k], d0.as_deref(), engine.source);
        inputs.push(k1[input_range].to_vec());
    }

    (history, inputs, diverged)
}

fn validate_config(cfg: &SimConfig, n: usize) -> Result<(), SimError> {
    if !(cfg.step > 0.0) || !cfg.step.is_finite() {
        return Err(SimError::NonPositiveStep(cfg.step));
    }
    if cfg.horizon <= cfg.step {
        return Err(SimError::HorizonTooShort);
    }
    if !cfg.initial.is_empty() && cfg.initial.len() != n {
        return Err(SimError::InitialDimension {
            got: cfg.initial.len(),
            expected: n,
        });
    }
    match &cfg.mode {
        SimMode::ScaledNominal { k_gain } => {
            if !(*k_gain > 0.0) {
                return Err(DynamicsError::NonPositiveParameter {
                    name: "k_gain",
                    value: *k_gain,
                }
                .into());
            }
        }
        SimMode::Dsr { params } => params.validate()?,
        SimMode::DsrTracking { params } => {
            params.validate()?;
            if !cfg.source.is_smooth() {
                return Err(DynamicsError::StepSourceInTrackingMode.into());
            }
        }
        SimMode::DsrHigherOrder { params, dsr_term } => {
            params.validate()?;
            if *dsr_term && params.omega.is_none() {
                return Err(DynamicsError::MissingOmega.into());
            }
        }
        _ => {}
    }
    Ok(())
}

/// Ideal cohesive response: one scalar chain
/// `z^{(r)} = -sum_{k<r} alpha_hat_k z^{(k)} + sum_{k<=r} alpha_hat_k z_s^{(k)}`
/// replicated across all agents.
pub fn integrate_ideal(
    n_agents: usize,
    alpha: f64,
    r: usize,
    source: &SourceSignal,
    horizon: f64,
    step: f64,
    initial: f64,
) -> Result<Trajectory, SimError> {
    let p = DsrParams {
        alpha,
        beta: 1.0,
        tau: 1.0,
        omega: None,
        r,
    };
    p.validate()?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(SimError::NonPositiveStep(step));
    }
    if horizon <= step {
        return Err(SimError::HorizonTooShort);
    }
    let h = step;
    let steps = (horizon / h - 1e-9).ceil().max(1.0) as usize;

    let rhs = |t: f64, y: &[f64]| -> Vec<f64> {
        let mut dy = vec![0.0; r];
        for k in 0..r - 1 {
            dy[k] = y[k + 1];
        }
        let mut top = source.weighted_derivative_sum(&p, t);
        for k in 0..r {
            top -= p.alpha_hat(k) * y[k];
        }
        dy[r - 1] = top;
        dy
    };

    let mut y = vec![0.0; r];
    y[0] = initial;
    let mut history = vec![y.clone()];
    let mut inputs_scalar = Vec::with_capacity(steps + 1);
    let mut diverged = None;
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = rhs(t, &y);
        inputs_scalar.push(k1[r - 1]);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, b)| a + 0.5 * h * b).collect();
        let k2 = rhs(t + 0.5 * h, &y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, b)| a + 0.5 * h * b).collect();
        let k3 = rhs(t + 0.5 * h, &y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, b)| a + h * b).collect();
        let k4 = rhs(t + h, &y4);
        for i in 0..r {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|x| !x.is_finite() || x.abs() > DIVERGENCE_LIMIT) {
            diverged = Some((k + 1) as f64 * h);
            break;
        }
        history.push(y.clone());
    }
    if diverged.is_none() {
        let t = steps as f64 * h;
        inputs_scalar.push(rhs(t, &y)[r - 1]);
    }

    let times: Vec<f64> = (0..history.len()).map(|k| k as f64 * h).collect();
    let source_samples: Vec<f64> = times.iter().map(|&t| source.value(t)).collect();
    Ok(Trajectory {
        states: history.iter().map(|y| vec![y[0]; n_agents]).collect(),
        inputs: inputs_scalar
            .iter()
            .map(|&u| vec![u; n_agents])
            .collect(),
        times,
        source: source_samples,
        mode: "ideal-cohesive".to_string(),
        diverged,
    })
}

/// Max-infinity deviation between the DSR tracking response and the ideal
/// cohesive response from identical synchronized initial conditions.
pub fn ideal_tracking_deviation(
    ps: &PinnedSystem,
    params: &DsrParams,
    source: &SourceSignal,
    horizon: f64,
    step: f64,
) -> Result<f64, SimError> {
    let dsr = integrate(
        &SimConfig {
            mode: SimMode::DsrTracking { params: *params },
            source: *source,
            horizon,
            step,
            initial: vec![],
        },
        ps,
    )?;
    let ideal = integrate_ideal(ps.n(), params.alpha, 1, source, horizon, step, 0.0)?;
    let max_dev = dsr
        .states
        .iter()
        .zip(&ideal.states)
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        })
        .fold(0.0f64, f64::max);
    Ok(max_dev)
}

/// Writes a trajectory as CSV: header `t,z1..zn,u1..un,zs`, one row per
/// grid point, 17 significant digits so values round-trip losslessly.
pub fn write_csv<W: std::io::Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    let n = traj.n_agents();
    let mut header = String::from("t");
    for i in 1..=n {
        header.push_str(&format!(",z{i}"));
    }
    for i in 1..=n {
        header.push_str(&format!(",u{i}"));
    }
    header.push_str(",zs");
    writeln!(out, "{header}")?;
    for k in 0..traj.times.len() {
        let mut row = format!("{:.16e}", traj.times[k]);
        for z in &traj.states[k] {
            row.push_str(&format!(",{z:.16e}"));
        }
        for u in &traj.inputs[k] {
            row.push_str(&format!(",{u:.16e}"));
        }
        row.push_str(&format!(",{:.16e}", traj.source[k]));
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Reads a trajectory written by [`write_csv`].
pub fn read_csv<R: std::io::BufRead>(input: R) -> std::io::Result<Trajectory> {
    let bad = |msg: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, msg.to_string());
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty csv"))??;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols.len() % 2 != 0 {
        return Err(bad("malformed header"));
    }
    let n = (cols.len() - 2) / 2;
    let mut traj = Trajectory {
        times: vec![],
        states: vec![],
        inputs: vec![],
        source: vec![],
        mode: String::new(),
        diverged: None,
    };
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split(',').map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| bad(&format!("bad number: {e}")))?;
        if vals.len() != 2 * n + 2 {
            return Err(bad("row width mismatch"));
        }
        traj.times.push(vals[0]);
        traj.states.push(vals[1..=n].to_vec());
        traj.inputs.push(vals[n + 1..=2 * n].to_vec());
        traj.source.push(vals[2 * n + 1]);
    }
    Ok(traj)
}
