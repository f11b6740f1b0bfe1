//! Right-hand sides for every system variant: nominal consensus,
//! gain-scaled consensus, delayed self reinforcement (DSR) in matrix and
//! per-agent form, DSR source tracking, and the filtered higher-order DSR
//! chain.

use crate::error::DynamicsError;
use crate::graph::PinnedSystem;
use crate::matrix::Matrix;
use serde::{Deserialize, Serialize};

/// DSR controller configuration.
///
/// `alpha` is the cohesive response rate (1/s), `beta` the reinforcement
/// gain, `tau` the delay (s), `omega` the optional low-pass cutoff (rad/s)
/// for the filtered derivative chain, and `r` the relative degree of the
/// agent dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsrParams {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega: Option<f64>,
    pub r: usize,
}

impl DsrParams {
    pub fn first_order(alpha: f64, beta: f64, tau: f64) -> Self {
        Self {
            alpha,
            beta,
            tau,
            omega: None,
            r: 1,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("tau", self.tau),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(DynamicsError::NonPositiveParameter { name, value });
            }
        }
        if let Some(omega) = self.omega {
            if !(omega > 0.0) || !omega.is_finite() {
                return Err(DynamicsError::NonPositiveParameter {
                    name: "omega",
                    value: omega,
                });
            }
        }
        if self.r == 0 {
            return Err(DynamicsError::ZeroRelativeDegree);
        }
        Ok(())
    }

    /// Coefficient of `s^k` in `(s + alpha)^r`; the leading one is 1.
    pub fn alpha_hat(&self, k: usize) -> f64 {
        assert!(k <= self.r);
        binomial(self.r, k) * self.alpha.powi((self.r - k) as i32)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The DDE matrices of the first-order DSR system
/// `dZ/dt = A Z(t) + A_d Z(t - tau) + B_d z_s(t)`.
#[derive(Debug, Clone)]
pub struct DsrMatrices {
    pub a: Matrix,
    pub a_d: Matrix,
    pub b_d: Vec<f64>,
}

/// Assembles `A = -alpha beta K + (I - beta K)/tau`,
/// `A_d = -(I - beta K)/tau`, `B_d = alpha beta B`.
pub fn dsr_matrices(ps: &PinnedSystem, p: &DsrParams) -> DsrMatrices {
    let n = ps.n();
    let mut a = Matrix::zeros(n, n);
    let mut a_d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let gain_term = delta - p.beta * ps.k[(i, j)];
            a[(i, j)] = -p.alpha * p.beta * ps.k[(i, j)] + gain_term / p.tau;
            a_d[(i, j)] = -gain_term / p.tau;
        }
    }
    let b_d = ps.b.iter().map(|b| p.alpha * p.beta * b).collect();
    DsrMatrices { a, a_d, b_d }
}

/// Nominal consensus update `-K Z + B z_s`; the result is also the input.
pub fn nominal_rhs(ps: &PinnedSystem, z_s: f64, z: &[f64]) -> Vec<f64> {
    let mut dz = ps.k.matvec(z);
    for (d, b) in dz.iter_mut().zip(&ps.b) {
        *d = -*d + b * z_s;
    }
    dz
}

/// Gain-scaled nominal update `k_gain (-K Z + B z_s)`.
pub fn scaled_nominal_rhs(ps: &PinnedSystem, k_gain: f64, z_s: f64, z: &[f64]) -> Vec<f64> {
    let mut dz = nominal_rhs(ps, z_s, z);
    for d in dz.iter_mut() {
        *d *= k_gain;
    }
    dz
}

/// First-order DSR update `A Z + A_d Z(t - tau) + B_d z_s`.
pub fn dsr_rhs(m: &DsrMatrices, z_now: &[f64], z_delayed: &[f64], z_s: f64) -> Vec<f64> {
    let now = m.a.matvec(z_now);
    let delayed = m.a_d.matvec(z_delayed);
    now.iter()
        .zip(&delayed)
        .zip(&m.b_d)
        .map(|((x, y), b)| x + y + b * z_s)
        .collect()
}

/// DSR tracking update `A Z + A_d Z(t - tau) + alpha beta B z_s + beta B dz_s`.
pub fn dsr_tracking_rhs(
    m: &DsrMatrices,
    p: &DsrParams,
    ps: &PinnedSystem,
    z_now: &[f64],
    z_delayed: &[f64],
    z_s: f64,
    dz_s: f64,
) -> Vec<f64> {
    let mut dz = dsr_rhs(m, z_now, z_delayed, z_s);
    for (d, b) in dz.iter_mut().zip(&ps.b) {
        *d += p.beta * b * dz_s;
    }
    dz
}

/// Local memory term `v_i = z_i - beta K_i Z` available to agent `i`.
pub fn per_agent_memory(i: usize, k_row: &[f64], beta: f64, z: &[f64]) -> f64 {
    let coupling: f64 = k_row.iter().zip(z).map(|(k, zj)| k * zj).sum();
    z[i] - beta * coupling
}

/// One agent's DSR update from its own Laplacian row, pinning weight, and
/// delayed memory sample: `-alpha beta K_i Z + alpha beta B_i z_s
/// + [v_i(t) - v_i(t - tau)] / tau`.
pub fn per_agent_update(
    i: usize,
    k_row: &[f64],
    b_i: f64,
    p: &DsrParams,
    z: &[f64],
    z_s: f64,
    v_delayed: f64,
) -> f64 {
    let coupling: f64 = k_row.iter().zip(z).map(|(k, zj)| k * zj).sum();
    let v_now = z[i] - p.beta * coupling;
    -p.alpha * p.beta * coupling + p.alpha * p.beta * b_i * z_s + (v_now - v_delayed) / p.tau
}

/// Exogenous source signal with analytic derivatives.
///
/// The step takes its right-limit convention: value 0 at `t <= 0`,
/// amplitude for `t > 0`, and all derivatives of order one and up are
/// reported as 0 for `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSignal {
    Step { amplitude: f64 },
    SmoothStep { amplitude: f64, rate: f64 },
    Sinusoid { amplitude: f64, frequency: f64 },
}

impl SourceSignal {
    pub fn amplitude(&self) -> f64 {
        match *self {
            SourceSignal::Step { amplitude }
            | SourceSignal::SmoothStep { amplitude, .. }
            | SourceSignal::Sinusoid { amplitude, .. } => amplitude,
        }
    }

    /// Final value for settling purposes; the sinusoid has none.
    pub fn settling_target(&self) -> Option<f64> {
        match *self {
            SourceSignal::Step { amplitude } | SourceSignal::SmoothStep { amplitude, .. } => {
                Some(amplitude)
            }
            SourceSignal::Sinusoid { .. } => None,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self, SourceSignal::Step { .. })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivative(t, 0)
    }

    /// `order`-th time derivative; order 0 is the value itself.
    pub fn derivative(&self, t: f64, order: usize) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            SourceSignal::Step { amplitude } => {
                if order == 0 {
                    amplitude
                } else {
                    0.0
                }
            }
            SourceSignal::SmoothStep { amplitude, rate } => {
                // z_d (1 - e^{-rate t}); k-th derivative alternates sign.
                if order == 0 {
                    amplitude * (1.0 - (-rate * t).exp())
                } else {
                    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
                    sign * amplitude * rate.powi(order as i32) * (-rate * t).exp()
                }
            }
            SourceSignal::Sinusoid {
                amplitude,
                frequency,
            } => {
                let phase = frequency * t + order as f64 * std::f64::consts::FRAC_PI_2;
                amplitude * frequency.powi(order as i32) * phase.sin()
            }
        }
    }

    /// Weighted derivative sum `sum_k alpha_hat_k z_s^{(k)}(t)` feeding the
    /// higher-order drive.
    pub fn weighted_derivative_sum(&self, p: &DsrParams, t: f64) -> f64 {
        (0..=p.r).map(|k| p.alpha_hat(k) * self.derivative(t, k)).sum()
    }
}

/// State bundle layout for the higher-order DSR chain: `r` output
/// derivative chunks `Z, Z', ..., Z^{(r-1)}` followed by `r` filter chunks
/// `Zhat^{(1)}, ..., Zhat^{(r)}`, each of width `n`.
pub fn higher_order_dim(n: usize, r: usize) -> usize {
    2 * r * n
}

/// Higher-order DSR right-hand side.
///
/// Writes the bundle derivative into `out` and returns nothing; the input
/// `U = Z^{(r)}` sits in the chunk at `(r-1) * n`. With `dsr_term` false
/// the filtered reinforcement is dropped entirely and the filter chunks
/// stay frozen at zero.
pub fn higher_order_rhs(
    ps: &PinnedSystem,
    p: &DsrParams,
    dsr_term: bool,
    bundle: &[f64],
    bundle_delayed: &[f64],
    z_s_star: f64,
    out: &mut [f64],
) {
    let n = ps.n();
    let r = p.r;
    debug_assert_eq!(bundle.len(), higher_order_dim(n, r));
    debug_assert_eq!(out.len(), bundle.len());

    let chunk = |b: &[f64], idx: usize| -> std::ops::Range<usize> {
        debug_assert!(idx < 2 * r && (idx + 1) * n <= b.len());
        idx * n..(idx + 1) * n
    };

    // d/dt Z^{(k)} = Z^{(k+1)} for k < r-1.
    for k in 0..r.saturating_sub(1) {
        let src = chunk(bundle, k + 1);
        let dst = chunk(bundle, k);
        out[dst].copy_from_slice(&bundle[src]);
    }

    // Z^{(r)} = -beta K sum_k alpha_hat_k Z^{(k)} + beta B z_s^*
    //           [+ (I - beta K) Zhat^{(r)}].
    let mut weighted = vec![0.0; n];
    for k in 0..r {
        let ah = p.alpha_hat(k);
        for (w, z) in weighted.iter_mut().zip(&bundle[chunk(bundle, k)]) {
            *w += ah * z;
        }
    }
    let coupled = ps.k.matvec(&weighted);
    let top = chunk(bundle, r - 1);
    for i in 0..n {
        let mut acc = -p.beta * coupled[i] + p.beta * ps.b[i] * z_s_star;
        if dsr_term {
            let zhat_r = &bundle[chunk(bundle, 2 * r - 1)];
            let k_zhat = ps.k.row_dot(i, zhat_r);
            acc += zhat_r[i] - p.beta * k_zhat;
        }
        out[top.start + i] = acc;
    }

    // Filter chain: d/dt Zhat^{(j)} = -Omega Zhat^{(j)}
    //   + Omega [Yhat^{(j-1)}(t) - Yhat^{(j-1)}(t - tau)] / tau,
    // with Yhat^{(0)} = Z and Yhat^{(j)} = Zhat^{(j)}.
    if dsr_term {
        let omega = p.omega.expect("validated: omega present for filtered DSR");
        for j in 1..=r {
            let stage = chunk(bundle, r - 1 + j);
            let input = if j == 1 {
                chunk(bundle, 0)
            } else {
                chunk(bundle, r - 1 + (j - 1))
            };
            for i in 0..n {
                let fresh = bundle[input.start + i] - bundle_delayed[input.start + i];
                out[stage.start + i] =
                    -omega * bundle[stage.start + i] + omega * fresh / p.tau;
            }
        }
    } else {
        for j in 1..=r {
            let stage = chunk(bundle, r - 1 + j);
            out[stage].fill(0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pinned_system;
    use crate::reference;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn single_agent() -> PinnedSystem {
        pinned_system(&crate::graph::build_graph(&crate::graph::GraphSpec {
            agents: vec![1],
            source: 0,
            edges: vec![crate::graph::EdgeSpec {
                from: 0,
                to: 1,
                w: 1.0,
            }],
        })
        .unwrap())
    }

    #[test]
    fn dsr_matrices_single_agent_numbers() {
        let ps = single_agent();
        let p = DsrParams::first_order(1.0, 2.0, 0.1);
        let m = dsr_matrices(&ps, &p);
        assert_relative_eq!(m.a[(0, 0)], -12.0, max_relative = 1e-12);
        assert_relative_eq!(m.a_d[(0, 0)], 10.0, max_relative = 1e-12);
        assert_relative_eq!(m.b_d[0], 2.0, max_relative = 1e-12);
        // Hand arithmetic: -12 * 0.5 + 10 * 0.4 + 2 * 1 = 0.
        let dz = dsr_rhs(&m, &[0.5], &[0.4], 1.0);
        assert!(dz[0].abs() <= 1e-12);
    }

    #[test]
    fn dsr_matrices_identities_on_reference_network() {
        let ps = pinned_system(&reference::network());
        let p = DsrParams::first_order(0.53, 2.0, 0.075);
        let m = dsr_matrices(&ps, &p);
        let n = ps.n();
        for i in 0..n {
            for j in 0..n {
                let sum = m.a[(i, j)] + m.a_d[(i, j)];
                assert!(
                    (sum - (-p.alpha * p.beta * ps.k[(i, j)])).abs() <= 1e-12,
                    "A + A_d at ({i},{j})"
                );
            }
            assert!((m.b_d[i] - p.alpha * p.beta * ps.b[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn nominal_rhs_consensus_and_zero_state() {
        let ps = pinned_system(&reference::network());
        let consensus = vec![2.5; 6];
        let dz = nominal_rhs(&ps, 2.5, &consensus);
        assert!(dz.iter().all(|d| d.abs() <= 1e-12));
        let dz = nominal_rhs(&ps, 1.0, &[0.0; 6]);
        assert_eq!(dz, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn scaled_nominal_matches_and_scales() {
        let ps = pinned_system(&reference::network());
        let z = [0.3, 0.1, 0.9, 0.2, 0.5, 0.7];
        let unscaled = nominal_rhs(&ps, 1.0, &z);
        let k1 = scaled_nominal_rhs(&ps, 1.0, 1.0, &z);
        assert_eq!(unscaled, k1);
        let fast = scaled_nominal_rhs(&ps, 77.9, 1.0, &[0.0; 6]);
        assert_relative_eq!(fast[0], 77.9, max_relative = 1e-12);
        assert!(fast[1..].iter().all(|d| d.abs() <= 1e-12));
        let eq = scaled_nominal_rhs(&ps, 77.9, 3.0, &vec![3.0; 6]);
        assert!(eq.iter().all(|d| d.abs() <= 1e-12));
    }

    #[test]
    fn dsr_rhs_consensus_and_collapsed_delay() {
        let ps = pinned_system(&reference::network());
        let p = DsrParams::first_order(0.53, 2.0, 0.075);
        let m = dsr_matrices(&ps, &p);
        let consensus = vec![1.0; 6];
        let dz = dsr_rhs(&m, &consensus, &consensus, 1.0);
        assert!(dz.iter().all(|d| d.abs() <= 1e-10));
        // Equal now/delayed states collapse to the scaled nominal form.
        let z = [0.4, 0.2, 0.8, 0.1, 0.6, 0.5];
        let collapsed = dsr_rhs(&m, &z, &z, 0.7);
        let ideal = scaled_nominal_rhs(&ps, p.alpha * p.beta, 0.7, &z);
        for (c, i) in collapsed.iter().zip(&ideal) {
            assert!((c - i).abs() <= 1e-10);
        }
    }

    #[test]
    fn tracking_reduces_to_dsr_for_constant_source() {
        let ps = pinned_system(&reference::network());
        let p = DsrParams::first_order(0.53, 2.0, 0.075);
        let m = dsr_matrices(&ps, &p);
        let z = [0.4, 0.2, 0.8, 0.1, 0.6, 0.5];
        let zd = [0.3, 0.15, 0.7, 0.05, 0.55, 0.45];
        let plain = dsr_rhs(&m, &z, &zd, 0.9);
        let tracking = dsr_tracking_rhs(&m, &p, &ps, &z, &zd, 0.9, 0.0);
        assert_eq!(plain, tracking);
    }

    #[test]
    fn tracking_cohesive_ideal_components_match() {
        // All agents riding the source with a delayed state consistent with
        // that synchronized motion: every component of the update equals the
        // source rate, the zero-error ideal tracking behaviour.
        let ps = pinned_system(&reference::network());
        let p = DsrParams::first_order(0.8, 2.0, 0.05);
        let m = dsr_matrices(&ps, &p);
        let src = SourceSignal::Sinusoid {
            amplitude: 1.0,
            frequency: 0.9,
        };
        let t = 1.3;
        let z_s = src.value(t);
        let dz_s = src.derivative(t, 1);
        let state = vec![z_s; 6];
        let delayed = vec![z_s - p.tau * dz_s; 6];
        let dz = dsr_tracking_rhs(&m, &p, &ps, &state, &delayed, z_s, dz_s);
        for d in &dz {
            assert_relative_eq!(*d, dz_s, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn per_agent_form_matches_matrix_form() {
        let ps = pinned_system(&reference::network());
        let p = DsrParams::first_order(0.53, 2.0, 0.075);
        let m = dsr_matrices(&ps, &p);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let z_del: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let z_s = rng.gen_range(-1.0..1.0);
            let matrix_form = dsr_rhs(&m, &z, &z_del, z_s);
            for i in 0..6 {
                let v_delayed = per_agent_memory(i, ps.k.row(i), p.beta, &z_del);
                let local = per_agent_update(i, ps.k.row(i), ps.b[i], &p, &z, z_s, v_delayed);
                assert!(
                    (local - matrix_form[i]).abs() <= 1e-12,
                    "agent {i}: {local} vs {}",
                    matrix_form[i]
                );
            }
        }
    }

    #[test]
    fn per_agent_consensus_is_stationary() {
        let ps = pinned_system(&reference::network());
        let p = DsrParams::first_order(0.53, 2.0, 0.075);
        let z = vec![1.0; 6];
        for i in 0..6 {
            let v = per_agent_memory(i, ps.k.row(i), p.beta, &z);
            let d = per_agent_update(i, ps.k.row(i), ps.b[i], &p, &z, 1.0, v);
            assert!(d.abs() <= 1e-12);
        }
    }

    #[test]
    fn higher_order_zero_state_step_drive() {
        let ps = pinned_system(&reference::network());
        let p = DsrParams {
            alpha: 1.195,
            beta: 2.0,
            tau: 0.075,
            omega: Some(0.1195),
            r: 2,
        };
        let n = 6;
        let dim = higher_order_dim(n, 2);
        let bundle = vec![0.0; dim];
        let mut out = vec![0.0; dim];
        let src = SourceSignal::Step { amplitude: 1.0 };
        let z_s_star = src.weighted_derivative_sum(&p, 0.5);
        assert_relative_eq!(z_s_star, p.alpha * p.alpha, max_relative = 1e-12);
        higher_order_rhs(&ps, &p, true, &bundle, &bundle, z_s_star, &mut out);
        // Z^{(2)} = beta B alpha^2 with everything else at rest.
        let u = &out[n..2 * n];
        assert_relative_eq!(u[0], p.beta * p.alpha * p.alpha, max_relative = 1e-12);
        assert!(u[1..].iter().all(|x| x.abs() <= 1e-12));
    }

    #[test]
    fn higher_order_single_agent_spot_check() {
        // Hand-expanded second-order update for one agent.
        let ps = single_agent();
        let p = DsrParams {
            alpha: 1.1,
            beta: 2.0,
            tau: 0.1,
            omega: Some(5.0),
            r: 2,
        };
        // bundle = [z, zdot, zhat1, zhat2]
        let bundle = [0.4, -0.2, 0.3, 0.25];
        let delayed = [0.35, -0.1, 0.2, 0.15];
        let z_s_star = 0.9;
        let mut out = [0.0; 4];
        higher_order_rhs(&ps, &p, true, &bundle, &delayed, z_s_star, &mut out);
        // dz = zdot
        assert_eq!(out[0], -0.2);
        // zddot = -beta k (a0 z + a1 zdot) + beta b zs* + (1 - beta k) zhat2
        let expected = -2.0 * (1.21 * 0.4 + 2.2 * (-0.2)) + 2.0 * 0.9 + (1.0 - 2.0) * 0.25;
        assert_relative_eq!(out[1], expected, max_relative = 1e-12);
        // filter stages
        let s1 = -5.0 * 0.3 + 5.0 * (0.4 - 0.35) / 0.1;
        let s2 = -5.0 * 0.25 + 5.0 * (0.3 - 0.2) / 0.1;
        assert_relative_eq!(out[2], s1, max_relative = 1e-12);
        assert_relative_eq!(out[3], s2, max_relative = 1e-12);
    }

    #[test]
    fn alpha_hat_is_binomial_expansion() {
        let p = DsrParams {
            alpha: 2.0,
            beta: 1.5,
            tau: 0.1,
            omega: None,
            r: 3,
        };
        // (s + 2)^3 = s^3 + 6 s^2 + 12 s + 8
        assert_relative_eq!(p.alpha_hat(3), 1.0);
        assert_relative_eq!(p.alpha_hat(2), 6.0);
        assert_relative_eq!(p.alpha_hat(1), 12.0);
        assert_relative_eq!(p.alpha_hat(0), 8.0);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let mut p = DsrParams::first_order(0.5, 1.0, 0.0);
        assert!(p.validate().is_err());
        p.tau = 0.1;
        assert!(p.validate().is_ok());
        p.r = 0;
        assert!(matches!(
            p.validate(),
            Err(DynamicsError::ZeroRelativeDegree)
        ));
        p.r = 1;
        p.omega = Some(-1.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn source_signals_and_derivatives() {
        let step = SourceSignal::Step { amplitude: 2.0 };
        assert_eq!(step.value(0.0), 0.0);
        assert_eq!(step.value(1e-9), 2.0);
        assert_eq!(step.derivative(0.5, 1), 0.0);
        let smooth = SourceSignal::SmoothStep {
            amplitude: 1.0,
            rate: 3.0,
        };
        assert_relative_eq!(smooth.value(1.0), 1.0 - (-3.0f64).exp());
        assert_relative_eq!(smooth.derivative(1.0, 1), 3.0 * (-3.0f64).exp());
        assert_relative_eq!(smooth.derivative(1.0, 2), -9.0 * (-3.0f64).exp());
        let sin = SourceSignal::Sinusoid {
            amplitude: 2.0,
            frequency: 0.5,
        };
        assert_relative_eq!(sin.value(1.0), 2.0 * 0.5f64.sin());
        assert_relative_eq!(sin.derivative(1.0, 1), 1.0 * 0.5f64.cos());
    }

    #[test]
    fn delayed_difference_gain_bound() {
        // |(1 - e^{-j w tau}) / tau| <= 2 / tau across frequencies.
        let tau = 0.075;
        let mut w = 1e-3;
        while w <= 1e6 {
            let gain = num_complex::Complex64::new(1.0, 0.0)
                - (num_complex::Complex64::new(0.0, -w * tau)).exp();
            assert!(gain.norm() / tau <= 2.0 / tau + 1e-12, "w = {w}");
            w *= 1.3;
        }
    }
}
