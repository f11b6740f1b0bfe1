//! Stability instruments for the DSR delay-differential equation: modal
//! decomposition, Lambert-W root surveys, the real-part sufficient
//! condition and its eigenvalue-range form, the delay-independent
//! real-spectrum result, the scalar necessary-and-sufficient check for
//! real modal pairs, the positive-definiteness check for undirected
//! graphs, and the filtered higher-order magnitude condition.

use crate::dynamics::DsrParams;
use crate::error::StabilityError;
use crate::graph::{PinnedSystem, Spectrum};
use crate::numerics::{lambert_w, Complex};
use serde::Serialize;

/// Real-part margin used when classifying surveyed roots; keeps branch
/// point numerical dust from flipping verdicts.
pub const ROOT_MARGIN: f64 = 1e-9;

/// Per-eigenvalue coefficients of the scalar DDE
/// `ds/dt: s - lambda - lambda_d e^{-s tau} = 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModalPair {
    /// Eigenvalue of the pinned Laplacian this pair derives from.
    pub lambda_k: Complex,
    /// Instantaneous coefficient `-alpha beta lambda_K + (1 - beta lambda_K)/tau`.
    pub lambda: Complex,
    /// Delayed coefficient `-(1 - beta lambda_K)/tau`.
    pub lambda_d: Complex,
}

/// Builds the modal pairs for every eigenvalue of the spectrum.
pub fn modal_pairs(spectrum: &Spectrum, p: &DsrParams) -> Vec<ModalPair> {
    spectrum
        .eigenvalues
        .iter()
        .map(|&lambda_k| {
            let gain_term = (Complex::new(1.0, 0.0) - p.beta * lambda_k) / p.tau;
            ModalPair {
                lambda_k,
                lambda: -p.alpha * p.beta * lambda_k + gain_term,
                lambda_d: -gain_term,
            }
        })
        .collect()
}

/// One surveyed characteristic root.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BranchRoot {
    pub branch: i32,
    pub root: Complex,
    /// `|s - lambda - lambda_d e^{-s tau}|` at the returned root.
    pub residual: f64,
}

/// Survey of one modal pair across Lambert branches.
#[derive(Debug, Clone, Serialize)]
pub struct SurveyedPair {
    pub pair: ModalPair,
    pub roots: Vec<BranchRoot>,
    /// Branches where the Lambert iteration failed; the survey continues.
    pub failed_branches: Vec<i32>,
}

/// Root survey result across all modal pairs.
#[derive(Debug, Clone, Serialize)]
pub struct RootSurvey {
    pub pairs: Vec<SurveyedPair>,
    pub rightmost: Complex,
    pub max_residual: f64,
}

fn char_residual(s: Complex, pair: &ModalPair, tau: f64) -> Complex {
    s - pair.lambda - pair.lambda_d * (-s * tau).exp()
}

/// Surveys characteristic roots `s = lambda + W_k(tau lambda_d
/// e^{-lambda tau}) / tau` for branches `k` in `[-k_max, k_max]`, then
/// polishes each root with Newton steps on the characteristic equation.
pub fn lambert_root_survey(
    pairs: &[ModalPair],
    tau: f64,
    k_max: i32,
) -> Result<RootSurvey, StabilityError> {
    let mut surveyed = Vec::with_capacity(pairs.len());
    let mut rightmost: Option<Complex> = None;
    let mut max_residual = 0.0f64;

    for pair in pairs {
        let mut roots = Vec::new();
        let mut failed = Vec::new();
        let arg = tau * pair.lambda_d * (-pair.lambda * tau).exp();
        if arg.norm() == 0.0 {
            // Degenerate delay coefficient: the DDE is a plain ODE with the
            // single root s = lambda on the principal query.
            let root = pair.lambda;
            let residual = char_residual(root, pair, tau).norm();
            roots.push(BranchRoot {
                branch: 0,
                root,
                residual,
            });
        } else {
            for branch in -k_max..=k_max {
                match lambert_w(branch, arg) {
                    Ok(w) => {
                        let mut s = pair.lambda + w / tau;
                        // Newton polish on the characteristic equation.
                        for _ in 0..3 {
                            let g = char_residual(s, pair, tau);
                            let dg = Complex::new(1.0, 0.0)
                                + tau * pair.lambda_d * (-s * tau).exp();
                            if dg.norm() == 0.0 {
                                break;
                            }
                            let step = g / dg;
                            if !step.re.is_finite() || !step.im.is_finite() {
                                break;
                            }
                            s -= step;
                        }
                        let residual = char_residual(s, pair, tau).norm();
                        roots.push(BranchRoot {
                            branch,
                            root: s,
                            residual,
                        });
                    }
                    Err(_) => failed.push(branch),
                }
            }
        }
        for r in &roots {
            max_residual = max_residual.max(r.residual);
            rightmost = Some(match rightmost {
                Some(best) if best.re >= r.root.re => best,
                _ => r.root,
            });
        }
        surveyed.push(SurveyedPair {
            pair: *pair,
            roots,
            failed_branches: failed,
        });
    }

    match rightmost {
        Some(rightmost) => Ok(RootSurvey {
            pairs: surveyed,
            rightmost,
            max_residual,
        }),
        None => Err(StabilityError::EmptySurvey),
    }
}

/// Verdict of a stability instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Guaranteed (sufficient condition met) or, for exact instruments,
    /// established stable.
    Stable,
    /// The sufficient condition failed or a precondition is unmet; says
    /// nothing about actual instability.
    NotGuaranteed,
    /// Only exact instruments return this: a surveyed root in the right
    /// half plane or a violated necessary-and-sufficient condition.
    Unstable,
    /// The instrument's structural requirements do not apply to this
    /// system.
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Stable => "stable",
            Verdict::NotGuaranteed => "not-guaranteed",
            Verdict::Unstable => "unstable",
            Verdict::NotApplicable => "not-applicable",
        };
        f.write_str(s)
    }
}

/// Parameter echo carried in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ParamEcho {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub r: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<i32>,
}

impl ParamEcho {
    fn from_params(p: &DsrParams) -> Self {
        Self {
            alpha: p.alpha,
            beta: p.beta,
            tau: p.tau,
            omega: p.omega,
            r: p.r,
            k_max: None,
        }
    }
}

/// Per-eigenvalue record in a report.
#[derive(Debug, Clone, Serialize)]
pub struct EigenRecord {
    pub lambda_k: Complex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rightmost_root: Option<Complex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<BranchRoot>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_lambda: Option<f64>,
}

/// Output of one stability instrument.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub method: String,
    pub verdict: Verdict,
    pub eigenvalues: Vec<EigenRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub params: ParamEcho,
}

impl StabilityReport {
    fn new(method: &str, verdict: Verdict, params: ParamEcho) -> Self {
        Self {
            method: method.to_string(),
            verdict,
            eigenvalues: Vec::new(),
            rho_bar: None,
            psi_bar: None,
            eps_lambda: None,
            sup_value: None,
            message: None,
            params,
        }
    }
}

fn gain_assumption_holds(spectrum: &Spectrum, beta: f64) -> bool {
    spectrum.eigenvalues.iter().all(|l| beta * l.re > 1.0)
}

/// Wraps a root survey as a report. The survey is a falsifier and an
/// illustrator, not a proof: a right-half-plane root means unstable, a
/// clean window is evidence of stability over the surveyed branches.
pub fn survey_report(
    spectrum: &Spectrum,
    p: &DsrParams,
    k_max: i32,
) -> Result<StabilityReport, StabilityError> {
    let pairs = modal_pairs(spectrum, p);
    let survey = lambert_root_survey(&pairs, p.tau, k_max)?;
    let verdict = if survey.rightmost.re > ROOT_MARGIN {
        Verdict::Unstable
    } else if survey.rightmost.re < -ROOT_MARGIN {
        Verdict::Stable
    } else {
        Verdict::NotGuaranteed
    };
    let mut params = ParamEcho::from_params(p);
    params.k_max = Some(k_max);
    let mut report = StabilityReport::new("lambert-survey", verdict, params);
    report.eigenvalues = survey
        .pairs
        .iter()
        .map(|sp| {
            let rightmost = sp
                .roots
                .iter()
                .max_by(|a, b| a.root.re.partial_cmp(&b.root.re).unwrap())
                .map(|r| r.root);
            EigenRecord {
                lambda_k: sp.pair.lambda_k,
                lhs: None,
                rhs: None,
                rightmost_root: rightmost,
                roots: Some(sp.roots.clone()),
                v_lambda: None,
            }
        })
        .collect();
    report.message = Some(format!(
        "rightmost surveyed root {:.6e} {:+.6e}i, max characteristic residual {:.3e}",
        survey.rightmost.re, survey.rightmost.im, survey.max_residual
    ));
    Ok(report)
}

/// Per-eigenvalue real-part sufficient condition:
/// `|beta lambda_K - 1| - (beta Re lambda_K - 1) < alpha tau Re(beta lambda_K)`.
pub fn theorem_realpart_check(spectrum: &Spectrum, p: &DsrParams) -> StabilityReport {
    let params = ParamEcho::from_params(p);
    if !gain_assumption_holds(spectrum, p.beta) {
        let mut r = StabilityReport::new("theorem1", Verdict::NotGuaranteed, params);
        r.message = Some(
            "gain assumption violated: beta must exceed 1/Re(lambda_K) for every eigenvalue"
                .to_string(),
        );
        return r;
    }
    let mut all_strict = true;
    let records: Vec<EigenRecord> = spectrum
        .eigenvalues
        .iter()
        .map(|&l| {
            let lhs = (p.beta * l - 1.0).norm() - (p.beta * l.re - 1.0);
            let rhs = p.alpha * p.tau * p.beta * l.re;
            if !(lhs < rhs) {
                all_strict = false;
            }
            EigenRecord {
                lambda_k: l,
                lhs: Some(lhs),
                rhs: Some(rhs),
                rightmost_root: None,
                roots: None,
                v_lambda: None,
            }
        })
        .collect();
    let verdict = if all_strict {
        Verdict::Stable
    } else {
        Verdict::NotGuaranteed
    };
    let mut r = StabilityReport::new("theorem1", verdict, params);
    r.eigenvalues = records;
    r
}

/// Range-based sufficient condition from magnitude/phase bounds:
/// `(rho_bar + 1)/(rho_bar cos psi_bar + 1) - 1 < alpha tau` with
/// `rho_bar`, `psi_bar` built from the eigenvalue box.
pub fn range_check(m_lo: f64, m_hi: f64, phi_hi: f64, p: &DsrParams) -> StabilityReport {
    let params = ParamEcho::from_params(p);
    if !(p.beta * m_lo * phi_hi.cos() > 1.0) {
        let mut r = StabilityReport::new("corollary1", Verdict::NotGuaranteed, params);
        r.message = Some(format!(
            "precondition beta * m_lo * cos(phi_hi) > 1 fails: {}",
            p.beta * m_lo * phi_hi.cos()
        ));
        return r;
    }
    let sin_hi = phi_hi.sin();
    let cos_hi = phi_hi.cos();
    let rho_bar =
        ((p.beta * m_hi * sin_hi).powi(2) + (p.beta * m_hi * cos_hi - 1.0).powi(2)).sqrt();
    let psi_bar = (p.beta * m_lo * sin_hi / (p.beta * m_lo * cos_hi - 1.0)).atan();
    let lhs = (rho_bar + 1.0) / (rho_bar * psi_bar.cos() + 1.0) - 1.0;
    let rhs = p.alpha * p.tau;
    let verdict = if lhs < rhs {
        Verdict::Stable
    } else {
        Verdict::NotGuaranteed
    };
    let mut r = StabilityReport::new("corollary1", verdict, params);
    r.rho_bar = Some(rho_bar);
    r.psi_bar = Some(psi_bar);
    r.eigenvalues = vec![];
    r.message = Some(format!("lhs {lhs:.6e} vs alpha*tau {rhs:.6e}"));
    r
}

/// Range-based check fed from a computed spectrum.
pub fn range_check_from_spectrum(spectrum: &Spectrum, p: &DsrParams) -> StabilityReport {
    range_check(spectrum.m_lo, spectrum.m_hi, spectrum.phi_hi, p)
}

/// Delay-independent result for real spectra: with every eigenvalue real
/// and the gain assumption met, the DSR system is stable for any positive
/// rate and delay.
pub fn real_spectrum_check(spectrum: &Spectrum, p: &DsrParams) -> StabilityReport {
    let params = ParamEcho::from_params(p);
    if !spectrum.all_real {
        let mut r = StabilityReport::new("corollary2", Verdict::NotApplicable, params);
        r.message = Some("spectrum has complex eigenvalues".to_string());
        return r;
    }
    if !gain_assumption_holds(spectrum, p.beta) {
        let mut r = StabilityReport::new("corollary2", Verdict::NotGuaranteed, params);
        r.message = Some(
            "gain assumption violated: beta must exceed 1/lambda_K for every eigenvalue"
                .to_string(),
        );
        return r;
    }
    let mut r = StabilityReport::new("corollary2", Verdict::Stable, params);
    r.eigenvalues = spectrum
        .eigenvalues
        .iter()
        .map(|&l| EigenRecord {
            lambda_k: l,
            lhs: Some(0.0),
            rhs: Some(p.alpha * p.tau * p.beta * l.re),
            rightmost_root: None,
            roots: None,
            v_lambda: None,
        })
        .collect();
    r.message = Some("real spectrum: stable for any positive alpha and tau".to_string());
    r
}

/// Solves `v cot v = p` on `(0, pi)` by bisection; requires `p < 1`.
fn cot_root(p: f64) -> f64 {
    // f(v) = v cos v - p sin v is positive near 0 (for p < 1) and negative
    // near pi.
    let f = |v: f64| v * v.cos() - p * v.sin();
    let mut lo = 1e-12;
    let mut hi = std::f64::consts::PI - 1e-12;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scalar necessary-and-sufficient conditions for real modal pairs,
/// applied to the delay-normalized pair `(tau lambda, tau lambda_d)`:
/// `p < 1` and `p < -q < sqrt(V^2 + p^2)` with `V cot V = p`, `V` in
/// `(0, pi)`.
pub fn hayes_check(
    pairs: &[ModalPair],
    p_dsr: &DsrParams,
) -> Result<StabilityReport, StabilityError> {
    for (index, pair) in pairs.iter().enumerate() {
        let imag = pair.lambda.im.abs().max(pair.lambda_d.im.abs());
        if imag > 1e-9 {
            return Err(StabilityError::NonRealPair { index, imag });
        }
    }
    let params = ParamEcho::from_params(p_dsr);
    let mut all_ok = true;
    let records: Vec<EigenRecord> = pairs
        .iter()
        .map(|pair| {
            let p = p_dsr.tau * pair.lambda.re;
            let q = p_dsr.tau * pair.lambda_d.re;
            let (ok, v, threshold) = if p >= 1.0 {
                (false, f64::NAN, f64::NAN)
            } else {
                let v = cot_root(p);
                let threshold = (v * v + p * p).sqrt();
                (p < -q && -q < threshold, v, threshold)
            };
            if !ok {
                all_ok = false;
            }
            EigenRecord {
                lambda_k: pair.lambda_k,
                lhs: Some(-q),
                rhs: Some(threshold),
                rightmost_root: None,
                roots: None,
                v_lambda: Some(v),
            }
        })
        .collect();
    // The conditions are necessary and sufficient in the real case, so a
    // violation is a genuine instability verdict.
    let verdict = if all_ok {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    let mut r = StabilityReport::new("hayes", verdict, params);
    r.eigenvalues = records;
    Ok(r)
}

/// Positive-definiteness check for undirected graphs: `-A - A_d` and
/// `-A + A_d` must both be positive definite.
pub fn positive_definite_check(
    ps: &PinnedSystem,
    spectrum: &Spectrum,
    p: &DsrParams,
) -> StabilityReport {
    let params = ParamEcho::from_params(p);
    let scale = ps.k.max_abs().max(1.0);
    if !ps.k.is_symmetric(1e-12 * scale) {
        let mut r = StabilityReport::new("brayton", Verdict::NotApplicable, params);
        r.message =
            Some("pinned Laplacian is not symmetric; the graph must be undirected".to_string());
        return r;
    }
    // -A - A_d = alpha beta K: positive definite iff every lambda_K > 0.
    // -A + A_d = alpha beta K - (2/tau)(I - beta K): symmetric with
    // eigenvalues alpha beta lambda - (2/tau)(1 - beta lambda).
    let mut all_pd = true;
    let records: Vec<EigenRecord> = spectrum
        .eigenvalues
        .iter()
        .map(|&l| {
            let sum_form = p.alpha * p.beta * l.re;
            let diff_form = p.alpha * p.beta * l.re - 2.0 / p.tau * (1.0 - p.beta * l.re);
            if !(sum_form > 0.0 && diff_form > 0.0) {
                all_pd = false;
            }
            EigenRecord {
                lambda_k: l,
                lhs: Some(diff_form.min(sum_form)),
                rhs: Some(0.0),
                rightmost_root: None,
                roots: None,
                v_lambda: None,
            }
        })
        .collect();
    let verdict = if all_pd {
        Verdict::Stable
    } else {
        Verdict::NotGuaranteed
    };
    let mut r = StabilityReport::new("brayton", verdict, params);
    r.eigenvalues = records;
    if verdict == Verdict::NotGuaranteed {
        r.message = Some(
            "-A + A_d is not positive definite; raise beta above 1/lambda_K".to_string(),
        );
    }
    r
}

/// Supremum of `|f(j w) (1 - e^{-j w tau})|` over the imaginary axis for
/// the low-pass `f(s) = omega/(s + omega)`; `omega = None` means the
/// unfiltered case whose supremum is exactly 2.
pub fn filtered_delay_sup(omega: Option<f64>, tau: f64) -> f64 {
    let omega = match omega {
        None => return 2.0,
        Some(o) => o,
    };
    let gain = |w: f64| {
        let filter = omega / (w * w + omega * omega).sqrt();
        filter * 2.0 * (0.5 * w * tau).sin().abs()
    };
    let w_max = 200.0 * (1.0 / tau).max(omega);
    let n = 200_000;
    let dw = w_max / n as f64;
    let mut best_idx: usize = 0;
    let mut best = 0.0f64;
    for i in 0..=n {
        let g = gain(i as f64 * dw);
        if g > best {
            best = g;
            best_idx = i;
        }
    }
    // Golden-section refinement around the grid maximum.
    let mut a = (best_idx.saturating_sub(1)) as f64 * dw;
    let mut b = ((best_idx + 1).min(n)) as f64 * dw;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (gain(x1), gain(x2));
    while (b - a) > 1e-10 * b.max(1.0) {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = gain(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = gain(x1);
        }
    }
    best.max(f1).max(f2)
}

/// Magnitude condition for the filtered higher-order DSR chain:
/// `sup |f(s)(1 - e^{-tau s})| < eps^(1/r) alpha tau`, with `eps` taken as
/// the exact-spectrum bound `min |beta lambda/(1 - beta lambda)|` (or its
/// real-part numerator for r = 1).
pub fn filtered_magnitude_check(spectrum: &Spectrum, p: &DsrParams) -> StabilityReport {
    let params = ParamEcho::from_params(p);
    if !gain_assumption_holds(spectrum, p.beta) {
        let mut r = StabilityReport::new("theorem2", Verdict::NotGuaranteed, params);
        r.message = Some(
            "gain assumption violated: beta must exceed 1/Re(lambda_K) for every eigenvalue"
                .to_string(),
        );
        return r;
    }
    let eps = spectrum
        .eigenvalues
        .iter()
        .map(|&l| {
            let denom = (Complex::new(1.0, 0.0) - p.beta * l).norm();
            if p.r > 1 {
                (p.beta * l).norm() / denom
            } else {
                (p.beta * l.re).abs() / denom
            }
        })
        .fold(f64::INFINITY, f64::min);
    let sup = filtered_delay_sup(p.omega, p.tau);
    let rhs = eps.powf(1.0 / p.r as f64) * p.alpha * p.tau;
    let verdict = if sup < rhs {
        Verdict::Stable
    } else {
        Verdict::NotGuaranteed
    };
    let mut r = StabilityReport::new("theorem2", verdict, params);
    r.eps_lambda = Some(eps);
    r.sup_value = Some(sup);
    r.message = Some(format!("sup {sup:.6e} vs eps^(1/r) alpha tau {rhs:.6e}"));
    r
}

/// Bound-form variant of the filtered magnitude condition for when only
/// the eigenvalue box is known.
pub fn filtered_magnitude_check_bounds(
    m_lo: f64,
    m_hi: f64,
    phi_hi: f64,
    p: &DsrParams,
) -> StabilityReport {
    let params = ParamEcho::from_params(p);
    if !(p.beta * m_lo * phi_hi.cos() > 1.0) {
        let mut r = StabilityReport::new("theorem2", Verdict::NotGuaranteed, params);
        r.message = Some("gain assumption cannot be certified from the bounds".to_string());
        return r;
    }
    let denom = (p.beta * p.beta * m_hi * m_hi - 2.0 * p.beta * m_hi * phi_hi.cos() + 1.0).sqrt();
    let eps = if p.r > 1 {
        p.beta * m_hi / denom
    } else {
        p.beta * m_lo * phi_hi.cos() / denom
    };
    let sup = filtered_delay_sup(p.omega, p.tau);
    let rhs = eps.powf(1.0 / p.r as f64) * p.alpha * p.tau;
    let verdict = if sup < rhs {
        Verdict::Stable
    } else {
        Verdict::NotGuaranteed
    };
    let mut r = StabilityReport::new("theorem2", verdict, params);
    r.eps_lambda = Some(eps);
    r.sup_value = Some(sup);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pinned_system, spectrum};
    use crate::reference;
    use approx::assert_relative_eq;

    fn reference_spectrum() -> Spectrum {
        spectrum(&pinned_system(&reference::network())).unwrap()
    }

    fn benchmark_params() -> DsrParams {
        DsrParams::first_order(0.53, 2.0, 0.075)
    }

    #[test]
    fn modal_pair_reference_numbers() {
        let spec = reference_spectrum();
        let p = benchmark_params();
        let pairs = modal_pairs(&spec, &p);
        let unit = pairs
            .iter()
            .find(|pair| (pair.lambda_k.re - 1.0).abs() < 1e-9)
            .unwrap();
        assert_relative_eq!(unit.lambda.re, -1.06 - 1.0 / 0.075, max_relative = 1e-12);
        assert_relative_eq!(unit.lambda_d.re, 1.0 / 0.075, max_relative = 1e-12);
        for pair in &pairs {
            let sum = pair.lambda + pair.lambda_d;
            let expected = -p.alpha * p.beta * pair.lambda_k;
            assert!((sum - expected).norm() <= 1e-9);
        }
    }

    #[test]
    fn degenerate_delay_coefficient_gives_single_root() {
        // beta lambda_K = 1 makes the delayed coefficient vanish.
        let pair = ModalPair {
            lambda_k: Complex::new(1.0, 0.0),
            lambda: Complex::new(-0.5, 0.0),
            lambda_d: Complex::new(0.0, 0.0),
        };
        let survey = lambert_root_survey(&[pair], 0.1, 5).unwrap();
        assert_eq!(survey.pairs[0].roots.len(), 1);
        assert_relative_eq!(survey.rightmost.re, -0.5);
    }

    #[test]
    fn benchmark_survey_is_clean_and_accurate() {
        let spec = reference_spectrum();
        let p = benchmark_params();
        let report = survey_report(&spec, &p, 10).unwrap();
        assert_eq!(report.verdict, Verdict::Stable);
        for rec in &report.eigenvalues {
            for root in rec.roots.as_ref().unwrap() {
                assert!(root.root.re < 0.0, "root {:?}", root.root);
                assert!(root.residual <= 1e-8);
            }
        }
    }

    #[test]
    fn classic_pure_delay_instability() {
        // dz/dt = -z(t - tau) with tau = 2: unstable since tau > pi/2.
        let pair = ModalPair {
            lambda_k: Complex::new(1.0, 0.0),
            lambda: Complex::new(0.0, 0.0),
            lambda_d: Complex::new(-1.0, 0.0),
        };
        let survey = lambert_root_survey(&[pair], 2.0, 10).unwrap();
        assert!(survey.rightmost.re > 0.0);
    }

    #[test]
    fn pure_delay_crossing_found_at_half_pi() {
        // Bisection on the delay against the survey locates the known
        // stability boundary tau = pi/2 of dz/dt = -z(t - tau).
        let pair = |_tau: f64| ModalPair {
            lambda_k: Complex::new(1.0, 0.0),
            lambda: Complex::new(0.0, 0.0),
            lambda_d: Complex::new(-1.0, 0.0),
        };
        let rightmost = |tau: f64| {
            lambert_root_survey(&[pair(tau)], tau, 10)
                .unwrap()
                .rightmost
                .re
        };
        let (mut lo, mut hi) = (1.0, 2.0);
        assert!(rightmost(lo) < 0.0 && rightmost(hi) > 0.0);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if rightmost(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - std::f64::consts::FRAC_PI_2).abs() <= 1e-6);
    }

    #[test]
    fn realpart_condition_on_benchmark() {
        let spec = reference_spectrum();
        let report = theorem_realpart_check(&spec, &benchmark_params());
        assert_eq!(report.verdict, Verdict::Stable);
        // Real eigenvalues with beta lambda > 1 give lhs exactly 0.
        for rec in &report.eigenvalues {
            assert!(rec.lhs.unwrap().abs() <= 1e-12);
            assert!(rec.rhs.unwrap() > 0.0);
        }
    }

    #[test]
    fn realpart_condition_gain_precondition() {
        let spec = reference_spectrum();
        let p = DsrParams::first_order(0.53, 0.5, 0.075);
        let report = theorem_realpart_check(&spec, &p);
        assert_eq!(report.verdict, Verdict::NotGuaranteed);
        assert!(report.message.unwrap().contains("gain assumption"));
    }

    #[test]
    fn realpart_threshold_at_golden_ratio_product() {
        // For lambda_K = 1 + i and beta = 2 the condition flips exactly at
        // alpha tau = (sqrt(5) - 1)/2.
        let spec = Spectrum {
            eigenvalues: vec![Complex::new(1.0, 1.0), Complex::new(1.0, -1.0)],
            magnitudes: vec![2f64.sqrt(), 2f64.sqrt()],
            phases: vec![
                std::f64::consts::FRAC_PI_4,
                -std::f64::consts::FRAC_PI_4,
            ],
            m_lo: 2f64.sqrt(),
            m_hi: 2f64.sqrt(),
            phi_hi: std::f64::consts::FRAC_PI_4,
            all_real: false,
        };
        let threshold = (5f64.sqrt() - 1.0) / 2.0;
        let params = |at: f64| DsrParams::first_order(at / 0.1, 2.0, 0.1);
        let below = theorem_realpart_check(&spec, &params(threshold * 0.999));
        assert_eq!(below.verdict, Verdict::NotGuaranteed);
        let above = theorem_realpart_check(&spec, &params(threshold * 1.001));
        assert_eq!(above.verdict, Verdict::Stable);
    }

    #[test]
    fn range_check_real_box_is_unconditional() {
        let p = benchmark_params();
        let report = range_check(1.0, 4.0, 0.0, &p);
        assert_eq!(report.verdict, Verdict::Stable);
        assert_relative_eq!(report.rho_bar.unwrap(), 7.0, max_relative = 1e-12);
        assert_eq!(report.psi_bar.unwrap(), 0.0);
        let tiny = DsrParams::first_order(1e-6, 2.0, 1e-6);
        assert_eq!(range_check(1.0, 4.0, 0.0, &tiny).verdict, Verdict::Stable);
    }

    #[test]
    fn range_check_precondition() {
        let p = DsrParams::first_order(0.53, 0.9, 0.075);
        let report = range_check(1.0, 4.0, 0.0, &p);
        assert_eq!(report.verdict, Verdict::NotGuaranteed);
    }

    #[test]
    fn range_lhs_monotone_in_rho_and_psi() {
        // The range bound's left side never decreases in rho or psi.
        let lhs = |rho: f64, psi: f64| (rho + 1.0) / (rho * psi.cos() + 1.0) - 1.0;
        let mut rho = 0.1;
        while rho < 50.0 {
            let mut psi = 0.0;
            while psi < 1.5 {
                assert!(lhs(rho * 1.1, psi) >= lhs(rho, psi) - 1e-12);
                assert!(lhs(rho, (psi + 0.05).min(1.55)) >= lhs(rho, psi) - 1e-12);
                psi += 0.05;
            }
            rho *= 1.5;
        }
    }

    #[test]
    fn real_spectrum_check_behaviour() {
        let spec = reference_spectrum();
        let good = real_spectrum_check(&spec, &benchmark_params());
        assert_eq!(good.verdict, Verdict::Stable);
        let weak = real_spectrum_check(&spec, &DsrParams::first_order(0.53, 0.5, 0.075));
        assert_eq!(weak.verdict, Verdict::NotGuaranteed);
        let complex_spec = spectrum(&pinned_system(&reference::complex_variant())).unwrap();
        let na = real_spectrum_check(&complex_spec, &benchmark_params());
        assert_eq!(na.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn hayes_classic_boundary_case() {
        // lambda = 0, lambda_d = -1, tau = 1: V = pi/2 and the threshold is
        // pi/2 > 1, the classical stable case.
        let pair = ModalPair {
            lambda_k: Complex::new(1.0, 0.0),
            lambda: Complex::new(0.0, 0.0),
            lambda_d: Complex::new(-1.0, 0.0),
        };
        let p = DsrParams::first_order(1.0, 2.0, 1.0);
        let report = hayes_check(&[pair], &p).unwrap();
        assert_eq!(report.verdict, Verdict::Stable);
        let rec = &report.eigenvalues[0];
        assert_relative_eq!(
            rec.v_lambda.unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            rec.rhs.unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-10
        );
        // Same pair at tau = 2 violates the threshold: q scales to -2.
        let p2 = DsrParams::first_order(1.0, 2.0, 2.0);
        let report = hayes_check(&[pair], &p2).unwrap();
        assert_eq!(report.verdict, Verdict::Unstable);
    }

    #[test]
    fn hayes_benchmark_modes_stable() {
        let spec = reference_spectrum();
        let p = benchmark_params();
        let pairs = modal_pairs(&spec, &p);
        let report = hayes_check(&pairs, &p).unwrap();
        assert_eq!(report.verdict, Verdict::Stable);
    }

    #[test]
    fn hayes_rejects_complex_pairs() {
        let pair = ModalPair {
            lambda_k: Complex::new(1.0, 1.0),
            lambda: Complex::new(-1.0, 0.5),
            lambda_d: Complex::new(0.5, -0.5),
        };
        assert!(matches!(
            hayes_check(&[pair], &benchmark_params()),
            Err(StabilityError::NonRealPair { .. })
        ));
    }

    #[test]
    fn hayes_threshold_matches_survey_crossing() {
        // For a fixed stable instantaneous coefficient, sweep the delayed
        // coefficient: the exact threshold must match the survey's
        // rightmost-root sign change.
        let tau = 1.0;
        let lam = -1.0;
        let p = DsrParams::first_order(1.0, 2.0, tau);
        let make = |lam_d: f64| ModalPair {
            lambda_k: Complex::new(1.0, 0.0),
            lambda: Complex::new(lam, 0.0),
            lambda_d: Complex::new(lam_d, 0.0),
        };
        // Hayes threshold: -q < sqrt(V^2 + p^2).
        let v = cot_root(tau * lam);
        let threshold = (v * v + tau * lam * tau * lam).sqrt() / tau;
        let rightmost = |lam_d: f64| {
            lambert_root_survey(&[make(lam_d)], tau, 12)
                .unwrap()
                .rightmost
                .re
        };
        let (mut lo, mut hi) = (threshold * 0.5, threshold * 1.5);
        assert!(rightmost(-lo) < 0.0 && rightmost(-hi) > 0.0);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if rightmost(-mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let crossing = 0.5 * (lo + hi);
        assert!(
            (crossing - threshold).abs() <= 1e-6 * threshold,
            "survey crossing {crossing} vs hayes threshold {threshold}"
        );
        // And the check itself flips verdicts around the threshold.
        let stable = hayes_check(&[make(-threshold * 0.999)], &p).unwrap();
        assert_eq!(stable.verdict, Verdict::Stable);
        let unstable = hayes_check(&[make(-threshold * 1.001)], &p).unwrap();
        assert_eq!(unstable.verdict, Verdict::Unstable);
    }

    #[test]
    fn positive_definite_check_on_undirected_ring() {
        use crate::graph::{build_graph, EdgeSpec, GraphSpec};
        let g = build_graph(&GraphSpec {
            agents: vec![1, 2],
            source: 0,
            edges: vec![
                EdgeSpec {
                    from: 0,
                    to: 1,
                    w: 1.0,
                },
                EdgeSpec {
                    from: 1,
                    to: 2,
                    w: 1.0,
                },
                EdgeSpec {
                    from: 2,
                    to: 1,
                    w: 1.0,
                },
            ],
        })
        .unwrap();
        let ps = pinned_system(&g);
        let spec = spectrum(&ps).unwrap();
        // Gain above the threshold: both quadratic forms positive definite.
        let good = positive_definite_check(&ps, &spec, &DsrParams::first_order(1.0, 3.0, 0.1));
        assert_eq!(good.verdict, Verdict::Stable);
        // Gain below the threshold: flagged, not proven.
        let weak = positive_definite_check(&ps, &spec, &DsrParams::first_order(1.0, 0.3, 0.1));
        assert_eq!(weak.verdict, Verdict::NotGuaranteed);
    }

    #[test]
    fn positive_definite_check_requires_symmetry() {
        let ps = pinned_system(&reference::network());
        let spec = spectrum(&ps).unwrap();
        let report = positive_definite_check(&ps, &spec, &benchmark_params());
        assert_eq!(report.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn unfiltered_sup_is_exactly_two() {
        assert_eq!(filtered_delay_sup(None, 0.075), 2.0);
    }

    #[test]
    fn filtered_sup_small_cutoff_kills_delay_term() {
        let tau = 0.075;
        let sup = filtered_delay_sup(Some(1e-4), tau);
        assert!(sup < 1e-3, "sup = {sup}");
        // Small cutoff certifies stability for any delay.
        let spec = reference_spectrum();
        let p = DsrParams {
            alpha: 1.195,
            beta: 2.0,
            tau: 5.0,
            omega: Some(1e-4),
            r: 2,
        };
        let report = filtered_magnitude_check(&spec, &p);
        assert_eq!(report.verdict, Verdict::Stable);
    }

    #[test]
    fn filtered_sup_approaches_two_for_wide_filter() {
        let sup = filtered_delay_sup(Some(1e5), 0.075);
        assert!((sup - 2.0).abs() < 1e-2, "sup = {sup}");
    }

    #[test]
    fn benchmark_second_order_magnitude_condition() {
        let spec = reference_spectrum();
        let p = DsrParams {
            alpha: 1.195,
            beta: 2.0,
            tau: 0.075,
            omega: Some(1.195 / 10.0),
            r: 2,
        };
        let report = filtered_magnitude_check(&spec, &p);
        assert_eq!(report.verdict, Verdict::Stable);
        // min |beta lambda / (1 - beta lambda)| over {1,1,1,1,3,4} at
        // beta = 2 is 8/7.
        assert_relative_eq!(report.eps_lambda.unwrap(), 8.0 / 7.0, max_relative = 1e-12);
        assert!(report.sup_value.unwrap() < 0.02);
    }

    #[test]
    fn unfiltered_magnitude_condition_comparison() {
        // f = 1: the verdict is the direct comparison 2 < eps^(1/r) alpha tau.
        let spec = reference_spectrum();
        let p = DsrParams {
            alpha: 30.0,
            beta: 2.0,
            tau: 1.0,
            omega: None,
            r: 1,
        };
        let report = filtered_magnitude_check(&spec, &p);
        let eps = report.eps_lambda.unwrap();
        let expect = 2.0 < eps * p.alpha * p.tau;
        assert_eq!(report.verdict == Verdict::Stable, expect);
    }

    #[test]
    fn bounds_form_magnitude_condition() {
        let p = DsrParams {
            alpha: 1.195,
            beta: 2.0,
            tau: 0.075,
            omega: Some(0.1195),
            r: 2,
        };
        let report = filtered_magnitude_check_bounds(1.0, 4.0, 0.0, &p);
        // Bound form: beta m_hi / sqrt(beta^2 m_hi^2 - 2 beta m_hi + 1) = 8/7.
        assert_relative_eq!(report.eps_lambda.unwrap(), 8.0 / 7.0, max_relative = 1e-12);
        assert_eq!(report.verdict, Verdict::Stable);
    }
}
