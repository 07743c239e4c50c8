//! Benchmark states, observables and decoherence measures.
//!
//! The decay of the off-diagonal (interference) peaks is summarized by
//!
//!   𝒟(t) = ν(t)/ν(0),  ν = |off-diagonal pair peak| /
//!                           √(diagonal pair peaks' product),
//!
//! evaluated on the exact evolved Gaussian pair terms in log space so
//! deep decay never underflows, and by the equivalent parameterization
//!
//!   𝒟(t) = exp{−2[1−Γ(t)] Σ_ℓ [(q_ℓ1−q_ℓ2)/2σ_ℓ]²},
//!
//! which defines Γ(t) with Γ(0) = 1. A fringe-visibility estimator
//! evaluates the full density at the moving pair-peak locations instead
//! of isolating pair terms; the two agree where the peaks are well
//! separated.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{
    CouplingParams, ModelParams, OscillatorParams, ReservoirSpec, ValidatedModel,
};
use crate::propagator::{
    GaussianComponent, GaussianSuperposition, Propagator, PropagatorError,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DecoherenceError {
    #[error("invalid state magnitudes: {0}")]
    InvalidMagnitudes(String),
    #[error("operation needs exactly two components, state has {0}")]
    WrongComponentCount(usize),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error("time grid must start at 0 and increase strictly")]
    BadTimeGrid,
}

/// The four benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Psi1,
    Psi2,
    Psi3,
    Cat,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Psi1 => "psi1",
            StateKind::Psi2 => "psi2",
            StateKind::Psi3 => "psi3",
            StateKind::Cat => "cat",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "psi1" => Some(StateKind::Psi1),
            "psi2" => Some(StateKind::Psi2),
            "psi3" => Some(StateKind::Psi3),
            "cat" => Some(StateKind::Cat),
            _ => None,
        }
    }
}

/// Center/width magnitudes of the benchmark states. The defaults realize
/// equal mean energy ⟨E⟩ ≈ 158 ħω₁ and equal peak distance d = 5√2 σ₁
/// across all four states (at the standard model parameters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMagnitudes {
    /// Reference width σ₁ (= σ₂) of the wide states.
    pub sigma_ref: f64,
    /// Outer center 10σ₁ of the first two states.
    pub q_large: f64,
    /// Inner center 5σ₁.
    pub q_small: f64,
    /// Narrow width σ₁/12 of the third state.
    pub sigma_psi3: f64,
    /// Centers √(15/2)σ₁ and √5σ₁ of the third state.
    pub q1_psi3: f64,
    pub q2_psi3: f64,
    /// Single-oscillator superposition: centers ±5σ₁/√2, width 0.06σ₁.
    pub cat_q: f64,
    pub cat_sigma: f64,
}

impl StateMagnitudes {
    pub fn defaults() -> Self {
        let sigma = 1.0;
        Self::scaled(sigma)
    }

    pub fn scaled(sigma: f64) -> Self {
        StateMagnitudes {
            sigma_ref: sigma,
            q_large: 10.0 * sigma,
            q_small: 5.0 * sigma,
            sigma_psi3: sigma / 12.0,
            q1_psi3: (15.0_f64 / 2.0).sqrt() * sigma,
            q2_psi3: 5.0_f64.sqrt() * sigma,
            cat_q: 5.0 * sigma / 2.0_f64.sqrt(),
            cat_sigma: 0.06 * sigma,
        }
    }
}

/// A realized benchmark state (normalized).
#[derive(Debug, Clone)]
pub struct BenchmarkState {
    pub kind: StateKind,
    pub realized: GaussianSuperposition,
    pub magnitudes: StateMagnitudes,
}

/// Builds one of the benchmark states. The center signs follow the
/// displayed exponents: q parameters enter as exp[−((x+q)/σ)²], so a
/// positive q peaks at negative x. The cat state lives on oscillator 1
/// with oscillator 2 in its ground-state Gaussian of width √(2/(m₂ω₂)).
pub fn build_state(
    kind: StateKind,
    model: &ModelParams,
    mags: &StateMagnitudes,
) -> Result<BenchmarkState, DecoherenceError> {
    for (name, w) in [
        ("sigma_ref", mags.sigma_ref),
        ("sigma_psi3", mags.sigma_psi3),
        ("cat_sigma", mags.cat_sigma),
    ] {
        if w <= 0.0 || !w.is_finite() {
            return Err(DecoherenceError::InvalidMagnitudes(format!(
                "{name} must be positive, got {w}"
            )));
        }
    }
    let one = C64::new(1.0, 0.0);
    let (components, s1, s2) = match kind {
        StateKind::Psi1 => (
            vec![
                GaussianComponent { amplitude: one, q_1: mags.q_large, q_2: -mags.q_small },
                GaussianComponent { amplitude: one, q_1: mags.q_small, q_2: -mags.q_large },
            ],
            mags.sigma_ref,
            mags.sigma_ref,
        ),
        StateKind::Psi2 => (
            vec![
                GaussianComponent { amplitude: one, q_1: -mags.q_large, q_2: -mags.q_small },
                GaussianComponent { amplitude: one, q_1: -mags.q_small, q_2: -mags.q_large },
            ],
            mags.sigma_ref,
            mags.sigma_ref,
        ),
        StateKind::Psi3 => (
            vec![
                GaussianComponent { amplitude: one, q_1: mags.q1_psi3, q_2: mags.q2_psi3 },
                GaussianComponent { amplitude: one, q_1: -mags.q1_psi3, q_2: -mags.q2_psi3 },
            ],
            mags.sigma_psi3,
            mags.sigma_psi3,
        ),
        StateKind::Cat => {
            let ground = (2.0 / (model.oscillators.m_2 * model.oscillators.omega_2)).sqrt();
            (
                vec![
                    GaussianComponent { amplitude: one, q_1: mags.cat_q, q_2: 0.0 },
                    GaussianComponent { amplitude: one, q_1: -mags.cat_q, q_2: 0.0 },
                ],
                mags.cat_sigma,
                ground,
            )
        }
    };
    let realized = GaussianSuperposition::new(components, s1, s2)
        .map_err(|e| DecoherenceError::InvalidMagnitudes(e.to_string()))?
        .normalized();
    Ok(BenchmarkState {
        kind,
        realized,
        magnitudes: *mags,
    })
}

/// Mean energy ⟨H_S₁ + H_S₂⟩ in units of ħω₁, by exact Gaussian matrix
/// elements including all inter-component overlap terms.
pub fn mean_energy(state: &GaussianSuperposition, model: &ModelParams) -> f64 {
    let state = state.normalized();
    let o = &model.oscillators;
    // Per-oscillator 1D matrix elements between exp[−((x+qa)/σ)²] and
    // exp[−((x+qb)/σ)²], relative to the bare overlap:
    //   ⟨x²⟩ factor: (qa+qb)²/4 + σ²/4,
    //   ⟨p²⟩ factor: (σ² − (qa−qb)²)/σ⁴  (ħ = 1).
    let overlap_1d = |s: f64, qa: f64, qb: f64| -> f64 {
        s * (std::f64::consts::PI / 2.0).sqrt() * (-(qa - qb).powi(2) / (2.0 * s * s)).exp()
    };
    let mut energy = 0.0;
    for ca in &state.components {
        for cb in &state.components {
            let weight = (ca.amplitude * cb.amplitude.conj()).re;
            // ⟨φ_b| O |φ_a⟩ with real Gaussians: a enters as the ket.
            let q = [(ca.q_1, cb.q_1, state.sigma_1), (ca.q_2, cb.q_2, state.sigma_2)];
            let ov: [f64; 2] = std::array::from_fn(|l| overlap_1d(q[l].2, q[l].0, q[l].1));
            for l in 0..2 {
                let (qa, qb, s) = q[l];
                let mass = if l == 0 { o.m_1 } else { o.m_2 };
                let omega = if l == 0 { o.omega_1 } else { o.omega_2 };
                let x2 = ((qa + qb).powi(2) / 4.0 + s * s / 4.0) * ov[l] * ov[1 - l];
                let p2 = ((s * s - (qa - qb).powi(2)) / s.powi(4)) * ov[l] * ov[1 - l];
                energy += weight * (p2 / (2.0 * mass) + 0.5 * mass * omega * omega * x2);
            }
        }
    }
    energy / o.omega_1
}

/// Euclidean distance between the two component peaks in (x₁, x₂) space.
pub fn peak_distance(state: &GaussianSuperposition) -> Result<f64, DecoherenceError> {
    if state.components.len() != 2 {
        return Err(DecoherenceError::WrongComponentCount(state.components.len()));
    }
    let a = &state.components[0];
    let b = &state.components[1];
    Ok(((a.q_1 - b.q_1).powi(2) + (a.q_2 - b.q_2).powi(2)).sqrt())
}

/// Σ_ℓ [(q_ℓ1 − q_ℓ2)/σ_ℓ]² of a two-component state.
fn separation_measure(state: &GaussianSuperposition) -> Result<f64, DecoherenceError> {
    if state.components.len() != 2 {
        return Err(DecoherenceError::WrongComponentCount(state.components.len()));
    }
    let a = &state.components[0];
    let b = &state.components[1];
    Ok(((a.q_1 - b.q_1) / state.sigma_1).powi(2) + ((a.q_2 - b.q_2) / state.sigma_2).powi(2))
}

/// Decoherence data at one time.
#[derive(Debug, Clone, Copy)]
pub struct DecoherencePoint {
    pub t: f64,
    pub gamma: f64,
    pub d: f64,
    /// ln 𝒟(t); stays finite long after 𝒟 underflows.
    pub ln_d: f64,
    /// Fringe-visibility ratio V(t)/V(0); NaN once the density itself
    /// underflows at the tracked peaks.
    pub visibility: f64,
}

/// Evaluator for Γ(t), 𝒟(t) and the visibility estimator of a
/// two-component state under one model.
pub struct DecoherencePipeline {
    prop: Propagator,
    separation: f64,
    ln_nu_0: f64,
    v_0: f64,
}

/// Pair index in the row-major (a, b) ordering of a two-component state.
const DIAG_1: usize = 0;
const OFF: usize = 1;
const DIAG_2: usize = 3;

impl DecoherencePipeline {
    pub fn new(
        model: &ValidatedModel,
        state: &GaussianSuperposition,
    ) -> Result<Self, DecoherenceError> {
        let separation = separation_measure(state)?;
        let prop = Propagator::new(model, state)?;
        let form0 = prop.form_at(0.0)?;
        let ln_nu_0 = ln_pair_ratio(&form0);
        let v_0 = visibility_raw(&form0);
        Ok(Self {
            prop,
            separation,
            ln_nu_0,
            v_0,
        })
    }

    pub fn propagator(&self) -> &Propagator {
        &self.prop
    }

    pub fn at(&self, t: f64) -> Result<DecoherencePoint, DecoherenceError> {
        let form = self.prop.form_at(t)?;
        let ln_d = ln_pair_ratio(&form) - self.ln_nu_0;
        let gamma = if self.separation > 1e-300 {
            1.0 + ln_d / (0.5 * self.separation)
        } else {
            1.0
        };
        let visibility = visibility_raw(&form) / self.v_0;
        Ok(DecoherencePoint {
            t,
            gamma,
            d: ln_d.exp(),
            ln_d,
            visibility,
        })
    }
}

fn ln_pair_ratio(form: &crate::propagator::EvolvedGaussianForm) -> f64 {
    let (_, off) = form.pair_peak(OFF);
    let (_, d1) = form.pair_peak(DIAG_1);
    let (_, d2) = form.pair_peak(DIAG_2);
    off - 0.5 * (d1 + d2)
}

fn visibility_raw(form: &crate::propagator::EvolvedGaussianForm) -> f64 {
    let (u_off, _) = form.pair_peak(OFF);
    let (u_1, _) = form.pair_peak(DIAG_1);
    let (u_2, _) = form.pair_peak(DIAG_2);
    let at = |u: &nalgebra::Vector4<f64>| form.position_value(u[0], u[1], u[2], u[3]).norm();
    at(&u_off) / (at(&u_1) * at(&u_2)).sqrt()
}

/// Γ(t), defined through the off-diagonal pair weight relative to its
/// initial normalization: 𝒟(t) = exp{−½ Σ_ℓ((q_ℓ1−q_ℓ2)/σ_ℓ)² [1−Γ(t)]}.
pub fn gamma_of_t(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
) -> Result<f64, DecoherenceError> {
    Ok(DecoherencePipeline::new(model, state)?.at(t)?.gamma)
}

/// 𝒟(t), the normalized decay of the off-diagonal peaks.
pub fn decoherence_function(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
) -> Result<f64, DecoherenceError> {
    Ok(DecoherencePipeline::new(model, state)?.at(t)?.d)
}

/// Γ/𝒟/visibility over an ordered time grid starting at 0.
#[derive(Debug, Clone)]
pub struct DecoherenceSeries {
    pub times: Vec<f64>,
    pub gamma_t: Vec<f64>,
    pub d_t: Vec<f64>,
    pub ln_d_t: Vec<f64>,
    pub visibility_t: Vec<f64>,
}

pub fn decoherence_series(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t_grid: &[f64],
) -> Result<DecoherenceSeries, DecoherenceError> {
    if t_grid.is_empty() || t_grid[0] != 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DecoherenceError::BadTimeGrid);
    }
    let pipeline = DecoherencePipeline::new(model, state)?;
    let points: Result<Vec<DecoherencePoint>, DecoherenceError> = t_grid
        .par_iter()
        .map(|&t| pipeline.at(t))
        .collect();
    let points = points?;
    Ok(DecoherenceSeries {
        times: t_grid.to_vec(),
        gamma_t: points.iter().map(|p| p.gamma).collect(),
        d_t: points.iter().map(|p| p.d).collect(),
        ln_d_t: points.iter().map(|p| p.ln_d).collect(),
        visibility_t: points.iter().map(|p| p.visibility).collect(),
    })
}

/// Audit evaluation of the expanded closed-form Γ(t) built from the
/// θ̃/Φ/width combinations. Known to disagree with the operational
/// definition in general (it does not even reproduce Γ(0) = 1 for
/// asymmetric states); reported for inspection, never used as output.
#[derive(Debug, Clone, Copy)]
pub struct GammaAudit {
    pub authoritative: f64,
    pub expansion: f64,
    pub delta: f64,
    /// |delta| ≤ 1e-4.
    pub well_defined: bool,
}

pub fn gamma_audit(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
) -> Result<GammaAudit, DecoherenceError> {
    let pipeline = DecoherencePipeline::new(model, state)?;
    let authoritative = pipeline.at(t)?.gamma;
    let form = pipeline.prop.form_at(t)?;
    let phi = form.phi();
    let sep = separation_measure(state)?;
    let tt = &form.pairs[OFF].theta_tilde;
    let sigma_sq = 4.0 * phi.phi_22 * phi.phi_44 - phi.phi_24 * phi.phi_24;
    let x = form.relative_decay_form();
    // Expanded relative-width combination (the reciprocal of the
    // operational width).
    let sigma_expansion = [(2.0 * x[(0, 0)]).max(0.0).sqrt(), (2.0 * x[(1, 1)]).max(0.0).sqrt()];
    let vartheta_1 = tt[0]
        - ((2.0 * phi.phi_44 * phi.phi_12 - phi.phi_14 * phi.phi_24) * tt[1]
            + (2.0 * phi.phi_22 * phi.phi_14 - phi.phi_12 * phi.phi_24) * tt[3])
            / sigma_sq;
    let vartheta_2 = tt[2]
        - ((2.0 * phi.phi_44 * phi.phi_23 - phi.phi_34 * phi.phi_24) * tt[1]
            + (2.0 * phi.phi_22 * phi.phi_34 - phi.phi_23 * phi.phi_24) * tt[3])
            / sigma_sq;
    // Collective widths for the θ̃ combination.
    let widths = form.widths();
    let mut acc = sigma_expansion[0].powi(2) * vartheta_1 * vartheta_1
        + sigma_expansion[1].powi(2) * vartheta_2 * vartheta_2;
    let tt_even = [tt[1], tt[3]];
    for l in 0..2 {
        for lp in 0..2 {
            let kron = if l == lp { 1.0 } else { 0.0 };
            let w = widths.collective[l][lp];
            if w != 0.0 {
                acc += 2.0_f64.powf(kron + 1.0)
                    * (-1.0_f64).powi((l + lp) as i32)
                    * tt_even[l]
                    * tt_even[lp]
                    / (w * w);
            }
        }
    }
    let expansion = acc / sep;
    let delta = expansion - authoritative;
    Ok(GammaAudit {
        authoritative,
        expansion,
        delta,
        well_defined: delta.abs() <= 1e-4,
    })
}

/// Which bilinear coupling bundle a scenario switches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingForm {
    /// λ₁₁ q₁q₂ + λ₂₂ p₁p₂ at equal strength.
    QqPp,
    /// λ₁₂ q₁p₂ + λ₂₁ q₂p₁ at equal strength.
    QpPq,
}

impl CouplingForm {
    pub fn name(&self) -> &'static str {
        match self {
            CouplingForm::QqPp => "qq_pp",
            CouplingForm::QpPq => "qp_pq",
        }
    }

    pub fn couplings(&self, lambda: f64) -> CouplingParams {
        match self {
            CouplingForm::QqPp => CouplingParams {
                lambda_11: lambda,
                lambda_12: 0.0,
                lambda_21: 0.0,
                lambda_22: lambda,
            },
            CouplingForm::QpPq => CouplingParams {
                lambda_11: 0.0,
                lambda_12: lambda,
                lambda_21: lambda,
                lambda_22: 0.0,
            },
        }
    }
}

/// Standard benchmark model: m₁ = m₂ = 1, ω₁ = 1, ω₂ = 2, γ = 10⁻³,
/// T = 10³ (ħ = k_B = 1), with the requested topology and couplings.
pub fn standard_model(common: bool, couplings: CouplingParams) -> ModelParams {
    ModelParams {
        oscillators: OscillatorParams {
            m_1: 1.0,
            m_2: 1.0,
            omega_1: 1.0,
            omega_2: 2.0,
        },
        couplings,
        reservoir: if common {
            ReservoirSpec::Common {
                gamma: 1e-3,
                t: 1e3,
                cutoff: None,
            }
        } else {
            ReservoirSpec::Distinct {
                gamma_1: 1e-3,
                gamma_2: 1e-3,
                t_1: 1e3,
                t_2: 1e3,
                cutoff: None,
            }
        },
    }
}

/// One curve of a figure preset.
#[derive(Debug, Clone)]
pub struct ScenarioCurve {
    pub label: String,
    pub model: ModelParams,
    pub state: StateKind,
}

/// The five curves of one benchmark figure: the decoupled cat reference
/// plus the four topology × coupling-form combinations. Figures 1–3 use
/// λ = 0.1 with states Ψ⁽¹⁾/Ψ⁽²⁾/Ψ⁽³⁾; figure 4 repeats Ψ⁽¹⁾ at λ = 0.5.
pub fn figure_curves(figure: u8) -> Option<Vec<ScenarioCurve>> {
    let (state, lambda) = match figure {
        1 => (StateKind::Psi1, 0.1),
        2 => (StateKind::Psi2, 0.1),
        3 => (StateKind::Psi3, 0.1),
        4 => (StateKind::Psi1, 0.5),
        _ => return None,
    };
    let mut curves = vec![ScenarioCurve {
        label: "cat_reference".to_string(),
        model: standard_model(false, CouplingParams::ZERO),
        state: StateKind::Cat,
    }];
    for common in [false, true] {
        for form in [CouplingForm::QqPp, CouplingForm::QpPq] {
            curves.push(ScenarioCurve {
                label: format!(
                    "{}_{}",
                    if common { "common" } else { "distinct" },
                    form.name()
                ),
                model: standard_model(common, form.couplings(lambda)),
                state,
            });
        }
    }
    Some(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn std_valid(common: bool, couplings: CouplingParams) -> ValidatedModel {
        standard_model(common, couplings).validate().unwrap()
    }

    #[test]
    fn psi1_component_peaks() {
        let model = standard_model(false, CouplingParams::ZERO);
        let s = build_state(StateKind::Psi1, &model, &StateMagnitudes::defaults()).unwrap();
        let c = &s.realized.components;
        // Peaks at (x₁, x₂) = (−10, 5) and (−5, 10).
        assert_eq!((c[0].q_1, c[0].q_2), (10.0, -5.0));
        assert_eq!((c[1].q_1, c[1].q_2), (5.0, -10.0));
        assert_eq!(s.realized.sigma_1, 1.0);
    }

    #[test]
    fn psi3_centers_and_width() {
        let model = standard_model(false, CouplingParams::ZERO);
        let s = build_state(StateKind::Psi3, &model, &StateMagnitudes::defaults()).unwrap();
        let c = &s.realized.components;
        assert_relative_eq!(c[0].q_1, (7.5_f64).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(c[0].q_2, (5.0_f64).sqrt(), max_relative = 1e-15);
        assert_eq!(c[1].q_1, -c[0].q_1);
        assert_relative_eq!(s.realized.sigma_1, 1.0 / 12.0, max_relative = 1e-15);
    }

    #[test]
    fn cat_defaults() {
        let model = standard_model(false, CouplingParams::ZERO);
        let s = build_state(StateKind::Cat, &model, &StateMagnitudes::defaults()).unwrap();
        let c = &s.realized.components;
        assert_relative_eq!(c[0].q_1, 5.0 / 2.0_f64.sqrt(), max_relative = 1e-15);
        assert_eq!(c[0].q_2, 0.0);
        assert_eq!(s.realized.sigma_1, 0.06);
        // Oscillator 2 ground-state width for m = 1, ω₂ = 2.
        assert_relative_eq!(s.realized.sigma_2, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn invalid_magnitudes_rejected() {
        let model = standard_model(false, CouplingParams::ZERO);
        let mut mags = StateMagnitudes::defaults();
        mags.sigma_psi3 = -1.0;
        assert!(matches!(
            build_state(StateKind::Psi3, &model, &mags),
            Err(DecoherenceError::InvalidMagnitudes(_))
        ));
    }

    #[test]
    fn mean_energy_of_benchmark_states() {
        let model = standard_model(false, CouplingParams::ZERO);
        let mags = StateMagnitudes::defaults();
        let e1 = mean_energy(
            &build_state(StateKind::Psi1, &model, &mags).unwrap().realized,
            &model,
        );
        assert!((e1 - 158.0).abs() / 158.0 < 0.02, "⟨E⟩ = {e1}");
        assert_relative_eq!(e1, 157.875, max_relative = 1e-4);
        let e3 = mean_energy(
            &build_state(StateKind::Psi3, &model, &mags).unwrap().realized,
            &model,
        );
        assert_relative_eq!(e3, 157.8, max_relative = 1e-3);
    }

    #[test]
    fn ground_state_energy() {
        let model = standard_model(false, CouplingParams::ZERO);
        // σ_ℓ² = 2/(m ω_ℓ) is the ground-state width: energy ½ω₁ + ½ω₂.
        let gs = GaussianSuperposition::new(
            vec![GaussianComponent {
                amplitude: C64::new(1.0, 0.0),
                q_1: 0.0,
                q_2: 0.0,
            }],
            (2.0_f64).sqrt(),
            1.0,
        )
        .unwrap();
        let e = mean_energy(&gs, &model);
        assert_relative_eq!(e, 0.5 + 0.5 * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn peak_distance_values() {
        let model = standard_model(false, CouplingParams::ZERO);
        let mags = StateMagnitudes::defaults();
        for kind in [StateKind::Psi1, StateKind::Psi2, StateKind::Psi3] {
            let s = build_state(kind, &model, &mags).unwrap();
            let d = peak_distance(&s.realized).unwrap();
            assert!(
                (d - 50.0_f64.sqrt()).abs() < 1e-12,
                "{}: d = {d}",
                kind.name()
            );
        }
        // Coincident components: distance 0 (constructed directly; such a
        // state is not normalizable and is rejected by the constructor).
        let degenerate = GaussianSuperposition {
            components: vec![
                GaussianComponent { amplitude: C64::new(1.0, 0.0), q_1: 1.0, q_2: 2.0 },
                GaussianComponent { amplitude: C64::new(1.0, 0.0), q_1: 1.0, q_2: 2.0 },
            ],
            sigma_1: 1.0,
            sigma_2: 1.0,
        };
        assert_eq!(peak_distance(&degenerate).unwrap(), 0.0);
        let single = GaussianSuperposition::new(
            vec![GaussianComponent { amplitude: C64::new(1.0, 0.0), q_1: 0.0, q_2: 0.0 }],
            1.0,
            1.0,
        )
        .unwrap();
        assert!(matches!(
            peak_distance(&single),
            Err(DecoherenceError::WrongComponentCount(1))
        ));
    }

    #[test]
    fn decoherence_starts_at_unity() {
        let model = std_valid(false, CouplingParams::ZERO);
        let state = build_state(StateKind::Cat, model.params(), &StateMagnitudes::defaults())
            .unwrap()
            .realized;
        let p = DecoherencePipeline::new(&model, &state).unwrap();
        let at0 = p.at(0.0).unwrap();
        assert!((at0.d - 1.0).abs() < 1e-12);
        assert!((at0.gamma - 1.0).abs() < 1e-12);
        assert!((at0.visibility - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_is_one_without_reservoir() {
        let mut params = standard_model(false, CouplingParams::ZERO);
        params.reservoir = ReservoirSpec::Distinct {
            gamma_1: 0.0,
            gamma_2: 0.0,
            t_1: 1e3,
            t_2: 1e3,
            cutoff: None,
        };
        let model = params.validate().unwrap();
        let state = build_state(StateKind::Psi1, model.params(), &StateMagnitudes::defaults())
            .unwrap()
            .realized;
        let p = DecoherencePipeline::new(&model, &state).unwrap();
        for t in [0.3, 1.1, 4.7] {
            let pt = p.at(t).unwrap();
            assert!((pt.gamma - 1.0).abs() < 1e-9, "Γ({t}) = {}", pt.gamma);
            assert!((pt.d - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn series_shape_and_monotone_decay() {
        let model = std_valid(false, CouplingForm::QqPp.couplings(0.1));
        let state = build_state(StateKind::Psi1, model.params(), &StateMagnitudes::defaults())
            .unwrap()
            .realized;
        let single = decoherence_series(&model, &state, &[0.0]).unwrap();
        assert_eq!(single.d_t, vec![1.0]);
        assert_eq!(single.visibility_t, vec![1.0]);

        let grid: Vec<f64> = (0..40).map(|k| k as f64 * 1e-3).collect();
        let series = decoherence_series(&model, &state, &grid).unwrap();
        assert!(series.d_t[0] == 1.0);
        assert!(series.d_t.iter().all(|&d| d > 0.0 && d <= 1.0 + 1e-9));
        assert!(series.d_t.last().unwrap() < &0.9);
        for w in series.ln_d_t.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "ln 𝒟 should not increase: {w:?}");
        }
        assert!(decoherence_series(&model, &state, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn visibility_tracks_decoherence_function() {
        for (common, form, kind) in [
            (false, CouplingForm::QqPp, StateKind::Psi1),
            (true, CouplingForm::QqPp, StateKind::Psi1),
            (false, CouplingForm::QpPq, StateKind::Psi2),
            (false, CouplingForm::QqPp, StateKind::Cat),
        ] {
            let model = std_valid(common, form.couplings(0.1));
            let state = build_state(kind, model.params(), &StateMagnitudes::defaults())
                .unwrap()
                .realized;
            let p = DecoherencePipeline::new(&model, &state).unwrap();
            for k in 1..=6 {
                let t = 5e-3 * k as f64;
                let pt = p.at(t).unwrap();
                assert!(
                    (pt.d - pt.visibility).abs() <= 1e-3,
                    "{} common={common}: t = {t}: 𝒟 = {}, V/V₀ = {}",
                    kind.name(),
                    pt.d,
                    pt.visibility
                );
            }
        }
    }

    #[test]
    fn stronger_momentum_coupling_accelerates_decay() {
        // Increasing λ₂₂ raises γ̃ and can only speed up decoherence.
        let state_model = standard_model(false, CouplingParams::ZERO);
        let state = build_state(StateKind::Psi1, &state_model, &StateMagnitudes::defaults())
            .unwrap()
            .realized;
        let t = 0.02;
        let mut last = f64::INFINITY;
        for l22 in [0.0, 0.1, 0.5] {
            let model = std_valid(
                false,
                CouplingParams {
                    lambda_11: 0.0,
                    lambda_12: 0.0,
                    lambda_21: 0.0,
                    lambda_22: l22,
                },
            );
            let d = decoherence_function(&model, &state, t).unwrap();
            assert!(d <= last + 1e-12, "λ₂₂ = {l22}: 𝒟 = {d} > {last}");
            last = d;
        }
    }

    #[test]
    fn equal_resources_across_benchmark_states() {
        let model = standard_model(false, CouplingParams::ZERO);
        let mags = StateMagnitudes::defaults();
        let energies: Vec<f64> = [StateKind::Psi1, StateKind::Psi2, StateKind::Psi3, StateKind::Cat]
            .iter()
            .map(|&k| mean_energy(&build_state(k, &model, &mags).unwrap().realized, &model))
            .collect();
        let reference = energies[0];
        for e in &energies {
            assert!((e - reference).abs() / reference < 0.10, "energies: {energies:?}");
        }
    }

    #[test]
    fn gamma_audit_reports_expansion_discrepancy() {
        let model = std_valid(false, CouplingForm::QqPp.couplings(0.1));
        let state = build_state(StateKind::Psi1, model.params(), &StateMagnitudes::defaults())
            .unwrap()
            .realized;
        // Γ(0) of the expanded combination evaluates to 9 for this state
        // (the sum-center term sneaks in); the audit must surface that
        // rather than hide it.
        let audit = gamma_audit(&model, &state, 0.0).unwrap();
        assert!((audit.authoritative - 1.0).abs() < 1e-12);
        assert!(!audit.well_defined);
        assert_relative_eq!(audit.expansion, 9.0, max_relative = 1e-9);
    }

    #[test]
    fn figure_presets_enumerate_five_curves() {
        for fig in 1..=4 {
            let curves = figure_curves(fig).unwrap();
            assert_eq!(curves.len(), 5);
            assert_eq!(curves[0].label, "cat_reference");
            let lambda = if fig == 4 { 0.5 } else { 0.1 };
            assert_eq!(curves[1].model.couplings.lambda_11, lambda);
        }
        assert!(figure_curves(5).is_none());
    }
}
