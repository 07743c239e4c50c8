//! Physical parameters of two coupled dissipative harmonic oscillators.
//!
//! The system Hamiltonian is
//!
//!   H = Σ_ℓ [ p_ℓ²/2m_ℓ + m_ℓ ω_ℓ² q_ℓ²/2 ]
//!     + λ₁₁ q₁q₂ + λ₁₂ q₁p₂ + λ₂₁ q₂p₁ + λ₂₂ p₁p₂,
//!
//! with each oscillator damped either by its own Ohmic reservoir
//! ("distinct") or by one shared reservoir ("common"). Everything here
//! works in natural units ħ = k_B = 1; doc comments keep ħ explicit so
//! unit restoration stays mechanical.

use thiserror::Error;

/// Tolerance for the singular-reduction check 1 − λ₂₂²m₁m₂ ≈ 0.
pub const SINGULAR_REDUCTION_TOL: f64 = 1e-12;

/// Bilinear couplings of the q₁q₂ + q₁p₂ + q₂p₁ + p₁p₂ interaction.
///
/// λ₁₁ has units of energy/length², λ₁₂ and λ₂₁ are frequency-like and
/// λ₂₂ is inverse-mass-like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub lambda_11: f64,
    pub lambda_12: f64,
    pub lambda_21: f64,
    pub lambda_22: f64,
}

impl CouplingParams {
    pub const ZERO: Self = Self {
        lambda_11: 0.0,
        lambda_12: 0.0,
        lambda_21: 0.0,
        lambda_22: 0.0,
    };

    /// λ_{ℓℓ'} by 1-based oscillator indices.
    pub fn get(&self, l: usize, lp: usize) -> f64 {
        match (l, lp) {
            (1, 1) => self.lambda_11,
            (1, 2) => self.lambda_12,
            (2, 1) => self.lambda_21,
            (2, 2) => self.lambda_22,
            _ => panic!("coupling index out of range: ({l},{lp})"),
        }
    }
}

/// Masses and bare angular frequencies of the two oscillators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub m_1: f64,
    pub m_2: f64,
    pub omega_1: f64,
    pub omega_2: f64,
}

impl OscillatorParams {
    pub fn mass(&self, l: usize) -> f64 {
        match l {
            1 => self.m_1,
            2 => self.m_2,
            _ => panic!("oscillator index out of range: {l}"),
        }
    }

    pub fn omega(&self, l: usize) -> f64 {
        match l {
            1 => self.omega_1,
            2 => self.omega_2,
            _ => panic!("oscillator index out of range: {l}"),
        }
    }
}

/// Optional high-frequency cutoff Ω^C of the Ohmic spectral density.
///
/// When `enabled`, the reservoir-induced frequency shift
/// (Δω_ℓ)² = 2 η_ℓ Ω^C / (π m_ℓ) with η_ℓ = 2 μ_ℓℓ γ_ℓ is subtracted from
/// ω_ℓ², and for a common reservoir the coupling shift
/// λ̃₁₁ = λ₁₁ − 2 Ω^C η / π is applied. Off by default: the shift is small
/// and conventionally reabsorbed into the bare parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    pub enabled: bool,
    pub omega_c: f64,
}

/// Reservoir topology and thermal parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReservoirSpec {
    /// Each oscillator couples to its own Ohmic bath.
    Distinct {
        gamma_1: f64,
        gamma_2: f64,
        t_1: f64,
        t_2: f64,
        cutoff: Option<CutoffSpec>,
    },
    /// Both oscillators couple to one shared Ohmic bath with identical
    /// couplings, which forces m₁ = m₂.
    Common {
        gamma: f64,
        t: f64,
        cutoff: Option<CutoffSpec>,
    },
}

impl ReservoirSpec {
    pub fn is_common(&self) -> bool {
        matches!(self, ReservoirSpec::Common { .. })
    }

    /// Relaxation rate γ_ℓ of oscillator ℓ.
    pub fn gamma(&self, l: usize) -> f64 {
        match self {
            ReservoirSpec::Distinct { gamma_1, gamma_2, .. } => {
                if l == 1 {
                    *gamma_1
                } else {
                    *gamma_2
                }
            }
            ReservoirSpec::Common { gamma, .. } => *gamma,
        }
    }

    /// Temperature T_ℓ seen by oscillator ℓ (k_B = 1).
    pub fn temperature(&self, l: usize) -> f64 {
        match self {
            ReservoirSpec::Distinct { t_1, t_2, .. } => {
                if l == 1 {
                    *t_1
                } else {
                    *t_2
                }
            }
            ReservoirSpec::Common { t, .. } => *t,
        }
    }

    pub fn cutoff(&self) -> Option<CutoffSpec> {
        match self {
            ReservoirSpec::Distinct { cutoff, .. } | ReservoirSpec::Common { cutoff, .. } => {
                *cutoff
            }
        }
    }
}

/// Full physical configuration of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub oscillators: OscillatorParams,
    pub couplings: CouplingParams,
    pub reservoir: ReservoirSpec,
}

/// A single violated validation condition.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParamError {
    #[error("non-positive parameter: {name} = {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("non-finite parameter: {name}")]
    NonFiniteParameter { name: &'static str },
    #[error("singular mass reduction: λ₂₂² m₁ m₂ = {product} is within {tol} of 1")]
    SingularReduction { product: f64, tol: f64 },
    #[error("mass reduction denominator 1 − λ₂₂² m₁ m₂ = {denominator} is negative")]
    NegativeReduction { denominator: f64 },
    #[error("common reservoir requires equal masses, got m₁ = {m_1}, m₂ = {m_2}")]
    UnequalCommonMasses { m_1: f64, m_2: f64 },
    #[error("unstable couplings: {reason}")]
    Unstable { reason: String },
}

/// Non-fatal advisories issued by `validate`.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// The master-equation derivation assumes k_B T_ℓ ≫ ħ ω_ℓ; issued when
    /// k_B T < 10 ħ ω_max, with no hard threshold in the model itself.
    LowTemperature { t: f64, omega_max: f64 },
    /// Normal-mode frequencies closer than the degeneracy tolerance.
    DegenerateModes { omega_1: f64, omega_2: f64 },
}

/// Parameters that passed every invariant plus the normal-mode stability
/// gate. Immutable; shares freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedModel {
    params: ModelParams,
    warnings: Vec<ParamWarning>,
}

impl ValidatedModel {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn warnings(&self) -> &[ParamWarning] {
        &self.warnings
    }
}

impl std::ops::Deref for ValidatedModel {
    type Target = ModelParams;

    fn deref(&self) -> &ModelParams {
        &self.params
    }
}

impl ModelParams {
    /// 2×2 matrix of reduced masses
    ///
    ///   μ_ℓℓ' = m_ℓ (λ₂₂ m_ℓ')^(1−δ_ℓℓ') / (1 − λ₂₂² m₁ m₂),
    ///
    /// which arise solely from the p₁p₂ coupling. Entries are
    /// `[[μ₁₁, μ₁₂], [μ₂₁, μ₂₂]]`.
    pub fn reduced_masses(&self) -> Result<[[f64; 2]; 2], ParamError> {
        let l22 = self.couplings.lambda_22;
        let product = l22 * l22 * self.oscillators.m_1 * self.oscillators.m_2;
        let denom = 1.0 - product;
        if denom.abs() <= SINGULAR_REDUCTION_TOL {
            return Err(ParamError::SingularReduction {
                product,
                tol: SINGULAR_REDUCTION_TOL,
            });
        }
        let m = [self.oscillators.m_1, self.oscillators.m_2];
        let mut mu = [[0.0; 2]; 2];
        for l in 0..2 {
            for lp in 0..2 {
                let factor = if l == lp { 1.0 } else { l22 * m[lp] };
                mu[l][lp] = m[l] * factor / denom;
            }
        }
        Ok(mu)
    }

    /// Checks every invariant that does not need the stability gate and
    /// returns the complete list of violations.
    fn structural_issues(&self) -> Vec<ParamError> {
        let mut issues = Vec::new();
        let osc = &self.oscillators;
        let positive = [
            ("m_1", osc.m_1),
            ("m_2", osc.m_2),
            ("omega_1", osc.omega_1),
            ("omega_2", osc.omega_2),
        ];
        for (name, value) in positive {
            if !value.is_finite() {
                issues.push(ParamError::NonFiniteParameter { name });
            } else if value <= 0.0 {
                issues.push(ParamError::NonPositiveParameter { name, value });
            }
        }
        let c = &self.couplings;
        for (name, value) in [
            ("lambda_11", c.lambda_11),
            ("lambda_12", c.lambda_12),
            ("lambda_21", c.lambda_21),
            ("lambda_22", c.lambda_22),
        ] {
            if !value.is_finite() {
                issues.push(ParamError::NonFiniteParameter { name });
            }
        }
        match &self.reservoir {
            ReservoirSpec::Distinct {
                gamma_1,
                gamma_2,
                t_1,
                t_2,
                ..
            } => {
                for (name, value) in [("gamma_1", *gamma_1), ("gamma_2", *gamma_2)] {
                    if !value.is_finite() {
                        issues.push(ParamError::NonFiniteParameter { name });
                    } else if value < 0.0 {
                        issues.push(ParamError::NonPositiveParameter { name, value });
                    }
                }
                for (name, value) in [("T_1", *t_1), ("T_2", *t_2)] {
                    if !value.is_finite() {
                        issues.push(ParamError::NonFiniteParameter { name });
                    } else if value <= 0.0 {
                        issues.push(ParamError::NonPositiveParameter { name, value });
                    }
                }
            }
            ReservoirSpec::Common { gamma, t, .. } => {
                if !gamma.is_finite() {
                    issues.push(ParamError::NonFiniteParameter { name: "gamma" });
                } else if *gamma < 0.0 {
                    issues.push(ParamError::NonPositiveParameter {
                        name: "gamma",
                        value: *gamma,
                    });
                }
                if !t.is_finite() {
                    issues.push(ParamError::NonFiniteParameter { name: "T" });
                } else if *t <= 0.0 {
                    issues.push(ParamError::NonPositiveParameter { name: "T", value: *t });
                }
                if self.oscillators.m_1 != self.oscillators.m_2 {
                    issues.push(ParamError::UnequalCommonMasses {
                        m_1: self.oscillators.m_1,
                        m_2: self.oscillators.m_2,
                    });
                }
            }
        }
        if let Some(cut) = self.reservoir.cutoff() {
            if cut.enabled {
                if !cut.omega_c.is_finite() {
                    issues.push(ParamError::NonFiniteParameter { name: "cutoff" });
                } else if cut.omega_c <= 0.0 {
                    issues.push(ParamError::NonPositiveParameter {
                        name: "cutoff",
                        value: cut.omega_c,
                    });
                }
            }
        }
        if issues.is_empty() {
            let l22 = self.couplings.lambda_22;
            let product = l22 * l22 * osc.m_1 * osc.m_2;
            if (1.0 - product).abs() <= SINGULAR_REDUCTION_TOL {
                issues.push(ParamError::SingularReduction {
                    product,
                    tol: SINGULAR_REDUCTION_TOL,
                });
            } else if product > 1.0 {
                issues.push(ParamError::NegativeReduction {
                    denominator: 1.0 - product,
                });
            }
        }
        issues
    }

    /// Validates positivity, mass-reduction finiteness and the normal-mode
    /// stability gate. Pure: the verdict depends only on the input values.
    pub fn validate(&self) -> Result<ValidatedModel, Vec<ParamError>> {
        let mut issues = self.structural_issues();
        let mut warnings = Vec::new();
        if issues.is_empty() {
            let stability = crate::normal_modes::stability_check(self);
            if !stability.stable {
                issues.push(ParamError::Unstable {
                    reason: stability.reason(),
                });
            } else if stability.degenerate {
                warnings.push(ParamWarning::DegenerateModes {
                    omega_1: stability.frequencies[0],
                    omega_2: stability.frequencies[1],
                });
            }
        }
        if !issues.is_empty() {
            return Err(issues);
        }
        let omega_max = self.oscillators.omega_1.max(self.oscillators.omega_2);
        for l in [1, 2] {
            let t = self.reservoir.temperature(l);
            if t < 10.0 * omega_max {
                warnings.push(ParamWarning::LowTemperature { t, omega_max });
                break;
            }
        }
        Ok(ValidatedModel {
            params: self.clone(),
            warnings,
        })
    }
}
