//! High-temperature master-equation coefficients for both reservoir
//! topologies.
//!
//! In collective/relative coordinates R_ℓ = (x_ℓ+y_ℓ)/2, r_ℓ = x_ℓ−y_ℓ
//! and after the partial Fourier transform over {R_ℓ}, the master equation
//! becomes a first-order advection equation for ρ̃(K₁, r₁, K₂, r₂) whose
//! characteristics follow d v/dt = M v on the state vector
//! v = (r₁, K₁, r₂, K₂), damped by the diffusion form
//! dρ̃/ds = −(1/ħ²) rᵀ D r ρ̃.
//!
//! With ħ = 1 the drift matrix reads
//!
//!   M = [ 2γ̃₁      −1/m₁    Δ₂       −λ₂₂  ]
//!       [ m₁ω̃₁²     0       Γ₂       −λ₁₂  ]
//!       [ Δ₁       −λ₂₂     2γ̃₂      −1/m₂ ]
//!       [ Γ₁       −λ₂₁     m₂ω̃₂²     0    ]
//!
//! (common reservoir: γ̃, m shared and ϖ_ℓ² in place of ω̃_ℓ²), with
//!
//!   γ̃_ℓ = γ_ℓ / (1 − λ₂₂² m₁ m₂),
//!   D_ℓ  = 2 m_ℓ γ̃_ℓ k_B T_ℓ,
//!   Γ_ℓ  = λ₁₁ + 2 m_ℓ γ̃_ℓ Σ_{ℓ'≠ℓ} λ_{ℓ'ℓ},
//!   Δ_ℓ  = 2 λ₂₂ m_ℓ γ̃_ℓ + Σ_{ℓ'≠ℓ} λ_{ℓℓ'}.
//!
//! The diffusion form is diag(D₁, D₂) for distinct reservoirs and
//! D·[[1, 1], [1, 1]] for a common one — the common bath correlates the two
//! relative coordinates even with every direct coupling switched off.
//!
//! Unit restoration: each −1/m_ℓ entry carries ħ, each m_ℓω̃_ℓ² entry
//! carries 1/ħ, the −λ₂₂ entries carry ħ and the Γ_ℓ entries carry 1/ħ;
//! D enters as D/ħ².

use nalgebra::{Matrix2, Matrix4};
use thiserror::Error;

use crate::model::{ModelParams, ReservoirSpec, SINGULAR_REDUCTION_TOL};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MasterEqError {
    #[error("singular mass reduction: λ₂₂² m₁ m₂ = {product} is within tolerance of 1")]
    SingularReduction { product: f64 },
    #[error("mass reduction denominator 1 − λ₂₂² m₁ m₂ = {denominator} is not positive")]
    InvalidReduction { denominator: f64 },
    #[error("renormalized frequency squared is not positive: {which} = {value}")]
    NegativeRenormalizedFrequency { which: &'static str, value: f64 },
}

/// Reservoir topology of an assembled drift system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Distinct,
    Common,
}

/// Effective damping rates (γ̃₁, γ̃₂). For a common reservoir the shared
/// value is returned duplicated.
pub fn effective_damping(p: &ModelParams) -> Result<(f64, f64), MasterEqError> {
    let l22 = p.couplings.lambda_22;
    let product = l22 * l22 * p.oscillators.m_1 * p.oscillators.m_2;
    let denom = 1.0 - product;
    if denom.abs() <= SINGULAR_REDUCTION_TOL {
        return Err(MasterEqError::SingularReduction { product });
    }
    if denom < 0.0 {
        return Err(MasterEqError::InvalidReduction { denominator: denom });
    }
    Ok((
        p.reservoir.gamma(1) / denom,
        p.reservoir.gamma(2) / denom,
    ))
}

/// Diffusion coefficients (D₁, D₂) with D_ℓ = 2 m_ℓ γ̃_ℓ k_B T_ℓ; the
/// common-reservoir D is returned duplicated.
pub fn diffusion_coefficients(p: &ModelParams) -> Result<(f64, f64), MasterEqError> {
    let (g1, g2) = effective_damping(p)?;
    Ok((
        2.0 * p.oscillators.m_1 * g1 * p.reservoir.temperature(1),
        2.0 * p.oscillators.m_2 * g2 * p.reservoir.temperature(2),
    ))
}

/// Effective couplings ((Γ₁, Γ₂), (Δ₁, Δ₂)).
pub type EffectiveCouplingPairs = ((f64, f64), (f64, f64));

pub fn effective_couplings(p: &ModelParams) -> Result<EffectiveCouplingPairs, MasterEqError> {
    let (g1, g2) = effective_damping(p)?;
    let c = &p.couplings;
    let l11 = lambda_tilde_11(p)?;
    let gamma_1 = l11 + 2.0 * p.oscillators.m_1 * g1 * c.lambda_21;
    let gamma_2 = l11 + 2.0 * p.oscillators.m_2 * g2 * c.lambda_12;
    let delta_1 = 2.0 * c.lambda_22 * p.oscillators.m_1 * g1 + c.lambda_12;
    let delta_2 = 2.0 * c.lambda_22 * p.oscillators.m_2 * g2 + c.lambda_21;
    Ok(((gamma_1, gamma_2), (delta_1, delta_2)))
}

/// Ohmic damping-kernel strength η_ℓ = 2 μ_ℓℓ γ_ℓ, needed only when the
/// cutoff shift is enabled.
fn eta(p: &ModelParams, l: usize) -> Result<f64, MasterEqError> {
    let l22 = p.couplings.lambda_22;
    let product = l22 * l22 * p.oscillators.m_1 * p.oscillators.m_2;
    let denom = 1.0 - product;
    if denom.abs() <= SINGULAR_REDUCTION_TOL {
        return Err(MasterEqError::SingularReduction { product });
    }
    let mu_ll = p.oscillators.mass(l) / denom;
    Ok(2.0 * mu_ll * p.reservoir.gamma(l))
}

/// Shifted position-position coupling λ̃₁₁ = λ₁₁ − 2 Ω^C η / π, applied
/// only for a common reservoir with the cutoff shift enabled; otherwise
/// the bare λ₁₁.
pub fn lambda_tilde_11(p: &ModelParams) -> Result<f64, MasterEqError> {
    let bare = p.couplings.lambda_11;
    match (&p.reservoir, p.reservoir.cutoff()) {
        (ReservoirSpec::Common { .. }, Some(cut)) if cut.enabled => {
            Ok(bare - 2.0 * cut.omega_c * eta(p, 1)? / std::f64::consts::PI)
        }
        _ => Ok(bare),
    }
}

/// Renormalized squared frequencies (ω̃₁², ω̃₂², ϖ₁², ϖ₂²).
///
/// With the cutoff disabled (the default), ω̃_ℓ² = ω_ℓ². With it enabled,
/// ω̃_ℓ² = ω_ℓ² − 2 η_ℓ Ω^C/(π m_ℓ). The common topology additionally
/// shifts ϖ_ℓ² = ω̃_ℓ² + 2γ̃ (λ₁₂ δ_ℓ1 + λ₂₁ δ_ℓ2); for distinct
/// reservoirs ϖ_ℓ² = ω̃_ℓ².
pub fn renormalized_frequencies(p: &ModelParams) -> Result<(f64, f64, f64, f64), MasterEqError> {
    let o = &p.oscillators;
    let mut omega_sq = [o.omega_1 * o.omega_1, o.omega_2 * o.omega_2];
    if let Some(cut) = p.reservoir.cutoff() {
        if cut.enabled {
            for l in [1usize, 2] {
                let shift = 2.0 * eta(p, l)? * cut.omega_c / (std::f64::consts::PI * o.mass(l));
                omega_sq[l - 1] -= shift;
            }
        }
    }
    for (which, v) in [("omega_tilde_sq_1", omega_sq[0]), ("omega_tilde_sq_2", omega_sq[1])] {
        if v <= 0.0 {
            return Err(MasterEqError::NegativeRenormalizedFrequency { which, value: v });
        }
    }
    let mut varpi_sq = omega_sq;
    if p.reservoir.is_common() {
        let (gt, _) = effective_damping(p)?;
        varpi_sq[0] += 2.0 * gt * p.couplings.lambda_12;
        varpi_sq[1] += 2.0 * gt * p.couplings.lambda_21;
        for (which, v) in [("varpi_sq_1", varpi_sq[0]), ("varpi_sq_2", varpi_sq[1])] {
            if v <= 0.0 {
                return Err(MasterEqError::NegativeRenormalizedFrequency { which, value: v });
            }
        }
    }
    Ok((omega_sq[0], omega_sq[1], varpi_sq[0], varpi_sq[1]))
}

/// Every scalar coefficient of the master equation in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    pub gamma_tilde_1: f64,
    pub gamma_tilde_2: f64,
    pub d_1: f64,
    pub d_2: f64,
    pub gamma_eff_1: f64,
    pub gamma_eff_2: f64,
    pub delta_eff_1: f64,
    pub delta_eff_2: f64,
    pub omega_tilde_sq_1: f64,
    pub omega_tilde_sq_2: f64,
    pub varpi_sq_1: f64,
    pub varpi_sq_2: f64,
    pub lambda_tilde_11: f64,
}

pub fn effective_coefficients(p: &ModelParams) -> Result<EffectiveCoefficients, MasterEqError> {
    let (gamma_tilde_1, gamma_tilde_2) = effective_damping(p)?;
    let (d_1, d_2) = diffusion_coefficients(p)?;
    let ((gamma_eff_1, gamma_eff_2), (delta_eff_1, delta_eff_2)) = effective_couplings(p)?;
    let (omega_tilde_sq_1, omega_tilde_sq_2, varpi_sq_1, varpi_sq_2) =
        renormalized_frequencies(p)?;
    Ok(EffectiveCoefficients {
        gamma_tilde_1,
        gamma_tilde_2,
        d_1,
        d_2,
        gamma_eff_1,
        gamma_eff_2,
        delta_eff_1,
        delta_eff_2,
        omega_tilde_sq_1,
        omega_tilde_sq_2,
        varpi_sq_1,
        varpi_sq_2,
        lambda_tilde_11: lambda_tilde_11(p)?,
    })
}

/// The 4×4 drift matrix over (r₁, K₁, r₂, K₂) plus the 2×2 diffusion
/// form over (r₁, r₂).
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSystem {
    /// Drift matrix in the source sign convention, which pairs with the
    /// Fourier kernel e^{+iKR}. Use [`DriftSystem::advection`] for the
    /// generator matching the e^{−iKR} kernel used by the propagator.
    pub m: Matrix4<f64>,
    /// Symmetric positive-semidefinite form: the characteristic damping is
    /// dρ̃/ds = −(1/ħ²) rᵀ (diffusion) r ρ̃.
    pub diffusion: Matrix2<f64>,
    pub topology: Topology,
    pub coefficients: EffectiveCoefficients,
}

impl DriftSystem {
    /// Characteristic advection generator for the e^{−iKR} kernel: the
    /// stored matrix conjugated by the K-parity P = diag(1, −1, 1, −1).
    pub fn advection(&self) -> Matrix4<f64> {
        let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, -1.0));
        p * self.m * p
    }
}

/// Assembles the drift matrix and diffusion form, with ħ = 1. Distinct
/// reservoirs use ω̃_ℓ² in the frequency entries; a common reservoir uses
/// ϖ_ℓ².
pub fn build_drift_system(p: &ModelParams) -> Result<DriftSystem, MasterEqError> {
    let co = effective_coefficients(p)?;
    let c = &p.couplings;
    let o = &p.oscillators;
    let common = p.reservoir.is_common();
    let (fsq_1, fsq_2) = if common {
        (co.varpi_sq_1, co.varpi_sq_2)
    } else {
        (co.omega_tilde_sq_1, co.omega_tilde_sq_2)
    };
    let m = Matrix4::new(
        2.0 * co.gamma_tilde_1,
        -1.0 / o.m_1,
        co.delta_eff_2,
        -c.lambda_22,
        o.m_1 * fsq_1,
        0.0,
        co.gamma_eff_2,
        -c.lambda_12,
        co.delta_eff_1,
        -c.lambda_22,
        2.0 * co.gamma_tilde_2,
        -1.0 / o.m_2,
        co.gamma_eff_1,
        -c.lambda_21,
        o.m_2 * fsq_2,
        0.0,
    );
    let diffusion = if common {
        Matrix2::new(co.d_1, co.d_1, co.d_1, co.d_1)
    } else {
        Matrix2::new(co.d_1, 0.0, 0.0, co.d_2)
    };
    Ok(DriftSystem {
        m,
        diffusion,
        topology: if common { Topology::Common } else { Topology::Distinct },
        coefficients: co,
    })
}
