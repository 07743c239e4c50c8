//! Normal-mode analysis of the coupled two-oscillator Hamiltonian.
//!
//! The authoritative route is classical: write the equations of motion
//! ż = J S z for z = (q₁, p₁, q₂, p₂), with S the Hessian of the quadratic
//! Hamiltonian and J the canonical symplectic form, and read the
//! normal-mode frequencies off the purely imaginary eigenvalue pairs ±iΩ.
//! This is exact and free of operator-ordering conventions.
//!
//! The second-quantized closed forms for the coupling strengths g_ℓ and
//! the frequencies carry a normalization that does not reproduce the
//! classical eigenvalues for finite coupling (for pure q₁q₂ coupling they
//! imply Ω² = ω² ± 2λ₁₁/m at unit mass and frequency, while the exact
//! result is ω² ± λ₁₁/m). They are evaluated here only as audited
//! diagnostics, never as authoritative output.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{self, CMatrix4, CVector4};
use crate::model::ModelParams;

/// Relative tolerance under which two normal-mode frequencies count as
/// degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Symplectic-form preservation tolerance for the returned transform.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

const EIG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NormalModeError {
    #[error("unstable couplings: {reason}")]
    Unstable { reason: String },
}

/// Canonical symplectic form over (q₁, p₁, q₂, p₂).
pub fn symplectic_form() -> Matrix4<f64> {
    let mut j = Matrix4::zeros();
    j[(0, 1)] = 1.0;
    j[(1, 0)] = -1.0;
    j[(2, 3)] = 1.0;
    j[(3, 2)] = -1.0;
    j
}

/// Hessian S of the quadratic Hamiltonian, H = ½ zᵀ S z.
pub fn hamiltonian_form(p: &ModelParams) -> Matrix4<f64> {
    let o = &p.oscillators;
    let c = &p.couplings;
    let mut s = Matrix4::zeros();
    s[(0, 0)] = o.m_1 * o.omega_1 * o.omega_1;
    s[(1, 1)] = 1.0 / o.m_1;
    s[(2, 2)] = o.m_2 * o.omega_2 * o.omega_2;
    s[(3, 3)] = 1.0 / o.m_2;
    s[(0, 2)] = c.lambda_11;
    s[(2, 0)] = c.lambda_11;
    s[(0, 3)] = c.lambda_12;
    s[(3, 0)] = c.lambda_12;
    s[(1, 2)] = c.lambda_21;
    s[(2, 1)] = c.lambda_21;
    s[(1, 3)] = c.lambda_22;
    s[(3, 1)] = c.lambda_22;
    s
}

/// Classical equations-of-motion matrix A = J S, so that ż = A z.
pub fn dynamical_matrix(p: &ModelParams) -> Matrix4<f64> {
    symplectic_form() * hamiltonian_form(p)
}

/// Coupling strengths of the two-mode normal form, by the
/// second-quantized closed-form expression
///
///   g_ℓ = (λ₁₁ − iλ₂₁ m₁ω₁)/√(m₁ω₁ m₂ω₂)
///       + (−1)^ℓ √(m₁ω₁ m₂ω₂) (λ₂₂ + iλ₁₂/(m₁ω₁)).
#[derive(Debug, Clone, Copy)]
pub struct CouplingStrengths {
    pub g_1: C64,
    pub g_2: C64,
    /// Frequencies implied by the second-quantized closed form, when its square
    /// root argument is non-negative and both squares are positive.
    pub closed_form_frequencies: [Option<f64>; 2],
    /// Largest relative deviation of the closed-form frequencies from the
    /// dynamical-matrix frequencies; infinite when either is unavailable.
    pub closed_form_rel_dev: f64,
    /// Whether the second-quantized closed form reproduces the dynamical-matrix
    /// frequencies to 1e-9. False for generic finite couplings.
    pub closed_form_agrees: bool,
}

pub fn coupling_strengths(p: &ModelParams) -> CouplingStrengths {
    let o = &p.oscillators;
    let c = &p.couplings;
    let root = (o.m_1 * o.omega_1 * o.m_2 * o.omega_2).sqrt();
    let base = C64::new(c.lambda_11, -c.lambda_21 * o.m_1 * o.omega_1) / root;
    let shift = C64::new(c.lambda_22, c.lambda_12 / (o.m_1 * o.omega_1)) * root;
    let g_1 = base - shift;
    let g_2 = base + shift;

    let closed = closed_form_frequencies(o.omega_1, o.omega_2, g_1, g_2);
    let oracle = frequencies_from_eigenvalues(&dynamical_matrix(p));
    let closed_form_rel_dev = match (&closed, &oracle) {
        ([Some(p1), Some(p2)], Ok([o1, o2])) => {
            let d1 = (p1 - o1).abs() / o1.max(1e-300);
            let d2 = (p2 - o2).abs() / o2.max(1e-300);
            d1.max(d2)
        }
        _ => f64::INFINITY,
    };
    CouplingStrengths {
        g_1,
        g_2,
        closed_form_frequencies: closed,
        closed_form_rel_dev,
        closed_form_agrees: closed_form_rel_dev <= 1e-9,
    }
}

/// Second-quantized closed form for the normal-mode frequencies:
///
///   Ω_ℓ² = (ω₁²+ω₂²)/2 − |g₁|² + |g₂|²
///        − (−1)^ℓ √[((ω₁²−ω₂²)/2)² − |g₁|²(ω₁−ω₂)² + |g₂|²(ω₁+ω₂)²].
fn closed_form_frequencies(omega_1: f64, omega_2: f64, g_1: C64, g_2: C64) -> [Option<f64>; 2] {
    let g1sq = g_1.norm_sqr();
    let g2sq = g_2.norm_sqr();
    let mean = 0.5 * (omega_1 * omega_1 + omega_2 * omega_2) - g1sq + g2sq;
    let arg = (0.5 * (omega_1 * omega_1 - omega_2 * omega_2)).powi(2)
        - g1sq * (omega_1 - omega_2).powi(2)
        + g2sq * (omega_1 + omega_2).powi(2);
    if arg < 0.0 {
        return [None, None];
    }
    let root = arg.sqrt();
    let sq = [mean + root, mean - root];
    sq.map(|s| if s > 0.0 { Some(s.sqrt()) } else { None })
}

/// Stability verdict plus diagnostics.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub stable: bool,
    pub degenerate: bool,
    /// Ω₁ ≥ Ω₂ when stable; NaN otherwise.
    pub frequencies: [f64; 2],
    /// Largest |Re Λ| over the eigenvalues, relative to the matrix scale.
    pub max_rel_real: f64,
    pub semisimple: bool,
    /// Closed-form inequality ((ω₁−ω₂)/2)² + |g₂|² ≥ |g₁|²((ω₁−ω₂)/(ω₁+ω₂))².
    pub detuning_inequality_holds: bool,
    /// Closed-form inequality (|g₂|²−|g₁|²)² + (ω₁ω₂)² ≥ 2ω₁ω₂(|g₁|²+|g₂|²).
    pub product_inequality_holds: bool,
    /// Whether the two closed-form inequalities' joint verdict matches the
    /// eigenvalue oracle; disagreements are surfaced, not failed.
    pub closed_form_agrees: bool,
}

impl StabilityReport {
    pub fn reason(&self) -> String {
        if self.stable {
            return "stable".to_string();
        }
        if !self.semisimple {
            return "dynamical matrix is not semisimple at a degenerate frequency".to_string();
        }
        format!(
            "dynamical-matrix eigenvalues are not purely imaginary and nonzero \
             (max relative real part {:.3e})",
            self.max_rel_real
        )
    }
}

fn frequencies_from_eigenvalues(a: &Matrix4<f64>) -> Result<[f64; 2], String> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err("dynamical matrix has non-finite entries".to_string());
    }
    let scale = linalg::norm_inf(a).max(1e-300);
    let eigs = a.complex_eigenvalues();
    let mut max_rel_real = 0.0_f64;
    let mut pos_imag: Vec<f64> = Vec::new();
    for e in eigs.iter() {
        max_rel_real = max_rel_real.max(e.re.abs() / scale);
        if e.im > EIG_TOL * scale {
            pos_imag.push(e.im);
        }
    }
    if max_rel_real > EIG_TOL {
        return Err(format!(
            "eigenvalues have nonzero real part (max relative {max_rel_real:.3e})"
        ));
    }
    if pos_imag.len() != 2 {
        return Err(format!(
            "expected two positive-frequency modes, found {}",
            pos_imag.len()
        ));
    }
    pos_imag.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok([pos_imag[0], pos_imag[1]])
}

/// True iff the dynamical matrix has four purely imaginary, nonzero,
/// semisimple eigenvalues. Never errors; the report carries diagnostics,
/// including the closed-form inequalities evaluated on the g values so that
/// disagreements with the oracle are visible.
pub fn stability_check(p: &ModelParams) -> StabilityReport {
    let a = dynamical_matrix(p);
    let finite = a.iter().all(|x| x.is_finite());
    let scale = if finite { linalg::norm_inf(&a).max(1e-300) } else { 1.0 };

    let (mut stable, mut degenerate, mut semisimple) = (false, false, true);
    let mut freqs = [f64::NAN, f64::NAN];
    let mut max_rel_real = f64::INFINITY;
    if finite {
        let eigs = a.complex_eigenvalues();
        max_rel_real = eigs.iter().map(|e| e.re.abs()).fold(0.0_f64, f64::max) / scale;
        if let Ok(f) = frequencies_from_eigenvalues(&a) {
            freqs = f;
            stable = true;
            degenerate = (f[0] - f[1]).abs() <= DEGENERACY_TOL * f[0].max(1.0);
            if degenerate {
                // Semisimple degenerate pair satisfies A² + Ω²I = 0.
                let omega = 0.5 * (f[0] + f[1]);
                let residual = a * a + Matrix4::identity() * omega * omega;
                semisimple = linalg::norm_inf(&residual) <= 1e-8 * scale * scale.max(1.0);
                stable = semisimple;
            }
        }
    }

    let o = &p.oscillators;
    let gs = if finite && o.m_1 > 0.0 && o.m_2 > 0.0 && o.omega_1 > 0.0 && o.omega_2 > 0.0 {
        let cs = coupling_strengths(p);
        Some((cs.g_1.norm_sqr(), cs.g_2.norm_sqr()))
    } else {
        None
    };
    let (detuning_inequality_holds, product_inequality_holds) = match gs {
        Some((g1sq, g2sq)) => {
            let b = (0.5 * (o.omega_1 - o.omega_2)).powi(2) + g2sq
                >= g1sq * ((o.omega_1 - o.omega_2) / (o.omega_1 + o.omega_2)).powi(2);
            let c = (g2sq - g1sq).powi(2) + (o.omega_1 * o.omega_2).powi(2)
                >= 2.0 * o.omega_1 * o.omega_2 * (g1sq + g2sq);
            (b, c)
        }
        None => (false, false),
    };
    StabilityReport {
        stable,
        degenerate,
        frequencies: freqs,
        max_rel_real,
        semisimple,
        detuning_inequality_holds,
        product_inequality_holds,
        closed_form_agrees: (detuning_inequality_holds && product_inequality_holds) == stable,
    }
}

/// Normal-mode frequencies (Ω₁, Ω₂) with Ω₁ ≥ Ω₂ > 0, as the moduli of
/// the purely imaginary eigenvalues of the dynamical matrix.
pub fn normal_mode_frequencies(p: &ModelParams) -> Result<(f64, f64), NormalModeError> {
    frequencies_from_eigenvalues(&dynamical_matrix(p))
        .map(|f| (f[0], f[1]))
        .map_err(|reason| NormalModeError::Unstable { reason })
}

/// The full normal-mode data: frequencies, second-quantized coupling
/// strengths, the symplectic coordinate transform and the closed-form
/// phase data kept for audits.
#[derive(Debug, Clone)]
pub struct NormalModes {
    /// Ω₁ ≥ Ω₂.
    pub omega: [f64; 2],
    pub g: (C64, C64),
    /// Symplectic map (q₁,p₁,q₂,p₂) ↦ (Q₁,P₁,Q₂,P₂); in the new
    /// coordinates the Hamiltonian reads ½ Σ_ℓ (P_ℓ² + Ω_ℓ² Q_ℓ²).
    pub transform: Matrix4<f64>,
    /// Set when |Ω₁ − Ω₂| falls below the degeneracy tolerance; the
    /// transform is still returned.
    pub degenerate: bool,
    /// Dimensionless strengths ξ_ℓℓ' (audit only).
    pub xi: [[f64; 2]; 2],
    /// Closed-form phase data θ_ℓ; None where the arccos argument
    /// leaves [−1, 1] (audit only).
    pub theta: [Option<f64>; 2],
    /// Closed-form phase data φ_ℓ = [θ₁ − (−1)^ℓ θ₂]/2 (audit only).
    pub phi: [Option<f64>; 2],
}

fn xi_strengths(p: &ModelParams) -> [[f64; 2]; 2] {
    let o = &p.oscillators;
    let c = &p.couplings;
    let root = (o.m_1 * o.omega_1 * o.m_2 * o.omega_2).sqrt();
    let xi_11 = c.lambda_11 / (2.0 * root);
    let xi_22 = c.lambda_22 * root / 2.0;
    let xi_12 = 0.5 * c.lambda_12 * (o.m_1 * o.omega_1 / (o.m_2 * o.omega_2)).sqrt();
    let xi_21 = 0.5 * c.lambda_21 * (o.m_2 * o.omega_2 / (o.m_1 * o.omega_1)).sqrt();
    [[xi_11, xi_12], [xi_21, xi_22]]
}

fn expansion_theta(xi: &[[f64; 2]; 2]) -> [Option<f64>; 2] {
    let mut theta = [None, None];
    for (l, slot) in theta.iter_mut().enumerate() {
        let sign = if l == 0 { -1.0 } else { 1.0 };
        let num = xi[0][0] + sign * xi[1][1];
        let den = num * num * (xi[0][1] + xi[1][0]).powi(2);
        if den != 0.0 {
            let arg = num / den;
            if arg.abs() <= 1.0 {
                *slot = Some(arg.acos());
            }
        }
    }
    theta
}

/// Builds the symplectic transform to unit-mass normal form. For each
/// eigenvalue iΩ with eigenvector u + iv, the plane (u, v) is normalized
/// so that the symplectic area ω(u, v) is one; the per-mode rescaling
/// (Q, P) → (√Ω Q, P/√Ω) then turns ½ Σ Ω (Q² + P²) into
/// ½ Σ (P² + Ω² Q²).
pub fn build_mode_transform(p: &ModelParams) -> Result<NormalModes, NormalModeError> {
    let report = stability_check(p);
    if !report.stable {
        return Err(NormalModeError::Unstable {
            reason: report.reason(),
        });
    }
    let a = dynamical_matrix(p);
    let j = symplectic_form();
    let scale = linalg::norm_inf(&a).max(1e-300);
    let ac = CMatrix4::from_fn(|r, c| C64::new(a[(r, c)], 0.0));

    let [omega_hi, omega_lo] = report.frequencies;
    let degenerate = report.degenerate;

    // Complex eigenvectors for the +iΩ eigenvalues.
    let mut modes: Vec<(f64, CVector4)> = Vec::new();
    if degenerate {
        let omega = 0.5 * (omega_hi + omega_lo);
        let shifted = ac - CMatrix4::identity() * C64::new(0.0, omega);
        let basis = linalg::null_space(&shifted, 1e-9);
        if basis.len() < 2 {
            return Err(NormalModeError::Unstable {
                reason: "degenerate eigenspace has deficient dimension".to_string(),
            });
        }
        // Krein-form Gram-Schmidt so the two real planes are symplectically
        // orthogonal: h(w, w') = w̄ᵀ J w'.
        let jc = CMatrix4::from_fn(|r, c| C64::new(j[(r, c)], 0.0));
        let w1 = basis[0];
        let h11 = (w1.map(|z| z.conj()).transpose() * jc * w1)[(0, 0)];
        if h11.norm() < 1e-12 {
            return Err(NormalModeError::Unstable {
                reason: "degenerate mode plane has vanishing symplectic area".to_string(),
            });
        }
        let h12 = (w1.map(|z| z.conj()).transpose() * jc * basis[1])[(0, 0)];
        let w2 = linalg::normalize_phase(&(basis[1] - w1 * (h12 / h11)));
        modes.push((omega, w1));
        modes.push((omega, w2));
    } else {
        for omega in [omega_hi, omega_lo] {
            let shifted = ac - CMatrix4::identity() * C64::new(0.0, omega);
            let basis = linalg::null_space(&shifted, 1e-9);
            let w = *basis.first().ok_or_else(|| NormalModeError::Unstable {
                reason: format!("no eigenvector found for frequency {omega}"),
            })?;
            modes.push((omega, w));
        }
    }

    // Order by frequency, ties broken by overlap with oscillator 1.
    modes.sort_by(|(wa, va), (wb, vb)| {
        let fa = wa / scale;
        let fb = wb / scale;
        if (fa - fb).abs() > DEGENERACY_TOL {
            fb.partial_cmp(&fa).unwrap()
        } else {
            let oa = va[0].norm_sqr() + va[1].norm_sqr();
            let ob = vb[0].norm_sqr() + vb[1].norm_sqr();
            ob.partial_cmp(&oa).unwrap()
        }
    });

    let mut basis = Matrix4::zeros();
    for (k, (omega, w)) in modes.iter().enumerate() {
        let mut u = Vector4::from_fn(|i, _| w[i].re);
        let mut v = Vector4::from_fn(|i, _| w[i].im);
        let mut area = (u.transpose() * j * v)[(0, 0)];
        if area < 0.0 {
            v = -v;
            area = -area;
        }
        if area < 1e-12 {
            return Err(NormalModeError::Unstable {
                reason: "mode plane has vanishing symplectic area".to_string(),
            });
        }
        let e = u / area.sqrt();
        let f = v / area.sqrt();
        basis.set_column(2 * k, &(e * omega.sqrt()));
        basis.set_column(2 * k + 1, &(f / omega.sqrt()));
        u = e;
        let _ = u;
    }
    let transform = basis.try_inverse().ok_or_else(|| NormalModeError::Unstable {
        reason: "mode basis is singular".to_string(),
    })?;

    let cs = coupling_strengths(p);
    let xi = xi_strengths(p);
    let theta = expansion_theta(&xi);
    let phi = match (theta[0], theta[1]) {
        (Some(t1), Some(t2)) => [Some((t1 + t2) / 2.0), Some((t1 - t2) / 2.0)],
        _ => [None, None],
    };
    Ok(NormalModes {
        omega: [modes[0].0, modes[1].0],
        g: (cs.g_1, cs.g_2),
        transform,
        degenerate,
        xi,
        theta,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CouplingParams, ModelParams, OscillatorParams, ReservoirSpec};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn params(m: [f64; 2], omega: [f64; 2], lambda: [f64; 4]) -> ModelParams {
        ModelParams {
            oscillators: OscillatorParams {
                m_1: m[0],
                m_2: m[1],
                omega_1: omega[0],
                omega_2: omega[1],
            },
            couplings: CouplingParams {
                lambda_11: lambda[0],
                lambda_12: lambda[1],
                lambda_21: lambda[2],
                lambda_22: lambda[3],
            },
            reservoir: ReservoirSpec::Distinct {
                gamma_1: 1e-3,
                gamma_2: 1e-3,
                t_1: 1000.0,
                t_2: 1000.0,
                cutoff: None,
            },
        }
    }

    #[test]
    fn coupling_strengths_vanish_when_decoupled() {
        let cs = coupling_strengths(&params([1.0, 1.0], [1.0, 2.0], [0.0; 4]));
        assert_eq!(cs.g_1, C64::new(0.0, 0.0));
        assert_eq!(cs.g_2, C64::new(0.0, 0.0));
        assert!(cs.closed_form_agrees);
    }

    #[test]
    fn coupling_strengths_position_coupling() {
        let cs = coupling_strengths(&params([1.0, 1.0], [1.0, 1.0], [0.1, 0.0, 0.0, 0.0]));
        assert_relative_eq!(cs.g_1.re, 0.1, max_relative = 1e-15);
        assert_relative_eq!(cs.g_2.re, 0.1, max_relative = 1e-15);
        assert_eq!(cs.g_1.im, 0.0);
    }

    #[test]
    fn coupling_strengths_momentum_coupling() {
        let cs = coupling_strengths(&params([1.0, 1.0], [1.0, 1.0], [0.0, 0.0, 0.0, 0.1]));
        assert_relative_eq!(cs.g_1.re, -0.1, max_relative = 1e-15);
        assert_relative_eq!(cs.g_2.re, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn frequencies_decoupled() {
        let (w1, w2) = normal_mode_frequencies(&params([1.0, 1.0], [1.0, 2.0], [0.0; 4])).unwrap();
        assert_relative_eq!(w1, 2.0, max_relative = 1e-12);
        assert_relative_eq!(w2, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn frequencies_position_coupled() {
        let (w1, w2) =
            normal_mode_frequencies(&params([1.0, 1.0], [1.0, 1.0], [0.1, 0.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(w1, 1.1_f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(w2, 0.9_f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn frequencies_momentum_coupled_match_position_dual() {
        let (w1, w2) =
            normal_mode_frequencies(&params([1.0, 1.0], [1.0, 1.0], [0.0, 0.0, 0.0, 0.1])).unwrap();
        assert_relative_eq!(w1, 1.1_f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(w2, 0.9_f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn second_quantized_frequency_form_flags_its_own_normalization() {
        // The second-quantized closed form gives ω² ± 2λ₁₁ at unit parameters and is
        // recorded as disagreeing with the eigenvalue oracle.
        let cs = coupling_strengths(&params([1.0, 1.0], [1.0, 1.0], [0.1, 0.0, 0.0, 0.0]));
        let hi = cs.closed_form_frequencies[0].unwrap();
        assert_relative_eq!(hi, 1.2_f64.sqrt(), max_relative = 1e-12);
        assert!(!cs.closed_form_agrees);
    }

    #[test]
    fn stability_examples() {
        assert!(stability_check(&params([1.0, 1.0], [1.0, 2.0], [0.0; 4])).stable);
        let strong = stability_check(&params([1.0, 1.0], [1.0, 1.0], [1.5, 0.0, 0.0, 0.0]));
        assert!(!strong.stable);
        let fig1 = stability_check(&params([1.0, 1.0], [1.0, 2.0], [0.1, 0.0, 0.0, 0.1]));
        assert!(fig1.stable);
    }

    #[test]
    fn stability_closed_form_inequalities_hold_when_decoupled() {
        let r = stability_check(&params([1.0, 1.0], [1.0, 2.0], [0.0; 4]));
        assert!(r.detuning_inequality_holds && r.product_inequality_holds && r.closed_form_agrees);
    }

    #[test]
    fn transform_is_mass_scaling_when_decoupled() {
        let m = build_mode_transform(&params([2.0, 0.5], [3.0, 1.0], [0.0; 4])).unwrap();
        // Ω₁ = 3 belongs to oscillator 1 here; Q₁ = √m₁ q₁, P₁ = p₁/√m₁.
        let t = m.transform;
        assert_relative_eq!(t[(0, 0)], 2.0_f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(t[(1, 1)], 1.0 / 2.0_f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(t[(2, 2)], 0.5_f64.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(t[(3, 3)], 1.0 / 0.5_f64.sqrt(), max_relative = 1e-10);
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    assert!(t[(r, c)].abs() < 1e-10, "off-diagonal entry at ({r},{c})");
                }
            }
        }
    }

    #[test]
    fn transform_rotates_by_45_degrees_for_symmetric_coupling() {
        let m = build_mode_transform(&params([1.0, 1.0], [1.0, 1.0], [0.1, 0.0, 0.0, 0.0])).unwrap();
        let t = m.transform;
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        // Q rows mix q₁ and q₂ with equal weight; P rows mix p₁ and p₂.
        for k in 0..2 {
            let qrow = t.row(2 * k);
            assert_relative_eq!(qrow[0].abs(), inv_sqrt2, max_relative = 1e-6);
            assert_relative_eq!(qrow[2].abs(), inv_sqrt2, max_relative = 1e-6);
            assert!(qrow[1].abs() < 1e-10 && qrow[3].abs() < 1e-10);
        }
    }

    fn random_stable(rng: &mut impl Rng) -> ModelParams {
        loop {
            let p = params(
                [rng.random_range(0.3..2.5), rng.random_range(0.3..2.5)],
                [rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)],
                [
                    rng.random_range(-0.3..0.3),
                    rng.random_range(-0.3..0.3),
                    rng.random_range(-0.3..0.3),
                    rng.random_range(-0.3..0.3),
                ],
            );
            let mu_ok = p.couplings.lambda_22.powi(2) * p.oscillators.m_1 * p.oscillators.m_2 < 0.9;
            if mu_ok && stability_check(&p).stable {
                return p;
            }
        }
    }

    #[test]
    fn transform_is_symplectic_and_diagonalizes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let j = symplectic_form();
        for _ in 0..200 {
            let p = random_stable(&mut rng);
            let nm = build_mode_transform(&p).unwrap();
            let w = nm.transform.try_inverse().unwrap();
            let jerr = w.transpose() * j * w - j;
            assert!(linalg::norm_inf(&jerr) < SYMPLECTIC_TOL, "symplectic residual");

            let s = hamiltonian_form(&p);
            let d = w.transpose() * s * w;
            let expect = Vector4::new(
                nm.omega[0] * nm.omega[0],
                1.0,
                nm.omega[1] * nm.omega[1],
                1.0,
            );
            for i in 0..4 {
                assert_relative_eq!(d[(i, i)], expect[i], max_relative = 1e-9, epsilon = 1e-10);
                for c in 0..4 {
                    if c != i {
                        assert!(d[(i, c)].abs() < 1e-9 * expect[0].max(1.0));
                    }
                }
            }

            // Frequencies implied by the transform agree with the eigenvalue route.
            let (w1, w2) = normal_mode_frequencies(&p).unwrap();
            assert_relative_eq!(d[(0, 0)].sqrt(), w1, max_relative = 1e-10);
            assert_relative_eq!(d[(2, 2)].sqrt(), w2, max_relative = 1e-10);
        }
    }

    #[test]
    fn degenerate_modes_are_flagged_and_still_symplectic() {
        let nm = build_mode_transform(&params([1.0, 1.0], [1.0, 1.0], [0.0; 4])).unwrap();
        assert!(nm.degenerate);
        let j = symplectic_form();
        let w = nm.transform.try_inverse().unwrap();
        let jerr = w.transpose() * j * w - j;
        assert!(linalg::norm_inf(&jerr) < SYMPLECTIC_TOL);
    }

    #[test]
    fn frequencies_continuous_in_coupling_scale() {
        let base = [0.2, -0.15, 0.1, 0.25];
        for s in [1e-4, 1e-6] {
            let lam = base.map(|x| x * s);
            let (w1, w2) = normal_mode_frequencies(&params([1.0, 1.0], [1.0, 2.0], lam)).unwrap();
            assert!((w1 - 2.0).abs() < 10.0 * s);
            assert!((w2 - 1.0).abs() < 10.0 * s);
        }
    }

    #[test]
    fn stability_equals_frequency_success_on_random_draws() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5150);
        for _ in 0..1000 {
            let p = params(
                [rng.random_range(0.3..2.5), rng.random_range(0.3..2.5)],
                [rng.random_range(0.4..2.2), rng.random_range(0.4..2.2)],
                [
                    rng.random_range(-1.2..1.2),
                    rng.random_range(-1.2..1.2),
                    rng.random_range(-1.2..1.2),
                    rng.random_range(-0.6..0.6),
                ],
            );
            let verdict = stability_check(&p).stable;
            assert_eq!(verdict, normal_mode_frequencies(&p).is_ok());
        }
    }
}
