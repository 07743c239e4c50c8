//! Closed-form evolution of Gaussian superposition states.
//!
//! Fourier-space density matrices of Gaussian superpositions stay
//! complex-Gaussian under the master-equation flow: each component pair
//! (a, b) of the initial state contributes a term
//!
//!   amp · exp(−vᵀ Q(t) v − ℓ_ab(t)ᵀ v − c_ab),   v = (r₁, K₁, r₂, K₂),
//!
//! where Q(t) = G(t)ᵀ C G(t) + Z(t) with G(t) = e^{−At} the characteristic
//! preimage map (A the advection generator), C the initial quadratic form,
//! Z(t) the accumulated diffusion form, and ℓ_ab(t) = G(t)ᵀ ℓ_ab(0). The
//! constant c_ab never evolves. Position-space densities, marginals,
//! traces and peak data all follow from this quadratic form by analytic
//! Gaussian integrals over (K₁, K₂):
//!
//!   ∫ d²K exp(−Kᵀ a K − bᵀK + iKᵀR) = π/√(det a) ·
//!       exp(¼ (iR − b)ᵀ a⁻¹ (iR − b)),
//!
//! valid while Re(a) is positive definite (`NonIntegrableForm` otherwise).
//!
//! Fourier convention: ρ̃(K, r) = (1/2π) ∫ d²R e^{−iK·R} ρ(R, r), inverse
//! with kernel e^{+iK·R} and the same prefactor.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{CMatrix4, CVector4};
use crate::master_eq::{self, DriftSystem, MasterEqError};
use crate::model::ValidatedModel;
use crate::spectral::{self, Spectrum};

type CMatrix2 = Matrix2<C64>;
type CVector2 = nalgebra::Vector2<C64>;

/// Cross width coefficients below this threshold are reported as exactly
/// zero (absent coupling) instead of as a divergent width.
pub const ABSENT_COUPLING_TOL: f64 = 1e-14;

/// Hard cap on grid evaluations.
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PropagatorError {
    #[error(transparent)]
    Coefficients(#[from] MasterEqError),
    #[error("state is invalid: {0}")]
    State(String),
    #[error("evolved (K₁,K₂) form lost positive-definite real part at t = {t}")]
    NonIntegrableForm { t: f64 },
    #[error("grid of {points} points exceeds the {MAX_GRID_POINTS} cap")]
    GridTooLarge { points: usize },
}

/// One Gaussian component exp[−((x₁+q₁)/σ₁)² − ((x₂+q₂)/σ₂)²]; the
/// component peaks at x_ℓ = −q_ℓ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub amplitude: C64,
    pub q_1: f64,
    pub q_2: f64,
}

impl GaussianComponent {
    fn q(&self, l: usize) -> f64 {
        if l == 0 {
            self.q_1
        } else {
            self.q_2
        }
    }
}

/// Superposition Ψ(x₁,x₂) = Σ_a P_a Π_ℓ exp[−((x_ℓ+q_ℓa)/σ_ℓ)²] with
/// widths shared across components. Amplitudes are used exactly as
/// stored; call [`GaussianSuperposition::normalized`] for a unit-trace
/// density.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSuperposition {
    pub components: Vec<GaussianComponent>,
    pub sigma_1: f64,
    pub sigma_2: f64,
}

impl GaussianSuperposition {
    pub fn new(
        components: Vec<GaussianComponent>,
        sigma_1: f64,
        sigma_2: f64,
    ) -> Result<Self, PropagatorError> {
        if components.is_empty() {
            return Err(PropagatorError::State("no components".into()));
        }
        if !(sigma_1 > 0.0 && sigma_2 > 0.0) || !sigma_1.is_finite() || !sigma_2.is_finite() {
            return Err(PropagatorError::State(format!(
                "widths must be positive, got ({sigma_1}, {sigma_2})"
            )));
        }
        let state = Self {
            components,
            sigma_1,
            sigma_2,
        };
        // Normalizability: the overlap Gram matrix must be positive
        // definite.
        let n = state.components.len();
        let gram = nalgebra::DMatrix::<f64>::from_fn(n, n, |a, b| state.overlap(a, b));
        let eig = gram.symmetric_eigenvalues();
        if eig.iter().any(|&e| e <= 0.0) {
            return Err(PropagatorError::State(
                "component overlap matrix is not positive definite".into(),
            ));
        }
        Ok(state)
    }

    fn sigma(&self, l: usize) -> f64 {
        if l == 0 {
            self.sigma_1
        } else {
            self.sigma_2
        }
    }

    /// ⟨φ_a|φ_b⟩ for the bare (amplitude-free) components.
    fn overlap(&self, a: usize, b: usize) -> f64 {
        let mut acc = 1.0;
        for l in 0..2 {
            let s = self.sigma(l);
            let qd = self.components[a].q(l) - self.components[b].q(l);
            acc *= s * (std::f64::consts::PI / 2.0).sqrt() * (-qd * qd / (2.0 * s * s)).exp();
        }
        acc
    }

    /// ⟨Ψ|Ψ⟩ including inter-component overlaps.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for (a, ca) in self.components.iter().enumerate() {
            for (b, cb) in self.components.iter().enumerate() {
                acc += (ca.amplitude.conj() * cb.amplitude).re * self.overlap(a, b);
            }
        }
        acc
    }

    /// Same state with amplitudes scaled to unit norm (unit density
    /// trace).
    pub fn normalized(&self) -> Self {
        let scale = 1.0 / self.norm_sqr().sqrt();
        let mut s = self.clone();
        for c in &mut s.components {
            c.amplitude *= scale;
        }
        s
    }
}

/// ρ(R₁, r₁, R₂, r₂, 0) by the direct component-pair sum
/// Σ_ab P_a P̄_b Π_ℓ exp[−((q_ℓa−q_ℓb+r_ℓ)² + (q_ℓa+q_ℓb+2R_ℓ)²)/(2σ_ℓ²)].
pub fn initial_density_position(
    state: &GaussianSuperposition,
    big_r1: f64,
    r1: f64,
    big_r2: f64,
    r2: f64,
) -> C64 {
    let big_r = [big_r1, big_r2];
    let r = [r1, r2];
    let mut acc = C64::new(0.0, 0.0);
    for ca in &state.components {
        for cb in &state.components {
            let mut expo = 0.0;
            for l in 0..2 {
                let s2 = state.sigma(l) * state.sigma(l);
                let qd = ca.q(l) - cb.q(l);
                let qs = ca.q(l) + cb.q(l);
                expo -= ((qd + r[l]).powi(2) + (qs + 2.0 * big_r[l]).powi(2)) / (2.0 * s2);
            }
            acc += ca.amplitude * cb.amplitude.conj() * expo.exp();
        }
    }
    acc
}

/// ρ̃(K₁, r₁, K₂, r₂, 0): the partial Fourier transform of the above,
/// (σ₁σ₂/4) Σ_ab P_a P̄_b Π_ℓ exp[−σ_ℓ²K_ℓ²/8 + i(q_ℓa+q_ℓb)K_ℓ/2
/// − (q_ℓa−q_ℓb+r_ℓ)²/(2σ_ℓ²)].
pub fn initial_density_fourier(
    state: &GaussianSuperposition,
    k1: f64,
    r1: f64,
    k2: f64,
    r2: f64,
) -> C64 {
    let k = [k1, k2];
    let r = [r1, r2];
    let prefactor = state.sigma_1 * state.sigma_2 / 4.0;
    let mut acc = C64::new(0.0, 0.0);
    for ca in &state.components {
        for cb in &state.components {
            let mut expo = C64::new(0.0, 0.0);
            for l in 0..2 {
                let s = state.sigma(l);
                let qd = ca.q(l) - cb.q(l);
                let qs = ca.q(l) + cb.q(l);
                expo += C64::new(
                    -s * s * k[l] * k[l] / 8.0 - (qd + r[l]).powi(2) / (2.0 * s * s),
                    qs * k[l] / 2.0,
                );
            }
            acc += ca.amplitude * cb.amplitude.conj() * expo.exp() * prefactor;
        }
    }
    acc
}

#[derive(Debug, Clone)]
struct PairSeed {
    indices: (usize, usize),
    /// ¼ P_a P̄_b σ₁ σ₂.
    amp: C64,
    /// Initial linear coefficient over v.
    ell0: CVector4,
    /// Constant Σ_ℓ (q_ℓa − q_ℓb)²/(2σ_ℓ²); time-independent.
    c0: f64,
}

/// Prefactored evolution engine for one (model, state) pair. Evaluation
/// at any number of times is independent and freely parallel.
#[derive(Debug, Clone)]
pub struct Propagator {
    sys: DriftSystem,
    spec: Spectrum,
    state: GaussianSuperposition,
    c_form: CMatrix4,
    seeds: Vec<PairSeed>,
}

impl Propagator {
    pub fn new(
        model: &ValidatedModel,
        state: &GaussianSuperposition,
    ) -> Result<Self, PropagatorError> {
        let sys = master_eq::build_drift_system(model.params())?;
        let spec = spectral::eigendecompose(&sys.advection());
        let s1 = state.sigma_1;
        let s2 = state.sigma_2;
        let c_form = CMatrix4::from_diagonal(&CVector4::new(
            C64::new(1.0 / (2.0 * s1 * s1), 0.0),
            C64::new(s1 * s1 / 8.0, 0.0),
            C64::new(1.0 / (2.0 * s2 * s2), 0.0),
            C64::new(s2 * s2 / 8.0, 0.0),
        ));
        let mut seeds = Vec::new();
        for (a, ca) in state.components.iter().enumerate() {
            for (b, cb) in state.components.iter().enumerate() {
                let mut c0 = 0.0;
                let mut ell0 = CVector4::zeros();
                for l in 0..2 {
                    let s = state.sigma(l);
                    let qd = ca.q(l) - cb.q(l);
                    let qs = ca.q(l) + cb.q(l);
                    c0 += qd * qd / (2.0 * s * s);
                    ell0[2 * l] = C64::new(qd / (s * s), 0.0);
                    ell0[2 * l + 1] = C64::new(0.0, -qs / 2.0);
                }
                seeds.push(PairSeed {
                    indices: (a, b),
                    amp: ca.amplitude * cb.amplitude.conj() * (s1 * s2 / 4.0),
                    ell0,
                    c0,
                });
            }
        }
        Ok(Self {
            sys,
            spec,
            state: state.clone(),
            c_form,
            seeds,
        })
    }

    pub fn drift_system(&self) -> &DriftSystem {
        &self.sys
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spec
    }

    pub fn state(&self) -> &GaussianSuperposition {
        &self.state
    }

    /// Evolved quadratic form at time t.
    pub fn form_at(&self, t: f64) -> Result<EvolvedGaussianForm, PropagatorError> {
        let (g, zf) = if t == 0.0 {
            (Matrix4::identity(), CMatrix4::zeros())
        } else {
            (
                self.spec.flow(-t),
                spectral::z_quadratic_form(&self.spec, &self.sys.diffusion, t),
            )
        };
        let gc = CMatrix4::from_fn(|r, c| C64::new(g[(r, c)], 0.0));
        let mut q = gc.transpose() * self.c_form * gc + zf;
        q = (q + q.transpose()) * C64::new(0.5, 0.0);

        let k_idx = [1usize, 3];
        let r_idx = [0usize, 2];
        let a = CMatrix2::from_fn(|i, j| q[(k_idx[i], k_idx[j])]);
        let q_rr = CMatrix2::from_fn(|i, j| q[(r_idx[i], r_idx[j])]);
        let b_r = CMatrix2::from_fn(|i, j| q[(k_idx[i], r_idx[j])] * 2.0);

        // Integrability: Re(a) must be positive definite.
        let re_a = Matrix2::new(a[(0, 0)].re, a[(0, 1)].re, a[(1, 0)].re, a[(1, 1)].re);
        if !(re_a[(0, 0)] > 0.0 && re_a.determinant() > 0.0) {
            return Err(PropagatorError::NonIntegrableForm { t });
        }
        let det_a = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let a_inv = CMatrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)]) / det_a;
        // Branch-safe √det(a): product of principal roots of the two
        // eigenvalues, which stay in the right half plane while Re(a) ≻ 0.
        let tr = a[(0, 0)] + a[(1, 1)];
        let disc = (tr * tr - det_a * 4.0).sqrt();
        let sqrt_det_a = ((tr + disc) * 0.5).sqrt() * ((tr - disc) * 0.5).sqrt();

        let pairs = self
            .seeds
            .iter()
            .map(|seed| {
                let ell = gc.transpose() * seed.ell0;
                PairTerm {
                    indices: seed.indices,
                    amp: seed.amp,
                    upsilon: seed.amp * (-seed.c0).exp(),
                    c0: seed.c0,
                    theta: std::array::from_fn(|k| ell[k].re),
                    theta_tilde: std::array::from_fn(|k| -ell[k].im),
                    ell,
                }
            })
            .collect();

        Ok(EvolvedGaussianForm {
            t,
            q,
            a_inv,
            sqrt_det_a,
            b_r,
            q_rr,
            pairs,
        })
    }
}

/// One evolved component pair: weight, decay offsets θ and phase offsets
/// θ̃ of the linear part exp(−ℓᵀv) = exp(−θᵀv + iθ̃ᵀv).
#[derive(Debug, Clone)]
pub struct PairTerm {
    pub indices: (usize, usize),
    /// Pair weight ¼ P_a P̄_b σ₁σ₂ exp[−½Σ_ℓ((q_ℓa−q_ℓb)/σ_ℓ)²].
    pub upsilon: C64,
    pub amp: C64,
    pub c0: f64,
    pub theta: [f64; 4],
    pub theta_tilde: [f64; 4],
    ell: CVector4,
}

/// Named quadratic coefficients over (r₁, K₁, r₂, K₂), following the
/// Φ_kk' convention in which off-diagonal labels carry the full cross
/// coefficient (Φ_kk' = 2 Q_kk' for k ≠ k').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiCoefficients {
    pub phi_11: f64,
    pub phi_22: f64,
    pub phi_33: f64,
    pub phi_44: f64,
    pub phi_12: f64,
    pub phi_13: f64,
    pub phi_14: f64,
    pub phi_23: f64,
    pub phi_24: f64,
    pub phi_34: f64,
    /// Largest imaginary residue among the coefficients; analytically
    /// zero, nonzero only through roundoff.
    pub imag_residue: f64,
}

/// Peak widths extracted from the evolved quadratic form. Cross entries
/// with coefficients below the absent-coupling tolerance are exactly 0;
/// otherwise they carry the coupling sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakWidths {
    /// Σ(t) = √(4Φ₂₂Φ₄₄ − Φ₂₄²), the normalization width.
    pub sigma_t: f64,
    /// Collective-coordinate widths Σ_ℓℓ'(t).
    pub collective: [[f64; 2]; 2],
    /// Relative-coordinate widths σ_ℓℓ'(t); σ_ℓℓ(0) = σ_ℓ.
    pub relative: [[f64; 2]; 2],
}

/// The density matrix at one time, as exact Gaussian data.
#[derive(Debug, Clone)]
pub struct EvolvedGaussianForm {
    pub t: f64,
    q: CMatrix4,
    a_inv: CMatrix2,
    sqrt_det_a: C64,
    b_r: CMatrix2,
    q_rr: CMatrix2,
    pub pairs: Vec<PairTerm>,
}

impl EvolvedGaussianForm {
    /// Full quadratic form Q(t) (complex; imaginary parts are roundoff).
    pub fn q_form(&self) -> &CMatrix4 {
        &self.q
    }

    pub fn phi(&self) -> PhiCoefficients {
        let q = &self.q;
        let imag_residue = q.iter().map(|z| z.im.abs()).fold(0.0_f64, f64::max);
        PhiCoefficients {
            phi_11: q[(0, 0)].re,
            phi_22: q[(1, 1)].re,
            phi_33: q[(2, 2)].re,
            phi_44: q[(3, 3)].re,
            phi_12: 2.0 * q[(0, 1)].re,
            phi_13: 2.0 * q[(0, 2)].re,
            phi_14: 2.0 * q[(0, 3)].re,
            phi_23: 2.0 * q[(1, 2)].re,
            phi_24: 2.0 * q[(1, 3)].re,
            phi_34: 2.0 * q[(2, 3)].re,
            imag_residue,
        }
    }

    /// ρ̃(K₁, r₁, K₂, r₂, t).
    pub fn fourier_value(&self, k1: f64, r1: f64, k2: f64, r2: f64) -> C64 {
        let v = CVector4::new(
            C64::new(r1, 0.0),
            C64::new(k1, 0.0),
            C64::new(r2, 0.0),
            C64::new(k2, 0.0),
        );
        let quad = (v.transpose() * self.q * v)[(0, 0)];
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.pairs {
            let lin = (p.ell.transpose() * v)[(0, 0)];
            acc += p.amp * (-quad - lin - p.c0).exp();
        }
        acc
    }

    /// Exponent E_ab(u) of one pair term in position space,
    /// u = (R₁, r₁, R₂, r₂); the term value is
    /// amp/(2√det a) · exp(E_ab(u)).
    fn pair_exponent(&self, pair: &PairTerm, u: &Vector4<f64>) -> C64 {
        let r = CVector2::new(C64::new(u[1], 0.0), C64::new(u[3], 0.0));
        let b = self.b_r * r + CVector2::new(pair.ell[1], pair.ell[3]);
        let w = CVector2::new(C64::new(0.0, u[0]) - b[0], C64::new(0.0, u[2]) - b[1]);
        let quad_k = (w.transpose() * self.a_inv * w)[(0, 0)] * 0.25;
        let c_r = (r.transpose() * self.q_rr * r)[(0, 0)]
            + pair.ell[0] * r[0]
            + pair.ell[2] * r[1]
            + pair.c0;
        quad_k - c_r
    }

    /// ρ(R₁, r₁, R₂, r₂, t) by the analytic inverse Fourier transform.
    pub fn position_value(&self, big_r1: f64, r1: f64, big_r2: f64, r2: f64) -> C64 {
        let u = Vector4::new(big_r1, r1, big_r2, r2);
        let prefactor = (self.sqrt_det_a * 2.0).finv();
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.pairs {
            acc += p.amp * prefactor * self.pair_exponent(p, &u).exp();
        }
        acc
    }

    /// Stationary point of Re E_ab over (R₁, r₁, R₂, r₂) and the full
    /// log-modulus of the pair term there (prefactors included).
    pub fn pair_peak(&self, idx: usize) -> (Vector4<f64>, f64) {
        let pair = &self.pairs[idx];
        let f = |u: &Vector4<f64>| self.pair_exponent(pair, u).re;
        // Exact quadratic: reconstruct Hessian and gradient from finite
        // evaluations with unit step.
        let zero = Vector4::zeros();
        let e0 = f(&zero);
        let mut grad = Vector4::zeros();
        let mut hess = Matrix4::zeros();
        let mut plus = [0.0_f64; 4];
        for i in 0..4 {
            let mut up = zero;
            up[i] = 1.0;
            let mut dn = zero;
            dn[i] = -1.0;
            let (ep, em) = (f(&up), f(&dn));
            plus[i] = ep;
            grad[i] = (ep - em) / 2.0;
            hess[(i, i)] = ep + em - 2.0 * e0;
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mut uu = zero;
                uu[i] = 1.0;
                uu[j] = 1.0;
                let mixed = f(&uu) - plus[i] - plus[j] + e0;
                hess[(i, j)] = mixed;
                hess[(j, i)] = mixed;
            }
        }
        let peak = hess
            .lu()
            .solve(&(-grad))
            .unwrap_or_else(Vector4::zeros);
        let log_mod = (pair.amp / (self.sqrt_det_a * 2.0)).norm().ln() + f(&peak);
        (peak, log_mod)
    }

    /// Reduced density of one oscillator (1 or 2): the other oscillator's
    /// diagonal is integrated out analytically (r_other = 0, R_other over
    /// the real line).
    pub fn marginal(&self, which: usize, big_r: f64, r: f64) -> C64 {
        assert!(which == 1 || which == 2, "oscillator index must be 1 or 2");
        let own = which - 1;
        let other = 1 - own;
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.pairs {
            let at = |x: f64| {
                let mut u = Vector4::zeros();
                u[2 * own] = big_r;
                u[2 * own + 1] = r;
                u[2 * other] = x;
                self.pair_exponent(p, &u)
            };
            // E(x) is an exact quadratic in the integrated coordinate.
            let e0 = at(0.0);
            let (ep, em) = (at(1.0), at(-1.0));
            let c2 = (ep + em) * 0.5 - e0;
            let c1 = (ep - em) * 0.5;
            // ∫ exp(c2 x² + c1 x + c0) dx, convergent for Re(c2) < 0.
            let integral = (std::f64::consts::PI / -c2).sqrt() * (e0 - c1 * c1 / (4.0 * c2)).exp();
            acc += p.amp / (self.sqrt_det_a * 2.0) * integral;
        }
        acc
    }

    /// ∫ marginal(R, 0) dR; equals the full trace.
    pub fn marginal_trace(&self, which: usize) -> C64 {
        assert!(which == 1 || which == 2);
        let own = which - 1;
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.pairs {
            let at = |x: f64, y: f64| {
                let mut u = Vector4::zeros();
                u[2 * own] = x;
                u[2 * (1 - own)] = y;
                self.pair_exponent(p, &u)
            };
            acc += p.amp / (self.sqrt_det_a * 2.0) * gaussian_integral_2d(&at);
        }
        acc
    }

    /// ∫∫ ρ(R₁, 0, R₂, 0) dR₁ dR₂ by the analytic 2D Gaussian integral of
    /// each evolved pair term.
    pub fn total_trace(&self) -> C64 {
        self.marginal_trace(1)
    }

    /// Widths of the evolved Gaussian peaks, from the quadratic form.
    pub fn widths(&self) -> PeakWidths {
        let phi = self.phi();
        let sigma_sq = 4.0 * phi.phi_22 * phi.phi_44 - phi.phi_24 * phi.phi_24;
        let sigma_t = sigma_sq.max(0.0).sqrt();
        let cross_width = |coeff: f64, sigma_sq: f64| -> f64 {
            if coeff.abs() < ABSENT_COUPLING_TOL {
                0.0
            } else {
                coeff.signum() * (2.0 * sigma_sq / coeff.abs()).sqrt()
            }
        };
        let collective = [
            [
                (2.0 * sigma_sq / phi.phi_44).sqrt(),
                cross_width(phi.phi_24, sigma_sq),
            ],
            [
                cross_width(phi.phi_24, sigma_sq),
                (2.0 * sigma_sq / phi.phi_22).sqrt(),
            ],
        ];
        // Relative-coordinate decay form X = Re(Q_rr − ¼ B̃ᵀ a⁻¹ B̃): the
        // r-quadratic of the position-space exponent.
        let x_form = {
            let correction = self.b_r.transpose() * self.a_inv * self.b_r * C64::new(0.25, 0.0);
            let x = self.q_rr - correction;
            Matrix2::new(x[(0, 0)].re, x[(0, 1)].re, x[(1, 0)].re, x[(1, 1)].re)
        };
        let rel_cross = if x_form[(0, 1)].abs() < ABSENT_COUPLING_TOL {
            0.0
        } else {
            x_form[(0, 1)].signum() * 0.5 / x_form[(0, 1)].abs().sqrt()
        };
        let relative = [
            [1.0 / (2.0 * x_form[(0, 0)]).sqrt(), rel_cross],
            [rel_cross, 1.0 / (2.0 * x_form[(1, 1)]).sqrt()],
        ];
        PeakWidths {
            sigma_t,
            collective,
            relative,
        }
    }

    /// The relative-coordinate decay matrix X (see `widths`), exposed for
    /// audits.
    pub fn relative_decay_form(&self) -> Matrix2<f64> {
        let correction = self.b_r.transpose() * self.a_inv * self.b_r * C64::new(0.25, 0.0);
        let x = self.q_rr - correction;
        Matrix2::new(x[(0, 0)].re, x[(0, 1)].re, x[(1, 0)].re, x[(1, 1)].re)
    }
}

/// ∫∫ exp(E(x, y)) dx dy for an exact complex quadratic E, reconstructed
/// from six evaluations. Convergence requires the negated quadratic part
/// to have positive-definite real part.
fn gaussian_integral_2d(e: &dyn Fn(f64, f64) -> C64) -> C64 {
    let e00 = e(0.0, 0.0);
    let (exp_, exm) = (e(1.0, 0.0), e(-1.0, 0.0));
    let (eyp, eym) = (e(0.0, 1.0), e(0.0, -1.0));
    let exy = e(1.0, 1.0);
    // E = −xᵀPx + qᵀx + s.
    let p00 = -((exp_ + exm) * 0.5 - e00);
    let p11 = -((eyp + eym) * 0.5 - e00);
    let p01 = -(exy - exp_ - eyp + e00) * 0.5;
    let q0 = (exp_ - exm) * 0.5;
    let q1 = (eyp - eym) * 0.5;
    let det = p00 * p11 - p01 * p01;
    // ¼ qᵀ P⁻¹ q with the 2×2 adjugate.
    let quarter = (q0 * (p11 * q0 - p01 * q1) + q1 * (p00 * q1 - p01 * q0)) / (det * 4.0);
    let tr = p00 + p11;
    let disc = (tr * tr - det * 4.0).sqrt();
    let sqrt_det = ((tr + disc) * 0.5).sqrt() * ((tr - disc) * 0.5).sqrt();
    C64::new(std::f64::consts::PI, 0.0) / sqrt_det * (quarter + e00).exp()
}

/// Convenience single-shot wrappers over [`Propagator`].
pub fn evolve_fourier(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
    k1: f64,
    r1: f64,
    k2: f64,
    r2: f64,
) -> Result<C64, PropagatorError> {
    Ok(Propagator::new(model, state)?.form_at(t)?.fourier_value(k1, r1, k2, r2))
}

pub fn evolve_position(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
    big_r1: f64,
    r1: f64,
    big_r2: f64,
    r2: f64,
) -> Result<C64, PropagatorError> {
    Ok(Propagator::new(model, state)?
        .form_at(t)?
        .position_value(big_r1, r1, big_r2, r2))
}

pub fn gaussian_coefficients(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
) -> Result<EvolvedGaussianForm, PropagatorError> {
    Propagator::new(model, state)?.form_at(t)
}

pub fn peak_widths(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
) -> Result<PeakWidths, PropagatorError> {
    Ok(gaussian_coefficients(model, state, t)?.widths())
}

pub fn marginal_density(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
    which: usize,
    big_r: f64,
    r: f64,
) -> Result<C64, PropagatorError> {
    Ok(Propagator::new(model, state)?.form_at(t)?.marginal(which, big_r, r))
}

/// Comparison of the evolved coefficients against the expanded
/// closed-form coefficient expressions (audit only; the authoritative
/// path is the quadratic-form algebra above).
///
/// The expanded linear coefficients match the authoritative ones except
/// for a K-parity sign convention, so their componentwise magnitudes
/// must agree exactly. The expanded quadratic form carries an
/// undefined ζ_ij symbol (reconstructed here as
/// N_ij/(ħ²(Λ_i+Λ_j)) with decay exponent (Λ_i+Λ_j)t, the only form
/// consistent with the diffusion exponent) plus sign defects in its
/// cross terms; its disagreement is recorded, never adopted.
#[derive(Debug, Clone, Copy)]
pub struct FormAudit {
    /// max over pairs/components of ||θ|_auth − |θ|_expansion|.
    pub theta_magnitude_delta: f64,
    pub theta_tilde_magnitude_delta: f64,
    /// max over the four diagonal Φ_kk of |Φ_auth − Φ_expansion|.
    pub phi_diag_delta: f64,
    /// max over the six cross Φ_kk' of |Φ_auth − Φ_expansion|.
    pub phi_cross_delta: f64,
    /// Every compared quantity agreed to 1e-9; false flags the
    /// expansion's known defects.
    pub expansion_matches: bool,
}

/// Evaluates the expanded coefficient expressions with the drift
/// matrix's own eigenbasis and compares them with the authoritative
/// evolved form.
pub fn form_audit(prop: &Propagator, t: f64) -> Result<FormAudit, PropagatorError> {
    let form = prop.form_at(t)?;
    let spec_m = spectral::eigendecompose(&prop.sys.m);
    let lam = spec_m.lambdas;
    let eta = spec_m.eta;
    let eps = spec_m.epsilon;
    let state = &prop.state;
    let (s1, s2) = (state.sigma_1, state.sigma_2);
    let (d_1, d_2) = (
        prop.sys.coefficients.d_1,
        prop.sys.coefficients.d_2,
    );

    // Expanded linear coefficients:
    //   θ^(k)  = Σ_j (qd₁/σ₁² η_1j + qd₂/σ₂² η_3j) ε_jk e^{−Λ_j t},
    //   θ̃^(k) = Σ_j (qs₁/2 η_2j + qs₂/2 η_4j) ε_jk e^{−Λ_j t}.
    let mut theta_delta = 0.0_f64;
    let mut theta_tilde_delta = 0.0_f64;
    for (idx, pair) in form.pairs.iter().enumerate() {
        let seed = &prop.seeds[idx];
        let (a, b) = seed.indices;
        let (ca, cb) = (&state.components[a], &state.components[b]);
        let qd = [ca.q_1 - cb.q_1, ca.q_2 - cb.q_2];
        let qs = [ca.q_1 + cb.q_1, ca.q_2 + cb.q_2];
        for k in 0..4 {
            let mut th = C64::new(0.0, 0.0);
            let mut tt = C64::new(0.0, 0.0);
            for j in 0..4 {
                let decay = (-lam[j] * t).exp() * eps[(j, k)];
                th += (eta[(0, j)] * qd[0] / (s1 * s1) + eta[(2, j)] * qd[1] / (s2 * s2)) * decay;
                tt += (eta[(1, j)] * qs[0] / 2.0 + eta[(3, j)] * qs[1] / 2.0) * decay;
            }
            theta_delta = theta_delta.max((pair.theta[k].abs() - th.re.abs()).abs());
            theta_tilde_delta =
                theta_tilde_delta.max((pair.theta_tilde[k].abs() - tt.re.abs()).abs());
        }
    }

    // Expanded quadratic coefficients with the ζ reconstruction.
    let bracket = |i: usize, j: usize| -> C64 {
        eta[(0, i)] * eta[(0, j)] / (s1 * s1)
            + eta[(1, i)] * eta[(1, j)] * (s1 * s1 / 4.0)
            + eta[(2, i)] * eta[(2, j)] / (s2 * s2)
            + eta[(3, i)] * eta[(3, j)] * (s2 * s2 / 4.0)
    };
    let zeta_term = |i: usize, j: usize| -> C64 {
        let n = eta[(0, i)] * eta[(0, j)] * d_1 + eta[(2, i)] * eta[(2, j)] * d_2;
        let s = lam[i] + lam[j];
        if s.norm() < spectral::RESONANT_TOL {
            n * 2.0 * t
        } else {
            n * 2.0 * (C64::new(1.0, 0.0) - (-s * t).exp()) / s
        }
    };
    let expansion_phi = |k: usize, kp: usize| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in i..4 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let halve = if i == j { 0.5 } else { 1.0 };
                let body = bracket(i, j) * (-(lam[i] + lam[j]) * t).exp() + zeta_term(i, j);
                let anti = if k == kp {
                    eps[(i, k)] * eps[(j, k)]
                } else {
                    eps[(i, k)] * eps[(j, kp)] - eps[(i, kp)] * eps[(j, k)]
                };
                acc += body * anti * (sign * halve);
            }
        }
        acc.re
    };
    let phi = form.phi();
    let auth_diag = [phi.phi_11, phi.phi_22, phi.phi_33, phi.phi_44];
    let mut phi_diag_delta = 0.0_f64;
    for (k, auth) in auth_diag.iter().enumerate() {
        phi_diag_delta = phi_diag_delta.max((auth - expansion_phi(k, k)).abs());
    }
    let cross = [
        (0, 1, phi.phi_12),
        (0, 2, phi.phi_13),
        (0, 3, phi.phi_14),
        (1, 2, phi.phi_23),
        (1, 3, phi.phi_24),
        (2, 3, phi.phi_34),
    ];
    let mut phi_cross_delta = 0.0_f64;
    for (k, kp, auth) in cross {
        phi_cross_delta = phi_cross_delta.max((auth - expansion_phi(k, kp)).abs());
    }
    let expansion_matches = theta_delta <= 1e-9
        && theta_tilde_delta <= 1e-9
        && phi_diag_delta <= 1e-9
        && phi_cross_delta <= 1e-9;
    Ok(FormAudit {
        theta_magnitude_delta: theta_delta,
        theta_tilde_magnitude_delta: theta_tilde_delta,
        phi_diag_delta,
        phi_cross_delta,
        expansion_matches,
    })
}

/// Evaluation domain of a grid: position coordinates (R₁, r₁, R₂, r₂) or
/// Fourier coordinates (K₁, r₁, K₂, r₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDomain {
    Position,
    Fourier,
}

/// Two free axes over a 4-coordinate point; the other two coordinates
/// stay fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub domain: GridDomain,
    /// Indices (0..4) of the two free coordinates, in the domain's
    /// coordinate order.
    pub free: (usize, usize),
    pub fixed: [f64; 4],
    pub ranges: [(f64, f64); 2],
    pub counts: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub coords: [f64; 4],
    pub value: C64,
}

/// Dense row-major evaluation over a 2-axis grid; deterministic order
/// regardless of the parallel schedule.
pub fn grid_eval(
    model: &ValidatedModel,
    state: &GaussianSuperposition,
    t: f64,
    spec: &GridSpec,
) -> Result<Vec<DensitySample>, PropagatorError> {
    let (n1, n2) = spec.counts;
    let points = n1.saturating_mul(n2);
    if points > MAX_GRID_POINTS {
        return Err(PropagatorError::GridTooLarge { points });
    }
    if n1 == 0 || n2 == 0 {
        return Ok(Vec::new());
    }
    assert!(spec.free.0 < 4 && spec.free.1 < 4 && spec.free.0 != spec.free.1);
    let form = Propagator::new(model, state)?.form_at(t)?;
    let coord = |range: (f64, f64), count: usize, i: usize| -> f64 {
        if count == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64
        }
    };
    let samples: Vec<DensitySample> = (0..points)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n2, idx % n2);
            let mut c = spec.fixed;
            c[spec.free.0] = coord(spec.ranges[0], n1, i);
            c[spec.free.1] = coord(spec.ranges[1], n2, j);
            let value = match spec.domain {
                GridDomain::Position => form.position_value(c[0], c[1], c[2], c[3]),
                GridDomain::Fourier => form.fourier_value(c[0], c[1], c[2], c[3]),
            };
            DensitySample { coords: c, value }
        })
        .collect();
    Ok(samples)
}
