//! Characteristics solver: eigendecomposition of the 4×4 drift matrix,
//! propagation of characteristic curves and the closed-form diffusion
//! exponent
//!
//!   Z(t) = Σ_{m,n} c_m(t) c_n(t) N_{mn} (1 − e^{−(Λ_m+Λ_n)t})/(Λ_m+Λ_n),
//!
//! where c(t) are the eigenbasis coordinates of the evaluation point,
//! N_{mn} = Σ_{ij} D_{ij} η_{2i-1,m} η_{2j-1,n} contracts the diffusion
//! form with the r-rows of the eigenvector matrix, and resonant pairs
//! Λ_m + Λ_n → 0 take the analytic limit c_m c_n N_{mn} t.
//!
//! Near-defective matrices fall back to the scaling-and-squaring matrix
//! exponential and to quadrature of the diffusion integral.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::linalg::{self, CMatrix4, CVector4};

/// Absolute tolerance on |Λ_m + Λ_n| below which the analytic resonant
/// limit is substituted.
pub const RESONANT_TOL: f64 = 1e-12;

/// Eigenvector-matrix condition number above which the spectrum is
/// flagged defective.
pub const DEFECTIVE_COND: f64 = 1e8;

const RESIDUAL_TOL: f64 = 1e-9;

/// Eigenvalues Λ_m, eigenvector matrix η (columns), its inverse ε and
/// defectiveness diagnostics for one drift matrix. Immutable; evaluation
/// at many times is freely data-parallel.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub lambdas: [C64; 4],
    /// Columns are eigenvectors: M η = η diag(Λ) when not defective.
    pub eta: CMatrix4,
    /// Inverse of η.
    pub epsilon: CMatrix4,
    /// Frobenius-based estimate ‖η‖_F ‖η⁻¹‖_F.
    pub condition_number: f64,
    /// Set when the eigenbasis is unusable; consumers switch to the
    /// matrix-exponential and quadrature fallbacks.
    pub defective: bool,
    m: Matrix4<f64>,
}

fn frobenius_c(m: &CMatrix4) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a real 4×4 matrix with deterministic ordering
/// (descending real part, then descending imaginary part) and
/// deterministic eigenvector normalization. Never errors: defectiveness
/// is flagged and handled downstream.
pub fn eigendecompose(m: &Matrix4<f64>) -> Spectrum {
    if linalg::norm_inf(m) == 0.0 {
        // The all-zero matrix carries no eigenbasis ordering; route every
        // consumer through the exponential/quadrature fallbacks.
        return Spectrum {
            lambdas: [C64::new(0.0, 0.0); 4],
            eta: CMatrix4::identity(),
            epsilon: CMatrix4::identity(),
            condition_number: 1.0,
            defective: true,
            m: *m,
        };
    }
    let scale = linalg::norm_inf(m).max(1e-300);
    let eig = m.complex_eigenvalues();
    let mut lambdas: Vec<C64> = eig.iter().copied().collect();
    lambdas.sort_by(|a, b| {
        (b.re, b.im)
            .partial_cmp(&(a.re, a.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Cluster equal eigenvalues so repeated roots get a full null basis.
    let cluster_tol = 1e-7 * scale.max(1.0);
    let mc = CMatrix4::from_fn(|r, c| C64::new(m[(r, c)], 0.0));
    let mut columns: Vec<CVector4> = Vec::with_capacity(4);
    let mut defective = false;
    let mut idx = 0;
    while idx < lambdas.len() {
        let mut count = 1;
        while idx + count < lambdas.len()
            && (lambdas[idx + count] - lambdas[idx]).norm() <= cluster_tol
        {
            count += 1;
        }
        let center = lambdas[idx..idx + count]
            .iter()
            .sum::<C64>()
            / count as f64;
        let shifted = mc - CMatrix4::identity() * center;
        let basis = linalg::null_space(&shifted, 1e-10);
        for k in 0..count {
            match basis.get(k) {
                Some(v) => columns.push(*v),
                None => {
                    defective = true;
                    columns.push(CVector4::ith(columns.len() % 4, C64::new(1.0, 0.0)));
                }
            }
        }
        idx += count;
    }

    let mut eta = CMatrix4::zeros();
    for (k, v) in columns.iter().enumerate() {
        eta.set_column(k, v);
    }
    let lam = [lambdas[0], lambdas[1], lambdas[2], lambdas[3]];

    let (epsilon, condition_number) = match eta.try_inverse() {
        Some(inv) => {
            let cond = frobenius_c(&eta) * frobenius_c(&inv);
            (inv, cond)
        }
        None => (CMatrix4::identity(), f64::INFINITY),
    };

    let mut residual = mc * eta;
    for (c, lam_c) in lam.iter().enumerate() {
        let col = residual.column(c) - eta.column(c) * *lam_c;
        residual.set_column(c, &col);
    }
    let rel_residual = frobenius_c(&residual) / scale;

    let defective = defective
        || condition_number > DEFECTIVE_COND
        || rel_residual > RESIDUAL_TOL;
    Spectrum {
        lambdas: lam,
        eta,
        epsilon,
        condition_number,
        defective,
        m: *m,
    }
}

impl Spectrum {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// exp(M t) through the eigenbasis, or by scaling and squaring when
    /// defective. The result of the eigenbasis route is real up to
    /// roundoff; the real part is returned.
    pub fn flow(&self, t: f64) -> Matrix4<f64> {
        if self.defective {
            return linalg::expm(&(self.m * t));
        }
        let mut d = CMatrix4::zeros();
        for k in 0..4 {
            d[(k, k)] = (self.lambdas[k] * t).exp();
        }
        let g = self.eta * d * self.epsilon;
        Matrix4::from_fn(|r, c| g[(r, c)].re)
    }
}

/// Solution of dv/dt = M v with v(0) = v0, evaluated at t (positive or
/// negative).
pub fn propagate_characteristics(s: &Spectrum, v0: &Vector4<f64>, t: f64) -> Vector4<f64> {
    s.flow(t) * v0
}

/// (e^x − 1)/x with a series branch for small |x|.
fn em1_over(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        C64::new(1.0, 0.0) + x / 2.0 + x * x / 6.0 + x * x * x / 24.0
    } else {
        (x.exp() - C64::new(1.0, 0.0)) / x
    }
}

/// Diffusion numerator N_{mn} contracting the 2×2 form over (r₁, r₂)
/// with the r-rows (rows 0 and 2) of η. A diagonal form diag(D₁, D₂)
/// gives D₁η₁ₘη₁ₙ + D₂η₃ₘη₃ₙ; the common-reservoir form D·[[1, 1], [1, 1]]
/// gives D(η₁ₘ+η₃ₘ)(η₁ₙ+η₃ₙ).
fn numerator(eta: &CMatrix4, diffusion: &Matrix2<f64>, m: usize, n: usize) -> C64 {
    let rows = [0usize, 2];
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += eta[(rows[i], m)] * eta[(rows[j], n)] * diffusion[(i, j)];
        }
    }
    acc
}

/// Closed-form diffusion exponent with initial eigencoordinates c(0).
#[derive(Debug, Clone, Copy)]
pub struct ZValue {
    pub value: C64,
    /// Number of (m, n) pairs that hit the resonant limit |Λ_m+Λ_n| <
    /// tolerance and used the analytic substitute c_m c_n N_{mn} t.
    pub resonant_pairs: usize,
}

/// Z along the characteristic defined by c(0) = c0:
/// Σ_{mn} c0_m c0_n N_{mn} (e^{(Λ_m+Λ_n)t} − 1)/(Λ_m + Λ_n). Equals the
/// quadrature of rᵀ D r along the forward characteristic v(τ) = η e^{Λτ} c0.
pub fn z_function(s: &Spectrum, diffusion: &Matrix2<f64>, c0: &CVector4, t: f64) -> ZValue {
    let mut value = C64::new(0.0, 0.0);
    let mut resonant = 0;
    for m in 0..4 {
        for n in 0..4 {
            let sum = s.lambdas[m] + s.lambdas[n];
            let nmn = numerator(&s.eta, diffusion, m, n);
            let factor = if sum.norm() < RESONANT_TOL {
                resonant += 1;
                C64::new(t, 0.0)
            } else {
                em1_over(sum * t) * t
            };
            value += c0[m] * c0[n] * nmn * factor;
        }
    }
    ZValue {
        value,
        resonant_pairs: resonant,
    }
}

/// Z as a quadratic form over the time-t point v, i.e. Z(v, t) = vᵀ Q v
/// with Q = εᵀ W ε and W_{mn} = N_{mn}(1 − e^{−(Λ_m+Λ_n)t})/(Λ_m+Λ_n).
/// Defective spectra integrate the matrix form by composite Simpson
/// quadrature along the matrix-exponential flow instead.
pub fn z_quadratic_form(s: &Spectrum, diffusion: &Matrix2<f64>, t: f64) -> CMatrix4 {
    if s.defective {
        return z_form_by_quadrature(s, diffusion, t);
    }
    let mut w = CMatrix4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let sum = s.lambdas[m] + s.lambdas[n];
            let factor = if sum.norm() < RESONANT_TOL {
                C64::new(t, 0.0)
            } else {
                em1_over(-sum * t) * t
            };
            w[(m, n)] = numerator(&s.eta, diffusion, m, n) * factor;
        }
    }
    s.epsilon.transpose() * w * s.epsilon
}

/// Simpson quadrature of ∫₀ᵗ G(τ−t)ᵀ P_rᵀ D P_r G(τ−t) dτ with
/// G = exp(M·). Used only in the defective regime.
fn z_form_by_quadrature(s: &Spectrum, diffusion: &Matrix2<f64>, t: f64) -> CMatrix4 {
    if t == 0.0 {
        return CMatrix4::zeros();
    }
    let mnorm = linalg::norm_inf(&s.m);
    let mut steps = ((10.0 * mnorm * t.abs()).ceil() as usize).max(100);
    if steps % 2 == 1 {
        steps += 1;
    }
    let h = t / steps as f64;
    // Projector onto (r₁, r₂) weighted by the diffusion form.
    let mut d4 = Matrix4::zeros();
    let rows = [0usize, 2];
    for i in 0..2 {
        for j in 0..2 {
            d4[(rows[i], rows[j])] = diffusion[(i, j)];
        }
    }
    let step = linalg::expm(&(s.m * h));
    let mut g = linalg::expm(&(s.m * -t));
    let mut acc = Matrix4::zeros();
    for k in 0..=steps {
        let weight = if k == 0 || k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += (g.transpose() * d4 * g) * weight;
        if k < steps {
            g = step * g;
        }
    }
    let real = acc * (h / 3.0);
    CMatrix4::from_fn(|r, c| C64::new(real[(r, c)], 0.0))
}
