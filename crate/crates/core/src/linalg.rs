//! Small dense linear-algebra helpers for the fixed 4×4 problems in this
//! crate: complex null spaces, inverses and the real matrix exponential by
//! scaling and squaring with a Padé 13 approximant.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix4 = Matrix4<C64>;
pub type CVector4 = Vector4<C64>;

/// Null-space basis of a complex 4×4 matrix by Gaussian elimination with
/// full pivoting. Columns whose pivot falls below `rank_tol` times the
/// largest entry are treated as free; one basis vector is returned per
/// free column. Vectors are unit-norm with the first significant entry
/// rotated to the positive real axis, making the basis deterministic.
pub fn null_space(a: &CMatrix4, rank_tol: f64) -> Vec<CVector4> {
    let mut m = *a;
    let scale = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return (0..4).map(|i| CVector4::ith(i, C64::new(1.0, 0.0))).collect();
    }
    let tol = rank_tol * scale;

    // Full-pivot elimination, tracking the column permutation.
    let mut col_of = [0usize, 1, 2, 3];
    let mut rank = 0;
    for step in 0..4 {
        let mut best = (step, step, 0.0_f64);
        for r in step..4 {
            for c in step..4 {
                let v = m[(r, c)].norm();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        m.swap_rows(step, best.0);
        m.swap_columns(step, best.1);
        col_of.swap(step, best.1);
        let pivot = m[(step, step)];
        for r in (step + 1)..4 {
            let factor = m[(r, step)] / pivot;
            for c in step..4 {
                let sub = factor * m[(step, c)];
                m[(r, c)] -= sub;
            }
        }
        rank += 1;
    }

    // Back-substitute once per free column.
    let mut basis = Vec::new();
    for free in rank..4 {
        let mut x = CVector4::zeros();
        x[free] = C64::new(1.0, 0.0);
        for r in (0..rank).rev() {
            let mut s = C64::new(0.0, 0.0);
            for c in (r + 1)..4 {
                s += m[(r, c)] * x[c];
            }
            x[r] = -s / m[(r, r)];
        }
        let mut v = CVector4::zeros();
        for i in 0..4 {
            v[col_of[i]] = x[i];
        }
        basis.push(normalize_phase(&v));
    }
    basis
}

/// Unit norm with the first entry of significant modulus made real
/// positive.
pub fn normalize_phase(v: &CVector4) -> CVector4 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return *v;
    }
    let mut w = v / C64::new(norm, 0.0);
    let lead = (0..4)
        .find(|&i| w[i].norm() > 1e-8)
        .unwrap_or(0);
    let phase = w[lead] / C64::new(w[lead].norm(), 0.0);
    w /= phase;
    w
}

/// Infinity norm of a real 4×4 matrix.
pub fn norm_inf(m: &Matrix4<f64>) -> f64 {
    (0..4)
        .map(|r| (0..4).map(|c| m[(r, c)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// exp(A) for a real 4×4 matrix by scaling and squaring with the order-13
/// diagonal Padé approximant.
pub fn expm(a: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = norm_inf(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2.0_f64.powi(s);
    let b = &PADE13;
    let a2 = scaled * scaled;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let id = Matrix4::identity();
    let u = scaled
        * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9])
            + a6 * b[7]
            + a4 * b[5]
            + a2 * b[3]
            + id * b[1]);
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8])
        + a6 * b[6]
        + a4 * b[4]
        + a2 * b[2]
        + id * b[0];
    let num = v + u;
    let den = v - u;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Padé denominator of expm is singular");
    for _ in 0..s {
        r = r * r;
    }
    r
}
