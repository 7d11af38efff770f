//! Double-precision complex linear algebra on 3-vectors and 3×3 matrices.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec3 = Vector3<C64>;
pub type Mat3 = Matrix3<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `w^H J z`.
pub fn herm(j: &Mat3, z: &Vec3, w: &Vec3) -> C64 {
    w.dotc(&(j * z))
}

/// Bilinear cross product; spans the kernel of a rank-2 matrix with rows `a`, `b`.
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    Vec3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Rescale to unit Euclidean norm with the largest-modulus coordinate real positive.
pub fn normalize_phase(v: &Vec3) -> Vec3 {
    let n = v.norm();
    if n == 0.0 {
        return *v;
    }
    let mut k = 0;
    for i in 1..3 {
        if v[i].norm() > v[k].norm() * (1.0 + 1e-12) {
            k = i;
        }
    }
    let phase = v[k] / v[k].norm();
    v / (phase * n)
}

/// Roots of the monic cubic `x³ + c2 x² + c1 x + c0` (Aberth iteration, then Newton polishing).
pub fn cubic_roots(c2: C64, c1: C64, c0: C64) -> [C64; 3] {
    let p = |x: C64| ((x + c2) * x + c1) * x + c0;
    let dp = |x: C64| (3.0 * x + 2.0 * c2) * x + c1;
    let bound = 1.0 + c2.norm().max(c1.norm()).max(c0.norm());
    let mut z = [
        C64::from_polar(0.5 * bound, 0.4),
        C64::from_polar(0.5 * bound, 0.4 + 2.0 * std::f64::consts::PI / 3.0),
        C64::from_polar(0.5 * bound, 0.4 + 4.0 * std::f64::consts::PI / 3.0),
    ];
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..3 {
            let pv = p(z[i]);
            if pv == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / dp(z[i]);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..3 {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += 1.0 / d;
                    }
                }
            }
            let step = ratio / (1.0 - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = dp(*zi);
            if d.norm() < 1e-300 {
                break;
            }
            let step = p(*zi) / d;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Orthonormal basis of the numerical kernel: right singular vectors with
/// singular value below `rel_tol · σ_max`.
pub fn null_space(m: &Mat3, rel_tol: f64) -> Vec<Vec3> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.max();
    let scale = if smax > 0.0 { smax } else { 1.0 };
    let mut out = Vec::new();
    for i in 0..3 {
        if svd.singular_values[i] <= rel_tol * scale || smax == 0.0 {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}

/// Kernel vector for a matrix of numerical rank 2 (largest cross product of row pairs).
pub fn kernel_vector(m: &Mat3) -> Vec3 {
    let rows: [Vec3; 3] = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    let mut best = cross(&rows[0], &rows[1]);
    for (a, b) in [(0usize, 2usize), (1, 2)] {
        let cand = cross(&rows[a], &rows[b]);
        if cand.norm() > best.norm() {
            best = cand;
        }
    }
    if best.norm() < 1e-300 {
        return null_space(m, 1e-8).pop().unwrap_or_else(Vec3::zeros);
    }
    best
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &Mat3) -> [f64; 3] {
    let h = (m + m.adjoint()) * real(0.5);
    let eig = h.symmetric_eigen();
    let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    ev.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots_recover_planted_roots() {
        let r = [c(2.0, 0.0), c(-0.5, 1.5), c(0.0, -1.0)];
        let c2 = -(r[0] + r[1] + r[2]);
        let c1 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let c0 = -(r[0] * r[1] * r[2]);
        let got = cubic_roots(c2, c1, c0);
        for want in r {
            let best = got.iter().map(|g| (g - want).norm()).fold(f64::MAX, f64::min);
            assert!(best < 1e-12, "missing root {want}");
        }
    }

    #[test]
    fn herm_matches_definition() {
        let j = Mat3::from_diagonal(&Vec3::new(real(1.0), real(1.0), real(-1.0)));
        let z = Vec3::new(c(0.3, 0.1), c(0.0, 0.2), real(1.0));
        let w = Vec3::new(real(0.0), real(0.0), real(1.0));
        assert!((herm(&j, &z, &w) - real(-1.0)).norm() < 1e-15);
        let lhs = herm(&j, &z, &w);
        let rhs = herm(&j, &w, &z).conj();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn kernel_vector_annihilates_rank_two_matrix() {
        let m = Mat3::new(
            real(1.0),
            c(0.0, 1.0),
            real(2.0),
            real(0.0),
            real(1.0),
            c(1.0, -1.0),
            real(1.0),
            c(1.0, 1.0),
            c(3.0, -1.0),
        );
        let v = kernel_vector(&m);
        assert!(v.norm() > 0.1);
        assert!((m * v).norm() < 1e-12 * v.norm());
    }
}
