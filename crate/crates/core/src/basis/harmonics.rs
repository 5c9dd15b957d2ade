use std::f64::consts::PI;

use crate::geometry::Vec3;

/// Legendre polynomials `P_0..=P_order` at `mu` by the three-term recurrence.
pub fn legendre(order: usize, mu: f64, out: &mut [f64]) {
    debug_assert!(out.len() > order);
    out[0] = 1.0;
    if order >= 1 {
        out[1] = mu;
    }
    for l in 1..order {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 1.0) * mu * out[l] - lf * out[l - 1]) / (lf + 1.0);
    }
}

/// Index of `Y_l^m` in degree-major ordering (`l = 0..N`, `m = -l..l`).
pub fn sh_index(l: usize, m: isize) -> usize {
    (l * l) + (m + l as isize) as usize
}

/// Real orthonormal spherical harmonics up to degree `order`, degree-major,
/// without the Condon–Shortley phase.
///
/// Normalized associated Legendre functions are evaluated without the
/// `sin^m θ` factor; the azimuthal part comes from `(x + iy)^m`.
pub fn real_spherical_harmonics(order: usize, omega: Vec3, out: &mut [f64]) {
    let n = (order + 1) * (order + 1);
    debug_assert!(out.len() >= n);
    let (x, y, z) = (omega.x, omega.y, omega.z);

    // (x + iy)^m
    let mut cos_m = vec![0.0; order + 1];
    let mut sin_m = vec![0.0; order + 1];
    cos_m[0] = 1.0;
    for m in 1..=order {
        cos_m[m] = cos_m[m - 1] * x - sin_m[m - 1] * y;
        sin_m[m] = sin_m[m - 1] * x + cos_m[m - 1] * y;
    }

    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=order {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt();
        }
        let mut p_prev = 0.0;
        let mut p_curr = pmm;
        for l in m..=order {
            if l == m + 1 {
                p_prev = p_curr;
                p_curr = (2.0 * m as f64 + 3.0).sqrt() * z * pmm;
            } else if l > m + 1 {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                let next = a * (z * p_curr - b * p_prev);
                p_prev = p_curr;
                p_curr = next;
            }
            if m == 0 {
                out[sh_index(l, 0)] = p_curr;
            } else {
                let s = std::f64::consts::SQRT_2 * p_curr;
                out[sh_index(l, m as isize)] = s * cos_m[m];
                out[sh_index(l, -(m as isize))] = s * sin_m[m];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_values() {
        let mut p = [0.0; 5];
        legendre(4, 0.5, &mut p);
        let expected = [1.0, 0.5, -0.125, -0.4375, -0.2890625];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let omega = Vec3::new(0.36, 0.48, 0.8);
        let mut y = [0.0; 9];
        real_spherical_harmonics(2, omega, &mut y);
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        assert!((y[0] - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        assert!((y[sh_index(1, 1)] - c1 * omega.x).abs() < 1e-15);
        assert!((y[sh_index(1, -1)] - c1 * omega.y).abs() < 1e-15);
        assert!((y[sh_index(1, 0)] - c1 * omega.z).abs() < 1e-15);
        let c20 = (5.0 / (16.0 * PI)).sqrt();
        assert!((y[sh_index(2, 0)] - c20 * (3.0 * omega.z * omega.z - 1.0)).abs() < 1e-14);
        let c22 = (15.0 / (16.0 * PI)).sqrt();
        let xy = omega.x * omega.x - omega.y * omega.y;
        assert!((y[sh_index(2, 2)] - c22 * xy).abs() < 1e-14);
    }
}
