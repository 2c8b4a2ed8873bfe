//! Minimal dense 2×2 complex algebra.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Column vector in C².
pub type Vec2 = [C64; 2];

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Mat2([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// |e⟩⟨g| with σ_z |e⟩ = +|e⟩.
    pub fn sigma_plus() -> Self {
        Mat2([[ZERO, ONE], [ZERO, ZERO]])
    }

    pub fn sigma_minus() -> Self {
        Mat2([[ZERO, ZERO], [ONE, ZERO]])
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ‖M − M†‖.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).norm()
    }

    /// ‖M†M − 1‖.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::IDENTITY).norm()
    }

    /// Pauli decomposition `h0·1 + h·σ` of a Hermitian matrix.
    pub fn pauli_coefficients(&self) -> (f64, [f64; 3]) {
        let m = &self.0;
        let h0 = 0.5 * (m[0][0].re + m[1][1].re);
        let hz = 0.5 * (m[0][0].re - m[1][1].re);
        let off = 0.5 * (m[0][1] + m[1][0].conj());
        (h0, [off.re, -off.im, hz])
    }

    /// exp(−i H t) for Hermitian `H`, evaluated in closed form.
    pub fn unitary_exp(h: &Mat2, t: f64) -> Mat2 {
        let (h0, v) = h.pauli_coefficients();
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let phase = C64::from_polar(1.0, -h0 * t);
        let (c, s) = ((r * t).cos(), (r * t).sin());
        // sin(rt)/r, well-behaved as r -> 0
        let sr = if r * t.abs() < 1e-8 {
            t * (1.0 - (r * t) * (r * t) / 6.0)
        } else {
            s / r
        };
        let a = C64::new(c, -sr * v[2]);
        let d = C64::new(c, sr * v[2]);
        // -i sr (vx σx + vy σy) off-diagonals
        let b = C64::new(-sr * v[1], -sr * v[0]);
        let cc = C64::new(sr * v[1], -sr * v[0]);
        Mat2([[a, b], [cc, d]]).scale(phase)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut m = self.0;
        for (r, row) in m.iter_mut().enumerate() {
            for (c, z) in row.iter_mut().enumerate() {
                *z += o.0[r][c];
            }
        }
        Mat2(m)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-ONE)
    }
}

pub fn inner(a: &Vec2, b: &Vec2) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

pub fn norm_sqr(v: &Vec2) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

pub fn scale_vec(v: &Vec2, s: C64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_exp(h: &Mat2, t: f64) -> Mat2 {
        // Taylor series of exp(-iHt) with scaling and squaring.
        let k = 12;
        let a = h.scale(C64::new(0.0, -t / f64::from(1 << k)));
        let mut term = Mat2::IDENTITY;
        let mut sum = Mat2::IDENTITY;
        for n in 1..30 {
            term = (term * a).scale(C64::new(1.0 / n as f64, 0.0));
            sum = sum + term;
        }
        for _ in 0..k {
            sum = sum * sum;
        }
        sum
    }

    #[test]
    fn closed_form_exponential_matches_series() {
        let h = Mat2::new(
            C64::new(0.3, 0.0),
            C64::new(0.7, -0.2),
            C64::new(0.7, 0.2),
            C64::new(-1.1, 0.0),
        );
        for &t in &[0.0, 0.01, 1.3, -2.0] {
            let d = (Mat2::unitary_exp(&h, t) - brute_exp(&h, t)).norm();
            assert!(d < 1e-12, "t = {t}: {d}");
        }
    }

    #[test]
    fn pauli_roundtrip() {
        let (h0, v) = (0.4, [0.2, -0.5, 0.9]);
        let m = Mat2::IDENTITY.scale(C64::new(h0, 0.0))
            + Mat2::pauli_x().scale(C64::new(v[0], 0.0))
            + Mat2::pauli_y().scale(C64::new(v[1], 0.0))
            + Mat2::pauli_z().scale(C64::new(v[2], 0.0));
        let (g0, w) = m.pauli_coefficients();
        assert!((g0 - h0).abs() < 1e-15);
        for i in 0..3 {
            assert!((w[i] - v[i]).abs() < 1e-15);
        }
    }
}
