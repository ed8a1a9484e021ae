//! Exact arithmetic for 2x2 complex operators: Pauli decomposition, Hermitian
//! eigendecomposition, analytic matrix exponential, and square roots of
//! unitaries.
//!
//! Everything here is closed-form; no iterative linear algebra. Entrywise
//! tolerances are 1e-12 for algebraic identities and 1e-10 for composed
//! operations.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Neg, Sub};

/// Entrywise tolerance for algebraic identities (hermiticity, reconstruction).
pub const ALG_TOL: f64 = 1e-12;
/// Entrywise tolerance for composed operations (square roots, propagators).
pub const COMPOSED_TOL: f64 = 1e-10;

/// A ket in the two-dimensional system space.
pub type Ket = [C64; 2];

/// A 2x2 complex operator on the qubit space. Energies are dimensionless
/// with hbar = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitOperator {
    pub m: [[C64; 2]; 2],
}

/// Pauli-basis coefficients of a 2x2 operator: `M = c0 I + v . sigma`.
///
/// For a Hermitian source both `c0` and `v` are real to within `ALG_TOL`.
#[derive(Clone, Copy, Debug)]
pub struct PauliForm {
    pub c0: C64,
    pub v: [C64; 3],
}

/// Eigensystem of a Hermitian 2x2 operator, eigenvalues descending.
#[derive(Clone, Copy, Debug)]
pub struct HermEigen {
    pub values: [f64; 2],
    pub kets: [Ket; 2],
}

/// Per-eigenvalue phase choice for the square root of a unitary. `flip[j]`
/// shifts the j-th halved eigenphase by pi (eigenphases ordered descending
/// by principal argument).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SqrtBranch {
    pub flip: [bool; 2],
}

impl SqrtBranch {
    pub const DEFAULT: SqrtBranch = SqrtBranch { flip: [false, false] };

    /// All four branch assignments of the two eigenphases.
    pub fn all() -> [SqrtBranch; 4] {
        [
            SqrtBranch { flip: [false, false] },
            SqrtBranch { flip: [true, false] },
            SqrtBranch { flip: [false, true] },
            SqrtBranch { flip: [true, true] },
        ]
    }
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

impl QubitOperator {
    pub fn new(m: [[C64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn sigma_x() -> Self {
        Self::new([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma_y() -> Self {
        Self::new([[ZERO, -C64::i()], [C64::i(), ZERO]])
    }

    pub fn sigma_z() -> Self {
        Self::new([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn paulis() -> [Self; 3] {
        [Self::sigma_x(), Self::sigma_y(), Self::sigma_z()]
    }

    /// Reconstruct `c0 I + v . sigma` from Pauli coefficients.
    pub fn from_pauli(c0: C64, v: [C64; 3]) -> Self {
        Self::new([
            [c0 + v[2], v[0] - C64::i() * v[1]],
            [v[0] + C64::i() * v[1], c0 - v[2]],
        ])
    }

    /// Real-coefficient Pauli combination (always Hermitian).
    pub fn from_pauli_real(c0: f64, v: [f64; 3]) -> Self {
        Self::from_pauli(C64::new(c0, 0.0), [v[0].into(), v[1].into(), v[2].into()])
    }

    /// Outer product `|ket><bra|`.
    pub fn outer(ket: Ket, bra: Ket) -> Self {
        Self::new([
            [ket[0] * bra[0].conj(), ket[0] * bra[1].conj()],
            [ket[1] * bra[0].conj(), ket[1] * bra[1].conj()],
        ])
    }

    /// Rank-one projector onto a (normalized) ket.
    pub fn projector(ket: Ket) -> Self {
        Self::outer(ket, ket)
    }

    /// Density matrix of the pure state with Bloch angles (theta, phi).
    pub fn density_from_bloch(theta: f64, phi: f64) -> Self {
        let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        Self::from_pauli_real(0.5, [n[0] / 2.0, n[1] / 2.0, n[2] / 2.0])
    }

    pub fn adjoint(&self) -> Self {
        Self::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] *= s;
            }
        }
        out
    }

    pub fn apply(&self, v: Ket) -> Ket {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Largest entrywise absolute value.
    pub fn norm_max(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn distance_max(&self, other: &Self) -> f64 {
        (*self - *other).norm_max()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.distance_max(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).distance_max(&Self::identity()) <= tol
    }

    /// Hermitian, unit trace, eigenvalues above -1e-10.
    pub fn is_density(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) || (self.trace() - ONE).norm() > tol {
            return false;
        }
        let eig = herm_eigen(&self.hermitian_part());
        eig.values[1] >= -1e-10
    }

    /// (M + M^dag)/2; used to strip rounding-level anti-Hermitian residue.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(C64::new(0.5, 0.0))
    }
}

impl Add for QubitOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] += rhs.m[r][c];
            }
        }
        out
    }
}

impl Sub for QubitOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] -= rhs.m[r][c];
            }
        }
        out
    }
}

impl Neg for QubitOperator {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for QubitOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::new([
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

/// Pauli coefficients of `M`: `c0 = Tr[M]/2`, `v_j = Tr[M sigma_j]/2`.
pub fn pauli_decompose(m: &QubitOperator) -> PauliForm {
    let c0 = m.trace() * 0.5;
    let vx = (m.m[0][1] + m.m[1][0]) * 0.5;
    let vy = (m.m[0][1] - m.m[1][0]) * C64::i() * 0.5;
    let vz = (m.m[0][0] - m.m[1][1]) * 0.5;
    PauliForm { c0, v: [vx, vy, vz] }
}

impl PauliForm {
    pub fn reconstruct(&self) -> QubitOperator {
        QubitOperator::from_pauli(self.c0, self.v)
    }

    /// Real parts of the coefficients; exact for Hermitian sources.
    pub fn real_parts(&self) -> (f64, [f64; 3]) {
        (self.c0.re, [self.v[0].re, self.v[1].re, self.v[2].re])
    }
}

/// sin(x)/x with series fallback near zero.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}

/// (1 - cos x)/x with series fallback near zero.
pub(crate) fn cosc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x * (0.5 - x2 / 24.0 + x2 * x2 / 720.0)
    } else {
        (1.0 - x.cos()) / x
    }
}

/// `exp(-i H t)` for Hermitian `H = c0 I + v . sigma`, via the closed form
/// `e^{-i c0 t} [cos(|v| t) I - i sin(|v| t) (vhat . sigma)]`.
pub fn herm_exp(h: &QubitOperator, t: f64) -> QubitOperator {
    let (c0, v) = pauli_decompose(h).real_parts();
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let phase = C64::new(0.0, -c0 * t).exp();
    // sin(|v| t)/|v| stays finite as |v| -> 0
    let s = t * sinc(vn * t);
    let cosw = C64::new((vn * t).cos(), 0.0);
    let mi_s = C64::new(0.0, -s);
    let u = QubitOperator::from_pauli(cosw, [mi_s * v[0], mi_s * v[1], mi_s * v[2]]);
    u.scale(phase)
}

/// Principal argument in (-pi, pi]; the -pi edge is folded to +pi so the
/// result is deterministic across platforms.
fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Eigensystem of a Hermitian operator via the closed form `c0 +- |v|`.
/// Eigenvalues descending; for `v = 0` the canonical basis is returned.
pub fn herm_eigen(m: &QubitOperator) -> HermEigen {
    let (c0, v) = pauli_decompose(m).real_parts();
    let vn = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if vn < 1e-300 {
        return HermEigen {
            values: [c0, c0],
            kets: [[ONE, ZERO], [ZERO, ONE]],
        };
    }
    let rho = v[0].hypot(v[1]);
    let theta = rho.atan2(v[2]);
    let phi = v[1].atan2(v[0]);
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let eip = C64::new(0.0, phi).exp();
    let plus = [C64::new(ct, 0.0), eip * st];
    let minus = [-eip.conj() * st, C64::new(ct, 0.0)];
    HermEigen {
        values: [c0 + vn, c0 - vn],
        kets: [plus, minus],
    }
}

/// Square root of a unitary: `W` with `W W = U`.
///
/// The default branch halves each eigenphase into (-pi/2, pi/2]; `branch`
/// shifts selected halved phases by pi. A degenerate unitary `e^{i phi} I`
/// yields `e^{i phi/2} I` on the canonical basis.
pub fn unitary_sqrt(u: &QubitOperator, branch: SqrtBranch) -> QubitOperator {
    // U is normal; its Hermitian and anti-Hermitian parts commute with it and
    // with each other. Take eigenvectors from whichever part is farther from
    // a multiple of the identity.
    let herm = u.hermitian_part();
    let anti = (*u - u.adjoint()).scale(C64::new(0.0, -0.5));
    let (_, vh) = pauli_decompose(&herm).real_parts();
    let (_, va) = pauli_decompose(&anti).real_parts();
    let nh = (vh[0] * vh[0] + vh[1] * vh[1] + vh[2] * vh[2]).sqrt();
    let na = (va[0] * va[0] + va[1] * va[1] + va[2] * va[2]).sqrt();
    let kets = if nh.max(na) < 1e-14 {
        // degenerate: U = e^{i phi} I
        [[ONE, ZERO], [ZERO, ONE]]
    } else if nh >= na {
        herm_eigen(&herm).kets
    } else {
        herm_eigen(&anti).kets
    };
    // eigenvalue of U on each eigenvector
    let mut pairs: Vec<(f64, Ket)> = kets
        .iter()
        .map(|k| {
            let uk = u.apply(*k);
            let lam = k[0].conj() * uk[0] + k[1].conj() * uk[1];
            (principal_arg(lam), *k)
        })
        .collect();
    // descending phase order fixes which flip applies to which eigenvector
    if pairs[0].0 < pairs[1].0 {
        pairs.swap(0, 1);
    }
    let mut w = QubitOperator::zero();
    for (j, (phase, ket)) in pairs.iter().enumerate() {
        let mut half = phase / 2.0;
        if branch.flip[j] {
            half += std::f64::consts::PI;
        }
        let factor = C64::new(0.0, half).exp();
        w = w + QubitOperator::projector(*ket).scale(factor);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn decompose_sigma_z() {
        let p = pauli_decompose(&QubitOperator::sigma_z());
        let (c0, v) = p.real_parts();
        assert!(c0.abs() < ALG_TOL);
        assert!((v[2] - 1.0).abs() < ALG_TOL && v[0].abs() < ALG_TOL && v[1].abs() < ALG_TOL);
    }

    #[test]
    fn decompose_identity() {
        let p = pauli_decompose(&QubitOperator::identity());
        let (c0, v) = p.real_parts();
        assert!((c0 - 1.0).abs() < ALG_TOL);
        assert!(v.iter().all(|x| x.abs() < ALG_TOL));
    }

    #[test]
    fn decompose_gate_hamiltonian_at_t0() {
        // a sigma_z + c sigma_x with a = 1, c = 2
        let h = QubitOperator::sigma_z() + QubitOperator::sigma_x().scale(c(2.0, 0.0));
        let (c0, v) = pauli_decompose(&h).real_parts();
        assert!(c0.abs() < ALG_TOL);
        assert!((v[0] - 2.0).abs() < ALG_TOL);
        assert!(v[1].abs() < ALG_TOL);
        assert!((v[2] - 1.0).abs() < ALG_TOL);
    }

    #[test]
    fn herm_exp_sigma_z_quarter_period() {
        let u = herm_exp(&QubitOperator::sigma_z(), std::f64::consts::FRAC_PI_2);
        let want = QubitOperator::new([[c(0.0, -1.0), ZERO], [ZERO, c(0.0, 1.0)]]);
        assert!(u.distance_max(&want) < ALG_TOL);
    }

    #[test]
    fn herm_exp_scalar_case() {
        let h = QubitOperator::identity().scale(c(3.0, 0.0));
        let u = herm_exp(&h, 2.0);
        let want = QubitOperator::identity().scale(C64::new(0.0, -6.0).exp());
        assert!(u.distance_max(&want) < ALG_TOL);
    }

    fn taylor_exp(h: &QubitOperator, t: f64, terms: usize) -> QubitOperator {
        // truncated power series of exp(-i H t), the independent oracle
        let a = h.scale(c(0.0, -t));
        let mut sum = QubitOperator::identity();
        let mut term = QubitOperator::identity();
        for k in 1..=terms {
            term = (term * a).scale(c(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn herm_exp_matches_taylor_series() {
        let h = QubitOperator::from_pauli_real(0.3, [0.7, -1.1, 0.4]);
        let u = herm_exp(&h, 0.37);
        let oracle = taylor_exp(&h, 0.37, 30);
        assert!(u.distance_max(&oracle) < ALG_TOL);
        assert!(u.is_unitary(ALG_TOL));
    }

    #[test]
    fn herm_exp_group_property() {
        let h = QubitOperator::from_pauli_real(-0.2, [1.3, 0.5, -0.9]);
        let lhs = herm_exp(&h, 0.8) * herm_exp(&h, 1.7);
        let rhs = herm_exp(&h, 2.5);
        assert!(lhs.distance_max(&rhs) < COMPOSED_TOL);
    }

    #[test]
    fn eigen_sigma_z() {
        let e = herm_eigen(&QubitOperator::sigma_z());
        assert_eq!(e.values, [1.0, -1.0]);
        assert!((e.kets[0][0] - ONE).norm() < ALG_TOL);
        assert!((e.kets[1][1] - ONE).norm() < ALG_TOL);
    }

    #[test]
    fn eigen_zero_matrix() {
        let e = herm_eigen(&QubitOperator::zero());
        assert_eq!(e.values, [0.0, 0.0]);
        let k0 = e.kets[0];
        let k1 = e.kets[1];
        let dot = k0[0].conj() * k1[0] + k0[1].conj() * k1[1];
        assert!(dot.norm() < ALG_TOL);
    }

    #[test]
    fn eigen_residual_random() {
        let h = QubitOperator::from_pauli_real(0.17, [-0.6, 0.9, 1.2]);
        let e = herm_eigen(&h);
        for j in 0..2 {
            let hv = h.apply(e.kets[j]);
            let res = [
                hv[0] - e.kets[j][0] * e.values[j],
                hv[1] - e.kets[j][1] * e.values[j],
            ];
            assert!(res[0].norm().max(res[1].norm()) < ALG_TOL);
        }
    }

    #[test]
    fn sqrt_identity_default() {
        let w = unitary_sqrt(&QubitOperator::identity(), SqrtBranch::DEFAULT);
        assert!(w.distance_max(&QubitOperator::identity()) < ALG_TOL);
    }

    #[test]
    fn sqrt_diag_i_minus_i() {
        let u = QubitOperator::new([[c(0.0, 1.0), ZERO], [ZERO, c(0.0, -1.0)]]);
        let w = unitary_sqrt(&u, SqrtBranch::DEFAULT);
        let q = std::f64::consts::FRAC_PI_4;
        let want = QubitOperator::new([
            [C64::new(0.0, q).exp(), ZERO],
            [ZERO, C64::new(0.0, -q).exp()],
        ]);
        assert!(w.distance_max(&want) < ALG_TOL);
    }

    #[test]
    fn sqrt_squares_back_all_branches() {
        let h = QubitOperator::from_pauli_real(0.4, [0.8, -0.3, 1.1]);
        let u = herm_exp(&h, 1.9);
        for br in SqrtBranch::all() {
            let w = unitary_sqrt(&u, br);
            assert!((w * w).distance_max(&u) < COMPOSED_TOL);
            assert!(w.is_unitary(COMPOSED_TOL));
        }
    }

    #[test]
    fn sqrt_degenerate_phase() {
        let u = QubitOperator::identity().scale(C64::new(0.0, 1.2).exp());
        let w = unitary_sqrt(&u, SqrtBranch::DEFAULT);
        let want = QubitOperator::identity().scale(C64::new(0.0, 0.6).exp());
        assert!(w.distance_max(&want) < ALG_TOL);
    }

    #[test]
    fn reconstruction_roundtrip_complex() {
        let m = QubitOperator::new([
            [c(0.3, -0.2), c(1.1, 0.9)],
            [c(-0.5, 0.05), c(0.0, 2.0)],
        ]);
        let p = pauli_decompose(&m);
        assert!(p.reconstruct().distance_max(&m) < ALG_TOL);
    }
}
