//! Short-time evolution engine: the unitarity-preserving factorization of the
//! total propagator through the square root of the ideal propagator, the
//! decoherence functions over coupling-eigenvalue pairs, and assembly of the
//! reduced density matrix.

use crate::bath::{
    discrete_mode_sum, kernel_one_minus_cos, kernel_sin_minus_linear, spectral_integral,
    thermal_factor, BathSpectrum, QuadratureSpec,
};
use crate::models::{ideal_propagator, CouplingOperator, GateModel, InitialState};
use crate::pauli::{unitary_sqrt, QubitOperator, SqrtBranch};
use crate::EvolveError;
use num_complex::Complex64 as C64;

/// Decoherence functions indexed by ordered coupling-eigenvalue pairs
/// `((l+,l+), (l+,l-), (l-,l+), (l-,l-))` with `l+ > l-`.
///
/// Diagonal entries are exactly zero, real parts are nonpositive, and the
/// off-diagonal pair is complex conjugate.
#[derive(Clone, Copy, Debug)]
pub struct ShortTimeDecoherence {
    pub d: [C64; 4],
    pub t: f64,
}

impl ShortTimeDecoherence {
    /// Entry for the (row, col) eigenvalue pair, row/col 0 = l+, 1 = l-.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.d[2 * row + col]
    }
}

/// Decoherence function for one eigenvalue pair:
/// `Re = -(l - l')^2 int J w^n e^(-w/w_c) (1 - cos wt)/w^2 coth(w/2kT) dw`,
/// `Im = -(l^2 - l'^2) int J w^n e^(-w/w_c) (sin wt - wt)/w^2 dw`.
pub fn short_time_decoherence(
    bath: &BathSpectrum,
    lambda: f64,
    lambda_p: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<C64, EvolveError> {
    let dl2 = (lambda - lambda_p) * (lambda - lambda_p);
    let sl2 = lambda * lambda - lambda_p * lambda_p;
    if dl2 == 0.0 && sl2 == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let kt = bath.temperature;
    let re = if dl2 == 0.0 {
        0.0
    } else {
        let kernel = move |w: f64, t: f64| {
            kernel_one_minus_cos(w, t) * thermal_factor(w, kt).unwrap_or(1.0)
        };
        -dl2 * spectral_integral(bath, kernel, t, q)?
    };
    let im = if sl2 == 0.0 {
        0.0
    } else {
        -sl2 * spectral_integral(bath, kernel_sin_minus_linear, t, q)?
    };
    Ok(C64::new(re, im))
}

/// Same decoherence function evaluated over discrete modes `(w_k, |g_k|^2)`.
pub fn short_time_decoherence_discrete(
    modes: &[(f64, f64)],
    temperature: f64,
    lambda: f64,
    lambda_p: f64,
    t: f64,
) -> Result<C64, EvolveError> {
    let dl2 = (lambda - lambda_p) * (lambda - lambda_p);
    let sl2 = lambda * lambda - lambda_p * lambda_p;
    let re_kernel = move |w: f64, t: f64| {
        kernel_one_minus_cos(w, t) * thermal_factor(w, temperature).unwrap_or(1.0)
    };
    let re: f64 = discrete_mode_sum(modes, re_kernel, t)?;
    let im: f64 = discrete_mode_sum(modes, kernel_sin_minus_linear, t)?;
    Ok(C64::new(-dl2 * re, -sl2 * im))
}

/// Full table over the coupling's eigenvalue pairs, diagonals exactly zero.
pub fn short_time_table(
    bath: &BathSpectrum,
    coupling: &CouplingOperator,
    t: f64,
    q: &QuadratureSpec,
) -> Result<ShortTimeDecoherence, EvolveError> {
    let [lp, lm] = coupling.eigenvalues();
    let d_pm = short_time_decoherence(bath, lp, lm, t, q)?;
    Ok(ShortTimeDecoherence {
        d: [C64::new(0.0, 0.0), d_pm, d_pm.conj(), C64::new(0.0, 0.0)],
        t,
    })
}

fn assemble(
    w: &QubitOperator,
    coupling: &CouplingOperator,
    rho0: &QubitOperator,
    table: &ShortTimeDecoherence,
) -> QubitOperator {
    // rho_S = sum_{ll'} e^{D_ll'} (W P_l W) rho0 (W P_l' W)^dag
    let projs = coupling.eigenprojectors();
    let flank = [*w * projs[0] * *w, *w * projs[1] * *w];
    let mut rho = QubitOperator::zero();
    for i in 0..2 {
        for j in 0..2 {
            let weight = table.entry(i, j).exp();
            rho = rho + (flank[i] * *rho0 * flank[j].adjoint()).scale(weight);
        }
    }
    rho
}

/// Reduced density matrix under the short-time factorization.
///
/// `W = sqrt(U_S(t))` with the requested branch enters the projector flanks
/// `W |l><l| W`; at `J = 0` the assembly collapses to the ideal evolution.
pub fn evolve_short_time(
    model: &GateModel,
    coupling: &CouplingOperator,
    bath: &BathSpectrum,
    rho0: &InitialState,
    t: f64,
    branch: SqrtBranch,
    q: &QuadratureSpec,
) -> Result<QubitOperator, EvolveError> {
    let table = short_time_table(bath, coupling, t, q)?;
    let u = ideal_propagator(model, t)?;
    let w = unitary_sqrt(&u, branch);
    let rho0 = rho0.density()?;
    Ok(assemble(&w, coupling, &rho0, &table))
}

/// Short-time evolution against an explicit discrete mode list; used for
/// like-for-like comparison with the exact few-mode oracle.
pub fn evolve_short_time_discrete(
    model: &GateModel,
    coupling: &CouplingOperator,
    modes: &[(f64, f64)],
    temperature: f64,
    rho0: &InitialState,
    t: f64,
    branch: SqrtBranch,
) -> Result<QubitOperator, EvolveError> {
    let [lp, lm] = coupling.eigenvalues();
    let d_pm = short_time_decoherence_discrete(modes, temperature, lp, lm, t)?;
    let table = ShortTimeDecoherence {
        d: [C64::new(0.0, 0.0), d_pm, d_pm.conj(), C64::new(0.0, 0.0)],
        t,
    };
    let u = ideal_propagator(model, t)?;
    let w = unitary_sqrt(&u, branch);
    let rho0 = rho0.density()?;
    Ok(assemble(&w, coupling, &rho0, &table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ideal_density;

    fn table_bath(n: f64) -> BathSpectrum {
        BathSpectrum::new(1e-6, n, 30.0, 0.0).unwrap()
    }

    #[test]
    fn equal_eigenvalues_give_zero() {
        let b = table_bath(1.0);
        let d = short_time_decoherence(&b, 0.7, 0.7, 1.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(d, C64::new(0.0, 0.0));
    }

    #[test]
    fn table_one_ohmic_value() {
        // Re D = -(2)^2 * J ln(1 + wc^2 t^2)/2 = -1.36070e-5; Im = 0 since
        // the eigenvalues are symmetric
        let b = table_bath(1.0);
        let d = short_time_decoherence(&b, 1.0, -1.0, 1.0, &QuadratureSpec::default()).unwrap();
        let want = -4.0 * 1e-6 * 0.5 * (901.0f64).ln();
        assert!(((d.re - want) / want).abs() < 1e-8);
        assert!((d.re + 1.36070e-5).abs() < 1e-10);
        assert_eq!(d.im, 0.0);
    }

    #[test]
    fn table_one_superohmic_value() {
        let b = table_bath(2.0);
        let d = short_time_decoherence(&b, 1.0, -1.0, 1.0, &QuadratureSpec::default()).unwrap();
        let s = 1.0 / 30.0;
        let want = -4.0 * 1e-6 * (1.0 / s - s / (s * s + 1.0));
        assert!(((d.re - want) / want).abs() < 1e-8);
        assert!((d.re + 1.19867e-4).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_eigenvalues_have_phase() {
        // lambda = 1, lambda' = 0 exercises the imaginary kernel
        let b = table_bath(1.0);
        let d = short_time_decoherence(&b, 1.0, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        let s: f64 = 1.0 / 30.0;
        let want_im = -1e-6 * ((1.0 / s).atan() - 1.0 / s);
        assert!(((d.im - want_im) / want_im).abs() < 1e-8);
        assert!(d.re < 0.0);
    }

    #[test]
    fn zero_coupling_recovers_ideal() {
        let bath = BathSpectrum::new(0.0, 1.0, 30.0, 0.0).unwrap();
        let s = CouplingOperator::sigma_z();
        let rho0 = InitialState::Bloch { theta: 1.0, phi: 0.7 };
        for model in [
            GateModel::adiabatic(1.0).unwrap(),
            GateModel::rotating_wave(1.0, 2.0).unwrap(),
        ] {
            for &t in &[0.0, 0.9, 3.3] {
                let noisy = evolve_short_time(
                    &model,
                    &s,
                    &bath,
                    &rho0,
                    t,
                    SqrtBranch::DEFAULT,
                    &QuadratureSpec::default(),
                )
                .unwrap();
                let ideal = ideal_density(&model, &rho0, t).unwrap();
                assert!(noisy.distance_max(&ideal) < 1e-12);
            }
        }
    }

    #[test]
    fn density_invariants_hold() {
        let bath = table_bath(1.0);
        let s = CouplingOperator::sigma_z();
        let model = GateModel::rotating_wave(1.0, 1.0).unwrap();
        let rho0 = InitialState::Bloch { theta: 0.8, phi: 0.1 };
        let rho = evolve_short_time(
            &model,
            &s,
            &bath,
            &rho0,
            1.7,
            SqrtBranch::DEFAULT,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(rho.is_hermitian(1e-12));
        let eig = crate::pauli::herm_eigen(&rho.hermitian_part());
        assert!(eig.values[1] >= -1e-8);
    }

    #[test]
    fn adiabatic_branch_independence() {
        // the coupling commutes with the propagator here, so every branch
        // assignment yields the same state
        let bath = table_bath(1.0);
        let s = CouplingOperator::sigma_z();
        let model = GateModel::adiabatic(1.3).unwrap();
        let rho0 = InitialState::Bloch { theta: 1.1, phi: 0.5 };
        let reference = evolve_short_time(
            &model,
            &s,
            &bath,
            &rho0,
            2.1,
            SqrtBranch::DEFAULT,
            &QuadratureSpec::default(),
        )
        .unwrap();
        for br in SqrtBranch::all() {
            let rho = evolve_short_time(
                &model,
                &s,
                &bath,
                &rho0,
                2.1,
                br,
                &QuadratureSpec::default(),
            )
            .unwrap();
            assert!(rho.distance_max(&reference) < 1e-12);
        }
    }

    #[test]
    fn damping_monotone_on_initial_window() {
        // |Re D(+-)| grows over t in [0, 5] for kT = 0, n = 1
        let b = table_bath(1.0);
        let q = QuadratureSpec::default();
        let mut prev = 0.0;
        for k in 1..=20 {
            let t = 0.25 * k as f64;
            let d = short_time_decoherence(&b, 1.0, -1.0, t, &q).unwrap();
            assert!(d.re <= 0.0);
            assert!(-d.re >= prev, "not monotone at t={t}");
            prev = -d.re;
        }
    }

    #[test]
    fn deviation_scales_linearly_in_j() {
        let s = CouplingOperator::sigma_z();
        let model = GateModel::rotating_wave(1.0, 1.0).unwrap();
        let rho0 = InitialState::Bloch { theta: 0.9, phi: 0.0 };
        let q = QuadratureSpec::default();
        let t = 1.0;
        let ideal = ideal_density(&model, &rho0, t).unwrap();
        let chi = |j: f64| {
            let bath = BathSpectrum::new(j, 1.0, 30.0, 0.0).unwrap();
            let rho =
                evolve_short_time(&model, &s, &bath, &rho0, t, SqrtBranch::DEFAULT, &q).unwrap();
            rho - ideal
        };
        let c1 = chi(1e-5);
        let c2 = chi(5e-6);
        let rescaled = c2.scale(C64::new(2.0, 0.0));
        assert!(c1.distance_max(&rescaled) < 0.01 * c1.norm_max());
    }
}
