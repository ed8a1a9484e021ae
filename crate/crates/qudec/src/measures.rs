//! Decoherence quantification: the deviation operator from the noiseless
//! evolution, its eigenvalue norm, the population deviation, and maximization
//! over initial pure states.

use crate::bath::{BathSpectrum, QuadratureSpec};
use crate::models::{ideal_density, CouplingOperator, GateModel, InitialState};
use crate::pauli::{herm_eigen, QubitOperator, SqrtBranch};
use crate::EvolveError;

/// Deviation of a reduced state from the ideal one.
#[derive(Clone, Copy, Debug)]
pub struct DeviationReport {
    /// chi = rho_S - rho_C; Hermitian and traceless.
    pub chi: QubitOperator,
    /// Largest eigenvalue magnitude of chi.
    pub norm: f64,
    /// <+| chi |+> with |+> the upper sigma_z eigenstate.
    pub population_deviation: f64,
}

/// Deviation report for `chi = rho_s - rho_c`.
///
/// For the traceless Hermitian 2x2 deviation the norm reduces to
/// `sqrt(chi_00^2 + |chi_01|^2)`.
pub fn deviation(rho_s: &QubitOperator, rho_c: &QubitOperator) -> DeviationReport {
    let chi = (*rho_s - *rho_c).hermitian_part();
    let norm = (chi.m[0][0].re * chi.m[0][0].re + chi.m[0][1].norm_sqr()).sqrt();
    DeviationReport { chi, norm, population_deviation: chi.m[0][0].re }
}

/// Which evolution engine a scenario runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ShortTime,
    Magnus,
}

/// Evolve under the chosen scheme and report the deviation from the ideal.
pub fn scheme_deviation(
    scheme: Scheme,
    model: &GateModel,
    coupling: &CouplingOperator,
    bath: &BathSpectrum,
    rho0: &InitialState,
    t: f64,
    q: &QuadratureSpec,
) -> Result<DeviationReport, EvolveError> {
    let rho_s = match scheme {
        Scheme::ShortTime => crate::shorttime::evolve_short_time(
            model,
            coupling,
            bath,
            rho0,
            t,
            SqrtBranch::DEFAULT,
            q,
        )?,
        Scheme::Magnus => crate::magnus::evolve_magnus(model, coupling, bath, rho0, t, q)?,
    };
    let rho_c = ideal_density(model, rho0, t)?;
    Ok(deviation(&rho_s, &rho_c))
}

/// Supremum estimate of the deviation norm over pure initial states.
#[derive(Clone, Copy, Debug)]
pub struct MaximizedDeviation {
    pub norm_max: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Grid search over a 64 x 128 Bloch grid followed by local pattern-search
/// refinement to 1e-4 in angle. The refined value never falls below the best
/// grid point; grid ties resolve to the lowest index.
pub fn maximize_over_initial_states(
    scheme: Scheme,
    model: &GateModel,
    coupling: &CouplingOperator,
    bath: &BathSpectrum,
    t: f64,
    q: &QuadratureSpec,
) -> Result<MaximizedDeviation, EvolveError> {
    let eval = |theta: f64, phi: f64| -> Result<f64, EvolveError> {
        let rho0 = InitialState::Bloch { theta, phi };
        Ok(scheme_deviation(scheme, model, coupling, bath, &rho0, t, q)?.norm)
    };
    let (n_theta, n_phi) = (64usize, 128usize);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n_theta as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let v = eval(theta, phi)?;
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let (mut vbest, mut theta, mut phi) = best;
    let mut step = std::f64::consts::PI / n_theta as f64;
    while step > 1e-4 {
        let mut improved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let th = (theta + dt).clamp(0.0, std::f64::consts::PI);
            let ph = phi + dp;
            let v = eval(th, ph)?;
            if v > vbest {
                vbest = v;
                theta = th;
                phi = ph;
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(MaximizedDeviation { norm_max: vbest, theta, phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::herm_exp;
    use num_complex::Complex64 as C64;

    #[test]
    fn identical_states_have_zero_norm() {
        let rho = QubitOperator::density_from_bloch(1.0, 0.4);
        let r = deviation(&rho, &rho);
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.population_deviation, 0.0);
    }

    #[test]
    fn three_four_five_eigenvalue() {
        // chi with chi_00 = 3e-6 and chi_01 = 4e-6 has norm 5e-6
        let chi = QubitOperator::new([
            [C64::new(3e-6, 0.0), C64::new(4e-6, 0.0)],
            [C64::new(4e-6, 0.0), C64::new(-3e-6, 0.0)],
        ]);
        let rho_c = QubitOperator::density_from_bloch(0.7, 0.2);
        let rho_s = rho_c + chi;
        let r = deviation(&rho_s, &rho_c);
        assert!((r.norm - 5e-6).abs() < 1e-18);
        assert!((r.population_deviation - 3e-6).abs() < 1e-18);
        // matches the explicit eigenvalue of chi
        let eig = herm_eigen(&chi);
        assert!((eig.values[0] - r.norm).abs() < 1e-18);
    }

    #[test]
    fn norm_invariant_under_joint_conjugation() {
        let rho_s = QubitOperator::density_from_bloch(0.9, 0.3);
        let rho_c = QubitOperator::density_from_bloch(1.1, 0.5);
        let base = deviation(&rho_s, &rho_c).norm;
        let h = QubitOperator::from_pauli_real(0.2, [0.7, -0.4, 1.3]);
        for &t in &[0.3, 1.7, 2.9] {
            let u = herm_exp(&h, t);
            let a = u * rho_s * u.adjoint();
            let b = u * rho_c * u.adjoint();
            assert!((deviation(&a, &b).norm - base).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_scales_linearly() {
        let rho_c = QubitOperator::density_from_bloch(0.8, 0.0);
        let chi = QubitOperator::from_pauli_real(0.0, [1e-6, 2e-6, -5e-7]);
        for &alpha in &[0.25, 1.0, 3.0] {
            let rho_s = rho_c + chi.scale(C64::new(alpha, 0.0));
            let want = alpha * deviation(&(rho_c + chi), &rho_c).norm;
            assert!((deviation(&rho_s, &rho_c).norm - want).abs() < 1e-18);
        }
    }

    #[test]
    fn table_one_fitted_measure_closed_form() {
        // adiabatic short-time, Table-1 bath n = 1, pure state with
        // off-diagonal magnitude r: norm = r |e^{Re D} - 1|
        let bath = BathSpectrum::new(1e-6, 1.0, 30.0, 0.0).unwrap();
        let model = GateModel::adiabatic(1.0).unwrap();
        let s = CouplingOperator::sigma_z();
        let q = QuadratureSpec::default();
        let theta = (2.0f64 * 0.2561).asin();
        let rho0 = InitialState::Bloch { theta, phi: 0.0 };
        let rep =
            scheme_deviation(Scheme::ShortTime, &model, &s, &bath, &rho0, 1.0, &q).unwrap();
        let d = -1.360701052e-5; // -4 J ln(901)/2
        let r = (theta.sin()) / 2.0;
        let want = r * (1.0 - d.exp());
        assert!(((rep.norm - want) / want).abs() < 1e-6, "{} vs {want}", rep.norm);
    }

    #[test]
    fn maximize_zero_coupling_is_zero() {
        let bath = BathSpectrum::new(0.0, 1.0, 30.0, 0.0).unwrap();
        let model = GateModel::adiabatic(1.0).unwrap();
        let s = CouplingOperator::sigma_z();
        let m = maximize_over_initial_states(
            Scheme::ShortTime,
            &model,
            &s,
            &bath,
            1.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!(m.norm_max < 1e-14);
    }

    #[test]
    fn maximize_dephasing_argmax_on_equator() {
        let bath = BathSpectrum::new(1e-6, 1.0, 30.0, 0.0).unwrap();
        let model = GateModel::adiabatic(1.0).unwrap();
        let s = CouplingOperator::sigma_z();
        let m = maximize_over_initial_states(
            Scheme::ShortTime,
            &model,
            &s,
            &bath,
            1.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        // off-diagonal magnitude is maximal on the equator
        assert!(
            (m.theta - std::f64::consts::FRAC_PI_2).abs() < 0.05,
            "theta = {}",
            m.theta
        );
        // equals (1 - e^D)/2 there
        let d = -1.360701052e-5f64;
        let want = (1.0 - d.exp()) / 2.0;
        assert!(((m.norm_max - want) / want).abs() < 1e-4);
    }
}
