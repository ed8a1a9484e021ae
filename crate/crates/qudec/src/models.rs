//! Gate-model definitions, ideal propagators, the interaction-picture
//! coupling vector s(t), and ideal (noiseless) density evolution.

use crate::pauli::{
    herm_eigen, herm_exp, pauli_decompose, HermEigen, Ket, QubitOperator, ALG_TOL,
};
use num_complex::Complex64 as C64;
use std::fmt;
use std::sync::Arc;

/// Sampler for a user-supplied drive Hamiltonian.
pub type HamiltonianSampler = Arc<dyn Fn(f64) -> QubitOperator + Send + Sync>;

/// Time-dependent system Hamiltonian driving the qubit.
///
/// `Adiabatic` is the idling qubit `H_S = a sigma_z`; `RotatingWave` adds the
/// resonant drive `c (sigma_x cos 2at + sigma_y sin 2at)` whose propagator is
/// `exp(-i a t sigma_z) exp(-i c t sigma_x)` in closed form. `Custom` takes an
/// arbitrary Hermitian sampler and a step size for midpoint-sampled stepping.
#[derive(Clone)]
pub enum GateModel {
    Adiabatic { a: f64 },
    RotatingWave { a: f64, c: f64 },
    Custom { sampler: HamiltonianSampler, step: f64 },
}

impl fmt::Debug for GateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateModel::Adiabatic { a } => write!(f, "Adiabatic {{ a: {a} }}"),
            GateModel::RotatingWave { a, c } => write!(f, "RotatingWave {{ a: {a}, c: {c} }}"),
            GateModel::Custom { step, .. } => write!(f, "Custom {{ step: {step} }}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("model evolution requires t >= 0, got {0}")]
    NegativeTime(f64),
    #[error("custom sampler returned a non-Hermitian matrix at t = {0}")]
    NonHermitianSample(f64),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
}

impl GateModel {
    pub fn adiabatic(a: f64) -> Result<Self, ModelError> {
        if a <= 0.0 {
            return Err(ModelError::InvalidParameter(format!("a must be > 0, got {a}")));
        }
        Ok(GateModel::Adiabatic { a })
    }

    pub fn rotating_wave(a: f64, c: f64) -> Result<Self, ModelError> {
        if a <= 0.0 {
            return Err(ModelError::InvalidParameter(format!("a must be > 0, got {a}")));
        }
        if c < 0.0 {
            return Err(ModelError::InvalidParameter(format!("c must be >= 0, got {c}")));
        }
        Ok(GateModel::RotatingWave { a, c })
    }

    pub fn custom(sampler: HamiltonianSampler, step: f64) -> Result<Self, ModelError> {
        if step <= 0.0 {
            return Err(ModelError::InvalidParameter(format!(
                "step must be > 0, got {step}"
            )));
        }
        Ok(GateModel::Custom { sampler, step })
    }

    /// System Hamiltonian at time t.
    pub fn hamiltonian(&self, t: f64) -> QubitOperator {
        match self {
            GateModel::Adiabatic { a } => QubitOperator::from_pauli_real(0.0, [0.0, 0.0, *a]),
            GateModel::RotatingWave { a, c } => {
                let phase = 2.0 * a * t;
                QubitOperator::from_pauli_real(0.0, [c * phase.cos(), c * phase.sin(), *a])
            }
            GateModel::Custom { sampler, .. } => sampler(t),
        }
    }

    /// Largest angular frequency present in the drive; used to bound
    /// quadrature panel widths.
    pub fn max_drive_frequency(&self) -> f64 {
        match self {
            GateModel::Adiabatic { a } => 2.0 * a,
            GateModel::RotatingWave { a, c } => 2.0 * (a + c),
            GateModel::Custom { step, .. } => std::f64::consts::PI / step,
        }
    }
}

/// Hermitian traceless coupling operator with its eigensystem.
#[derive(Clone, Debug)]
pub struct CouplingOperator {
    op: QubitOperator,
    eigen: HermEigen,
}

impl CouplingOperator {
    pub fn new(op: QubitOperator) -> Result<Self, ModelError> {
        if !op.is_hermitian(ALG_TOL) {
            return Err(ModelError::InvalidParameter(
                "coupling operator must be Hermitian".into(),
            ));
        }
        if op.trace().norm() > ALG_TOL {
            return Err(ModelError::InvalidParameter(
                "coupling operator must be traceless".into(),
            ));
        }
        let eigen = herm_eigen(&op);
        Ok(Self { op, eigen })
    }

    pub fn sigma_z() -> Self {
        Self::new(QubitOperator::sigma_z()).unwrap()
    }

    pub fn sigma_x() -> Self {
        Self::new(QubitOperator::sigma_x()).unwrap()
    }

    pub fn sigma_y() -> Self {
        Self::new(QubitOperator::sigma_y()).unwrap()
    }

    pub fn operator(&self) -> &QubitOperator {
        &self.op
    }

    /// Eigenvalues (+|v|, -|v|), symmetric about zero.
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.eigen.values
    }

    pub fn eigenkets(&self) -> [Ket; 2] {
        self.eigen.kets
    }

    /// Projectors onto the descending-eigenvalue eigenkets.
    pub fn eigenprojectors(&self) -> [QubitOperator; 2] {
        [
            QubitOperator::projector(self.eigen.kets[0]),
            QubitOperator::projector(self.eigen.kets[1]),
        ]
    }

    /// Pauli vector of S (real since S is Hermitian and traceless).
    pub fn pauli_vector(&self) -> [f64; 3] {
        pauli_decompose(&self.op).real_parts().1
    }
}

/// Initial qubit state: an explicit density matrix or pure-state Bloch angles.
#[derive(Clone, Debug)]
pub enum InitialState {
    Density(QubitOperator),
    Bloch { theta: f64, phi: f64 },
}

impl InitialState {
    pub fn density(&self) -> Result<QubitOperator, ModelError> {
        match self {
            InitialState::Density(rho) => {
                if !rho.is_density(1e-10) {
                    return Err(ModelError::InvalidParameter(
                        "initial state is not a valid density matrix".into(),
                    ));
                }
                Ok(*rho)
            }
            InitialState::Bloch { theta, phi } => {
                Ok(QubitOperator::density_from_bloch(*theta, *phi))
            }
        }
    }
}

/// Ideal (noiseless) propagator `U_S(t)`.
///
/// Closed forms for the built-in models; midpoint-sampled ordered products of
/// `herm_exp` for custom drives, with O(step^2) local error per step.
pub fn ideal_propagator(model: &GateModel, t: f64) -> Result<QubitOperator, ModelError> {
    if t < 0.0 {
        return Err(ModelError::NegativeTime(t));
    }
    match model {
        GateModel::Adiabatic { a } => Ok(herm_exp(
            &QubitOperator::from_pauli_real(0.0, [0.0, 0.0, *a]),
            t,
        )),
        GateModel::RotatingWave { a, c } => {
            let uz = herm_exp(&QubitOperator::from_pauli_real(0.0, [0.0, 0.0, *a]), t);
            let ux = herm_exp(&QubitOperator::from_pauli_real(0.0, [*c, 0.0, 0.0]), t);
            Ok(uz * ux)
        }
        GateModel::Custom { sampler, step } => {
            let n = (t / step).ceil().max(1.0) as usize;
            let dt = t / n as f64;
            let mut u = QubitOperator::identity();
            for k in 0..n {
                let tm = (k as f64 + 0.5) * dt;
                let h = sampler(tm);
                if !h.is_hermitian(1e-10) {
                    return Err(ModelError::NonHermitianSample(tm));
                }
                u = herm_exp(&h, dt) * u;
            }
            Ok(u)
        }
    }
}

/// Interaction-picture coupling vector `s(t) = Tr[U_S^dag S U_S sigma]/2`.
pub fn interaction_coupling_vector(
    model: &GateModel,
    coupling: &CouplingOperator,
    t: f64,
) -> Result<[f64; 3], ModelError> {
    let u = ideal_propagator(model, t)?;
    let rotated = u.adjoint() * *coupling.operator() * u;
    Ok(pauli_decompose(&rotated).real_parts().1)
}

/// Ideal density evolution `U_S rho0 U_S^dag`.
pub fn ideal_density(
    model: &GateModel,
    rho0: &InitialState,
    t: f64,
) -> Result<QubitOperator, ModelError> {
    let u = ideal_propagator(model, t)?;
    let rho = rho0.density()?;
    Ok(u * rho * u.adjoint())
}

/// One harmonic of the coupling vector: `s(t) += ccos * cos(freq t) + csin *
/// sin(freq t)` componentwise.
#[derive(Clone, Copy, Debug)]
pub struct Harmonic {
    pub freq: f64,
    pub ccos: [f64; 3],
    pub csin: [f64; 3],
}

/// Exact harmonic decomposition of s(t) for the built-in models.
///
/// Conjugation by `U_S(t) = e^{-iat sigma_z} e^{-ict sigma_x}` rotates the
/// Pauli vector of S by `R_x(-2ct) R_z(-2at)`, so each component is a short
/// cosine/sine series at frequencies {0, 2a, 2c, 2a+2c, |2a-2c|}. Returns
/// `None` for custom models, which fall back to quadrature.
pub fn coupling_harmonics(model: &GateModel, coupling: &CouplingOperator) -> Option<Vec<Harmonic>> {
    let (a, c) = match model {
        GateModel::Adiabatic { a } => (*a, 0.0),
        GateModel::RotatingWave { a, c } => (*a, *c),
        GateModel::Custom { .. } => return None,
    };
    let s0 = coupling.pauli_vector();
    // w(t) = R_z(-2at) s0:
    //   wx =  s0x cos 2at + s0y sin 2at
    //   wy = -s0x sin 2at + s0y cos 2at
    //   wz =  s0z
    // s(t) = R_x(-2ct) w(t):
    //   sx = wx
    //   sy = wy cos 2ct + wz sin 2ct
    //   sz = -wy sin 2ct + wz cos 2ct
    let mut comp: [TrigSeries; 3] = Default::default();
    let wa = 2.0 * a;
    let wc = 2.0 * c;
    let wx = TrigSeries::from_terms(&[(wa, s0[0], s0[1])]);
    let wy = TrigSeries::from_terms(&[(wa, s0[1], -s0[0])]);
    let wz = TrigSeries::from_terms(&[(0.0, s0[2], 0.0)]);
    comp[0] = wx.clone();
    comp[1] = wy.mul_cos(wc).add(&wz.mul_sin(wc));
    comp[2] = wz.mul_cos(wc).sub(&wy.mul_sin(wc));

    // collect the union of frequencies
    let mut freqs: Vec<f64> = Vec::new();
    for s in &comp {
        for term in &s.terms {
            if !freqs.iter().any(|f| (f - term.0).abs() < 1e-12) {
                freqs.push(term.0);
            }
        }
    }
    freqs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out = Vec::new();
    for f in freqs {
        let mut h = Harmonic { freq: f, ccos: [0.0; 3], csin: [0.0; 3] };
        for (j, s) in comp.iter().enumerate() {
            for &(fr, ac, asn) in &s.terms {
                if (fr - f).abs() < 1e-12 {
                    h.ccos[j] += ac;
                    h.csin[j] += asn;
                }
            }
        }
        if h.ccos.iter().chain(h.csin.iter()).any(|x| x.abs() > 0.0) {
            out.push(h);
        }
    }
    Some(out)
}

/// Evaluate a harmonic decomposition at time t.
pub fn harmonics_eval(harmonics: &[Harmonic], t: f64) -> [f64; 3] {
    let mut s = [0.0; 3];
    for h in harmonics {
        let (cw, sw) = ((h.freq * t).cos(), (h.freq * t).sin());
        for j in 0..3 {
            s[j] += h.ccos[j] * cw + h.csin[j] * sw;
        }
    }
    s
}

/// Scalar trig series sum_k (a_k cos w_k t + b_k sin w_k t) with canonical
/// nonnegative frequencies.
#[derive(Clone, Debug, Default)]
struct TrigSeries {
    terms: Vec<(f64, f64, f64)>, // (freq, cos amp, sin amp)
}

impl TrigSeries {
    fn from_terms(terms: &[(f64, f64, f64)]) -> Self {
        let mut s = TrigSeries::default();
        for &t in terms {
            s.push(t.0, t.1, t.2);
        }
        s
    }

    fn push(&mut self, freq: f64, ac: f64, asn: f64) {
        // canonicalize sign; cos even, sin odd
        let (freq, ac, asn) = if freq < 0.0 { (-freq, ac, -asn) } else { (freq, ac, asn) };
        let (ac, asn) = if freq == 0.0 { (ac, 0.0) } else { (ac, asn) };
        if ac == 0.0 && asn == 0.0 {
            return;
        }
        for t in &mut self.terms {
            if (t.0 - freq).abs() < 1e-12 {
                t.1 += ac;
                t.2 += asn;
                return;
            }
        }
        self.terms.push((freq, ac, asn));
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &t in &other.terms {
            out.push(t.0, t.1, t.2);
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for &t in &other.terms {
            out.push(t.0, -t.1, -t.2);
        }
        out
    }

    /// Multiply the series by cos(w t) via product-to-sum.
    fn mul_cos(&self, w: f64) -> Self {
        let mut out = TrigSeries::default();
        for &(f, ac, asn) in &self.terms {
            // cos f t cos w t = [cos(f-w)t + cos(f+w)t]/2
            out.push(f - w, ac / 2.0, 0.0);
            out.push(f + w, ac / 2.0, 0.0);
            // sin f t cos w t = [sin(f+w)t + sin(f-w)t]/2
            out.push(f + w, 0.0, asn / 2.0);
            out.push(f - w, 0.0, asn / 2.0);
        }
        out
    }

    /// Multiply the series by sin(w t) via product-to-sum.
    fn mul_sin(&self, w: f64) -> Self {
        let mut out = TrigSeries::default();
        for &(f, ac, asn) in &self.terms {
            // cos f t sin w t = [sin(f+w)t - sin(f-w)t]/2
            out.push(f + w, 0.0, ac / 2.0);
            out.push(f - w, 0.0, -ac / 2.0);
            // sin f t sin w t = [cos(f-w)t - cos(f+w)t]/2
            out.push(f - w, asn / 2.0, 0.0);
            out.push(f + w, -asn / 2.0, 0.0);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn propagator_rejects_negative_time() {
        let m = GateModel::adiabatic(1.0).unwrap();
        assert!(ideal_propagator(&m, -0.1).is_err());
    }

    #[test]
    fn propagator_identity_at_zero() {
        for m in [
            GateModel::adiabatic(1.3).unwrap(),
            GateModel::rotating_wave(0.7, 2.0).unwrap(),
        ] {
            let u = ideal_propagator(&m, 0.0).unwrap();
            assert!(u.distance_max(&QubitOperator::identity()) < TOL);
        }
    }

    #[test]
    fn rotating_wave_not_gate() {
        // t = pi/2a with c = a sends A|+> + B|-> to A|-> - B|+>
        let a = 1.0;
        let m = GateModel::rotating_wave(a, a).unwrap();
        let u = ideal_propagator(&m, std::f64::consts::FRAC_PI_2 / a).unwrap();
        let plus = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let minus = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let up = u.apply(plus);
        let um = u.apply(minus);
        assert!((up[0]).norm() < TOL && (up[1] - C64::new(1.0, 0.0)).norm() < TOL);
        assert!((um[0] + C64::new(1.0, 0.0)).norm() < TOL && um[1].norm() < TOL);
    }

    #[test]
    fn rotating_wave_matches_custom_stepper() {
        let a = 1.0;
        let c = 2.0;
        let m = GateModel::rotating_wave(a, c).unwrap();
        let sampler: HamiltonianSampler = Arc::new(move |t: f64| {
            QubitOperator::from_pauli_real(
                0.0,
                [c * (2.0 * a * t).cos(), c * (2.0 * a * t).sin(), a],
            )
        });
        let custom = GateModel::custom(sampler, 1e-4).unwrap();
        let u1 = ideal_propagator(&m, 0.7).unwrap();
        let u2 = ideal_propagator(&custom, 0.7).unwrap();
        assert!(u1.distance_max(&u2) < 1e-6);
    }

    #[test]
    fn propagator_satisfies_schroedinger_equation() {
        // i [U(t+h) - U(t-h)] / 2h = H_S(t) U(t) + O(h^2)
        let m = GateModel::rotating_wave(1.0, 1.5).unwrap();
        let h = 1e-5;
        for &t in &[0.3, 1.1, 2.7] {
            let up = ideal_propagator(&m, t + h).unwrap();
            let um = ideal_propagator(&m, t - h).unwrap();
            let u = ideal_propagator(&m, t).unwrap();
            let lhs = (up - um).scale(C64::new(0.0, 1.0 / (2.0 * h)));
            let rhs = m.hamiltonian(t) * u;
            assert!(lhs.distance_max(&rhs) < 1e-7);
        }
    }

    #[test]
    fn coupling_vector_adiabatic_sigma_z_constant() {
        let m = GateModel::adiabatic(1.0).unwrap();
        let s = CouplingOperator::sigma_z();
        for &t in &[0.0, 0.5, 3.0, 17.0] {
            let v = interaction_coupling_vector(&m, &s, t).unwrap();
            assert!((v[2] - 1.0).abs() < TOL && v[0].abs() < TOL && v[1].abs() < TOL);
        }
    }

    #[test]
    fn coupling_vector_rotating_wave_closed_form() {
        // s(t) = (0, sin 2ct, cos 2ct) for S = sigma_z, independent of a
        let m = GateModel::rotating_wave(1.0, 1.0).unwrap();
        let s = CouplingOperator::sigma_z();
        let t = 0.5;
        let v = interaction_coupling_vector(&m, &s, t).unwrap();
        assert!(v[0].abs() < 1e-10);
        assert!((v[1] - (2.0 * t).sin()).abs() < 1e-10);
        assert!((v[2] - (2.0 * t).cos()).abs() < 1e-10);
    }

    #[test]
    fn coupling_vector_norm_conserved() {
        let s = CouplingOperator::new(QubitOperator::from_pauli_real(0.0, [0.4, -0.7, 1.1]))
            .unwrap();
        for m in [
            GateModel::adiabatic(0.8).unwrap(),
            GateModel::rotating_wave(0.8, 1.9).unwrap(),
        ] {
            let v0 = interaction_coupling_vector(&m, &s, 0.0).unwrap();
            let n0 = (v0[0] * v0[0] + v0[1] * v0[1] + v0[2] * v0[2]).sqrt();
            let mut t = 0.0;
            while t <= 20.0 {
                let v = interaction_coupling_vector(&m, &s, t).unwrap();
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                assert!((n - n0).abs() < 1e-10, "norm drift at t={t}");
                t += 1.37;
            }
        }
    }

    #[test]
    fn harmonics_match_direct_coupling_vector() {
        let s = CouplingOperator::new(QubitOperator::from_pauli_real(0.0, [0.3, 0.5, -0.8]))
            .unwrap();
        for m in [
            GateModel::adiabatic(1.2).unwrap(),
            GateModel::rotating_wave(1.2, 0.9).unwrap(),
            GateModel::rotating_wave(1.0, 1.0).unwrap(), // a = c frequency collision
        ] {
            let h = coupling_harmonics(&m, &s).unwrap();
            for &t in &[0.0, 0.3, 1.7, 6.9] {
                let direct = interaction_coupling_vector(&m, &s, t).unwrap();
                let fast = harmonics_eval(&h, t);
                for j in 0..3 {
                    assert!(
                        (direct[j] - fast[j]).abs() < 1e-10,
                        "component {j} at t={t}: {} vs {}",
                        direct[j],
                        fast[j]
                    );
                }
            }
        }
    }

    #[test]
    fn ideal_density_preserves_trace_and_fixed_point() {
        let m = GateModel::rotating_wave(1.0, 1.0).unwrap();
        let mixed = InitialState::Density(QubitOperator::identity().scale(C64::new(0.5, 0.0)));
        for &t in &[0.0, 0.9, 4.2] {
            let rho = ideal_density(&m, &mixed, t).unwrap();
            assert!(rho.distance_max(&QubitOperator::identity().scale(C64::new(0.5, 0.0))) < TOL);
        }
        let pure = InitialState::Bloch { theta: 1.1, phi: 0.4 };
        let rho = ideal_density(&m, &pure, 2.3).unwrap();
        assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < TOL);
        // spectrum preserved: pure stays pure
        let e = crate::pauli::herm_eigen(&rho.hermitian_part());
        assert!((e.values[0] - 1.0).abs() < 1e-10 && e.values[1].abs() < 1e-10);
    }

    #[test]
    fn not_gate_density_action() {
        let a = 1.0;
        let m = GateModel::rotating_wave(a, a).unwrap();
        let plus = InitialState::Bloch { theta: 0.0, phi: 0.0 };
        let rho = ideal_density(&m, &plus, std::f64::consts::FRAC_PI_2 / a).unwrap();
        // |+><+| -> |-><-|
        assert!((rho.m[1][1] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(rho.m[0][0].norm() < 1e-12);
    }
}
