//! Second-order coupling-perturbative evolution engine: frequency-resolved
//! spin kernels, the 8x8 decoherence table over Pauli-projector sign triples,
//! and assembly of the reduced density matrix.

pub mod harmonic;

use crate::bath::{spectral_integral_vec, thermal_factor, BathSpectrum, QuadratureSpec};
use crate::models::{
    coupling_harmonics, ideal_propagator, interaction_coupling_vector, CouplingOperator,
    GateModel, InitialState,
};
use crate::pauli::QubitOperator;
use crate::quad::integrate_adaptive;
use crate::EvolveError;
use harmonic::{HarmonicKernels, SpinKernelPoint};
use num_complex::Complex64 as C64;

/// Number of sign triples (x, y, z) in {+1, -1}^3.
pub const N_TRIPLES: usize = 8;

/// Sign triple for a table index; bit 2 is the sigma_x sign, bit 1 sigma_y,
/// bit 0 sigma_z, with 0 = +1 and 1 = -1. Index 0 is (+,+,+), 7 is (-,-,-).
pub fn sign_triple(idx: usize) -> [f64; 3] {
    let sign = |b: usize| if idx & b == 0 { 1.0 } else { -1.0 };
    [sign(4), sign(2), sign(1)]
}

/// Label like "+-+" for CSV output and diagnostics.
pub fn triple_label(idx: usize) -> String {
    sign_triple(idx)
        .iter()
        .map(|&s| if s > 0.0 { '+' } else { '-' })
        .collect()
}

/// Projector chain `|x><x|y><y|z><z|` over the eigenkets of sigma_x, sigma_y,
/// sigma_z with the triple's signs. The eight chains resolve the identity.
pub fn projector_chain(idx: usize) -> QubitOperator {
    let s = sign_triple(idx);
    let px = QubitOperator::identity() + QubitOperator::sigma_x().scale(C64::new(s[0], 0.0));
    let py = QubitOperator::identity() + QubitOperator::sigma_y().scale(C64::new(s[1], 0.0));
    let pz = QubitOperator::identity() + QubitOperator::sigma_z().scale(C64::new(s[2], 0.0));
    (px * py * pz).scale(C64::new(0.125, 0.0))
}

pub fn projector_chains() -> [QubitOperator; N_TRIPLES] {
    std::array::from_fn(projector_chain)
}

/// Frequency-resolved spin kernels `f(w, t)` and `f_tilde(w, t)`:
/// time integrals of the coupling vector against `cos w(t' - t)` and
/// `sin w(t' - t)`.
#[derive(Clone, Copy, Debug)]
pub struct SpinKernel {
    pub f: [f64; 3],
    pub f_tilde: [f64; 3],
}

/// Derived kernels: the componentwise-product vector F and the double-time
/// integral Y.
#[derive(Clone, Copy, Debug)]
pub struct MagnusKernels {
    pub f_cross: [f64; 3],
    pub y: [f64; 3],
}

fn time_panel_cap(model: &GateModel, omega: f64) -> f64 {
    let drive_cap = std::f64::consts::PI / (2.0 * model.max_drive_frequency().max(1e-12));
    if omega > 0.0 {
        drive_cap.min(std::f64::consts::PI / omega)
    } else {
        drive_cap
    }
}

/// Adaptive time quadrature of the coupling vector against the two phase
/// kernels, with panels bounded by both the frequency and the drive rate.
pub fn spin_kernels(
    model: &GateModel,
    coupling: &CouplingOperator,
    omega: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<SpinKernel, EvolveError> {
    let mut failure: Option<EvolveError> = None;
    let mut integrand = |u: f64, out: &mut [f64]| {
        match interaction_coupling_vector(model, coupling, u) {
            Ok(s) => {
                let (cw, sw) = ((omega * (u - t)).cos(), (omega * (u - t)).sin());
                for j in 0..3 {
                    out[j] = s[j] * cw;
                    out[3 + j] = s[j] * sw;
                }
            }
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e.into());
                }
                out.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    };
    let r = integrate_adaptive(
        &mut integrand,
        6,
        0.0,
        t,
        time_panel_cap(model, omega),
        q.rel_tol,
        q.abs_tol,
    )
    .map_err(crate::bath::BathError::from)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(SpinKernel {
        f: [r.values[0], r.values[1], r.values[2]],
        f_tilde: [r.values[3], r.values[4], r.values[5]],
    })
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn f_cross_vector(f: [f64; 3], ft: [f64; 3]) -> [f64; 3] {
    [
        f[1] * f[2] + ft[1] * ft[2],
        -f[0] * f[2] - ft[0] * ft[2],
        f[0] * f[1] + ft[0] * ft[1],
    ]
}

/// F and Y by nested adaptive time quadrature: the inner integral of the
/// double-time kernel is the spin kernel at the running upper limit, run at
/// a tenfold tighter tolerance.
pub fn magnus_kernels(
    model: &GateModel,
    coupling: &CouplingOperator,
    omega: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<MagnusKernels, EvolveError> {
    let sk = spin_kernels(model, coupling, omega, t, q)?;
    let inner_q = QuadratureSpec { rel_tol: q.rel_tol / 10.0, ..*q };
    let mut failure: Option<EvolveError> = None;
    let mut integrand = |u: f64, out: &mut [f64]| {
        let res = interaction_coupling_vector(model, coupling, u)
            .map_err(EvolveError::from)
            .and_then(|s| Ok((s, spin_kernels(model, coupling, omega, u, &inner_q)?)));
        match res {
            Ok((s, inner)) => {
                let c = cross(s, inner.f);
                out.copy_from_slice(&c);
            }
            Err(e) => {
                if failure.is_none() {
                    failure = Some(e);
                }
                out.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    };
    let r = integrate_adaptive(
        &mut integrand,
        3,
        0.0,
        t,
        time_panel_cap(model, omega),
        q.rel_tol,
        q.abs_tol,
    )
    .map_err(crate::bath::BathError::from)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(MagnusKernels {
        f_cross: f_cross_vector(sk.f, sk.f_tilde),
        y: [r.values[0], r.values[1], r.values[2]],
    })
}

// Moment layout produced per frequency node and integrated against the
// spectral weight: 0..6 symmetric f_j f_l coth, 6..12 symmetric
// f~_j f~_l coth, 12..21 f_j f~_l row-major, 21..24 Y, 24..27 F.
const N_MOMENTS: usize = 27;
const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn write_moments(p: &SpinKernelPoint, coth: f64, out: &mut [f64]) {
    for (k, &(a, b)) in SYM_PAIRS.iter().enumerate() {
        out[k] = p.f[a] * p.f[b] * coth;
        out[6 + k] = p.f_tilde[a] * p.f_tilde[b] * coth;
    }
    for j in 0..3 {
        for l in 0..3 {
            out[12 + 3 * j + l] = p.f[j] * p.f_tilde[l];
        }
    }
    out[21..24].copy_from_slice(&p.y);
    out[24..27].copy_from_slice(&f_cross_vector(p.f, p.f_tilde));
}

/// 8x8 decoherence table over ordered sign-triple pairs.
///
/// Diagonal entries are exactly zero, real parts nonpositive, and
/// `D(x', x) = conj(D(x, x'))`.
#[derive(Clone, Debug)]
pub struct MagnusDecoherenceTable {
    pub d: [[C64; N_TRIPLES]; N_TRIPLES],
    pub t: f64,
}

impl MagnusDecoherenceTable {
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.d[row][col]
    }
}

fn quad_form(sym: &[f64], d: [f64; 3]) -> f64 {
    let mut acc = 0.0;
    for (k, &(a, b)) in SYM_PAIRS.iter().enumerate() {
        let w = if a == b { 1.0 } else { 2.0 };
        acc += w * d[a] * d[b] * sym[k];
    }
    acc
}

fn assemble_table(m: &[f64], t: f64) -> MagnusDecoherenceTable {
    let m3 = |j: usize, l: usize| m[12 + 3 * j + l];
    let mut d = [[C64::new(0.0, 0.0); N_TRIPLES]; N_TRIPLES];
    for i in 0..N_TRIPLES {
        let x = sign_triple(i);
        for jdx in 0..N_TRIPLES {
            if i == jdx {
                continue;
            }
            let xp = sign_triple(jdx);
            let dl = [x[0] - xp[0], x[1] - xp[1], x[2] - xp[2]];
            let sm = [x[0] + xp[0], x[1] + xp[1], x[2] + xp[2]];
            // real damping part is a negated sum of squares; clamp the
            // quadrature residue so the sign invariant is exact
            let re = (-0.5 * (quad_form(&m[0..6], dl) + quad_form(&m[6..12], dl))).min(0.0);
            let mut dot_dyf = 0.0;
            let mut dot_dsum = 0.0;
            for a in 0..3 {
                dot_dyf += dl[a] * (m[21 + a] - m[24 + a]);
                for b in 0..3 {
                    dot_dsum += dl[a] * m3(a, b) * sm[b];
                }
            }
            let bracket = (x[1] * x[0] - xp[1] * xp[0]) * m3(1, 0)
                + (x[2] * x[0] - xp[2] * xp[0]) * m3(2, 0)
                + (x[2] * x[1] - xp[2] * xp[1]) * m3(2, 1);
            let im = -(dot_dyf + dot_dsum) + 2.0 * bracket;
            d[i][jdx] = C64::new(re, im);
        }
    }
    MagnusDecoherenceTable { d, t }
}

/// Decoherence table for a continuum bath.
///
/// For the built-in models the frequency-resolved kernels come from the
/// closed harmonic forms; custom drives fall back to the nested adaptive
/// quadratures. Either way one adaptive pass over the frequency axis
/// integrates all 27 kernel moments simultaneously.
pub fn magnus_decoherence_table(
    model: &GateModel,
    coupling: &CouplingOperator,
    bath: &BathSpectrum,
    t: f64,
    q: &QuadratureSpec,
) -> Result<MagnusDecoherenceTable, EvolveError> {
    if bath.j == 0.0 {
        return Ok(assemble_table(&[0.0; N_MOMENTS], t));
    }
    let kt = bath.temperature;
    match coupling_harmonics(model, coupling) {
        Some(h) => {
            let hk = HarmonicKernels::new(h);
            let kernel = |w: f64, out: &mut [f64]| {
                let p = hk.eval(w, t);
                let coth = thermal_factor(w, kt).unwrap_or(1.0);
                write_moments(&p, coth, out);
            };
            let m = spectral_integral_vec(bath, N_MOMENTS, kernel, t, q)?;
            Ok(assemble_table(&m, t))
        }
        None => {
            let inner_q = QuadratureSpec { rel_tol: (q.rel_tol * 0.1).max(1e-12), ..*q };
            let mut failure: Option<String> = None;
            let kernel = |w: f64, out: &mut [f64]| {
                let res = spin_kernels(model, coupling, w, t, &inner_q).and_then(|sk| {
                    let mk = magnus_kernels(model, coupling, w, t, &inner_q)?;
                    Ok((sk, mk))
                });
                match res {
                    Ok((sk, mk)) => {
                        let p = SpinKernelPoint { f: sk.f, f_tilde: sk.f_tilde, y: mk.y };
                        let coth = thermal_factor(w, kt).unwrap_or(1.0);
                        write_moments(&p, coth, out);
                    }
                    Err(e) => {
                        if failure.is_none() {
                            failure = Some(e.to_string());
                        }
                        out.iter_mut().for_each(|v| *v = 0.0);
                    }
                }
            };
            let m = spectral_integral_vec(bath, N_MOMENTS, kernel, t, q)?;
            if let Some(msg) = failure {
                return Err(EvolveError::Bath(crate::bath::BathError::InvalidParameter(
                    format!("kernel quadrature failed inside the frequency integral: {msg}"),
                )));
            }
            Ok(assemble_table(&m, t))
        }
    }
}

/// Decoherence table for an explicit discrete mode list `(w_k, |g_k|^2)`.
pub fn magnus_decoherence_table_discrete(
    model: &GateModel,
    coupling: &CouplingOperator,
    modes: &[(f64, f64)],
    temperature: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<MagnusDecoherenceTable, EvolveError> {
    let hk = coupling_harmonics(model, coupling).map(HarmonicKernels::new);
    let mut m = [0.0; N_MOMENTS];
    let mut buf = [0.0; N_MOMENTS];
    for &(w, g2) in modes {
        let p = match &hk {
            Some(h) => h.eval(w, t),
            None => {
                let sk = spin_kernels(model, coupling, w, t, q)?;
                let mk = magnus_kernels(model, coupling, w, t, q)?;
                SpinKernelPoint { f: sk.f, f_tilde: sk.f_tilde, y: mk.y }
            }
        };
        let coth = thermal_factor(w, temperature).map_err(crate::bath::BathError::from)?;
        write_moments(&p, coth, &mut buf);
        for k in 0..N_MOMENTS {
            m[k] += g2 * buf[k];
        }
    }
    Ok(assemble_table(&m, t))
}

/// Magnus evolution result with its table and the trace diagnostics.
#[derive(Clone, Debug)]
pub struct MagnusEvolution {
    pub rho: QubitOperator,
    pub table: MagnusDecoherenceTable,
    /// |Tr rho - 1| of the raw 64-term assembly.
    pub trace_defect: f64,
    pub renormalized: bool,
}

/// Assemble the reduced state from a decoherence table:
/// `rho = sum_{x,x'} e^{D(x,x')} U_S M_x rho0 M_x'^dag U_S^dag`, renormalized
/// to unit trace when the raw trace drifts beyond 1e-12.
pub fn assemble_magnus_state(
    model: &GateModel,
    rho0: &InitialState,
    table: MagnusDecoherenceTable,
) -> Result<MagnusEvolution, EvolveError> {
    let u = ideal_propagator(model, table.t)?;
    let rho0 = rho0.density()?;
    let chains = projector_chains();
    let flank: Vec<QubitOperator> = chains.iter().map(|m| u * *m).collect();
    let mut rho = QubitOperator::zero();
    for i in 0..N_TRIPLES {
        for j in 0..N_TRIPLES {
            let w = table.d[i][j].exp();
            rho = rho + (flank[i] * rho0 * flank[j].adjoint()).scale(w);
        }
    }
    let tr = rho.trace();
    let trace_defect = (tr - C64::new(1.0, 0.0)).norm();
    let renormalized = trace_defect > 1e-12;
    if renormalized {
        rho = rho.scale(C64::new(1.0, 0.0) / tr);
    }
    Ok(MagnusEvolution { rho, table, trace_defect, renormalized })
}

/// Reduced density matrix under the second-order coupling expansion.
pub fn evolve_magnus(
    model: &GateModel,
    coupling: &CouplingOperator,
    bath: &BathSpectrum,
    rho0: &InitialState,
    t: f64,
    q: &QuadratureSpec,
) -> Result<QubitOperator, EvolveError> {
    Ok(evolve_magnus_with_diagnostics(model, coupling, bath, rho0, t, q)?.rho)
}

pub fn evolve_magnus_with_diagnostics(
    model: &GateModel,
    coupling: &CouplingOperator,
    bath: &BathSpectrum,
    rho0: &InitialState,
    t: f64,
    q: &QuadratureSpec,
) -> Result<MagnusEvolution, EvolveError> {
    let table = magnus_decoherence_table(model, coupling, bath, t, q)?;
    assemble_magnus_state(model, rho0, table)
}

/// Discrete-mode Magnus evolution for like-for-like oracle comparisons.
pub fn evolve_magnus_discrete(
    model: &GateModel,
    coupling: &CouplingOperator,
    modes: &[(f64, f64)],
    temperature: f64,
    rho0: &InitialState,
    t: f64,
    q: &QuadratureSpec,
) -> Result<QubitOperator, EvolveError> {
    let table = magnus_decoherence_table_discrete(model, coupling, modes, temperature, t, q)?;
    Ok(assemble_magnus_state(model, rho0, table)?.rho)
}
