//! Independent ground-truth generators: the exactly solvable pure-dephasing
//! (adiabatic) model and a brute-force few-mode bath propagated in a
//! truncated number-state space.

use crate::bath::{BathSpectrum, QuadratureSpec};
use crate::models::{ideal_propagator, CouplingOperator, GateModel, InitialState, ModelError};
use crate::pauli::QubitOperator;
use crate::shorttime::{short_time_decoherence, short_time_decoherence_discrete};
use crate::EvolveError;
use num_complex::Complex64 as C64;

/// Hilbert-space guard: 2 * prod(cutoff + 1) may not exceed this.
pub const DIMENSION_GUARD: usize = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("product space dimension {0} exceeds the guard {DIMENSION_GUARD}")]
    DimensionGuard(usize),
    #[error("adiabatic oracle requires a model commuting with the coupling (defect {0:.3e})")]
    NonCommuting(f64),
    #[error("step convergence failed: halving still changes the state by {0:.3e}")]
    StepConvergence(f64),
    #[error("invalid oracle input: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// Finite list of bath modes with a per-mode Fock cutoff and temperature.
///
/// Thermal initial conditions are realized as a convex mixture over initial
/// number states, truncated at occupation probability 1e-12.
#[derive(Clone, Debug)]
pub struct DiscreteBath {
    pub modes: Vec<(f64, f64)>,
    pub fock_cutoff: usize,
    pub temperature: f64,
}

impl DiscreteBath {
    pub fn new(modes: Vec<(f64, f64)>, fock_cutoff: usize, temperature: f64) -> Result<Self, OracleError> {
        for &(w, g2) in &modes {
            if !(w > 0.0) || g2 < 0.0 {
                return Err(OracleError::InvalidParameter(format!(
                    "mode (w={w}, g2={g2}) must have w > 0 and g2 >= 0"
                )));
            }
        }
        let b = Self { modes, fock_cutoff, temperature };
        let dim = b.dimension();
        if dim > DIMENSION_GUARD {
            return Err(OracleError::DimensionGuard(dim));
        }
        Ok(b)
    }

    pub fn bath_dimension(&self) -> usize {
        (self.fock_cutoff + 1).pow(self.modes.len() as u32)
    }

    pub fn dimension(&self) -> usize {
        2 * self.bath_dimension()
    }
}

/// Exact reduced state for models commuting with the coupling: populations in
/// the coupling eigenbasis follow the ideal phase, the off-diagonal element
/// is damped by the independent-boson decoherence function.
pub fn adiabatic_exact(
    bath: &BathSpectrum,
    model: &GateModel,
    coupling: &CouplingOperator,
    rho0: &InitialState,
    t: f64,
    q: &QuadratureSpec,
) -> Result<QubitOperator, OracleError> {
    check_commuting(model, coupling, t)?;
    let [lp, lm] = coupling.eigenvalues();
    let d = short_time_decoherence(bath, lp, lm, t, q)?;
    Ok(dephasing_assembly(model, coupling, rho0, t, d)?)
}

/// Discrete-mode variant of [`adiabatic_exact`] for like-for-like comparison
/// with [`few_mode_exact`].
pub fn adiabatic_exact_discrete(
    modes: &[(f64, f64)],
    temperature: f64,
    model: &GateModel,
    coupling: &CouplingOperator,
    rho0: &InitialState,
    t: f64,
) -> Result<QubitOperator, OracleError> {
    check_commuting(model, coupling, t)?;
    let [lp, lm] = coupling.eigenvalues();
    let d = short_time_decoherence_discrete(modes, temperature, lp, lm, t)?;
    Ok(dephasing_assembly(model, coupling, rho0, t, d)?)
}

fn check_commuting(model: &GateModel, coupling: &CouplingOperator, t: f64) -> Result<(), OracleError> {
    let s = coupling.operator();
    let mut defect: f64 = 0.0;
    for k in 0..=16 {
        let tk = t * k as f64 / 16.0;
        let h = model.hamiltonian(tk);
        defect = defect.max((h * *s - *s * h).norm_max());
    }
    if defect > 1e-10 {
        return Err(OracleError::NonCommuting(defect));
    }
    Ok(())
}

fn dephasing_assembly(
    model: &GateModel,
    coupling: &CouplingOperator,
    rho0: &InitialState,
    t: f64,
    d: C64,
) -> Result<QubitOperator, EvolveError> {
    let u = ideal_propagator(model, t)?;
    let rho0 = rho0.density()?;
    let [pp, pm] = coupling.eigenprojectors();
    let core = pp * rho0 * pp
        + pm * rho0 * pm
        + (pp * rho0 * pm).scale(d.exp())
        + (pm * rho0 * pp).scale(d.conj().exp());
    Ok(u * core * u.adjoint())
}

/// Result of a brute-force propagation, with step diagnostics.
#[derive(Clone, Debug)]
pub struct FewModeEvolution {
    pub rho: QubitOperator,
    /// Final step size used.
    pub step: f64,
    /// Change of the reduced state under the last step halving.
    pub step_defect: f64,
    /// Largest drift of any propagated vector norm from unity.
    pub norm_drift: f64,
}

/// Full-Hamiltonian propagation in the 2 x prod(cutoff+1) product space by
/// ordered exponentials (fourth-order commutator-free pairs on Gauss nodes),
/// followed by a bath trace.
///
/// The step starts at `0.05 / ||H||` and is halved until the reduced state
/// changes by less than `target` (the contract default is 1e-8).
pub fn few_mode_exact(
    dbath: &DiscreteBath,
    model: &GateModel,
    coupling: &CouplingOperator,
    rho0: &InitialState,
    t: f64,
    target: f64,
) -> Result<FewModeEvolution, OracleError> {
    if t < 0.0 {
        return Err(OracleError::Model(ModelError::NegativeTime(t)));
    }
    let rho0 = rho0.density()?;
    if t == 0.0 {
        return Ok(FewModeEvolution { rho: rho0, step: 0.0, step_defect: 0.0, norm_drift: 0.0 });
    }
    let propagator = ProductSpace::new(dbath, model, coupling);
    let initial_bath_states = thermal_bath_states(dbath);

    let h_norm = propagator.hamiltonian_norm_bound();
    let mut n_steps = ((t * h_norm) / 0.05).ceil().max(4.0) as usize;
    let mut prev: Option<QubitOperator> = None;
    let mut last_defect = f64::INFINITY;
    for _ in 0..12 {
        let (rho, norm_drift) = propagator.propagate(&initial_bath_states, &rho0, t, n_steps);
        if let Some(rho_prev) = &prev {
            last_defect = rho.distance_max(rho_prev);
            if last_defect <= target {
                return Ok(FewModeEvolution {
                    rho,
                    step: t / n_steps as f64,
                    step_defect: last_defect,
                    norm_drift,
                });
            }
        }
        prev = Some(rho);
        n_steps *= 2;
    }
    Err(OracleError::StepConvergence(last_defect))
}

/// Initial bath number states and weights for the thermal mixture.
fn thermal_bath_states(dbath: &DiscreteBath) -> Vec<(Vec<usize>, f64)> {
    let nm = dbath.modes.len();
    if dbath.temperature == 0.0 || nm == 0 {
        return vec![(vec![0; nm], 1.0)];
    }
    let kt = dbath.temperature;
    // per-mode geometric weights over 0..=cutoff
    let per_mode: Vec<Vec<f64>> = dbath
        .modes
        .iter()
        .map(|&(w, _)| {
            let q = (-w / kt).exp();
            let z: f64 = (0..=dbath.fock_cutoff).map(|n| q.powi(n as i32)).sum();
            (0..=dbath.fock_cutoff).map(|n| q.powi(n as i32) / z).collect()
        })
        .collect();
    let mut states = vec![(vec![], 1.0f64)];
    for weights in &per_mode {
        let mut next = Vec::new();
        for (prefix, p) in &states {
            for (n, wn) in weights.iter().enumerate() {
                let pn = p * wn;
                if pn >= 1e-12 {
                    let mut s = prefix.clone();
                    s.push(n);
                    next.push((s, pn));
                }
            }
        }
        states = next;
    }
    // renormalize the truncated mixture
    let total: f64 = states.iter().map(|(_, p)| p).sum();
    for s in &mut states {
        s.1 /= total;
    }
    states
}

struct ProductSpace<'a> {
    dbath: &'a DiscreteBath,
    model: &'a GateModel,
    s_op: QubitOperator,
    nb: usize,
    strides: Vec<usize>,
    diag_bath: Vec<f64>,
}

impl<'a> ProductSpace<'a> {
    fn new(dbath: &'a DiscreteBath, model: &'a GateModel, coupling: &CouplingOperator) -> Self {
        let nm = dbath.modes.len();
        let d = dbath.fock_cutoff + 1;
        let nb = dbath.bath_dimension();
        let mut strides = vec![0usize; nm];
        let mut acc = 1usize;
        for k in 0..nm {
            strides[k] = acc;
            acc *= d;
        }
        // H_B diagonal over bath indices
        let mut diag_bath = vec![0.0; nb];
        for (b, slot) in diag_bath.iter_mut().enumerate() {
            let mut e = 0.0;
            for k in 0..nm {
                let nk = (b / strides[k]) % d;
                e += dbath.modes[k].0 * nk as f64;
            }
            *slot = e;
        }
        Self { dbath, model, s_op: *coupling.operator(), nb, strides, diag_bath }
    }

    fn hamiltonian_norm_bound(&self) -> f64 {
        let d = self.dbath.fock_cutoff + 1;
        let mut hb = 0.0;
        let mut coup = 0.0;
        for &(w, g2) in &self.dbath.modes {
            hb += w * (d - 1) as f64;
            coup += 2.0 * g2.sqrt() * (d as f64).sqrt();
        }
        let smax = crate::pauli::herm_eigen(&self.s_op).values[0].abs();
        let mut hs: f64 = 0.0;
        for k in 0..=8 {
            hs = hs.max(self.model.hamiltonian(0.37 * k as f64).norm_max() * 2.0);
        }
        hs + hb + coup * smax
    }

    /// out = [hs_eff (x) I + bath_scale (H_B + S (x) X)] psi
    ///
    /// Only the drive part of H is time dependent, so a weighted two-node
    /// combination collapses to one effective system matrix plus a common
    /// scale on the static parts.
    fn apply_h_eff(
        &self,
        hs_eff: &QubitOperator,
        bath_scale: f64,
        psi: &[C64],
        out: &mut [C64],
        scratch: &mut [C64],
    ) {
        let nb = self.nb;
        let d = self.dbath.fock_cutoff + 1;
        for b in 0..nb {
            let p0 = psi[b];
            let p1 = psi[nb + b];
            let e = C64::new(bath_scale * self.diag_bath[b], 0.0);
            out[b] = hs_eff.m[0][0] * p0 + hs_eff.m[0][1] * p1 + e * p0;
            out[nb + b] = hs_eff.m[1][0] * p0 + hs_eff.m[1][1] * p1 + e * p1;
        }
        // coupling: S (x) sum_k sqrt(g2_k)(a_k + a_k^dag)
        scratch.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for k in 0..self.dbath.modes.len() {
            let g = bath_scale * self.dbath.modes[k].1.sqrt();
            if g == 0.0 {
                continue;
            }
            let stride = self.strides[k];
            for s in 0..2 {
                let base = s * nb;
                for b in 0..nb {
                    let nk = (b / stride) % d;
                    let mut acc = C64::new(0.0, 0.0);
                    // a_k: pulls from n_k + 1
                    if nk + 1 < d {
                        acc += psi[base + b + stride] * ((nk + 1) as f64).sqrt();
                    }
                    // a_k^dag: pulls from n_k - 1
                    if nk > 0 {
                        acc += psi[base + b - stride] * (nk as f64).sqrt();
                    }
                    scratch[base + b] += acc * g;
                }
            }
        }
        for b in 0..nb {
            let q0 = scratch[b];
            let q1 = scratch[nb + b];
            out[b] += self.s_op.m[0][0] * q0 + self.s_op.m[0][1] * q1;
            out[nb + b] += self.s_op.m[1][0] * q0 + self.s_op.m[1][1] * q1;
        }
    }

    /// psi <- exp(-i dt (wa H(ta) + wb H(tb))) psi via a Taylor series; the
    /// step bound keeps the exponent norm small so few terms are needed.
    fn apply_exp_pair(
        &self,
        psi: &mut [C64],
        dt: f64,
        wa: f64,
        ta: f64,
        wb: f64,
        tb: f64,
        bufs: &mut (Vec<C64>, Vec<C64>, Vec<C64>),
    ) {
        let dim = psi.len();
        let (term, tmp, scratch) = bufs;
        term.copy_from_slice(psi);
        let hs_eff = self.model.hamiltonian(ta).scale(C64::new(wa, 0.0))
            + self.model.hamiltonian(tb).scale(C64::new(wb, 0.0));
        let bath_scale = wa + wb;
        for k in 1..64 {
            self.apply_h_eff(&hs_eff, bath_scale, term, tmp, scratch);
            let factor = C64::new(0.0, -dt / k as f64);
            let mut tnorm = 0.0;
            let mut pnorm = 0.0;
            for i in 0..dim {
                term[i] = tmp[i] * factor;
                psi[i] += term[i];
                tnorm += term[i].norm_sqr();
                pnorm += psi[i].norm_sqr();
            }
            if tnorm.sqrt() < 1e-16 * pnorm.sqrt().max(1e-300) {
                break;
            }
        }
    }

    fn propagate(
        &self,
        initial_bath_states: &[(Vec<usize>, f64)],
        rho0: &QubitOperator,
        t: f64,
        n_steps: usize,
    ) -> (QubitOperator, f64) {
        let nb = self.nb;
        let dim = 2 * nb;
        let dt = t / n_steps as f64;
        let sqrt3_6 = 3.0f64.sqrt() / 6.0;
        let (c1, c2) = (0.5 - sqrt3_6, 0.5 + sqrt3_6);
        let (x1, x2) = (0.25 - sqrt3_6, 0.25 + sqrt3_6);
        let mut rho = QubitOperator::zero();
        let mut norm_drift: f64 = 0.0;
        let mut bufs = (
            vec![C64::new(0.0, 0.0); dim],
            vec![C64::new(0.0, 0.0); dim],
            vec![C64::new(0.0, 0.0); dim],
        );
        for (nvec, p) in initial_bath_states {
            let mut bindex = 0usize;
            for (k, &n) in nvec.iter().enumerate() {
                bindex += n * self.strides[k];
            }
            // propagate both system basis vectors over this bath state
            let mut psis: [Vec<C64>; 2] = [vec![C64::new(0.0, 0.0); dim], vec![C64::new(0.0, 0.0); dim]];
            psis[0][bindex] = C64::new(1.0, 0.0);
            psis[1][nb + bindex] = C64::new(1.0, 0.0);
            for step in 0..n_steps {
                let t0 = step as f64 * dt;
                let (ta, tb) = (t0 + c1 * dt, t0 + c2 * dt);
                for psi in psis.iter_mut() {
                    // right factor first: early node heavy
                    self.apply_exp_pair(psi, dt, x2, ta, x1, tb, &mut bufs);
                    // left factor: late node heavy
                    self.apply_exp_pair(psi, dt, x1, ta, x2, tb, &mut bufs);
                }
            }
            for psi in psis.iter() {
                let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                norm_drift = norm_drift.max((n - 1.0).abs());
            }
            // rho_S[a,b] += p * sum_ij rho0[i][j] <psi_j[b,:]|psi_i[a,:]>
            for a in 0..2 {
                for b in 0..2 {
                    let mut val = C64::new(0.0, 0.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            let mut inner = C64::new(0.0, 0.0);
                            for n in 0..nb {
                                inner += psis[i][a * nb + n] * psis[j][b * nb + n].conj();
                            }
                            val += rho0.m[i][j] * inner;
                        }
                    }
                    rho.m[a][b] += val * *p;
                }
            }
        }
        (rho, norm_drift)
    }
}
