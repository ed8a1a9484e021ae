//! Continuum bath description `Upsilon(w)|g(w)|^2 = J w^n e^(-w/w_c)`, the
//! thermal factor `coth(w/2kT)`, and the frequency-integration entry points
//! used by both evolution engines.

use crate::quad::{integrate_adaptive, QuadError};
use num_complex::Complex64 as C64;

#[derive(Debug, thiserror::Error)]
pub enum BathError {
    #[error("invalid bath parameter: {0}")]
    InvalidParameter(String),
    #[error("thermal factor requires omega > 0, got {0}")]
    NonPositiveFrequency(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Power-law bath with exponential cutoff: spectral weight
/// `J w^n exp(-w / omega_c)` and temperature `kT` (Boltzmann constant
/// absorbed).
#[derive(Clone, Copy, Debug)]
pub struct BathSpectrum {
    pub j: f64,
    pub n: f64,
    pub omega_c: f64,
    pub temperature: f64,
}

impl BathSpectrum {
    pub fn new(j: f64, n: f64, omega_c: f64, temperature: f64) -> Result<Self, BathError> {
        if !(omega_c > 0.0) {
            return Err(BathError::InvalidParameter(format!(
                "omega_c must be > 0, got {omega_c}"
            )));
        }
        if j < 0.0 {
            return Err(BathError::InvalidParameter(format!("J must be >= 0, got {j}")));
        }
        if temperature < 0.0 {
            return Err(BathError::InvalidParameter(format!(
                "temperature must be >= 0, got {temperature}"
            )));
        }
        Ok(Self { j, n, omega_c, temperature })
    }

    /// Spectral weight `J w^n e^(-w/w_c)` at frequency `w > 0`.
    pub fn weight(&self, w: f64) -> f64 {
        self.j * w.powf(self.n) * (-w / self.omega_c).exp()
    }
}

/// Tolerances and domain control for the frequency quadrature.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSpec {
    /// Relative tolerance on every requested component.
    pub rel_tol: f64,
    /// Absolute floor below which a component is accepted.
    pub abs_tol: f64,
    /// Upper integration limit as a multiple of `omega_c`.
    pub tail_cut: f64,
    /// Small-frequency switch point; `0.0` resolves to `1e-6 * omega_c`.
    pub omega_eps: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-16, tail_cut: 60.0, omega_eps: 0.0 }
    }
}

impl QuadratureSpec {
    pub fn validated(self) -> Result<Self, BathError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(BathError::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.tail_cut < 20.0 {
            return Err(BathError::InvalidParameter(format!(
                "tail_cut must be >= 20, got {}",
                self.tail_cut
            )));
        }
        if self.omega_eps < 0.0 {
            return Err(BathError::InvalidParameter("omega_eps must be >= 0".into()));
        }
        Ok(self)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub(crate) fn resolve_omega_eps(&self, omega_c: f64) -> f64 {
        if self.omega_eps > 0.0 {
            self.omega_eps
        } else {
            1e-6 * omega_c
        }
    }
}

/// `coth(w / 2kT)`; exactly 1 at `kT = 0`, small-argument series
/// `2kT/w + w/6kT` below `w/2kT = 1e-4`.
pub fn thermal_factor(omega: f64, temperature: f64) -> Result<f64, BathError> {
    if !(omega > 0.0) {
        return Err(BathError::NonPositiveFrequency(omega));
    }
    if temperature == 0.0 {
        return Ok(1.0);
    }
    let x = omega / (2.0 * temperature);
    if x < 1e-4 {
        Ok(1.0 / x + x / 3.0)
    } else {
        Ok(1.0 / x.tanh())
    }
}

/// Panel-width cap resolving oscillations at evolution time `t`.
pub(crate) fn oscillation_cap(t: f64) -> f64 {
    if t > 0.0 {
        std::f64::consts::PI / t
    } else {
        f64::INFINITY
    }
}

/// Output of an integrable kernel; implemented for real and complex values.
pub trait KernelValue: Copy {
    const DIM: usize;
    fn write(self, out: &mut [f64]);
    fn read(buf: &[f64]) -> Self;
}

impl KernelValue for f64 {
    const DIM: usize = 1;
    fn write(self, out: &mut [f64]) {
        out[0] = self;
    }
    fn read(buf: &[f64]) -> Self {
        buf[0]
    }
}

impl KernelValue for C64 {
    const DIM: usize = 2;
    fn write(self, out: &mut [f64]) {
        out[0] = self.re;
        out[1] = self.im;
    }
    fn read(buf: &[f64]) -> Self {
        C64::new(buf[0], buf[1])
    }
}

/// Adaptive evaluation of `int_0^inf J w^n e^(-w/w_c) kernel(w, t) dw`,
/// truncated at `tail_cut * omega_c`, with panels no wider than `pi/t`.
///
/// Below `omega_eps` the kernel is evaluated at `omega_eps` itself, so
/// kernels only need well-defined small-frequency limits there.
pub fn spectral_integral<K: KernelValue>(
    bath: &BathSpectrum,
    kernel: impl Fn(f64, f64) -> K,
    t: f64,
    q: &QuadratureSpec,
) -> Result<K, BathError> {
    let eps = q.resolve_omega_eps(bath.omega_c);
    let upper = q.tail_cut * bath.omega_c;
    let mut buf = vec![0.0; K::DIM];
    let mut f = |w: f64, out: &mut [f64]| {
        let weval = w.max(eps);
        kernel(weval, t).write(&mut buf);
        let wt = bath.weight(w);
        for c in 0..K::DIM {
            out[c] = wt * buf[c];
        }
    };
    let r = integrate_adaptive(
        &mut f,
        K::DIM,
        0.0,
        upper,
        oscillation_cap(t),
        q.rel_tol,
        q.abs_tol,
    )?;
    Ok(K::read(&r.values))
}

/// Vector-kernel variant used by the Magnus engine: one pass over the
/// frequency axis integrates every requested moment simultaneously.
pub(crate) fn spectral_integral_vec(
    bath: &BathSpectrum,
    dim: usize,
    mut kernel: impl FnMut(f64, &mut [f64]),
    t: f64,
    q: &QuadratureSpec,
) -> Result<Vec<f64>, BathError> {
    let eps = q.resolve_omega_eps(bath.omega_c);
    let upper = q.tail_cut * bath.omega_c;
    let mut f = |w: f64, out: &mut [f64]| {
        kernel(w.max(eps), out);
        let wt = bath.weight(w);
        for c in out.iter_mut() {
            *c *= wt;
        }
    };
    let r = integrate_adaptive(&mut f, dim, 0.0, upper, oscillation_cap(t), q.rel_tol, q.abs_tol)?;
    Ok(r.values)
}

/// Weighted sum `sum_k |g_k|^2 kernel(w_k, t)` over discrete modes
/// `(w_k, |g_k|^2)`.
pub fn discrete_mode_sum<K>(
    modes: &[(f64, f64)],
    kernel: impl Fn(f64, f64) -> K,
    t: f64,
) -> Result<K, BathError>
where
    K: KernelValue + std::ops::Add<Output = K> + std::ops::Mul<f64, Output = K> + Default,
{
    for &(w, _) in modes {
        if !(w > 0.0) {
            return Err(BathError::NonPositiveFrequency(w));
        }
    }
    let mut acc = K::default();
    for &(w, g2) in modes {
        acc = acc + kernel(w, t) * g2;
    }
    Ok(acc)
}

/// `(1 - cos(w t)) / w^2`, series-stabilized near `w t = 0`.
pub fn kernel_one_minus_cos(w: f64, t: f64) -> f64 {
    let x = w * t;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        t * t * (0.5 - x2 / 24.0 + x2 * x2 / 720.0)
    } else {
        (1.0 - x.cos()) / (w * w)
    }
}

/// `(sin(w t) - w t) / w^2`, series-stabilized near `w t = 0`.
pub fn kernel_sin_minus_linear(w: f64, t: f64) -> f64 {
    let x = w * t;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        t * t * x * (-1.0 / 6.0 + x2 / 120.0 - x2 * x2 / 5040.0)
    } else {
        (x.sin() - x) / (w * w)
    }
}
