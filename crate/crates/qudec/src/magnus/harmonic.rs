//! Closed-form spin kernels for harmonic drive decompositions.
//!
//! When the interaction-picture coupling vector is a short trigonometric
//! series (the built-in models), the kernel integrals reduce to elementary
//! primitives evaluated with small-argument series where the denominators
//! vanish. The generic adaptive-quadrature path stays available for custom
//! drives and cross-checks these forms in the tests.

use crate::models::Harmonic;
use crate::pauli::{cosc, sinc};
use num_complex::Complex64 as C64;

/// f, f-tilde and Y at one (frequency, time) point.
#[derive(Clone, Copy, Debug, Default)]
pub struct SpinKernelPoint {
    pub f: [f64; 3],
    pub f_tilde: [f64; 3],
    pub y: [f64; 3],
}

/// `int_0^t cos(k u + phi) du`
fn prim_cos(k: f64, phi: f64, t: f64) -> f64 {
    t * (phi.cos() * sinc(k * t) - phi.sin() * cosc(k * t))
}

/// `int_0^t sin(k u + phi) du`
fn prim_sin(k: f64, phi: f64, t: f64) -> f64 {
    t * (phi.cos() * cosc(k * t) + phi.sin() * sinc(k * t))
}

/// `int_0^t e^{iru} du = t e^{irt/2} sinc(rt/2)`
fn cexp_integral(r: f64, t: f64) -> C64 {
    let half = r * t / 2.0;
    C64::new(0.0, half).exp() * (t * sinc(half))
}

/// `g_k(x) = int_0^1 u^k e^{ixu} du` for k = 0..=4.
fn gk(k: usize, x: f64) -> C64 {
    if x.abs() < 6.0 {
        // series: sum_j (ix)^j / (j! (k + j + 1))
        let ix = C64::new(0.0, x);
        let mut term = C64::new(1.0, 0.0);
        let mut sum = C64::new(1.0 / (k as f64 + 1.0), 0.0);
        for j in 1..60 {
            term *= ix / j as f64;
            let add = term / (k as f64 + j as f64 + 1.0);
            sum += add;
            if add.norm() < 1e-17 * sum.norm().max(1e-300) {
                break;
            }
        }
        sum
    } else {
        // upward by-parts recursion, stable for |x| >= k + 2
        let eix = C64::new(0.0, x).exp();
        let ix = C64::new(0.0, x);
        let mut g = (eix - 1.0) / ix;
        for j in 1..=k {
            g = (eix - g * j as f64) / ix;
        }
        g
    }
}

/// `int_0^t u^k e^{ipu} du`
fn moment(k: usize, p: f64, t: f64) -> C64 {
    gk(k, p * t) * t.powi(k as i32 + 1)
}

/// `E(p, q) = int_0^t dt' int_0^t' dt'' e^{ipt'} e^{iqt''}`
fn double_exp_integral(p: f64, q: f64, t: f64) -> C64 {
    if (q * t).abs() < 1e-3 {
        // inner integral expanded: sum_{k>=1} (iq)^{k-1} t'^k / k!
        let iq = C64::new(0.0, q);
        moment(1, p, t)
            + iq * moment(2, p, t) / 2.0
            + iq * iq * moment(3, p, t) / 6.0
            + iq * iq * iq * moment(4, p, t) / 24.0
    } else {
        (cexp_integral(p + q, t) - cexp_integral(p, t)) / C64::new(0.0, q)
    }
}

fn cross_c(a: [C64; 3], b: [C64; 3]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Closed-form evaluator built once per (model, coupling) pair.
#[derive(Clone, Debug)]
pub struct HarmonicKernels {
    harmonics: Vec<Harmonic>,
    /// exponential amplitudes A_m = C_m - i S_m with s(t) = sum Re[A e^{i mu t}]
    amps: Vec<(f64, [C64; 3])>,
}

impl HarmonicKernels {
    pub fn new(harmonics: Vec<Harmonic>) -> Self {
        let amps = harmonics
            .iter()
            .map(|h| {
                let a = [
                    C64::new(h.ccos[0], -h.csin[0]),
                    C64::new(h.ccos[1], -h.csin[1]),
                    C64::new(h.ccos[2], -h.csin[2]),
                ];
                (h.freq, a)
            })
            .collect();
        Self { harmonics, amps }
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    /// f and f-tilde via the elementary antiderivatives of
    /// `trig(mu t') * trig(w(t' - t))`.
    pub fn f_pair(&self, w: f64, t: f64) -> ([f64; 3], [f64; 3]) {
        let mut f = [0.0; 3];
        let mut ft = [0.0; 3];
        for h in &self.harmonics {
            let mu = h.freq;
            let ic = 0.5 * (prim_cos(mu + w, -w * t, t) + prim_cos(mu - w, w * t, t));
            let is = 0.5 * (prim_sin(mu + w, -w * t, t) + prim_sin(mu - w, w * t, t));
            let jc = 0.5 * (prim_sin(w + mu, -w * t, t) + prim_sin(w - mu, -w * t, t));
            let js = 0.5 * (prim_cos(mu - w, w * t, t) - prim_cos(mu + w, -w * t, t));
            for j in 0..3 {
                f[j] += h.ccos[j] * ic + h.csin[j] * is;
                ft[j] += h.ccos[j] * jc + h.csin[j] * js;
            }
        }
        (f, ft)
    }

    /// Double time integral of the coupling cross product against
    /// `cos w(t' - t'')`, via exponential amplitudes.
    ///
    /// The anticommutator trace in the companion sine term vanishes
    /// identically for a traceless qubit coupling, so only the cross-product
    /// part contributes.
    pub fn y_vector(&self, w: f64, t: f64) -> [f64; 3] {
        let mut acc = [C64::new(0.0, 0.0); 3];
        for &(mu, am) in &self.amps {
            let am_c = [am[0].conj(), am[1].conj(), am[2].conj()];
            for &(nu, an) in &self.amps {
                let an_c = [an[0].conj(), an[1].conj(), an[2].conj()];
                for (s1, v1) in [(1.0, am), (-1.0, am_c)] {
                    for (s2, v2) in [(1.0, an), (-1.0, an_c)] {
                        let x = cross_c(v1, v2);
                        if x.iter().all(|z| z.norm_sqr() == 0.0) {
                            continue;
                        }
                        for sw in [1.0, -1.0] {
                            let e = double_exp_integral(s1 * mu + sw * w, s2 * nu - sw * w, t);
                            for j in 0..3 {
                                acc[j] += x[j] * e;
                            }
                        }
                    }
                }
            }
        }
        let mut y = [0.0; 3];
        for j in 0..3 {
            y[j] = acc[j].re / 8.0;
        }
        y
    }

    pub fn eval(&self, w: f64, t: f64) -> SpinKernelPoint {
        let (f, f_tilde) = self.f_pair(w, t);
        SpinKernelPoint { f, f_tilde, y: self.y_vector(w, t) }
    }
}
