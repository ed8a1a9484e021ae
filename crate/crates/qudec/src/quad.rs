//! Adaptive panel quadrature over a finite interval with a panel-width cap,
//! for vector-valued integrands.
//!
//! Each panel is evaluated with embedded 7- and 15-point Gauss-Legendre rules;
//! the difference serves as the error estimate. Panels are bisected worst
//! first until every component meets `max(rel_tol * |integral|, abs_tol)` or
//! the subdivision budget is exhausted, in which case the failure carries the
//! best estimate and its error bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

#[derive(Debug, Clone, thiserror::Error)]
pub enum QuadError {
    #[error("quadrature did not converge within the subdivision budget (error bound {max_err:.3e})")]
    NonConvergence {
        best: Vec<f64>,
        error_bound: Vec<f64>,
        max_err: f64,
    },
    #[error("invalid quadrature request: {0}")]
    BadRequest(String),
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub error_bound: Vec<f64>,
    pub evaluations: usize,
    pub panels: usize,
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence and cached.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rules() -> &'static (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    static RULES: OnceLock<(Vec<(f64, f64)>, Vec<(f64, f64)>)> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(7), gauss_legendre(15)))
}

struct Panel {
    a: f64,
    b: f64,
    values: Vec<f64>, // 15-point estimate per component
    errors: Vec<f64>, // |G15 - G7| per component
    max_err: f64,
}

fn eval_panel(f: &mut dyn FnMut(f64, &mut [f64]), dim: usize, a: f64, b: f64) -> Panel {
    let (g7, g15) = rules();
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let mut buf = vec![0.0; dim];
    let mut v7 = vec![0.0; dim];
    let mut v15 = vec![0.0; dim];
    for &(x, w) in g7 {
        f(mid + half * x, &mut buf);
        for c in 0..dim {
            v7[c] += w * buf[c];
        }
    }
    for &(x, w) in g15 {
        f(mid + half * x, &mut buf);
        for c in 0..dim {
            v15[c] += w * buf[c];
        }
    }
    let mut errors = vec![0.0; dim];
    let mut max_err: f64 = 0.0;
    for c in 0..dim {
        v7[c] *= half;
        v15[c] *= half;
        errors[c] = (v15[c] - v7[c]).abs();
        max_err = max_err.max(errors[c]);
    }
    Panel { a, b, values: v15, errors, max_err }
}

struct HeapEntry {
    err: f64,
    idx: usize,
    version: u64,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive integration of a vector-valued integrand over [a, b].
///
/// `max_width` bounds every panel width (pass `f64::INFINITY` for no cap);
/// convergence requires each component's summed panel error to fall below
/// `max(rel_tol * |component integral|, abs_tol)`.
pub fn integrate_adaptive(
    f: &mut dyn FnMut(f64, &mut [f64]),
    dim: usize,
    a: f64,
    b: f64,
    max_width: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult, QuadError> {
    const MAX_PANELS: usize = 1 << 17;
    if !(b > a) {
        if b == a {
            return Ok(QuadResult {
                values: vec![0.0; dim],
                error_bound: vec![0.0; dim],
                evaluations: 0,
                panels: 0,
            });
        }
        return Err(QuadError::BadRequest(format!("bad interval [{a}, {b}]")));
    }
    let width = (b - a).min(max_width.max(0.0));
    let n0 = ((b - a) / width).ceil() as usize;
    if n0 > MAX_PANELS {
        return Err(QuadError::BadRequest(format!(
            "panel-width cap requires {n0} initial panels (budget {MAX_PANELS})"
        )));
    }
    let step = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = Vec::with_capacity(n0);
    let mut versions: Vec<u64> = vec![0; n0];
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut evals = 0usize;
    for i in 0..n0 {
        let pa = a + i as f64 * step;
        let pb = if i + 1 == n0 { b } else { a + (i + 1) as f64 * step };
        let p = eval_panel(f, dim, pa, pb);
        evals += 22;
        heap.push(HeapEntry { err: p.max_err, idx: i, version: 0 });
        panels.push(p);
    }
    let mut totals = vec![0.0; dim];
    let mut err_totals = vec![0.0; dim];
    for p in &panels {
        for c in 0..dim {
            totals[c] += p.values[c];
            err_totals[c] += p.errors[c];
        }
    }
    let converged = |totals: &[f64], err_totals: &[f64]| {
        (0..dim).all(|c| err_totals[c] <= (rel_tol * totals[c].abs()).max(abs_tol))
    };
    while !converged(&totals, &err_totals) {
        let entry = loop {
            match heap.pop() {
                Some(e) if versions[e.idx] == e.version => break Some(e),
                Some(_) => continue,
                None => break None,
            }
        };
        let (idx, give_up) = match entry {
            Some(e) => (e.idx, false),
            None => (0, true),
        };
        if give_up || panels.len() >= MAX_PANELS || panels[idx].b - panels[idx].a < 1e-300 {
            let max_err = err_totals.iter().cloned().fold(0.0, f64::max);
            return Err(QuadError::NonConvergence {
                best: totals,
                error_bound: err_totals,
                max_err,
            });
        }
        let (pa, pb) = (panels[idx].a, panels[idx].b);
        for c in 0..dim {
            totals[c] -= panels[idx].values[c];
            err_totals[c] -= panels[idx].errors[c];
        }
        let mid = (pa + pb) / 2.0;
        let left = eval_panel(f, dim, pa, mid);
        let right = eval_panel(f, dim, mid, pb);
        evals += 44;
        for c in 0..dim {
            totals[c] += left.values[c] + right.values[c];
            err_totals[c] += left.errors[c] + right.errors[c];
        }
        versions[idx] += 1;
        heap.push(HeapEntry { err: left.max_err, idx, version: versions[idx] });
        panels[idx] = left;
        versions.push(0);
        heap.push(HeapEntry { err: right.max_err, idx: panels.len(), version: 0 });
        panels.push(right);
    }
    Ok(QuadResult {
        panels: panels.len(),
        values: totals,
        error_bound: err_totals,
        evaluations: evals,
    })
}

/// Scalar convenience wrapper over [`integrate_adaptive`].
pub fn integrate_scalar(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    max_width: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64), QuadError> {
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    let r = integrate_adaptive(&mut g, 1, a, b, max_width, rel_tol, abs_tol)?;
    Ok((r.values[0], r.error_bound[0]))
}
