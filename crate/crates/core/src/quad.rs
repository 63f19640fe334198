//! One-dimensional quadrature: adaptive Simpson with Richardson error
//! estimates, and Gauss–Legendre rules for fixed-order surface integrals.

/// Result of an adaptive integration over one or more intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_error: f64,
    /// Number of accepted leaf intervals.
    pub intervals: usize,
    pub converged: bool,
}

impl QuadOutcome {
    pub const EMPTY: QuadOutcome = QuadOutcome { value: 0.0, abs_error: 0.0, intervals: 0, converged: true };

    pub fn merge(self, other: QuadOutcome) -> QuadOutcome {
        QuadOutcome {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            intervals: self.intervals + other.intervals,
            converged: self.converged && other.converged,
        }
    }
}

/// Bisection depth limits for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonLimits {
    pub min_depth: u32,
    pub max_depth: u32,
}

impl Default for SimpsonLimits {
    fn default() -> Self {
        SimpsonLimits { min_depth: 3, max_depth: 40 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Each accepted panel contributes `|S₂ − S₁| / 15` to the error estimate;
/// the tolerance is split in half at every bisection. Evaluation order is
/// a fixed depth-first traversal, so results are reproducible.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, limits: SimpsonLimits) -> QuadOutcome {
    if a == b {
        return QuadOutcome::EMPTY;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, Panel { a, b, fa, fm, fb, whole }, tol, 0, limits)
}

fn recurse<F: Fn(f64) -> f64>(f: &F, p: Panel, tol: f64, depth: u32, limits: SimpsonLimits) -> QuadOutcome {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    let delta = left + right - p.whole;
    let err = delta.abs() / 15.0;
    let finite = delta.is_finite();
    if depth >= limits.min_depth && (err <= tol || !finite) {
        return QuadOutcome { value: left + right + delta / 15.0, abs_error: err, intervals: 1, converged: finite };
    }
    if depth >= limits.max_depth {
        return QuadOutcome { value: left + right + delta / 15.0, abs_error: err, intervals: 1, converged: false };
    }
    let l = recurse(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * tol, depth + 1, limits);
    let r = recurse(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * tol, depth + 1, limits);
    l.merge(r)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
