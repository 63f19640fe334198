//! Beam paths as interpolating cubic splines on `u ∈ [0, 1]`.
//!
//! Knots are uniformly spaced in the parameter. Open paths use not-a-knot end
//! conditions; closed paths use the periodic one, so position, tangent
//! and curvature are continuous across the seam.

use thiserror::Error;

use crate::veccalc::{Rotation, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("path '{name}': needs at least {need} distinct control points, got {got}")]
    TooFewPoints { name: String, need: usize, got: usize },
    #[error("path '{name}': control point {index} is not finite")]
    NonFinitePoint { name: String, index: usize },
}

/// A named parametric path traversed at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub name: String,
    /// Control points exactly as supplied.
    pub points: Vec<Vec3>,
    pub closed: bool,
    /// Traversal speed in units of `c`.
    pub speed: f64,
    knots: Vec<Vec3>,
    /// Second derivatives with respect to the local segment parameter.
    moments: Vec<Vec3>,
}

impl Path {
    pub fn new(name: impl Into<String>, points: Vec<Vec3>, closed: bool, speed: f64) -> Result<Path, PathError> {
        let name = name.into();
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(PathError::NonFinitePoint { name, index });
        }
        let mut knots = points.clone();
        if closed && knots.len() > 1 && knots.first() == knots.last() {
            knots.pop();
        }
        let need = if closed { 3 } else { 2 };
        if knots.len() < need {
            return Err(PathError::TooFewPoints { name, need, got: knots.len() });
        }
        let moments = if closed { periodic_moments(&knots) } else { not_a_knot_moments(&knots) };
        Ok(Path { name, points, closed, speed, knots, moments })
    }

    pub fn segments(&self) -> usize {
        if self.closed {
            self.knots.len()
        } else {
            self.knots.len() - 1
        }
    }

    /// Number of distinct control points.
    pub fn knot_count(&self) -> usize {
        self.knots.len()
    }

    /// Parameter value of knot `i`.
    pub fn knot_parameter(&self, i: usize) -> f64 {
        i as f64 / self.segments() as f64
    }

    pub fn knot(&self, i: usize) -> Vec3 {
        self.knots[i % self.knots.len()]
    }

    fn locate(&self, u: f64) -> (usize, f64) {
        let n = self.segments();
        let s = u.clamp(0.0, 1.0) * n as f64;
        let nearest = s.round();
        if (s - nearest).abs() < 1e-12 {
            let i = nearest as usize;
            return if i >= n { (n - 1, 1.0) } else { (i, 0.0) };
        }
        let i = (s.floor() as usize).min(n - 1);
        (i, s - i as f64)
    }

    fn segment_ends(&self, i: usize) -> (Vec3, Vec3, Vec3, Vec3) {
        let j = (i + 1) % self.knots.len();
        (self.knots[i], self.knots[j], self.moments[i], self.moments[j])
    }

    /// Position on segment `i` at local parameter `t ∈ [0, 1]`.
    pub fn segment_point(&self, i: usize, t: f64) -> Vec3 {
        let (p0, p1, m0, m1) = self.segment_ends(i);
        let s = 1.0 - t;
        p0 * s + p1 * t + m0 * ((s * s * s - s) / 6.0) + m1 * ((t * t * t - t) / 6.0)
    }

    /// Derivative with respect to the local segment parameter.
    pub fn segment_tangent(&self, i: usize, t: f64) -> Vec3 {
        let (p0, p1, m0, m1) = self.segment_ends(i);
        let s = 1.0 - t;
        (p1 - p0) + m0 * ((1.0 - 3.0 * s * s) / 6.0) + m1 * ((3.0 * t * t - 1.0) / 6.0)
    }

    /// `c(u)`. Returns the control points exactly at knot parameters.
    pub fn point(&self, u: f64) -> Vec3 {
        let (i, t) = self.locate(u);
        if t == 0.0 {
            return self.knots[i];
        }
        if t == 1.0 {
            return self.knot(i + 1);
        }
        self.segment_point(i, t)
    }

    /// `dc/du`.
    pub fn tangent(&self, u: f64) -> Vec3 {
        let (i, t) = self.locate(u);
        self.segment_tangent(i, t) * self.segments() as f64
    }

    /// Beam velocity at `u`: speed times the unit tangent.
    pub fn velocity(&self, u: f64) -> Vec3 {
        self.tangent(u).normalized().unwrap_or(Vec3::ZERO) * self.speed
    }

    pub fn start(&self) -> Vec3 {
        self.knots[0]
    }

    pub fn end(&self) -> Vec3 {
        if self.closed {
            self.knots[0]
        } else {
            *self.knots.last().expect("path has knots")
        }
    }

    /// `n` parameter values spread over the path; closed paths skip `u = 1`.
    pub fn sample_parameters(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![0.0],
            _ if self.closed => (0..n).map(|k| k as f64 / n as f64).collect(),
            _ => (0..n).map(|k| k as f64 / (n - 1) as f64).collect(),
        }
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Path {
        let mut points = self.points.clone();
        if self.closed {
            let mut knots = self.knots.clone();
            knots[1..].reverse();
            points = knots;
        } else {
            points.reverse();
        }
        Path::new(self.name.clone(), points, self.closed, self.speed).expect("reversal keeps a valid path")
    }

    pub fn rotated(&self, rot: &Rotation) -> Path {
        let points = self.points.iter().map(|p| rot.apply(*p)).collect();
        Path::new(self.name.clone(), points, self.closed, self.speed).expect("rotation keeps a valid path")
    }

    /// Closest approach of the path to the zero set of a distance function:
    /// returns `(min distance, u)`. Dense sampling followed by golden-section
    /// refinement around the best sample of each segment.
    pub fn closest_approach<D: Fn(Vec3) -> f64>(&self, distance: D) -> (f64, f64) {
        const PER_SEGMENT: usize = 32;
        let n = self.segments();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..n {
            let mut seg_best = (f64::INFINITY, 0.0);
            for k in 0..=PER_SEGMENT {
                let t = k as f64 / PER_SEGMENT as f64;
                let d = distance(self.segment_point(i, t));
                if d < seg_best.0 {
                    seg_best = (d, t);
                }
            }
            let step = 1.0 / PER_SEGMENT as f64;
            let (lo, hi) = ((seg_best.1 - step).max(0.0), (seg_best.1 + step).min(1.0));
            let refined = golden_min(|t| distance(self.segment_point(i, t)), lo, hi);
            if refined.0 < seg_best.0 {
                seg_best = refined;
            }
            if seg_best.0 < best.0 {
                best = (seg_best.0, (i as f64 + seg_best.1) / n as f64);
            }
        }
        best
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (fc, c)
    } else {
        (fd, d)
    }
}

/// Second derivatives for the open spline with not-a-knot ends: the third
/// derivative is continuous across the second and penultimate knots, so the
/// end segments are as accurate as interior ones.
fn not_a_knot_moments(p: &[Vec3]) -> Vec<Vec3> {
    let n = p.len();
    let mut m = vec![Vec3::ZERO; n];
    if n < 3 {
        return m;
    }
    let rhs = |i: usize| (p[i + 1] - p[i] * 2.0 + p[i - 1]) * 6.0;
    if n == 3 {
        // A single parabola through all three points.
        return vec![rhs(1) / 6.0; 3];
    }
    // With M_0 = 2M_1 − M_2 the first interior equation reduces to
    // 6M_1 = rhs_1, and likewise at the far end.
    m[1] = rhs(1) / 6.0;
    m[n - 2] = rhs(n - 2) / 6.0;
    // M_{i-1} + 4 M_i + M_{i+1} = rhs_i for i = 2..n-3, boundary values known.
    if n > 4 {
        let k = n - 4;
        let diag = vec![4.0; k];
        let mut cols = [vec![0.0; k], vec![0.0; k], vec![0.0; k]];
        for j in 0..k {
            let i = j + 2;
            let mut r = rhs(i);
            if j == 0 {
                r = r - m[1];
            }
            if j == k - 1 {
                r = r - m[n - 2];
            }
            for c in 0..3 {
                cols[c][j] = r.component(c);
            }
        }
        let solved: Vec<Vec<f64>> = cols.iter().map(|b| thomas(&diag, b)).collect();
        for j in 0..k {
            m[j + 2] = Vec3::new(solved[0][j], solved[1][j], solved[2][j]);
        }
    }
    m[0] = m[1] * 2.0 - m[2];
    m[n - 1] = m[n - 2] * 2.0 - m[n - 3];
    m
}

/// Second derivatives for the periodic spline, via Sherman–Morrison on the
/// cyclic tridiagonal system.
fn periodic_moments(p: &[Vec3]) -> Vec<Vec3> {
    let n = p.len();
    let rhs: Vec<Vec3> = (0..n)
        .map(|i| (p[(i + 1) % n] - p[i] * 2.0 + p[(i + n - 1) % n]) * 6.0)
        .collect();
    if n == 3 {
        // Circulant [4 1 1; 1 4 1; 1 1 4]: solve directly.
        let s: Vec3 = rhs.iter().copied().sum();
        return rhs.iter().map(|r| (*r - s / 6.0) / 3.0).collect();
    }
    // A = T + u vᵀ with gamma = -4, u = (γ, 0, …, 0, 1), v = (1, 0, …, 0, 1/γ).
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    let solve = |b: &[f64]| -> Vec<f64> { thomas(&diag, b) };
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = 1.0;
    let z = solve(&u);
    let denom = 1.0 + z[0] + z[n - 1] / gamma;
    let mut out = vec![Vec3::ZERO; n];
    for comp in 0..3 {
        let b: Vec<f64> = rhs.iter().map(|r| r.component(comp)).collect();
        let y = solve(&b);
        let factor = (y[0] + y[n - 1] / gamma) / denom;
        for i in 0..n {
            let v = y[i] - factor * z[i];
            match comp {
                0 => out[i].x = v,
                1 => out[i].y = v,
                _ => out[i].z = v,
            }
        }
    }
    out
}

/// Tridiagonal solve with unit off-diagonals.
fn thomas(diag: &[f64], b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = 1.0 / diag[0];
    d[0] = b[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (b[i] - d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// `n` equally spaced points on a circle in the `z = center.z` plane,
/// starting on the `+x` side and running counterclockwise.
pub fn circle_points(center: Vec3, radius: f64, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64;
            center + Vec3::new(th.cos(), th.sin(), 0.0) * radius
        })
        .collect()
}

/// Points on a circular arc in the `z = center.z` plane from angle `from`
/// to `to`, inclusive.
pub fn arc_points(center: Vec3, radius: f64, from: f64, to: f64, n: usize) -> Vec<Vec3> {
    (0..=n)
        .map(|k| {
            let th = from + (to - from) * k as f64 / n as f64;
            center + Vec3::new(th.cos(), th.sin(), 0.0) * radius
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circle(n: usize) -> Path {
        Path::new("loop", circle_points(Vec3::ZERO, 1.0, n), true, 0.01).unwrap()
    }

    #[test]
    fn knots_are_reproduced_exactly() {
        let path = circle(7);
        for i in 0..7 {
            assert_eq!(path.point(path.knot_parameter(i)), path.points[i]);
        }
        assert_eq!(path.point(1.0), path.points[0]);
        let open = Path::new("arm", arc_points(Vec3::ZERO, 2.0, 0.0, 3.0, 5), false, 0.1).unwrap();
        for i in 0..6 {
            assert_eq!(open.point(open.knot_parameter(i)), open.points[i]);
        }
    }

    #[test]
    fn periodic_seam_is_smooth() {
        let path = circle(9);
        let a = path.segment_tangent(8, 1.0);
        let b = path.segment_tangent(0, 0.0);
        assert!((a - b).norm() < 1e-12);
        // A repeated closing point is accepted and dropped.
        let mut pts = circle_points(Vec3::ZERO, 1.0, 9);
        pts.push(pts[0]);
        let again = Path::new("loop", pts, true, 0.01).unwrap();
        assert_eq!(again.segments(), 9);
        assert!((again.point(0.37) - path.point(0.37)).norm() < 1e-15);
    }

    #[test]
    fn circle_spline_stays_close_to_circle() {
        let path = circle(64);
        for k in 0..1000 {
            let r = path.point(k as f64 / 1000.0).norm();
            assert!((r - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn two_point_open_path_is_a_segment() {
        let p = Path::new("s", vec![Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0)], false, 0.1).unwrap();
        assert!((p.point(0.25) - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        assert!((p.tangent(0.5) - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((p.velocity(0.5) - Vec3::new(0.1, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn open_path_reproduces_cubics() {
        // Not-a-knot ends make the spline exact for cubic polynomials in u.
        let c = |u: f64| Vec3::new(u, 2.0 * u * u - u, u * u * u - 0.5 * u);
        for n in [4usize, 5, 9] {
            let pts = (0..n).map(|k| c(k as f64 / (n - 1) as f64)).collect();
            let p = Path::new("cubic", pts, false, 0.1).unwrap();
            for u in [0.0, 0.013, 0.37, 0.5, 0.91, 1.0] {
                assert!((p.point(u) - c(u)).norm() < 1e-13, "n={n} u={u}");
            }
        }
        let three = Path::new("q", vec![Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0), Vec3::new(2.0, 4.0, 0.0)], false, 0.1).unwrap();
        assert!((three.point(0.25) - Vec3::new(0.5, 0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn too_few_points() {
        assert!(Path::new("x", vec![Vec3::ZERO], false, 0.1).is_err());
        assert!(Path::new("x", vec![Vec3::ZERO, Vec3::X, Vec3::ZERO], true, 0.1).is_err());
    }

    #[test]
    fn closest_approach_finds_axis_crossing() {
        let p = Path::new("cross", vec![Vec3::new(-1.0, 0.3, 0.0), Vec3::new(1.0, -0.3, 0.0)], false, 0.1).unwrap();
        let (d, u) = p.closest_approach(|x| x.x.hypot(x.y));
        assert!(d < 1e-9, "{d}");
        assert!((u - 0.5).abs() < 1e-6);
    }

    #[test]
    fn reversed_traces_same_curve() {
        let path = circle(11);
        let rev = path.reversed();
        for k in 0..50 {
            let u = k as f64 / 50.0;
            assert!((rev.point(u) - path.point(1.0 - u)).norm() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn interpolates_random_control_points(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0), 3..12),
            closed in any::<bool>(),
        ) {
            let pts: Vec<Vec3> = pts.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect();
            let path = Path::new("p", pts.clone(), closed, 0.5).unwrap();
            for i in 0..path.knot_count() {
                prop_assert_eq!(path.point(path.knot_parameter(i)), path.knot(i));
            }
            // Spline tangents are continuous at interior knots.
            let last = if closed { path.segments() } else { path.segments() - 1 };
            for i in 0..last {
                let a = path.segment_tangent(i, 1.0);
                let b = path.segment_tangent((i + 1) % path.segments(), 0.0);
                prop_assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
            }
        }
    }
}
