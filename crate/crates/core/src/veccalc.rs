//! Three-vector algebra and central-difference differential operators.
//!
//! The finite-difference routines are the numerical oracles used by the
//! rest of the crate: every analytic curl or divergence claim is checked
//! against them.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A spatial vector in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Right-handed cross product.
    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn component(self, i: usize) -> f64 {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("Vec3 component index {i} out of range"),
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Free-function form of [`Vec3::cross`].
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    a.cross(b)
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl std::iter::Sum for Vec3 {
    fn sum<I: Iterator<Item = Vec3>>(iter: I) -> Vec3 {
        iter.fold(Vec3::ZERO, |acc, v| acc + v)
    }
}

/// Proper rotation stored as a row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Rodrigues rotation by `angle` radians about `axis`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Option<Rotation> {
        let k = axis.normalized()?;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Some(Rotation {
            m: [
                [t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y],
                [t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x],
                [t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c],
            ],
        })
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn transpose(&self) -> Rotation {
        let m = &self.m;
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = m[j][i];
            }
        }
        Rotation { m: t }
    }

    /// Conjugates a linear map: returns `R · a · Rᵀ`.
    pub fn conjugate(&self, a: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let rt = self.transpose().m;
        let ar = matmul(&a, &rt);
        matmul(&self.m, &ar)
    }
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Anything that can be sampled as a static vector field.
///
/// `clearance` is the distance from `x` to the nearest point where the field
/// is singular or discontinuous; stencils must not reach that far.
pub trait SpatialField {
    fn value(&self, x: Vec3) -> Vec3;

    fn clearance(&self, _x: Vec3) -> f64 {
        f64::INFINITY
    }
}

impl<F: Fn(Vec3) -> Vec3> SpatialField for F {
    fn value(&self, x: Vec3) -> Vec3 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FdOrder {
    Second,
    Fourth,
}

impl FdOrder {
    /// Stencil half-width in units of the step.
    fn reach(self) -> f64 {
        match self {
            FdOrder::Second => 1.0,
            FdOrder::Fourth => 2.0,
        }
    }
}

/// Step and scheme for central differences.
///
/// `step = None` selects the position-dependent default `1e-4 (1 + |x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdParams {
    step: Option<f64>,
    pub order: FdOrder,
}

impl Default for FdParams {
    fn default() -> Self {
        FdParams { step: None, order: FdOrder::Second }
    }
}

impl FdParams {
    pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

    pub fn new(step: f64, order: FdOrder) -> Result<Self, VecCalcError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(VecCalcError::InvalidStep(step));
        }
        Ok(FdParams { step: Some(step), order })
    }

    pub fn with_order(order: FdOrder) -> Self {
        FdParams { step: None, order }
    }

    pub fn step_at(&self, x: Vec3) -> f64 {
        self.step
            .unwrap_or(Self::DEFAULT_RELATIVE_STEP * (1.0 + x.norm()))
    }

    /// Furthest distance from `x` any stencil point reaches.
    pub fn reach_at(&self, x: Vec3) -> f64 {
        self.step_at(x) * self.order.reach()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VecCalcError {
    #[error("stencil at {point} reaches {reach:e} but the nearest singularity is {clearance:e} away")]
    SingularityProximity { point: Vec3, clearance: f64, reach: f64 },
    #[error("non-finite value produced inside stencil at {point}")]
    NonFinite { point: Vec3 },
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

fn check_clearance(clearance: f64, x: Vec3, p: &FdParams) -> Result<f64, VecCalcError> {
    let h = p.step_at(x);
    let reach = h * p.order.reach();
    if clearance <= reach {
        return Err(VecCalcError::SingularityProximity { point: x, clearance, reach });
    }
    Ok(h)
}

fn finite(v: Vec3, x: Vec3) -> Result<Vec3, VecCalcError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(VecCalcError::NonFinite { point: x })
    }
}

/// Central difference of `f` along the unit direction `dir` with step `h`.
fn directional<T, F>(f: F, x: Vec3, dir: Vec3, h: f64, order: FdOrder) -> T
where
    F: Fn(Vec3) -> T,
    T: Sub<Output = T> + Mul<f64, Output = T> + Add<Output = T>,
{
    match order {
        FdOrder::Second => (f(x + dir * h) - f(x - dir * h)) * (0.5 / h),
        FdOrder::Fourth => {
            let near = f(x + dir * h) - f(x - dir * h);
            let far = f(x + dir * (2.0 * h)) - f(x - dir * (2.0 * h));
            (near * 8.0 - far) * (1.0 / (12.0 * h))
        }
    }
}

/// Jacobian columns: `cols[j] = ∂F/∂x_j`.
pub fn fd_jacobian<F: SpatialField + ?Sized>(
    field: &F,
    x: Vec3,
    p: &FdParams,
) -> Result<[Vec3; 3], VecCalcError> {
    let h = check_clearance(field.clearance(x), x, p)?;
    let eval = |y: Vec3| field.value(y);
    let cols = [
        directional(eval, x, Vec3::X, h, p.order),
        directional(eval, x, Vec3::Y, h, p.order),
        directional(eval, x, Vec3::Z, h, p.order),
    ];
    for c in cols {
        finite(c, x)?;
    }
    Ok(cols)
}

pub fn fd_div<F: SpatialField + ?Sized>(field: &F, x: Vec3, p: &FdParams) -> Result<f64, VecCalcError> {
    let j = fd_jacobian(field, x, p)?;
    Ok(j[0].x + j[1].y + j[2].z)
}

pub fn fd_curl<F: SpatialField + ?Sized>(field: &F, x: Vec3, p: &FdParams) -> Result<Vec3, VecCalcError> {
    let j = fd_jacobian(field, x, p)?;
    Ok(Vec3::new(j[1].z - j[2].y, j[2].x - j[0].z, j[0].y - j[1].x))
}

/// `(a·∇)F` at `x`, as a single directional stencil along `a`.
pub fn advect<F: SpatialField + ?Sized>(
    a: Vec3,
    field: &F,
    x: Vec3,
    p: &FdParams,
) -> Result<Vec3, VecCalcError> {
    let h = check_clearance(field.clearance(x), x, p)?;
    let Some(dir) = a.normalized() else {
        return Ok(Vec3::ZERO);
    };
    let d = directional(|y: Vec3| field.value(y), x, dir, h, p.order);
    finite(d * a.norm(), x)
}

/// Gradient of a scalar function whose nearest singularity is `clearance` away.
pub fn fd_grad<S: Fn(Vec3) -> f64>(
    scalar: S,
    clearance: f64,
    x: Vec3,
    p: &FdParams,
) -> Result<Vec3, VecCalcError> {
    let h = check_clearance(clearance, x, p)?;
    let g = Vec3::new(
        directional(&scalar, x, Vec3::X, h, p.order),
        directional(&scalar, x, Vec3::Y, h, p.order),
        directional(&scalar, x, Vec3::Z, h, p.order),
    );
    finite(g, x)
}

/// Shortest round-trip decimal, in exponent form outside `[1e-4, 1e16)`.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
