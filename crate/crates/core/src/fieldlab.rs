//! Analytic static field configurations, their superposition, and the
//! spatial regions used to describe where a beam may not go.
//!
//! All catalog fields use Heaviside–Lorentz units with `c = 1`. Line sources
//! sit on an axis given by a point and a direction; the default axis is the
//! `z`-axis through the origin.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::veccalc::{Rotation, SpatialField, Vec3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("unknown field kind '{0}'")]
    UnknownKind(String),
    #[error("field '{kind}': axis direction must be nonzero and finite")]
    DegenerateAxis { kind: FieldKind },
    #[error("field '{kind}': missing parameter '{param}'")]
    MissingParam { kind: FieldKind, param: String },
    #[error("field '{kind}': unknown parameter '{param}'")]
    UnknownParam { kind: FieldKind, param: String },
    #[error("field '{kind}': parameter '{param}' must be {requirement}, got {value}")]
    BadParam {
        kind: FieldKind,
        param: String,
        requirement: &'static str,
        value: f64,
    },
}

/// Catalog entries.
///
/// The `_E`/`_B` suffix names the slot a physical source belongs to;
/// `uniform` and `linear` are slot-neutral test fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "line_charge_E")]
    LineChargeE,
    #[serde(rename = "current_wire_B")]
    CurrentWireB,
    #[serde(rename = "monopole_line_B")]
    MonopoleLineB,
    #[serde(rename = "solenoid_B")]
    SolenoidB,
    #[serde(rename = "point_charge_E")]
    PointChargeE,
    #[serde(rename = "point_monopole_B")]
    PointMonopoleB,
    #[serde(rename = "linear")]
    Linear,
}

/// Which side of the electromagnetic field a kind describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSlot {
    Electric,
    Magnetic,
}

const LINEAR_PARAMS: [&str; 9] = ["m00", "m01", "m02", "m10", "m11", "m12", "m20", "m21", "m22"];

impl FieldKind {
    pub const ALL: [FieldKind; 8] = [
        FieldKind::Uniform,
        FieldKind::LineChargeE,
        FieldKind::CurrentWireB,
        FieldKind::MonopoleLineB,
        FieldKind::SolenoidB,
        FieldKind::PointChargeE,
        FieldKind::PointMonopoleB,
        FieldKind::Linear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Uniform => "uniform",
            FieldKind::LineChargeE => "line_charge_E",
            FieldKind::CurrentWireB => "current_wire_B",
            FieldKind::MonopoleLineB => "monopole_line_B",
            FieldKind::SolenoidB => "solenoid_B",
            FieldKind::PointChargeE => "point_charge_E",
            FieldKind::PointMonopoleB => "point_monopole_B",
            FieldKind::Linear => "linear",
        }
    }

    pub fn parse(name: &str) -> Result<FieldKind, FieldError> {
        FieldKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| FieldError::UnknownKind(name.to_string()))
    }

    /// `None` for slot-neutral kinds.
    pub fn slot(self) -> Option<FieldSlot> {
        match self {
            FieldKind::LineChargeE | FieldKind::PointChargeE => Some(FieldSlot::Electric),
            FieldKind::CurrentWireB
            | FieldKind::MonopoleLineB
            | FieldKind::SolenoidB
            | FieldKind::PointMonopoleB => Some(FieldSlot::Magnetic),
            FieldKind::Uniform | FieldKind::Linear => None,
        }
    }

    fn required_params(self) -> &'static [&'static str] {
        match self {
            FieldKind::Uniform => &["magnitude"],
            FieldKind::LineChargeE => &["lambda"],
            FieldKind::CurrentWireB => &["current"],
            FieldKind::MonopoleLineB => &["density"],
            FieldKind::SolenoidB => &["b0", "radius"],
            FieldKind::PointChargeE | FieldKind::PointMonopoleB => &["charge"],
            FieldKind::Linear => &[],
        }
    }

    fn optional_params(self) -> &'static [&'static str] {
        match self {
            FieldKind::Linear => &LINEAR_PARAMS,
            _ => &[],
        }
    }

    /// Parameters that flip sign when the field is negated.
    fn strength_params(self) -> &'static [&'static str] {
        match self {
            FieldKind::SolenoidB => &["b0"],
            FieldKind::Linear => &LINEAR_PARAMS,
            other => other.required_params(),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_axis_point() -> Vec3 {
    Vec3::ZERO
}

fn default_axis_dir() -> Vec3 {
    Vec3::Z
}

/// Serializable description of one catalog field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDescriptor {
    pub kind: FieldKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "default_axis_point")]
    pub axis_point: Vec3,
    #[serde(default = "default_axis_dir")]
    pub axis_dir: Vec3,
}

impl FieldDescriptor {
    pub fn new(kind: FieldKind, params: &[(&str, f64)]) -> Self {
        FieldDescriptor {
            kind,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            axis_point: Vec3::ZERO,
            axis_dir: Vec3::Z,
        }
    }

    pub fn with_axis(mut self, point: Vec3, dir: Vec3) -> Self {
        self.axis_point = point;
        self.axis_dir = dir;
        self
    }

    pub fn uniform(value: Vec3) -> Self {
        match value.normalized() {
            Some(dir) => FieldDescriptor::new(FieldKind::Uniform, &[("magnitude", value.norm())])
                .with_axis(Vec3::ZERO, dir),
            None => FieldDescriptor::new(FieldKind::Uniform, &[("magnitude", 0.0)]),
        }
    }

    pub fn linear(matrix: [[f64; 3]; 3]) -> Self {
        let mut d = FieldDescriptor::new(FieldKind::Linear, &[]);
        for (i, row) in matrix.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                if *m != 0.0 {
                    d.params.insert(format!("m{i}{j}"), *m);
                }
            }
        }
        d
    }

    pub fn build(&self) -> Result<VectorField, FieldError> {
        catalog_field(self.kind, &self.params, self.axis_point, self.axis_dir)
    }

    /// The descriptor of the pointwise negated field.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for name in self.kind.strength_params() {
            if let Some(v) = out.params.get_mut(*name) {
                *v = -*v;
            }
        }
        out
    }

    pub fn rotated(&self, rot: &Rotation) -> Self {
        let mut out = self.clone();
        out.axis_point = rot.apply(self.axis_point);
        out.axis_dir = rot.apply(self.axis_dir);
        if self.kind == FieldKind::Linear {
            let m = rot.conjugate(linear_matrix(&self.params));
            out.params.clear();
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    out.params.insert(format!("m{i}{j}"), *v);
                }
            }
        }
        out
    }
}

fn linear_matrix(params: &BTreeMap<String, f64>) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = params.get(&format!("m{i}{j}")).copied().unwrap_or(0.0);
        }
    }
    m
}

/// Geometric locus where a field is singular or discontinuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Singularity {
    Line { point: Vec3, dir: Vec3 },
    Point { point: Vec3 },
    CylinderShell { point: Vec3, dir: Vec3, radius: f64 },
}

impl Singularity {
    pub fn distance(&self, x: Vec3) -> f64 {
        match *self {
            Singularity::Line { point, dir } => perpendicular(x - point, dir).norm(),
            Singularity::Point { point } => (x - point).norm(),
            Singularity::CylinderShell { point, dir, radius } => {
                (perpendicular(x - point, dir).norm() - radius).abs()
            }
        }
    }

    /// Axis of a line-like singularity.
    pub fn axis(&self) -> Option<(Vec3, Vec3)> {
        match *self {
            Singularity::Line { point, dir } | Singularity::CylinderShell { point, dir, .. } => {
                Some((point, dir))
            }
            Singularity::Point { .. } => None,
        }
    }
}

impl fmt::Display for Singularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Singularity::Line { point, dir } => write!(f, "line through {point} along {dir}"),
            Singularity::Point { point } => write!(f, "point {point}"),
            Singularity::CylinderShell { point, dir, radius } => {
                write!(f, "cylindrical shell of radius {radius} about {point} along {dir}")
            }
        }
    }
}

/// Component of `r` perpendicular to the unit vector `dir`.
fn perpendicular(r: Vec3, dir: Vec3) -> Vec3 {
    r - dir * r.dot(dir)
}

/// A resolved catalog field.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Catalog {
    Uniform { value: Vec3 },
    LineChargeE { lambda: f64, point: Vec3, dir: Vec3 },
    CurrentWireB { current: f64, point: Vec3, dir: Vec3 },
    MonopoleLineB { density: f64, point: Vec3, dir: Vec3 },
    SolenoidB { b0: f64, radius: f64, point: Vec3, dir: Vec3 },
    PointSource { charge: f64, origin: Vec3 },
    Linear { m: [[f64; 3]; 3], origin: Vec3 },
}

impl Catalog {
    fn value(&self, x: Vec3) -> Vec3 {
        match *self {
            Catalog::Uniform { value } => value,
            Catalog::LineChargeE { lambda: s, point, dir }
            | Catalog::MonopoleLineB { density: s, point, dir } => {
                let r = perpendicular(x - point, dir);
                r * (s / (2.0 * PI * r.norm_squared()))
            }
            Catalog::CurrentWireB { current, point, dir } => {
                let r = perpendicular(x - point, dir);
                dir.cross(r) * (current / (2.0 * PI * r.norm_squared()))
            }
            Catalog::SolenoidB { b0, radius, point, dir } => {
                if perpendicular(x - point, dir).norm() < radius {
                    dir * b0
                } else {
                    Vec3::ZERO
                }
            }
            Catalog::PointSource { charge, origin } => {
                let r = x - origin;
                let r2 = r.norm_squared();
                r * (charge / (4.0 * PI * r2 * r2.sqrt()))
            }
            Catalog::Linear { m, origin } => {
                let r = x - origin;
                Vec3::new(
                    m[0][0] * r.x + m[0][1] * r.y + m[0][2] * r.z,
                    m[1][0] * r.x + m[1][1] * r.y + m[1][2] * r.z,
                    m[2][0] * r.x + m[2][1] * r.y + m[2][2] * r.z,
                )
            }
        }
    }

    fn singularity(&self) -> Option<Singularity> {
        match *self {
            Catalog::Uniform { .. } | Catalog::Linear { .. } => None,
            Catalog::LineChargeE { point, dir, .. }
            | Catalog::CurrentWireB { point, dir, .. }
            | Catalog::MonopoleLineB { point, dir, .. } => Some(Singularity::Line { point, dir }),
            Catalog::SolenoidB { radius, point, dir, .. } => {
                Some(Singularity::CylinderShell { point, dir, radius })
            }
            Catalog::PointSource { origin, .. } => Some(Singularity::Point { point: origin }),
        }
    }
}

type FieldFn = dyn Fn(Vec3) -> Vec3 + Send + Sync;

#[derive(Clone)]
enum Term {
    Catalog { source: Catalog, descriptor: FieldDescriptor },
    Custom { f: Arc<FieldFn>, singularities: Vec<Singularity> },
}

/// An immutable static vector field: a sum of catalog or custom terms.
#[derive(Clone, Default)]
pub struct VectorField {
    terms: Vec<Term>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for t in &self.terms {
            match t {
                Term::Catalog { descriptor, .. } => list.entry(descriptor),
                Term::Custom { singularities, .. } => list.entry(&("custom", singularities)),
            };
        }
        list.finish()
    }
}

impl VectorField {
    /// The identically zero field.
    pub fn zero() -> Self {
        VectorField::default()
    }

    /// Wraps an arbitrary evaluator. Custom fields have no descriptor and
    /// cannot be written to a scenario file.
    pub fn from_fn<F>(f: F, singularities: Vec<Singularity>) -> Self
    where
        F: Fn(Vec3) -> Vec3 + Send + Sync + 'static,
    {
        VectorField { terms: vec![Term::Custom { f: Arc::new(f), singularities }] }
    }

    pub fn eval(&self, x: Vec3) -> Vec3 {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Catalog { source, .. } => source.value(x),
                Term::Custom { f, .. } => f(x),
            })
            .sum()
    }

    pub fn singularities(&self) -> Vec<Singularity> {
        let mut out = Vec::new();
        for t in &self.terms {
            match t {
                Term::Catalog { source, .. } => out.extend(source.singularity()),
                Term::Custom { singularities, .. } => out.extend(singularities.iter().copied()),
            }
        }
        out
    }

    /// Distance to the nearest singularity, `+inf` when there is none.
    pub fn singular_distance(&self, x: Vec3) -> f64 {
        self.singularities()
            .iter()
            .map(|s| s.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Descriptors of every term, or `None` if any term is custom.
    pub fn descriptors(&self) -> Option<Vec<FieldDescriptor>> {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Catalog { descriptor, .. } => Some(descriptor.clone()),
                Term::Custom { .. } => None,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl SpatialField for VectorField {
    fn value(&self, x: Vec3) -> Vec3 {
        self.eval(x)
    }

    fn clearance(&self, x: Vec3) -> f64 {
        self.singular_distance(x)
    }
}

fn param(kind: FieldKind, params: &BTreeMap<String, f64>, name: &str) -> Result<f64, FieldError> {
    let v = *params
        .get(name)
        .ok_or_else(|| FieldError::MissingParam { kind, param: name.to_string() })?;
    if !v.is_finite() {
        return Err(FieldError::BadParam { kind, param: name.to_string(), requirement: "finite", value: v });
    }
    Ok(v)
}

/// Builds a catalog field from its kind, parameters and axis.
pub fn catalog_field(
    kind: FieldKind,
    params: &BTreeMap<String, f64>,
    axis_point: Vec3,
    axis_dir: Vec3,
) -> Result<VectorField, FieldError> {
    for name in params.keys() {
        let known = kind.required_params().contains(&name.as_str())
            || kind.optional_params().contains(&name.as_str());
        if !known {
            return Err(FieldError::UnknownParam { kind, param: name.clone() });
        }
    }
    let dir = axis_dir
        .normalized()
        .filter(|_| axis_point.is_finite())
        .ok_or(FieldError::DegenerateAxis { kind })?;
    let point = axis_point;
    let p = |name: &str| param(kind, params, name);
    let source = match kind {
        FieldKind::Uniform => Catalog::Uniform { value: dir * p("magnitude")? },
        FieldKind::LineChargeE => Catalog::LineChargeE { lambda: p("lambda")?, point, dir },
        FieldKind::CurrentWireB => Catalog::CurrentWireB { current: p("current")?, point, dir },
        FieldKind::MonopoleLineB => Catalog::MonopoleLineB { density: p("density")?, point, dir },
        FieldKind::SolenoidB => {
            let radius = p("radius")?;
            if radius <= 0.0 {
                return Err(FieldError::BadParam {
                    kind,
                    param: "radius".into(),
                    requirement: "positive",
                    value: radius,
                });
            }
            Catalog::SolenoidB { b0: p("b0")?, radius, point, dir }
        }
        FieldKind::PointChargeE | FieldKind::PointMonopoleB => {
            Catalog::PointSource { charge: p("charge")?, origin: point }
        }
        FieldKind::Linear => {
            for name in LINEAR_PARAMS {
                if params.contains_key(name) {
                    p(name)?;
                }
            }
            Catalog::Linear { m: linear_matrix(params), origin: point }
        }
    };
    let descriptor = FieldDescriptor {
        kind,
        params: params.clone(),
        axis_point,
        axis_dir,
    };
    Ok(VectorField { terms: vec![Term::Catalog { source, descriptor }] })
}

/// Pointwise sum; the singularity set is the union of the inputs'.
pub fn superpose<'a, I>(fields: I) -> VectorField
where
    I: IntoIterator<Item = &'a VectorField>,
{
    VectorField {
        terms: fields.into_iter().flat_map(|f| f.terms.iter().cloned()).collect(),
    }
}

/// Builds and superposes a list of descriptors.
pub fn build_fields(descriptors: &[FieldDescriptor]) -> Result<VectorField, FieldError> {
    let built = descriptors.iter().map(FieldDescriptor::build).collect::<Result<Vec<_>, _>>()?;
    Ok(superpose(&built))
}

/// Spatial region with a deterministic membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// Points strictly closer than `radius` to the axis.
    Cylinder { axis_point: Vec3, axis_dir: Vec3, radius: f64 },
    /// Points strictly on the side `normal` points to.
    HalfSpace { point: Vec3, normal: Vec3 },
    AllSpace,
    Complement { of: Box<Region> },
}

impl Region {
    /// The empty region.
    pub fn nothing() -> Region {
        Region::AllSpace.complement()
    }

    pub fn complement(self) -> Region {
        Region::Complement { of: Box::new(self) }
    }

    pub fn contains(&self, x: Vec3) -> bool {
        match self {
            Region::Cylinder { axis_point, axis_dir, radius } => match axis_dir.normalized() {
                Some(d) => perpendicular(x - *axis_point, d).norm() < *radius,
                None => false,
            },
            Region::HalfSpace { point, normal } => (x - *point).dot(*normal) > 0.0,
            Region::AllSpace => true,
            Region::Complement { of } => !of.contains(x),
        }
    }

    pub fn rotated(&self, rot: &Rotation) -> Region {
        match self {
            Region::Cylinder { axis_point, axis_dir, radius } => Region::Cylinder {
                axis_point: rot.apply(*axis_point),
                axis_dir: rot.apply(*axis_dir),
                radius: *radius,
            },
            Region::HalfSpace { point, normal } => Region::HalfSpace {
                point: rot.apply(*point),
                normal: rot.apply(*normal),
            },
            Region::AllSpace => Region::AllSpace,
            Region::Complement { of } => of.rotated(rot).complement(),
        }
    }

    /// Geometry sanity: finite parameters, nonzero directions and radii.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Region::Cylinder { axis_point, axis_dir, radius } => {
                axis_point.is_finite() && axis_dir.normalized().is_some() && *radius >= 0.0 && radius.is_finite()
            }
            Region::HalfSpace { point, normal } => point.is_finite() && normal.normalized().is_some(),
            Region::AllSpace => true,
            Region::Complement { of } => of.is_well_formed(),
        }
    }
}
