//! The experiment data model: particle, fields, beam paths and the region
//! the beam must avoid, together with the JSON scenario file format.

pub mod path;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::path::{Path, PathError};
use crate::fieldlab::{build_fields, FieldDescriptor, FieldError, FieldSlot, Region, VectorField};
use crate::veccalc::{Rotation, Vec3};

/// Minimum distance a path must keep from every field singularity.
pub const PATH_CLEARANCE: f64 = 1e-9;

/// Radius of the default excluded cylinder around the first singular axis.
pub const DEFAULT_EXCLUDED_RADIUS: f64 = 0.05;

/// Beam speed used when a path does not declare one.
pub const DEFAULT_SPEED: f64 = 0.01;

/// Which phase-generating vector field the scenario is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    /// Induced electric dipole, `T = α B×E`.
    #[default]
    HmwInduced,
    /// Induced magnetic dipole, `T = χ B×E`.
    AcInduced,
    /// Permanent electric dipole `d s′`, `T = B×d`.
    PermanentElectric,
}

impl PhaseKind {
    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::HmwInduced => "hmw_induced",
            PhaseKind::AcInduced => "ac_induced",
            PhaseKind::PermanentElectric => "permanent_electric",
        }
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleProperties {
    pub mass: f64,
    /// Electric polarisability.
    pub alpha: f64,
    /// Magnetic susceptibility.
    pub chi: f64,
    /// Magnitude of an intrinsic electric dipole.
    pub d: f64,
    /// Rest-frame spin direction; required when `d > 0`.
    pub spin: Option<Vec3>,
}

impl ParticleProperties {
    pub fn polarisable(mass: f64, alpha: f64) -> Self {
        ParticleProperties { mass, alpha, chi: 0.0, d: 0.0, spin: None }
    }

    /// `α` for HMW, `χ` for AC, zero for permanent dipoles.
    pub fn coupling(&self, kind: PhaseKind) -> f64 {
        match kind {
            PhaseKind::HmwInduced => self.alpha,
            PhaseKind::AcInduced => self.chi,
            PhaseKind::PermanentElectric => 0.0,
        }
    }

    /// `d s′`, or zero when no spin is declared.
    pub fn dipole(&self) -> Vec3 {
        self.spin.map(|s| s * self.d).unwrap_or(Vec3::ZERO)
    }
}

/// Thresholds used by the topology checker. Serialized under `checks`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSettings {
    /// Upper bound on `|v̂·B̂|` and `|v̂·Ê|`.
    pub orthogonality_tol: f64,
    /// Upper bound on the mass-shift ratio `αB²/m`.
    pub mass_ratio_tol: f64,
    /// Curl bound relative to the mean `|T|` along the path.
    pub curl_rel_tol: f64,
    /// Loop phases at or below this magnitude count as zero.
    pub flux_zero_tol: f64,
    /// Largest tolerated dynamical-phase difference between paired arms.
    pub arm_balance_tol: f64,
    /// Curl-free tube radius; defaults to `min(0.2, clearance / 2)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tube_radius: Option<f64>,
    /// Samples per path for every pointwise check.
    pub samples: usize,
    /// Absolute tolerance for every path integral.
    pub quad_tol: f64,
    /// Open-arm pairs compared for dynamical balance. When empty,
    /// consecutive open paths are paired in declaration order.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub arm_pairs: Vec<[String; 2]>,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            orthogonality_tol: 1e-6,
            mass_ratio_tol: 1e-2,
            curl_rel_tol: 1e-5,
            flux_zero_tol: 1e-8,
            arm_balance_tol: 1e-6,
            tube_radius: None,
            samples: 64,
            quad_tol: 1e-9,
            arm_pairs: Vec::new(),
        }
    }
}

/// A fully built scenario. Fields are immutable values; cloning is cheap.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub particle: ParticleProperties,
    pub e: VectorField,
    pub b: VectorField,
    pub paths: Vec<Path>,
    pub excluded_region: Region,
    pub phase_kind: PhaseKind,
    pub checks: CheckSettings,
}

impl Scenario {
    /// A scenario with default region, phase kind and checks.
    pub fn new(particle: ParticleProperties, e: VectorField, b: VectorField, paths: Vec<Path>) -> Self {
        let excluded_region = default_excluded_region(&e, &b);
        Scenario {
            particle,
            e,
            b,
            paths,
            excluded_region,
            phase_kind: PhaseKind::default(),
            checks: CheckSettings::default(),
        }
    }

    pub fn path(&self, name: &str) -> Option<&Path> {
        self.paths.iter().find(|p| p.name == name)
    }

    pub fn first_closed_path(&self) -> Option<&Path> {
        self.paths.iter().find(|p| p.closed)
    }

    /// Distance from `x` to the nearest singularity of either field.
    pub fn singular_distance(&self, x: Vec3) -> f64 {
        self.e.singular_distance(x).min(self.b.singular_distance(x))
    }

    pub fn from_document(doc: &ScenarioDocument) -> Result<Scenario, ScenarioError> {
        let e = build_slot(&doc.fields.e, "fields.E")?;
        let b = build_slot(&doc.fields.b, "fields.B")?;
        let paths = doc
            .paths
            .iter()
            .map(|p| Path::new(p.name.clone(), p.points.clone(), p.closed, p.speed))
            .collect::<Result<Vec<_>, _>>()?;
        let excluded_region = match &doc.excluded_region {
            Some(r) => r.clone(),
            None => default_excluded_region(&e, &b),
        };
        let p = &doc.particle;
        Ok(Scenario {
            particle: ParticleProperties { mass: p.mass, alpha: p.alpha, chi: p.chi, d: p.d, spin: p.spin },
            e,
            b,
            paths,
            excluded_region,
            phase_kind: doc.phase_kind,
            checks: doc.checks.clone().unwrap_or_default(),
        })
    }

    /// Fails if either field contains a custom (non-catalog) term.
    pub fn to_document(&self) -> Result<ScenarioDocument, ScenarioError> {
        let e = self.e.descriptors().ok_or(ScenarioError::NotSerializable("E"))?;
        let b = self.b.descriptors().ok_or(ScenarioError::NotSerializable("B"))?;
        let p = &self.particle;
        Ok(ScenarioDocument {
            particle: ParticleDocument { mass: p.mass, alpha: p.alpha, chi: p.chi, d: p.d, spin: p.spin },
            fields: FieldsDocument { e, b },
            paths: self
                .paths
                .iter()
                .map(|p| PathDocument {
                    name: p.name.clone(),
                    points: p.points.clone(),
                    closed: p.closed,
                    speed: p.speed,
                })
                .collect(),
            excluded_region: Some(self.excluded_region.clone()),
            phase_kind: self.phase_kind,
            checks: Some(self.checks.clone()),
        })
    }

    pub fn to_json(&self) -> Result<String, ScenarioError> {
        let doc = self.to_document()?;
        Ok(serde_json::to_string_pretty(&doc).expect("scenario documents always serialize"))
    }

    /// The whole experiment rigidly rotated: fields, paths, region and spin.
    pub fn rotated(&self, rot: &Rotation) -> Result<Scenario, ScenarioError> {
        let mut doc = self.to_document()?;
        for d in doc.fields.e.iter_mut().chain(doc.fields.b.iter_mut()) {
            *d = d.rotated(rot);
        }
        for p in &mut doc.paths {
            for x in &mut p.points {
                *x = rot.apply(*x);
            }
        }
        doc.excluded_region = doc.excluded_region.map(|r| r.rotated(rot));
        doc.particle.spin = doc.particle.spin.map(|s| rot.apply(s));
        Scenario::from_document(&doc)
    }
}

fn build_slot(descriptors: &[FieldDescriptor], context: &'static str) -> Result<VectorField, ScenarioError> {
    for (i, d) in descriptors.iter().enumerate() {
        d.build().map_err(|source| ScenarioError::Field { context, index: i, source })?;
    }
    build_fields(descriptors).map_err(|source| ScenarioError::Field { context, index: 0, source })
}

/// Cylinder of [`DEFAULT_EXCLUDED_RADIUS`] about the first line-like
/// singularity of E, then B; the empty region when there is none.
pub fn default_excluded_region(e: &VectorField, b: &VectorField) -> Region {
    e.singularities()
        .into_iter()
        .chain(b.singularities())
        .find_map(|s| s.axis())
        .map(|(axis_point, axis_dir)| Region::Cylinder { axis_point, axis_dir, radius: DEFAULT_EXCLUDED_RADIUS })
        .unwrap_or_else(Region::nothing)
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub particle: ParticleDocument,
    pub fields: FieldsDocument,
    pub paths: Vec<PathDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded_region: Option<Region>,
    #[serde(default)]
    pub phase_kind: PhaseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<CheckSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleDocument {
    pub mass: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<Vec3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsDocument {
    #[serde(rename = "E", default)]
    pub e: Vec<FieldDescriptor>,
    #[serde(rename = "B", default)]
    pub b: Vec<FieldDescriptor>,
}

fn default_speed() -> f64 {
    DEFAULT_SPEED
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDocument {
    pub name: String,
    pub points: Vec<Vec3>,
    #[serde(default)]
    pub closed: bool,
    #[serde(default = "default_speed")]
    pub speed: f64,
}

impl ScenarioDocument {
    pub fn from_json(text: &str) -> Result<ScenarioDocument, ScenarioError> {
        serde_json::from_str(text).map_err(ScenarioError::from_json)
    }
}

// ---------------------------------------------------------------------------
// Errors and diagnostics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    MassNotPositive,
    NegativeCoupling,
    NonFiniteParameter,
    SpinMissing,
    SpinNotUnit,
    DipoleMissing,
    FieldSlotMismatch,
    SpeedOutOfRange,
    DuplicatePathName,
    PathHitsSingularity,
    PathInExcludedRegion,
    RegionMalformed,
    CheckSettingInvalid,
    UnknownArm,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::MassNotPositive => "MASS_NOT_POSITIVE",
            DiagnosticCode::NegativeCoupling => "NEGATIVE_COUPLING",
            DiagnosticCode::NonFiniteParameter => "NON_FINITE_PARAMETER",
            DiagnosticCode::SpinMissing => "SPIN_MISSING",
            DiagnosticCode::SpinNotUnit => "SPIN_NOT_UNIT",
            DiagnosticCode::DipoleMissing => "DIPOLE_MISSING",
            DiagnosticCode::FieldSlotMismatch => "FIELD_SLOT_MISMATCH",
            DiagnosticCode::SpeedOutOfRange => "SPEED_OUT_OF_RANGE",
            DiagnosticCode::DuplicatePathName => "DUPLICATE_PATH_NAME",
            DiagnosticCode::PathHitsSingularity => "PATH_HITS_SINGULARITY",
            DiagnosticCode::PathInExcludedRegion => "PATH_IN_EXCLUDED_REGION",
            DiagnosticCode::RegionMalformed => "REGION_MALFORMED",
            DiagnosticCode::CheckSettingInvalid => "CHECK_SETTING_INVALID",
            DiagnosticCode::UnknownArm => "UNKNOWN_ARM",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema violation at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("{context}[{index}]: {source}")]
    Field {
        context: &'static str,
        index: usize,
        #[source]
        source: FieldError,
    },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("invalid scenario:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("{0} field contains a custom term with no file representation")]
    NotSerializable(&'static str),
}

impl ScenarioError {
    fn from_json(e: serde_json::Error) -> ScenarioError {
        let (line, column, message) = (e.line(), e.column(), e.to_string());
        match e.classify() {
            serde_json::error::Category::Data => ScenarioError::Schema { line, column, message },
            _ => ScenarioError::Syntax { line, column, message },
        }
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            ScenarioError::Invalid(d) => d,
            _ => &[],
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

/// Parses, builds and validates a scenario file.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario, ScenarioError> {
    let text = std::str::from_utf8(text).map_err(|e| ScenarioError::Syntax {
        line: 0,
        column: e.valid_up_to(),
        message: format!("input is not UTF-8: {e}"),
    })?;
    let doc = ScenarioDocument::from_json(text)?;
    let scenario = Scenario::from_document(&doc)?;
    let diagnostics = validate(&scenario);
    if diagnostics.is_empty() {
        Ok(scenario)
    } else {
        Err(ScenarioError::Invalid(diagnostics))
    }
}

/// Checks every scenario invariant. Empty iff the scenario is valid.
pub fn validate(s: &Scenario) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |code, message: String| out.push(Diagnostic { code, message });
    let p = &s.particle;

    for (name, v) in [("mass", p.mass), ("alpha", p.alpha), ("chi", p.chi), ("d", p.d)] {
        if !v.is_finite() {
            push(DiagnosticCode::NonFiniteParameter, format!("particle.{name} must be finite"));
        }
    }
    if !(p.mass > 0.0) {
        push(DiagnosticCode::MassNotPositive, format!("particle.mass must be > 0, got {}", p.mass));
    }
    for (name, v) in [("alpha", p.alpha), ("chi", p.chi), ("d", p.d)] {
        if v < 0.0 {
            push(DiagnosticCode::NegativeCoupling, format!("particle.{name} must be >= 0, got {v}"));
        }
    }
    if p.d > 0.0 {
        match p.spin {
            None => push(DiagnosticCode::SpinMissing, "particle.spin is required when d > 0".into()),
            Some(spin) if (spin.norm() - 1.0).abs() > 1e-12 => push(
                DiagnosticCode::SpinNotUnit,
                format!("particle.spin must be a unit vector, |s'| = {}", spin.norm()),
            ),
            Some(_) => {}
        }
    }
    if s.phase_kind == PhaseKind::PermanentElectric && !(p.d > 0.0) {
        push(DiagnosticCode::DipoleMissing, "phase_kind permanent_electric needs particle.d > 0".into());
    }

    for (slot_name, field, expected) in [("E", &s.e, FieldSlot::Electric), ("B", &s.b, FieldSlot::Magnetic)] {
        for (i, d) in field.descriptors().unwrap_or_default().iter().enumerate() {
            if let Some(slot) = d.kind.slot() {
                if slot != expected {
                    push(
                        DiagnosticCode::FieldSlotMismatch,
                        format!("fields.{slot_name}[{i}]: kind '{}' is not a {slot_name} field", d.kind),
                    );
                }
            }
        }
    }

    if !s.excluded_region.is_well_formed() {
        push(DiagnosticCode::RegionMalformed, "excluded_region has degenerate geometry".into());
    }

    let c = &s.checks;
    for (name, v) in [
        ("orthogonality_tol", c.orthogonality_tol),
        ("mass_ratio_tol", c.mass_ratio_tol),
        ("curl_rel_tol", c.curl_rel_tol),
        ("flux_zero_tol", c.flux_zero_tol),
        ("arm_balance_tol", c.arm_balance_tol),
        ("quad_tol", c.quad_tol),
        ("tube_radius", c.tube_radius.unwrap_or(1.0)),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            push(DiagnosticCode::CheckSettingInvalid, format!("checks.{name} must be positive, got {v}"));
        }
    }
    if c.samples < 2 {
        push(DiagnosticCode::CheckSettingInvalid, format!("checks.samples must be >= 2, got {}", c.samples));
    }
    for pair in &c.arm_pairs {
        for name in pair {
            match s.path(name) {
                None => push(DiagnosticCode::UnknownArm, format!("checks.arm_pairs names unknown path '{name}'")),
                Some(p) if p.closed => {
                    push(DiagnosticCode::UnknownArm, format!("checks.arm_pairs: path '{name}' is closed, not an arm"))
                }
                Some(_) => {}
            }
        }
    }

    let mut names = BTreeSet::new();
    let singularities: Vec<_> = s.e.singularities().into_iter().chain(s.b.singularities()).collect();
    for path in &s.paths {
        if !names.insert(path.name.as_str()) {
            push(DiagnosticCode::DuplicatePathName, format!("path '{}' is declared twice", path.name));
        }
        if !(path.speed < 1.0) {
            push(
                DiagnosticCode::SpeedOutOfRange,
                format!("path '{}': speed must be < 1, got {}", path.name, path.speed),
            );
        } else if !(path.speed > 0.0) {
            push(
                DiagnosticCode::SpeedOutOfRange,
                format!("path '{}': speed must be > 0, got {}", path.name, path.speed),
            );
        }
        for sing in &singularities {
            let (dist, u) = path.closest_approach(|x| sing.distance(x));
            if dist < PATH_CLEARANCE {
                push(
                    DiagnosticCode::PathHitsSingularity,
                    format!("path '{}' intersects singularity ({sing}) near u = {u:.6}", path.name),
                );
            }
        }
        if let Some(u) = first_excluded_sample(path, &s.excluded_region) {
            push(
                DiagnosticCode::PathInExcludedRegion,
                format!("path '{}' enters the excluded region near u = {u:.6}", path.name),
            );
        }
    }
    out
}

fn first_excluded_sample(path: &Path, region: &Region) -> Option<f64> {
    const PER_SEGMENT: usize = 32;
    let n = path.segments();
    (0..n).find_map(|i| {
        (0..=PER_SEGMENT).find_map(|k| {
            let t = k as f64 / PER_SEGMENT as f64;
            region
                .contains(path.segment_point(i, t))
                .then(|| (i as f64 + t) / n as f64)
        })
    })
}
