//! Certifies whether a scenario's loop phase is topological.
//!
//! The conditions checked are: velocity normal to both fields along every
//! path, a negligible velocity-dependent mass shift, a curl-free `T` in a
//! tube around every path, a non-zero enclosed flux, and equal dynamical
//! phases on paired interferometer arms.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::phase::{dynamical_phase, line_phase, phase_vector_field, PhaseError, PhaseVectorField};
use crate::scenario::{Path, PhaseKind, Scenario};
use crate::veccalc::{fd_curl, format_number, FdParams, SpatialField, VecCalcError, Vec3};

/// Points on each tube ring.
pub const RING_POINTS: usize = 8;

/// Largest default tube radius.
pub const MAX_TUBE_RADIUS: f64 = 0.2;

/// Fields below this fraction of their largest sampled magnitude are
/// skipped by the orthogonality checks.
pub const VANISHING_FIELD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopoError {
    #[error("scenario has no closed path")]
    NoClosedPath,
    #[error("tube of radius {radius} around path '{path}' reaches a singularity (clearance {clearance})")]
    TubeHitsSingularity { path: String, radius: f64, clearance: f64 },
    #[error(transparent)]
    Stencil(#[from] VecCalcError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Outcome of one condition: the measured worst-case value and whether it
/// is under threshold. `vacuous` marks checks with nothing to measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub vacuous: bool,
}

impl Check {
    fn below(value: f64, threshold: f64) -> Check {
        Check { pass: value < threshold, value, threshold, vacuous: false }
    }

    fn vacuous(threshold: f64) -> Check {
        Check { pass: true, value: 0.0, threshold, vacuous: true }
    }

    /// The worse of two checks of the same condition.
    fn worst(self, other: Check) -> Check {
        match (self.vacuous, other.vacuous) {
            (true, _) => other,
            (_, true) => self,
            _ if other.value > self.value => other,
            _ => self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Orthogonality {
    pub v_perp_b: Check,
    pub v_perp_e: Check,
}

fn max_cosine(samples: &[(Vec3, Vec3)], threshold: f64) -> Check {
    let scale = samples.iter().map(|(_, f)| f.norm()).fold(0.0, f64::max);
    let cosines: Vec<f64> = samples
        .iter()
        .filter(|(_, f)| scale > 0.0 && f.norm() > VANISHING_FIELD * scale)
        .filter_map(|(v, f)| Some(v.normalized()?.dot(f.normalized()?).abs()))
        .collect();
    if cosines.is_empty() {
        return Check::vacuous(threshold);
    }
    Check::below(cosines.into_iter().fold(0.0, f64::max), threshold)
}

/// Largest `|v̂·B̂|` and `|v̂·Ê|` over `n_samples` points of `path`.
pub fn check_orthogonality(s: &Scenario, path: &Path, n_samples: usize) -> Orthogonality {
    let tol = s.checks.orthogonality_tol;
    let (mut vb, mut ve) = (Vec::new(), Vec::new());
    for u in path.sample_parameters(n_samples.max(2)) {
        let (x, v) = (path.point(u), path.tangent(u));
        vb.push((v, s.b.eval(x)));
        ve.push((v, s.e.eval(x)));
    }
    Orthogonality { v_perp_b: max_cosine(&vb, tol), v_perp_e: max_cosine(&ve, tol) }
}

/// Largest ratio of the mass-shift coefficient (`αB²` for HMW, `χE²` for
/// AC) to the particle mass along `path`.
pub fn check_mass_condition(s: &Scenario, path: &Path) -> Check {
    let tol = s.checks.mass_ratio_tol;
    let t = match s.phase_kind {
        PhaseKind::PermanentElectric => return Check::vacuous(tol),
        kind => PhaseVectorField::induced(kind, s.particle.coupling(kind), s.e.clone(), s.b.clone()),
    };
    let ratio = path
        .sample_parameters(s.checks.samples.max(2))
        .into_iter()
        .map(|u| t.mass_shift_coefficient(path.point(u)).abs() / s.particle.mass)
        .fold(0.0, f64::max);
    Check::below(ratio, tol)
}

/// Samples `|∇×T|` on `path` and on rings of radius `tube_radius` around it.
///
/// The threshold is `rel_tol` times the mean `|T|` on the path; a field that
/// vanishes on the path is tested against `rel_tol` itself.
pub fn check_curl_free_tube<F: SpatialField + ?Sized>(
    t: &F,
    path: &Path,
    tube_radius: f64,
    n_samples: usize,
    rel_tol: f64,
    p: &FdParams,
) -> Result<Check, TopoError> {
    let (clearance, _) = path.closest_approach(|x| t.clearance(x));
    if clearance <= tube_radius {
        return Err(TopoError::TubeHitsSingularity { path: path.name.clone(), radius: tube_radius, clearance });
    }
    let params = path.sample_parameters(n_samples.max(2));
    let mean_t = params.iter().map(|&u| t.value(path.point(u)).norm()).sum::<f64>() / params.len() as f64;
    let threshold = if mean_t > 0.0 { rel_tol * mean_t } else { rel_tol };
    let mut worst = 0.0f64;
    for &u in &params {
        let x = path.point(u);
        worst = worst.max(fd_curl(t, x, p)?.norm());
        let (n1, n2) = normal_frame(path.tangent(u));
        for k in 0..RING_POINTS {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / RING_POINTS as f64;
            let y = x + (n1 * phi.cos() + n2 * phi.sin()) * tube_radius;
            worst = worst.max(fd_curl(t, y, p)?.norm());
        }
    }
    Ok(Check::below(worst, threshold))
}

/// Two unit vectors completing `t` to an orthonormal frame.
fn normal_frame(t: Vec3) -> (Vec3, Vec3) {
    let t = t.normalized().unwrap_or(Vec3::Z);
    let helper = if t.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
    let n1 = t.cross(helper).normalized().expect("helper is not parallel to t");
    (n1, t.cross(n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Topological,
    DynamicalContaminated,
    Trivial,
    NonTopological,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Topological => "topological",
            Classification::DynamicalContaminated => "dynamical-contaminated",
            Classification::Trivial => "trivial",
            Classification::NonTopological => "non-topological",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Dynamical phases of one pair of arms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmPair {
    pub a: String,
    pub b: String,
    pub phase_a: f64,
    pub phase_b: f64,
}

impl ArmPair {
    pub fn difference(&self) -> f64 {
        (self.phase_a - self.phase_b).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    #[serde(rename = "v_perp_B")]
    pub v_perp_b: Check,
    #[serde(rename = "v_perp_E")]
    pub v_perp_e: Check,
    pub mass_condition: Check,
    pub curl_free: Check,
    pub tube_radius: f64,
    /// Loop phase of the first closed path.
    pub enclosed_flux: f64,
    pub reference_path: String,
    pub arm_balance: Check,
    pub arms: Vec<ArmPair>,
    pub classification: Classification,
}

impl TopologyReport {
    /// Flat `key = value` lines in a fixed order.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let checks = [
            ("v_perp_B", &self.v_perp_b),
            ("v_perp_E", &self.v_perp_e),
            ("mass_condition", &self.mass_condition),
            ("curl_free", &self.curl_free),
            ("arm_balance", &self.arm_balance),
        ];
        for (name, c) in checks {
            let _ = writeln!(out, "{name}.pass = {}", c.pass);
            let _ = writeln!(out, "{name}.value = {}", format_number(c.value));
            let _ = writeln!(out, "{name}.threshold = {}", format_number(c.threshold));
            if c.vacuous {
                let _ = writeln!(out, "{name}.vacuous = true");
            }
        }
        let _ = writeln!(out, "tube_radius = {}", format_number(self.tube_radius));
        let _ = writeln!(out, "reference_path = {}", self.reference_path);
        let _ = writeln!(out, "enclosed_flux = {}", format_number(self.enclosed_flux));
        for arm in &self.arms {
            let _ = writeln!(out, "arm.{}.{} = {} {}", arm.a, arm.b, format_number(arm.phase_a), format_number(arm.phase_b));
        }
        let _ = writeln!(out, "classification = {}", self.classification);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

fn arm_pairs(s: &Scenario) -> Vec<(&Path, &Path)> {
    if s.checks.arm_pairs.is_empty() {
        let open: Vec<&Path> = s.paths.iter().filter(|p| !p.closed).collect();
        return open.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    }
    s.checks
        .arm_pairs
        .iter()
        .filter_map(|[a, b]| Some((s.path(a)?, s.path(b)?)))
        .collect()
}

/// Runs every check on every path and classifies the scenario.
pub fn classify(s: &Scenario) -> Result<TopologyReport, TopoError> {
    let reference = s.first_closed_path().ok_or(TopoError::NoClosedPath)?;
    let c = &s.checks;
    let t = phase_vector_field(s)?;
    let fd = FdParams::default();

    let tube_radius = match c.tube_radius {
        Some(r) => r,
        None => {
            let clearance = s
                .paths
                .iter()
                .map(|p| p.closest_approach(|x| t.singular_distance(x)).0)
                .fold(f64::INFINITY, f64::min);
            (0.5 * clearance).min(MAX_TUBE_RADIUS)
        }
    };

    let mut v_perp_b = Check::vacuous(c.orthogonality_tol);
    let mut v_perp_e = Check::vacuous(c.orthogonality_tol);
    let mut mass_condition = Check::vacuous(c.mass_ratio_tol);
    let mut curl_free = Check::vacuous(c.curl_rel_tol);
    for path in &s.paths {
        let o = check_orthogonality(s, path, c.samples);
        v_perp_b = v_perp_b.worst(o.v_perp_b);
        v_perp_e = v_perp_e.worst(o.v_perp_e);
        mass_condition = mass_condition.worst(check_mass_condition(s, path));
        let curl = check_curl_free_tube(&t, path, tube_radius, c.samples, c.curl_rel_tol, &fd)?;
        // Thresholds differ per path; compare by margin.
        if curl_free.vacuous || !curl.pass || (curl_free.pass && curl.value / curl.threshold > curl_free.value / curl_free.threshold) {
            curl_free = curl;
        }
    }

    let enclosed_flux = line_phase(&t, reference, c.quad_tol)?.value;

    let mut arms = Vec::new();
    for (a, b) in arm_pairs(s) {
        arms.push(ArmPair {
            a: a.name.clone(),
            b: b.name.clone(),
            phase_a: dynamical_phase(s, a, c.quad_tol)?.value,
            phase_b: dynamical_phase(s, b, c.quad_tol)?.value,
        });
    }
    let arm_balance = match arms.iter().map(ArmPair::difference).reduce(f64::max) {
        Some(d) => Check { pass: d <= c.arm_balance_tol, value: d, threshold: c.arm_balance_tol, vacuous: false },
        None => Check::vacuous(c.arm_balance_tol),
    };

    let geometric = v_perp_b.pass && v_perp_e.pass && mass_condition.pass && curl_free.pass;
    let classification = if enclosed_flux.abs() <= c.flux_zero_tol {
        Classification::Trivial
    } else if !geometric {
        Classification::NonTopological
    } else if !arm_balance.pass {
        Classification::DynamicalContaminated
    } else {
        Classification::Topological
    };

    Ok(TopologyReport {
        v_perp_b,
        v_perp_e,
        mass_condition,
        curl_free,
        tube_radius,
        enclosed_flux,
        reference_path: reference.name.clone(),
        arm_balance,
        arms,
        classification,
    })
}
