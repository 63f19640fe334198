//! Lab-frame dynamics of an induced electric dipole.
//!
//! The rest-frame field seen by a particle moving with velocity `v` through
//! lab fields `E`, `B` is `E + v×B`, so the induced moment is
//! `α(E + v×B)`. Two Lagrangians are provided: the uncorrected
//! `½mv² + ½α(E + v×B)²`, and the low-velocity reduction of the relativistic
//! theory, which subtracts `½α(E·v)²`.

use thiserror::Error;

use crate::phase::{phase_vector_field, PhaseError};
use crate::scenario::Scenario;
use crate::veccalc::{fd_curl, fd_grad, FdParams, VecCalcError, Vec3};

/// Points closer than this to a field singularity are rejected.
pub const SINGULAR_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DipoleError {
    #[error("speed must be < 1, got |v| = {0}")]
    Superluminal(f64),
    #[error("{point} lies on a field singularity")]
    OnSingularity { point: Vec3 },
    #[error(transparent)]
    Stencil(#[from] VecCalcError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// `α(E + v×B)`.
pub fn induced_dipole(e: Vec3, b: Vec3, v: Vec3, alpha: f64) -> Vec3 {
    (e + v.cross(b)) * alpha
}

/// Term-by-term Lagrangian density.
///
/// The interaction part is `coupling + potential + mass_shift + vb_term +
/// ev_term`, with `coupling = αv·(B×E)`, `potential = ½αE²`,
/// `mass_shift = ½αB²v²`, `vb_term = −½α(v·B)²` and `ev_term = −½α(E·v)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianBreakdown {
    pub kinetic: f64,
    pub coupling: f64,
    pub potential: f64,
    pub mass_shift: f64,
    pub vb_term: f64,
    pub ev_term: f64,
}

impl LagrangianBreakdown {
    /// Uncorrected breakdown from pointwise values; `ev_term` is zero.
    pub fn uncorrected(mass: f64, alpha: f64, e: Vec3, b: Vec3, v: Vec3) -> Self {
        LagrangianBreakdown {
            kinetic: 0.5 * mass * v.norm_squared(),
            coupling: alpha * v.dot(b.cross(e)),
            potential: 0.5 * alpha * e.norm_squared(),
            mass_shift: 0.5 * alpha * b.norm_squared() * v.norm_squared(),
            vb_term: -0.5 * alpha * v.dot(b).powi(2),
            ev_term: 0.0,
        }
    }

    /// Breakdown including the `−½α(E·v)²` correction.
    pub fn corrected(mass: f64, alpha: f64, e: Vec3, b: Vec3, v: Vec3) -> Self {
        LagrangianBreakdown {
            ev_term: -0.5 * alpha * e.dot(v).powi(2),
            ..Self::uncorrected(mass, alpha, e, b, v)
        }
    }

    pub fn interaction(&self) -> f64 {
        self.coupling + self.potential + self.mass_shift + self.vb_term + self.ev_term
    }

    pub fn total(&self) -> f64 {
        self.kinetic + self.interaction()
    }
}

fn fields_at(s: &Scenario, x: Vec3, v: Vec3) -> Result<(Vec3, Vec3), DipoleError> {
    let speed = v.norm();
    if !(speed < 1.0) {
        return Err(DipoleError::Superluminal(speed));
    }
    if s.singular_distance(x) <= SINGULAR_RADIUS {
        return Err(DipoleError::OnSingularity { point: x });
    }
    Ok((s.e.eval(x), s.b.eval(x)))
}

/// `½mv² + ½α(E + v×B)²`, term by term.
pub fn whw_lagrangian(s: &Scenario, x: Vec3, v: Vec3) -> Result<LagrangianBreakdown, DipoleError> {
    let (e, b) = fields_at(s, x, v)?;
    Ok(LagrangianBreakdown::uncorrected(s.particle.mass, s.particle.alpha, e, b, v))
}

/// `½mv² + ½α{(E + v×B)² − (E·v)²}`, term by term.
pub fn corrected_lagrangian(s: &Scenario, x: Vec3, v: Vec3) -> Result<LagrangianBreakdown, DipoleError> {
    let (e, b) = fields_at(s, x, v)?;
    Ok(LagrangianBreakdown::corrected(s.particle.mass, s.particle.alpha, e, b, v))
}

/// Classical force from `L_int = v·T + U` for static fields.
///
/// Zero `total` means the particle moves force-free at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResidual {
    /// `v × (∇×T)`.
    pub magnus: Vec3,
    /// `∇U`.
    pub potential_grad: Vec3,
    /// `∇(½κF²v²)`; second order in `v`, reported but not part of `total`.
    pub mass_shift_grad: Vec3,
    pub total: Vec3,
}

pub fn force_residual(s: &Scenario, x: Vec3, v: Vec3, p: &FdParams) -> Result<ForceResidual, DipoleError> {
    fields_at(s, x, v)?;
    let t = phase_vector_field(s)?;
    let clearance = t.singular_distance(x);
    let magnus = v.cross(fd_curl(&t, x, p)?);
    let potential_grad = fd_grad(|y| t.potential(y), clearance, x, p)?;
    let mass_shift_grad = fd_grad(|y| t.mass_shift(y, v), clearance, x, p)?;
    Ok(ForceResidual { magnus, potential_grad, mass_shift_grad, total: magnus + potential_grad })
}
