//! Correlated-momentum constraint that pins the group velocity.
//!
//! Every plane wave in a packet lies on the intersection of the mass shell
//! with the hyperplane `E = v_a p3 + κ`. For a fixed carrier momentum `P`
//! (equivalently `κ = ℰ - v_a P`) that intersection gives the longitudinal
//! momentum `p_c` as a function of `|p_perp|^2`.
//!
//! Only the signed `γ_a^2 = 1 / (1 - v_a^2)` is ever stored, which keeps all
//! intermediates real for superluminal `v_a`.

use crate::error::{Error, Result};
use crate::kinematics::check_mass;

/// Discriminants in `(-DISCRIMINANT_RTOL * scale, 0)` are clamped to zero.
pub const DISCRIMINANT_RTOL: f64 = 1e-12;

/// Relative tolerance on `v_a β_p - 1` below which the paraxial form is rejected.
pub const PARAXIAL_DEGENERACY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign of `x`, with zero mapped to `Plus`.
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Group velocity along `e3` with its signed `γ_a^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupVelocity {
    v_a: f64,
    gamma_a_sq: f64,
}

impl GroupVelocity {
    pub fn new(v_a: f64) -> Result<Self> {
        if !v_a.is_finite() {
            return Err(Error::invalid("v_a", "group velocity must be finite"));
        }
        if v_a.abs() == 1.0 {
            return Err(Error::Luminal);
        }
        Ok(GroupVelocity {
            v_a,
            gamma_a_sq: 1.0 / (1.0 - v_a * v_a),
        })
    }

    pub fn v_a(&self) -> f64 {
        self.v_a
    }

    pub fn gamma_a_sq(&self) -> f64 {
        self.gamma_a_sq
    }

    pub fn is_superluminal(&self) -> bool {
        self.v_a.abs() > 1.0
    }
}

/// Carrier momentum `P`, its energy `ℰ`, phase velocity `β_p = ℰ/P` and
/// phase-advance constant `κ = ℰ - v_a P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierParameters {
    pub p: f64,
    pub e: f64,
    pub beta_p: f64,
    pub kappa: f64,
}

impl CarrierParameters {
    pub fn new(p: f64, group: &GroupVelocity, m: f64) -> Result<Self> {
        check_mass(m)?;
        if !p.is_finite() {
            return Err(Error::invalid("P", "carrier momentum must be finite"));
        }
        let e = (m * m + p * p).sqrt();
        Ok(CarrierParameters {
            p,
            e,
            beta_p: e / p,
            kappa: e - group.v_a * p,
        })
    }

    /// Particle velocity of the carrier, `P / ℰ`.
    pub fn v_n(&self) -> f64 {
        self.p / self.e
    }
}

/// One member of the family of constraint curves, fixed by `(v_a, P, m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationCurve {
    pub group: GroupVelocity,
    pub carrier: CarrierParameters,
    pub m: f64,
    pub varpi: Sign,
    /// `γ_a^2 (v_a ℰ - P)`, the vertex offset of the curve.
    offset: f64,
    pub pperp_max: f64,
}

impl CorrelationCurve {
    pub fn new(p: f64, group: GroupVelocity, m: f64) -> Result<Self> {
        let carrier = CarrierParameters::new(p, &group, m)?;
        let offset = group.gamma_a_sq * (group.v_a * carrier.e - carrier.p);
        let pperp_max = if group.gamma_a_sq < 0.0 {
            f64::INFINITY
        } else {
            (offset * offset / group.gamma_a_sq).sqrt()
        };
        Ok(CorrelationCurve {
            group,
            carrier,
            m,
            varpi: Sign::of(offset),
            offset,
            pperp_max,
        })
    }

    /// `γ_a^2 (v_a ℰ - P)`; zero only when `v_a` equals the carrier velocity.
    pub fn vertex_offset(&self) -> f64 {
        self.offset
    }

    /// Discriminant `γ_a^4 (v_a ℰ - P)^2 - γ_a^2 |p_perp|^2`.
    pub fn discriminant(&self, pperp_sq: f64) -> f64 {
        self.offset * self.offset - self.group.gamma_a_sq * pperp_sq
    }

    /// Energy from the hyperplane, `v_a p_c + κ`.
    pub fn energy(&self, pc: f64) -> f64 {
        self.group.v_a * (pc - self.carrier.p) + self.carrier.e
    }

    /// `∂p_c/∂P` at fixed `p_perp`, given the node's `p_c` and energy.
    pub fn jacobian(&self, pc: f64, energy: f64) -> f64 {
        let v = self.group.v_a;
        (v - self.carrier.p / self.carrier.e) / (v - pc / energy)
    }
}

pub fn kappa_from_p(p: f64, v_a: f64, m: f64) -> Result<f64> {
    check_mass(m)?;
    Ok((m * m + p * p).sqrt() - v_a * p)
}

/// Inverts [`kappa_from_p`] on the requested root.
pub fn p_from_kappa(kappa: f64, v_a: f64, m: f64, branch: Sign) -> Result<f64> {
    check_mass(m)?;
    let g = GroupVelocity::new(v_a)?;
    let g2 = g.gamma_a_sq;
    let disc = g2 * g2 * kappa * kappa - g2 * m * m;
    let disc = clamp_discriminant(disc, g2 * g2 * kappa * kappa)
        .ok_or(Error::NoRealSolution { discriminant: disc })?;
    Ok(g2 * v_a * kappa + branch.value() * disc.sqrt())
}

/// Root of [`p_from_kappa`] that reproduces `p`.
pub fn branch_for_p(p: f64, v_a: f64, m: f64) -> Result<Sign> {
    let g = GroupVelocity::new(v_a)?;
    let kappa = kappa_from_p(p, v_a, m)?;
    Ok(Sign::of(p - g.gamma_a_sq * v_a * kappa))
}

fn clamp_discriminant(disc: f64, scale: f64) -> Option<f64> {
    if disc >= 0.0 {
        Some(disc)
    } else if disc > -DISCRIMINANT_RTOL * scale.abs() {
        Some(0.0)
    } else {
        None
    }
}

fn check_pperp_sq(pperp_sq: f64) -> Result<()> {
    if pperp_sq >= 0.0 && pperp_sq.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("pperp_sq", format!("must be finite and >= 0, got {pperp_sq}")))
    }
}

/// Exact `p_c` on a curve parameterized by its vertex `P`.
///
/// Written as `P + γ²p⊥² / (a + ϖ sqrt(D))` with `a = γ²(v_a ℰ - P)`, which
/// is free of cancellation near the vertex and returns `P` exactly there.
pub fn pc_exact(pperp_sq: f64, curve: &CorrelationCurve) -> Result<f64> {
    check_pperp_sq(pperp_sq)?;
    if pperp_sq == 0.0 {
        return Ok(curve.carrier.p);
    }
    let a = curve.offset;
    let disc = curve.discriminant(pperp_sq);
    let disc = clamp_discriminant(disc, a * a).ok_or(Error::OutOfSupport {
        pperp_sq,
        pperp_max: curve.pperp_max,
    })?;
    let denom = a + curve.varpi.value() * disc.sqrt();
    if denom == 0.0 {
        return Err(Error::OutOfSupport {
            pperp_sq,
            pperp_max: curve.pperp_max,
        });
    }
    Ok(curve.carrier.p + curve.group.gamma_a_sq * pperp_sq / denom)
}

/// `p_c` parameterized directly by `κ`, on the requested root.
pub fn pc_general(
    pperp_sq: f64,
    kappa: f64,
    group: &GroupVelocity,
    m: f64,
    branch: Sign,
) -> Result<f64> {
    check_mass(m)?;
    check_pperp_sq(pperp_sq)?;
    let g2 = group.gamma_a_sq;
    let lead = kappa * g2;
    let disc = lead * lead - g2 * (m * m + pperp_sq);
    let disc = clamp_discriminant(disc, lead * lead).ok_or_else(|| {
        // support edge in p_perp^2: lead^2 / g2 - m^2
        let edge = lead * lead / g2 - m * m;
        Error::OutOfSupport {
            pperp_sq,
            pperp_max: edge.max(0.0).sqrt(),
        }
    })?;
    Ok(lead * group.v_a + branch.value() * disc.sqrt())
}

/// Root of [`pc_general`] that coincides with [`pc_exact`] on `curve`.
pub fn matching_branch(curve: &CorrelationCurve) -> Sign {
    curve.varpi.flip()
}

/// Quadratic (paraxial) approximation `P + p⊥² / (2P(v_a β_p - 1))`.
pub fn pc_paraxial(
    pperp_sq: f64,
    carrier: &CarrierParameters,
    group: &GroupVelocity,
) -> Result<f64> {
    check_pperp_sq(pperp_sq)?;
    // P (v_a β_p - 1) = v_a ℰ - P, which stays finite at P = 0.
    let denom = paraxial_denominator(carrier, group)?;
    Ok(carrier.p + pperp_sq / (2.0 * denom))
}

/// `P (v_a β_p - 1)`, rejected when it vanishes to relative tolerance.
pub fn paraxial_denominator(carrier: &CarrierParameters, group: &GroupVelocity) -> Result<f64> {
    let lead = group.v_a * carrier.e;
    let denom = lead - carrier.p;
    if denom.abs() <= PARAXIAL_DEGENERACY_RTOL * lead.abs().max(carrier.p.abs()) {
        return Err(Error::DegenerateParaxial {
            offset: group.v_a * carrier.beta_p - 1.0,
        });
    }
    Ok(denom)
}

/// Envelope length `ξ0 = P (v_a β_p - 1) / w^2`. Returns 0 in the degenerate case.
pub fn xi0(carrier: &CarrierParameters, group: &GroupVelocity, w: f64) -> Result<f64> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::invalid("w", format!("transverse spread must be positive, got {w}")));
    }
    Ok((group.v_a * carrier.e - carrier.p) / (w * w))
}

/// Largest `|p_perp|` with a real `p_c`; `INFINITY` when `γ_a^2 < 0`.
pub fn support_radius(curve: &CorrelationCurve) -> f64 {
    curve.pperp_max
}

/// Curve points `(p1, p3)` with `p2 = 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Projection {
    pub points: Vec<(f64, f64)>,
    pub dropped: usize,
}

pub fn fig2_projection(curve: &CorrelationCurve, pperp_samples: &[f64]) -> Projection {
    let mut out = Projection::default();
    for &p1 in pperp_samples {
        match pc_exact(p1 * p1, curve) {
            Ok(p3) => out.points.push((p1, p3)),
            Err(_) => out.dropped += 1,
        }
    }
    if out.dropped > 0 {
        log::warn!(
            "{} projection samples outside support (|p_perp| <= {})",
            out.dropped,
            curve.pperp_max
        );
    }
    out
}
