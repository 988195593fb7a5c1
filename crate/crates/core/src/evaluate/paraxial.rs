//! Closed-form paraxial field built from Laguerre-Gaussian envelopes.
//!
//! Each mode contributes `(U1, 0, U3, U4)` where `U1` is the propagated
//! Laguerre-Gaussian profile in the co-moving coordinate `ξ = v_a x0 - x3`,
//! `U3` follows from the transverse Laplacian of `U1` and `U4` from
//! `(∂1 + i∂2) U1`. The carrier `e^{-iPη}` and the longitudinal envelope
//! `exp[-(ζ/Δζ)^k]` multiply the mode sum.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::SpacetimePoint;
use super::quadrature::reference_phase;
use crate::correlation::{paraxial_denominator, xi0, CarrierParameters, GroupVelocity};
use crate::error::Result;
use crate::kinematics::Bispinor;
use crate::special::{
    laguerre, laguerre_d1, laguerre_d2, super_gaussian, super_gaussian_sq_integral, GaussHermite,
};
use crate::spectrum::WavepacketSpec;

/// Below this value of `|v_a β_p - 1| P² / w²` the closed form is flagged.
pub const PARAXIAL_RATIO_WARN: f64 = 50.0;

/// `R(ξ)`, the Gouy-type phase and `ξ0` for one mode at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaxialEnvelopeParams {
    pub r_width: f64,
    pub lambda: f64,
    pub xi0: f64,
}

impl ParaxialEnvelopeParams {
    pub fn new(w: f64, xi0: f64, xi: f64, n: u32, ell: i32, theta: f64) -> Self {
        let s = xi / xi0;
        ParaxialEnvelopeParams {
            r_width: (1.0 + s * s).sqrt() / w,
            lambda: f64::from(ell) * theta
                - f64::from(2 * n + ell.unsigned_abs() + 1) * s.atan(),
            xi0,
        }
    }
}

/// Pieces of one mode at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeComponents {
    pub u1: Complex64,
    pub laplacian_u1: Complex64,
    /// `(∂1 + i∂2) U1`
    pub raising_u1: Complex64,
}

#[derive(Debug, Clone)]
pub struct ParaxialField {
    spec: WavepacketSpec,
    group: GroupVelocity,
    carrier: CarrierParameters,
    xi0: f64,
    /// `P c / (ℰ+m)` for `U3 = P/(ℰ+m) [1 - c ∇⊥²] U1`, finite at `P = 0`.
    laplacian_coeff: f64,
    scale: f64,
    phase: Complex64,
    paraxial_ratio: f64,
}

impl ParaxialField {
    pub fn new(spec: &WavepacketSpec) -> Result<Self> {
        spec.validate()?;
        let group = spec.group()?;
        let carrier = spec.carrier()?;
        let denom = paraxial_denominator(&carrier, &group)?;
        let xi0 = xi0(&carrier, &group, spec.w)?;
        let (e, p, m, w) = (carrier.e, carrier.p, spec.m, spec.w);
        let paraxial_ratio = (denom * p).abs() / (w * w);
        if paraxial_ratio < PARAXIAL_RATIO_WARN {
            log::warn!(
                "paraxial ratio |v_a β_p - 1| P²/w² = {paraxial_ratio:.3} is below {PARAXIAL_RATIO_WARN}; closed form is unreliable"
            );
        }
        let laplacian_coeff = (e - group.v_a() * p + m) / (2.0 * w * w * xi0 * (e + m) * (e + m));
        let mut field = ParaxialField {
            spec: spec.clone(),
            group,
            carrier,
            xi0,
            laplacian_coeff,
            scale: 1.0,
            phase: Complex64::new(1.0, 0.0),
            paraxial_ratio,
        };
        field.scale = 1.0 / field.raw_norm_sq().sqrt();
        field.phase = reference_phase(field.unscaled(SpacetimePoint::default()));
        Ok(field)
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    pub fn paraxial_ratio(&self) -> f64 {
        self.paraxial_ratio
    }

    pub fn carrier(&self) -> &CarrierParameters {
        &self.carrier
    }

    /// Parseval norm of the unscaled field: transverse part by Gauss-Hermite
    /// (exact for the polynomial-times-Gaussian integrand), longitudinal part
    /// from the closed-form super-Gaussian energy.
    fn raw_norm_sq(&self) -> f64 {
        let spec = &self.spec;
        let (e, p, m, w) = (self.carrier.e, self.carrier.p, spec.m, spec.w);
        let max_order = spec
            .modes
            .iter()
            .map(|md| 2 * md.n + md.ell.unsigned_abs())
            .max()
            .unwrap_or(0) as usize;
        let gh = GaussHermite::new(2 * max_order + 8);
        let em = e + m;
        let mut total = 0.0;
        for (t1, w1) in gh.nodes.iter().zip(&gh.weights) {
            for (t2, w2) in gh.nodes.iter().zip(&gh.weights) {
                // |T|² carries exp(-ρ²); GH weight exp(-t1² - t2²) with p = w t
                let (p1, p2) = (w * t1, w * t2);
                let t = spec.transverse_amplitude(p1, p2);
                let q = p1 * p1 + p2 * p2;
                let lower3 = p / em + self.laplacian_coeff * q;
                let spin = 1.0 + lower3 * lower3 + q / (em * em);
                total += w1 * w2 * (t1 * t1 + t2 * t2).exp() * t.norm_sqr() * spin;
            }
        }
        let transverse = total * w * w;
        let longitudinal =
            super_gaussian_sq_integral(spec.delta_zeta, spec.envelope_exponent) / (2.0 * PI);
        transverse * longitudinal
    }

    /// Laguerre-Gaussian profile of one mode and the two derivatives the
    /// lower components need, at transverse position `(x1, x2)` and `ξ`.
    pub fn mode_components(&self, n: u32, ell: i32, x1: f64, x2: f64, xi: f64) -> ModeComponents {
        let w = self.spec.w;
        let a = ell.unsigned_abs();
        let af = f64::from(a);
        let q = Complex64::new(1.0, xi / self.xi0);
        let env = ParaxialEnvelopeParams::new(w, self.xi0, xi, n, ell, 0.0);
        let rr = env.r_width;
        let rr2 = rr * rr;
        let u = x1 * x1 + x2 * x2;
        let beta = w * w / (2.0 * q);
        let x = u / rr2;
        let l0 = laguerre(n, af, x);
        let l1 = laguerre_d1(n, af, x);
        let l2 = laguerre_d2(n, af, x);
        let gauss = (-beta * u).exp();
        let h = gauss * l0;
        let h1 = gauss * (l1 / rr2 - beta * l0);
        let h2 = gauss * (l2 / (rr2 * rr2) - beta * 2.0 * l1 / rr2 + beta * beta * l0);
        // U1 = C r^a h(r²) e^{iℓθ}
        let gouy = Complex64::from_polar(1.0, env.lambda);
        let c = gouy * (w / rr) * rr.powi(-(a as i32));
        // (x1 + i x2)^a = r^a e^{iaθ}; conjugate for negative ℓ
        let z = Complex64::new(x1, x2);
        let za = if ell >= 0 { z.powu(a) } else { z.conj().powu(a) };
        let u1 = c * za * h;
        let laplacian_u1 = c * za * (4.0 * u * h2 + 4.0 * (af + 1.0) * h1);
        // (∂1 + i∂2)(r^a h e^{iℓθ}) = e^{i(ℓ+1)θ}[(a - ℓ) r^{a-1} h + 2 r^{a+1} h']
        let raising_u1 = if ell >= 0 {
            c * za * z * (2.0 * h1)
        } else {
            // r^{a-1} e^{i(ℓ+1)θ} = conj(z)^{a-1} for ℓ = -a
            let zam1 = z.conj().powu(a - 1);
            c * (zam1 * ((2.0 * af) * h) + zam1 * (u * 2.0 * h1))
        };
        ModeComponents {
            u1,
            laplacian_u1,
            raising_u1,
        }
    }

    fn unscaled(&self, x: SpacetimePoint) -> Bispinor {
        let spec = &self.spec;
        let (e, p, m) = (self.carrier.e, self.carrier.p, spec.m);
        let em = e + m;
        let xi = x.xi(self.group.v_a());
        let zeta = x.zeta(self.carrier.v_n());
        let envelope = super_gaussian(zeta, spec.delta_zeta, spec.envelope_exponent);
        if envelope == 0.0 {
            return Bispinor::ZERO;
        }
        // P η = ℰ x0 - P x3 stays finite at P = 0
        let carrier_phase = Complex64::from_polar(1.0, -(e * x.x0 - p * x.x3));
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for md in &spec.modes {
            let mc = self.mode_components(md.n, md.ell, x.x1, x.x2, xi);
            let amp = md.weight
                * 2.0
                * PI
                * Complex64::i().powi(md.ell)
                * if md.n % 2 == 0 { 1.0 } else { -1.0 };
            let u3 = mc.u1 * (p / em) - mc.laplacian_u1 * self.laplacian_coeff;
            let u4 = -Complex64::i() / em * mc.raising_u1;
            out[0] += amp * mc.u1;
            out[2] += amp * u3;
            out[3] += amp * u4;
        }
        let s = carrier_phase * (envelope * (2.0 * PI).powf(-1.5));
        Bispinor(out.map(|c| c * s))
    }

    pub fn eval(&self, x: SpacetimePoint) -> Bispinor {
        self.unscaled(x).scale(self.phase * self.scale)
    }
}

pub fn eval_paraxial(spec: &WavepacketSpec, x: SpacetimePoint) -> Result<Bispinor> {
    Ok(ParaxialField::new(spec)?.eval(x))
}
