//! Longitudinal Lorentz boosts of the correlated-momentum phase.

use super::grid::SpacetimePoint;
use crate::correlation::{CarrierParameters, GroupVelocity};
use crate::error::{Error, Result};

/// Lorentz factor of a subluminal frame velocity.
pub fn gamma_l(v_l: f64) -> Result<f64> {
    if !(v_l.is_finite() && v_l.abs() < 1.0) {
        return Err(Error::InvalidBoost(v_l));
    }
    Ok(1.0 / (1.0 - v_l * v_l).sqrt())
}

/// Coordinates in a frame moving at `v_l` along `x3`.
pub fn boost_coordinates(x: SpacetimePoint, v_l: f64) -> Result<SpacetimePoint> {
    let g = gamma_l(v_l)?;
    Ok(SpacetimePoint::new(
        g * (x.x0 - v_l * x.x3),
        x.x1,
        x.x2,
        g * (x.x3 - v_l * x.x0),
    ))
}

/// Nominal-frame coordinates of a point given in the frame moving at `v_l`.
pub fn unboost_coordinates(x_prime: SpacetimePoint, v_l: f64) -> Result<SpacetimePoint> {
    boost_coordinates(x_prime, -v_l)
}

/// Nominal phase velocity seen from the moving frame, `(β_p - v_L)/(1 - β_p v_L)`.
pub fn boosted_phase_velocity(beta_p: f64, v_l: f64) -> f64 {
    (beta_p - v_l) / (1.0 - beta_p * v_l)
}

/// Nominal-frame phase `𝒫(β_p x0 - x3) + (p3 - 𝒫)(v_a x0 - x3)`.
pub fn comoving_phase(x: SpacetimePoint, carrier: &CarrierParameters, v_a: f64, p3: f64) -> f64 {
    carrier.e * x.x0 - carrier.p * x.x3 + (p3 - carrier.p) * x.xi(v_a)
}

/// The same phase written in the moving-frame coordinates `x_prime`.
pub fn boosted_phase(
    x_prime: SpacetimePoint,
    v_l: f64,
    carrier: &CarrierParameters,
    group: &GroupVelocity,
    p3: f64,
) -> Result<f64> {
    let g = gamma_l(v_l)?;
    let v_a = group.v_a();
    let bp = boosted_phase_velocity(carrier.beta_p, v_l);
    let carrier_term = carrier.p / (g * (1.0 + bp * v_l)) * (bp * x_prime.x0 - x_prime.x3);
    let envelope_term =
        g * (p3 - carrier.p) * ((v_a - v_l) * x_prime.x0 - (1.0 - v_a * v_l) * x_prime.x3);
    Ok(carrier_term + envelope_term)
}

/// Phase in the frame co-moving with a subluminal envelope (`v_L = v_a`).
///
/// The envelope term depends on `x3'` only.
pub fn subluminal_rest_phase(
    x_prime: SpacetimePoint,
    carrier: &CarrierParameters,
    group: &GroupVelocity,
    p3: f64,
) -> Result<f64> {
    if group.is_superluminal() {
        return Err(Error::invalid("v_a", "subluminal frame needs |v_a| < 1"));
    }
    let v_a = group.v_a();
    let gamma_a = group.gamma_a_sq().sqrt();
    let bp = boosted_phase_velocity(carrier.beta_p, v_a);
    Ok(carrier.p / (gamma_a * (1.0 + bp * v_a)) * (bp * x_prime.x0 - x_prime.x3)
        - (p3 - carrier.p) / gamma_a * x_prime.x3)
}

/// Phase in the frame moving at `v_L = 1/v_a` for a superluminal envelope.
///
/// The envelope term depends on `x0'` only. The frame factor is
/// `γ_L = |v_a|/√(v_a² - 1)`.
pub fn superluminal_rest_phase(
    x_prime: SpacetimePoint,
    carrier: &CarrierParameters,
    group: &GroupVelocity,
    p3: f64,
) -> Result<f64> {
    if !group.is_superluminal() {
        return Err(Error::invalid("v_a", "superluminal frame needs |v_a| > 1"));
    }
    let v_a = group.v_a();
    let g = gamma_l(1.0 / v_a)?;
    let bp = boosted_phase_velocity(carrier.beta_p, 1.0 / v_a);
    Ok(v_a * carrier.p / (g * (v_a + bp)) * (bp * x_prime.x0 - x_prime.x3)
        + (p3 - carrier.p) * v_a / g * x_prime.x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(v_a: f64, p: f64) -> (GroupVelocity, CarrierParameters) {
        let g = GroupVelocity::new(v_a).unwrap();
        let c = CarrierParameters::new(p, &g, 1.0).unwrap();
        (g, c)
    }

    #[test]
    fn identity_boost_is_nominal_phase() {
        let (g, c) = setup(2.0, 2.0);
        let x = SpacetimePoint::new(13.0, 0.5, -1.0, 4.5);
        let a = boosted_phase(x, 0.0, &c, &g, 2.01).unwrap();
        let b = comoving_phase(x, &c, 2.0, 2.01);
        assert!((a - b).abs() < 1e-12 * b.abs());
    }

    #[test]
    fn boosted_phase_is_invariant() {
        let (g, c) = setup(0.4, 1.5);
        let xp = SpacetimePoint::new(3.0, 0.0, 0.0, -7.0);
        for v in [-0.6, 0.3, 0.9] {
            let x = unboost_coordinates(xp, v).unwrap();
            let a = boosted_phase(xp, v, &c, &g, 1.52).unwrap();
            let b = comoving_phase(x, &c, 0.4, 1.52);
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn round_trip_coordinates() {
        let x = SpacetimePoint::new(1.0, 2.0, 3.0, 4.0);
        let y = unboost_coordinates(boost_coordinates(x, 0.7).unwrap(), 0.7).unwrap();
        assert!((x.x0 - y.x0).abs() < 1e-12 && (x.x3 - y.x3).abs() < 1e-12);
        assert_eq!((x.x1, x.x2), (y.x1, y.x2));
    }

    #[test]
    fn rejects_luminal_frames() {
        let (g, c) = setup(2.0, 2.0);
        let x = SpacetimePoint::default();
        assert!(matches!(boosted_phase(x, 1.0, &c, &g, 2.0), Err(Error::InvalidBoost(_))));
        assert!(matches!(boosted_phase(x, -1.5, &c, &g, 2.0), Err(Error::InvalidBoost(_))));
        assert!(subluminal_rest_phase(x, &c, &g, 2.0).is_err());
        let (g, c) = setup(0.5, 2.0);
        assert!(superluminal_rest_phase(x, &c, &g, 2.0).is_err());
    }

    #[test]
    fn rest_frames_isolate_the_envelope() {
        // envelope term alone: set the carrier momentum contribution aside by differencing p3
        let (g, c) = setup(0.5, 2.0);
        let x = SpacetimePoint::new(5.0, 0.0, 0.0, 1.0);
        let dt = SpacetimePoint::new(9.0, 0.0, 0.0, 1.0);
        let env = |x, p3| subluminal_rest_phase(x, &c, &g, p3).unwrap() - subluminal_rest_phase(x, &c, &g, 2.0).unwrap();
        assert!((env(x, 2.1) - env(dt, 2.1)).abs() < 1e-12);

        let (g, c) = setup(3.0, 2.0);
        let dz = SpacetimePoint::new(5.0, 0.0, 0.0, -4.0);
        let env = |x, p3| superluminal_rest_phase(x, &c, &g, p3).unwrap() - superluminal_rest_phase(x, &c, &g, 2.0).unwrap();
        assert!((env(x, 2.1) - env(dz, 2.1)).abs() < 1e-12);
    }
}
