//! Direct plane-wave sum over a spectral node set.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::SpacetimePoint;
use crate::error::{Error, Result};
use crate::kinematics::{bispinor_u_with_energy, Bispinor, NORMALIZATION_TOLERANCE};
use crate::spectrum::SpectralNodeSet;

#[derive(Debug, Clone, Copy)]
struct Term {
    p1: f64,
    p2: f64,
    p3: f64,
    energy: f64,
    coeff: [Complex64; 4],
}

/// `ψ(x) = (2π)^{-3/2} Σ_i w_i f_i (2E_i)^{-1/2} u(p_i) e^{-i(E_i x0 - p_i·x)}`.
///
/// The global phase is chosen so that the first component is real and
/// positive at the packet centre `x = 0`.
#[derive(Debug, Clone)]
pub struct QuadratureField {
    terms: Vec<Term>,
    phase: Complex64,
}

impl QuadratureField {
    pub fn new(nodes: &SpectralNodeSet) -> Result<Self> {
        let total = nodes.total_probability();
        if !((total - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            return Err(Error::Normalization {
                sum: total,
                deficit: 1.0 - total,
            });
        }
        let m = nodes.spec.m;
        let pref = (2.0 * PI).powf(-1.5);
        let terms = nodes
            .nodes
            .iter()
            .map(|n| {
                let u = bispinor_u_with_energy(n.momentum(), n.energy, m);
                let s = n.amplitude * (pref * n.weight / (2.0 * n.energy).sqrt());
                Term {
                    p1: n.p1,
                    p2: n.p2,
                    p3: n.pc,
                    energy: n.energy,
                    coeff: u.0.map(|c| c * s),
                }
            })
            .collect();
        let mut field = QuadratureField {
            terms,
            phase: Complex64::new(1.0, 0.0),
        };
        field.phase = reference_phase(field.raw(SpacetimePoint::default()));
        Ok(field)
    }

    /// Sum without the global phase convention.
    pub fn raw(&self, x: SpacetimePoint) -> Bispinor {
        let mut acc = [Neumaier::default(); 8];
        for t in &self.terms {
            let phase = t.p1 * x.x1 + t.p2 * x.x2 + t.p3 * x.x3 - t.energy * x.x0;
            let (s, c) = phase.sin_cos();
            let e = Complex64::new(c, s);
            for (k, coeff) in t.coeff.iter().enumerate() {
                let v = coeff * e;
                acc[2 * k].add(v.re);
                acc[2 * k + 1].add(v.im);
            }
        }
        Bispinor(std::array::from_fn(|k| {
            Complex64::new(acc[2 * k].total(), acc[2 * k + 1].total())
        }))
    }

    pub fn eval(&self, x: SpacetimePoint) -> Bispinor {
        self.raw(x).scale(self.phase)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// One-shot evaluation; prefer [`QuadratureField`] for many points.
pub fn eval_quadrature(nodes: &SpectralNodeSet, x: SpacetimePoint) -> Result<Bispinor> {
    Ok(QuadratureField::new(nodes)?.eval(x))
}

/// Unit factor that rotates the first component of `centre` onto the positive real axis.
pub(crate) fn reference_phase(centre: Bispinor) -> Complex64 {
    let c0 = centre.0[0];
    if c0.norm() > 1e-300 {
        c0.conj() / c0.norm()
    } else {
        Complex64::new(1.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{bispinor_u, ThreeMomentum};
    use crate::spectrum::WavepacketSpec;

    #[test]
    fn single_node_is_one_plane_wave() {
        let set = SpectralNodeSet::plane_wave(&WavepacketSpec::reference()).unwrap();
        let f = QuadratureField::new(&set).unwrap();
        let p = ThreeMomentum::new(0.0, 0.0, 2.0);
        let e = 5f64.sqrt();
        let expect = bispinor_u(p, 1.0).unwrap() * ((2.0 * PI).powf(-1.5) / (2.0 * e).sqrt());
        assert!(f.eval(SpacetimePoint::default()).max_abs_diff(&expect) < 1e-15);

        // moving along the phase front only rotates the spinor
        let x = SpacetimePoint::new(3.0, 0.4, -1.0, 7.0);
        let dt = 11.0;
        let vp = e / 2.0;
        let y = SpacetimePoint::new(x.x0 + dt, x.x1, x.x2, x.x3 + vp * dt);
        let (a, b) = (f.eval(x), f.eval(y));
        assert!((a.density() - b.density()).abs() < 1e-14 * a.density());
        let ratio = b[0] / a[0];
        assert!((ratio.norm() - 1.0).abs() < 1e-12);
        assert!((b[2] / a[2] - ratio).norm() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = Neumaier::default();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.total() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn rejects_unnormalized_nodes() {
        let mut set = SpectralNodeSet::plane_wave(&WavepacketSpec::reference()).unwrap();
        set.nodes[0].amplitude *= 2.0;
        assert!(matches!(
            QuadratureField::new(&set),
            Err(Error::Normalization { .. })
        ));
    }
}
