//! Free Dirac algebra in the Dirac representation: on-shell energies, the
//! positive-energy spin-up bispinor, and the phase / expectation velocities.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real momentum three-vector in units of the mass scale.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ThreeMomentum {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl ThreeMomentum {
    pub const fn new(p1: f64, p2: f64, p3: f64) -> Self {
        ThreeMomentum { p1, p2, p3 }
    }

    pub fn is_finite(&self) -> bool {
        self.p1.is_finite() && self.p2.is_finite() && self.p3.is_finite()
    }

    pub fn norm_sq(&self) -> f64 {
        self.p1 * self.p1 + self.p2 * self.p2 + self.p3 * self.p3
    }

    pub fn perp_sq(&self) -> f64 {
        self.p1 * self.p1 + self.p2 * self.p2
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }
}

/// Positive on-shell energy `E_p = sqrt(m^2 + p^2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct OnShellEnergy(f64);

impl OnShellEnergy {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub(crate) fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("m", format!("mass must be positive and finite, got {m}")))
    }
}

pub fn on_shell_energy(p: ThreeMomentum, m: f64) -> Result<OnShellEnergy> {
    check_mass(m)?;
    if !p.is_finite() {
        return Err(Error::invalid("p", "momentum components must be finite"));
    }
    Ok(OnShellEnergy((m * m + p.norm_sq()).sqrt()))
}

/// Four complex components; used both for `u(p)` and for sampled fields.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bispinor(pub [Complex64; 4]);

impl Bispinor {
    pub const ZERO: Bispinor = Bispinor([Complex64::new(0.0, 0.0); 4]);

    pub fn from_real(c: [f64; 4]) -> Self {
        Bispinor(c.map(|x| Complex64::new(x, 0.0)))
    }

    /// `self† other`
    pub fn inner(&self, other: &Bispinor) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `ψ†ψ`
    pub fn density(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `ψ†βψ`
    pub fn beta_norm(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr() - self.0[2].norm_sqr() - self.0[3].norm_sqr()
    }

    pub fn scale(&self, s: Complex64) -> Bispinor {
        Bispinor(self.0.map(|c| c * s))
    }

    pub fn max_abs_diff(&self, other: &Bispinor) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Bispinor {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for Bispinor {
    type Output = Bispinor;
    fn add(self, rhs: Bispinor) -> Bispinor {
        Bispinor(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Bispinor {
    type Output = Bispinor;
    fn sub(self, rhs: Bispinor) -> Bispinor {
        Bispinor(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for Bispinor {
    type Output = Bispinor;
    fn mul(self, rhs: f64) -> Bispinor {
        Bispinor(self.0.map(|c| c * rhs))
    }
}

impl Mul<Complex64> for Bispinor {
    type Output = Bispinor;
    fn mul(self, rhs: Complex64) -> Bispinor {
        self.scale(rhs)
    }
}

pub type Matrix4 = [[Complex64; 4]; 4];

/// `α¹, α², α³, β` in the Dirac representation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMatrices {
    pub alpha: [Matrix4; 3],
    pub beta: Matrix4,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl DiracMatrices {
    pub fn dirac() -> Self {
        let pauli: [[[Complex64; 2]; 2]; 3] = [
            [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
            [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        ];
        let alpha = pauli.map(|s| {
            let mut a = [[c(0., 0.); 4]; 4];
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j + 2] = s[i][j];
                    a[i + 2][j] = s[i][j];
                }
            }
            a
        });
        let mut beta = [[c(0., 0.); 4]; 4];
        for (i, row) in beta.iter_mut().enumerate() {
            row[i] = if i < 2 { c(1., 0.) } else { c(-1., 0.) };
        }
        DiracMatrices { alpha, beta }
    }

    pub fn identity() -> Matrix4 {
        let mut id = [[c(0., 0.); 4]; 4];
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = c(1., 0.);
        }
        id
    }

    pub fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
    }

    pub fn anticommutator(a: &Matrix4, b: &Matrix4) -> Matrix4 {
        let ab = Self::matmul(a, b);
        let ba = Self::matmul(b, a);
        std::array::from_fn(|i| std::array::from_fn(|j| ab[i][j] + ba[i][j]))
    }

    pub fn apply(m: &Matrix4, v: &Bispinor) -> Bispinor {
        Bispinor(std::array::from_fn(|i| (0..4).map(|k| m[i][k] * v.0[k]).sum()))
    }

    /// `α·p + βm` as a dense matrix.
    pub fn hamiltonian(&self, p: ThreeMomentum, m: f64) -> Matrix4 {
        let p = p.to_array();
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                self.beta[i][j] * m
                    + self.alpha[0][i][j] * p[0]
                    + self.alpha[1][i][j] * p[1]
                    + self.alpha[2][i][j] * p[2]
            })
        })
    }
}

/// Positive-energy, spin-up bispinor normalized to `u†βu = 2m`.
pub fn bispinor_u(p: ThreeMomentum, m: f64) -> Result<Bispinor> {
    let e = on_shell_energy(p, m)?.value();
    Ok(bispinor_u_with_energy(p, e, m))
}

/// Same as [`bispinor_u`] with the energy supplied by the caller.
pub(crate) fn bispinor_u_with_energy(p: ThreeMomentum, e: f64, m: f64) -> Bispinor {
    let s = (e + m).sqrt();
    Bispinor([
        c(s, 0.0),
        c(0.0, 0.0),
        c(p.p3 / s, 0.0),
        c(p.p1 / s, p.p2 / s),
    ])
}

/// `(α·p + βm) ψ` in the momentum representation.
pub fn apply_hamiltonian(psi: &Bispinor, p: ThreeMomentum, m: f64) -> Bispinor {
    let [u0, u1, l0, l1] = psi.0;
    let plus = c(p.p1, p.p2);
    let minus = c(p.p1, -p.p2);
    // σ·p = [[p3, p1 - i p2], [p1 + i p2, -p3]]
    let sp = |a: Complex64, b: Complex64| (a * p.p3 + minus * b, plus * a - b * p.p3);
    let (sl0, sl1) = sp(l0, l1);
    let (su0, su1) = sp(u0, u1);
    Bispinor([u0 * m + sl0, u1 * m + sl1, su0 - l0 * m, su1 - l1 * m])
}

/// Phase velocity `E_p p / p^2`.
pub fn phase_velocity(p: ThreeMomentum, m: f64) -> Result<[f64; 3]> {
    let e = on_shell_energy(p, m)?.value();
    let p2 = p.norm_sq();
    if p2 == 0.0 {
        return Err(Error::UndefinedPhaseVelocity);
    }
    Ok(p.to_array().map(|x| e * x / p2))
}

/// One quadrature node of a momentum-space probability distribution:
/// `weight` already carries `w_i |f_i|^2`.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumSample {
    pub momentum: ThreeMomentum,
    pub weight: f64,
}

/// Tolerance on the total weight of a spectrum handed to [`velocity_expectation`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// `<v> = <p / E_p>` over a normalized sampled spectrum.
pub fn velocity_expectation(spectrum: &[SpectrumSample], m: f64) -> Result<[f64; 3]> {
    check_mass(m)?;
    let sum: f64 = spectrum.iter().map(|s| s.weight).sum();
    if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::Normalization {
            sum,
            deficit: 1.0 - sum,
        });
    }
    let mut v = [0.0; 3];
    for s in spectrum {
        let e = on_shell_energy(s.momentum, m)?.value();
        for (acc, p) in v.iter_mut().zip(s.momentum.to_array()) {
            *acc += s.weight * p / e;
        }
    }
    Ok(v)
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn energies() {
        assert_eq!(on_shell_energy(ThreeMomentum::default(), 1.0).unwrap().value(), 1.0);
        let e = on_shell_energy(ThreeMomentum::new(0., 0., 2.), 1.0).unwrap().value();
        assert!(close(e, 2.236_067_977_499_79, 1e-14));
        let e = on_shell_energy(ThreeMomentum::new(3., 0., 4.), 0.5).unwrap().value();
        assert!(close(e, 25.25f64.sqrt(), 1e-14));
        assert!(close(e, 5.024_937_810_560_445, 1e-12));
        assert!(matches!(
            on_shell_energy(ThreeMomentum::default(), 0.0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(on_shell_energy(ThreeMomentum::default(), -1.0).is_err());
    }

    #[test]
    fn rest_frame_and_boosted_spinors() {
        let u = bispinor_u(ThreeMomentum::default(), 1.0).unwrap();
        assert!(u.max_abs_diff(&Bispinor::from_real([2f64.sqrt(), 0., 0., 0.])) < 1e-15);

        let u = bispinor_u(ThreeMomentum::new(0., 0., 2.), 1.0).unwrap();
        let expect = Bispinor::from_real([1.798_907_4, 0., 1.111_786_0, 0.]);
        assert!(u.max_abs_diff(&expect) < 1e-7);

        let u = bispinor_u(ThreeMomentum::new(1., 1., 0.), 1.0).unwrap();
        let s = (3f64.sqrt() + 1.0).sqrt();
        assert_eq!(u[2], c(0., 0.));
        assert!((u[3] - c(1. / s, 1. / s)).norm() < 1e-15);
    }

    #[test]
    fn hamiltonian_on_basis_vectors() {
        let p0 = ThreeMomentum::default();
        let out = apply_hamiltonian(&Bispinor::from_real([1., 0., 0., 0.]), p0, 1.0);
        assert_eq!(out, Bispinor::from_real([1., 0., 0., 0.]));
        let out = apply_hamiltonian(&Bispinor::from_real([0., 0., 1., 0.]), p0, 1.0);
        assert_eq!(out, Bispinor::from_real([0., 0., -1., 0.]));
    }

    #[test]
    fn block_formula_matches_dense_matrices() {
        let d = DiracMatrices::dirac();
        let p = ThreeMomentum::new(0.3, -1.2, 0.7);
        let psi = Bispinor([c(0.1, 0.2), c(-0.5, 0.3), c(1.0, -1.0), c(0.25, 0.0)]);
        let dense = DiracMatrices::apply(&d.hamiltonian(p, 1.3), &psi);
        assert!(dense.max_abs_diff(&apply_hamiltonian(&psi, p, 1.3)) < 1e-14);
    }

    #[test]
    fn clifford_relations_are_exact() {
        let d = DiracMatrices::dirac();
        let id = DiracMatrices::identity();
        let zero = [[c(0., 0.); 4]; 4];
        let twice = |m: Matrix4| m.map(|r| r.map(|x| x * 2.0));
        for j in 0..3 {
            for k in 0..3 {
                let ac = DiracMatrices::anticommutator(&d.alpha[j], &d.alpha[k]);
                assert_eq!(ac, if j == k { twice(id) } else { zero });
            }
            assert_eq!(DiracMatrices::anticommutator(&d.alpha[j], &d.beta), zero);
        }
        assert_eq!(DiracMatrices::matmul(&d.beta, &d.beta), id);
    }

    #[test]
    fn phase_velocities() {
        let v = phase_velocity(ThreeMomentum::new(0., 0., 2.), 1.0).unwrap();
        assert!(close(v[2], 1.118_034_0, 1e-7));
        let v = phase_velocity(ThreeMomentum::new(0., 0., 1000.), 1.0).unwrap();
        assert!(close(norm3(v), 1.000_000_5, 1e-9));
        assert!(matches!(
            phase_velocity(ThreeMomentum::default(), 1.0),
            Err(Error::UndefinedPhaseVelocity)
        ));
    }

    #[test]
    fn expectation_examples() {
        let one = [SpectrumSample {
            momentum: ThreeMomentum::new(0., 0., 2.),
            weight: 1.0,
        }];
        let v = velocity_expectation(&one, 1.0).unwrap();
        assert!(close(v[2], 0.894_427_2, 1e-7));

        let sym = [
            SpectrumSample {
                momentum: ThreeMomentum::new(0.2, -0.1, 1.5),
                weight: 0.5,
            },
            SpectrumSample {
                momentum: ThreeMomentum::new(-0.2, 0.1, -1.5),
                weight: 0.5,
            },
        ];
        assert_eq!(velocity_expectation(&sym, 1.0).unwrap(), [0.0, 0.0, 0.0]);

        let short = [SpectrumSample {
            momentum: ThreeMomentum::default(),
            weight: 0.9,
        }];
        match velocity_expectation(&short, 1.0) {
            Err(Error::Normalization { deficit, .. }) => assert!(close(deficit, 0.1, 1e-15)),
            other => panic!("expected normalization error, got {other:?}"),
        }
    }
}
