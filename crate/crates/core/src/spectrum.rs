//! Spectral description of a packet: Laguerre-Gaussian transverse modes, the
//! longitudinal envelope spectrum over the carrier momentum, and the discrete
//! node sets that every evaluator and diagnostic consumes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::correlation::{pc_exact, CarrierParameters, CorrelationCurve, GroupVelocity};
use crate::error::{Error, Result};
use crate::kinematics::{check_mass, SpectrumSample, ThreeMomentum};
use crate::special::{laguerre, super_gaussian, GaussHermite};

/// Envelope-spectrum samples below this fraction of the peak are dropped.
pub const ENVELOPE_TRUNCATION: f64 = 1e-8;

/// The node-set envelope window spans `±ENVELOPE_WINDOW_FACTOR · Δζ` in ζ.
pub const ENVELOPE_WINDOW_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub n: u32,
    pub ell: i32,
    pub weight: Complex64,
}

impl ModeSpec {
    pub fn new(n: u32, ell: i32, weight: Complex64) -> Self {
        ModeSpec { n, ell, weight }
    }

    pub fn fundamental() -> Self {
        ModeSpec::new(0, 0, Complex64::new(1.0, 0.0))
    }
}

/// Physical parameters of one packet. Momenta in units of `m`, lengths in `1/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketSpec {
    pub m: f64,
    pub v_a: f64,
    pub p_bar: f64,
    pub w: f64,
    pub delta_zeta: f64,
    pub envelope_exponent: u32,
    pub modes: Vec<ModeSpec>,
}

impl WavepacketSpec {
    /// Superluminal reference packet: `v_a = 2`, `P = 2m`, `w = 0.1m`, `Δζ = 1400/m`, k = 8.
    pub fn reference() -> Self {
        WavepacketSpec {
            m: 1.0,
            v_a: 2.0,
            p_bar: 2.0,
            w: 0.1,
            delta_zeta: 1400.0,
            envelope_exponent: 8,
            modes: vec![ModeSpec::fundamental()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_mass(self.m)?;
        GroupVelocity::new(self.v_a)?;
        if !self.p_bar.is_finite() {
            return Err(Error::invalid("p_bar", "must be finite"));
        }
        if !(self.w > 0.0 && self.w.is_finite()) {
            return Err(Error::invalid("w", format!("must be positive, got {}", self.w)));
        }
        if !(self.delta_zeta > 0.0 && self.delta_zeta.is_finite()) {
            return Err(Error::invalid(
                "delta_zeta",
                format!("must be positive, got {}", self.delta_zeta),
            ));
        }
        if self.envelope_exponent < 2 || !self.envelope_exponent.is_multiple_of(2) {
            return Err(Error::invalid(
                "envelope_exponent",
                format!("must be even and >= 2, got {}", self.envelope_exponent),
            ));
        }
        if self.modes.is_empty() {
            return Err(Error::invalid("modes", "at least one mode is required"));
        }
        Ok(())
    }

    pub fn group(&self) -> Result<GroupVelocity> {
        GroupVelocity::new(self.v_a)
    }

    pub fn carrier(&self) -> Result<CarrierParameters> {
        CarrierParameters::new(self.p_bar, &self.group()?, self.m)
    }

    pub fn curve_at(&self, p: f64) -> Result<CorrelationCurve> {
        CorrelationCurve::new(p, self.group()?, self.m)
    }

    /// Weighted sum of the transverse modes at `(p1, p2)`.
    pub fn transverse_amplitude(&self, p1: f64, p2: f64) -> Complex64 {
        self.modes
            .iter()
            .map(|md| md.weight * lg_mode_amplitude(p1, p2, self.w, md))
            .sum()
    }
}

/// Unit-weight Laguerre-Gaussian basis function in momentum space.
pub fn lg_mode_amplitude(p1: f64, p2: f64, w: f64, mode: &ModeSpec) -> Complex64 {
    let a = mode.ell.unsigned_abs();
    let rho_sq = (p1 * p1 + p2 * p2) / (w * w);
    let radial = rho_sq.sqrt().powi(a as i32)
        * laguerre(mode.n, f64::from(a), rho_sq)
        * (-0.5 * rho_sq).exp();
    if mode.ell == 0 {
        Complex64::new(radial, 0.0)
    } else {
        Complex64::from_polar(radial, f64::from(mode.ell) * p2.atan2(p1))
    }
}

/// Longitudinal envelope spectrum `Ã(ΔP)` on a uniform grid.
///
/// Built so that `∫ Ã(ΔP) e^{-iζΔP} dΔP = exp[-(ζ/Δζ)^k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpectrum {
    pub delta_p: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub spacing: f64,
    pub zeta_half_window: f64,
    pub delta_zeta: f64,
    pub exponent: u32,
}

fn alternate(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn build_envelope_spectrum(
    spec: &WavepacketSpec,
    n_samples: usize,
    delta_p_halfwidth: f64,
) -> Result<EnvelopeSpectrum> {
    spec.validate()?;
    if n_samples < 256 || !n_samples.is_power_of_two() {
        return Err(Error::invalid(
            "n_samples",
            format!("must be a power of two >= 256, got {n_samples}"),
        ));
    }
    if !(delta_p_halfwidth * spec.delta_zeta >= 40.0) {
        return Err(Error::invalid(
            "deltaP_halfwidth",
            format!(
                "must cover at least 40/Δζ = {}, got {delta_p_halfwidth}",
                40.0 / spec.delta_zeta
            ),
        ));
    }
    let n = n_samples;
    let dp = 2.0 * delta_p_halfwidth / n as f64;
    let half_window = PI / dp;
    let dz = 2.0 * half_window / n as f64;
    let k = spec.envelope_exponent;
    if half_window < ENVELOPE_WINDOW_FACTOR * spec.delta_zeta {
        return Err(Error::Aliasing {
            what: format!(
                "ζ window half-width {half_window} is below {ENVELOPE_WINDOW_FACTOR}Δζ"
            ),
            spillover: super_gaussian(half_window, spec.delta_zeta, k),
        });
    }

    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let z = (j as f64 - (n / 2) as f64) * dz;
            Complex64::new(alternate(j) * super_gaussian(z, spec.delta_zeta, k), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let norm = dz / (2.0 * PI);
    let amplitudes = buf
        .iter()
        .enumerate()
        .map(|(j, c)| c * (alternate(j) * norm))
        .collect();
    let delta_p = (0..n).map(|j| (j as f64 - (n / 2) as f64) * dp).collect();
    Ok(EnvelopeSpectrum {
        delta_p,
        amplitudes,
        spacing: dp,
        zeta_half_window: half_window,
        delta_zeta: spec.delta_zeta,
        exponent: k,
    })
}

impl EnvelopeSpectrum {
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn zeta_samples(&self) -> Vec<f64> {
        let n = self.len();
        let dz = 2.0 * self.zeta_half_window / n as f64;
        (0..n).map(|k| (k as f64 - (n / 2) as f64) * dz).collect()
    }

    /// Discrete inverse transform back onto [`Self::zeta_samples`].
    pub fn inverse_on_grid(&self) -> Vec<Complex64> {
        let n = self.len();
        let mut buf: Vec<Complex64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| a * alternate(j))
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        buf.iter()
            .enumerate()
            .map(|(k, c)| c * (alternate(k) * self.spacing))
            .collect()
    }

    /// `Σ_j ΔP Ã_j e^{-iζΔP_j}` at arbitrary ζ.
    pub fn profile(&self, zeta: f64) -> Complex64 {
        self.delta_p
            .iter()
            .zip(&self.amplitudes)
            .map(|(dp, a)| a * Complex64::from_polar(1.0, -zeta * dp))
            .sum::<Complex64>()
            * self.spacing
    }

    pub fn peak_index(&self) -> usize {
        self.amplitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Full width at half maximum of `|Ã|`, linearly interpolated.
    pub fn fwhm(&self) -> f64 {
        let c = self.peak_index();
        let mags: Vec<f64> = self.amplitudes.iter().map(|a| a.norm()).collect();
        let half = 0.5 * mags[c];
        let crossing = |dir: isize| -> f64 {
            let mut i = c as isize;
            loop {
                let next = i + dir;
                if next < 0 || next as usize >= mags.len() {
                    return self.delta_p[i as usize];
                }
                let (a, b) = (mags[i as usize], mags[next as usize]);
                if b <= half {
                    let t = (a - half) / (a - b);
                    let (x0, x1) = (self.delta_p[i as usize], self.delta_p[next as usize]);
                    return x0 + t * (x1 - x0);
                }
                i = next;
            }
        };
        crossing(1) - crossing(-1)
    }

    /// `|Ã|` at the edge of the stored band relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.amplitudes[self.peak_index()].norm();
        let first = self.amplitudes[0].norm();
        let last = self.amplitudes[self.len() - 1].norm();
        first.max(last) / peak
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransverseRule {
    /// Gauss-Hermite nodes matched to the `exp(-ρ²/2)` mode envelope.
    GaussHermite,
    /// Uniform midpoint rule over `±TRAPEZOID_EXTENT · w`.
    Trapezoid,
}

pub const TRAPEZOID_EXTENT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNode {
    pub p1: f64,
    pub p2: f64,
    /// Carrier momentum `P` labelling the constraint curve.
    pub big_p: f64,
    /// Measure weight in `d³p`, i.e. quadrature weight times `|∂p_c/∂P|`.
    pub weight: f64,
    pub pc: f64,
    pub energy: f64,
    /// Momentum-space amplitude `f(p)` at the node.
    pub amplitude: Complex64,
}

impl SpectralNode {
    pub fn momentum(&self) -> ThreeMomentum {
        ThreeMomentum::new(self.p1, self.p2, self.pc)
    }

    pub fn probability(&self) -> f64 {
        self.weight * self.amplitude.norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSetMeta {
    pub n_perp: usize,
    pub n_p: usize,
    pub rule: TransverseRule,
    pub p_bounds: (f64, f64),
    pub pperp_bound: f64,
    /// Fraction of `∫|f|²` lost to out-of-support nodes.
    pub discarded_fraction: f64,
    /// Fraction of `∫|Ã|²` outside the retained carrier band.
    pub truncated_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralNodeSet {
    pub spec: WavepacketSpec,
    pub nodes: Vec<SpectralNode>,
    pub meta: NodeSetMeta,
}

impl SpectralNodeSet {
    /// Degenerate one-node set: a single plane wave at `(0, 0, P)`.
    pub fn plane_wave(spec: &WavepacketSpec) -> Result<Self> {
        spec.validate()?;
        let curve = spec.curve_at(spec.p_bar)?;
        let energy = curve.energy(spec.p_bar);
        Ok(SpectralNodeSet {
            spec: spec.clone(),
            nodes: vec![SpectralNode {
                p1: 0.0,
                p2: 0.0,
                big_p: spec.p_bar,
                weight: 1.0,
                pc: spec.p_bar,
                energy,
                amplitude: Complex64::new(1.0, 0.0),
            }],
            meta: NodeSetMeta {
                n_perp: 1,
                n_p: 1,
                rule: TransverseRule::GaussHermite,
                p_bounds: (spec.p_bar, spec.p_bar),
                pperp_bound: 0.0,
                discarded_fraction: 0.0,
                truncated_fraction: 0.0,
            },
        })
    }

    pub fn total_probability(&self) -> f64 {
        neumaier_sum(self.nodes.iter().map(SpectralNode::probability))
    }

    pub fn spectrum_samples(&self) -> Vec<SpectrumSample> {
        self.nodes
            .iter()
            .map(|n| SpectrumSample {
                momentum: n.momentum(),
                weight: n.probability(),
            })
            .collect()
    }
}

/// Compensated sum.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn build_node_set(spec: &WavepacketSpec, n_perp: usize, n_p: usize) -> Result<SpectralNodeSet> {
    build_node_set_with(spec, n_perp, n_p, TransverseRule::GaussHermite)
}

pub fn build_node_set_with(
    spec: &WavepacketSpec,
    n_perp: usize,
    n_p: usize,
    rule: TransverseRule,
) -> Result<SpectralNodeSet> {
    spec.validate()?;
    if n_perp < 8 || n_p < 8 {
        return Err(Error::invalid(
            "node counts",
            format!("need at least 8 transverse and 8 longitudinal nodes, got {n_perp} and {n_p}"),
        ));
    }

    let (perp_nodes, perp_weights) = transverse_rule(rule, n_perp, spec.w);

    // Envelope band: window ±3Δζ, central n_p samples, tiny tails dropped.
    let n_fft = (2 * n_p).next_power_of_two().max(256);
    let halfwidth = n_fft as f64 * PI / (2.0 * ENVELOPE_WINDOW_FACTOR * spec.delta_zeta);
    let env = build_envelope_spectrum(spec, n_fft, halfwidth)?;
    let peak = env.amplitudes[env.peak_index()].norm();
    let start = n_fft / 2 - n_p / 2;
    let total_env = neumaier_sum(env.amplitudes.iter().map(|a| a.norm_sqr()));
    let mut kept_env = 0.0;
    let mut slices = Vec::new();
    for j in start..start + n_p {
        let a = env.amplitudes[j];
        if a.norm() < ENVELOPE_TRUNCATION * peak {
            continue;
        }
        kept_env += a.norm_sqr();
        let big_p = spec.p_bar + env.delta_p[j];
        slices.push((spec.curve_at(big_p)?, a));
    }
    let truncated_fraction = ((total_env - kept_env) / total_env).max(0.0);
    if slices.is_empty() {
        return Err(Error::DegenerateSpectrum("empty carrier band".into()));
    }

    let m = spec.m;
    let dp = env.spacing;
    let mut nodes = Vec::with_capacity(slices.len() * n_perp * n_perp);
    let mut kept = 0.0;
    let mut discarded = 0.0;
    for (curve, env_amp) in &slices {
        for (i, &p1) in perp_nodes.iter().enumerate() {
            for (j, &p2) in perp_nodes.iter().enumerate() {
                let qw = perp_weights[i] * perp_weights[j] * dp;
                let transverse = spec.transverse_amplitude(p1, p2);
                let pperp_sq = p1 * p1 + p2 * p2;
                let pc = match pc_exact(pperp_sq, curve) {
                    Ok(pc) => pc,
                    Err(Error::OutOfSupport { .. }) => {
                        discarded += qw * (transverse * env_amp).norm_sqr();
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let energy = curve.energy(pc);
                let jac = curve.jacobian(pc, energy).abs();
                if !(jac.is_finite() && jac > 0.0) {
                    discarded += qw * (transverse * env_amp).norm_sqr();
                    continue;
                }
                // Ñ = g sqrt((E + m) / 2E), with Ñ the mode expansion.
                let prefactor = ((energy + m) / (2.0 * energy)).sqrt();
                let g = transverse * env_amp / prefactor;
                let node = SpectralNode {
                    p1,
                    p2,
                    big_p: curve.carrier.p,
                    weight: qw * jac,
                    pc,
                    energy,
                    amplitude: g / jac,
                };
                kept += node.probability();
                nodes.push(node);
            }
        }
    }
    if nodes.is_empty() || !(kept > 0.0) {
        return Err(Error::DegenerateSpectrum(
            "no in-support node carries weight".into(),
        ));
    }
    let p_lo = slices.first().map(|s| s.0.carrier.p).unwrap_or(spec.p_bar);
    let p_hi = slices.last().map(|s| s.0.carrier.p).unwrap_or(spec.p_bar);
    let pperp_bound = perp_nodes.iter().fold(0.0_f64, |a, p| a.max(p.abs()));
    Ok(SpectralNodeSet {
        spec: spec.clone(),
        nodes,
        meta: NodeSetMeta {
            n_perp,
            n_p,
            rule,
            p_bounds: (p_lo, p_hi),
            pperp_bound,
            discarded_fraction: discarded / (kept + discarded),
            truncated_fraction,
        },
    })
}

fn transverse_rule(rule: TransverseRule, n: usize, w: f64) -> (Vec<f64>, Vec<f64>) {
    match rule {
        TransverseRule::GaussHermite => {
            let gh = GaussHermite::new(n);
            let s = std::f64::consts::SQRT_2 * w;
            let nodes = gh.nodes.iter().map(|t| s * t).collect();
            let weights = gh
                .nodes
                .iter()
                .zip(&gh.weights)
                .map(|(t, wt)| s * wt * (t * t).exp())
                .collect();
            (nodes, weights)
        }
        TransverseRule::Trapezoid => {
            let h = 2.0 * TRAPEZOID_EXTENT * w / n as f64;
            let nodes = (0..n)
                .map(|i| -TRAPEZOID_EXTENT * w + (i as f64 + 0.5) * h)
                .collect();
            (nodes, vec![h; n])
        }
    }
}

/// Rescales amplitudes so that `Σ w |f|² = 1`.
pub fn normalize(set: &SpectralNodeSet) -> Result<SpectralNodeSet> {
    let total = set.total_probability();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DegenerateSpectrum(format!(
            "total weight {total} cannot be normalized"
        )));
    }
    let s = 1.0 / total.sqrt();
    let mut out = set.clone();
    for n in &mut out.nodes {
        n.amplitude *= s;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn lg_examples() {
        let w = 0.1;
        let m00 = ModeSpec::fundamental();
        assert_eq!(lg_mode_amplitude(0.0, 0.0, w, &m00), c1());
        let a = lg_mode_amplitude(w, 0.0, w, &m00);
        assert!((a.re - 0.606_530_7).abs() < 1e-7);
        let m10 = ModeSpec::new(1, 0, c1());
        let a = lg_mode_amplitude(w, w, w, &m10);
        assert!((a.re + 0.367_879_4).abs() < 1e-7);
        let m01 = ModeSpec::new(0, 1, c1());
        let a = lg_mode_amplitude(0.0, w, w, &m01);
        let expect = Complex64::new(0.0, (-0.5f64).exp());
        assert!((a - expect).norm() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let mut s = WavepacketSpec::reference();
        s.validate().unwrap();
        s.v_a = 1.0;
        assert!(matches!(s.validate(), Err(Error::Luminal)));
        let mut s = WavepacketSpec::reference();
        s.w = 0.0;
        assert!(s.validate().is_err());
        let mut s = WavepacketSpec::reference();
        s.envelope_exponent = 7;
        assert!(s.validate().is_err());
        let mut s = WavepacketSpec::reference();
        s.modes.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn envelope_symmetry_and_peak() {
        let spec = WavepacketSpec::reference();
        let env = build_envelope_spectrum(&spec, 512, 512.0 * PI / (2.0 * 4200.0)).unwrap();
        let n = env.len();
        assert_eq!(env.peak_index(), n / 2);
        for j in 1..n / 2 {
            let (a, b) = (env.amplitudes[n / 2 + j], env.amplitudes[n / 2 - j]);
            assert!((a - b).norm() < 1e-10 * env.amplitudes[n / 2].norm());
            assert!(a.im.abs() < 1e-10 * env.amplitudes[n / 2].norm());
        }
    }

    #[test]
    fn envelope_preconditions() {
        let spec = WavepacketSpec::reference();
        assert!(build_envelope_spectrum(&spec, 200, 0.1).is_err());
        assert!(build_envelope_spectrum(&spec, 256, 0.01).is_err());
        // halfwidth so large that the ζ window shrinks below 3Δζ
        match build_envelope_spectrum(&spec, 256, 1.0) {
            Err(Error::Aliasing { spillover, .. }) => assert!(spillover > 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plane_wave_collapse() {
        let set = SpectralNodeSet::plane_wave(&WavepacketSpec::reference()).unwrap();
        assert_eq!(set.nodes.len(), 1);
        assert_eq!(set.nodes[0].momentum(), ThreeMomentum::new(0.0, 0.0, 2.0));
        assert!((set.nodes[0].energy - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn node_counts_checked() {
        assert!(build_node_set(&WavepacketSpec::reference(), 4, 16).is_err());
    }

    #[test]
    fn normalize_idempotent_and_projective() {
        let spec = WavepacketSpec::reference();
        let set = build_node_set(&spec, 12, 32).unwrap();
        let once = normalize(&set).unwrap();
        assert!((once.total_probability() - 1.0).abs() < 1e-12);
        let twice = normalize(&once).unwrap();
        for (a, b) in once.nodes.iter().zip(&twice.nodes) {
            assert!((a.amplitude - b.amplitude).norm() <= 1e-12 * a.amplitude.norm().max(1e-300));
        }
        let mut scaled = set.clone();
        for n in &mut scaled.nodes {
            n.amplitude *= 3.0;
        }
        let s = normalize(&scaled).unwrap();
        for (a, b) in once.nodes.iter().zip(&s.nodes) {
            assert!((a.amplitude - b.amplitude).norm() <= 1e-12 * a.amplitude.norm().max(1e-300));
        }
    }

    #[test]
    fn zero_spectrum_rejected() {
        let mut set = build_node_set(&WavepacketSpec::reference(), 8, 8).unwrap();
        for n in &mut set.nodes {
            n.amplitude = Complex64::new(0.0, 0.0);
        }
        assert!(matches!(normalize(&set), Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn subluminal_support_discards_outer_nodes() {
        // support radius ~4w, inside the outer Gauss-Hermite nodes
        let mut spec = WavepacketSpec::reference();
        spec.v_a = 0.95;
        let set = build_node_set(&spec, 16, 16).unwrap();
        assert!(set.meta.discarded_fraction > 0.0);
        assert!(set.meta.discarded_fraction < 1e-3);
        let narrow = WavepacketSpec { v_a: 0.9, ..spec };
        assert!(matches!(build_node_set(&narrow, 16, 16), Err(Error::DegenerateSpectrum(_))));
    }
}
