//! Measurements on evaluated grids and node sets.

use crate::error::{Error, Result};
use crate::evaluate::grid::{Axis, FieldGrid};
use crate::kinematics::{velocity_expectation, NORMALIZATION_TOLERANCE};
use crate::spectrum::{neumaier_sum, SpectralNodeSet};

/// Relative edge density above which [`density_norm`] warns about leakage.
pub const EDGE_LEAKAGE_TOLERANCE: f64 = 1e-6;
/// Minimum number of time samples for a trajectory fit.
pub const MIN_TRAJECTORY_SAMPLES: usize = 5;

/// `Σ ψ†ψ ΔV` over the sampled spatial axes of a fixed-time grid.
///
/// Singleton axes contribute no cell width, so a 2-D slice yields the
/// slice integral.
pub fn density_norm(grid: &FieldGrid) -> Result<f64> {
    grid.time()?;
    let mut cell = 1.0;
    for a in [Axis::X1, Axis::X2, Axis::X3] {
        if let Some(h) = grid.spacing(a)? {
            cell *= h;
        }
    }
    let edge = edge_fraction(grid);
    if edge > EDGE_LEAKAGE_TOLERANCE {
        log::warn!("edge density is {edge:.3e} of peak; the norm misses the packet tails");
    }
    Ok(neumaier_sum(grid.density.iter().copied()) * cell)
}

fn edge_fraction(grid: &FieldGrid) -> f64 {
    let peak = grid.peak_density();
    if peak <= 0.0 {
        return 0.0;
    }
    let s = grid.shape();
    let mut edge: f64 = 0.0;
    for (idx, d) in grid.density.iter().enumerate() {
        let i3 = idx % s[3];
        let i2 = (idx / s[3]) % s[2];
        let i1 = (idx / (s[3] * s[2])) % s[1];
        let on = |i: usize, n: usize| n > 1 && (i == 0 || i == n - 1);
        if on(i1, s[1]) || on(i2, s[2]) || on(i3, s[3]) {
            edge = edge.max(*d);
        }
    }
    edge / peak
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakTrajectory {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub fitted_velocity: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the positions from the fitted line.
    pub fit_residual: f64,
}

/// Interpolated position of the density maximum on `x1 = x2 = 0`.
pub fn peak_position(grid: &FieldGrid) -> Result<f64> {
    let (x3, dens) = grid.on_axis_density()?;
    let t = grid.time()?;
    let (lo, hi) = dens
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if !(hi > 0.0) || (hi - lo) / hi < 1e-6 {
        return Err(Error::Tracking(format!("no localized peak at x0 = {t}")));
    }
    let i = dens
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if i == 0 || i + 1 == dens.len() {
        return Err(Error::Tracking(format!(
            "peak at the grid boundary x3 = {} at x0 = {t}",
            x3[i]
        )));
    }
    let (ym, y0, yp) = (dens[i - 1], dens[i], dens[i + 1]);
    let curv = ym - 2.0 * y0 + yp;
    let delta = if curv < 0.0 { 0.5 * (ym - yp) / curv } else { 0.0 };
    let h = if delta >= 0.0 { x3[i + 1] - x3[i] } else { x3[i] - x3[i - 1] };
    Ok(x3[i] + delta * h)
}

/// Least-squares peak velocity over fixed-time grids.
pub fn fit_peak_velocity(grids: &[FieldGrid]) -> Result<PeakTrajectory> {
    if grids.len() < MIN_TRAJECTORY_SAMPLES {
        return Err(Error::Tracking(format!(
            "{} time samples, need at least {MIN_TRAJECTORY_SAMPLES}",
            grids.len()
        )));
    }
    let times = grids.iter().map(FieldGrid::time).collect::<Result<Vec<_>>>()?;
    let positions = grids.iter().map(peak_position).collect::<Result<Vec<_>>>()?;
    let (slope, intercept, residual) = line_fit(&times, &positions)?;
    Ok(PeakTrajectory {
        times,
        positions,
        fitted_velocity: slope,
        intercept,
        fit_residual: residual,
    })
}

fn line_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Tracking("all samples share one time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    Ok((slope, intercept, (ss / n).sqrt()))
}

/// Restriction of the comparison to `|v_n x0 - x3| ≤ half_width` on the reference grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaWindow {
    pub v_n: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSimilarity {
    pub reference_time: f64,
    pub compare_time: f64,
    /// Pearson correlation of the aligned on-axis densities.
    pub correlation: f64,
    pub shift_used: f64,
    pub samples: usize,
}

/// Correlation of on-axis density profiles after moving `b` back by `v (t_b - t_a)`.
pub fn profile_similarity(a: &FieldGrid, b: &FieldGrid, v: f64) -> Result<ProfileSimilarity> {
    profile_similarity_windowed(a, b, v, None)
}

pub fn profile_similarity_windowed(
    a: &FieldGrid,
    b: &FieldGrid,
    v: f64,
    window: Option<ZetaWindow>,
) -> Result<ProfileSimilarity> {
    let (ta, tb) = (a.time()?, b.time()?);
    let (xa, da) = a.on_axis_density()?;
    let (xb, db) = b.on_axis_density()?;
    let shift = v * (tb - ta);
    let (bmin, bmax) = (xb[0], xb[xb.len() - 1]);
    let mut pairs = Vec::with_capacity(xa.len());
    for (&x, &d) in xa.iter().zip(&da) {
        if let Some(w) = window {
            if (w.v_n * ta - x).abs() > w.half_width {
                continue;
            }
        }
        let y = x + shift;
        if y < bmin || y > bmax {
            continue;
        }
        pairs.push((d, interpolate(&xb, &db, y)));
    }
    if pairs.len() < 3 {
        return Err(Error::GridMismatch(format!(
            "shift {shift} leaves {} overlapping samples",
            pairs.len()
        )));
    }
    Ok(ProfileSimilarity {
        reference_time: ta,
        compare_time: tb,
        correlation: pearson(&pairs),
        shift_used: shift,
        samples: pairs.len(),
    })
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let i = x.partition_point(|&v| v <= at).clamp(1, x.len() - 1);
    let (x0, x1) = (x[i - 1], x[i]);
    let s = if x1 > x0 { (at - x0) / (x1 - x0) } else { 0.0 };
    y[i - 1] + s * (y[i] - y[i - 1])
}

fn pearson(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let ma = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mb = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for &(a, b) in pairs {
        sab += (a - ma) * (b - mb);
        saa += (a - ma) * (a - ma);
        sbb += (b - mb) * (b - mb);
    }
    if saa == 0.0 && sbb == 0.0 {
        return 1.0;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

/// `‖a - reference‖₂ / ‖reference‖₂` over all grid samples.
pub fn relative_l2(a: &FieldGrid, reference: &FieldGrid) -> Result<f64> {
    if !a.same_axes(reference) {
        return Err(Error::GridMismatch("grids are sampled on different axes".into()));
    }
    let num = neumaier_sum(a.values.iter().zip(&reference.values).map(|(x, y)| (*x - *y).density()));
    let den = neumaier_sum(reference.density.iter().copied());
    if !(den > 0.0) {
        return Err(Error::GridMismatch("reference grid is identically zero".into()));
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationReport {
    pub velocity: [f64; 3],
    pub momentum: [f64; 3],
    pub energy: f64,
}

/// Momentum-space expectation values of a normalized node set.
pub fn expectation_report(nodes: &SpectralNodeSet) -> Result<ExpectationReport> {
    let samples = nodes.spectrum_samples();
    let velocity = velocity_expectation(&samples, nodes.spec.m)?;
    let total = nodes.total_probability();
    if !((total - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
        return Err(Error::Normalization {
            sum: total,
            deficit: 1.0 - total,
        });
    }
    let momentum = std::array::from_fn(|k| {
        neumaier_sum(samples.iter().map(|s| s.weight * s.momentum.to_array()[k]))
    });
    let energy = neumaier_sum(nodes.nodes.iter().map(|n| n.probability() * n.energy));
    Ok(ExpectationReport {
        velocity,
        momentum,
        energy,
    })
}
