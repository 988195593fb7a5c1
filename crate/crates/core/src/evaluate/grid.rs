use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::Bispinor;

/// A space-time point in units of `1/m`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimePoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl SpacetimePoint {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        SpacetimePoint { x0, x1, x2, x3 }
    }

    pub fn r(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn theta(&self) -> f64 {
        self.x2.atan2(self.x1)
    }

    /// Carrier coordinate `β_p x0 - x3`.
    pub fn eta(&self, beta_p: f64) -> f64 {
        beta_p * self.x0 - self.x3
    }

    /// Co-moving envelope coordinate `v_a x0 - x3`.
    pub fn xi(&self, v_a: f64) -> f64 {
        v_a * self.x0 - self.x3
    }

    /// Carrier-frame coordinate `v_n x0 - x3`.
    pub fn zeta(&self, v_n: f64) -> f64 {
        v_n * self.x0 - self.x3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X0 = 0,
    X1 = 1,
    X2 = 2,
    X3 = 3,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::X0, Axis::X1, Axis::X2, Axis::X3];

    pub fn name(self) -> &'static str {
        ["x0", "x1", "x2", "x3"][self as usize]
    }

    pub fn from_name(s: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Uniform axis with `count` samples starting at `start`.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let h = (max - min) / (count - 1) as f64;
            (0..count).map(|i| min + i as f64 * h).collect()
        }
    }
}

/// Periodic axis: `count` samples over `[-half, half)`.
pub fn periodic_axis(half: f64, count: usize) -> Vec<f64> {
    let h = 2.0 * half / count as f64;
    (0..count).map(|i| -half + i as f64 * h).collect()
}

/// Rectilinear sampling over `(x0, x1, x2, x3)`, row-major with `x3` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub axes: [Vec<f64>; 4],
    pub values: Vec<Bispinor>,
    pub density: Vec<f64>,
}

fn check_axes(axes: &[Vec<f64>; 4]) -> Result<()> {
    for (a, ax) in Axis::ALL.iter().zip(axes) {
        if ax.is_empty() {
            return Err(Error::GridMismatch(format!("axis {} is empty", a.name())));
        }
        if ax.iter().any(|x| !x.is_finite()) {
            return Err(Error::GridMismatch(format!("axis {} has non-finite coordinates", a.name())));
        }
        if ax.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch(format!(
                "axis {} is not strictly increasing",
                a.name()
            )));
        }
    }
    Ok(())
}

impl FieldGrid {
    pub fn new(axes: [Vec<f64>; 4], values: Vec<Bispinor>) -> Result<Self> {
        check_axes(&axes)?;
        let n: usize = axes.iter().map(Vec::len).product();
        if values.len() != n {
            return Err(Error::GridMismatch(format!(
                "{} values for {} grid points",
                values.len(),
                n
            )));
        }
        let density = values.iter().map(Bispinor::density).collect();
        Ok(FieldGrid {
            axes,
            values,
            density,
        })
    }

    /// Evaluates `field` at every grid point (parallel over points).
    pub fn fill<F>(axes: [Vec<f64>; 4], field: F) -> Result<Self>
    where
        F: Fn(SpacetimePoint) -> Bispinor + Sync,
    {
        check_axes(&axes)?;
        let shape = axes.each_ref().map(Vec::len);
        let n: usize = shape.iter().product();
        let values: Vec<Bispinor> = (0..n)
            .into_par_iter()
            .map(|idx| field(point_at(&axes, shape, idx)))
            .collect();
        FieldGrid::new(axes, values)
    }

    pub fn shape(&self) -> [usize; 4] {
        self.axes.each_ref().map(Vec::len)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn axis(&self, a: Axis) -> &[f64] {
        &self.axes[a as usize]
    }

    pub fn flat_index(&self, i: [usize; 4]) -> usize {
        let s = self.shape();
        ((i[0] * s[1] + i[1]) * s[2] + i[2]) * s[3] + i[3]
    }

    pub fn point(&self, idx: usize) -> SpacetimePoint {
        point_at(&self.axes, self.shape(), idx)
    }

    /// Uniform spacing of an axis with more than one sample.
    pub fn spacing(&self, a: Axis) -> Result<Option<f64>> {
        let ax = self.axis(a);
        if ax.len() < 2 {
            return Ok(None);
        }
        let h = (ax[ax.len() - 1] - ax[0]) / (ax.len() - 1) as f64;
        let uniform = ax
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        if uniform {
            Ok(Some(h))
        } else {
            Err(Error::GridMismatch(format!("axis {} is not uniform", a.name())))
        }
    }

    /// The single time of a fixed-`x0` grid.
    pub fn time(&self) -> Result<f64> {
        match self.axis(Axis::X0) {
            [t] => Ok(*t),
            ax => Err(Error::GridMismatch(format!(
                "expected a single x0 sample, found {}",
                ax.len()
            ))),
        }
    }

    /// Density along `x3` on the line `x1 = x2 = 0` of a fixed-time grid.
    pub fn on_axis_density(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        self.time()?;
        let i1 = zero_index(self.axis(Axis::X1), Axis::X1)?;
        let i2 = zero_index(self.axis(Axis::X2), Axis::X2)?;
        let x3 = self.axis(Axis::X3).to_vec();
        let dens = (0..x3.len())
            .map(|i3| self.density[self.flat_index([0, i1, i2, i3])])
            .collect();
        Ok((x3, dens))
    }

    pub fn same_axes(&self, other: &FieldGrid) -> bool {
        self.axes == other.axes
    }

    pub fn peak_density(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }

    /// Sub-grid at one `x0` index.
    pub fn time_slice(&self, i0: usize) -> FieldGrid {
        let s = self.shape();
        let block = s[1] * s[2] * s[3];
        let range = i0 * block..(i0 + 1) * block;
        let mut axes = self.axes.clone();
        axes[0] = vec![self.axes[0][i0]];
        FieldGrid {
            axes,
            values: self.values[range.clone()].to_vec(),
            density: self.density[range].to_vec(),
        }
    }
}

fn zero_index(ax: &[f64], a: Axis) -> Result<usize> {
    let (i, x) = ax
        .iter()
        .enumerate()
        .min_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
        .ok_or_else(|| Error::GridMismatch(format!("axis {} is empty", a.name())))?;
    let scale = ax.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    if x.abs() > 1e-9 * scale {
        return Err(Error::GridMismatch(format!(
            "axis {} has no sample at 0 (nearest {x})",
            a.name()
        )));
    }
    Ok(i)
}

fn point_at(axes: &[Vec<f64>; 4], shape: [usize; 4], idx: usize) -> SpacetimePoint {
    let i3 = idx % shape[3];
    let rest = idx / shape[3];
    let i2 = rest % shape[2];
    let rest = rest / shape[2];
    let i1 = rest % shape[1];
    let i0 = rest / shape[1];
    SpacetimePoint::new(axes[0][i0], axes[1][i1], axes[2][i2], axes[3][i3])
}
