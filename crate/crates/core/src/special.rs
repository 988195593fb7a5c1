//! Special functions and quadrature rules used by the spectral construction.

use statrs::function::gamma::gamma;

/// Generalized Laguerre polynomial `L_n^alpha(x)` by three-term recurrence.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// First derivative, `d/dx L_n^a(x) = -L_{n-1}^{a+1}(x)`.
pub fn laguerre_d1(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre(n - 1, alpha + 1.0, x)
    }
}

/// Second derivative, `L_{n-2}^{a+2}(x)`.
pub fn laguerre_d2(n: u32, alpha: f64, x: f64) -> f64 {
    if n < 2 {
        0.0
    } else {
        laguerre(n - 2, alpha + 2.0, x)
    }
}

/// `n! / m!` for `m <= n`, as a float.
pub fn factorial_ratio(n: u32, m: u32) -> f64 {
    ((m + 1)..=n).map(f64::from).product()
}

/// Gauss-Hermite rule for the weight `exp(-t^2)`.
///
/// Nodes come back in ascending order. Weights are computed from the
/// normalized Hermite recurrence so that even the outermost ones keep full
/// relative precision; callers rescale them by `exp(t^2)` to integrate
/// functions that already carry their own Gaussian factor.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Hermite rule needs at least one node");
        const PIM4: f64 = 0.751_125_544_464_942_5;
        const MAX_ITER: usize = 100;
        let nf = n as f64;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..MAX_ITER {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        if n % 2 == 1 {
            x[m - 1] = 0.0;
        }
        x.reverse();
        w.reverse();
        GaussHermite {
            nodes: x,
            weights: w,
        }
    }
}

/// Super-Gaussian profile `exp[-(z/width)^k]`.
pub fn super_gaussian(z: f64, width: f64, exponent: u32) -> f64 {
    (-(z / width).powi(exponent as i32)).exp()
}

/// `∫ exp[-2 (z/width)^k] dz` over the real line.
pub fn super_gaussian_sq_integral(width: f64, exponent: u32) -> f64 {
    let k = f64::from(exponent);
    2.0 * width * gamma(1.0 + 1.0 / k) * 2f64.powf(-1.0 / k)
}
