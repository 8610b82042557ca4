//! Small numerical toolbox shared by the physics modules: error functions,
//! the normal CDF, adaptive Simpson quadrature, piecewise-linear tables,
//! linear least squares, and dense/tridiagonal linear solves.

use crate::error::{Error, Result};

/// Ratio between a Gaussian's full width at half maximum and its standard
/// deviation: 2·sqrt(2·ln 2).
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Error function, double-precision accurate (sub-ulp libm port).
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse error function on (-1, 1). A rational initial estimate refined
/// by two Newton steps on `erf`, which lands within an ulp or two.
pub fn erf_inv(y: f64) -> f64 {
    if y.is_nan() || y < -1.0 || y > 1.0 {
        return f64::NAN;
    }
    if y == 0.0 {
        return y;
    }
    if y == 1.0 {
        return f64::INFINITY;
    }
    if y == -1.0 {
        return f64::NEG_INFINITY;
    }
    // Initial estimate: invert through the normal quantile using the
    // Beasley-Springer-Moro central rational fit, good to ~1e-7 in the
    // bulk; the tail branch keeps the estimate within Newton's basin.
    let w = -((1.0 - y) * (1.0 + y)).ln();
    let mut x = if w < 6.25 {
        let w = w - 3.125;
        let mut p = -3.6444120640178196996e-21;
        for c in [
            -1.685059138182016589e-19,
            1.2858480715256400167e-18,
            1.115787767802518096e-17,
            -1.333171662854620906e-16,
            2.0972767875968561637e-17,
            6.6376381343583238325e-15,
            -4.0545662729752068639e-14,
            -8.1519341976054721522e-14,
            2.6335093153082322977e-12,
            -1.2975133253453532498e-11,
            -5.4154120542946279317e-11,
            1.051212273321532285e-09,
            -4.1126339803469836976e-09,
            -2.9070369957882005086e-08,
            4.2347877827932403518e-07,
            -1.3654692000834678645e-06,
            -1.3882523362786468719e-05,
            0.0001867342080340571352,
            -0.00074070253416626697512,
            -0.0060336708714301490533,
            0.24015818242558961693,
            1.6536545626831027356,
        ] {
            p = p * w + c;
        }
        p * y
    } else {
        let w = w.sqrt() - 3.25;
        let mut p = 2.2137376921775787049e-09;
        for c in [
            9.0756561938885390979e-08,
            -2.7517406297064545428e-07,
            1.8239629214389227755e-08,
            1.5027403968909827627e-06,
            -4.013867526981545969e-06,
            2.9234449089955446044e-06,
            1.2475304481671778723e-05,
            -4.7318229009055733981e-05,
            6.8284851459573175448e-05,
            2.4031110387097893999e-05,
            -0.0003550375203628474796,
            0.00095328937973738049703,
            -0.0016882755560235047313,
            0.0024914420961078508066,
            -0.0037512085075692412107,
            0.005370914553590063617,
            1.0052589676941592334,
            3.0838856104922207635,
        ] {
            p = p * w + c;
        }
        p * y
    };
    // Newton: x <- x - (erf(x) - y) / erf'(x), erf'(x) = 2/sqrt(pi) e^(-x^2).
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    for _ in 0..3 {
        let err = erf(x) - y;
        x -= err / (two_over_sqrt_pi * (-x * x).exp());
    }
    x
}

/// Standard normal cumulative distribution function.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal probability density function.
#[inline]
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Subdivides until the Richardson error estimate of each panel is below
/// `tol` scaled to the panel's share of the interval, then applies the
/// standard 1/15 correction. `tol` is treated as an absolute tolerance on
/// the whole integral.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }

    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Linear interpolation in a table of `(x, y)` pairs with strictly
/// increasing `x`. Outside the table's span the value is 0.
pub fn interp_table(table: &[(f64, f64)], x: f64) -> f64 {
    let n = table.len();
    if n == 0 || x < table[0].0 || x > table[n - 1].0 {
        return 0.0;
    }
    if n == 1 {
        return table[0].1;
    }
    // Index of the first knot strictly right of x; x lies in [i-1, i].
    let i = table.partition_point(|&(xk, _)| xk <= x);
    if i == n {
        return table[n - 1].1;
    }
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Exact integral of the piecewise-linear interpolant of `table` over the
/// intersection of `[a, b]` with the table's span (0 outside the span).
pub fn integrate_table_between(table: &[(f64, f64)], a: f64, b: f64) -> f64 {
    if table.len() < 2 || b <= a {
        return 0.0;
    }
    let lo = a.max(table[0].0);
    let hi = b.min(table[table.len() - 1].0);
    if hi <= lo {
        return 0.0;
    }
    let mut sum = 0.0;
    for w in table.windows(2) {
        let (x0, x1) = (w[0].0, w[1].0);
        let (s, e) = (x0.max(lo), x1.min(hi));
        if e <= s {
            continue;
        }
        // Trapezoid of the interpolant over the clipped segment.
        let ys = interp_table(table, s);
        let ye = interp_table(table, e);
        sum += 0.5 * (ys + ye) * (e - s);
    }
    sum
}

/// Trapezoidal integral of a full table.
pub fn integrate_table(table: &[(f64, f64)]) -> f64 {
    table
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

/// Ordinary least-squares line through `(x, y)` points: returns
/// `(slope, intercept)`. Uses the centered form for numerical stability.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::domain(format!(
            "linear fit needs >= 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("linear fit: all x values identical"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Thomas algorithm for a tridiagonal system.
///
/// Row `i` reads `sub[i]·x[i-1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`,
/// with `sub[0]` and `sup[n-1]` ignored. Returns `None` on a vanishing pivot.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    assert!(sub.len() == n && sup.len() == n && rhs.len() == n);
    if n == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![0.0; n]; // modified superdiagonal
    let mut d = vec![0.0; n]; // modified rhs
    if diag[0] == 0.0 {
        return None;
    }
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 {
            return None;
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Some(x)
}

/// Gaussian elimination with partial pivoting for small dense systems
/// (the normal equations of fits, n <= 4). `a` is row-major n x n with
/// n = b.len(). Returns `None` if singular.
pub fn solve_dense_small(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    assert!(a.len() == n * n, "matrix must be {n} x {n} row-major");
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        // Partial pivot.
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap();
        if m[pivot_row * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap(col * n + k, pivot_row * n + k);
            }
            rhs.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    Some(x)
}
