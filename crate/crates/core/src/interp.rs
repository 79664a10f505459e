//! Natural cubic spline interpolation and bracketed root finding.
//!
//! The spline interpolates every knot exactly and has zero second derivative
//! at both ends. Evaluation outside the knot range is refused.

use crate::error::{domain, Error, Result};

/// Iteration cap for [`find_root_bracketed`].
pub const MAX_ROOT_ITERATIONS: usize = 200;

/// Piecewise cubic `y = a + b·dx + c·dx² + d·dx³` on each knot interval,
/// `dx = x − x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl CubicSpline {
    /// Fits a natural cubic spline through `points` (strictly ascending `x`,
    /// at least three points).
    pub fn fit(points: &[(f64, f64)]) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(domain(format!("spline needs at least 3 points, got {n}")));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(domain("spline points must be finite"));
        }
        if let Some(w) = points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(domain(format!(
                "spline knots must be strictly ascending ({} then {})",
                w[0].0, w[1].0
            )));
        }

        let x: Vec<f64> = points.iter().map(|p| p.0).collect();
        let y: Vec<f64> = points.iter().map(|p| p.1).collect();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();

        // Tridiagonal system for the interior second derivatives m_1..m_{n-2};
        // natural ends fix m_0 = m_{n-1} = 0.
        let interior = n - 2;
        let mut diag = vec![0.0; interior];
        let mut upper = vec![0.0; interior];
        let mut rhs = vec![0.0; interior];
        for i in 0..interior {
            diag[i] = 2.0 * (h[i] + h[i + 1]);
            upper[i] = h[i + 1];
            rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
        }
        // Thomas algorithm; the sub-diagonal equals h[i].
        for i in 1..interior {
            let w = h[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        for i in (0..interior).rev() {
            let next = if i + 1 < interior { m[i + 2] } else { 0.0 };
            m[i + 1] = (rhs[i] - upper[i] * next) / diag[i];
        }

        let segments = n - 1;
        let mut a = Vec::with_capacity(segments);
        let mut b = Vec::with_capacity(segments);
        let mut c = Vec::with_capacity(segments);
        let mut d = Vec::with_capacity(segments);
        for i in 0..segments {
            a.push(y[i]);
            b.push((y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0);
            c.push(m[i] / 2.0);
            d.push((m[i + 1] - m[i]) / (6.0 * h[i]));
        }
        Ok(Self { knots: x, a, b, c, d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn segment(&self, x: f64) -> Result<(usize, f64)> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::Range(format!("x = {x} outside spline range [{lo}, {hi}]")));
        }
        let i = self.knots.partition_point(|&k| k <= x).saturating_sub(1).min(self.a.len() - 1);
        Ok((i, x - self.knots[i]))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (i, dx) = self.segment(x)?;
        Ok(self.a[i] + dx * (self.b[i] + dx * (self.c[i] + dx * self.d[i])))
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        let (i, dx) = self.segment(x)?;
        Ok(self.b[i] + dx * (2.0 * self.c[i] + 3.0 * dx * self.d[i]))
    }

    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        let (i, dx) = self.segment(x)?;
        Ok(2.0 * self.c[i] + 6.0 * dx * self.d[i])
    }
}

/// Root of a continuous `f` on `[lo, hi]` with `f(lo)·f(hi) ≤ 0`.
///
/// Secant steps are taken while they stay inside the bracket and halve its
/// width at least every other step; otherwise the step falls back to
/// bisection. Stops when `|f(x)| ≤ tol` or the bracket is narrower than `tol`.
pub fn find_root_bracketed(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain(format!("root tolerance must be positive, got {tol}")));
    }
    if !(lo <= hi) {
        return Err(domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(domain("function is NaN at the bracket ends"));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }

    let mut last_width = b - a;
    for iter in 0..MAX_ROOT_ITERATIONS {
        let width = b - a;
        if width <= tol {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let stalled = iter % 2 == 1 && width > 0.5 * last_width;
        let x = if secant > a && secant < b && !stalled {
            secant
        } else {
            0.5 * (a + b)
        };
        if iter % 2 == 1 {
            last_width = width;
        }
        let fx = f(x);
        if fx.abs() <= tol || fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    // closest end of the final bracket
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
