//! Gaussian bumps and transition functions.
//!
//! Transition functions follow the decreasing convention: `σ(−∞) = 1`,
//! `σ(+∞) = 0`. The smooth encoder weights bump `n` by `σ(n − N)`, so bumps
//! left of `N` are switched on and bumps right of it are switched off.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::SQRT_2PI;

/// `amplitude · exp(−(t − center)² / (2 · width²))`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    center: f64,
    width: f64,
    amplitude: f64,
}

impl Bump {
    pub fn new(center: f64, width: f64, amplitude: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(domain(format!("bump width must be positive, got {width}")));
        }
        Ok(Self { center, width, amplitude })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * gaussian(t - self.center, self.width)
    }

    /// Integral over the whole real line, `amplitude · width · √(2π)`.
    pub fn integral(&self) -> f64 {
        self.amplitude * self.width * SQRT_2PI
    }
}

#[inline]
pub(crate) fn gaussian(offset: f64, width: f64) -> f64 {
    (-(offset * offset) / (2.0 * width * width)).exp()
}

/// Smooth (or step) switch from 1 to 0 around `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransitionFunction {
    /// `1 / (1 + e^{s·x})`
    Sigmoid { sharpness: f64 },
    /// C¹ cubic ramp, 1 for `x ≤ −h`, 0 for `x ≥ h`.
    Smoothstep { halfwidth: f64 },
    /// 1 for `x ≤ 0`, 0 for `x > 0`. Keeps bump `N` switched on at integer
    /// `N`, so the smooth encoder reduces to the discrete one.
    Heaviside,
}

impl TransitionFunction {
    pub fn sigmoid(sharpness: f64) -> Result<Self> {
        if !(sharpness > 0.0 && sharpness.is_finite()) {
            return Err(domain(format!("sigmoid sharpness must be positive, got {sharpness}")));
        }
        Ok(Self::Sigmoid { sharpness })
    }

    pub fn smoothstep(halfwidth: f64) -> Result<Self> {
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(domain(format!("smoothstep halfwidth must be positive, got {halfwidth}")));
        }
        Ok(Self::Smoothstep { halfwidth })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Sigmoid { sharpness } => 1.0 / (1.0 + (sharpness * x).exp()),
            Self::Smoothstep { halfwidth } => {
                let u = ((x + halfwidth) / (2.0 * halfwidth)).clamp(0.0, 1.0);
                1.0 - u * u * (3.0 - 2.0 * u)
            }
            Self::Heaviside => {
                if x <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `dσ/dx`. Zero almost everywhere for the Heaviside step.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Self::Sigmoid { sharpness } => {
                let s = self.eval(x);
                -sharpness * s * (1.0 - s)
            }
            Self::Smoothstep { halfwidth } => {
                let u = (x + halfwidth) / (2.0 * halfwidth);
                if (0.0..=1.0).contains(&u) {
                    -6.0 * u * (1.0 - u) / (2.0 * halfwidth)
                } else {
                    0.0
                }
            }
            Self::Heaviside => 0.0,
        }
    }
}

impl Default for TransitionFunction {
    fn default() -> Self {
        Self::Sigmoid { sharpness: crate::DEFAULT_SHARPNESS }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> f64 {
        let h = (b - a) / (points - 1) as f64;
        let inner: f64 = (1..points - 1).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn bump_values() {
        let b = Bump::new(3.0, 0.2, 1.0).unwrap();
        assert_eq!(b.eval(3.0), 1.0);
        assert!((b.eval(3.2) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((b.eval(3.2) - 0.6065).abs() < 1e-4);
        assert_eq!(Bump::new(3.0, 0.2, -0.5).unwrap().eval(3.0), -0.5);
        assert!(Bump::new(0.0, 0.0, 1.0).is_err());
        assert!(Bump::new(0.0, -0.1, 1.0).is_err());
    }

    #[test]
    fn bump_integral_closed_form() {
        let b = Bump::new(3.0, 0.2, 1.0).unwrap();
        assert!((b.integral() - 0.5013257).abs() < 1e-7);
        assert_eq!(Bump::new(3.0, 0.2, 0.0).unwrap().integral(), 0.0);
        let quad = trapezoid(|t| b.eval(t), 1.0, 5.0, 2000);
        assert!((quad - b.integral()).abs() < 1e-6);
    }

    #[test]
    fn bump_integral_matches_quadrature_relative() {
        for delta in [0.05, 0.2, 1.0] {
            let b = Bump::new(1.5, delta, 0.7).unwrap();
            let quad = trapezoid(|t| b.eval(t), 1.5 - 8.0 * delta, 1.5 + 8.0 * delta, 4001);
            let rel = ((quad - b.integral()) / b.integral()).abs();
            assert!(rel < 1e-9, "delta = {delta}: rel = {rel:e}");
        }
    }

    #[test]
    fn transition_examples() {
        let s = TransitionFunction::sigmoid(10.0).unwrap();
        assert_eq!(s.eval(0.0), 0.5);
        let expected = 1.0 / (1.0 + 10f64.exp());
        assert!((s.eval(1.0) - expected).abs() < 1e-18);
        assert!((s.eval(1.0) - 4.54e-5).abs() < 1e-7);
        assert_eq!(TransitionFunction::Heaviside.eval(-0.3), 1.0);
        assert_eq!(TransitionFunction::Heaviside.eval(0.0), 1.0);
        assert_eq!(TransitionFunction::Heaviside.eval(1e-12), 0.0);
        assert!(TransitionFunction::sigmoid(0.0).is_err());
    }

    #[test]
    fn sigmoid_saturates_without_nan() {
        let s = TransitionFunction::sigmoid(1e3).unwrap();
        assert_eq!(s.eval(1e3), 0.0);
        assert_eq!(s.eval(-1e3), 1.0);
        assert_eq!(s.derivative(1e3), 0.0);
    }

    #[test]
    fn sigmoid_derivative_matches_finite_difference() {
        let h = 1e-6;
        for sharp in [1.0, 10.0] {
            let s = TransitionFunction::sigmoid(sharp).unwrap();
            for i in 0..=60 {
                let x = -3.0 + 0.1 * i as f64;
                let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
                assert!((fd - s.derivative(x)).abs() < 1e-6, "s = {sharp}, x = {x}");
            }
        }
    }

    #[test]
    fn sharp_sigmoid_approaches_heaviside() {
        let s = TransitionFunction::sigmoid(1e3).unwrap();
        for i in 0..=200 {
            let x = 0.05 + 0.01 * i as f64;
            for x in [x, -x] {
                assert!((s.eval(x) - TransitionFunction::Heaviside.eval(x)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn smoothstep_shape() {
        let s = TransitionFunction::smoothstep(0.5).unwrap();
        assert_eq!(s.eval(-0.5), 1.0);
        assert_eq!(s.eval(-2.0), 1.0);
        assert_eq!(s.eval(0.5), 0.0);
        assert_eq!(s.eval(0.0), 0.5);
        // C¹: derivative vanishes at both ends of the ramp
        assert_eq!(s.derivative(-0.5), 0.0);
        assert_eq!(s.derivative(0.5), 0.0);
        let h = 1e-6;
        for x in [-0.4, -0.1, 0.2, 0.45] {
            let fd = (s.eval(x + h) - s.eval(x - h)) / (2.0 * h);
            assert!((fd - s.derivative(x)).abs() < 1e-6);
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sigmoid_is_symmetric(sharp in 0.1f64..1e3, x in -50.0f64..50.0) {
                let s = TransitionFunction::sigmoid(sharp).unwrap();
                prop_assert!((s.eval(x) + s.eval(-x) - 1.0).abs() < 1e-15);
            }

            #[test]
            fn transitions_stay_in_unit_interval(x in -100.0f64..100.0, w in 0.01f64..10.0) {
                for t in [TransitionFunction::sigmoid(w).unwrap(), TransitionFunction::smoothstep(w).unwrap(), TransitionFunction::Heaviside] {
                    let v = t.eval(x);
                    prop_assert!((0.0..=1.0).contains(&v));
                }
            }
        }
    }
}
