//! Evaluation of the counter function `f_N(t)`.
//!
//! Three modes are supported:
//!
//! * `Discrete`: `Σ_{n=1}^{N} a_n · g_n(t)` for integer `N`.
//! * `Fractional`: full bumps `1..=⌊N⌋` plus `(N − ⌊N⌋) · a_{⌊N⌋+1} · g_{⌊N⌋+1}(t)`.
//!   Piecewise-linear in `N`.
//! * `Smooth`: `Σ_{n=1}^{n_max} σ(n − N) · a_n · g_n(t)`, C∞ in `N` for a sigmoid `σ`.
//!
//! `g_n` is the unit Gaussian of width `δ` centred at `n`.

use serde::{Deserialize, Serialize};

use crate::bumps::{gaussian, TransitionFunction};
use crate::coefficients::CoefficientFamily;
use crate::error::{domain, Error, Result};

/// Bumps whose unit-amplitude value at `t` falls below this are skipped.
const SKIP_THRESHOLD: f64 = 1e-30;

/// Extra smooth-mode terms past `⌈N⌉`.
pub const SMOOTH_EXTRA_TERMS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Discrete,
    Fractional,
    Smooth { transition: TransitionFunction },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    family: CoefficientFamily,
    delta: f64,
    mode: Mode,
    truncation: Option<u64>,
}

impl EncoderConfig {
    pub fn new(family: CoefficientFamily, delta: f64, mode: Mode) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { family, delta, mode, truncation: None })
    }

    /// Canonical family, `δ = 0.2`, discrete mode.
    pub fn canonical() -> Self {
        Self {
            family: CoefficientFamily::Canonical,
            delta: crate::DEFAULT_DELTA,
            mode: Mode::Discrete,
            truncation: None,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Fixes the smooth-mode series cutoff. Evaluations at `N` with
    /// `n_max < ⌈N⌉ + 10` are rejected.
    pub fn with_truncation(mut self, n_max: u64) -> Self {
        self.truncation = Some(n_max);
        self
    }

    pub fn family(&self) -> CoefficientFamily {
        self.family
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `δ√(2π)`, the integral of one unit bump.
    pub fn bump_mass(&self) -> f64 {
        self.delta * crate::SQRT_2PI
    }

    /// Validates `n` for the configured mode.
    pub(crate) fn check_n(&self, n: f64) -> Result<()> {
        if n.is_nan() || n < 0.0 {
            return Err(domain(format!("N must be non-negative, got {n}")));
        }
        if !n.is_finite() {
            return Err(domain("N must be finite"));
        }
        if self.mode == Mode::Discrete && n.fract() != 0.0 {
            return Err(Error::Mode(format!("discrete mode needs integer N, got {n}")));
        }
        Ok(())
    }

    /// Smooth-mode series cutoff at `n`.
    pub(crate) fn smooth_terms(&self, n: f64) -> Result<u64> {
        let needed = n.ceil() as u64 + SMOOTH_EXTRA_TERMS;
        match self.truncation {
            None => Ok(needed),
            Some(t) if t >= needed => Ok(t),
            Some(t) => Err(domain(format!(
                "truncation {t} too small for N = {n}; need at least {needed}"
            ))),
        }
    }

    /// Per-bump weights `(n, w_n)` such that `f_N(t) = Σ w_n · a_n · g_n(t)`.
    /// Bumps with zero weight are omitted.
    pub(crate) fn weights(&self, n: f64) -> Result<Weights> {
        self.check_n(n)?;
        Ok(match self.mode {
            Mode::Discrete => Weights::Full { last: n as u64 },
            Mode::Fractional => {
                let whole = n.floor();
                Weights::Fractional { last: whole as u64, frac: n - whole }
            }
            Mode::Smooth { transition } => Weights::Smooth {
                n,
                terms: self.smooth_terms(n)?,
                transition,
            },
        })
    }

    /// `f_N(t)`.
    pub fn counter_eval(&self, n: f64, t: f64) -> Result<f64> {
        let weights = self.weights(n)?;
        Ok(self.eval_weighted(&weights, t))
    }

    fn eval_weighted(&self, weights: &Weights, t: f64) -> f64 {
        let upper = weights.upper();
        if upper == 0 {
            return 0.0;
        }
        let radius = self.delta * (2.0 * (1.0 / SKIP_THRESHOLD).ln()).sqrt();
        let lo = (t - radius).ceil().max(1.0);
        let hi = (t + radius).floor().min(upper as f64);
        if lo > hi {
            return 0.0;
        }
        let mut acc = 0.0;
        for k in lo as u64..=hi as u64 {
            let w = weights.weight(k);
            if w != 0.0 {
                acc += w * self.family.term(k) * gaussian(t - k as f64, self.delta);
            }
        }
        acc
    }

    /// `points` uniformly spaced samples of `f_N` on `[t_min, t_max]`,
    /// both endpoints included.
    pub fn counter_grid(&self, n: f64, t_min: f64, t_max: f64, points: usize) -> Result<Vec<(f64, f64)>> {
        if !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
            return Err(domain(format!("invalid range [{t_min}, {t_max}]")));
        }
        if points < 2 {
            return Err(domain("grid needs at least 2 points"));
        }
        let weights = self.weights(n)?;
        Ok(linspace(t_min, t_max, points)
            .map(|t| (t, self.eval_weighted(&weights, t)))
            .collect())
    }
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self::canonical()
    }
}

/// Uniform grid with exact endpoints.
pub(crate) fn linspace(a: f64, b: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = (b - a) / (points - 1) as f64;
    (0..points).map(move |i| if i + 1 == points { b } else { a + i as f64 * step })
}

pub(crate) enum Weights {
    Full { last: u64 },
    Fractional { last: u64, frac: f64 },
    Smooth { n: f64, terms: u64, transition: TransitionFunction },
}

impl Weights {
    /// Largest bump index with possibly non-zero weight.
    pub(crate) fn upper(&self) -> u64 {
        match *self {
            Self::Full { last } => last,
            Self::Fractional { last, frac } => {
                if frac > 0.0 {
                    last + 1
                } else {
                    last
                }
            }
            Self::Smooth { terms, .. } => terms,
        }
    }

    pub(crate) fn weight(&self, k: u64) -> f64 {
        match *self {
            Self::Full { last } => (k <= last) as u8 as f64,
            Self::Fractional { last, frac } => {
                if k <= last {
                    1.0
                } else if k == last + 1 {
                    frac
                } else {
                    0.0
                }
            }
            Self::Smooth { n, transition, .. } => transition.eval(k as f64 - n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mode: Mode) -> EncoderConfig {
        EncoderConfig::canonical().with_mode(mode)
    }

    fn a(n: u64) -> f64 {
        CoefficientFamily::Canonical.coefficient(n).unwrap()
    }

    #[test]
    fn discrete_single_bump_peak() {
        let v = cfg(Mode::Discrete).counter_eval(1.0, 1.0).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn fractional_examples() {
        let c = cfg(Mode::Fractional);
        assert_eq!(c.counter_eval(0.0, 5.0).unwrap(), 0.0);
        let v = c.counter_eval(1.5, 2.0).unwrap();
        let expected = 0.5 * 0.625 + (-0.5) * (-12.5f64).exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.31250).abs() < 1e-5);
    }

    #[test]
    fn errors() {
        let d = cfg(Mode::Discrete);
        assert!(matches!(d.counter_eval(1.5, 0.0), Err(Error::Mode(_))));
        assert!(matches!(d.counter_eval(-1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(cfg(Mode::Fractional).counter_eval(f64::NAN, 0.0), Err(Error::Domain(_))));
        assert!(EncoderConfig::new(CoefficientFamily::Canonical, 0.0, Mode::Discrete).is_err());
        let s = cfg(Mode::Smooth { transition: TransitionFunction::default() }).with_truncation(12);
        assert!(s.counter_eval(2.0, 1.0).is_ok());
        assert!(s.counter_eval(3.0, 1.0).is_err());
    }

    #[test]
    fn grid_examples() {
        let d = cfg(Mode::Discrete);
        let grid = d.counter_grid(5.0, 0.0, 8.0, 1000).unwrap();
        assert_eq!(grid.len(), 1000);
        assert_eq!(grid[0].0, 0.0);
        assert_eq!(grid[999].0, 8.0);
        // largest sample sits near t = 2 with value ≈ a_2
        let (t_max, f_max) = grid.iter().copied().fold((0.0, f64::MIN), |m, p| if p.1 > m.1 { p } else { m });
        assert!((t_max - 2.0).abs() < 0.01);
        assert!((f_max - 0.625).abs() < 1e-3);
        for (t, f) in &grid {
            assert_eq!(*f, d.counter_eval(5.0, *t).unwrap());
        }

        let empty = d.counter_grid(0.0, -1.0, 1.0, 2).unwrap();
        assert_eq!(empty, vec![(-1.0, 0.0), (1.0, 0.0)]);

        assert!(d.counter_grid(5.0, 1.0, 1.0, 10).is_err());
        assert!(d.counter_grid(5.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_at_integers_reads_coefficients() {
        let d = cfg(Mode::Discrete);
        let grid = d.counter_grid(5.0, 0.0, 8.0, 801).unwrap();
        for n in 1..=5u64 {
            let (t, f) = grid[(n * 100) as usize];
            assert!((t - n as f64).abs() < 1e-12);
            assert!((f - a(n)).abs() < 1e-4, "n = {n}");
        }
    }

    #[test]
    fn fractional_at_integer_equals_discrete() {
        let d = cfg(Mode::Discrete);
        let f = cfg(Mode::Fractional);
        for n in 0..=12 {
            for i in 0..=140 {
                let t = -1.0 + 0.1 * i as f64;
                assert_eq!(d.counter_eval(n as f64, t).unwrap(), f.counter_eval(n as f64, t).unwrap());
            }
        }
    }

    #[test]
    fn heaviside_smooth_equals_discrete() {
        let d = cfg(Mode::Discrete);
        let s = cfg(Mode::Smooth { transition: TransitionFunction::Heaviside });
        for n in 0..=12 {
            for i in 0..=140 {
                let t = -1.0 + 0.1 * i as f64;
                assert_eq!(d.counter_eval(n as f64, t).unwrap(), s.counter_eval(n as f64, t).unwrap());
            }
        }
    }

    #[test]
    fn bumps_nearly_orthogonal_at_centres() {
        let d = cfg(Mode::Discrete);
        for big_n in 1..=30u64 {
            for n in 1..=big_n {
                let v = d.counter_eval(big_n as f64, n as f64).unwrap();
                assert!((v - a(n)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn skipping_far_bumps_is_invisible() {
        // direct sum over every bump, no window
        let d = cfg(Mode::Discrete);
        for i in 0..=300 {
            let t = -2.0 + 0.05 * i as f64;
            let direct: f64 = (1..=10u64).map(|n| a(n) * gaussian(t - n as f64, 0.2)).sum();
            assert!((d.counter_eval(10.0, t).unwrap() - direct).abs() < 1e-25);
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn linear_in_coefficients(scale in -5.0f64..5.0, n in 0.0f64..20.0, t in -1.0f64..22.0) {
                // at α = 0 the generalized family is β · (−1)^n / n, so β scales every a_n
                let unit = CoefficientFamily::generalized(0.0, 1.0, 1.0).unwrap();
                let scaled = CoefficientFamily::generalized(0.0, scale, 1.0).unwrap();
                let v1 = EncoderConfig::new(unit, 0.2, Mode::Fractional).unwrap().counter_eval(n, t).unwrap();
                let vc = EncoderConfig::new(scaled, 0.2, Mode::Fractional).unwrap().counter_eval(n, t).unwrap();
                prop_assert!((vc - scale * v1).abs() <= 1e-12 * (1.0 + v1.abs() * scale.abs()));
            }
        }
    }
}
