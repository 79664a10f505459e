//! The integral map `I(N) = ∫ f_N(t) dt`.
//!
//! Integration is linear, so the closed forms below are exact over the real
//! line whatever the bump overlap: each bump contributes `δ√(2π)` times its
//! weighted coefficient. Overlap only matters for pointwise readouts of
//! `f_N`, never for `I(N)`.
//!
//! Quadrature is kept as an independent check of the closed forms, using the
//! composite trapezoid rule over the sampled counter function.

use crate::coefficients::CoefficientFamily;
use crate::encoder::{EncoderConfig, Mode, Weights};
use crate::error::{domain, Error, Result};

/// Closed-form `I(N)` in the configured mode.
pub fn integral_closed(cfg: &EncoderConfig, n: f64) -> Result<f64> {
    let family = cfg.family();
    let weights = cfg.weights(n)?;
    let sum = match weights {
        Weights::Full { last } => family.partial_sum(last).value,
        Weights::Fractional { last, frac } => {
            let base = family.partial_sum(last).value;
            if frac > 0.0 {
                base + frac * family.term(last + 1)
            } else {
                base
            }
        }
        Weights::Smooth { .. } => (1..=weights.upper())
            .map(|k| weights.weight(k) * family.term(k))
            .sum(),
    };
    Ok(cfg.bump_mass() * sum)
}

/// Trapezoid-rule integral of `f_N` sampled at `points` uniform nodes on
/// `[t_min, t_max]`.
///
/// The window must cover `[1 − 5δ, ⌈N⌉ + 1 + 5δ]` (tails beyond 5δ carry
/// under `3·10⁻⁷` of a bump's mass) and the grid must have at
/// least `100 · (t_max − t_min)` nodes, otherwise [`Error::Precision`] is
/// returned.
pub fn integral_quadrature(cfg: &EncoderConfig, n: f64, t_min: f64, t_max: f64, points: usize) -> Result<f64> {
    cfg.check_n(n)?;
    let pad = 5.0 * cfg.delta();
    let need_lo = 1.0 - pad;
    let need_hi = n.ceil() + 1.0 + pad;
    if !(t_min <= need_lo && t_max >= need_hi) {
        return Err(Error::Precision(format!(
            "window [{t_min}, {t_max}] does not cover [{need_lo}, {need_hi}]"
        )));
    }
    let min_points = (100.0 * (t_max - t_min)).ceil();
    if (points as f64) < min_points || points < 2 {
        return Err(Error::Precision(format!(
            "{points} points on a window of width {} (need at least {min_points})",
            t_max - t_min
        )));
    }
    let h = (t_max - t_min) / (points - 1) as f64;
    let samples = cfg.counter_grid(n, t_min, t_max, points)?;
    let interior: f64 = samples[1..points - 1].iter().map(|&(_, f)| f).sum();
    Ok(h * (0.5 * (samples[0].1 + samples[points - 1].1) + interior))
}

/// `dI/dN` of the smooth map: `δ√(2π) · Σ a_n · (−σ'(n − N))`.
pub fn map_derivative_smooth(cfg: &EncoderConfig, n: f64) -> Result<f64> {
    let transition = match cfg.mode() {
        Mode::Smooth { transition } if transition != crate::TransitionFunction::Heaviside => transition,
        other => {
            return Err(Error::Mode(format!(
                "smooth derivative needs a differentiable transition, got {other:?}"
            )))
        }
    };
    cfg.check_n(n)?;
    let family = cfg.family();
    let terms = cfg.smooth_terms(n)?;
    let sum: f64 = (1..=terms)
        .map(|k| -transition.derivative(k as f64 - n) * family.term(k))
        .sum();
    Ok(cfg.bump_mass() * sum)
}

/// Right derivative of the fractional map at `n`: `δ√(2π) · a_{⌊N⌋+1}`.
pub fn map_derivative_fractional(cfg: &EncoderConfig, n: f64) -> Result<f64> {
    if n.is_nan() || n < 0.0 || !n.is_finite() {
        return Err(domain(format!("N must be non-negative, got {n}")));
    }
    Ok(cfg.bump_mass() * cfg.family().term(n.floor() as u64 + 1))
}

/// Tabulated discrete integral map `(N, I(N))` for `N = 1..=n_max`.
///
/// Provenance (`delta`, `family`) is optional so tables read back from bare
/// CSV files are still usable.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralTable {
    delta: Option<f64>,
    family: Option<CoefficientFamily>,
    rows: Vec<(u64, f64)>,
    parity_monotone: bool,
}

impl IntegralTable {
    pub fn from_rows(rows: Vec<(u64, f64)>, delta: Option<f64>, family: Option<CoefficientFamily>) -> Result<Self> {
        if rows.is_empty() {
            return Err(domain("integral table is empty"));
        }
        for (i, &(n, value)) in rows.iter().enumerate() {
            if n != i as u64 + 1 {
                return Err(domain(format!("table row {i} has N = {n}, expected {}", i + 1)));
            }
            if !value.is_finite() {
                return Err(domain(format!("table row N = {n} is not finite")));
            }
        }
        if let Some(d) = delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(domain(format!("table delta must be positive, got {d}")));
            }
        }
        let parity_monotone = is_monotone(rows.iter().step_by(2).map(|r| r.1))
            && is_monotone(rows.iter().skip(1).step_by(2).map(|r| r.1));
        Ok(Self { delta, family, rows, parity_monotone })
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    pub fn family(&self) -> Option<CoefficientFamily> {
        self.family
    }

    pub fn n_max(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn rows(&self) -> &[(u64, f64)] {
        &self.rows
    }

    pub fn values(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.1)
    }

    /// `I(n)`, if `n` is a row of the table.
    pub fn get(&self, n: u64) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.rows.get(i as usize)).map(|r| r.1)
    }

    /// Whether the odd-`N` and even-`N` subsequences are each monotone, which
    /// is what parity-split binary search relies on.
    pub fn parity_monotone(&self) -> bool {
        self.parity_monotone
    }
}

fn is_monotone(values: impl Iterator<Item = f64> + Clone) -> bool {
    let pairs = || values.clone().zip(values.clone().skip(1));
    pairs().all(|(a, b)| a <= b) || pairs().all(|(a, b)| a >= b)
}

/// Closed-form discrete `I(N)` for `N = 1..=n_max`. The encoder mode of
/// `cfg` is ignored; tables always hold the integer-`N` map.
pub fn build_table(cfg: &EncoderConfig, n_max: u64) -> Result<IntegralTable> {
    if n_max == 0 {
        return Err(domain("table needs N_max >= 1"));
    }
    let mass = cfg.bump_mass();
    let rows = cfg
        .family()
        .partial_sums(n_max)
        .into_iter()
        .enumerate()
        .map(|(i, s)| (i as u64 + 1, mass * s))
        .collect();
    IntegralTable::from_rows(rows, Some(cfg.delta()), Some(cfg.family()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TransitionFunction;

    const TABLE_1: [f64; 30] = [
        -0.2507, 0.0627, -0.0836, 0.0496, -0.0475, 0.0373, -0.0337, 0.0292, -0.0264, 0.0238,
        -0.0218, 0.0200, -0.0185, 0.0173, -0.0162, 0.0152, -0.0143, 0.0135, -0.0128, 0.0122,
        -0.0117, 0.0111, -0.0107, 0.0102, -0.0098, 0.0095, -0.0091, 0.0088, -0.0085, 0.0082,
    ];

    fn discrete() -> EncoderConfig {
        EncoderConfig::canonical()
    }

    fn fractional() -> EncoderConfig {
        EncoderConfig::canonical().with_mode(Mode::Fractional)
    }

    fn smooth(sharpness: f64) -> EncoderConfig {
        EncoderConfig::canonical().with_mode(Mode::Smooth {
            transition: TransitionFunction::sigmoid(sharpness).unwrap(),
        })
    }

    #[test]
    fn closed_form_examples() {
        assert!((integral_closed(&discrete(), 1.0).unwrap() + 0.2507).abs() < 5e-5);
        assert!((integral_closed(&discrete(), 8.0).unwrap() - 0.0292).abs() < 5e-5);
        let frac = integral_closed(&fractional(), 1.5).unwrap();
        let hand = -0.5 * 0.2 * crate::SQRT_2PI + 0.5 * 0.2 * crate::SQRT_2PI * 0.625;
        assert!((frac - hand).abs() < 1e-15);
        assert!((frac + 0.09400).abs() < 1e-5);
        assert_eq!(integral_closed(&discrete(), 0.0).unwrap(), 0.0);
        assert!(integral_closed(&discrete(), 2.5).is_err());
    }

    #[test]
    fn identity_with_partial_sums() {
        let c = 0.2 * crate::SQRT_2PI;
        let table = build_table(&discrete(), 10_000).unwrap();
        let sums = CoefficientFamily::Canonical.partial_sums(10_000);
        for (row, s) in table.rows().iter().zip(sums) {
            assert!((row.1 - c * s).abs() < 1e-12);
        }
        for n in [1u64, 17, 999, 10_000] {
            let closed = integral_closed(&discrete(), n as f64).unwrap();
            assert!((closed - table.get(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn table_matches_published_values() {
        let table = build_table(&discrete(), 30).unwrap();
        assert_eq!(table.n_max(), 30);
        for (row, published) in table.rows().iter().zip(TABLE_1) {
            assert!((row.1 - published).abs() <= 5e-5, "N = {}", row.0);
            let expected_sign = if row.0 % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(row.1.signum(), expected_sign);
        }
        let one = build_table(&discrete(), 1).unwrap();
        assert_eq!(one.rows().len(), 1);
        assert!((one.rows()[0].1 + 0.2507).abs() < 5e-5);
        assert!(build_table(&discrete(), 0).is_err());
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let q = integral_quadrature(&discrete(), 5.0, 0.0, 8.0, 4000).unwrap();
        assert!((q - integral_closed(&discrete(), 5.0).unwrap()).abs() < 1e-6);
        let zero = integral_quadrature(&discrete(), 0.0, 0.0, 8.0, 4000).unwrap();
        assert!(zero.abs() < 1e-12);
        let q20 = integral_quadrature(&discrete(), 20.0, 0.0, 23.0, 10_000).unwrap();
        assert!((q20 - 0.0122).abs() < 5e-5);
        for n in 1..=30u64 {
            let n = n as f64;
            let (lo, hi) = (1.0 - 1.6, n + 2.6);
            let q = integral_quadrature(&discrete(), n, lo, hi, 4000).unwrap();
            let c = integral_closed(&discrete(), n).unwrap();
            assert!(((q - c) / c).abs() < 1e-6, "N = {n}");
        }
    }

    #[test]
    fn quadrature_of_fractional_and_smooth_modes() {
        let f = fractional();
        let q = integral_quadrature(&f, 3.25, -1.0, 7.0, 4000).unwrap();
        assert!((q - integral_closed(&f, 3.25).unwrap()).abs() < 1e-9);
        let s = smooth(10.0);
        let n: f64 = 4.6;
        let terms = n.ceil() + 10.0;
        let q = integral_quadrature(&s, n, -1.0, terms + 2.0, 4000).unwrap();
        assert!((q - integral_closed(&s, n).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn quadrature_preconditions() {
        assert!(matches!(integral_quadrature(&discrete(), 5.0, 0.0, 6.0, 4000), Err(Error::Precision(_))));
        assert!(matches!(integral_quadrature(&discrete(), 5.0, 0.0, 8.0, 500), Err(Error::Precision(_))));
        assert!(integral_quadrature(&discrete(), 5.0, -0.5, 8.0, 4000).is_ok());
    }

    #[test]
    fn fractional_continuity_and_slope_jumps() {
        let f = fractional();
        let c = f.bump_mass();
        let fam = CoefficientFamily::Canonical;
        let h = 1e-13;
        for k in 1..=29u64 {
            let kf = k as f64;
            let at = integral_closed(&f, kf).unwrap();
            // left limit of the segment (k−1, k) evaluated from its formula
            let left = c * (fam.partial_sum(k - 1).value + fam.term(k));
            assert!((left - at).abs() < 1e-12, "k = {k}");
            assert!((integral_closed(&f, kf - h).unwrap() - at).abs() < 1e-12);
            let slope_left = (at - integral_closed(&f, kf - 0.5).unwrap()) / 0.5;
            let slope_right = (integral_closed(&f, kf + 0.5).unwrap() - at) / 0.5;
            let jump = c * (fam.term(k + 1) - fam.term(k));
            assert!((slope_right - slope_left - jump).abs() < 1e-10, "k = {k}");
        }
        let slope = map_derivative_fractional(&f, 1.3).unwrap();
        assert!((slope - 0.31333).abs() < 1e-5);
    }

    #[test]
    fn smooth_derivative_matches_finite_differences() {
        let h = 1e-5;
        for sharp in [10.0, 100.0] {
            let s = smooth(sharp);
            for n in [0.5, 3.0, 7.25] {
                let fd = (integral_closed(&s, n + h).unwrap() - integral_closed(&s, n - h).unwrap()) / (2.0 * h);
                let d = map_derivative_smooth(&s, n).unwrap();
                assert!((fd - d).abs() < 1e-5, "s = {sharp}, N = {n}: fd {fd} vs {d}");
            }
        }
        let saturated = map_derivative_smooth(&smooth(1e3), 4.5).unwrap();
        assert!(saturated.abs() < 1e-6);
        assert!(matches!(map_derivative_smooth(&discrete(), 1.0), Err(Error::Mode(_))));
        let step = EncoderConfig::canonical().with_mode(Mode::Smooth { transition: TransitionFunction::Heaviside });
        assert!(matches!(map_derivative_smooth(&step, 1.0), Err(Error::Mode(_))));
    }

    #[test]
    fn smooth_map_converges_to_step_at_half_integers() {
        for k in 0..=12u64 {
            let target = integral_closed(&discrete(), k as f64).unwrap();
            let errors: Vec<f64> = [10.0, 100.0, 1000.0]
                .iter()
                .map(|&s| (integral_closed(&smooth(s), k as f64 + 0.5).unwrap() - target).abs())
                .collect();
            assert!(errors[0] > errors[1] || errors[1] == 0.0, "k = {k}: {errors:?}");
            assert!(errors[1] >= errors[2], "k = {k}: {errors:?}");
            assert!(errors[2] < 1e-12);
        }
    }

    #[test]
    fn heaviside_smooth_reproduces_discrete() {
        let step = EncoderConfig::canonical().with_mode(Mode::Smooth { transition: TransitionFunction::Heaviside });
        for n in 0..=30 {
            let n = n as f64;
            assert!((integral_closed(&step, n).unwrap() - integral_closed(&discrete(), n).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn table_validation() {
        assert!(IntegralTable::from_rows(vec![], None, None).is_err());
        assert!(IntegralTable::from_rows(vec![(2, 0.1)], None, None).is_err());
        assert!(IntegralTable::from_rows(vec![(1, 0.1), (3, 0.1)], None, None).is_err());
        assert!(IntegralTable::from_rows(vec![(1, f64::NAN)], None, None).is_err());
        let t = IntegralTable::from_rows(vec![(1, -0.3), (2, 0.2), (3, -0.1), (4, 0.3), (5, -0.2)], None, None).unwrap();
        assert!(!t.parity_monotone());
        assert!(build_table(&discrete(), 1000).unwrap().parity_monotone());
    }
}
