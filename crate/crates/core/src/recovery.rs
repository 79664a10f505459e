//! Inversion of the integral map.
//!
//! Two different questions are answered here:
//!
//! * *Self-cancellation* ([`recover_threshold`]): the smallest `k` whose own
//!   integral `|I(k)|` falls below `ε`.
//! * *Matching* ([`recover_match`], [`recover_binary`], [`recover_spline`]):
//!   the smallest `N` whose integral is within `ε` of an observed `I*`.
//!
//! [`recover_analytic_fractional`] inverts the piecewise-linear extension
//! exactly on one unit segment.
//!
//! Ties always go to the smallest `N`. A search that finds nothing returns
//! `Ok(None)`; errors are reserved for invalid input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderConfig, Mode};
use crate::error::{domain, Error, Result};
use crate::integral_map::{integral_closed, IntegralTable};
use crate::interp::{find_root_bracketed, CubicSpline};
use crate::DEFAULT_STABILITY_EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Threshold,
    TableScan,
    TableBinary,
    Spline,
    AnalyticLocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    /// Recovered index; integer-valued for the table methods.
    pub n: f64,
    /// `|I(N) − I*|`, or `|I(N)|` for threshold recovery.
    pub residual: f64,
    pub method: Method,
    /// Table methods: the match survives any perturbation below `ε/2`.
    /// Continuous methods: the local slope exceeds the stability threshold.
    pub stable: bool,
    /// Binary search fell back to a linear scan.
    pub degraded: bool,
}

impl RecoveryResult {
    /// Nearest integer candidate.
    pub fn rounded(&self) -> u64 {
        self.n.round() as u64
    }

    fn table(n: u64, residual: f64, epsilon: f64, method: Method) -> Self {
        Self {
            n: n as f64,
            residual,
            method,
            stable: residual < 0.5 * epsilon,
            degraded: false,
        }
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("tolerance must be positive, got {epsilon}")))
    }
}

fn check_target(i_star: f64) -> Result<()> {
    if i_star.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("target integral must be finite, got {i_star}")))
    }
}

/// Smallest `k` with `|I(k)| < ε`; with `require_local_min`, `|I(k)|` must also
/// be no larger than its table neighbours (one-sided at the ends).
pub fn recover_threshold(table: &IntegralTable, epsilon: f64, require_local_min: bool) -> Result<Option<RecoveryResult>> {
    check_epsilon(epsilon)?;
    let mags: Vec<f64> = table.values().map(f64::abs).collect();
    if mags.is_empty() {
        return Err(domain("integral table is empty"));
    }
    let found = (0..mags.len()).find(|&i| {
        if mags[i] >= epsilon {
            return false;
        }
        if !require_local_min {
            return true;
        }
        let left_ok = i == 0 || mags[i] <= mags[i - 1];
        let right_ok = i + 1 == mags.len() || mags[i] <= mags[i + 1];
        left_ok && right_ok
    });
    Ok(found.map(|i| RecoveryResult::table(i as u64 + 1, mags[i], epsilon, Method::Threshold)))
}

/// Smallest `N` with `|I(N) − I*| < ε`, by linear scan.
pub fn recover_match(table: &IntegralTable, i_star: f64, epsilon: f64) -> Result<Option<RecoveryResult>> {
    check_epsilon(epsilon)?;
    check_target(i_star)?;
    Ok(table
        .rows()
        .iter()
        .find(|&&(_, v)| (v - i_star).abs() < epsilon)
        .map(|&(n, v)| RecoveryResult::table(n, (v - i_star).abs(), epsilon, Method::TableScan)))
}

/// Same answer as [`recover_match`] in `O(log N_max)`.
///
/// Alternating families give tables whose odd-`N` and even-`N` rows are
/// each monotone even though the full sequence is not. Each parity class is
/// binary-searched for its first row with `|I − I*| < ε` and the smaller
/// hit wins. Tables without that structure fall back to the linear scan and
/// are flagged `degraded`.
pub fn recover_binary(table: &IntegralTable, i_star: f64, epsilon: f64) -> Result<Option<RecoveryResult>> {
    check_epsilon(epsilon)?;
    check_target(i_star)?;
    if !table.parity_monotone() {
        return Ok(recover_match(table, i_star, epsilon)?.map(|r| RecoveryResult {
            method: Method::TableBinary,
            degraded: true,
            ..r
        }));
    }
    let rows = table.rows();
    let odd = search_parity(rows, 0, i_star, epsilon);
    let even = search_parity(rows, 1, i_star, epsilon);
    let best = match (odd, even) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(best.map(|i| {
        let residual = (rows[i].1 - i_star).abs();
        RecoveryResult::table(rows[i].0, residual, epsilon, Method::TableBinary)
    }))
}

/// Binary search over rows `offset, offset + 2, …`, returning the row index of
/// the first match. Works on `d = fl(I − I*)`, which is monotone in `I`, so
/// the hit set `|d| < ε` is exactly the linear-scan one.
fn search_parity(rows: &[(u64, f64)], offset: usize, i_star: f64, epsilon: f64) -> Option<usize> {
    let len = rows.len().saturating_sub(offset).div_ceil(2);
    if len == 0 {
        return None;
    }
    let at = |j: usize| rows[offset + 2 * j].1 - i_star;
    let increasing = at(0) <= at(len - 1);
    // first j past the rows lying entirely below (increasing) or above
    // (decreasing) the ε-window
    let (mut lo, mut hi) = (0usize, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let d = at(mid);
        let outside = if increasing { d <= -epsilon } else { d >= epsilon };
        if outside {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    (lo < len && at(lo).abs() < epsilon).then_some(offset + 2 * lo)
}

/// Continuous inverse through a natural cubic spline of the table: the
/// first knot interval where `spline − I*` changes sign is rooted to `tol`.
pub fn recover_spline(table: &IntegralTable, i_star: f64, tol: f64) -> Result<Option<RecoveryResult>> {
    recover_spline_in(table, i_star, tol, 1.0, table.n_max() as f64)
}

/// [`recover_spline`] restricted to knot intervals inside `[n_lo, n_hi]`.
pub fn recover_spline_in(table: &IntegralTable, i_star: f64, tol: f64, n_lo: f64, n_hi: f64) -> Result<Option<RecoveryResult>> {
    check_epsilon(tol)?;
    check_target(i_star)?;
    let points: Vec<(f64, f64)> = table.rows().iter().map(|&(n, v)| (n as f64, v)).collect();
    let spline = CubicSpline::fit(&points)?;
    let g = |x: f64| spline.eval(x).map(|v| v - i_star);
    let knots: Vec<f64> = spline.knots().iter().copied().filter(|&k| k >= n_lo && k <= n_hi).collect();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (g(a)?, g(b)?);
        if ga * gb > 0.0 {
            continue;
        }
        let root = find_root_bracketed(|x| g(x).unwrap_or(f64::NAN), a, b, tol)?;
        let residual = g(root)?.abs();
        let slope = spline.derivative(root)?;
        return Ok(Some(RecoveryResult {
            n: root,
            residual,
            method: Method::Spline,
            stable: slope.abs() > DEFAULT_STABILITY_EPSILON,
            degraded: false,
        }));
    }
    Ok(None)
}

/// Exact inverse of the fractional map on `[k, k+1]`:
/// `N = k + (I* − I(k)) / (δ√(2π) · a_{k+1})`.
pub fn recover_analytic_fractional(cfg: &EncoderConfig, i_star: f64, k: u64) -> Result<RecoveryResult> {
    recover_analytic_fractional_with(cfg, i_star, k, DEFAULT_STABILITY_EPSILON)
}

/// [`recover_analytic_fractional`] with an explicit slope threshold for the
/// `stable` flag (`|a_{k+1}| > stability_epsilon`).
pub fn recover_analytic_fractional_with(cfg: &EncoderConfig, i_star: f64, k: u64, stability_epsilon: f64) -> Result<RecoveryResult> {
    check_target(i_star)?;
    let fractional = cfg.with_mode(Mode::Fractional);
    let next = cfg.family().term(k + 1);
    if next == 0.0 {
        return Err(Error::SingularSlope { k });
    }
    let start = integral_closed(&fractional, k as f64)?;
    let end = integral_closed(&fractional, (k + 1) as f64)?;
    let (lo, hi) = if start <= end { (start, end) } else { (end, start) };
    if !(lo..=hi).contains(&i_star) {
        return Err(Error::Range(format!(
            "I* = {i_star} outside segment [{lo}, {hi}] for k = {k}"
        )));
    }
    let slope = cfg.bump_mass() * next;
    let frac = ((i_star - start) / slope).clamp(0.0, 1.0);
    let n = k as f64 + frac;
    let residual = (integral_closed(&fractional, n)? - i_star).abs();
    Ok(RecoveryResult {
        n,
        residual,
        method: Method::AnalyticLocal,
        stable: next.abs() > stability_epsilon,
        degraded: false,
    })
}

/// Heuristic tolerance `C · ρ^{N_max}` for geometrically decaying
/// oscillations. The canonical family decays harmonically, so at large
/// `N_max` this underestimates the oscillation amplitude badly.
pub fn select_epsilon(rho: f64, n_max: u64, scale: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(format!("scale must be positive, got {scale}")));
    }
    if n_max == 0 {
        return Err(domain("N_max must be positive"));
    }
    Ok(scale * rho.powf(n_max as f64))
}

/// `|I(N)| < ε/2`: then any perturbation `|ΔI| < ε/2` keeps `|I(N) + ΔI| < ε`.
pub fn perturbation_margin(table: &IntegralTable, n: u64, epsilon: f64) -> Result<bool> {
    check_epsilon(epsilon)?;
    let value = table
        .get(n)
        .ok_or_else(|| domain(format!("N = {n} is not a table row")))?;
    Ok(value.abs() < 0.5 * epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub amplitude: f64,
    /// Fraction of trials recovering exactly the true `N`.
    pub accuracy: f64,
    pub recovered: usize,
    pub trials: usize,
}

/// Recovery accuracy of [`recover_match`] under uniform additive noise.
///
/// Trial `i` draws `u ∈ [−1, 1]` from stream `i` of a ChaCha8 generator
/// seeded with `seed` and observes `I(true_N) + A·u` for each amplitude
/// `A`, so results depend only on `(seed, i)`.
pub fn noise_sweep(
    table: &IntegralTable,
    true_n: u64,
    epsilon: f64,
    amplitudes: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    check_epsilon(epsilon)?;
    let clean = table
        .get(true_n)
        .ok_or_else(|| domain(format!("true N = {true_n} is not a table row")))?;
    if trials == 0 {
        return Err(domain("noise sweep needs at least one trial"));
    }
    if let Some(a) = amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(domain(format!("noise amplitude must be non-negative, got {a}")));
    }
    let draws: Vec<f64> = (0..trials)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            rng.gen_range(-1.0..=1.0)
        })
        .collect();
    amplitudes
        .iter()
        .map(|&amplitude| {
            let mut recovered = 0;
            for u in &draws {
                let hit = recover_match(table, clean + amplitude * u, epsilon)?;
                if hit.is_some_and(|r| r.rounded() == true_n) {
                    recovered += 1;
                }
            }
            Ok(SweepPoint {
                amplitude,
                accuracy: recovered as f64 / trials as f64,
                recovered,
                trials,
            })
        })
        .collect()
}
