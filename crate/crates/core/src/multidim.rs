//! Separable multidimensional encoding.
//!
//! With product coefficients `a_{n⃗} = Π_i a^{(i)}_{n_i}` and an isotropic
//! bump width, the d-dimensional integral factorises:
//! `I(N⃗) = (δ√(2π))^d · Π_i S_i(N_i)`.

use std::cmp::Ordering;
use std::fmt;

use crate::coefficients::CoefficientFamily;
use crate::encoder::EncoderConfig;
use crate::error::{domain, Result};
use crate::integral_map::{build_table, IntegralTable};
use crate::recovery::recover_match;
use crate::SQRT_2PI;

/// Tuple of non-negative integers, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u64>);

impl MultiIndex {
    pub fn new(components: Vec<u64>) -> Result<Self> {
        if components.is_empty() {
            return Err(domain("multi-index needs at least one component"));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise `≤`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise partial order; `None` when incomparable.
    pub fn partial_cmp_componentwise(&self, other: &Self) -> Option<Ordering> {
        match (self.dominated_by(other), other.dominated_by(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiEncoderConfig {
    families: Vec<CoefficientFamily>,
    delta: f64,
}

impl MultiEncoderConfig {
    pub fn new(families: Vec<CoefficientFamily>, delta: f64) -> Result<Self> {
        if families.is_empty() {
            return Err(domain("multidimensional encoder needs at least one axis"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain(format!("delta must be positive, got {delta}")));
        }
        Ok(Self { families, delta })
    }

    /// Same family on every axis.
    pub fn isotropic(family: CoefficientFamily, dim: usize, delta: f64) -> Result<Self> {
        Self::new(vec![family; dim], delta)
    }

    pub fn dim(&self) -> usize {
        self.families.len()
    }

    pub fn families(&self) -> &[CoefficientFamily] {
        &self.families
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `(2π)^{d/2} δ^d`.
    pub fn mass(&self) -> f64 {
        (self.delta * SQRT_2PI).powi(self.dim() as i32)
    }

    fn check_dim(&self, len: usize, what: &str) -> Result<()> {
        if len != self.dim() {
            return Err(domain(format!("{what} has {len} components, encoder has {} axes", self.dim())));
        }
        Ok(())
    }

    /// Per-axis one-dimensional tables, `N = 1..=n_max[i]`.
    pub fn axis_tables(&self, n_max: &[u64]) -> Result<Vec<IntegralTable>> {
        self.check_dim(n_max.len(), "N_max")?;
        self.families
            .iter()
            .zip(n_max)
            .map(|(&family, &n)| {
                let cfg = EncoderConfig::new(family, self.delta, crate::Mode::Discrete)?;
                build_table(&cfg, n)
            })
            .collect()
    }

    fn axis_sums(&self, n_max: &[u64]) -> Vec<Vec<f64>> {
        self.families.iter().zip(n_max).map(|(f, &n)| f.partial_sums(n)).collect()
    }
}

#[inline]
fn separable(mass: f64, sums: impl Iterator<Item = f64>) -> f64 {
    sums.fold(mass, |acc, s| acc * s)
}

/// `I(N⃗)` for separable coefficients. Any zero component gives 0.
pub fn integral_multi(cfg: &MultiEncoderConfig, index: &MultiIndex) -> Result<f64> {
    cfg.check_dim(index.dim(), "multi-index")?;
    Ok(separable(
        cfg.mass(),
        cfg.families.iter().zip(index.components()).map(|(f, &n)| f.partial_sum(n).value),
    ))
}

/// Every `(N⃗, I(N⃗))` with `1 ≤ N_i ≤ n_max[i]`, in lexicographic order.
pub fn integral_grid(cfg: &MultiEncoderConfig, n_max: &[u64]) -> Result<Vec<(MultiIndex, f64)>> {
    cfg.check_dim(n_max.len(), "N_max")?;
    let sums = cfg.axis_sums(n_max);
    let mass = cfg.mass();
    let mut out = Vec::new();
    for_each_index(n_max, |idx| {
        let v = separable(mass, idx.iter().zip(&sums).map(|(&k, s)| s[k as usize - 1]));
        out.push((MultiIndex(idx.to_vec()), v));
    });
    Ok(out)
}

/// Calls `visit` on every tuple in `1..=n_max[0] × …`, lexicographically.
fn for_each_index(n_max: &[u64], mut visit: impl FnMut(&[u64])) {
    if n_max.contains(&0) {
        return;
    }
    let mut idx = vec![1u64; n_max.len()];
    loop {
        visit(&idx);
        let mut axis = n_max.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if idx[axis] < n_max[axis] {
                idx[axis] += 1;
                break;
            }
            idx[axis] = 1;
        }
    }
}

/// Lexicographically smallest `k⃗` with `1 ≤ k_i ≤ n_max[i]` and `|I(k⃗)| < ε`.
///
/// Depth-first in lexicographic order. At each prefix the remaining axes
/// are bounded by the extreme `|S_i|` values: a subtree whose largest
/// possible value is below `ε` resolves to its first tuple, and one whose
/// smallest possible value is at least `ε` is skipped.
pub fn recover_multi(cfg: &MultiEncoderConfig, n_max: &[u64], epsilon: f64) -> Result<Option<MultiIndex>> {
    cfg.check_dim(n_max.len(), "N_max")?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("tolerance must be positive, got {epsilon}")));
    }
    if n_max.contains(&0) {
        return Ok(None);
    }
    let sums = cfg.axis_sums(n_max);
    let d = sums.len();
    let mut suffix_max = vec![1.0; d + 1];
    let mut suffix_min = vec![1.0; d + 1];
    for i in (0..d).rev() {
        let mags = sums[i].iter().map(|s| s.abs());
        suffix_max[i] = suffix_max[i + 1] * mags.clone().fold(0.0, f64::max);
        suffix_min[i] = suffix_min[i + 1] * mags.fold(f64::INFINITY, f64::min);
    }
    let search = Search { sums: &sums, suffix_max: &suffix_max, suffix_min: &suffix_min, epsilon, mass: cfg.mass() };
    let mut prefix = Vec::with_capacity(d);
    Ok(search.descend(&mut prefix, cfg.mass()).then_some(MultiIndex(prefix)))
}

struct Search<'a> {
    sums: &'a [Vec<f64>],
    suffix_max: &'a [f64],
    suffix_min: &'a [f64],
    epsilon: f64,
    mass: f64,
}

impl Search<'_> {
    // bounds are padded so rounding differences between the bound products
    // and the leaf product never prune a borderline subtree
    const SLACK: f64 = 1e-9;

    fn leaf_value(&self, idx: &[u64]) -> f64 {
        separable(self.mass, idx.iter().zip(self.sums).map(|(&k, s)| s[k as usize - 1]))
    }

    /// On success `prefix` holds the full minimal tuple.
    fn descend(&self, prefix: &mut Vec<u64>, partial: f64) -> bool {
        let depth = prefix.len();
        let d = self.sums.len();
        if depth == d {
            return self.leaf_value(prefix).abs() < self.epsilon;
        }
        let upper = partial.abs() * self.suffix_max[depth];
        if upper < self.epsilon * (1.0 - Self::SLACK) {
            prefix.resize(d, 1);
            if self.leaf_value(prefix).abs() < self.epsilon {
                return true;
            }
            prefix.truncate(depth);
        }
        let lower = partial.abs() * self.suffix_min[depth];
        if lower >= self.epsilon * (1.0 + Self::SLACK) {
            return false;
        }
        for (k, &s) in self.sums[depth].iter().enumerate() {
            prefix.push(k as u64 + 1);
            if self.descend(prefix, partial * s) {
                return true;
            }
            prefix.pop();
        }
        false
    }
}

/// Qualifying tuples not componentwise-dominated by another qualifying tuple.
/// Returned in lexicographic order.
pub fn pareto_minimal(cfg: &MultiEncoderConfig, n_max: &[u64], epsilon: f64) -> Result<Vec<MultiIndex>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("tolerance must be positive, got {epsilon}")));
    }
    let qualifying: Vec<MultiIndex> = integral_grid(cfg, n_max)?
        .into_iter()
        .filter(|(_, v)| v.abs() < epsilon)
        .map(|(idx, _)| idx)
        .collect();
    let mut front: Vec<MultiIndex> = Vec::new();
    for cand in qualifying {
        // lexicographic order visits any dominating tuple first
        if !front.iter().any(|f| f.dominated_by(&cand)) {
            front.push(cand);
        }
    }
    Ok(front)
}

/// Independent per-axis [`recover_match`]: axis `i` matches `targets[i]`
/// against `tables[i]`. `None` if any axis fails.
pub fn coordinatewise_recover(tables: &[IntegralTable], targets: &[f64], epsilon: f64) -> Result<Option<MultiIndex>> {
    if tables.len() != targets.len() {
        return Err(domain(format!("{} axis tables for {} targets", tables.len(), targets.len())));
    }
    if tables.is_empty() {
        return Err(domain("coordinate-wise recovery needs at least one axis"));
    }
    let mut out = Vec::with_capacity(tables.len());
    for (table, &target) in tables.iter().zip(targets) {
        match recover_match(table, target, epsilon)? {
            Some(r) => out.push(r.rounded()),
            None => return Ok(None),
        }
    }
    Ok(Some(MultiIndex(out)))
}
