//! Coefficient families `a_n` and their partial sums.
//!
//! The canonical family `a_n = ((1/2)^n + (−1)^n) / n` combines the series
//! `Σ (1/2)^n / n = ln 2` and `Σ (−1)^n / n = −ln 2`, so its partial sums
//! oscillate in sign and converge to zero. The `(−1)^n / n` part decays only
//! harmonically, so the useful remainder bound is the alternating-series one,
//! see [`CoefficientFamily::tail_bound`].
//!
//! Partial sums are plain left-to-right `f64` accumulation over `n = 1..=N`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Rule producing the coefficient sequence `a_n`, `n ≥ 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawFamily")]
pub enum CoefficientFamily {
    /// `((1/2)^n + (−1)^n) / n`
    #[default]
    Canonical,
    /// `(α^n + (−1)^n β) / n^γ` with `|α| < 1`, `γ ≥ 1`.
    Generalized { alpha: f64, beta: f64, gamma: f64 },
    /// `(e^{−n} + (−1)^n) / n^p` with `p ≥ 1`.
    ExpPoly { p: f64 },
    /// `cos(πn) · e^{−n} / n`
    Trig,
}

/// `S(N) = Σ_{n=1}^{N} a_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    pub n: u64,
    pub value: f64,
}

#[inline]
fn sign(n: u64) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl CoefficientFamily {
    pub fn generalized(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(domain("generalized family parameters must be finite"));
        }
        if alpha.abs() >= 1.0 {
            return Err(domain(format!("generalized family needs |alpha| < 1, got {alpha}")));
        }
        if gamma < 1.0 {
            return Err(domain(format!("generalized family needs gamma >= 1, got {gamma}")));
        }
        Ok(Self::Generalized { alpha, beta, gamma })
    }

    pub fn exp_poly(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(domain(format!("exp-poly family needs p >= 1, got {p}")));
        }
        Ok(Self::ExpPoly { p })
    }

    /// Re-checks parameter domains; used after deserialization.
    pub fn validate(self) -> Result<Self> {
        match self {
            Self::Generalized { alpha, beta, gamma } => Self::generalized(alpha, beta, gamma),
            Self::ExpPoly { p } => Self::exp_poly(p),
            other => Ok(other),
        }
    }

    /// `a_n` for `n ≥ 1`.
    pub fn coefficient(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(domain("coefficient index starts at 1"));
        }
        Ok(self.term(n))
    }

    /// `a_n` without the `n ≥ 1` check.
    pub(crate) fn term(&self, n: u64) -> f64 {
        let nf = n as f64;
        match *self {
            Self::Canonical => Self::generalized_term(0.5, 1.0, 1.0, n),
            Self::Generalized { alpha, beta, gamma } => Self::generalized_term(alpha, beta, gamma, n),
            Self::ExpPoly { p } => ((-nf).exp() + sign(n)) / nf.powf(p),
            // cos(πn) is exactly (−1)^n for integer n
            Self::Trig => sign(n) * (-nf).exp() / nf,
        }
    }

    fn generalized_term(alpha: f64, beta: f64, gamma: f64, n: u64) -> f64 {
        let nf = n as f64;
        let geometric = if n > i32::MAX as u64 {
            alpha.powf(nf)
        } else {
            alpha.powi(n as i32)
        };
        (geometric + sign(n) * beta) / nf.powf(gamma)
    }

    pub fn partial_sum(&self, n: u64) -> PartialSum {
        let value = (1..=n).fold(0.0, |acc, k| acc + self.term(k));
        PartialSum { n, value }
    }

    /// `[S(1), …, S(n_max)]`, accumulated in the same order as [`partial_sum`](Self::partial_sum).
    pub fn partial_sums(&self, n_max: u64) -> Vec<f64> {
        let mut acc = 0.0;
        (1..=n_max)
            .map(|k| {
                acc += self.term(k);
                acc
            })
            .collect()
    }

    /// Upper bound on `|Σ_{n>N} a_n|`.
    ///
    /// Canonical: `1/(N+1) + 2^{−N}`. Generalized: `|β|/(N+1)^γ + |α|^{N+1}/(1−|α|)`,
    /// which coincides with the canonical bound at `(1/2, 1, 1)`.
    pub fn tail_bound(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(domain("tail bound needs N >= 1"));
        }
        let next = (n + 1) as f64;
        match *self {
            Self::Canonical => Ok(1.0 / next + 0.5f64.powf(n as f64)),
            Self::Generalized { alpha, beta, gamma } => {
                let a = alpha.abs();
                Ok(beta.abs() / next.powf(gamma) + a.powf(next) / (1.0 - a))
            }
            Self::ExpPoly { .. } | Self::Trig => Err(Error::NotImplemented(format!(
                "tail bound for the {self} family"
            ))),
        }
    }

    /// Whether `sign(a_n) = (−1)^n` is guaranteed for every `n`.
    pub fn is_alternating(&self) -> bool {
        match *self {
            Self::Canonical | Self::Trig => true,
            Self::ExpPoly { .. } => true,
            Self::Generalized { alpha, beta, .. } => beta > alpha.abs(),
        }
    }
}

impl fmt::Display for CoefficientFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Canonical => write!(f, "canonical"),
            Self::Generalized { alpha, beta, gamma } => {
                write!(f, "generalized:{alpha},{beta},{gamma}")
            }
            Self::ExpPoly { p } => write!(f, "exp-poly:{p}"),
            Self::Trig => write!(f, "trig"),
        }
    }
}

impl FromStr for CoefficientFamily {
    type Err = Error;

    /// Accepts `canonical`, `trig`, `exp-poly:P` and `generalized:A,B,G`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name, Some(args)),
            None => (s, None),
        };
        let params = |expected: usize| -> Result<Vec<f64>> {
            let args = args.ok_or_else(|| domain(format!("family {name} needs {expected} parameter(s)")))?;
            let values = args
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| domain(format!("bad parameter {v:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if values.len() != expected {
                return Err(domain(format!("family {name} needs {expected} parameter(s)")));
            }
            Ok(values)
        };
        match name.trim().to_ascii_lowercase().as_str() {
            "canonical" if args.is_none() => Ok(Self::Canonical),
            "trig" if args.is_none() => Ok(Self::Trig),
            "exp-poly" | "exppoly" | "exp_poly" => Self::exp_poly(params(1)?[0]),
            "generalized" => {
                let v = params(3)?;
                Self::generalized(v[0], v[1], v[2])
            }
            _ => Err(domain(format!("unknown coefficient family {s:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawFamily {
    Canonical,
    Generalized { alpha: f64, beta: f64, gamma: f64 },
    ExpPoly { p: f64 },
    Trig,
}

impl TryFrom<RawFamily> for CoefficientFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        match raw {
            RawFamily::Canonical => Ok(Self::Canonical),
            RawFamily::Generalized { alpha, beta, gamma } => Self::generalized(alpha, beta, gamma),
            RawFamily::ExpPoly { p } => Self::exp_poly(p),
            RawFamily::Trig => Ok(Self::Trig),
        }
    }
}
