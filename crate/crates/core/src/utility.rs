//! Scalarisation functions mapping a payoff vector to a scalar utility.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, PROB_SUM_TOL};

/// The closed family of supported utility functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum UtilityKind {
    /// Weighted sum with weights on the probability simplex.
    Linear { weights: Vec<f64> },
    /// `sum_k weights[k] * p[k]^exponents[k]`.
    PolySum { weights: Vec<f64>, exponents: Vec<u32> },
    /// Product of all components.
    Product,
    /// `reward` once `p[objective]` reaches `threshold`, zero below.
    Threshold { objective: usize, threshold: f64, reward: f64 },
}

/// A utility function plus the optional guard that clips it to zero as soon
/// as any payoff component is negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUtility", into = "RawUtility")]
pub struct UtilitySpec {
    kind: UtilityKind,
    nonneg_guard: bool,
}

#[derive(Serialize, Deserialize)]
struct RawUtility {
    #[serde(flatten)]
    kind: UtilityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nonneg_guard: Option<bool>,
}

impl TryFrom<RawUtility> for UtilitySpec {
    type Error = Error;

    fn try_from(raw: RawUtility) -> Result<Self> {
        let guard = raw.nonneg_guard.unwrap_or_else(|| default_guard(&raw.kind));
        UtilitySpec::new(raw.kind, guard)
    }
}

impl From<UtilitySpec> for RawUtility {
    fn from(u: UtilitySpec) -> RawUtility {
        RawUtility {
            kind: u.kind,
            nonneg_guard: Some(u.nonneg_guard),
        }
    }
}

fn default_guard(kind: &UtilityKind) -> bool {
    matches!(kind, UtilityKind::PolySum { .. } | UtilityKind::Product)
}

impl UtilitySpec {
    pub fn new(kind: UtilityKind, nonneg_guard: bool) -> Result<Self> {
        match &kind {
            UtilityKind::Linear { weights } => {
                if weights.is_empty() {
                    return Err(Error::InvalidUtility("linear weights are empty".into()));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::InvalidUtility("linear weights must be non-negative".into()));
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > PROB_SUM_TOL {
                    return Err(Error::InvalidUtility(format!("linear weights sum to {sum}, not 1")));
                }
            }
            UtilityKind::PolySum { weights, exponents } => {
                if weights.is_empty() || weights.len() != exponents.len() {
                    return Err(Error::InvalidUtility(
                        "polysum needs equally many weights and exponents".into(),
                    ));
                }
                if weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidUtility("polysum weights must be finite".into()));
                }
                if exponents.contains(&0) {
                    return Err(Error::InvalidUtility("polysum exponents must be positive".into()));
                }
            }
            UtilityKind::Product => {}
            UtilityKind::Threshold { threshold, reward, .. } => {
                if !threshold.is_finite() || !reward.is_finite() {
                    return Err(Error::InvalidUtility("threshold parameters must be finite".into()));
                }
            }
        }
        Ok(UtilitySpec { kind, nonneg_guard })
    }

    pub fn linear(weights: Vec<f64>) -> Result<Self> {
        UtilitySpec::new(UtilityKind::Linear { weights }, false)
    }

    pub fn poly_sum(weights: Vec<f64>, exponents: Vec<u32>) -> Result<Self> {
        UtilitySpec::new(UtilityKind::PolySum { weights, exponents }, true)
    }

    pub fn product() -> Self {
        UtilitySpec {
            kind: UtilityKind::Product,
            nonneg_guard: true,
        }
    }

    pub fn threshold(objective: usize, threshold: f64, reward: f64) -> Result<Self> {
        UtilitySpec::new(
            UtilityKind::Threshold {
                objective,
                threshold,
                reward,
            },
            false,
        )
    }

    /// The identity on scalar payoffs, `Linear([1])`.
    pub fn identity() -> Self {
        UtilitySpec {
            kind: UtilityKind::Linear { weights: vec![1.0] },
            nonneg_guard: false,
        }
    }

    pub fn with_guard(mut self, nonneg_guard: bool) -> Self {
        self.nonneg_guard = nonneg_guard;
        self
    }

    pub fn kind(&self) -> &UtilityKind {
        &self.kind
    }

    pub fn nonneg_guard(&self) -> bool {
        self.nonneg_guard
    }

    pub fn is_differentiable(&self) -> bool {
        !matches!(self.kind, UtilityKind::Threshold { .. })
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        let expected = match &self.kind {
            UtilityKind::Linear { weights } => weights.len(),
            UtilityKind::PolySum { weights, .. } => weights.len(),
            UtilityKind::Product => return non_empty(p),
            UtilityKind::Threshold { objective, .. } => {
                if *objective < p.len() {
                    return Ok(());
                }
                objective + 1
            }
        };
        if p.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: p.len(),
            });
        }
        Ok(())
    }

    fn clipped(&self, p: &[f64]) -> bool {
        self.nonneg_guard && p.iter().any(|&x| x < 0.0)
    }

    /// Scalar utility of the payoff vector `p`.
    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.check_dim(p)?;
        Ok(self.eval_unchecked(p))
    }

    /// Like [`eval`](Self::eval) without the dimension check; for hot loops
    /// whose inputs were validated once.
    pub(crate) fn eval_unchecked(&self, p: &[f64]) -> f64 {
        if self.clipped(p) {
            return 0.0;
        }
        match &self.kind {
            UtilityKind::Linear { weights } => weights.iter().zip(p).map(|(w, x)| w * x).sum(),
            UtilityKind::PolySum { weights, exponents } => weights
                .iter()
                .zip(exponents)
                .zip(p)
                .map(|((w, &e), x)| w * x.powi(e as i32))
                .sum(),
            UtilityKind::Product => p.iter().product(),
            UtilityKind::Threshold {
                objective,
                threshold,
                reward,
            } => {
                if p[*objective] >= *threshold {
                    *reward
                } else {
                    0.0
                }
            }
        }
    }

    /// Analytic gradient at `p`; zero on the guard-clipped region.
    pub fn grad(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        if !self.is_differentiable() {
            return Err(Error::NonDifferentiable("threshold"));
        }
        let mut out = vec![0.0; p.len()];
        self.grad_into(p, &mut out);
        Ok(out)
    }

    pub(crate) fn grad_into(&self, p: &[f64], out: &mut [f64]) {
        if self.clipped(p) {
            out.iter_mut().for_each(|g| *g = 0.0);
            return;
        }
        match &self.kind {
            UtilityKind::Linear { weights } => out.copy_from_slice(weights),
            UtilityKind::PolySum { weights, exponents } => {
                for (k, g) in out.iter_mut().enumerate() {
                    let e = exponents[k];
                    *g = weights[k] * e as f64 * p[k].powi(e as i32 - 1);
                }
            }
            UtilityKind::Product => {
                for (k, g) in out.iter_mut().enumerate() {
                    *g = p
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, x)| x)
                        .product();
                }
            }
            UtilityKind::Threshold { .. } => out.iter_mut().for_each(|g| *g = 0.0),
        }
    }
}

fn non_empty(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        Err(Error::DimensionMismatch { expected: 1, actual: 0 })
    } else {
        Ok(())
    }
}
