//! Need distributions over the numbers 1..=99.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numeral::{NUMBER_MAX, NUMBER_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    /// Communicative-need distribution, pmf(n) proportional to n^-2.
    PowerLaw,
    /// Flat over the whole range.
    Uniform,
    /// All mass on one number; only used for sanity checks.
    Degenerate,
}

impl std::str::FromStr for DistKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "power" | "power_law" => Ok(DistKind::PowerLaw),
            "uniform" => Ok(DistKind::Uniform),
            other => Err(format!("unknown distribution {other:?}")),
        }
    }
}

/// A probability mass function over 1..=99 with its cumulative table.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedDistribution {
    kind: DistKind,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl NeedDistribution {
    pub fn new(kind: DistKind) -> Self {
        let weights: Vec<f64> = (NUMBER_MIN..=NUMBER_MAX)
            .map(|n| match kind {
                DistKind::PowerLaw => f64::from(n).powi(-2),
                DistKind::Uniform => 1.0,
                DistKind::Degenerate => {
                    panic!("construct degenerate distributions via NeedDistribution::degenerate")
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let pmf: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let cdf: Vec<f64> = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        debug_assert!((acc - 1.0).abs() < 1e-12);
        NeedDistribution { kind, pmf, cdf }
    }

    pub fn power_law() -> Self {
        Self::new(DistKind::PowerLaw)
    }

    pub fn uniform() -> Self {
        Self::new(DistKind::Uniform)
    }

    /// All mass on one number; a sanity-check distribution.
    pub fn degenerate(n: u32) -> Self {
        assert!((NUMBER_MIN..=NUMBER_MAX).contains(&n));
        let mut pmf = vec![0.0; (NUMBER_MAX - NUMBER_MIN + 1) as usize];
        pmf[(n - 1) as usize] = 1.0;
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        NeedDistribution {
            kind: DistKind::Degenerate,
            pmf,
            cdf,
        }
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn pmf(&self, n: u32) -> f64 {
        assert!((NUMBER_MIN..=NUMBER_MAX).contains(&n));
        self.pmf[(n - 1) as usize]
    }

    /// Inverse-CDF draw.
    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        let u: f64 = rng.random();
        let idx = self.cdf.partition_point(|&c| c <= u);
        (idx.min(self.pmf.len() - 1) as u32) + 1
    }
}
