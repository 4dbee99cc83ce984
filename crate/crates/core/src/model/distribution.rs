use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How a distribution was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    DynamicProgram,
    SeriesExtraction,
    Oracle,
    Empirical,
}

impl Provenance {
    /// Allowed deviation of the total mass from one.
    pub fn mass_tolerance(self) -> f64 {
        match self {
            Provenance::Empirical => 1e-9,
            _ => 1e-12,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::DynamicProgram => "dynamic-program",
            Provenance::SeriesExtraction => "series-extraction",
            Provenance::Oracle => "oracle",
            Provenance::Empirical => "empirical",
        };
        f.write_str(name)
    }
}

/// Entries this far below zero are treated as round-off and clamped.
pub const NEGATIVE_CLAMP: f64 = 1e-15;

/// Probability vector on the contiguous integer support `lo..=hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<T = f64> {
    lo: u64,
    probabilities: Vec<T>,
    provenance: Provenance,
    clamped: usize,
}

impl<T: Scalar> DiscreteDistribution<T> {
    /// Validates mass and sign; tiny negative entries are clamped to zero.
    pub fn new(lo: u64, mut probabilities: Vec<T>, provenance: Provenance) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let mut clamped = 0;
        for (offset, value) in probabilities.iter_mut().enumerate() {
            if value.is_negative() {
                if value.to_f64() < -NEGATIVE_CLAMP {
                    return Err(Error::InvalidDistribution(format!(
                        "probability at {} is {:e}",
                        lo + offset as u64,
                        value.to_f64()
                    )));
                }
                *value = T::zero();
                clamped += 1;
            }
        }
        let total = probabilities.iter().fold(T::zero(), |acc, v| acc + v.clone());
        let excess = (total - T::one()).abs().to_f64();
        if excess > provenance.mass_tolerance() {
            return Err(Error::InvalidDistribution(format!("total mass deviates from 1 by {excess:e} ({provenance})")));
        }
        Ok(DiscreteDistribution { lo, probabilities, provenance, clamped })
    }

    /// Point mass at `value`.
    pub fn point(value: u64, provenance: Provenance) -> Self {
        DiscreteDistribution { lo: value, probabilities: vec![T::one()], provenance, clamped: 0 }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.probabilities.len() as u64 - 1
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Number of entries that were clamped from tiny negative values.
    pub fn clamped_entries(&self) -> usize {
        self.clamped
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    /// `P{X = value}`, zero outside the support.
    pub fn prob(&self, value: u64) -> T {
        if value < self.lo || value > self.hi() {
            T::zero()
        } else {
            self.probabilities[(value - self.lo) as usize].clone()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &T)> + '_ {
        self.probabilities.iter().enumerate().map(move |(i, p)| (self.lo + i as u64, p))
    }

    /// Raw moment `E(X^r)`.
    pub fn moment(&self, r: u32) -> T {
        self.iter().fold(T::zero(), |acc, (m, p)| {
            let mut power = T::one();
            let base = T::from_u64(m);
            for _ in 0..r {
                power = power * base.clone();
            }
            acc + power * p.clone()
        })
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    /// Falling factorial moment `E(X (X-1) ... (X-r+1))`.
    pub fn factorial_moment(&self, r: u32) -> T {
        self.iter().fold(T::zero(), |acc, (m, p)| {
            let mut falling = T::one();
            for i in 0..u64::from(r) {
                falling = falling * (T::from_u64(m) - T::from_u64(i));
            }
            acc + falling * p.clone()
        })
    }

    pub fn to_f64(&self) -> DiscreteDistribution<f64> {
        DiscreteDistribution {
            lo: self.lo,
            probabilities: self.probabilities.iter().map(Scalar::to_f64).collect(),
            provenance: self.provenance,
            clamped: self.clamped,
        }
    }

    /// Largest pointwise difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &DiscreteDistribution<T>) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi).map(|m| (self.prob(m) - other.prob(m)).abs().to_f64()).fold(0.0, f64::max)
    }

    /// Same law after dropping zero tails from both ends.
    pub fn trimmed(&self) -> Self {
        let first = self.probabilities.iter().position(|p| !p.is_zero());
        let last = self.probabilities.iter().rposition(|p| !p.is_zero());
        match (first, last) {
            (Some(a), Some(b)) => DiscreteDistribution {
                lo: self.lo + a as u64,
                probabilities: self.probabilities[a..=b].to_vec(),
                provenance: self.provenance,
                clamped: self.clamped,
            },
            _ => self.clone(),
        }
    }

    /// Exact equality of the laws, ignoring provenance and zero padding.
    pub fn same_law(&self, other: &DiscreteDistribution<T>) -> bool {
        let a = self.trimmed();
        let b = other.trimmed();
        a.lo == b.lo && a.probabilities == b.probabilities
    }
}
