//! Simulation batches and their statistical comparison with exact laws.
//!
//! Trial `t` of a batch draws from stream `t` of the batch seed, so results
//! do not depend on how trials are spread over threads. Integer tallies merge
//! exactly; floating-point sums are reduced in block order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::growth::{grow, grow_tree_only, GrownTree, RngStream};
use crate::limits::{limit_moment, ml_density, scaling, LimitFamily, Quantity};
use crate::model::{DiscreteDistribution, Model, Provenance, SpNetwork};
use crate::quadrature::QuadratureConfig;
use crate::stats::{
    blue_subtree_order, count_paths, leftmost_path_length, random_path_length, red_subtree_order, sink_degree,
    source_degree, tree_leftmost_length_binary, tree_sink_degree_binary,
};
use crate::Distribution;

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Trials per parallel work unit.
const BLOCK: usize = 256;

/// Parameters recorded per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quantities {
    /// Source and sink degree.
    pub degree: bool,
    /// Leftmost path length.
    pub length: bool,
    /// Length of a uniformly random source-to-sink walk.
    pub random_length: bool,
    /// Number of source-to-sink paths.
    pub paths: bool,
}

impl Quantities {
    pub const ALL: Quantities = Quantities { degree: true, length: true, random_length: true, paths: true };

    fn needs_network(&self, model: Model) -> bool {
        self.paths || self.random_length || (self.degree && matches!(model, Model::Bernoulli { .. }))
    }
}

impl Default for Quantities {
    fn default() -> Self {
        Quantities { degree: true, length: true, random_length: false, paths: false }
    }
}

impl FromStr for Quantities {
    type Err = Error;

    /// Comma-separated subset of `deg`, `len`, `rlen`, `paths`.
    fn from_str(s: &str) -> Result<Quantities> {
        let mut q = Quantities { degree: false, length: false, random_length: false, paths: false };
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            match item {
                "deg" => q.degree = true,
                "len" => q.length = true,
                "rlen" => q.random_length = true,
                "paths" => q.paths = true,
                other => {
                    return Err(Error::InvalidArgument(format!("unknown quantity {other:?}; use deg,len,rlen,paths")))
                }
            }
        }
        Ok(q)
    }
}

impl fmt::Display for Quantities {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = [(self.degree, "deg"), (self.length, "len"), (self.random_length, "rlen"), (self.paths, "paths")];
        let list: Vec<&str> = names.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect();
        f.write_str(&list.join(","))
    }
}

/// Observed counts of an integer-valued parameter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalLaw {
    pub lo: u64,
    pub counts: Vec<u64>,
}

impl EmpiricalLaw {
    pub fn from_values(values: impl IntoIterator<Item = u64>) -> EmpiricalLaw {
        let mut law = EmpiricalLaw::default();
        for v in values {
            law.record(v);
        }
        law
    }

    pub fn record(&mut self, value: u64) {
        self.add(value, 1);
    }

    fn add(&mut self, value: u64, count: u64) {
        if self.counts.is_empty() {
            self.lo = value;
        }
        if value < self.lo {
            let shift = (self.lo - value) as usize;
            self.counts.splice(0..0, std::iter::repeat_n(0, shift));
            self.lo = value;
        }
        let i = (value - self.lo) as usize;
        if i >= self.counts.len() {
            self.counts.resize(i + 1, 0);
        }
        self.counts[i] += count;
    }

    pub fn merge(&mut self, other: &EmpiricalLaw) {
        for (v, &c) in other.iter() {
            if c > 0 {
                self.add(v, c);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &u64)> + '_ {
        self.counts.iter().enumerate().map(move |(i, c)| (self.lo + i as u64, c))
    }

    pub fn count(&self, value: u64) -> u64 {
        value.checked_sub(self.lo).and_then(|i| self.counts.get(i as usize)).copied().unwrap_or(0)
    }

    pub fn trials(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relative frequencies.
    pub fn to_distribution(&self) -> Result<Distribution> {
        let t = self.trials() as f64;
        DiscreteDistribution::new(self.lo, self.counts.iter().map(|&c| c as f64 / t).collect(), Provenance::Empirical)
    }

    /// `(1/T) sum_v c_v (v/scale)^r`.
    pub fn moment(&self, r: u32, scale: f64) -> f64 {
        let total: f64 = self.iter().map(|(v, &c)| c as f64 * (v as f64 / scale).powi(r as i32)).sum();
        total / self.trials() as f64
    }
}

/// Summary of `ln P_n` over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub log_mean: f64,
    pub log_variance: f64,
    /// `log2` of the largest observed count.
    pub max_log2: f64,
    /// Sample mean of `P_n`, present unless the batch is heavy-tailed.
    pub mean: Option<f64>,
    /// Set when `trials * max P_n` exceeds the `f64` range and the plain mean
    /// is not reported.
    pub heavy_tailed: bool,
}

/// Outcome of one simulation batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatchResult {
    pub schema_version: u32,
    pub model: Model,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub quantities: Quantities,
    pub source_degree: Option<EmpiricalLaw>,
    pub sink_degree: Option<EmpiricalLaw>,
    pub leftmost_length: Option<EmpiricalLaw>,
    pub random_length: Option<EmpiricalLaw>,
    pub paths: Option<PathStats>,
}

/// Raw and scaled moments of one parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    pub beta: f64,
    /// `E(X^r)` for `r = 0..=8`.
    pub raw: Vec<f64>,
    /// `E((X/n^β)^r)` for `r = 0..=4`.
    pub scaled: Vec<f64>,
    /// Standard errors of `scaled`.
    pub scaled_se: Vec<f64>,
}

impl TrialBatchResult {
    pub fn law(&self, quantity: Quantity) -> Option<&EmpiricalLaw> {
        match (self.model, quantity) {
            (Model::Bernoulli { .. }, Quantity::PoleDegree) => self.source_degree.as_ref(),
            (Model::Binary, Quantity::PoleDegree) => self.sink_degree.as_ref(),
            (_, Quantity::LeftmostLength) => self.leftmost_length.as_ref(),
        }
    }

    pub fn moments(&self, quantity: Quantity) -> Option<MomentSummary> {
        let law = self.law(quantity)?;
        let (beta, _) = scaling(self.model, quantity);
        let scale = (self.n as f64).powf(beta);
        let raw = (0..=8).map(|r| law.moment(r, 1.0)).collect();
        let scaled: Vec<f64> = (0..=4).map(|r| law.moment(r, scale)).collect();
        let t = law.trials() as f64;
        let scaled_se = (0..=4u32)
            .map(|r| {
                let second = law.moment(2 * r, scale);
                ((second - scaled[r as usize].powi(2)).max(0.0) / t).sqrt()
            })
            .collect();
        Some(MomentSummary { beta, raw, scaled, scaled_se })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<TrialBatchResult> {
        let r: TrialBatchResult = serde_json::from_str(text)?;
        if r.schema_version != RESULT_SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported result schema version {}", r.schema_version)));
        }
        Ok(r)
    }
}

/// Limits on a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialConfig {
    /// Largest `n * trials` for batches that build full networks.
    pub max_network_edges: u64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig { max_network_edges: 2_000_000_000 }
    }
}

#[derive(Default)]
struct Accumulator {
    source: EmpiricalLaw,
    sink: EmpiricalLaw,
    length: EmpiricalLaw,
    random: EmpiricalLaw,
    path_logs: Vec<f64>,
    path_sum: BigUint,
    path_max: BigUint,
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn record_network(acc: &mut Accumulator, q: Quantities, net: &SpNetwork, rng: &mut RngStream) {
    if q.degree {
        acc.source.record(source_degree(net) as u64);
        acc.sink.record(sink_degree(net) as u64);
    }
    if q.length {
        acc.length.record(leftmost_path_length(net) as u64);
    }
    if q.random_length {
        acc.random.record(random_path_length(net, rng) as u64);
    }
    if q.paths {
        let p = count_paths(net);
        acc.path_logs.push(ln_big(&p));
        if p > acc.path_max {
            acc.path_max = p.clone();
        }
        acc.path_sum += p;
    }
}

fn record_tree(acc: &mut Accumulator, q: Quantities, tree: &GrownTree) {
    match tree {
        GrownTree::Coloured(t) => {
            if q.degree {
                acc.source.record(blue_subtree_order(t) as u64);
            }
            if q.length {
                acc.length.record(red_subtree_order(t) as u64);
            }
        }
        GrownTree::Bucket(t) => {
            if q.degree {
                acc.source.record(if t.order() >= 2 { 2 } else { 1 });
                acc.sink.record(tree_sink_degree_binary(t) as u64);
            }
            if q.length {
                acc.length.record(tree_leftmost_length_binary(t) as u64);
            }
        }
    }
}

fn run_block(model: Model, n: usize, seed: u64, q: Quantities, range: std::ops::Range<usize>) -> Result<Accumulator> {
    let mut acc = Accumulator::default();
    for t in range {
        let mut rng = RngStream::new(seed, t as u64);
        if q.needs_network(model) {
            let grown = grow(model, n, &mut rng)?;
            record_network(&mut acc, q, &grown.network, &mut rng);
        } else {
            record_tree(&mut acc, q, &grow_tree_only(model, n, &mut rng)?);
        }
    }
    Ok(acc)
}

/// Runs `trials` independent growths with the default limits.
pub fn run_trials(
    model: Model,
    n: usize,
    trials: usize,
    seed: u64,
    quantities: Quantities,
) -> Result<TrialBatchResult> {
    run_trials_with(model, n, trials, seed, quantities, TrialConfig::default())
}

pub fn run_trials_with(
    model: Model,
    n: usize,
    trials: usize,
    seed: u64,
    quantities: Quantities,
    config: TrialConfig,
) -> Result<TrialBatchResult> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptySize);
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    if quantities.needs_network(model) {
        let work = n as u64 * trials as u64;
        if work > config.max_network_edges {
            let feasible = config.max_network_edges / n as u64;
            return Err(Error::ResourceCap { requested: trials, feasible: feasible as usize });
        }
    }
    let blocks: Vec<Accumulator> = (0..trials.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| run_block(model, n, seed, quantities, b * BLOCK..((b + 1) * BLOCK).min(trials)))
        .collect::<Result<_>>()?;

    let mut total = Accumulator::default();
    let mut logs = Vec::new();
    for b in blocks {
        total.source.merge(&b.source);
        total.sink.merge(&b.sink);
        total.length.merge(&b.length);
        total.random.merge(&b.random);
        logs.extend(b.path_logs);
        total.path_sum += b.path_sum;
        if b.path_max > total.path_max {
            total.path_max = b.path_max;
        }
    }
    let paths = quantities.paths.then(|| {
        let t = trials as f64;
        let log_mean = logs.iter().sum::<f64>() / t;
        let log_variance = logs.iter().map(|l| (l - log_mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
        let max_log2 = if total.path_max.is_zero() { 0.0 } else { ln_big(&total.path_max) / std::f64::consts::LN_2 };
        let heavy_tailed = max_log2 + t.log2() > 1000.0;
        let mean = (!heavy_tailed).then(|| total.path_sum.to_f64().unwrap() / t);
        PathStats { log_mean, log_variance, max_log2, mean, heavy_tailed }
    });
    let keep = |on: bool, law: EmpiricalLaw| on.then_some(law);
    Ok(TrialBatchResult {
        schema_version: RESULT_SCHEMA_VERSION,
        model,
        n,
        trials,
        seed,
        quantities,
        source_degree: keep(quantities.degree, total.source),
        sink_degree: keep(quantities.degree, total.sink),
        leftmost_length: keep(quantities.length, total.length),
        random_length: keep(quantities.random_length, total.random),
        paths,
    })
}

/// A chi-square test outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Pooled bins as `(first value, last value)`.
    pub bins: Vec<(u64, u64)>,
}

impl GofResult {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

fn chi_square_p(statistic: f64, dof: usize) -> f64 {
    if statistic.is_infinite() {
        return 0.0;
    }
    ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(statistic)
}

/// Pearson goodness of fit of observed counts against an exact law. Adjacent
/// values are pooled until each bin expects at least `min_expected`
/// observations; a short tail joins the last bin. Observations at values of
/// probability zero make the statistic infinite.
pub fn chi_square_gof(empirical: &EmpiricalLaw, exact: &Distribution, min_expected: f64) -> Result<GofResult> {
    let trials = empirical.trials() as f64;
    if trials == 0.0 {
        return Err(Error::TooFewBins(0));
    }
    let impossible = empirical.iter().any(|(v, &c)| c > 0 && exact.prob(v) == 0.0);
    let lo = exact.lo().min(empirical.lo);
    let hi = exact.hi().max(empirical.lo + empirical.counts.len().saturating_sub(1) as u64);
    let mut bins: Vec<(u64, u64, f64, f64)> = Vec::new();
    let (mut start, mut obs, mut exp) = (lo, 0.0, 0.0);
    for v in lo..=hi {
        obs += empirical.count(v) as f64;
        exp += exact.prob(v) * trials;
        if exp >= min_expected {
            bins.push((start, v, obs, exp));
            start = v + 1;
            obs = 0.0;
            exp = 0.0;
        }
    }
    if obs > 0.0 || exp > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.1 = hi;
                last.2 += obs;
                last.3 += exp;
            }
            None => bins.push((start, hi, obs, exp)),
        }
    }
    if bins.len() < 2 {
        return Err(Error::TooFewBins(bins.len()));
    }
    let statistic = if impossible { f64::INFINITY } else { bins.iter().map(|&(_, _, o, e)| (o - e).powi(2) / e).sum() };
    let dof = bins.len() - 1;
    Ok(GofResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof),
        bins: bins.iter().map(|b| (b.0, b.1)).collect(),
    })
}

/// Chi-square test that two samples share one law (a 2 x K table), pooling
/// adjacent values until both rows expect at least `min_expected`.
pub fn two_sample_chi_square(a: &EmpiricalLaw, b: &EmpiricalLaw, min_expected: f64) -> Result<GofResult> {
    let (na, nb) = (a.trials() as f64, b.trials() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::TooFewBins(0));
    }
    let top = |l: &EmpiricalLaw| l.lo + l.counts.len().saturating_sub(1) as u64;
    let lo = a.lo.min(b.lo);
    let hi = top(a).max(top(b));
    let share_a = na / (na + nb);
    let mut bins: Vec<(u64, u64, f64, f64)> = Vec::new();
    let (mut start, mut oa, mut ob) = (lo, 0.0, 0.0);
    for v in lo..=hi {
        oa += a.count(v) as f64;
        ob += b.count(v) as f64;
        let pooled = oa + ob;
        if pooled * share_a.min(1.0 - share_a) >= min_expected {
            bins.push((start, v, oa, ob));
            start = v + 1;
            oa = 0.0;
            ob = 0.0;
        }
    }
    if oa + ob > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.1 = hi;
                last.2 += oa;
                last.3 += ob;
            }
            None => bins.push((start, hi, oa, ob)),
        }
    }
    if bins.len() < 2 {
        return Err(Error::TooFewBins(bins.len()));
    }
    let statistic: f64 = bins
        .iter()
        .map(|&(_, _, oa, ob)| {
            let pooled = oa + ob;
            let (ea, eb) = (pooled * share_a, pooled * (1.0 - share_a));
            (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb
        })
        .sum();
    let dof = bins.len() - 1;
    Ok(GofResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof),
        bins: bins.iter().map(|b| (b.0, b.1)).collect(),
    })
}

/// Two-sample test of the random-walk length against the leftmost length.
///
/// The samples are independent: trial `t` takes its leftmost length from a
/// network grown on stream `2t` and its random-walk length from a separate
/// network grown on stream `2t + 1`. With `n = 1` both laws are the point
/// mass at 1 and the test passes trivially.
pub fn path_law_equality_test(model: Model, n: usize, trials: usize, seed: u64) -> Result<GofResult> {
    model.validate()?;
    if n == 0 {
        return Err(Error::EmptySize);
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is needed".into()));
    }
    let pairs: Vec<(EmpiricalLaw, EmpiricalLaw)> = (0..trials.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| -> Result<(EmpiricalLaw, EmpiricalLaw)> {
            let (mut left, mut random) = (EmpiricalLaw::default(), EmpiricalLaw::default());
            for t in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                let mut rng = RngStream::new(seed, 2 * t as u64);
                left.record(leftmost_path_length(&grow(model, n, &mut rng)?.network) as u64);
                let mut rng = RngStream::new(seed, 2 * t as u64 + 1);
                let net = grow(model, n, &mut rng)?.network;
                random.record(random_path_length(&net, &mut rng) as u64);
            }
            Ok((left, random))
        })
        .collect::<Result<_>>()?;
    let (mut left, mut random) = (EmpiricalLaw::default(), EmpiricalLaw::default());
    for (l, r) in &pairs {
        left.merge(l);
        random.merge(r);
    }
    if left.counts.len() == 1 && left == random {
        return Ok(GofResult { statistic: 0.0, dof: 0, p_value: 1.0, bins: vec![(left.lo, left.lo)] });
    }
    two_sample_chi_square(&left, &random, 5.0)
}

/// One row of [`ScaledLimitReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub r: u32,
    pub empirical: f64,
    pub standard_error: f64,
    pub limit: f64,
    pub relative_gap: f64,
}

/// Empirical scaled moments set against the limit law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledLimitReport {
    pub family: LimitFamily,
    pub beta: f64,
    pub rows: Vec<MomentRow>,
    /// `x,empirical_density,limit_density` rows; the limit column is empty
    /// for families without a density routine.
    pub overlay_csv: String,
}

/// Compares `X_n / n^β` with its limit for `r <= 4`.
pub fn compare_scaled_limit(result: &TrialBatchResult, quantity: Quantity) -> Result<ScaledLimitReport> {
    let law =
        result.law(quantity).ok_or_else(|| Error::InvalidArgument("the batch did not record this quantity".into()))?;
    let summary = result.moments(quantity).expect("law present");
    let (beta, family) = scaling(result.model, quantity);
    let mut rows = Vec::new();
    for r in 0..=4u32 {
        let limit = limit_moment(family, r)?;
        let empirical = if r == 0 { 1.0 } else { summary.scaled[r as usize] };
        rows.push(MomentRow {
            r,
            empirical,
            standard_error: summary.scaled_se[r as usize],
            limit,
            relative_gap: (empirical - limit).abs() / limit,
        });
    }
    Ok(ScaledLimitReport { family, beta, rows, overlay_csv: overlay(law, result.n, beta, family)? })
}

fn overlay(law: &EmpiricalLaw, n: usize, beta: f64, family: LimitFamily) -> Result<String> {
    let scale = (n as f64).powf(beta);
    let trials = law.trials() as f64;
    // Histogram on 40 equal bins in scaled units.
    let top = (law.lo + law.counts.len() as u64) as f64 / scale;
    let width = top / 40.0;
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    for (v, &c) in law.iter() {
        let bin = ((v as f64 / scale) / width).floor() as usize;
        *hist.entry(bin.min(39)).or_insert(0) += c;
    }
    let mut out = String::from("x,empirical_density,limit_density\n");
    for bin in 0..40 {
        let x = (bin as f64 + 0.5) * width;
        let emp = *hist.get(&bin).unwrap_or(&0) as f64 / (trials * width);
        let lim = match family {
            LimitFamily::MittagLeffler { p } => {
                ml_density(x, p, QuadratureConfig::default()).map(|e| e.value.to_string()).unwrap_or_default()
            }
            _ => String::new(),
        };
        out.push_str(&format!("{x},{emp},{lim}\n"));
    }
    Ok(out)
}

/// Draws `count` values from an exact law by inversion.
pub fn sample_exact(law: &Distribution, count: usize, rng: &mut RngStream) -> EmpiricalLaw {
    let mut cdf = Vec::with_capacity(law.probabilities().len());
    let mut acc = 0.0;
    for &p in law.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let mut out = EmpiricalLaw::default();
    for _ in 0..count {
        let u = rng.unit_f64() * acc;
        let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        out.record(law.lo() + i as u64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantity_lists() {
        let q: Quantities = "deg,paths".parse().unwrap();
        assert!(q.degree && q.paths && !q.length && !q.random_length);
        assert_eq!(q.to_string(), "deg,paths");
        assert!("deg,width".parse::<Quantities>().is_err());
    }

    #[test]
    fn empirical_law_grows_both_ways() {
        let law = EmpiricalLaw::from_values([5, 3, 5, 7]);
        assert_eq!((law.lo, law.counts.clone()), (3, vec![1, 0, 2, 0, 1]));
        assert_eq!(law.trials(), 4);
        assert_eq!(law.moment(1, 1.0), 5.0);
        let mut a = EmpiricalLaw::from_values([10]);
        a.merge(&law);
        assert_eq!(a.trials(), 5);
        assert_eq!(a.count(10), 1);
    }

    #[test]
    fn size_one_is_degenerate() {
        for model in [Model::bernoulli(0.5).unwrap(), Model::Binary] {
            let r = run_trials(model, 1, 10, 1, Quantities::ALL).unwrap();
            for law in [&r.source_degree, &r.sink_degree, &r.leftmost_length, &r.random_length] {
                assert_eq!(law.as_ref().unwrap(), &EmpiricalLaw { lo: 1, counts: vec![10] });
            }
            assert_eq!(r.paths.as_ref().unwrap().mean, Some(1.0));
        }
    }

    #[test]
    fn tree_and_network_routes_agree() {
        for model in [Model::bernoulli(0.3).unwrap(), Model::Binary] {
            let tree = run_trials(model, 25, 300, 9, Quantities { degree: false, ..Quantities::default() }).unwrap();
            let net = run_trials(model, 25, 300, 9, Quantities { paths: true, ..Quantities::default() }).unwrap();
            assert_eq!(tree.leftmost_length, net.leftmost_length);
            if model == Model::Binary {
                let tree = run_trials(model, 25, 300, 9, Quantities::default()).unwrap();
                assert_eq!(tree.sink_degree, net.sink_degree);
                assert_eq!(tree.source_degree, net.source_degree);
            }
        }
    }

    #[test]
    fn gof_edge_cases() {
        let exact = DiscreteDistribution::new(1, vec![0.25, 0.5, 0.25], Provenance::ClosedForm).unwrap();
        let matching = EmpiricalLaw { lo: 1, counts: vec![250, 500, 250] };
        let r = chi_square_gof(&matching, &exact, 5.0).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        assert_eq!(r.dof, 2);

        let point = DiscreteDistribution::new(2, vec![1.0], Provenance::ClosedForm).unwrap();
        let uniform = EmpiricalLaw { lo: 1, counts: vec![100, 100, 100] };
        let r = chi_square_gof(&uniform, &point, 5.0);
        // A point mass pools into one bin.
        assert!(matches!(r, Err(Error::TooFewBins(1))));
        let spread = DiscreteDistribution::new(1, vec![0.0, 0.999, 0.001], Provenance::ClosedForm).unwrap();
        assert!(chi_square_gof(&uniform, &spread, 0.1).unwrap().p_value < 1e-10);
    }

    #[test]
    fn two_sample_identical() {
        let a = EmpiricalLaw { lo: 1, counts: vec![30, 40, 30] };
        let r = two_sample_chi_square(&a, &a, 5.0).unwrap();
        assert_eq!(r.statistic, 0.0);
        let b = EmpiricalLaw { lo: 1, counts: vec![90, 5, 5] };
        assert!(two_sample_chi_square(&a, &b, 5.0).unwrap().p_value < 1e-10);
    }

    #[test]
    fn path_law_size_one() {
        let r = path_law_equality_test(Model::Binary, 1, 50, 3).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn resource_cap() {
        let config = TrialConfig { max_network_edges: 1000 };
        let err = run_trials_with(Model::Binary, 100, 50, 0, Quantities::ALL, config).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { requested: 50, feasible: 10 }));
    }
}
