//! Exhaustive enumeration of growth histories at small sizes.
//!
//! Every sequence of edge choices (and, for the Bernoulli rule, doubling
//! types) is replayed depth-first on one network that is grown and shrunk in
//! place. Leaves are tallied by their parameters and their number of
//! parallel steps; weights are attached only when the table is assembled, so
//! the traversal does integer arithmetic only.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiscreteDistribution, Doubling, ModelKind, Provenance, SpNetwork, Step};
use crate::scalar::parse_rational;
use crate::stats::{count_paths_u64, leftmost_path_length, sink_degree, source_degree};
use crate::ExactDistribution;

/// The four parameters recorded per history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JointKey {
    pub source_degree: usize,
    pub sink_degree: usize,
    pub leftmost_length: usize,
    pub path_count: u64,
}

impl JointKey {
    pub fn of(net: &SpNetwork) -> JointKey {
        JointKey {
            source_degree: source_degree(net),
            sink_degree: sink_degree(net),
            leftmost_length: leftmost_path_length(net),
            path_count: count_paths_u64(net).expect("path counts of enumerable sizes fit in u64"),
        }
    }

    pub fn get(&self, which: Parameter) -> u64 {
        match which {
            Parameter::SourceDegree => self.source_degree as u64,
            Parameter::SinkDegree => self.sink_degree as u64,
            Parameter::LeftmostLength => self.leftmost_length as u64,
            Parameter::PathCount => self.path_count,
        }
    }
}

/// One coordinate of a [`JointKey`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    SourceDegree,
    SinkDegree,
    LeftmostLength,
    PathCount,
}

/// Largest sizes enumerated without an explicit override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub bernoulli_cap: usize,
    pub binary_cap: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { bernoulli_cap: 8, binary_cap: 9 }
    }
}

/// Exact joint law of the four parameters at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistributionTable {
    pub model: ModelKind,
    pub n: usize,
    /// Parallel-doubling probability; `None` for the binary rule.
    pub p: Option<BigRational>,
    /// Number of histories visited.
    pub histories: u64,
    pub entries: BTreeMap<JointKey, BigRational>,
}

/// Number of histories of size `n`: `(n-1)!`, times `2^{n-1}` for Bernoulli.
pub fn history_count(model: ModelKind, n: usize) -> BigUint {
    let fact: BigUint = (1..n).map(BigUint::from).product();
    match model {
        ModelKind::Bernoulli => fact << (n.saturating_sub(1)),
        ModelKind::Binary => fact,
    }
}

/// Calls `visit` with every history of size `n` and its replayed network.
pub fn for_each_history(model: ModelKind, n: usize, mut visit: impl FnMut(&[Step], &SpNetwork)) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySize);
    }
    let mut net = SpNetwork::single_edge(model == ModelKind::Binary);
    let mut steps = Vec::with_capacity(n - 1);
    descend(model, n, &mut net, &mut steps, &mut visit);
    Ok(())
}

fn choices(model: ModelKind, net: &SpNetwork) -> Vec<Step> {
    let m = net.size() as u32;
    (1..=m)
        .flat_map(|edge| match model {
            ModelKind::Bernoulli => vec![Step::parallel(edge), Step::serial(edge)],
            ModelKind::Binary => vec![Step { edge, doubling: net.forced_doubling(edge) }],
        })
        .collect()
}

fn descend(
    model: ModelKind,
    n: usize,
    net: &mut SpNetwork,
    steps: &mut Vec<Step>,
    visit: &mut impl FnMut(&[Step], &SpNetwork),
) {
    if net.size() == n {
        visit(steps, net);
        return;
    }
    for step in choices(model, net) {
        net.push_step(step);
        steps.push(step);
        descend(model, n, net, steps, visit);
        steps.pop();
        net.pop_step(step);
    }
}

/// Leaf tallies keyed by parameters and number of parallel steps.
type Tally = BTreeMap<(JointKey, usize), u64>;

fn merge(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Prefixes of length `depth` covering all histories.
fn prefixes(model: ModelKind, depth: usize) -> Vec<Vec<Step>> {
    let mut out = Vec::new();
    let mut net = SpNetwork::single_edge(model == ModelKind::Binary);
    let mut steps = Vec::new();
    descend(model, depth + 1, &mut net, &mut steps, &mut |s: &[Step], _: &SpNetwork| out.push(s.to_vec()));
    out
}

fn tally(model: ModelKind, n: usize) -> Tally {
    let depth = (n - 1).min(3);
    prefixes(model, depth)
        .into_par_iter()
        .map(|prefix| {
            let mut net = SpNetwork::single_edge(model == ModelKind::Binary);
            for &s in &prefix {
                net.push_step(s);
            }
            let mut steps = prefix;
            let mut local = Tally::new();
            descend(model, n, &mut net, &mut steps, &mut |s: &[Step], net: &SpNetwork| {
                let parallel = s.iter().filter(|st| st.doubling == Doubling::Parallel).count();
                *local.entry((JointKey::of(net), parallel)).or_insert(0) += 1;
            });
            local
        })
        .reduce(Tally::new, merge)
}

/// Enumerates all histories of size `n` under the default caps.
pub fn enumerate(model: ModelKind, n: usize, p: Option<&BigRational>) -> Result<JointDistributionTable> {
    enumerate_with(model, n, p, OracleConfig::default())
}

pub fn enumerate_with(
    model: ModelKind,
    n: usize,
    p: Option<&BigRational>,
    config: OracleConfig,
) -> Result<JointDistributionTable> {
    if n == 0 {
        return Err(Error::EmptySize);
    }
    let (cap, name) = match model {
        ModelKind::Bernoulli => (config.bernoulli_cap, "bernoulli"),
        ModelKind::Binary => (config.binary_cap, "binary"),
    };
    if n > cap {
        return Err(Error::EnumerationCap { model: name, n, cap, histories: history_count(model, n).to_string() });
    }
    let p = match (model, p) {
        (ModelKind::Bernoulli, Some(p)) => {
            if !(p > &BigRational::zero() && p < &BigRational::one()) {
                return Err(Error::InvalidProbability(p.to_f64().unwrap_or(f64::NAN)));
            }
            Some(p.clone())
        }
        (ModelKind::Bernoulli, None) => {
            return Err(Error::InvalidArgument("the Bernoulli oracle needs a rational p".into()));
        }
        (ModelKind::Binary, _) => None,
    };

    let tallies = tally(model, n);
    let fact: BigInt = (1..n).map(BigInt::from).product();
    let mut entries: BTreeMap<JointKey, BigRational> = BTreeMap::new();
    let mut histories = 0u64;
    for ((key, parallel), count) in tallies {
        histories += count;
        let mut weight = BigRational::new(BigInt::from(count), fact.clone());
        if let Some(p) = &p {
            let q = BigRational::one() - p;
            weight *= num_traits::pow(p.clone(), parallel) * num_traits::pow(q, n - 1 - parallel);
        }
        let slot = entries.entry(key).or_insert_with(BigRational::zero);
        *slot += weight;
    }
    debug_assert_eq!(BigUint::from(histories), history_count(model, n));
    Ok(JointDistributionTable { model, n, p, histories, entries })
}

impl JointDistributionTable {
    /// Sum of all probabilities; exactly one for a complete table.
    pub fn total(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn marginal(&self, which: Parameter) -> ExactDistribution {
        let mut by_value: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (key, prob) in &self.entries {
            *by_value.entry(key.get(which)).or_insert_with(BigRational::zero) += prob;
        }
        let lo = *by_value.keys().next().expect("table is not empty");
        let hi = *by_value.keys().next_back().unwrap();
        let probs = (lo..=hi).map(|v| by_value.remove(&v).unwrap_or_else(BigRational::zero)).collect();
        DiscreteDistribution::new(lo, probs, Provenance::Oracle).expect("oracle marginals are valid")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TableFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<JointDistributionTable> {
        let file: TableFile = serde_json::from_str(text)?;
        if file.schema_version != TABLE_SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported table schema version {}", file.schema_version)));
        }
        let p = file.p.as_deref().map(rational).transpose()?;
        let mut entries = BTreeMap::new();
        for e in file.entries {
            let key = JointKey {
                source_degree: e.source_degree,
                sink_degree: e.sink_degree,
                leftmost_length: e.leftmost_length,
                path_count: e.path_count,
            };
            entries.insert(key, rational(&e.probability)?);
        }
        Ok(JointDistributionTable { model: file.model, n: file.n, p, histories: file.histories, entries })
    }
}

pub const TABLE_SCHEMA_VERSION: u32 = 1;

/// On-disk layout; probabilities are exact `"a/b"` strings.
#[derive(Serialize, Deserialize)]
struct TableFile {
    schema_version: u32,
    model: ModelKind,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    histories: u64,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    source_degree: usize,
    sink_degree: usize,
    leftmost_length: usize,
    path_count: u64,
    probability: String,
}

fn rational(text: &str) -> Result<BigRational> {
    parse_rational(text).ok_or_else(|| Error::Format(format!("not a rational number: {text:?}")))
}

fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl From<&JointDistributionTable> for TableFile {
    fn from(t: &JointDistributionTable) -> Self {
        TableFile {
            schema_version: TABLE_SCHEMA_VERSION,
            model: t.model,
            n: t.n,
            p: t.p.as_ref().map(rational_string),
            histories: t.histories,
            entries: t
                .entries
                .iter()
                .map(|(k, v)| EntryFile {
                    source_degree: k.source_degree,
                    sink_degree: k.sink_degree,
                    leftmost_length: k.leftmost_length,
                    path_count: k.path_count,
                    probability: rational_string(v),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn key(s: usize, t: usize, l: usize, p: u64) -> JointKey {
        JointKey { source_degree: s, sink_degree: t, leftmost_length: l, path_count: p }
    }

    #[test]
    fn size_one() {
        for (model, p) in [(ModelKind::Bernoulli, Some(q("1/3"))), (ModelKind::Binary, None)] {
            let t = enumerate(model, 1, p.as_ref()).unwrap();
            assert_eq!(t.entries.len(), 1);
            assert_eq!(t.entries[&key(1, 1, 1, 1)], q("1"));
        }
    }

    #[test]
    fn bernoulli_size_two() {
        let t = enumerate(ModelKind::Bernoulli, 2, Some(&q("1/2"))).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.entries[&key(2, 2, 1, 2)], q("1/2"));
        assert_eq!(t.entries[&key(1, 1, 2, 1)], q("1/2"));
        let t = enumerate(ModelKind::Bernoulli, 2, Some(&q("1/3"))).unwrap();
        let m = t.marginal(Parameter::SourceDegree);
        assert_eq!((m.lo(), m.probabilities()), (1, &[q("2/3"), q("1/3")][..]));
    }

    #[test]
    fn binary_size_three() {
        let t = enumerate(ModelKind::Binary, 3, None).unwrap();
        assert_eq!(t.histories, 2);
        assert_eq!(t.entries[&key(2, 2, 1, 2)], q("1/2"));
        assert_eq!(t.entries[&key(2, 2, 2, 2)], q("1/2"));
        let m = t.marginal(Parameter::LeftmostLength);
        assert_eq!(m.probabilities(), &[q("1/2"), q("1/2")]);
        assert_eq!(enumerate(ModelKind::Binary, 4, None).unwrap().marginal(Parameter::PathCount).mean(), q("7/3"));
    }

    #[test]
    fn counts_and_totals() {
        let t = enumerate(ModelKind::Bernoulli, 6, Some(&q("2/5"))).unwrap();
        assert_eq!(BigUint::from(t.histories), history_count(ModelKind::Bernoulli, 6));
        assert_eq!(t.total(), q("1"));
        let t = enumerate(ModelKind::Binary, 7, None).unwrap();
        assert_eq!(t.histories, 720);
        assert_eq!(t.total(), q("1"));
    }

    #[test]
    fn caps_and_arguments() {
        let err = enumerate(ModelKind::Bernoulli, 9, Some(&q("1/2"))).unwrap_err();
        assert!(matches!(err, Error::EnumerationCap { cap: 8, .. }));
        assert!(err.to_string().contains("10321920"));
        assert!(enumerate(ModelKind::Binary, 10, None).is_err());
        assert!(enumerate(ModelKind::Bernoulli, 3, None).is_err());
        assert!(enumerate(ModelKind::Bernoulli, 3, Some(&q("1"))).is_err());
        let raised = OracleConfig { bernoulli_cap: 9, binary_cap: 9 };
        assert!(enumerate_with(ModelKind::Bernoulli, 3, Some(&q("1/2")), raised).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let t = enumerate(ModelKind::Bernoulli, 4, Some(&q("3/4"))).unwrap();
        let text = t.to_json().unwrap();
        assert!(text.contains("\"p\": \"3/4\""));
        assert_eq!(JointDistributionTable::from_json(&text).unwrap(), t);
        let b = enumerate(ModelKind::Binary, 4, None).unwrap();
        assert!(!b.to_json().unwrap().contains("\"p\""));
    }

    #[test]
    fn parallel_split_matches_sequential_walk() {
        let t = enumerate(ModelKind::Bernoulli, 5, Some(&q("1/2"))).unwrap();
        let mut seq: BTreeMap<JointKey, u64> = BTreeMap::new();
        for_each_history(ModelKind::Bernoulli, 5, |_, net| *seq.entry(JointKey::of(net)).or_insert(0) += 1).unwrap();
        // At p = 1/2 every history has weight 1/(4! 2^4).
        for (k, v) in seq {
            assert_eq!(t.entries[&k], BigRational::new(BigInt::from(v), BigInt::from(384)));
        }
    }
}
