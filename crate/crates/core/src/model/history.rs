use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Growth rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Model {
    /// Uniform edge choice; parallel doubling with probability `p`, serial otherwise.
    Bernoulli { p: f64 },
    /// Uniform edge choice; doubling forced by the out-degree of the edge's tail.
    Binary,
}

impl Model {
    /// Bernoulli model with `p` checked to lie in the open unit interval.
    pub fn bernoulli(p: f64) -> Result<Model> {
        if p > 0.0 && p < 1.0 {
            Ok(Model::Bernoulli { p })
        } else {
            Err(Error::InvalidProbability(p))
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Bernoulli { .. } => ModelKind::Bernoulli,
            Model::Binary => ModelKind::Binary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Model::Bernoulli { p } => Model::bernoulli(p).map(|_| ()),
            Model::Binary => Ok(()),
        }
    }
}

/// Model family without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bernoulli,
    Binary,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Bernoulli => "bernoulli",
            ModelKind::Binary => "binary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Doubling {
    Parallel,
    Serial,
}

impl Doubling {
    pub fn name(self) -> &'static str {
        match self {
            Doubling::Parallel => "parallel",
            Doubling::Serial => "serial",
        }
    }
}

/// One growth step: the duplicated edge and how it was doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: u32,
    #[serde(rename = "type")]
    pub doubling: Doubling,
}

impl Step {
    pub fn parallel(edge: u32) -> Step {
        Step { edge, doubling: Doubling::Parallel }
    }

    pub fn serial(edge: u32) -> Step {
        Step { edge, doubling: Doubling::Serial }
    }
}

/// Full record of the random choices of one growth run.
///
/// Step `t` (0-based) creates edge `t + 2` and duplicates one of the edges
/// `1..=t + 1`. Binary histories carry the forced doubling type; it is checked
/// when the history is replayed.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthHistory {
    model: Model,
    steps: Vec<Step>,
}

impl GrowthHistory {
    pub fn new(model: Model, steps: Vec<Step>) -> Result<GrowthHistory> {
        model.validate()?;
        for (t, step) in steps.iter().enumerate() {
            let available = t as u32 + 1;
            if step.edge == 0 || step.edge > available {
                return Err(Error::EdgeOutOfRange { step: t, edge: step.edge, available });
            }
        }
        Ok(GrowthHistory { model, steps })
    }

    /// Empty history: the single edge labelled 1.
    pub fn base(model: Model) -> Result<GrowthHistory> {
        GrowthHistory::new(model, Vec::new())
    }

    /// Binary history from edge choices only; doubling types are filled in
    /// from the saturation rule.
    pub fn binary_from_choices(edges: &[u32]) -> Result<GrowthHistory> {
        let mut steps = Vec::with_capacity(edges.len());
        let mut tail_out_degree: Vec<u32> = vec![1]; // out-degree of the tail of edge 1
        let mut edge_tail: Vec<usize> = vec![0];
        for (t, &edge) in edges.iter().enumerate() {
            let available = t as u32 + 1;
            if edge == 0 || edge > available {
                return Err(Error::EdgeOutOfRange { step: t, edge, available });
            }
            let tail = edge_tail[edge as usize - 1];
            if tail_out_degree[tail] == 1 {
                tail_out_degree[tail] = 2;
                edge_tail.push(tail);
                steps.push(Step::parallel(edge));
            } else {
                tail_out_degree.push(1);
                edge_tail.push(tail_out_degree.len() - 1);
                steps.push(Step::serial(edge));
            }
        }
        Ok(GrowthHistory { model: Model::Binary, steps })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of edges of the network this history produces.
    pub fn size(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn serial_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.doubling == Doubling::Serial).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&HistoryFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<GrowthHistory> {
        let file: HistoryFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// On-disk form: `{"model":"bernoulli","p":0.5,"steps":[{"edge":1,"type":"parallel"}]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct HistoryFile {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub steps: Vec<Step>,
}

impl From<&GrowthHistory> for HistoryFile {
    fn from(h: &GrowthHistory) -> Self {
        let p = match h.model {
            Model::Bernoulli { p } => Some(p),
            Model::Binary => None,
        };
        HistoryFile { model: h.model.kind(), p, steps: h.steps.clone() }
    }
}

impl TryFrom<HistoryFile> for GrowthHistory {
    type Error = Error;

    fn try_from(file: HistoryFile) -> Result<GrowthHistory> {
        let model = match (file.model, file.p) {
            (ModelKind::Bernoulli, Some(p)) => Model::bernoulli(p)?,
            (ModelKind::Bernoulli, None) => return Err(Error::Format("bernoulli history needs \"p\"".into())),
            (ModelKind::Binary, _) => Model::Binary,
        };
        GrowthHistory::new(model, file.steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_range_is_checked() {
        let model = Model::bernoulli(0.5).unwrap();
        assert!(GrowthHistory::new(model, vec![Step::parallel(1), Step::serial(2)]).is_ok());
        let err = GrowthHistory::new(model, vec![Step::parallel(2)]).unwrap_err();
        assert!(matches!(err, Error::EdgeOutOfRange { step: 0, edge: 2, available: 1 }));
        assert!(GrowthHistory::new(model, vec![Step::parallel(0)]).is_err());
    }

    #[test]
    fn probability_is_checked() {
        assert!(Model::bernoulli(0.0).is_err());
        assert!(Model::bernoulli(1.0).is_err());
        assert!(Model::bernoulli(f64::NAN).is_err());
    }

    #[test]
    fn binary_choices_get_forced_types() {
        let h = GrowthHistory::binary_from_choices(&[1, 1, 2, 2, 5, 5]).unwrap();
        let types: Vec<_> = h.steps().iter().map(|s| s.doubling).collect();
        use Doubling::*;
        assert_eq!(types, vec![Parallel, Serial, Serial, Serial, Parallel, Serial]);
    }

    #[test]
    fn json_layout() {
        let h = GrowthHistory::new(Model::bernoulli(0.5).unwrap(), vec![Step::parallel(1), Step::serial(1)]).unwrap();
        let text = h.to_json().unwrap();
        assert_eq!(
            text,
            r#"{"model":"bernoulli","p":0.5,"steps":[{"edge":1,"type":"parallel"},{"edge":1,"type":"serial"}]}"#
        );
        assert_eq!(GrowthHistory::from_json(&text).unwrap(), h);
        let b = GrowthHistory::binary_from_choices(&[1]).unwrap();
        assert_eq!(b.to_json().unwrap(), r#"{"model":"binary","steps":[{"edge":1,"type":"parallel"}]}"#);
        assert!(GrowthHistory::from_json(r#"{"model":"bernoulli","steps":[]}"#).is_err());
    }
}
