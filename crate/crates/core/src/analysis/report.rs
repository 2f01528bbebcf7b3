use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub positions: u64,
    pub pairs: u64,
}

/// One experiment's outcome. A failing report always carries the witness
/// that made it fail, since [`UniformityReport::fail`] is the only way to get there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    experiment: String,
    params: Map<String, Value>,
    verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<Value>,
    counts: Counts,
    sampled: bool,
    seed: u64,
    ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    details: Option<Value>,
}

impl UniformityReport {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            params: Map::new(),
            verdict: Verdict::Holds,
            witness: None,
            counts: Counts::default(),
            sampled: false,
            seed,
            ms: 0,
            details: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Marks the report failed. Only the first witness is kept.
    pub fn fail(&mut self, witness: Value) {
        if self.verdict == Verdict::Holds {
            self.verdict = Verdict::Fails;
            self.witness = Some(witness);
        }
    }

    pub fn add_counts(&mut self, positions: u64, pairs: u64) {
        self.counts.positions += positions;
        self.counts.pairs += pairs;
    }

    pub fn set_sampled(&mut self, sampled: bool) {
        self.sampled |= sampled;
    }

    pub fn set_details(&mut self, details: Value) {
        self.details = Some(details);
    }

    pub fn set_ms(&mut self, ms: u64) {
        self.ms = ms;
    }

    pub fn experiment(&self) -> &str {
        &self.experiment
    }

    pub fn params(&self) -> &Map<String, Value> {
        &self.params
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn witness(&self) -> Option<&Value> {
        self.witness.as_ref()
    }

    pub fn counts(&self) -> Counts {
        self.counts
    }

    pub fn sampled(&self) -> bool {
        self.sampled
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ms(&self) -> u64 {
        self.ms
    }

    pub fn details(&self) -> Option<&Value> {
        self.details.as_ref()
    }

    /// Single-line JSON; keys come out sorted, so equal reports give equal bytes.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}
