use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Pass,
    Fail,
    Warn,
}

/// Direction in which the statistic must sit relative to the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub criterion: Criterion,
    pub p_value: Option<f64>,
    pub sample_sizes: Vec<usize>,
    pub decision: Decision,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
    pub runtime_secs: f64,
    pub detail: Option<String>,
}

impl StatReport {
    pub fn new(name: impl Into<String>, statistic: f64, threshold: f64, criterion: Criterion) -> Self {
        let mut r = StatReport {
            name: name.into(),
            statistic,
            threshold,
            criterion,
            p_value: None,
            sample_sizes: Vec::new(),
            decision: Decision::Fail,
            warnings: Vec::new(),
            seed: None,
            runtime_secs: 0.0,
            detail: None,
        };
        r.decide();
        r
    }

    fn decide(&mut self) {
        let ok = match self.criterion {
            Criterion::AtMost => self.statistic <= self.threshold,
            Criterion::AtLeast => self.statistic >= self.threshold,
        };
        self.decision = if !ok {
            Decision::Fail
        } else if self.warnings.is_empty() {
            Decision::Pass
        } else {
            Decision::Warn
        };
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.decide();
        self
    }

    pub fn with_criterion(mut self, threshold: f64, criterion: Criterion) -> Self {
        self.threshold = threshold;
        self.criterion = criterion;
        self.decide();
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_p_value(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    pub fn with_sizes(mut self, sizes: &[usize]) -> Self {
        self.sample_sizes = sizes.to_vec();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_runtime(mut self, secs: f64) -> Self {
        self.runtime_secs = secs;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn warn(mut self, msg: impl Into<String>) -> Self {
        self.warnings.push(msg.into());
        self.decide();
        self
    }

    pub fn passed(&self) -> bool {
        self.decision != Decision::Fail
    }

    pub fn summary_line(&self) -> String {
        let verdict = match self.decision {
            Decision::Pass => "PASS",
            Decision::Fail => "FAIL",
            Decision::Warn => "WARN",
        };
        let op = match self.criterion {
            Criterion::AtMost => "<=",
            Criterion::AtLeast => ">=",
        };
        let mut s = format!("{verdict} {}: {:.6} {op} {:.6}", self.name, self.statistic, self.threshold);
        if let Some(p) = self.p_value {
            s.push_str(&format!(" (p={p:.3e})"));
        }
        if let Some(d) = &self.detail {
            s.push_str(&format!(" [{d}]"));
        }
        s
    }
}
