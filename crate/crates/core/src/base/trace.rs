//! Per-step run records and the recorders that consume them.

use serde::{Deserialize, Serialize};

use crate::env::ProbeFeedback;

/// An option or arm as recorded in a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Choice {
    Index(usize),
    Point(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Minimize losses; regret against the best fixed option in hindsight.
    Loss,
    /// Maximize rewards; pseudo-regret against the best arm mean.
    Reward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step index.
    pub t: usize,
    /// Probes whose best member is played.
    pub probed: Vec<Choice>,
    /// Exploration-only probes (never played).
    pub explored: Vec<Choice>,
    /// Oracle answer; absent for policies that never probe.
    pub feedback: Option<ProbeFeedback>,
    pub played: Choice,
    /// Realized loss or reward of the played option.
    pub value: f64,
    /// Exact expected reward of the played rule given the probed set, when the
    /// environment can compute it.
    pub expected: Option<f64>,
    /// Running (pseudo-)regret through step `t`.
    pub regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub objective: Objective,
    /// Number of arms for bandit traces.
    pub arms: Option<usize>,
    pub steps: Vec<StepRecord>,
}

impl Trace {
    pub fn new(objective: Objective, arms: Option<usize>) -> Self {
        Self {
            objective,
            arms,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.regret)
    }

    /// Running regret after step `t` (1-based).
    pub fn regret_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(1)
            .and_then(|i| self.steps.get(i))
            .map(|s| s.regret)
    }
}

/// Sink for the per-step output of a run.
pub trait Recorder {
    /// Whether [`record`](Recorder::record) wants a full [`StepRecord`].
    fn detailed(&self) -> bool;

    fn record(&mut self, t: usize, regret: f64, detail: Option<StepRecord>);
}

impl Recorder for Trace {
    fn detailed(&self) -> bool {
        true
    }

    fn record(&mut self, t: usize, regret: f64, detail: Option<StepRecord>) {
        let rec = detail.expect("trace recorder always requests detail");
        debug_assert_eq!(rec.t, t);
        debug_assert_eq!(rec.regret, regret);
        self.steps.push(rec);
    }
}

/// Keeps the running regret only at a sorted grid of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    grid: Vec<usize>,
    values: Vec<f64>,
    last_t: usize,
    last_regret: f64,
}

impl RegretCurve {
    pub fn new(mut grid: Vec<usize>) -> Self {
        grid.sort_unstable();
        grid.dedup();
        grid.retain(|&t| t > 0);
        Self {
            values: Vec::with_capacity(grid.len()),
            grid,
            last_t: 0,
            last_regret: 0.0,
        }
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    /// Recorded values, aligned with the prefix of the grid reached so far.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn final_regret(&self) -> f64 {
        self.last_regret
    }

    pub fn steps(&self) -> usize {
        self.last_t
    }
}

impl Recorder for RegretCurve {
    fn detailed(&self) -> bool {
        false
    }

    fn record(&mut self, t: usize, regret: f64, _detail: Option<StepRecord>) {
        self.last_t = t;
        self.last_regret = regret;
        if self.values.len() < self.grid.len() && self.grid[self.values.len()] == t {
            self.values.push(regret);
        }
    }
}

/// Fans one run out to two recorders.
pub struct Tee<'a, A: Recorder, B: Recorder>(pub &'a mut A, pub &'a mut B);

impl<A: Recorder, B: Recorder> Recorder for Tee<'_, A, B> {
    fn detailed(&self) -> bool {
        self.0.detailed() || self.1.detailed()
    }

    fn record(&mut self, t: usize, regret: f64, detail: Option<StepRecord>) {
        let (da, db) = (self.0.detailed(), self.1.detailed());
        match (da, db) {
            (true, true) => {
                self.0.record(t, regret, detail.clone());
                self.1.record(t, regret, detail);
            }
            (true, false) => {
                self.1.record(t, regret, None);
                self.0.record(t, regret, detail);
            }
            _ => {
                self.0.record(t, regret, None);
                self.1.record(t, regret, detail);
            }
        }
    }
}
