//! Oblivious loss streams and hint-corruption schedules.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Steps whose hints lie. Fixed before the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionSchedule {
    budget: u64,
    /// Sorted, distinct, 1-based.
    steps: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// The first `B` steps.
    #[default]
    Front,
    /// `B` distinct steps drawn uniformly from `1..=T`.
    Random,
}

impl CorruptionSchedule {
    pub fn none() -> Self {
        Self {
            budget: 0,
            steps: Vec::new(),
        }
    }

    pub fn from_steps(budget: u64, mut steps: Vec<usize>) -> Result<Self> {
        steps.sort_unstable();
        steps.dedup();
        if steps.first() == Some(&0) {
            return Err(Error::param("steps", "corrupted steps are 1-based"));
        }
        if steps.len() as u64 > budget {
            return Err(Error::param(
                "steps",
                format!("{} corrupted steps exceed budget {budget}", steps.len()),
            ));
        }
        Ok(Self { budget, steps })
    }

    pub fn generate(budget: u64, placement: Placement, horizon: usize, seed: u64) -> Self {
        let k = (budget.min(horizon as u64)) as usize;
        let steps = match placement {
            Placement::Front => (1..=k).collect(),
            Placement::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut s: Vec<usize> = index::sample(&mut rng, horizon, k)
                    .into_iter()
                    .map(|i| i + 1)
                    .collect();
                s.sort_unstable();
                s
            }
        };
        Self { budget, steps }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn count(&self) -> usize {
        self.steps.len()
    }

    #[inline]
    pub fn is_corrupted(&self, t: usize) -> bool {
        self.steps.binary_search(&t).is_ok()
    }
}

/// Named loss-sequence generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Generator {
    /// The same vector every step.
    Constant { loss: Vec<f64> },
    /// Coordinates 0 and 1 swap a unit loss each step (coordinate 0 pays on
    /// odd steps); every other coordinate pays `rest` throughout.
    Alternating {
        #[serde(default = "one")]
        rest: f64,
    },
    /// Entries i.i.d. uniform on `[lo, hi]`.
    Random { lo: f64, hi: f64 },
    /// Entries i.i.d. uniform on `{-1, +1}`.
    Signs,
    /// Random signs on corrupted steps, zero elsewhere.
    CorruptedOnly,
    /// Read from a stream file.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Constant(Vec<f64>),
    Alternating(f64),
    Random { lo: f64, hi: f64, seed: u64 },
    Signs { seed: u64 },
    CorruptedOnly { seed: u64, schedule: CorruptionSchedule },
    Stored(Vec<Vec<f64>>),
}

/// A loss sequence `l^1..l^T` that is a pure function of `(generator, seed, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialStream {
    dim: usize,
    horizon: usize,
    source: Source,
}

/// Per-step generator key, so step `t` can be rebuilt on its own.
fn step_seed(seed: u64, t: usize) -> u64 {
    crate::harness::seed::mix(seed ^ 0x9e37_79b9_7f4a_7c15, t as u64)
}

impl AdversarialStream {
    pub fn new(
        generator: &Generator,
        dim: usize,
        horizon: usize,
        seed: u64,
        schedule: Option<&CorruptionSchedule>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        let source = match generator {
            Generator::Constant { loss } => {
                if loss.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: loss.len(),
                    });
                }
                check_entries(loss)?;
                Source::Constant(loss.clone())
            }
            Generator::Alternating { rest } => {
                if dim < 2 {
                    return Err(Error::param("dim", "alternating stream needs 2 coordinates"));
                }
                check_entries(&[*rest])?;
                Source::Alternating(*rest)
            }
            Generator::Random { lo, hi } => {
                if !(lo <= hi) {
                    return Err(Error::param("lo", "need lo <= hi"));
                }
                check_entries(&[*lo, *hi])?;
                Source::Random {
                    lo: *lo,
                    hi: *hi,
                    seed,
                }
            }
            Generator::Signs => Source::Signs { seed },
            Generator::CorruptedOnly => Source::CorruptedOnly {
                seed,
                schedule: schedule
                    .cloned()
                    .ok_or_else(|| Error::Config("corrupted-only stream needs a corruption schedule".into()))?,
            },
            Generator::File { path } => {
                let stream = read_stream_file(path)?;
                if stream.dim != dim || stream.horizon < horizon {
                    return Err(Error::Incompatible(format!(
                        "stream file has d={} T={}, run needs d={dim} T={horizon}",
                        stream.dim, stream.horizon
                    )));
                }
                let Source::Stored(mut rows) = stream.source else {
                    unreachable!()
                };
                rows.truncate(horizon);
                Source::Stored(rows)
            }
        };
        Ok(Self {
            dim,
            horizon,
            source,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::param("rows", "empty stream"));
        }
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            check_entries(r)?;
        }
        Ok(Self {
            dim,
            horizon: rows.len(),
            source: Source::Stored(rows),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Writes `l^t` (1-based `t`) into `out`.
    pub fn loss_at(&self, t: usize, out: &mut [f64]) {
        debug_assert!(t >= 1 && t <= self.horizon);
        match &self.source {
            Source::Constant(l) => out.copy_from_slice(l),
            Source::Alternating(rest) => {
                out.fill(*rest);
                let odd = t % 2 == 1;
                out[0] = if odd { 1.0 } else { 0.0 };
                out[1] = if odd { 0.0 } else { 1.0 };
            }
            Source::Random { lo, hi, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(step_seed(*seed, t));
                for o in out.iter_mut() {
                    *o = rng.random_range(*lo..=*hi);
                }
            }
            Source::Signs { seed } => fill_signs(step_seed(*seed, t), out),
            Source::CorruptedOnly { seed, schedule } => {
                if schedule.is_corrupted(t) {
                    fill_signs(step_seed(*seed, t), out);
                } else {
                    out.fill(0.0);
                }
            }
            Source::Stored(rows) => out.copy_from_slice(&rows[t - 1]),
        }
    }

    pub fn materialize(&self) -> Vec<Vec<f64>> {
        (1..=self.horizon)
            .map(|t| {
                let mut v = vec![0.0; self.dim];
                self.loss_at(t, &mut v);
                v
            })
            .collect()
    }

    /// Smallest and largest entry over the whole stream.
    pub fn entry_range(&self) -> (f64, f64) {
        let mut buf = vec![0.0; self.dim];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for t in 1..=self.horizon {
            self.loss_at(t, &mut buf);
            for &x in &buf {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo, hi)
    }

    /// Text form: header `d T`, then one line of `d` decimals per step.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.horizon);
        let mut buf = vec![0.0; self.dim];
        for t in 1..=self.horizon {
            self.loss_at(t, &mut buf);
            for (j, x) in buf.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str, origin: &Path) -> Result<Self> {
        let err = |reason: String| Error::Parse {
            path: origin.to_path_buf(),
            reason,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| err("missing `d T` header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(format!("header: {e}")))?;
        let [d, t] = nums[..] else {
            return Err(err("header must be `d T`".into()));
        };
        let mut rows = Vec::with_capacity(t);
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(format!("step {}: {e}", i + 1)))?;
            if row.len() != d {
                return Err(err(format!("step {} has {} entries, expected {d}", i + 1, row.len())));
            }
            rows.push(row);
        }
        if rows.len() != t {
            return Err(err(format!("header promises {t} steps, found {}", rows.len())));
        }
        Self::from_rows(rows).map_err(|e| err(e.to_string()))
    }
}

fn fill_signs(seed: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for o in out.iter_mut() {
        *o = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
}

fn check_entries(xs: &[f64]) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
        return Err(Error::param("loss", format!("entry {x} outside [-1, 1]")));
    }
    Ok(())
}

pub fn read_stream_file(path: &Path) -> Result<AdversarialStream> {
    let text = std::fs::read_to_string(path)?;
    AdversarialStream::parse_text(&text, path)
}

pub fn write_stream_file(stream: &AdversarialStream, path: &Path) -> Result<()> {
    std::fs::write(path, stream.to_text())?;
    Ok(())
}

/// Builds a stream by generator name with default generator parameters.
pub fn make_adversarial(name: &str, dim: usize, horizon: usize, seed: u64) -> Result<AdversarialStream> {
    let generator = match name {
        "constant" => {
            let mut loss = vec![0.0; dim];
            if let Some(first) = loss.first_mut() {
                *first = 1.0;
            }
            Generator::Constant { loss }
        }
        "alternating" => Generator::Alternating { rest: 1.0 },
        "random" => Generator::Random { lo: -1.0, hi: 1.0 },
        "signs" => Generator::Signs,
        other => return Err(Error::UnknownGenerator(other.to_string())),
    };
    AdversarialStream::new(&generator, dim, horizon, seed, None)
}
