//! Decision spaces for online linear optimization and their linear argmin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifies one option: an index into an explicit point list, a vertex of
/// the simplex, or a hypercube corner encoded as a bitmask (bit `j` set means
/// coordinate `j` is `+1`).
pub type OptionId = usize;

/// Largest hypercube dimension representable by an [`OptionId`] bitmask.
pub const MAX_HYPERCUBE_DIM: usize = 62;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OptionSet {
    Explicit { points: Vec<Vec<f64>> },
    Hypercube { dim: usize },
    SimplexVertices { dim: usize },
}

impl OptionSet {
    pub fn explicit(points: Vec<Vec<f64>>) -> Result<Self> {
        let set = OptionSet::Explicit { points };
        set.validate()?;
        Ok(set)
    }

    pub fn hypercube(dim: usize) -> Result<Self> {
        let set = OptionSet::Hypercube { dim };
        set.validate()?;
        Ok(set)
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        let set = OptionSet::SimplexVertices { dim };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OptionSet::Explicit { points } => {
                let Some(first) = points.first() else {
                    return Err(Error::param("points", "option set is empty"));
                };
                let d = first.len();
                if d == 0 {
                    return Err(Error::param("points", "zero-dimensional options"));
                }
                for p in points {
                    if p.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: p.len(),
                        });
                    }
                    if p.iter().any(|x| !x.is_finite() || x.abs() > 1.0) {
                        return Err(Error::param("points", "option outside [-1, 1]^d"));
                    }
                }
                Ok(())
            }
            OptionSet::Hypercube { dim } => {
                if *dim == 0 || *dim > MAX_HYPERCUBE_DIM {
                    Err(Error::param(
                        "dim",
                        format!("hypercube dimension must be in 1..={MAX_HYPERCUBE_DIM}"),
                    ))
                } else {
                    Ok(())
                }
            }
            OptionSet::SimplexVertices { dim } => {
                if *dim == 0 {
                    Err(Error::param("dim", "simplex dimension must be positive"))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OptionSet::Explicit { points } => points.first().map_or(0, Vec::len),
            OptionSet::Hypercube { dim } | OptionSet::SimplexVertices { dim } => *dim,
        }
    }

    /// Number of options, if it fits in a `usize`.
    pub fn len(&self) -> Option<usize> {
        match self {
            OptionSet::Explicit { points } => Some(points.len()),
            OptionSet::Hypercube { dim } => 1usize.checked_shl(*dim as u32),
            OptionSet::SimplexVertices { dim } => Some(*dim),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn point(&self, id: OptionId) -> Vec<f64> {
        match self {
            OptionSet::Explicit { points } => points[id].clone(),
            OptionSet::Hypercube { dim } => (0..*dim)
                .map(|j| if id >> j & 1 == 1 { 1.0 } else { -1.0 })
                .collect(),
            OptionSet::SimplexVertices { dim } => {
                let mut v = vec![0.0; *dim];
                v[id] = 1.0;
                v
            }
        }
    }

    /// `<cost, point(id)>` without materializing the point.
    #[inline]
    pub fn inner(&self, id: OptionId, cost: &[f64]) -> f64 {
        match self {
            OptionSet::Explicit { points } => dot(&points[id], cost),
            OptionSet::Hypercube { .. } => cost
                .iter()
                .enumerate()
                .map(|(j, c)| if id >> j & 1 == 1 { *c } else { -*c })
                .sum(),
            OptionSet::SimplexVertices { .. } => cost[id],
        }
    }

    /// Option minimizing `<cost, w>`; ties go to the lowest explicit index,
    /// the lexicographically smallest corner, or the lowest vertex.
    pub fn argmin(&self, cost: &[f64]) -> Result<OptionId> {
        if cost.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: cost.len(),
            });
        }
        Ok(self.argmin_unchecked(cost))
    }

    #[inline]
    pub(crate) fn argmin_unchecked(&self, cost: &[f64]) -> OptionId {
        match self {
            OptionSet::Explicit { points } => {
                let mut best = 0;
                let mut best_val = f64::INFINITY;
                for (i, p) in points.iter().enumerate() {
                    let v = dot(p, cost);
                    if v < best_val {
                        best = i;
                        best_val = v;
                    }
                }
                best
            }
            OptionSet::Hypercube { .. } => cost
                .iter()
                .enumerate()
                .filter(|(_, c)| **c < 0.0)
                .fold(0, |mask, (j, _)| mask | 1 << j),
            OptionSet::SimplexVertices { .. } => argmin_index(cost),
        }
    }

    /// `D = max |w - w'|_1` over the option set.
    pub fn l1_diameter(&self) -> f64 {
        match self {
            OptionSet::Explicit { points } => {
                let mut best = 0.0f64;
                for (i, a) in points.iter().enumerate() {
                    for b in &points[i + 1..] {
                        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
                        best = best.max(d);
                    }
                }
                best
            }
            OptionSet::Hypercube { dim } => 2.0 * *dim as f64,
            OptionSet::SimplexVertices { dim } => {
                if *dim > 1 {
                    2.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest index attaining the minimum.
#[inline]
pub fn argmin_index(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x < xs[best] {
            best = i;
        }
    }
    best
}

/// Lowest index attaining the maximum.
#[inline]
pub fn argmax_index(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

/// Running sum `L^t` of loss vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeLoss {
    sum: Vec<f64>,
    steps: usize,
}

impl CumulativeLoss {
    pub fn zeros(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            steps: 0,
        }
    }

    pub fn add(&mut self, loss: &[f64]) -> Result<()> {
        if loss.len() != self.sum.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sum.len(),
                got: loss.len(),
            });
        }
        for (s, l) in self.sum.iter_mut().zip(loss) {
            *s += l;
        }
        self.steps += 1;
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.sum
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Checks a loss vector against the declared entry range.
pub fn check_loss_vector(loss: &[f64], dim: usize, lo: f64, hi: f64) -> Result<()> {
    if loss.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: loss.len(),
        });
    }
    if let Some(x) = loss.iter().find(|x| !(lo..=hi).contains(*x)) {
        return Err(Error::param(
            "loss",
            format!("entry {x} outside [{lo}, {hi}]"),
        ));
    }
    Ok(())
}
