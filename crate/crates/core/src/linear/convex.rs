//! Convex losses with a regularized, Gamma-perturbed leader and two probes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::noise::sample_gamma_vector;
use crate::base::options::dot;
use crate::base::params::AlgoParams;
use crate::error::{Error, Result};

/// Closed convex subset of `[-1, 1]^d`, or a finite point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConvexDomain {
    /// Euclidean ball of the given radius (at most 1) around the origin.
    Ball { dim: usize, radius: f64 },
    /// The cube `[-1, 1]^d`.
    Cube { dim: usize },
    /// Finite set, minimized by enumeration.
    Points { points: Vec<Vec<f64>> },
}

impl ConvexDomain {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexDomain::Ball { dim, radius } => {
                if *dim == 0 || !(*radius > 0.0 && *radius <= 1.0) {
                    return Err(Error::param("domain", "ball needs d >= 1 and radius in (0, 1]"));
                }
            }
            ConvexDomain::Cube { dim } => {
                if *dim == 0 {
                    return Err(Error::param("domain", "cube needs d >= 1"));
                }
            }
            ConvexDomain::Points { points } => {
                let d = points.first().map_or(0, Vec::len);
                if d == 0 || points.iter().any(|p| p.len() != d) {
                    return Err(Error::param("domain", "points must share a positive dimension"));
                }
                if points.iter().flatten().any(|x| !(-1.0..=1.0).contains(x)) {
                    return Err(Error::param("domain", "points must lie in [-1, 1]^d"));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexDomain::Ball { dim, .. } | ConvexDomain::Cube { dim } => *dim,
            ConvexDomain::Points { points } => points[0].len(),
        }
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match self {
            ConvexDomain::Ball { radius, .. } => 2.0 * radius,
            ConvexDomain::Cube { dim } => 2.0 * (*dim as f64).sqrt(),
            ConvexDomain::Points { points } => {
                let mut best = 0.0f64;
                for (i, a) in points.iter().enumerate() {
                    for b in &points[i + 1..] {
                        best = best.max(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>());
                    }
                }
                best.sqrt()
            }
        }
    }

    fn project(&self, w: &mut [f64]) {
        match self {
            ConvexDomain::Ball { radius, .. } => {
                let norm = dot(w, w).sqrt();
                if norm > *radius {
                    let s = radius / norm;
                    w.iter_mut().for_each(|x| *x *= s);
                }
            }
            ConvexDomain::Cube { .. } => w.iter_mut().for_each(|x| *x = x.clamp(-1.0, 1.0)),
            ConvexDomain::Points { .. } => unreachable!("finite domains are enumerated"),
        }
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        match self {
            ConvexDomain::Ball { radius, .. } => dot(w, w).sqrt() <= radius + 1e-12,
            ConvexDomain::Cube { .. } => w.iter().all(|x| x.abs() <= 1.0 + 1e-12),
            ConvexDomain::Points { points } => points.iter().any(|p| p == w),
        }
    }
}

/// `l(w) = sum_j a_j (w_j - c_j)^2 + <b, w>` with `a_j >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticLoss {
    pub curvature: Vec<f64>,
    pub center: Vec<f64>,
    pub linear: Vec<f64>,
}

impl QuadraticLoss {
    /// `|w - v|^2`.
    pub fn squared_distance(v: &[f64]) -> Self {
        Self {
            curvature: vec![1.0; v.len()],
            center: v.to_vec(),
            linear: vec![0.0; v.len()],
        }
    }

    /// `<b, w>`.
    pub fn linear(b: &[f64]) -> Self {
        Self {
            curvature: vec![0.0; b.len()],
            center: vec![0.0; b.len()],
            linear: b.to_vec(),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        for v in [&self.curvature, &self.center, &self.linear] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        if self.curvature.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
            return Err(Error::param("curvature", "must be nonnegative and finite"));
        }
        Ok(())
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        let mut v = 0.0;
        for j in 0..w.len() {
            let d = w[j] - self.center[j];
            v += self.curvature[j] * d * d + self.linear[j] * w[j];
        }
        v
    }

    /// Largest Hessian eigenvalue, `2 max_j a_j`.
    pub fn hessian_bound(&self) -> f64 {
        2.0 * self.curvature.iter().copied().fold(0.0, f64::max)
    }

    /// Bound on the gradient norm over a ball of radius `r`.
    pub fn gradient_bound(&self, r: f64) -> f64 {
        self.curvature
            .iter()
            .zip(&self.center)
            .zip(&self.linear)
            .map(|((a, c), b)| (2.0 * a * (r + c.abs()) + b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Running sum of quadratic losses: `sum_j a_j w_j^2 + b_j w_j + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSum {
    a: Vec<f64>,
    b: Vec<f64>,
    c: f64,
}

impl QuadraticSum {
    pub fn zeros(dim: usize) -> Self {
        Self {
            a: vec![0.0; dim],
            b: vec![0.0; dim],
            c: 0.0,
        }
    }

    pub fn add(&mut self, loss: &QuadraticLoss) {
        for j in 0..self.a.len() {
            let (a, cj) = (loss.curvature[j], loss.center[j]);
            self.a[j] += a;
            self.b[j] += loss.linear[j] - 2.0 * a * cj;
            self.c += a * cj * cj;
        }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.c
            + w.iter()
                .zip(self.a.iter().zip(&self.b))
                .map(|(x, (a, b))| a * x * x + b * x)
                .sum::<f64>()
    }

    /// Minimum over the domain.
    pub fn minimize(&self, domain: &ConvexDomain, solver: &SolverOptions) -> Result<(Vec<f64>, f64)> {
        let mut w = vec![0.0; self.a.len()];
        minimize_diagonal(&self.a, &self.b, domain, &mut w, solver)?;
        let v = self.value(&w);
        Ok((w, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Certified optimality gap at termination.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 100_000,
        }
    }
}

/// Minimizes `sum_j a_j w_j^2 + q_j w_j` over the domain, starting from and
/// overwriting `w`. Returns the iteration count.
pub fn minimize_diagonal(
    a: &[f64],
    q: &[f64],
    domain: &ConvexDomain,
    w: &mut [f64],
    opts: &SolverOptions,
) -> Result<usize> {
    let f = |w: &[f64]| -> f64 { w.iter().zip(a.iter().zip(q)).map(|(x, (a, q))| a * x * x + q * x).sum() };
    if let ConvexDomain::Points { points } = domain {
        let mut best = 0;
        let mut best_v = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            let v = f(p);
            if v < best_v {
                best = i;
                best_v = v;
            }
        }
        w.copy_from_slice(&points[best]);
        return Ok(points.len());
    }
    let lip = 2.0 * a.iter().copied().fold(0.0, f64::max);
    let mu = 2.0 * a.iter().copied().fold(f64::INFINITY, f64::min);
    if lip == 0.0 {
        // linear objective: the minimizer is on the boundary along -q
        for (x, qj) in w.iter_mut().zip(q) {
            *x = match domain {
                ConvexDomain::Cube { .. } => {
                    if *qj > 0.0 {
                        -1.0
                    } else {
                        1.0
                    }
                }
                _ => -qj,
            };
        }
        if let ConvexDomain::Ball { radius, .. } = domain {
            let norm = dot(w, w).sqrt();
            if norm > 0.0 {
                w.iter_mut().for_each(|x| *x *= radius / norm);
            }
        }
        return Ok(0);
    }
    let step = 1.0 / lip;
    let diam = domain.diameter();
    domain.project(w);
    let mut x = w.to_vec();
    let mut y = w.to_vec();
    let mut x_next = vec![0.0; w.len()];
    let mut theta = 1.0f64;
    let mut f_x = f(&x);
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iterations {
        for j in 0..x_next.len() {
            x_next[j] = y[j] - step * (2.0 * a[j] * y[j] + q[j]);
        }
        domain.project(&mut x_next);
        // gradient mapping G = lip (y - x_next) bounds the gap of x_next
        let g2: f64 = y.iter().zip(&x_next).map(|(yj, xj)| (lip * (yj - xj)).powi(2)).sum();
        let gap = if mu > 0.0 {
            g2 / (2.0 * mu)
        } else {
            g2.sqrt() * diam
        };
        residual = gap;
        let f_next = f(&x_next);
        if gap <= opts.tolerance {
            w.copy_from_slice(&x_next);
            return Ok(iter);
        }
        if f_next > f_x {
            // restart momentum when the objective goes up
            theta = 1.0;
            y.copy_from_slice(&x);
            continue;
        }
        let theta_next = (1.0 + (1.0 + 4.0 * theta * theta).sqrt()) / 2.0;
        let beta = (theta - 1.0) / theta_next;
        for j in 0..y.len() {
            y[j] = x_next[j] + beta * (x_next[j] - x[j]);
        }
        std::mem::swap(&mut x, &mut x_next);
        f_x = f_next;
        theta = theta_next;
    }
    Err(Error::Solver {
        iterations: opts.max_iterations,
        residual,
    })
}

/// Outcome of one convex step.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDecision {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub played: Vec<f64>,
}

/// Regularized leader with Gamma noise: two perturbed minimizers of
/// `L^{t-1}(w) + <x, w> + (gamma / eta) |w|^2`, probed against each other.
#[derive(Debug, Clone)]
pub struct Cwc {
    domain: ConvexDomain,
    eta: f64,
    grad_bound: f64,
    hessian_bound: f64,
    sum: QuadraticSum,
    warm: [Vec<f64>; 2],
    solver: SolverOptions,
    quad: Vec<f64>,
    lin: Vec<f64>,
}

impl Cwc {
    pub fn new(domain: ConvexDomain, params: &AlgoParams, solver: SolverOptions) -> Result<Self> {
        domain.validate()?;
        params.validate()?;
        let d = domain.dim();
        Ok(Self {
            eta: params.eta,
            grad_bound: params.grad_bound,
            hessian_bound: params.hessian_bound,
            sum: QuadraticSum::zeros(d),
            warm: [vec![0.0; d], vec![0.0; d]],
            solver,
            quad: vec![0.0; d],
            lin: vec![0.0; d],
            domain,
        })
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn cumulative(&self) -> &QuadraticSum {
        &self.sum
    }

    fn perturbed_min<R: Rng + ?Sized>(&mut self, slot: usize, rng: &mut R) -> Result<Vec<f64>> {
        let d = self.domain.dim();
        let x = sample_gamma_vector(d, self.eta, self.grad_bound, rng)?;
        let reg = self.hessian_bound / self.eta;
        for j in 0..d {
            self.quad[j] = self.sum.a[j] + reg;
            self.lin[j] = self.sum.b[j] + x[j];
        }
        let mut w = std::mem::take(&mut self.warm[slot]);
        minimize_diagonal(&self.quad, &self.lin, &self.domain, &mut w, &self.solver)?;
        self.warm[slot] = w.clone();
        Ok(w)
    }

    /// `oracle(a, b)` answers whether `b` beat `a` this step.
    pub fn decide<R: Rng + ?Sized>(
        &mut self,
        oracle: &mut dyn FnMut(&[f64], &[f64]) -> bool,
        rng: &mut R,
    ) -> Result<ConvexDecision> {
        let a = self.perturbed_min(0, rng)?;
        let b = self.perturbed_min(1, rng)?;
        let played = if oracle(&a, &b) { b.clone() } else { a.clone() };
        Ok(ConvexDecision { a, b, played })
    }

    pub fn observe(&mut self, loss: &QuadraticLoss) -> Result<()> {
        loss.validate(self.domain.dim())?;
        self.sum.add(loss);
        Ok(())
    }
}
