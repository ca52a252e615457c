//! Gauss rules for Legendre and Jacobi weights.
//!
//! Nodes come from Newton iteration on the three-term recurrence. When the
//! iteration misbehaves (no convergence, duplicate roots) the nodes are
//! recomputed from the Jacobi matrix (Golub–Welsch) and then polished.

use serde::Serialize;

use super::eigen::tridiagonal_eig_first_components;
use super::polynomial::{legendre_eval, JacobiRecurrence};
use crate::error::{param, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Weight function of a Gauss rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    Legendre,
    /// `(1 - x)^alpha (1 + x)^beta` on `(-1, 1)`.
    Jacobi { alpha: f64, beta: f64 },
}

impl WeightKind {
    fn exponents(self) -> (f64, f64) {
        match self {
            WeightKind::Legendre => (0.0, 0.0),
            WeightKind::Jacobi { alpha, beta } => (alpha, beta),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: (f64, f64),
    pub kind: WeightKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)`; the weight function is implied.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Affine image on `(a, b)`. For a Jacobi weight the transformed weight
    /// is `(b - y)^alpha (y - a)^beta`.
    pub fn to_interval(&self, a: f64, b: f64) -> QuadratureRule {
        let (lo, hi) = self.domain;
        let half = (b - a) / (hi - lo);
        let (alpha, beta) = self.kind.exponents();
        let scale = half.powf(1.0 + alpha + beta);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&x| a + (x - lo) * half).collect(),
            weights: self.weights.iter().map(|&w| w * scale).collect(),
            domain: (a, b),
            kind: self.kind,
        }
    }
}

/// `n`-point Gauss rule on `(-1, 1)`, exact for polynomials of degree
/// `2n - 1` against the weight of `kind`.
pub fn gauss_rule(kind: WeightKind, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return param("quadrature needs at least one point");
    }
    let (alpha, beta) = kind.exponents();
    if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
        return param(format!(
            "Jacobi exponents must exceed -1, got alpha={alpha}, beta={beta}"
        ));
    }
    let (nodes, weights) = match kind {
        WeightKind::Legendre => legendre_newton(n),
        WeightKind::Jacobi { .. } => {
            let rec = JacobiRecurrence::new(alpha, beta, n);
            match jacobi_newton(&rec, n) {
                Some(r) => r,
                None => golub_welsch(&rec, n)?,
            }
        }
    };
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: (-1.0, 1.0),
        kind,
    })
}

fn legendre_newton(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi's guess for the i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL * x.abs().max(1e-3) {
                break;
            }
        }
        if n % 2 == 1 && i == half - 1 {
            x = 0.0;
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn christoffel_weight(rec: &JacobiRecurrence, n: usize, x: f64) -> f64 {
    let t = rec.eval(n, x);
    1.0 / t.p.iter().map(|p| p * p).sum::<f64>()
}

/// Newton with deflation against the roots already found, largest root
/// first; `None` when any root fails to converge or two roots coincide.
fn jacobi_newton(rec: &JacobiRecurrence, n: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    for i in 0..n {
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let x = newton_root(rec, n, theta.cos(), &nodes)?;
        nodes.push(x);
    }
    nodes.sort_by(|a, b| a.total_cmp(b));
    let gap_floor = 1e-10 / (n as f64 * n as f64);
    if nodes.windows(2).any(|w| w[1] - w[0] <= gap_floor) {
        return None;
    }
    let weights = nodes.iter().map(|&x| christoffel_weight(rec, n, x)).collect();
    Some((nodes, weights))
}

fn newton_root(rec: &JacobiRecurrence, n: usize, mut x: f64, found: &[f64]) -> Option<f64> {
    for _ in 0..NEWTON_MAX_ITER {
        let t = rec.eval(n + 1, x);
        let ratio = t.dp[n] / t.p[n];
        let deflate: f64 = found.iter().map(|r| 1.0 / (x - r)).sum();
        let dx = 1.0 / (ratio - deflate);
        if !dx.is_finite() {
            return if t.p[n] == 0.0 { Some(x) } else { None };
        }
        let next = x - dx;
        if next.abs() >= 1.0 {
            // halfway to the boundary instead of leaving the interval
            x = 0.5 * (x + next.signum());
            continue;
        }
        x = next;
        if dx.abs() <= NEWTON_TOL * x.abs().max(1e-3) {
            return Some(x);
        }
    }
    None
}

fn golub_welsch(rec: &JacobiRecurrence, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let diag = &rec.a[..n];
    let off: Vec<f64> = rec.b[1..n].iter().map(|b| b.sqrt()).collect();
    let (vals, first) = tridiagonal_eig_first_components(diag, &off)?;
    let mut nodes = Vec::with_capacity(n);
    for &x0 in &vals {
        // two polishing steps; keep the eigenvalue if Newton wanders
        let mut x = x0;
        for _ in 0..2 {
            let t = rec.eval(n + 1, x);
            let step = t.p[n] / t.dp[n];
            if step.is_finite() && (x - step).abs() < 1.0 {
                x -= step;
            }
        }
        nodes.push(x);
    }
    let weights = nodes
        .iter()
        .zip(&first)
        .map(|(&x, &v0)| {
            let w = christoffel_weight(rec, n, x);
            if w.is_finite() && w > 0.0 {
                w
            } else {
                rec.mu0 * v0 * v0
            }
        })
        .collect();
    Ok((nodes, weights))
}
