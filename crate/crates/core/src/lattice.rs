//! Finite-difference discretization on a truncated line with Dirichlet walls.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::opalg::{derive_metric, DeriveError, Variant, XFunction, XFunctionError};

/// Nodes closer to the origin than this count as sitting on the singularity.
const SINGULAR_RADIUS: f64 = 1e-12;
/// Largest `|Q|` whose exponential is still comfortably representable.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("grid needs L > 0 and N >= 3 (got L = {l}, N = {n})")]
    InvalidGrid { l: f64, n: usize },
    #[error("x^{epsilon} is singular at node {index} (x = {x}); use an even N")]
    Singularity { epsilon: i32, index: usize, x: f64 },
    #[error("metric weight at node {index} overflows (|Q| = {q:.3e} > 700)")]
    WeightOverflow { index: usize, q: f64 },
    #[error("ln(x) is undefined at node {index} (x = {x})")]
    LogDomain { index: usize, x: f64 },
    #[error(transparent)]
    Metric(#[from] DeriveError),
}

/// Uniform grid of `N` interior nodes on `(-L, L)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    half_width: f64,
    n: usize,
    spacing: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(half_width: f64, n: usize) -> Result<Self, LatticeError> {
        if !(half_width > 0.0 && half_width.is_finite()) || n < 3 {
            return Err(LatticeError::InvalidGrid { l: half_width, n });
        }
        let spacing = 2.0 * half_width / (n as f64 + 1.0);
        // Written as L (2i - N - 1) / (N + 1) so the middle node of an odd grid is exactly 0.
        let nodes = (1..=n)
            .map(|i| half_width * (2.0 * i as f64 - n as f64 - 1.0) / (n as f64 + 1.0))
            .collect();
        Ok(Self { half_width, n, spacing, nodes })
    }

    /// A grid wide enough that the closed-form ground state `exp(-g x^(eps+1) / (2(eps+1)))`
    /// has dropped below `1e-10` at the walls, with 20% slack. Only meaningful for odd
    /// `epsilon >= 1` and `g > 0`.
    pub fn for_ground_state(epsilon: i32, g: f64, n: usize) -> Result<Self, LatticeError> {
        let m = (epsilon + 1) as f64;
        let l = 1.2 * (2.0 * m * 23.0 / g).powf(1.0 / m);
        Self::new(l, n)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    fn check_singular(&self, epsilon: i32) -> Result<(), LatticeError> {
        if epsilon >= 0 {
            return Ok(());
        }
        match self.nodes.iter().position(|x| x.abs() < SINGULAR_RADIUS) {
            Some(index) => Err(LatticeError::Singularity { epsilon, index, x: self.nodes[index] }),
            None => Ok(()),
        }
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal must have N - 1 entries");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.as_general().apply(v)
    }

    pub fn as_general(&self) -> TridiagonalMatrix {
        TridiagonalMatrix { diag: self.diag.clone(), sub: self.off.clone(), sup: self.off.clone() }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.as_general().to_dense()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        self.as_general().write_csv(out)
    }
}

/// Real tridiagonal matrix; `sub[j]` is entry `(j+1, j)` and `sup[j]` is `(j, j+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
    #[serde(rename = "super")]
    pub sup: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, sub: Vec<f64>, sup: Vec<f64>) -> Self {
        assert_eq!(sub.len() + 1, diag.len().max(1), "sub-diagonal must have N - 1 entries");
        assert_eq!(sup.len(), sub.len(), "super-diagonal must have N - 1 entries");
        Self { diag, sub, sup }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.sub[i - 1].abs() } else { 0.0 };
                let right = self.sup.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * v[i];
                if i > 0 {
                    acc += self.sub[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * v[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self { diag: self.diag.clone(), sub: self.sup.clone(), sup: self.sub.clone() }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            out[i][i] = self.diag[i];
            if i + 1 < n {
                out[i + 1][i] = self.sub[i];
                out[i][i + 1] = self.sup[i];
            }
        }
        out
    }

    /// One row per matrix row: `diag,sub,super`, where `sub` is the entry left
    /// of the diagonal and `super` the one right of it. Missing cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["diag", "sub", "super"])?;
        let n = self.len();
        let cell = |v: Option<&f64>| v.map_or(String::new(), |v| format!("{v:.16e}"));
        for i in 0..n {
            let sub = if i > 0 { self.sub.get(i - 1) } else { None };
            w.write_record([cell(Some(&self.diag[i])), cell(sub), cell(self.sup.get(i))])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn power(x: f64, k: i32) -> f64 {
    x.powi(k)
}

/// `c x^k`, taken as zero when `c` is, so that `0 * x^-1` at the origin stays finite.
fn scaled_power(c: f64, x: f64, k: i32) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * power(x, k)
    }
}

/// `V(x) = g^2 x^(2 eps) / 4 - g eps x^(eps - 1) / 2`.
pub fn hermitian_potential(epsilon: i32, g: f64, x: f64) -> f64 {
    0.25 * g * g * power(x, 2 * epsilon) - scaled_power(0.5 * g * epsilon as f64, x, epsilon - 1)
}

/// The Hermitian image's potential for either class; the symmetrized class
/// drops the `x^(eps - 1)` term.
pub fn hermitian_potential_for(epsilon: i32, g: f64, x: f64, variant: Variant) -> f64 {
    match variant {
        Variant::Plain => hermitian_potential(epsilon, g, x),
        Variant::Symmetrized => 0.25 * g * g * power(x, 2 * epsilon),
    }
}

/// Discretized `h = p^2 + V`.
pub fn discretize_hermitian(epsilon: i32, g: f64, grid: &Grid) -> Result<SymTridiagonal, LatticeError> {
    discretize_hermitian_for(epsilon, g, grid, Variant::Plain)
}

/// Discretized Hermitian image of the given class.
pub fn discretize_hermitian_for(
    epsilon: i32,
    g: f64,
    grid: &Grid,
    variant: Variant,
) -> Result<SymTridiagonal, LatticeError> {
    grid.check_singular(epsilon)?;
    let inv = 1.0 / (grid.spacing * grid.spacing);
    let diag = grid.nodes.iter().map(|&x| 2.0 * inv + hermitian_potential_for(epsilon, g, x, variant)).collect();
    let off = vec![-inv; grid.n - 1];
    Ok(SymTridiagonal { diag, off })
}

/// Discretized `H = -d^2/dx^2 + g x^eps d/dx`, a real non-symmetric matrix.
/// The symmetrized class adds `(g eps / 2) x^(eps - 1)` to the diagonal.
pub fn discretize_nonhermitian(
    epsilon: i32,
    g: f64,
    grid: &Grid,
    variant: Variant,
) -> Result<TridiagonalMatrix, LatticeError> {
    grid.check_singular(epsilon)?;
    let d = grid.spacing;
    let inv = 1.0 / (d * d);
    let x = &grid.nodes;
    let diag = x
        .iter()
        .map(|&xi| match variant {
            Variant::Plain => 2.0 * inv,
            Variant::Symmetrized => 2.0 * inv + scaled_power(0.5 * g * epsilon as f64, xi, epsilon - 1),
        })
        .collect();
    let drift = |xi: f64| g * power(xi, epsilon) / (2.0 * d);
    let sup = (0..grid.n - 1).map(|i| -inv + drift(x[i])).collect();
    let sub = (0..grid.n - 1).map(|i| -inv - drift(x[i + 1])).collect();
    Ok(TridiagonalMatrix { diag, sub, sup })
}

/// `Q(x_i)` at every node, checked against the representability bound.
fn exponents(q: &XFunction, g: f64, grid: &Grid) -> Result<Vec<f64>, LatticeError> {
    grid.nodes
        .iter()
        .enumerate()
        .map(|(index, &x)| {
            let v = q.eval(x, g).map_err(|e| match e {
                XFunctionError::LogDomain { x } => LatticeError::LogDomain { index, x },
                _ => unreachable!("eval only fails on the log domain"),
            })?;
            if !v.is_finite() || v.abs() > MAX_EXPONENT {
                return Err(LatticeError::WeightOverflow { index, q: v });
            }
            Ok(v)
        })
        .collect()
}

/// `exp(-Q(x_i))`, or `exp(-Q(x_i)/2)` when `half` is set.
pub fn metric_weights(q: &XFunction, g: f64, grid: &Grid, half: bool) -> Result<Vec<f64>, LatticeError> {
    let scale = if half { 0.5 } else { 1.0 };
    Ok(exponents(q, g, grid)?.into_iter().map(|v| (-scale * v).exp()).collect())
}

/// The smooth test profile used by [`similarity_residual`]: vanishes to fourth
/// order at the walls and has no parity.
pub fn residual_probe(grid: &Grid) -> Vec<f64> {
    let l = grid.half_width;
    grid.nodes
        .iter()
        .map(|&x| (1.0 - (x / l).powi(2)).powi(4) * (1.0 + x / (2.0 * l)))
        .collect()
}

/// Max-norm of `(D H D^-1 - h) f` on the probe `f`, with `D = diag(exp(-Q/2))`.
///
/// The entrywise difference of the two matrices is O(1): the discrete
/// similarity redistributes the potential between diagonal and off-diagonal
/// entries. Its action on a smooth profile is what converges, at O(Δ²).
pub fn similarity_residual(epsilon: i32, g: f64, grid: &Grid) -> Result<f64, LatticeError> {
    let h_mat = discretize_nonhermitian(epsilon, g, grid, Variant::Plain)?;
    let h_herm = discretize_hermitian(epsilon, g, grid)?;
    let q = derive_metric(epsilon)?;
    let qv = exponents(&q, g, grid)?;
    let f = residual_probe(grid);
    let n = grid.n;

    let mut worst: f64 = 0.0;
    for i in 0..n {
        // (D H D^-1)_{ij} = H_{ij} exp((Q_j - Q_i) / 2)
        let mut acc = (h_mat.diag[i] - h_herm.diag[i]) * f[i];
        if i > 0 {
            let sim = h_mat.sub[i - 1] * (0.5 * (qv[i - 1] - qv[i])).exp();
            acc += (sim - h_herm.off[i - 1]) * f[i - 1];
        }
        if i + 1 < n {
            let sim = h_mat.sup[i] * (0.5 * (qv[i + 1] - qv[i])).exp();
            acc += (sim - h_herm.off[i]) * f[i + 1];
        }
        worst = worst.max(acc.abs());
    }
    Ok(worst)
}
