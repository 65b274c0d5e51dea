//! Reference mesh of `[0, 1]` and the uniform time grid.

use crate::error::{Error, Result};

/// Partition of the reference interval `[0, 1]` into `I` cells.
///
/// Indexing follows the finite-volume convention: cells are `1..=I`,
/// `centers[0] = 0` and `centers[I + 1] = 1` are the boundary nodes, and
/// `gaps[i]` is the distance between centers `i` and `i + 1` for `0..=I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    edges: Vec<f64>,
    centers: Vec<f64>,
    sizes: Vec<f64>,
    gaps: Vec<f64>,
}

impl Mesh {
    /// Builds a mesh from its `I + 1` edges, which must run strictly
    /// increasing from exactly 0 to exactly 1.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::EmptyMesh);
        }
        if edges[0] != 0.0 || *edges.last().unwrap() != 1.0 {
            return Err(Error::InvalidMesh("edges must start at 0 and end at 1".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh("edges must be strictly increasing".into()));
        }
        let cells = edges.len() - 1;
        let mut centers = Vec::with_capacity(cells + 2);
        centers.push(0.0);
        centers.extend(edges.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        centers.push(1.0);
        let sizes = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let gaps = centers.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            edges,
            centers,
            sizes,
            gaps,
        })
    }

    /// `I` cells of width `1 / I`.
    pub fn uniform(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::EmptyMesh);
        }
        let n = cells as f64;
        let edges = (0..=cells).map(|i| i as f64 / n).collect();
        Self::from_edges(edges)
    }

    /// Number of cells `I`.
    pub fn cells(&self) -> usize {
        self.sizes.len()
    }

    /// Edges `xi_{i+1/2}` for `i = 0..=I`.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Centers `xi_i` for `i = 0..=I+1`, boundary nodes included.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Cell sizes; `sizes()[i - 1]` is `h_i`.
    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    /// `h_i` for `1 <= i <= I`.
    pub fn h(&self, i: usize) -> f64 {
        self.sizes[i - 1]
    }

    /// Center gaps `h_{i+1/2}` for `i = 0..=I`.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Largest cell size.
    pub fn max_size(&self) -> f64 {
        self.sizes.iter().copied().fold(0.0, f64::max)
    }

    /// `sum_i h_i z_i` over the interior cells of a length `I + 2` vector.
    pub fn weighted_sum(&self, z: &[f64]) -> f64 {
        self.sizes.iter().zip(&z[1..=self.cells()]).map(|(h, v)| h * v).sum()
    }
}

/// Uniform time discretization `t_n = n dt`, `n = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("time step must be positive, got {dt}")));
        }
        if steps == 0 {
            return Err(Error::InvalidTimeGrid("need at least one step".into()));
        }
        Ok(Self { dt, steps })
    }

    /// Grid with horizon `t_final`; `t_final / dt` must be an integer up to
    /// rounding.
    pub fn from_horizon(t_final: f64, dt: f64) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("horizon must be positive, got {t_final}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidTimeGrid(format!("time step must be positive, got {dt}")));
        }
        let steps = (t_final / dt).round();
        if steps < 1.0 || (steps * dt - t_final).abs() > 1e-9 * t_final {
            return Err(Error::InvalidTimeGrid(format!(
                "horizon {t_final} is not an integer multiple of dt = {dt}"
            )));
        }
        Self::new(dt, steps as usize)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}
