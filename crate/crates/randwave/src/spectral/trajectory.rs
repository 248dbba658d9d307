use num_complex::Complex64;
use serde::Serialize;

use super::{sobolev_norm, GridSpec, SpectralError, SpectralField};

/// Uniform nodes `t_m = m T / (M_t − 1)`, `m = 0, …, M_t − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    horizon: f64,
    nodes: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, nodes: usize) -> Result<Self, SpectralError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SpectralError::InvalidTimeGrid(format!("horizon must be positive, got {horizon}")));
        }
        if nodes < 2 {
            return Err(SpectralError::InvalidTimeGrid(format!("need at least 2 nodes, got {nodes}")));
        }
        Ok(Self { horizon, nodes })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn dt(&self) -> f64 {
        self.horizon / (self.nodes - 1) as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        if m + 1 == self.nodes {
            self.horizon
        } else {
            m as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.nodes).map(|m| self.node(m)).collect()
    }

    /// Same horizon with every interval halved; old node `m` becomes node `2m`.
    pub fn refined(&self) -> TimeGrid {
        TimeGrid { horizon: self.horizon, nodes: 2 * self.nodes - 1 }
    }
}

/// A field sampled at every node of a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTrajectory {
    grid: GridSpec,
    time_grid: TimeGrid,
    snapshots: Vec<SpectralField>,
}

impl FieldTrajectory {
    pub fn new(time_grid: TimeGrid, snapshots: Vec<SpectralField>) -> Result<Self, SpectralError> {
        if snapshots.len() != time_grid.nodes() {
            return Err(SpectralError::LengthMismatch {
                expected: time_grid.nodes(),
                got: snapshots.len(),
            });
        }
        let grid = *snapshots[0].grid();
        if snapshots.iter().any(|s| *s.grid() != grid) {
            return Err(SpectralError::GridMismatch);
        }
        Ok(Self { grid, time_grid, snapshots })
    }

    pub fn zeros(grid: GridSpec, time_grid: TimeGrid) -> Self {
        Self { grid, time_grid, snapshots: vec![SpectralField::zeros(grid); time_grid.nodes()] }
    }

    /// The same field at every node.
    pub fn constant(field: &SpectralField, time_grid: TimeGrid) -> Self {
        Self { grid: *field.grid(), time_grid, snapshots: vec![field.clone(); time_grid.nodes()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn snapshots(&self) -> &[SpectralField] {
        &self.snapshots
    }

    pub fn snapshots_mut(&mut self) -> &mut [SpectralField] {
        &mut self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<SpectralField> {
        self.snapshots
    }

    pub fn snapshot(&self, m: usize) -> &SpectralField {
        &self.snapshots[m]
    }

    pub fn last(&self) -> &SpectralField {
        self.snapshots.last().expect("trajectory has at least two nodes")
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn ensure_compatible(&self, other: &FieldTrajectory) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        if self.time_grid != other.time_grid {
            return Err(SpectralError::TimeGridMismatch);
        }
        Ok(())
    }

    /// `self += alpha · other`, node by node.
    pub fn axpy(&mut self, alpha: Complex64, other: &FieldTrajectory) -> Result<(), SpectralError> {
        self.ensure_compatible(other)?;
        for (a, b) in self.snapshots.iter_mut().zip(&other.snapshots) {
            a.axpy(alpha, b);
        }
        Ok(())
    }

    pub fn add(&mut self, other: &FieldTrajectory) -> Result<(), SpectralError> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    /// `max_m ‖u(t_m)‖_{H^σ}`.
    pub fn sup_norm(&self, sigma: f64) -> f64 {
        self.snapshots.iter().map(|s| sobolev_norm(s, sigma)).fold(0.0, f64::max)
    }

    /// `max_m ‖u(t_m) − w(t_m)‖_{H^σ}`.
    pub fn sup_distance(&self, other: &FieldTrajectory, sigma: f64) -> Result<f64, SpectralError> {
        self.ensure_compatible(other)?;
        let mut worst: f64 = 0.0;
        for (a, b) in self.snapshots.iter().zip(&other.snapshots) {
            let mut d = a.clone();
            d -= b;
            worst = worst.max(sobolev_norm(&d, sigma));
        }
        Ok(worst)
    }
}
