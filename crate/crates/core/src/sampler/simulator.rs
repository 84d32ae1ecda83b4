use crate::frame::{simulate_nmbm, FixityVector, FrameModel};
use crate::scalar::Scalar;

/// Failure reported by a simulator for a particular parameter vector.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("simulator failed: {0}")]
pub struct SimulatorError(pub String);

/// Forward model h: [0, 1]^D → R^M. Must be deterministic.
pub trait Simulator<T: Scalar>: Sync {
    fn parameter_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    /// Evaluate h at fixity factors `gamma` (original, not probit, space).
    fn simulate(&self, gamma: &[T]) -> Result<Vec<T>, SimulatorError>;
}

/// nMBM of one vibration mode of a frame.
#[derive(Debug, Clone)]
pub struct FrameSimulator<T> {
    model: FrameModel<T>,
    mode_index: usize,
}

impl<T: Scalar> FrameSimulator<T> {
    /// `mode_index` is 1-based.
    pub fn new(model: FrameModel<T>, mode_index: usize) -> Self {
        assert!(mode_index >= 1, "mode index is 1-based");
        Self { model, mode_index }
    }

    pub fn model(&self) -> &FrameModel<T> {
        &self.model
    }

    pub fn mode_index(&self) -> usize {
        self.mode_index
    }
}

impl<T: Scalar> Simulator<T> for FrameSimulator<T> {
    fn parameter_dim(&self) -> usize {
        self.model.spring_groups()
    }

    fn output_dim(&self) -> usize {
        self.model.moment_sensors().len()
    }

    fn simulate(&self, gamma: &[T]) -> Result<Vec<T>, SimulatorError> {
        let theta = FixityVector::new(gamma.to_vec()).map_err(|e| SimulatorError(e.to_string()))?;
        simulate_nmbm(&self.model, &theta, self.mode_index)
            .map(|v| v.values)
            .map_err(|e| SimulatorError(e.to_string()))
    }
}

/// Simulator backed by a closure, mainly for analytic test problems.
pub struct FnSimulator<F> {
    d: usize,
    m: usize,
    f: F,
}

impl<F> FnSimulator<F> {
    pub fn new(d: usize, m: usize, f: F) -> Self {
        Self { d, m, f }
    }
}

impl<T, F> Simulator<T> for FnSimulator<F>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<Vec<T>, SimulatorError> + Sync,
{
    fn parameter_dim(&self) -> usize {
        self.d
    }

    fn output_dim(&self) -> usize {
        self.m
    }

    fn simulate(&self, gamma: &[T]) -> Result<Vec<T>, SimulatorError> {
        (self.f)(gamma)
    }
}
