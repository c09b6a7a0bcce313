//! Counting wrapper around the conserved to primitive map.

use crate::error::RecoveryFailure;
use crate::real::Real;
use crate::systems::HyperbolicSystem;
use std::sync::atomic::{AtomicU64, Ordering};

/// Tallies of conserved to primitive conversions, split between those made
/// by the solver itself and those made for output and diagnostics.
#[derive(Debug, Default)]
pub struct ConversionCounter {
    solver: AtomicU64,
    diagnostic: AtomicU64,
}

impl ConversionCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add_solver(&self, n: u64) {
        if n > 0 {
            self.solver.fetch_add(n, Ordering::Relaxed);
        }
    }

    pub fn solver_count(&self) -> u64 {
        self.solver.load(Ordering::Relaxed)
    }

    pub fn diagnostic_count(&self) -> u64 {
        self.diagnostic.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.solver.store(0, Ordering::Relaxed);
        self.diagnostic.store(0, Ordering::Relaxed);
    }

    /// Conversion performed by the solver.
    #[inline]
    pub fn convert<T: Real, S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        q: &[T],
        v: &mut [T],
    ) -> Result<(), RecoveryFailure> {
        self.solver.fetch_add(1, Ordering::Relaxed);
        sys.cons_to_prim(q, v)
    }

    /// Conversion performed for output or diagnostics.
    pub fn convert_diagnostic<T: Real, S: HyperbolicSystem<T> + ?Sized>(
        &self,
        sys: &S,
        q: &[T],
        v: &mut [T],
    ) -> Result<(), RecoveryFailure> {
        self.diagnostic.fetch_add(1, Ordering::Relaxed);
        sys.cons_to_prim(q, v)
    }
}
