//! The black-box contract: any model mapping a graph over the shared node
//! universe to a class-1 probability in `[0, 1]`.
//!
//! Missing edges count as weight 0 and unweighted edges as weight 1, so
//! average-masked (weighted) graphs are valid inputs everywhere.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::Result;
use crate::graph::Graph;

mod external;
mod ground_truth;
mod linear;

pub use external::{serve, ExternalBlackBox, HANDSHAKE};
pub use ground_truth::GroundTruthScorer;
pub use linear::{train_linear_surrogate, LinearSurrogate, TrainConfig};

pub trait BlackBox: Send + Sync {
    fn evaluate(&self, g: &Graph) -> Result<f64>;

    fn evaluate_batch(&self, graphs: &[Graph]) -> Result<Vec<f64>> {
        graphs.iter().map(|g| self.evaluate(g)).collect()
    }

    /// Whether concurrent calls to `evaluate` are safe and independent.
    fn concurrent(&self) -> bool {
        false
    }
}

impl<B: BlackBox + ?Sized> BlackBox for &B {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        (**self).evaluate(g)
    }

    fn evaluate_batch(&self, graphs: &[Graph]) -> Result<Vec<f64>> {
        (**self).evaluate_batch(graphs)
    }

    fn concurrent(&self) -> bool {
        (**self).concurrent()
    }
}

impl<B: BlackBox + ?Sized> BlackBox for Box<B> {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        (**self).evaluate(g)
    }

    fn evaluate_batch(&self, graphs: &[Graph]) -> Result<Vec<f64>> {
        (**self).evaluate_batch(graphs)
    }

    fn concurrent(&self) -> bool {
        (**self).concurrent()
    }
}

/// Wraps a black-box and counts every graph it is asked to evaluate.
pub struct Counting<B> {
    inner: B,
    calls: AtomicUsize,
}

impl<B: BlackBox> Counting<B> {
    pub fn new(inner: B) -> Self {
        Counting {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::SeqCst);
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: BlackBox> BlackBox for Counting<B> {
    fn evaluate(&self, g: &Graph) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(g)
    }

    fn evaluate_batch(&self, graphs: &[Graph]) -> Result<Vec<f64>> {
        self.calls.fetch_add(graphs.len(), Ordering::SeqCst);
        self.inner.evaluate_batch(graphs)
    }

    fn concurrent(&self) -> bool {
        self.inner.concurrent()
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
