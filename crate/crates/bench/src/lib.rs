//! Shared fixtures for the criterion benchmarks.

use gconvex_core::{ChebyshevSystem, Expression, FunctionSource, Interval, PointTuple};

pub fn monomial(n: usize) -> ChebyshevSystem {
    ChebyshevSystem::monomial(n, Interval::real_line()).expect("n >= 1")
}

pub fn exponential(n: usize) -> ChebyshevSystem {
    let rates: Vec<f64> = (0..n).map(|i| 0.5 * i as f64).collect();
    ChebyshevSystem::exponential(&rates, Interval::real_line()).expect("n >= 1")
}

/// `k` equispaced points in `[-1, 1]`.
pub fn points(k: usize) -> PointTuple {
    let step = 2.0 / (k.max(2) - 1) as f64;
    PointTuple::ordered((0..k).map(|i| -1.0 + step * i as f64).collect()).expect("distinct")
}

pub fn exp_source() -> FunctionSource {
    FunctionSource::expression(Expression::Exp(1.0))
}
