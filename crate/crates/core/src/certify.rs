//! Grid-sampled certificates of ω-n-convexity.
//!
//! Four independent routes are offered:
//!
//! * [`certify_theorem_a`]: `D_n(x₁,…,x_{n+1}; f) ≥ 0` on ordered tuples.
//! * [`certify_corollary1`]: `[x₂,…,x_{n+1}; f]_ω ≥ [x₁,…,x_n; f]_ω`.
//! * [`scan_theorem2`]: `x ↦ [x₁,…,x_{n-1}, x; f]_ω` is nondecreasing.
//! * [`verify_definition`]: the alternating sign pattern of `f − ω` around an
//!   interpolant through `n` nodes.
//!
//! A certificate only covers the sampled tuples. It is evidence, not a proof
//! on the continuum.

use rayon::prelude::*;
use serde::Serialize;

use crate::dd::gdd;
use crate::det::{det_rows, PointTuple};
use crate::error::{Error, Result};
use crate::interp::interpolate;
use crate::source::FunctionSource;
use crate::system::{classify_on_grid, usable_grid, ChebyshevSystem, Verdict};
use crate::tuples::{ordered_index_tuples, Sampling};

/// Knot-adjacent exclusion radius, relative to the span.
pub const KNOT_EXCLUSION: f64 = 1e-4;

/// Violation threshold `atol + rtol · scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            atol: 1e-10,
            rtol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn at(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Method {
    TheoremA,
    Corollary1,
    Theorem2,
    Definition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertVerdict {
    CertifiedOnSample,
    Violated,
}

/// A violating tuple and the quantity that failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub points: PointTuple,
    /// The violating quantity (`D_n`, a difference of divided differences,
    /// or a signed `f − ω`).
    pub quantity: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityCertificate {
    pub method: Method,
    pub verdict: CertVerdict,
    pub tuples_checked: usize,
    /// Tuples dropped because a divided difference was near-singular.
    pub skipped: usize,
    pub min_value: f64,
    pub witness: Option<Witness>,
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    pub linear_interpolation: bool,
}

/// A decrease of the scanned map between neighbouring scan points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanViolation {
    pub index: usize,
    pub x0: f64,
    pub x1: f64,
    pub value0: f64,
    pub value1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub knots: PointTuple,
    /// `(x, [knots, x; f]_ω)` with strictly increasing `x`.
    pub scan: Vec<(f64, f64)>,
    pub violations: Vec<ScanViolation>,
    pub exclusion_radius: f64,
    pub tolerances: Tolerances,
    pub linear_interpolation: bool,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Span used for knot exclusion: the interval's, or the grid's when unbounded.
pub(crate) fn exclusion_radius(system: &ChebyshevSystem, grid: &[f64]) -> f64 {
    let span = if system.interval().is_bounded() {
        system.interval().effective_span()
    } else if grid.len() >= 2 && grid[grid.len() - 1] > grid[0] {
        grid[grid.len() - 1] - grid[0]
    } else {
        1.0
    };
    KNOT_EXCLUSION * span
}

fn require_positive(system: &ChebyshevSystem, grid: &[f64], sampling: &Sampling) -> Result<()> {
    let c = classify_on_grid(system, grid, sampling)?;
    if c.verdict != Verdict::Positive {
        return Err(Error::Precondition {
            message: format!(
                "system {} is {:?} on the grid, a positive Chebyshev system is required",
                system.name(),
                c.verdict
            ),
            witness: c.witness.map(|w| w.points().to_vec()),
        });
    }
    Ok(())
}

struct Checked {
    value: f64,
    tolerance: f64,
}

/// Folds per-tuple results in tuple order: global minimum, and the most
/// negative violating tuple (earliest on ties) as witness.
fn fold_certificate(
    method: Method,
    pts: &[f64],
    tuples: &[Vec<usize>],
    results: Vec<Option<Checked>>,
    tolerances: Tolerances,
    sampling: Sampling,
    f: &FunctionSource,
) -> ConvexityCertificate {
    let mut min_value = f64::INFINITY;
    let mut witness: Option<(usize, f64, f64)> = None;
    let mut skipped = 0;
    for (i, r) in results.iter().enumerate() {
        let Some(c) = r else {
            skipped += 1;
            continue;
        };
        min_value = min_value.min(c.value);
        if c.value < -c.tolerance && witness.is_none_or(|(_, v, _)| c.value < v) {
            witness = Some((i, c.value, c.tolerance));
        }
    }
    let witness = witness.map(|(i, quantity, tolerance)| Witness {
        points: PointTuple::new(tuples[i].iter().map(|&j| pts[j]).collect()).expect("grid points are distinct"),
        quantity,
        tolerance,
    });
    ConvexityCertificate {
        method,
        verdict: if witness.is_some() {
            CertVerdict::Violated
        } else {
            CertVerdict::CertifiedOnSample
        },
        tuples_checked: results.len() - skipped,
        skipped,
        min_value,
        witness,
        tolerances,
        sampling,
        linear_interpolation: f.uses_linear_interpolation(),
    }
}

/// Checks the sign of `D_n` over ordered `(n + 1)`-tuples of the grid.
pub fn certify_theorem_a(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    grid: &[f64],
    sampling: &Sampling,
    tolerances: &Tolerances,
) -> Result<ConvexityCertificate> {
    let n = system.order();
    let pts = usable_grid(system, grid, n + 1)?;
    require_positive(system, &pts, sampling)?;
    let tuples = ordered_index_tuples(pts.len(), n + 1, sampling);
    let results = tuples
        .par_iter()
        .map(|t| {
            let xs: Vec<f64> = t.iter().map(|&i| pts[i]).collect();
            let d = det_rows(system.basis(), &xs, Some(f))?;
            Ok(Some(Checked {
                value: d.value,
                tolerance: tolerances.at(d.scale),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_certificate(
        Method::TheoremA,
        &pts,
        &tuples,
        results,
        *tolerances,
        *sampling,
        f,
    ))
}

/// Checks that divided differences grow from window `x₁…x_n` to `x₂…x_{n+1}`.
pub fn certify_corollary1(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    grid: &[f64],
    sampling: &Sampling,
    tolerances: &Tolerances,
) -> Result<ConvexityCertificate> {
    let n = system.order();
    if n < 2 {
        return Err(Error::Argument(
            "the window comparison needs a system of order n >= 2".into(),
        ));
    }
    let pts = usable_grid(system, grid, n + 1)?;
    require_positive(system, &pts, sampling)?;
    require_positive(&system.truncate(n - 1)?, &pts, sampling)?;
    let tuples = ordered_index_tuples(pts.len(), n + 1, sampling);
    let results = tuples
        .par_iter()
        .map(|t| {
            let xs: Vec<f64> = t.iter().map(|&i| pts[i]).collect();
            let head = gdd(system, &PointTuple::new(xs[..n].to_vec())?, f);
            let tail = gdd(system, &PointTuple::new(xs[1..].to_vec())?, f);
            match (head, tail) {
                (Ok(h), Ok(t)) => Ok(Some(Checked {
                    value: t.value - h.value,
                    tolerance: tolerances.at(h.value.abs().max(t.value.abs())),
                })),
                (Err(Error::NearSingular { .. }), _) | (_, Err(Error::NearSingular { .. })) => Ok(None),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_certificate(
        Method::Corollary1,
        &pts,
        &tuples,
        results,
        *tolerances,
        *sampling,
        f,
    ))
}

fn check_interior_knots(system: &ChebyshevSystem, knots: &PointTuple) -> Result<()> {
    if !knots.is_ordered() {
        return Err(Error::Argument("knots must be strictly increasing".into()));
    }
    for &k in knots.points() {
        if !system.interval().contains_in_closure(k) {
            return Err(Error::Domain {
                x: k,
                domain: system.interval().to_string(),
            });
        }
        if !system.interval().contains_in_interior(k) {
            return Err(Error::Precondition {
                message: format!("knot {k} lies on the boundary of {}", system.interval()),
                witness: Some(vec![k]),
            });
        }
    }
    Ok(())
}

pub(crate) fn validate_knots(system: &ChebyshevSystem, knots: &PointTuple) -> Result<()> {
    let n = system.order();
    if n < 2 {
        return Err(Error::Argument(
            "knot constructions need a system of order n >= 2".into(),
        ));
    }
    if knots.len() + 1 != n {
        return Err(Error::Argument(format!(
            "a system of order {n} needs {} knots, got {}",
            n - 1,
            knots.len()
        )));
    }
    check_interior_knots(system, knots)
}

/// Scans `x ↦ [knots, x; f]_ω` over the grid and reports decreases.
pub fn scan_theorem2(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    knots: &PointTuple,
    grid: &[f64],
    tolerances: &Tolerances,
) -> Result<MonotonicityReport> {
    validate_knots(system, knots)?;
    let pts = usable_grid(system, grid, 0)?;
    let delta = exclusion_radius(system, &pts);
    let xs: Vec<f64> = pts
        .into_iter()
        .filter(|x| knots.points().iter().all(|k| (x - k).abs() > delta))
        .collect();
    let values = xs
        .par_iter()
        .map(|&x| {
            let tuple = knots.with_point(x)?.sorted();
            gdd(system, &tuple, f).map(|g| g.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let scan: Vec<(f64, f64)> = xs.into_iter().zip(values).collect();
    let violations = scan
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1].1 < w[0].1 - tolerances.at(w[0].1.abs().max(w[1].1.abs())))
        .map(|(index, w)| ScanViolation {
            index,
            x0: w[0].0,
            x1: w[1].0,
            value0: w[0].1,
            value1: w[1].1,
        })
        .collect();
    Ok(MonotonicityReport {
        knots: knots.clone(),
        scan,
        violations,
        exclusion_radius: delta,
        tolerances: *tolerances,
        linear_interpolation: f.uses_linear_interpolation(),
    })
}

/// Sign required of `f − ω` in region `region` (0 = left of `x₁`, `i` =
/// `[xᵢ, x_{i+1}]`, `n` = right of `x_n`) for interpolation at `n` nodes.
pub fn definition_sign(n: usize, region: usize) -> f64 {
    if region == n || (n + region).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Interpolates `f` at `n` nodes and checks the alternating sign pattern of
/// `f − ω` on the grid, skipping points within the exclusion radius of a node.
pub fn verify_definition(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    nodes: &PointTuple,
    grid: &[f64],
    tolerances: &Tolerances,
) -> Result<ConvexityCertificate> {
    let n = system.order();
    if !nodes.is_ordered() {
        return Err(Error::Argument("nodes must be strictly increasing".into()));
    }
    let values = nodes.points().iter().map(|&x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let omega = interpolate(system, nodes, &values)?;
    let pts = usable_grid(system, grid, 0)?;
    let delta = exclusion_radius(system, &pts);
    let xs: Vec<f64> = pts
        .into_iter()
        .filter(|x| nodes.points().iter().all(|k| (x - k).abs() > delta))
        .collect();
    let results = xs
        .par_iter()
        .map(|&x| {
            let fx = f.eval(x)?;
            let region = nodes.points().partition_point(|&k| k < x);
            let signed = definition_sign(n, region) * (fx - omega.eval(x)?);
            Ok(Some(Checked {
                value: signed,
                tolerance: tolerances.at(fx),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let tuples: Vec<Vec<usize>> = (0..xs.len()).map(|i| vec![i]).collect();
    let sampling = Sampling {
        budget: xs.len(),
        seed: 0,
    };
    Ok(fold_certificate(
        Method::Definition,
        &xs,
        &tuples,
        results,
        *tolerances,
        sampling,
        f,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::Expression;
    use crate::system::{uniform_grid, BasisFunction, Interval};

    fn poly(n: usize) -> ChebyshevSystem {
        ChebyshevSystem::monomial(n, Interval::real_line()).unwrap()
    }

    fn expr(e: Expression) -> FunctionSource {
        FunctionSource::expression(e)
    }

    fn defaults() -> (Sampling, Tolerances) {
        (Sampling::default(), Tolerances::default())
    }

    #[test]
    fn bordered_sign_examples() {
        let (s, t) = defaults();
        let c = certify_theorem_a(
            &poly(2),
            &expr(Expression::Exp(1.0)),
            &uniform_grid(-1.0, 1.0, 50),
            &s,
            &t,
        )
        .unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);
        assert!(c.min_value > 0.0);
        assert_eq!(c.tuples_checked, 19600);

        let grid = uniform_grid(-1.0, 1.0, 30);
        let c = certify_theorem_a(&poly(3), &expr(Expression::Monomial(3)), &grid, &s, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);

        let c = certify_theorem_a(&poly(3), &expr(Expression::NegMonomial(3)), &grid, &s, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::Violated);
        let w = c.witness.unwrap();
        let d = crate::det::d_det(&poly(3), &w.points, &expr(Expression::NegMonomial(3))).unwrap();
        assert_eq!(d.value, w.quantity);
        assert!(d.value < -w.tolerance);
    }

    #[test]
    fn bordered_sign_rejects_non_positive_system() {
        let (s, t) = defaults();
        let neg = ChebyshevSystem::new(
            "-1",
            vec![BasisFunction::Constant { value: -1.0 }],
            Interval::real_line(),
        )
        .unwrap();
        let err =
            certify_theorem_a(&neg, &expr(Expression::Monomial(1)), &uniform_grid(0.0, 1.0, 5), &s, &t).unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
    }

    #[test]
    fn corollary1_examples() {
        let (s, t) = defaults();
        let grid = uniform_grid(-1.0, 1.0, 30);
        let last = FunctionSource::from_basis(&BasisFunction::Monomial { power: 2 });
        let c = certify_corollary1(&poly(3), &last, &grid, &s, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);
        assert!(c.min_value.abs() < 1e-12);

        let c = certify_corollary1(&poly(2), &expr(Expression::Monomial(2)), &grid, &s, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);

        let c = certify_corollary1(&poly(3), &expr(Expression::NegMonomial(3)), &grid, &s, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::Violated);
    }

    #[test]
    fn scan_theorem2_examples() {
        let t = Tolerances::default();
        let knots = PointTuple::new(vec![0.0, 1.0]).unwrap();
        let grid = uniform_grid(-2.0, 3.0, 101);
        let r = scan_theorem2(&poly(3), &expr(Expression::Monomial(3)), &knots, &grid, &t).unwrap();
        assert!(r.is_monotone());
        // grid steps of 0.05 hit both knots exactly
        assert_eq!(r.scan.len(), 99);
        for &(x, v) in &r.scan {
            assert!((v - (1.0 + x)).abs() < 1e-10);
        }

        let flat = FunctionSource::from_basis(&BasisFunction::Monomial { power: 2 });
        let r = scan_theorem2(&poly(3), &flat, &knots, &grid, &t).unwrap();
        assert!(r.is_monotone());

        let r = scan_theorem2(&poly(3), &expr(Expression::NegMonomial(3)), &knots, &grid, &t).unwrap();
        assert!(!r.is_monotone());
    }

    #[test]
    fn scan_rejects_boundary_knots() {
        let t = Tolerances::default();
        let s = ChebyshevSystem::monomial(2, Interval::closed(0.0, 1.0).unwrap()).unwrap();
        let err = scan_theorem2(
            &s,
            &expr(Expression::Monomial(2)),
            &PointTuple::new(vec![0.0]).unwrap(),
            &uniform_grid(0.0, 1.0, 11),
            &t,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
    }

    #[test]
    fn definition_examples() {
        let t = Tolerances::default();
        let grid = uniform_grid(-1.0, 2.0, 61);
        let nodes = PointTuple::new(vec![0.0, 1.0]).unwrap();
        let c = verify_definition(&poly(2), &expr(Expression::Monomial(2)), &nodes, &grid, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);

        let nodes = PointTuple::new(vec![0.0, 1.0, 2.0]).unwrap();
        let grid = uniform_grid(-1.0, 3.0, 81);
        let c = verify_definition(&poly(3), &expr(Expression::Monomial(3)), &nodes, &grid, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);
        let c = verify_definition(&poly(3), &expr(Expression::NegMonomial(3)), &nodes, &grid, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::Violated);

        let combo = FunctionSource::combination(vec![(2.0, Expression::Const(1.0)), (-1.0, Expression::Monomial(1))]);
        let c = verify_definition(&poly(2), &combo, &PointTuple::new(vec![0.0, 1.0]).unwrap(), &grid, &t).unwrap();
        assert_eq!(c.verdict, CertVerdict::CertifiedOnSample);
        assert!(c.min_value.abs() < 1e-12);
    }

    #[test]
    fn definition_sign_pattern_for_cubic() {
        // regions: left, [x1,x2], [x2,x3], right
        let signs: Vec<f64> = (0..=3).map(|r| definition_sign(3, r)).collect();
        assert_eq!(signs, vec![-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(definition_sign(2, 0), 1.0);
        assert_eq!(definition_sign(2, 1), -1.0);
        assert_eq!(definition_sign(2, 2), 1.0);
    }
}
