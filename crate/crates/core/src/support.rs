//! Support-type combinations for ω-n-convex functions.
//!
//! Given knots `x₁ < … < x_{n-1}` in the interior of the interval, the last
//! coefficient is the right-hand limit
//!
//! ```text
//! c_n = lim_{x → x_{n-1}⁺} [x₁,…,x_{n-1}, x; f]_ω
//! ```
//!
//! and the remaining coefficients make `ω` interpolate `f` at the knots. For an
//! ω-n-convex `f` the difference `f − ω` then alternates in sign across the
//! knots and is nonnegative to the right of `x_{n-1}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{exclusion_radius, validate_knots, Tolerances};
use crate::dd::gdd;
use crate::det::PointTuple;
use crate::error::{Error, Result};
use crate::interp::{constrained_interpolate, OmegaCombination};
use crate::serde_ext::extended_real;
use crate::source::{FunctionSource, TableInterpolation};
use crate::system::{classify_on_grid, usable_grid, ChebyshevSystem, Verdict};
use crate::tuples::Sampling;

/// Settings of the one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_halvings: u32,
    /// Initial step as a fraction of the interval span.
    pub initial_fraction: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            atol: 1e-10,
            rtol: 1e-8,
            max_halvings: 40,
            initial_fraction: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDiagnostics {
    /// `(h, [knots, x_{n-1} + h; f]_ω)` for geometrically decreasing `h`.
    pub h_sequence: Vec<(f64, f64)>,
    pub converged: bool,
    pub estimate: f64,
    /// Whether the values never increased as `h` decreased.
    pub monotone_ok: bool,
    pub options: LimitOptions,
}

/// Which side of zero `f − ω` must stay on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RequiredSign {
    NonPositive,
    NonNegative,
}

impl RequiredSign {
    fn factor(self) -> f64 {
        match self {
            RequiredSign::NonPositive => -1.0,
            RequiredSign::NonNegative => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternViolation {
    pub x: f64,
    /// `f(x) − ω(x)`
    pub difference: f64,
    pub tolerance: f64,
}

/// One subinterval `I_k` cut out by the knots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    /// 1-based index `k`.
    pub index: usize,
    #[serde(serialize_with = "extended_real")]
    pub lo: f64,
    #[serde(serialize_with = "extended_real")]
    pub hi: f64,
    pub required: RequiredSign,
    pub points_checked: usize,
    pub violations: Vec<PatternViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignPatternReport {
    pub segments: Vec<Segment>,
    pub overall: bool,
    /// Grid points skipped for lying within the exclusion radius of a knot.
    pub excluded: usize,
    pub exclusion_radius: f64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportResult {
    pub knots: PointTuple,
    pub omega: OmegaCombination,
    pub c_n: LimitDiagnostics,
    pub pattern: SignPatternReport,
    pub linear_interpolation: bool,
}

/// Required sign of `f − ω` on `I_k`, `k = 1..=n`.
pub fn required_sign(n: usize, k: usize) -> RequiredSign {
    if k == n || (n - k) % 2 == 1 {
        RequiredSign::NonNegative
    } else {
        RequiredSign::NonPositive
    }
}

/// Estimates `c_n` by halving `h` from `h₀ = min(initial_fraction · span,
/// distance to the upper end / 2)` until two consecutive values agree.
pub fn estimate_cn(system: &ChebyshevSystem, f: &FunctionSource, knots: &PointTuple) -> Result<LimitDiagnostics> {
    estimate_cn_with(system, f, knots, &LimitOptions::default())
}

pub fn estimate_cn_with(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    knots: &PointTuple,
    options: &LimitOptions,
) -> Result<LimitDiagnostics> {
    validate_knots(system, knots)?;
    let anchor = knots.points()[knots.len() - 1];
    let interval = system.interval();
    let mut h0 = options.initial_fraction * interval.effective_span();
    if interval.hi().is_finite() {
        h0 = h0.min(0.5 * (interval.hi() - anchor));
    }
    let delta = system.min_separation();
    if !(h0 > delta) {
        return Err(Error::Geometry(format!(
            "initial step {h0:e} does not exceed the minimum separation {delta:e}"
        )));
    }
    if let Some(table) = f.as_table() {
        check_table_resolution(table, anchor, h0)?;
    }

    let mut trace: Vec<(f64, f64)> = Vec::new();
    let mut converged = false;
    for k in 0..=options.max_halvings {
        let h = h0 * 0.5f64.powi(k as i32);
        if h < delta {
            break;
        }
        let value = gdd(system, &knots.with_point(anchor + h)?, f)?.value;
        let done = trace
            .last()
            .is_some_and(|&(_, prev)| (value - prev).abs() <= options.atol + options.rtol * value.abs());
        trace.push((h, value));
        if done {
            converged = true;
            break;
        }
    }
    let last = trace.last().map_or(f64::NAN, |p| p.1);
    if !converged {
        return Err(Error::LimitDiverged { trace, last });
    }
    let monotone_ok = trace
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 + options.atol + options.rtol * w[0].1.abs());
    Ok(LimitDiagnostics {
        h_sequence: trace,
        converged,
        estimate: last,
        monotone_ok,
        options: *options,
    })
}

fn check_table_resolution(table: &crate::source::Table, anchor: f64, h0: f64) -> Result<()> {
    if table.interpolation() != TableInterpolation::Linear {
        return Err(Error::Resolution(
            "the one-sided limit needs a table with linear interpolation".into(),
        ));
    }
    let xs = table.abscissae();
    let lo = xs.partition_point(|&x| x <= anchor).saturating_sub(1);
    let hi = xs.partition_point(|&x| x < anchor + h0);
    if hi >= xs.len() || xs[lo] > anchor {
        return Err(Error::Resolution(format!(
            "table does not cover [{anchor}, {}]",
            anchor + h0
        )));
    }
    let widest = xs[lo..=hi].windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let allowed = h0 / 64.0;
    if widest > allowed {
        return Err(Error::Resolution(format!(
            "table spacing {widest:e} near {anchor} exceeds {allowed:e}"
        )));
    }
    Ok(())
}

/// Checks the sign of `f − ω` on every subinterval cut out by the knots.
pub fn verify_sign_pattern(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    omega: &OmegaCombination,
    knots: &PointTuple,
    grid: &[f64],
    tolerances: &Tolerances,
) -> Result<SignPatternReport> {
    let n = system.order();
    if knots.len() + 1 != n || !knots.is_ordered() {
        return Err(Error::Argument(format!(
            "need {} strictly increasing knots",
            n.saturating_sub(1)
        )));
    }
    let pts = usable_grid(system, grid, 0)?;
    let delta = exclusion_radius(system, &pts);
    let k = knots.points();

    let mut segments: Vec<Segment> = (1..=n)
        .map(|index| Segment {
            index,
            lo: if index == 1 {
                system.interval().lo()
            } else {
                k[index - 2]
            },
            hi: if index == n {
                system.interval().hi()
            } else {
                k[index - 1]
            },
            required: required_sign(n, index),
            points_checked: 0,
            violations: Vec::new(),
        })
        .collect();

    let kept: Vec<f64> = pts
        .iter()
        .copied()
        .filter(|x| k.iter().all(|kn| (x - kn).abs() > delta))
        .collect();
    let excluded = pts.len() - kept.len();
    let diffs = kept
        .par_iter()
        .map(|&x| {
            let fx = f.eval(x)?;
            Ok((fx - omega.eval(x)?, tolerances.at(fx)))
        })
        .collect::<Result<Vec<_>>>()?;

    for (&x, (difference, tolerance)) in kept.iter().zip(diffs) {
        let seg = &mut segments[k.partition_point(|&kn| kn < x)];
        seg.points_checked += 1;
        if seg.required.factor() * difference < -tolerance {
            seg.violations.push(PatternViolation {
                x,
                difference,
                tolerance,
            });
        }
    }
    let overall = segments.iter().all(|s| s.violations.is_empty());
    Ok(SignPatternReport {
        segments,
        overall,
        excluded,
        exclusion_radius: delta,
        tolerances: *tolerances,
    })
}

/// Estimates `c_n`, interpolates at the knots and checks the sign pattern.
///
/// Pattern violations are reported, not raised: they are evidence that `f`
/// is not ω-n-convex.
pub fn build_support(
    system: &ChebyshevSystem,
    f: &FunctionSource,
    knots: &PointTuple,
    grid: &[f64],
    sampling: &Sampling,
    tolerances: &Tolerances,
) -> Result<SupportResult> {
    validate_knots(system, knots)?;
    let n = system.order();
    let pts = usable_grid(system, grid, n)?;
    for m in [n, n - 1] {
        let s = system.truncate(m)?;
        let c = classify_on_grid(&s, &pts, sampling)?;
        if c.verdict != Verdict::Positive {
            return Err(Error::Precondition {
                message: format!("system {} is {:?} on the grid, must be positive", s.name(), c.verdict),
                witness: c.witness.map(|w| w.points().to_vec()),
            });
        }
    }
    let c_n = estimate_cn(system, f, knots)?;
    let omega = constrained_interpolate(system, knots, f, c_n.estimate)?;
    let pattern = verify_sign_pattern(system, f, &omega, knots, &pts, tolerances)?;
    Ok(SupportResult {
        knots: knots.clone(),
        omega,
        c_n,
        pattern,
        linear_interpolation: f.uses_linear_interpolation(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::{parse_table, Expression};
    use crate::system::{uniform_grid, BasisFunction, Interval};

    fn poly(n: usize) -> ChebyshevSystem {
        ChebyshevSystem::monomial(n, Interval::real_line()).unwrap()
    }

    fn expr(e: Expression) -> FunctionSource {
        FunctionSource::expression(e)
    }

    fn knots(v: &[f64]) -> PointTuple {
        PointTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn required_signs_follow_alternation() {
        // n = 3: f − ω ≤ 0 left of x₁, ≥ 0 on (x₁, x₂), ≥ 0 right of x₂
        assert_eq!(required_sign(3, 1), RequiredSign::NonPositive);
        assert_eq!(required_sign(3, 2), RequiredSign::NonNegative);
        assert_eq!(required_sign(3, 3), RequiredSign::NonNegative);
        // n = 2: classical support, f − ω ≥ 0 on both sides
        assert_eq!(required_sign(2, 1), RequiredSign::NonNegative);
        assert_eq!(required_sign(2, 2), RequiredSign::NonNegative);
        assert_eq!(required_sign(4, 1), RequiredSign::NonNegative);
        assert_eq!(required_sign(4, 2), RequiredSign::NonPositive);
    }

    #[test]
    fn estimate_cn_examples() {
        let d = estimate_cn(&poly(3), &expr(Expression::Monomial(3)), &knots(&[0.0, 1.0])).unwrap();
        assert!(d.converged && d.monotone_ok);
        assert!((d.estimate - 2.0).abs() < 1e-6);
        for &(h, v) in &d.h_sequence {
            assert!((v - (2.0 + h)).abs() < 1e-7, "h={h} v={v}");
        }

        let d = estimate_cn(&poly(2), &expr(Expression::Exp(1.0)), &knots(&[0.0])).unwrap();
        assert!(d.converged && d.monotone_ok);
        assert!((d.estimate - 1.0).abs() < 1e-5);

        let last = FunctionSource::from_basis(&BasisFunction::Monomial { power: 2 });
        let d = estimate_cn(&poly(3), &last, &knots(&[-0.5, 0.5])).unwrap();
        assert_eq!(d.h_sequence.len(), 2);
        assert!(d.h_sequence.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn estimate_cn_reports_divergence() {
        // |x|^(1/2)-like kink: use a table with a corner sharper than any tolerance
        let s = ChebyshevSystem::monomial(2, Interval::closed(-1.0, 1.0).unwrap()).unwrap();
        let xs: Vec<f64> = (0..=4000).map(|i| -1.0 + i as f64 * 5e-4).collect();
        let text: String = xs
            .iter()
            .map(|x| format!("{x},{}\n", (x.abs() + 1e-12).sqrt() * x.signum()))
            .collect();
        let f = parse_table(&text, TableInterpolation::Linear).unwrap();
        let err = estimate_cn(&s, &f, &knots(&[0.0])).unwrap_err();
        assert!(matches!(err, Error::Resolution(_) | Error::LimitDiverged { .. }));
    }

    #[test]
    fn estimate_cn_geometry_and_table_checks() {
        let s = ChebyshevSystem::monomial(2, Interval::closed(0.0, 1.0).unwrap()).unwrap();
        let near_end = knots(&[1.0 - 1e-10]);
        assert!(matches!(
            estimate_cn(&s, &expr(Expression::Monomial(2)), &near_end),
            Err(Error::Geometry(_))
        ));
        let coarse = parse_table("0,0\n0.5,0.25\n1,1\n", TableInterpolation::Linear).unwrap();
        assert!(matches!(
            estimate_cn(&s, &coarse, &knots(&[0.5])),
            Err(Error::Resolution(_))
        ));
        let exact_only = parse_table("0,0\n0.5,0.25\n1,1\n", TableInterpolation::None).unwrap();
        assert!(matches!(
            estimate_cn(&s, &exact_only, &knots(&[0.5])),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn build_support_cubic_fixture() {
        let grid = uniform_grid(-2.0, 3.0, 100);
        let r = build_support(
            &poly(3),
            &expr(Expression::Monomial(3)),
            &knots(&[0.0, 1.0]),
            &grid,
            &Sampling::default(),
            &Tolerances::default(),
        )
        .unwrap();
        let c = r.omega.coefficients();
        assert!((c[0] - 0.0).abs() < 1e-6 && (c[1] + 1.0).abs() < 1e-6 && (c[2] - 2.0).abs() < 1e-6);
        assert!(r.pattern.overall);
        assert_eq!(r.pattern.segments.len(), 3);
        assert_eq!(r.pattern.segments.iter().map(|s| s.points_checked).sum::<usize>(), 100);
    }

    #[test]
    fn build_support_tangent_line() {
        let grid = uniform_grid(-2.0, 2.0, 81);
        let r = build_support(
            &poly(2),
            &expr(Expression::Exp(1.0)),
            &knots(&[0.0]),
            &grid,
            &Sampling::default(),
            &Tolerances::default(),
        )
        .unwrap();
        let c = r.omega.coefficients();
        assert!((c[0] - 1.0).abs() < 1e-6 && (c[1] - 1.0).abs() < 1e-5);
        assert!(r.pattern.overall);
    }

    #[test]
    fn build_support_reproduces_span_member() {
        let f = FunctionSource::combination(vec![
            (0.5, Expression::Const(1.0)),
            (-2.0, Expression::Monomial(1)),
            (3.0, Expression::Monomial(2)),
        ]);
        let grid = uniform_grid(-1.0, 2.0, 31);
        let r = build_support(
            &poly(3),
            &f,
            &knots(&[0.0, 1.0]),
            &grid,
            &Sampling::default(),
            &Tolerances::default(),
        )
        .unwrap();
        let c = r.omega.coefficients();
        assert!((c[0] - 0.5).abs() < 1e-9 && (c[1] + 2.0).abs() < 1e-9 && (c[2] - 3.0).abs() < 1e-9);
        assert!(r.pattern.overall);
    }

    #[test]
    fn perturbed_coefficient_breaks_pattern() {
        let f = expr(Expression::Monomial(3));
        let grid = uniform_grid(-2.0, 3.0, 100);
        let k = knots(&[0.0, 1.0]);
        let t = Tolerances::default();

        // c₃ = 2.5: f − ω = x(x − 1)(x − 1.5) dips below zero on (1, 1.5)
        let up = constrained_interpolate(&poly(3), &k, &f, 2.5).unwrap();
        let rep = verify_sign_pattern(&poly(3), &f, &up, &k, &grid, &t).unwrap();
        assert!(!rep.overall);
        let right = &rep.segments[2];
        assert!(!right.violations.is_empty());
        assert!(right.violations.iter().all(|v| v.x > 1.0 && v.x < 1.5));

        // c₃ = 1.5: f − ω = x(x − 0.5)(x − 1) dips below zero on (0.5, 1)
        let down = constrained_interpolate(&poly(3), &k, &f, 1.5).unwrap();
        let rep = verify_sign_pattern(&poly(3), &f, &down, &k, &grid, &t).unwrap();
        assert!(!rep.overall);
        assert!(rep.segments[2].violations.is_empty());
        assert!(rep.segments[1].violations.iter().all(|v| v.x > 0.5 && v.x < 1.0));
    }
}
