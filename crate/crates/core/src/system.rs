//! Intervals, basis functions and Chebyshev systems.
//!
//! A [`ChebyshevSystem`] is an ordered tuple `(ω₁, …, ω_n)` of basis functions
//! on an interval. Whether it is actually a Chebyshev system (its collocation
//! determinant keeps a strict sign on ordered tuples) is never assumed; it is
//! checked on a grid by [`classify_on_grid`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::det::{self, PointTuple, Sign};
use crate::error::{Error, Result};
use crate::tuples::{ordered_index_tuples, Sampling};

/// Relative inset applied to open endpoints when sampling an interval.
pub const OPEN_END_INSET: f64 = 1e-6;

/// Default minimum point separation, relative to the interval span.
pub const DEFAULT_SEPARATION_FACTOR: f64 = 1e-9;

/// A real interval with possibly infinite or excluded endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    /// Infinite endpoints are always treated as open.
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Argument(format!(
                "interval requires lo < hi, got lo = {lo}, hi = {hi}"
            )));
        }
        Ok(Interval {
            lo,
            hi,
            lo_open: lo_open || lo.is_infinite(),
            hi_open: hi_open || hi.is_infinite(),
        })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_open(&self) -> bool {
        self.lo_open
    }

    pub fn hi_open(&self) -> bool {
        self.hi_open
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Length of the interval; 1 when either end is infinite.
    pub fn effective_span(&self) -> f64 {
        if self.is_bounded() {
            self.hi - self.lo
        } else {
            1.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn contains_in_closure(&self, x: f64) -> bool {
        x.is_finite() && x >= self.lo && x <= self.hi
    }

    /// Membership in the interior `I⁰`.
    pub fn contains_in_interior(&self, x: f64) -> bool {
        x.is_finite() && x > self.lo && x < self.hi
    }

    /// Uniform grid of `count` points; open endpoints are pulled inwards by
    /// `OPEN_END_INSET · span`.
    pub fn sample(&self, count: usize) -> Result<Vec<f64>> {
        if !self.is_bounded() {
            return Err(Error::Argument(format!(
                "cannot auto-sample the unbounded interval {self}; supply finite grid bounds"
            )));
        }
        let inset = OPEN_END_INSET * self.effective_span();
        let a = if self.lo_open { self.lo + inset } else { self.lo };
        let b = if self.hi_open { self.hi - inset } else { self.hi };
        Ok(uniform_grid(a, b, count))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        let close = if self.hi_open { ')' } else { ']' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `count` equispaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// A single basis function `ωᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisFunction {
    /// `x^power`
    Monomial {
        power: u32,
    },
    /// `e^(rate·x)`
    Exponential {
        rate: f64,
    },
    Cosine,
    Sine,
    /// The constant `value`.
    Constant {
        value: f64,
    },
    /// `-x^power`
    NegatedMonomial {
        power: u32,
    },
}

impl BasisFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            BasisFunction::Monomial { power } => x.powi(power as i32),
            BasisFunction::Exponential { rate } => (rate * x).exp(),
            BasisFunction::Cosine => x.cos(),
            BasisFunction::Sine => x.sin(),
            BasisFunction::Constant { value } => value,
            BasisFunction::NegatedMonomial { power } => -x.powi(power as i32),
        }
    }
}

impl fmt::Display for BasisFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisFunction::Monomial { power } => write!(f, "monomial {power}"),
            BasisFunction::Exponential { rate } => write!(f, "exp {rate}"),
            BasisFunction::Cosine => write!(f, "cos"),
            BasisFunction::Sine => write!(f, "sin"),
            BasisFunction::Constant { value } => write!(f, "const {value}"),
            BasisFunction::NegatedMonomial { power } => write!(f, "negmonomial {power}"),
        }
    }
}

impl FromStr for BasisFunction {
    type Err = Error;

    /// Parses `monomial k`, `exp alpha`, `cos`, `sin`, `const c` or `negmonomial k`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind = parts
            .next()
            .ok_or_else(|| Error::Argument("empty basis function".into()))?;
        let arg = parts.next();
        if parts.next().is_some() {
            return Err(Error::Argument(format!("trailing tokens in basis function `{s}`")));
        }
        let need =
            |what: &str| -> Result<&str> { arg.ok_or_else(|| Error::Argument(format!("`{kind}` needs a {what}"))) };
        let basis = match kind {
            "monomial" => BasisFunction::Monomial {
                power: parse_power(need("power")?)?,
            },
            "negmonomial" => BasisFunction::NegatedMonomial {
                power: parse_power(need("power")?)?,
            },
            "exp" => BasisFunction::Exponential {
                rate: parse_real(need("rate")?)?,
            },
            "const" => BasisFunction::Constant {
                value: parse_real(need("value")?)?,
            },
            "cos" | "sin" => {
                if arg.is_some() {
                    return Err(Error::Argument(format!("`{kind}` takes no argument")));
                }
                if kind == "cos" {
                    BasisFunction::Cosine
                } else {
                    BasisFunction::Sine
                }
            }
            other => return Err(Error::Argument(format!("unknown basis function `{other}`"))),
        };
        Ok(basis)
    }
}

fn parse_power(s: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::Argument(format!("invalid power `{s}`")))
}

/// Parses a real number; accepts `inf`, `-inf`, `pi` and `-pi`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        _ => t
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("invalid number `{t}`")))?,
    };
    if v.is_nan() {
        return Err(Error::Argument(format!("invalid number `{t}`")));
    }
    Ok(v)
}

/// An ordered tuple of basis functions on an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevSystem {
    name: String,
    basis: Vec<BasisFunction>,
    interval: Interval,
    #[serde(skip)]
    separation_factor: f64,
}

impl ChebyshevSystem {
    pub fn new(name: impl Into<String>, basis: Vec<BasisFunction>, interval: Interval) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Argument("a system needs at least one basis function".into()));
        }
        Ok(ChebyshevSystem {
            name: name.into(),
            basis,
            interval,
            separation_factor: DEFAULT_SEPARATION_FACTOR,
        })
    }

    /// `(1, x, …, x^(n-1))`.
    pub fn monomial(n: usize, interval: Interval) -> Result<Self> {
        let basis = (0..n as u32).map(|power| BasisFunction::Monomial { power }).collect();
        Self::new(format!("poly:{n}"), basis, interval)
    }

    /// `(e^(α₁x), …, e^(α_n x))`.
    pub fn exponential(rates: &[f64], interval: Interval) -> Result<Self> {
        let label = rates.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",");
        let basis = rates.iter().map(|&rate| BasisFunction::Exponential { rate }).collect();
        Self::new(format!("exp:{label}"), basis, interval)
    }

    /// Overrides the minimum point separation, given relative to the interval span.
    pub fn with_separation_factor(mut self, factor: f64) -> Self {
        self.separation_factor = factor;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    /// The number `n` of basis functions.
    pub fn order(&self) -> usize {
        self.basis.len()
    }

    /// Smallest admissible distance between two points of a tuple.
    pub fn min_separation(&self) -> f64 {
        self.separation_factor * self.interval.effective_span()
    }

    pub fn evaluate_basis(&self, x: f64) -> Result<Vec<f64>> {
        if !self.interval.contains_in_closure(x) {
            return Err(Error::Domain {
                x,
                domain: self.interval.to_string(),
            });
        }
        Ok(self.basis.iter().map(|b| b.eval(x)).collect())
    }

    /// The system `(ω₁, …, ω_m)` on the same interval.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.order() {
            return Err(Error::Argument(format!(
                "cannot truncate a system of order {} to {m} functions",
                self.order()
            )));
        }
        let mut out = self.clone();
        out.basis.truncate(m);
        if m < self.order() {
            out.name = format!("{}[..{m}]", self.name);
        }
        Ok(out)
    }

    /// Checks that `points` lie in the interval and are pairwise separated by
    /// at least [`min_separation`](Self::min_separation).
    pub fn check_points(&self, points: &[f64]) -> Result<()> {
        for &x in points {
            if !self.interval.contains(x) {
                return Err(Error::Domain {
                    x,
                    domain: self.interval.to_string(),
                });
            }
        }
        let delta = self.min_separation();
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i + 1..] {
                if (a - b).abs() < delta {
                    return Err(Error::Degenerate(format!(
                        "points {a} and {b} are closer than the minimum separation {delta:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Renders the system in its text definition format.
    pub fn to_text(&self) -> String {
        let iv = &self.interval;
        let mut out = format!(
            "interval {} {} {} {}\n",
            iv.lo,
            iv.hi,
            if iv.lo_open { "open" } else { "closed" },
            if iv.hi_open { "open" } else { "closed" }
        );
        for b in &self.basis {
            out.push_str(&b.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for ChebyshevSystem {
    type Err = Error;

    /// Parses the text definition format: an optional `name <label>` line, an
    /// `interval lo hi [open|closed] [open|closed]` header and one basis
    /// function per line. `#` starts a comment line.
    fn from_str(text: &str) -> Result<Self> {
        let mut interval = None;
        let mut name = None;
        let mut basis = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |e: Error| Error::Format {
                line: line_no,
                message: e.to_string(),
            };
            if let Some(rest) = line.strip_prefix("interval") {
                if interval.is_some() {
                    return Err(Error::Format {
                        line: line_no,
                        message: "duplicate interval line".into(),
                    });
                }
                interval = Some(parse_interval(rest).map_err(fail)?);
            } else if let Some(rest) = line.strip_prefix("name ") {
                name = Some(rest.trim().to_string());
            } else {
                basis.push(line.parse::<BasisFunction>().map_err(fail)?);
            }
        }
        let interval = interval.ok_or_else(|| Error::Format {
            line: 0,
            message: "missing `interval lo hi` line".into(),
        })?;
        let name = name.unwrap_or_else(|| basis.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "));
        ChebyshevSystem::new(name, basis, interval)
    }
}

fn parse_interval(rest: &str) -> Result<Interval> {
    let tokens: Vec<&str> = rest.split_whitespace().collect();
    if tokens.len() < 2 || tokens.len() > 4 {
        return Err(Error::Argument(
            "expected `interval lo hi [open|closed] [open|closed]`".into(),
        ));
    }
    let lo = parse_real(tokens[0])?;
    let hi = parse_real(tokens[1])?;
    let openness = |t: Option<&&str>| -> Result<bool> {
        match t.copied() {
            None | Some("closed") => Ok(false),
            Some("open") => Ok(true),
            Some(other) => Err(Error::Argument(format!("expected `open` or `closed`, found `{other}`"))),
        }
    };
    Interval::new(lo, hi, openness(tokens.get(2))?, openness(tokens.get(3))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Positive,
    Negative,
    NonChebyshev,
}

/// Outcome of [`classify_on_grid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemClassification {
    pub verdict: Verdict,
    /// Ordered tuple where `V_n` vanished or disagreed in sign with the first tuple.
    pub witness: Option<PointTuple>,
    pub tuples_checked: usize,
}

/// Keeps the grid points that lie inside the system interval.
pub(crate) fn usable_grid(system: &ChebyshevSystem, grid: &[f64], needed: usize) -> Result<Vec<f64>> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Argument("grid must be strictly increasing".into()));
    }
    let inside: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&x| system.interval().contains(x))
        .collect();
    if inside.len() < needed {
        return Err(Error::Argument(format!(
            "grid has {} points inside {}, need at least {needed}",
            inside.len(),
            system.interval()
        )));
    }
    Ok(inside)
}

/// Samples `V_n` over ordered `n`-tuples of the grid and classifies the system.
///
/// The zero threshold is scale-relative (see [`det::zero_tolerance`]). The
/// first tuple fixes the reference sign; the first tuple (in lexicographic
/// order) whose determinant vanishes or has the opposite sign becomes the
/// witness of a non-Chebyshev verdict.
pub fn classify_on_grid(system: &ChebyshevSystem, grid: &[f64], sampling: &Sampling) -> Result<SystemClassification> {
    let n = system.order();
    let pts = usable_grid(system, grid, n)?;
    let tuples = ordered_index_tuples(pts.len(), n, sampling);
    let signs: Vec<Sign> = tuples
        .par_iter()
        .map(|t| {
            let xs: Vec<f64> = t.iter().map(|&i| pts[i]).collect();
            det::v_det_unchecked(system.basis(), &xs).sign
        })
        .collect();

    let reference = signs[0];
    let bad = signs.iter().position(|&s| s == Sign::Zero || s != reference);
    let verdict = match (bad, reference) {
        (Some(_), _) | (None, Sign::Zero) => Verdict::NonChebyshev,
        (None, Sign::Positive) => Verdict::Positive,
        (None, Sign::Negative) => Verdict::Negative,
    };
    let witness =
        bad.map(|i| PointTuple::new(tuples[i].iter().map(|&j| pts[j]).collect()).expect("grid points are distinct"));
    Ok(SystemClassification {
        verdict,
        witness,
        tuples_checked: tuples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn poly(n: usize) -> ChebyshevSystem {
        ChebyshevSystem::monomial(n, Interval::real_line()).unwrap()
    }

    #[test]
    fn evaluate_basis_examples() {
        assert_eq!(poly(3).evaluate_basis(2.0).unwrap(), vec![1.0, 2.0, 4.0]);
        let e = ChebyshevSystem::exponential(&[0.0, 1.0], Interval::real_line()).unwrap();
        assert_eq!(e.evaluate_basis(0.0).unwrap(), vec![1.0, 1.0]);
        let trig = ChebyshevSystem::new(
            "trig",
            vec![BasisFunction::Cosine, BasisFunction::Sine],
            Interval::open(0.0, PI).unwrap(),
        )
        .unwrap();
        let v = trig.evaluate_basis(PI / 2.0).unwrap();
        assert!(v[0].abs() < 1e-15);
        assert_eq!(v[1], 1.0);
    }

    #[test]
    fn evaluate_basis_outside_interval_is_domain_error() {
        let s = ChebyshevSystem::monomial(2, Interval::closed(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(s.evaluate_basis(1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn open_endpoint_evaluation_uses_closure() {
        let s = ChebyshevSystem::monomial(2, Interval::open(0.0, 1.0).unwrap()).unwrap();
        assert!(s.evaluate_basis(0.0).is_ok());
        assert!(!s.interval().contains(0.0));
    }

    #[test]
    fn truncate_examples() {
        let t = poly(3).truncate(2).unwrap();
        assert_eq!(t.basis(), poly(2).basis());
        let trig = ChebyshevSystem::new(
            "trig",
            vec![BasisFunction::Cosine, BasisFunction::Sine],
            Interval::open(0.0, PI).unwrap(),
        )
        .unwrap();
        assert_eq!(trig.truncate(1).unwrap().basis(), &[BasisFunction::Cosine]);
        assert!(matches!(poly(3).truncate(0), Err(Error::Argument(_))));
        assert!(matches!(poly(3).truncate(4), Err(Error::Argument(_))));
    }

    #[test]
    fn truncate_composes() {
        let s = poly(5);
        for m in 1..=5 {
            for k in 1..=m {
                let a = s.truncate(m).unwrap().truncate(k).unwrap();
                assert_eq!(a.basis(), s.truncate(k).unwrap().basis());
                assert_eq!(a.interval(), s.interval());
            }
        }
    }

    #[test]
    fn interval_rejects_empty_and_forces_open_infinite_ends() {
        assert!(Interval::closed(1.0, 1.0).is_err());
        assert!(Interval::closed(2.0, 1.0).is_err());
        let iv = Interval::closed(f64::NEG_INFINITY, 0.0).unwrap();
        assert!(iv.lo_open());
        assert!(!iv.hi_open());
    }

    #[test]
    fn sample_respects_open_ends() {
        let iv = Interval::open(0.0, PI).unwrap();
        let g = iv.sample(11).unwrap();
        assert_eq!(g.len(), 11);
        assert!(g.iter().all(|&x| iv.contains(x)));
        assert!((g[0] - PI * 1e-6).abs() < 1e-15);
        assert!(Interval::real_line().sample(5).is_err());
        let closed = Interval::closed(-1.0, 1.0).unwrap().sample(3).unwrap();
        assert_eq!(closed, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn parse_system_text() {
        let text = "# trig pair\ninterval 0 pi open open\ncos\nsin\n";
        let s: ChebyshevSystem = text.parse().unwrap();
        assert_eq!(s.order(), 2);
        assert!(s.interval().lo_open() && s.interval().hi_open());
        assert_eq!(s.interval().hi(), PI);

        let all = "name mixed\ninterval -inf inf\nmonomial 2\nexp -1.5\nconst 3\nnegmonomial 1\n";
        let s: ChebyshevSystem = all.parse().unwrap();
        assert_eq!(s.name(), "mixed");
        assert_eq!(
            s.basis(),
            &[
                BasisFunction::Monomial { power: 2 },
                BasisFunction::Exponential { rate: -1.5 },
                BasisFunction::Constant { value: 3.0 },
                BasisFunction::NegatedMonomial { power: 1 },
            ]
        );
        let back: ChebyshevSystem = s.to_text().parse().unwrap();
        assert_eq!(back.basis(), s.basis());
        assert_eq!(back.interval(), s.interval());
    }

    #[test]
    fn parse_system_errors_carry_line_numbers() {
        let err = "interval 0 1\nmonomial\n".parse::<ChebyshevSystem>().unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
        let err = "monomial 1\n".parse::<ChebyshevSystem>().unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
        let err = "interval 0 1 ajar\ncos\n".parse::<ChebyshevSystem>().unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
    }

    #[test]
    fn classify_monomial_positive() {
        let grid = uniform_grid(-1.0, 1.0, 20);
        let c = classify_on_grid(&poly(3), &grid, &Sampling::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Positive);
        assert_eq!(c.tuples_checked, 1140);
        assert!(c.witness.is_none());
    }

    #[test]
    fn classify_cosine_alone_is_not_chebyshev_on_zero_pi() {
        let iv = Interval::open(0.0, PI).unwrap();
        let s = ChebyshevSystem::new("cos", vec![BasisFunction::Cosine], iv).unwrap();
        let c = classify_on_grid(&s, &iv.sample(41).unwrap(), &Sampling::default()).unwrap();
        assert_eq!(c.verdict, Verdict::NonChebyshev);
        let w = c.witness.unwrap();
        assert!((w.points()[0] - PI / 2.0).abs() < 0.1);
    }

    #[test]
    fn classify_negative_constant() {
        let s = ChebyshevSystem::new(
            "-1",
            vec![BasisFunction::Constant { value: -1.0 }],
            Interval::real_line(),
        )
        .unwrap();
        let c = classify_on_grid(&s, &uniform_grid(-3.0, 3.0, 7), &Sampling::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Negative);
    }

    #[test]
    fn classify_needs_enough_points() {
        let err = classify_on_grid(&poly(4), &[0.0, 1.0, 2.0], &Sampling::default()).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
        let err = classify_on_grid(&poly(2), &[0.0, 2.0, 1.0], &Sampling::default()).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }

    #[test]
    fn check_points_enforces_separation() {
        let s = ChebyshevSystem::monomial(2, Interval::closed(0.0, 1.0).unwrap()).unwrap();
        assert!(s.check_points(&[0.0, 1.0]).is_ok());
        assert!(matches!(s.check_points(&[0.5, 0.5 + 1e-12]), Err(Error::Degenerate(_))));
        let loose = s.clone().with_separation_factor(0.0);
        assert!(loose.check_points(&[0.5, 0.5 + 1e-12]).is_ok());
    }
}
