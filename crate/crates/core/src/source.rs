//! Target functions `f`: closed-form expressions and tabulated samples.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::system::{parse_real, BasisFunction, Interval};

/// Relative snapping distance for off-grid table queries.
pub const TABLE_SNAP: f64 = 1e-12;

/// Closed set of expression forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "form", content = "params", rename_all = "snake_case")]
pub enum Expression {
    Monomial(u32),
    NegMonomial(u32),
    /// `e^(rate·x)`
    Exp(f64),
    Cos,
    Sin,
    Const(f64),
    /// Coefficients in ascending powers.
    Polynomial(Vec<f64>),
    /// `Σ weight · term`
    Combination(Vec<(f64, Expression)>),
}

impl Expression {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expression::Monomial(k) => x.powi(*k as i32),
            Expression::NegMonomial(k) => -x.powi(*k as i32),
            Expression::Exp(rate) => (rate * x).exp(),
            Expression::Cos => x.cos(),
            Expression::Sin => x.sin(),
            Expression::Const(c) => *c,
            Expression::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Expression::Combination(terms) => terms.iter().map(|(w, e)| w * e.eval(x)).sum(),
        }
    }
}

impl From<&BasisFunction> for Expression {
    fn from(b: &BasisFunction) -> Self {
        match *b {
            BasisFunction::Monomial { power } => Expression::Monomial(power),
            BasisFunction::NegatedMonomial { power } => Expression::NegMonomial(power),
            BasisFunction::Exponential { rate } => Expression::Exp(rate),
            BasisFunction::Cosine => Expression::Cos,
            BasisFunction::Sine => Expression::Sin,
            BasisFunction::Constant { value } => Expression::Const(value),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Expression::Monomial(k) => write!(f, "monomial:{k}"),
            Expression::NegMonomial(k) => write!(f, "negmonomial:{k}"),
            Expression::Exp(r) => write!(f, "exp:{r}"),
            Expression::Cos => write!(f, "cos"),
            Expression::Sin => write!(f, "sin"),
            Expression::Const(c) => write!(f, "const:{c}"),
            Expression::Polynomial(c) => write!(f, "poly:{}", list(c)),
            Expression::Combination(terms) => {
                let parts: Vec<String> = terms.iter().map(|(w, e)| format!("{w}*({e})")).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

impl FromStr for Expression {
    type Err = Error;

    /// Parses `monomial:k`, `negmonomial:k`, `exp:a`, `cos`, `sin`, `const:c`
    /// or `poly:c0,c1,…`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let need = || arg.ok_or_else(|| Error::Argument(format!("`{kind}` needs a parameter")));
        let power = |a: &str| {
            a.parse::<u32>()
                .map_err(|_| Error::Argument(format!("invalid power `{a}`")))
        };
        Ok(match kind {
            "monomial" => Expression::Monomial(power(need()?)?),
            "negmonomial" => Expression::NegMonomial(power(need()?)?),
            "exp" => Expression::Exp(parse_real(need()?)?),
            "const" => Expression::Const(parse_real(need()?)?),
            "poly" => Expression::Polynomial(need()?.split(',').map(parse_real).collect::<Result<Vec<_>>>()?),
            "cos" if arg.is_none() => Expression::Cos,
            "sin" if arg.is_none() => Expression::Sin,
            _ => return Err(Error::Argument(format!("unknown function form `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableInterpolation {
    /// Only tabulated abscissae may be queried.
    None,
    /// Piecewise-linear between neighbouring abscissae.
    Linear,
}

/// Sampled values `(xᵢ, yᵢ)` with strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    abscissae: Vec<f64>,
    ordinates: Vec<f64>,
    interpolation: TableInterpolation,
}

impl Table {
    pub fn new(abscissae: Vec<f64>, ordinates: Vec<f64>, interpolation: TableInterpolation) -> Result<Self> {
        if abscissae.len() != ordinates.len() {
            return Err(Error::Argument(format!(
                "table has {} abscissae but {} ordinates",
                abscissae.len(),
                ordinates.len()
            )));
        }
        if abscissae.is_empty() {
            return Err(Error::Argument("table is empty".into()));
        }
        if abscissae.iter().chain(&ordinates).any(|v| !v.is_finite()) {
            return Err(Error::Argument("table values must be finite".into()));
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Argument("table abscissae must be strictly increasing".into()));
        }
        Ok(Table {
            abscissae,
            ordinates,
            interpolation,
        })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn interpolation(&self) -> TableInterpolation {
        self.interpolation
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    fn span(&self) -> f64 {
        let s = self.abscissae[self.len() - 1] - self.abscissae[0];
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let snap = TABLE_SNAP * self.span();
        let (first, last) = (self.abscissae[0], self.abscissae[self.len() - 1]);
        if !(x >= first - snap && x <= last + snap) {
            return Err(Error::Domain {
                x,
                domain: format!("[{first}, {last}]"),
            });
        }
        let i = self.abscissae.partition_point(|&a| a < x);
        let nearest = [i.checked_sub(1), (i < self.len()).then_some(i)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| (self.abscissae[a] - x).abs().total_cmp(&(self.abscissae[b] - x).abs()))
            .expect("table is non-empty");
        if (self.abscissae[nearest] - x).abs() <= snap {
            return Ok(self.ordinates[nearest]);
        }
        match self.interpolation {
            TableInterpolation::None => Err(Error::Resolution(format!(
                "{x} is not a tabulated abscissa and interpolation is disabled"
            ))),
            TableInterpolation::Linear => {
                let (x0, x1) = (self.abscissae[i - 1], self.abscissae[i]);
                let (y0, y1) = (self.ordinates[i - 1], self.ordinates[i]);
                let t = (x - x0) / (x1 - x0);
                Ok(y0 + t * (y1 - y0))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceKind {
    Expression { expression: Expression },
    Table { table: Table },
}

/// An evaluable target function with a domain hint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionSource {
    kind: SourceKind,
    domain: Interval,
}

impl FunctionSource {
    /// An expression source defined on the whole real line.
    pub fn expression(expression: Expression) -> Self {
        FunctionSource {
            kind: SourceKind::Expression { expression },
            domain: Interval::real_line(),
        }
    }

    pub fn from_basis(b: &BasisFunction) -> Self {
        Self::expression(b.into())
    }

    /// `Σ wᵢ · eᵢ` of expression forms.
    pub fn combination(terms: Vec<(f64, Expression)>) -> Self {
        Self::expression(Expression::Combination(terms))
    }

    pub fn table(table: Table) -> Self {
        let first = table.abscissae[0];
        let last = table.abscissae[table.len() - 1];
        let domain = Interval::closed(first, last).unwrap_or_else(|_| {
            // a single-row table: any interval around the lone abscissa
            Interval::closed(first - 0.5, first + 0.5).expect("finite bounds")
        });
        FunctionSource {
            kind: SourceKind::Table { table },
            domain,
        }
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn as_table(&self) -> Option<&Table> {
        match &self.kind {
            SourceKind::Table { table } => Some(table),
            SourceKind::Expression { .. } => None,
        }
    }

    /// True when values may come from piecewise-linear table interpolation.
    pub fn uses_linear_interpolation(&self) -> bool {
        matches!(self.as_table(), Some(t) if t.interpolation == TableInterpolation::Linear)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let y = match &self.kind {
            SourceKind::Expression { expression } => {
                if !self.domain.contains_in_closure(x) {
                    return Err(Error::Domain {
                        x,
                        domain: self.domain.to_string(),
                    });
                }
                expression.eval(x)
            }
            SourceKind::Table { table } => table.eval(x)?,
        };
        if !y.is_finite() {
            return Err(Error::Source(format!("f({x}) is not finite")));
        }
        Ok(y)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            SourceKind::Expression { expression } => expression.to_string(),
            SourceKind::Table { table } => format!(
                "table({} rows, {})",
                table.len(),
                match table.interpolation {
                    TableInterpolation::None => "no interpolation",
                    TableInterpolation::Linear => "linear interpolation",
                }
            ),
        }
    }
}

/// Reads a two-column table from delimited text.
///
/// Cells are separated by commas or whitespace; lines starting with `#` are
/// comments; a non-numeric first row is taken as a header. Rows are sorted by
/// abscissa and duplicate abscissae are rejected.
pub fn load_table<R: Read>(mut reader: R, interpolation: TableInterpolation) -> Result<FunctionSource> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::Source(format!("cannot read table: {e}")))?;
    parse_table(&text, interpolation)
}

pub fn parse_table(text: &str, interpolation: TableInterpolation) -> Result<FunctionSource> {
    let rows = parse_rows(text)?;
    let mut rows = rows;
    rows.sort_by(|a, b| a.1.total_cmp(&b.1));
    if let Some(w) = rows.windows(2).find(|w| w[0].1 == w[1].1) {
        let (first, second) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
        return Err(Error::Format {
            line: second,
            message: format!("duplicate abscissa {} (also on line {first})", w[0].1),
        });
    }
    let (xs, ys) = rows.into_iter().map(|(_, x, y)| (x, y)).unzip();
    Ok(FunctionSource::table(Table::new(xs, ys, interpolation)?))
}

/// `(line number, x, y)` rows of a delimited table.
fn parse_rows(text: &str) -> Result<Vec<(usize, f64, f64)>> {
    let mut rows = Vec::new();
    let mut header_allowed = true;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|c| !c.is_empty())
            .collect();
        let parsed: Vec<Option<f64>> = cells
            .iter()
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        if header_allowed && parsed.iter().any(Option::is_none) {
            header_allowed = false;
            continue;
        }
        header_allowed = false;
        if cells.len() != 2 {
            return Err(Error::Format {
                line: line_no,
                message: format!("expected 2 columns, found {}", cells.len()),
            });
        }
        match (parsed[0], parsed[1]) {
            (Some(x), Some(y)) => rows.push((line_no, x, y)),
            _ => {
                let bad = cells[usize::from(parsed[0].is_some())];
                return Err(Error::Format {
                    line: line_no,
                    message: format!("non-numeric cell `{bad}`"),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Format {
            line: 0,
            message: "table has no data rows".into(),
        });
    }
    Ok(rows)
}
