//! Interpolation in the span of a Chebyshev system.

use serde::Serialize;

use crate::dd::Residual;
use crate::det::{bordered_matrix, det_rows, factor_by_points, row_scale, PointTuple, SignedValue};
use crate::error::{Error, Result};
use crate::source::FunctionSource;
use crate::system::ChebyshevSystem;

/// Relative bound on node residuals of an interpolant.
pub const NODE_RESIDUAL: f64 = 1e-9;

/// `ω = c₁ω₁ + ⋯ + c_nω_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaCombination {
    system: ChebyshevSystem,
    coefficients: Vec<f64>,
}

impl OmegaCombination {
    pub fn new(system: ChebyshevSystem, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != system.order() {
            return Err(Error::Argument(format!(
                "{} coefficients for a system of order {}",
                coefficients.len(),
                system.order()
            )));
        }
        Ok(OmegaCombination { system, coefficients })
    }

    pub fn system(&self) -> &ChebyshevSystem {
        &self.system
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let basis = self.system.evaluate_basis(x)?;
        Ok(basis.iter().zip(&self.coefficients).map(|(b, c)| b * c).sum())
    }

    /// As a function source, e.g. to feed it back into a determinant.
    pub fn to_source(&self) -> FunctionSource {
        let terms = self
            .system
            .basis()
            .iter()
            .zip(&self.coefficients)
            .map(|(b, &c)| (c, b.into()))
            .collect();
        FunctionSource::combination(terms)
    }
}

/// The unique combination taking `values[j]` at `pts[j]`.
pub fn interpolate(system: &ChebyshevSystem, pts: &PointTuple, values: &[f64]) -> Result<OmegaCombination> {
    let n = system.order();
    if pts.len() != n || values.len() != n {
        return Err(Error::Argument(format!(
            "interpolation in a system of order {n} needs {n} nodes and values, got {} and {}",
            pts.len(),
            values.len()
        )));
    }
    system.check_points(pts.points())?;

    let mut nodes: Vec<(f64, f64)> = pts.points().iter().copied().zip(values.iter().copied()).collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs: Vec<f64> = nodes.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = nodes.iter().map(|p| p.1).collect();

    // rows ωᵢ, columns x_j; the solve uses the transpose
    let m = bordered_matrix(system.basis(), &xs, None)?;
    let scale = row_scale(&m, n);
    let lu = factor_by_points(&m, &xs);
    let v = SignedValue::new(lu.det(), scale);
    if v.is_zero() {
        return Err(Error::NearSingular {
            which: "V_n (interpolation)".into(),
            value: v.value,
            tolerance: v.tolerance(),
        });
    }
    let coefficients = lu.solve(&ys).ok_or_else(|| Error::NearSingular {
        which: "V_n (interpolation)".into(),
        value: 0.0,
        tolerance: v.tolerance(),
    })?;

    let mut worst = 0.0f64;
    let mut size = 1.0f64;
    for j in 0..n {
        let terms = (0..n).map(|i| coefficients[i] * m[i * n + j]);
        let (sum, abs) = terms.fold((0.0, 0.0), |(s, a), t| (s + t, a + t.abs()));
        worst = worst.max((sum - ys[j]).abs());
        size = size.max(abs).max(ys[j].abs());
    }
    if worst > NODE_RESIDUAL * size {
        return Err(Error::NearSingular {
            which: format!("V_n (interpolation residual {worst:e})"),
            value: v.value,
            tolerance: v.tolerance(),
        });
    }
    OmegaCombination::new(system.clone(), coefficients)
}

/// The combination with prescribed last coefficient `c_n` matching `f` at the
/// `n − 1` knots.
pub fn constrained_interpolate(
    system: &ChebyshevSystem,
    knots: &PointTuple,
    f: &FunctionSource,
    c_n: f64,
) -> Result<OmegaCombination> {
    let n = system.order();
    if knots.len() + 1 != n {
        return Err(Error::Argument(format!(
            "a system of order {n} needs {} knots, got {}",
            n - 1,
            knots.len()
        )));
    }
    let last = system.basis()[n - 1];
    if n == 1 {
        return OmegaCombination::new(system.clone(), vec![c_n]);
    }
    let rhs = knots
        .points()
        .iter()
        .map(|&x| Ok(f.eval(x)? - c_n * last.eval(x)))
        .collect::<Result<Vec<f64>>>()?;
    let head = interpolate(&system.truncate(n - 1)?, knots, &rhs)?;
    let mut coefficients = head.coefficients;
    coefficients.push(c_n);
    OmegaCombination::new(system.clone(), coefficients)
}

/// Compares `f(x) − ω(x)` with
/// `(D_{n-1}(knots, x; f) − c_n V_n(knots, x)) / V_{n-1}(knots)`.
pub fn lemma1_residual(
    system: &ChebyshevSystem,
    knots: &PointTuple,
    f: &FunctionSource,
    c_n: f64,
    x: f64,
) -> Result<Residual> {
    let n = system.order();
    if n < 2 {
        return Err(Error::Argument("the identity needs a system of order n >= 2".into()));
    }
    let omega = constrained_interpolate(system, knots, f, c_n)?;
    let extended = knots
        .with_point(x)
        .map_err(|_| Error::Argument(format!("evaluation point {x} coincides with a knot")))?;
    system.check_points(extended.points())?;

    let lhs = f.eval(x)? - omega.eval(x)?;
    let basis = system.basis();
    let d = det_rows(&basis[..n - 1], extended.points(), Some(f))?;
    let v = det_rows(basis, extended.points(), None)?;
    let v_knots = det_rows(&basis[..n - 1], knots.points(), None)?;
    if v_knots.is_zero() {
        return Err(Error::NearSingular {
            which: "V_{n-1}(knots)".into(),
            value: v_knots.value,
            tolerance: v_knots.tolerance(),
        });
    }
    let rhs = (d.value - c_n * v.value) / v_knots.value;
    Ok(Residual::new(lhs, rhs))
}
