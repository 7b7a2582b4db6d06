//! Classical and generalized divided differences.
//!
//! For a system `ω = (ω₁,…,ω_n)` the generalized divided difference is
//!
//! ```text
//! [x₁,…,x_n; f]_ω = D_{n-1}(x₁,…,x_n; f) / V_n(x₁,…,x_n)
//! ```
//!
//! where the numerator borders the first `n − 1` basis functions with `f`.
//! Consecutive windows obey the update
//!
//! ```text
//! [x₂,…,x_{n+1}; f]_ω − [x₁,…,x_n; f]_ω
//!     = D_n(x₁,…,x_{n+1}; f) · V_{n-1}(x₂,…,x_n) / (V_n(x₂,…,x_{n+1}) · V_n(x₁,…,x_n))
//! ```
//!
//! which is what [`gdd_fast`] and [`gdd_sliding`] evaluate instead of the ratio.

use serde::Serialize;

use crate::det::{det_rows, PointTuple, SignedValue};
use crate::error::{Error, Result};
use crate::source::FunctionSource;
use crate::system::ChebyshevSystem;

/// Conditioning below which a divided difference is flagged.
pub const ILL_CONDITIONED: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DividedDifference {
    pub value: f64,
    pub points: PointTuple,
    /// Name of the system, absent for classical divided differences.
    pub system: Option<String>,
    /// `|V_n| / scale(V_n)`.
    pub conditioning: f64,
    pub ill_conditioned: bool,
}

/// Two sides of an identity and their gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub lhs: f64,
    pub rhs: f64,
    pub absolute: f64,
    /// `absolute / max(|lhs|, |rhs|, 1)`
    pub relative: f64,
}

impl Residual {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let absolute = (lhs - rhs).abs();
        Residual {
            lhs,
            rhs,
            absolute,
            relative: absolute / lhs.abs().max(rhs.abs()).max(1.0),
        }
    }
}

/// Newton divided difference `[x₁,…,x_k; f]` by the classical recurrence.
pub fn classical_dd(pts: &PointTuple, f: &FunctionSource) -> Result<f64> {
    if pts.is_empty() {
        return Err(Error::Argument("divided difference of zero points".into()));
    }
    let x = pts.points();
    // table[i] holds [x_i, …, x_{i+level}] after each level
    let mut table = x.iter().map(|&xi| f.eval(xi)).collect::<Result<Vec<_>>>()?;
    for level in 1..x.len() {
        for i in 0..x.len() - level {
            let gap = x[i + level] - x[i];
            if gap == 0.0 {
                return Err(Error::Degenerate(format!("coincident points at {}", x[i])));
            }
            table[i] = (table[i + 1] - table[i]) / gap;
        }
    }
    Ok(table[0])
}

fn nonzero(v: SignedValue, which: impl FnOnce() -> String) -> Result<SignedValue> {
    if v.is_zero() {
        Err(Error::NearSingular {
            which: which(),
            value: v.value,
            tolerance: v.tolerance(),
        })
    } else {
        Ok(v)
    }
}

fn check_order(system: &ChebyshevSystem, pts: &PointTuple) -> Result<()> {
    if pts.len() != system.order() {
        return Err(Error::Argument(format!(
            "a divided difference for a system of order {} needs {} points, got {}",
            system.order(),
            system.order(),
            pts.len()
        )));
    }
    Ok(())
}

fn finish(system: &ChebyshevSystem, pts: &PointTuple, value: f64, v: SignedValue) -> DividedDifference {
    let conditioning = if v.scale > 0.0 { v.value.abs() / v.scale } else { 0.0 };
    DividedDifference {
        value,
        points: pts.clone(),
        system: Some(system.name().to_string()),
        conditioning,
        ill_conditioned: conditioning < ILL_CONDITIONED,
    }
}

/// `[x₁,…,x_n; f]_ω` as the determinant ratio.
pub fn gdd(system: &ChebyshevSystem, pts: &PointTuple, f: &FunctionSource) -> Result<DividedDifference> {
    check_order(system, pts)?;
    system.check_points(pts.points())?;
    let n = system.order();
    let basis = system.basis();
    let v = nonzero(det_rows(basis, pts.points(), None)?, || "V_n".into())?;
    let numerator = det_rows(&basis[..n - 1], pts.points(), Some(f))?;
    Ok(finish(system, pts, numerator.value / v.value, v))
}

/// `[x₁,…,x_n; f]_ω` built order by order from the window update.
///
/// Level `k` holds the divided differences of `(ω₁,…,ω_k)` over windows of
/// `k` consecutive points, starting from `f(xᵢ)/ω₁(xᵢ)`. Level `k + 1` follows
/// from two neighbouring level-`k` entries. Every truncation `(ω₁,…,ω_k)`
/// must have a nonvanishing collocation determinant on the windows it meets.
pub fn gdd_fast(system: &ChebyshevSystem, pts: &PointTuple, f: &FunctionSource) -> Result<DividedDifference> {
    check_order(system, pts)?;
    if !pts.is_ordered() {
        return Err(Error::Argument("gdd_fast needs strictly increasing points".into()));
    }
    system.check_points(pts.points())?;
    let n = system.order();
    let x = pts.points();
    let basis = system.basis();

    // vdet[k][i] = V_k(x_i, …, x_{i+k-1}) of (ω₁,…,ω_k); vdet[0][i] = 1
    let mut vdet: Vec<Vec<SignedValue>> = Vec::with_capacity(n + 1);
    vdet.push(vec![SignedValue::new(1.0, 1.0); n + 1]);
    for k in 1..=n {
        let row = (0..=n - k)
            .map(|i| {
                let v = det_rows(&basis[..k], &x[i..i + k], None)?;
                nonzero(v, || format!("V_{k} at points {:?}", &x[i..i + k]))
            })
            .collect::<Result<Vec<_>>>()?;
        vdet.push(row);
    }

    let mut level = x
        .iter()
        .zip(&vdet[1])
        .map(|(&xi, v)| Ok(f.eval(xi)? / v.value))
        .collect::<Result<Vec<f64>>>()?;
    for k in 1..n {
        level = (0..n - k)
            .map(|i| {
                let diff = level[i + 1] - level[i];
                diff * vdet[k][i + 1].value * vdet[k][i].value / (vdet[k - 1][i + 1].value * vdet[k + 1][i].value)
            })
            .collect();
    }
    Ok(finish(system, pts, level[0], vdet[n][0]))
}

/// Divided differences over all windows of `n` consecutive points of an
/// ordered sequence: the first by the ratio, the rest by the window update.
pub fn gdd_sliding(system: &ChebyshevSystem, pts: &PointTuple, f: &FunctionSource) -> Result<Vec<f64>> {
    let n = system.order();
    if n < 2 {
        return Err(Error::Argument(
            "the window update needs a system of order n >= 2".into(),
        ));
    }
    if pts.len() < n {
        return Err(Error::Argument(format!("need at least {n} points, got {}", pts.len())));
    }
    if !pts.is_ordered() {
        return Err(Error::Argument(
            "sliding windows need strictly increasing points".into(),
        ));
    }
    system.check_points(pts.points())?;
    let x = pts.points();
    let basis = system.basis();
    let first = PointTuple::new(x[..n].to_vec())?;
    let mut out = vec![gdd(system, &first, f)?.value];
    let mut v_prev = nonzero(det_rows(basis, &x[..n], None)?, || "V_n".into())?;
    for i in 0..x.len() - n {
        let d = det_rows(basis, &x[i..=i + n], Some(f))?;
        let v_inner = nonzero(det_rows(&basis[..n - 1], &x[i + 1..i + n], None)?, || "V_{n-1}".into())?;
        let v_next = nonzero(det_rows(basis, &x[i + 1..=i + n], None)?, || "V_n".into())?;
        let step = d.value * v_inner.value / (v_next.value * v_prev.value);
        out.push(out[i] + step);
        v_prev = v_next;
    }
    Ok(out)
}

/// Gap between the two sides of the window update at `x₁,…,x_{n+1}`.
pub fn recurrence_identity_residual(
    system: &ChebyshevSystem,
    pts: &PointTuple,
    f: &FunctionSource,
) -> Result<Residual> {
    let n = system.order();
    if n < 2 {
        return Err(Error::Argument("the identity needs a system of order n >= 2".into()));
    }
    if pts.len() != n + 1 {
        return Err(Error::Argument(format!("need {} points, got {}", n + 1, pts.len())));
    }
    system.check_points(pts.points())?;
    let x = pts.points();
    let basis = system.basis();

    let head = PointTuple::new(x[..n].to_vec())?;
    let tail = PointTuple::new(x[1..].to_vec())?;
    let lhs = gdd(system, &tail, f)?.value - gdd(system, &head, f)?.value;

    let d = det_rows(basis, x, Some(f))?;
    let v_inner = nonzero(det_rows(&basis[..n - 1], &x[1..n], None)?, || "V_{n-1}".into())?;
    let v_tail = nonzero(det_rows(basis, &x[1..], None)?, || "V_n(tail)".into())?;
    let v_head = nonzero(det_rows(basis, &x[..n], None)?, || "V_n(head)".into())?;
    let rhs = d.value * v_inner.value / (v_tail.value * v_head.value);
    Ok(Residual::new(lhs, rhs))
}
