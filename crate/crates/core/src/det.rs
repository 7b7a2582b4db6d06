//! Collocation determinants `V_n` and bordered determinants `D_n`.
//!
//! `V_n(x₁,…,x_n)` is the determinant of the matrix with entry `(i, j) = ωᵢ(x_j)`.
//! `D_n(x₁,…,x_{n+1}; f)` appends the row `f(x₁),…,f(x_{n+1})` to the
//! collocation matrix of `n` basis functions at `n + 1` points.
//!
//! Values are computed by LU elimination with partial pivoting. Each result
//! carries a scale, the product of the row max-norms of the matrix before
//! elimination, and is classified as zero when `|value| ≤ 64·ε·scale`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::source::FunctionSource;
use crate::system::{BasisFunction, ChebyshevSystem};

/// Multiplier of machine epsilon in the zero test.
pub const ZERO_TOLERANCE_FACTOR: f64 = 64.0;

/// Zero threshold for a determinant whose matrix has the given scale.
pub fn zero_tolerance(scale: f64) -> f64 {
    ZERO_TOLERANCE_FACTOR * f64::EPSILON * scale
}

/// A tuple of pairwise distinct abscissae.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointTuple {
    points: Vec<f64>,
    ordered: bool,
}

impl PointTuple {
    /// Fails on non-finite or repeated points.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if let Some(x) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::Argument(format!("non-finite point {x}")));
        }
        let mut sorted = points.clone();
        sorted.sort_by(f64::total_cmp);
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Degenerate(format!("repeated point {}", w[0])));
        }
        let ordered = points.windows(2).all(|w| w[0] < w[1]);
        Ok(PointTuple { points, ordered })
    }

    /// Like [`new`](Self::new) but additionally requires strictly increasing points.
    pub fn ordered(points: Vec<f64>) -> Result<Self> {
        let t = Self::new(points)?;
        if !t.ordered {
            return Err(Error::Argument("points must be strictly increasing".into()));
        }
        Ok(t)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn sorted(&self) -> PointTuple {
        let mut points = self.points.clone();
        points.sort_by(f64::total_cmp);
        PointTuple { points, ordered: true }
    }

    /// The tuple extended by one more point.
    pub fn with_point(&self, x: f64) -> Result<PointTuple> {
        let mut points = self.points.clone();
        points.push(x);
        PointTuple::new(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
}

/// A determinant value with its sign classification and conditioning proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedValue {
    pub value: f64,
    pub sign: Sign,
    pub scale: f64,
}

impl SignedValue {
    pub fn new(value: f64, scale: f64) -> Self {
        let sign = if value.abs() <= zero_tolerance(scale) {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        };
        SignedValue { value, sign, scale }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn tolerance(&self) -> f64 {
        zero_tolerance(self.scale)
    }
}

/// Row-major LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    det: f64,
}

impl Lu {
    #[cfg(test)]
    pub(crate) fn factor(a: Vec<f64>, n: usize) -> Lu {
        Self::factor_keyed(a, n, None)
    }

    /// Pivot ties are broken in favour of the larger key, so the pivot
    /// sequence depends only on the set of (row, key) pairs, not their order.
    pub(crate) fn factor_keyed(mut a: Vec<f64>, n: usize, keys: Option<&[f64]>) -> Lu {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let key = |perm: &[usize], r: usize| keys.map_or(0.0, |k| k[perm[r]]);
        let mut det = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for r in k + 1..n {
                let v = a[r * n + k].abs();
                if v > best || (v == best && key(&perm, r) > key(&perm, p)) {
                    best = v;
                    p = r;
                }
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            if pivot == 0.0 {
                continue;
            }
            for r in k + 1..n {
                let factor = a[r * n + k] / pivot;
                a[r * n + k] = factor;
                if factor != 0.0 {
                    for c in k + 1..n {
                        a[r * n + c] -= factor * a[k * n + c];
                    }
                }
            }
        }
        Lu { n, lu: a, perm, det }
    }

    pub(crate) fn det(&self) -> f64 {
        self.det
    }

    /// Solves `A x = b`; `None` if a pivot is exactly zero.
    pub(crate) fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.lu[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu[r * n + c] * x[c];
            }
            let d = self.lu[r * n + r];
            if d == 0.0 {
                return None;
            }
            x[r] /= d;
        }
        Some(x)
    }
}

/// Product of the row max-norms of a row-major `n × n` matrix.
pub(crate) fn row_scale(a: &[f64], n: usize) -> f64 {
    a.chunks(n.max(1))
        .map(|row| row.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .product()
}

/// Row-major matrix with rows `ω₁…ω_k` (and `f` if given), columns at `points`.
pub(crate) fn bordered_matrix(basis: &[BasisFunction], points: &[f64], f: Option<&FunctionSource>) -> Result<Vec<f64>> {
    let rows = basis.len() + usize::from(f.is_some());
    if rows != points.len() {
        return Err(Error::Argument(format!(
            "a {rows}-row determinant needs {rows} points, got {}",
            points.len()
        )));
    }
    let mut a = Vec::with_capacity(rows * rows);
    for b in basis {
        a.extend(points.iter().map(|&x| b.eval(x)));
    }
    if let Some(f) = f {
        for &x in points {
            a.push(f.eval(x)?);
        }
    }
    Ok(a)
}

pub(crate) fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Factors the transpose of a collocation matrix (one row per point) with
/// pivot ties broken by abscissa. Reordering the points then permutes rows
/// without changing the pivot sequence, so the determinant changes by the
/// permutation sign only.
pub(crate) fn factor_by_points(a: &[f64], points: &[f64]) -> Lu {
    let n = points.len();
    Lu::factor_keyed(transpose(a, n), n, Some(points))
}

/// Determinant of [`bordered_matrix`] without any point validation.
pub(crate) fn det_rows(basis: &[BasisFunction], points: &[f64], f: Option<&FunctionSource>) -> Result<SignedValue> {
    let n = points.len();
    if n == 0 {
        return Ok(SignedValue::new(1.0, 1.0));
    }
    let a = bordered_matrix(basis, points, f)?;
    let scale = row_scale(&a, n);
    Ok(SignedValue::new(factor_by_points(&a, points).det(), scale))
}

pub(crate) fn v_det_unchecked(basis: &[BasisFunction], points: &[f64]) -> SignedValue {
    det_rows(basis, points, None).expect("row and point counts agree")
}

/// `V_n(x₁,…,x_n)` for the system's `n` basis functions.
pub fn v_det(system: &ChebyshevSystem, pts: &PointTuple) -> Result<SignedValue> {
    if pts.len() != system.order() {
        return Err(Error::Argument(format!(
            "V_n of a system of order {} needs {} points, got {}",
            system.order(),
            system.order(),
            pts.len()
        )));
    }
    system.check_points(pts.points())?;
    det_rows(system.basis(), pts.points(), None)
}

/// `D_n(x₁,…,x_{n+1}; f)` for the system's `n` basis functions.
pub fn d_det(system: &ChebyshevSystem, pts: &PointTuple, f: &FunctionSource) -> Result<SignedValue> {
    if pts.len() != system.order() + 1 {
        return Err(Error::Argument(format!(
            "D_n of a system of order {} needs {} points, got {}",
            system.order(),
            system.order() + 1,
            pts.len()
        )));
    }
    system.check_points(pts.points())?;
    det_rows(system.basis(), pts.points(), Some(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::Expression;
    use crate::system::Interval;

    fn poly(n: usize) -> ChebyshevSystem {
        ChebyshevSystem::monomial(n, Interval::real_line()).unwrap()
    }

    fn pts(v: &[f64]) -> PointTuple {
        PointTuple::new(v.to_vec()).unwrap()
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(a: &[Vec<f64>]) -> f64 {
        let n = a.len();
        if n == 1 {
            return a[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * a[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    #[test]
    fn v_det_examples() {
        let v = v_det(&poly(2), &pts(&[0.0, 1.0])).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.sign, Sign::Positive);
        let v = v_det(&poly(3), &pts(&[0.0, 1.0, 2.0])).unwrap();
        assert!((v.value - 2.0).abs() < 1e-14);

        let neg = ChebyshevSystem::new(
            "(-1,-x)",
            vec![
                BasisFunction::Constant { value: -1.0 },
                BasisFunction::NegatedMonomial { power: 1 },
            ],
            Interval::real_line(),
        )
        .unwrap();
        let v = v_det(&neg, &pts(&[0.3, 1.7])).unwrap();
        assert!((v.value - 1.4).abs() < 1e-14);
        assert_eq!(v.sign, Sign::Positive);
    }

    #[test]
    fn d_det_examples_match_cofactor_oracle() {
        let sq = FunctionSource::expression(Expression::Monomial(2));
        let d = d_det(&poly(2), &pts(&[0.0, 1.0, 2.0]), &sq).unwrap();
        let oracle = cofactor_det(&[vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]]);
        assert_eq!(oracle, 2.0);
        assert!((d.value - oracle).abs() < 1e-14);

        let cube = FunctionSource::expression(Expression::Monomial(3));
        let d = d_det(&poly(3), &pts(&[0.0, 1.0, 2.0, 3.0]), &cube).unwrap();
        assert!((d.value - 12.0).abs() < 1e-12);
    }

    #[test]
    fn d_det_vanishes_for_basis_member() {
        let f = FunctionSource::from_basis(&BasisFunction::Monomial { power: 0 });
        let d = d_det(&poly(3), &pts(&[-0.4, 0.1, 0.5, 0.9]), &f).unwrap();
        assert_eq!(d.sign, Sign::Zero);
    }

    #[test]
    fn size_mismatch_and_degenerate_points() {
        assert!(matches!(v_det(&poly(3), &pts(&[0.0, 1.0])), Err(Error::Argument(_))));
        assert!(matches!(
            v_det(&poly(2), &pts(&[0.0, 1e-12])),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            PointTuple::new(vec![1.0, 2.0, 1.0]),
            Err(Error::Degenerate(_))
        ));
        let bounded = ChebyshevSystem::monomial(2, Interval::closed(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(v_det(&bounded, &pts(&[0.5, 2.0])), Err(Error::Domain { .. })));
    }

    #[test]
    fn point_permutations_only_flip_sign() {
        let s = poly(4);
        let f = FunctionSource::expression(Expression::Exp(1.3));
        let a = [-0.7, 0.01, 0.9, 0.95, 1.0];
        let b = [0.01, -0.7, 0.9, 1.0, 0.95];
        let da = d_det(&s, &pts(&a), &f).unwrap().value;
        let db = d_det(&s, &pts(&b), &f).unwrap().value;
        assert_eq!(da, db);
        let va = v_det(&s, &pts(&[-0.7, 0.01, 0.9, 0.95])).unwrap().value;
        let vb = v_det(&s, &pts(&[-0.7, 0.95, 0.9, 0.01])).unwrap().value;
        assert_eq!(va, -vb);
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let a = vec![2.0, 1.0, 1.0, 4.0, -6.0, 0.0, -2.0, 7.0, 2.0];
        let lu = Lu::factor(a, 3);
        assert!((lu.det() - (-16.0)).abs() < 1e-12);
        let x = lu.solve(&[5.0, -2.0, 9.0]).unwrap();
        for (got, want) in x.iter().zip([1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lu_matches_cofactor_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..20 {
                let rows: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                    .collect();
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                let want = cofactor_det(&rows);
                let got = Lu::factor(flat, n).det();
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }
}
