//! State-space types: ordered vectors (points of the Weyl chamber `W^n`),
//! interlaced pairs (points of `W^{n+1,n}`) and triangular interlacing
//! patterns.

use crate::error::{Error, Result};

/// A weakly increasing real vector, i.e. a point of the Weyl chamber `W^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedPoint(Vec<f64>);

impl OrderedPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("ordered point must have length >= 1"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("ordered point entries must be finite"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain(format!("coordinates not weakly increasing: {values:?}")));
        }
        Ok(OrderedPoint(values))
    }

    /// Builds a point from arbitrary finite values by sorting them.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| a.total_cmp(b));
        OrderedPoint::new(values)
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when all coordinates are strictly increasing.
    pub fn is_strict(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for OrderedPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for OrderedPoint {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Checks the interlacing condition `x_1 <= y_1 <= x_2 <= ... <= y_n <= x_{n+1}`.
pub(crate) fn is_interlaced(x: &[f64], y: &[f64]) -> bool {
    if x.len() != y.len() + 1 {
        return false;
    }
    (0..y.len()).all(|i| x[i] <= y[i] && y[i] <= x[i + 1])
}

/// A point of `W^{n+1,n}`: an `(n+1)`-vector `x` interlaced with an
/// `n`-vector `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterlacedPoint {
    x: OrderedPoint,
    y: Vec<f64>,
}

impl InterlacedPoint {
    /// `y` may be empty (`n = 0`), in which case the point is just `x`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() + 1 {
            return Err(Error::dimension(format!(
                "interlaced point needs |x| = |y| + 1, got |x| = {}, |y| = {}",
                x.len(),
                y.len()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("interlaced point entries must be finite"));
        }
        if !is_interlaced(&x, &y) {
            return Err(Error::domain(format!("interlacing violated: x = {x:?}, y = {y:?}")));
        }
        Ok(InterlacedPoint { x: OrderedPoint::new(x)?, y })
    }

    /// Number of `y` coordinates (the `n` of `W^{n+1,n}`).
    #[inline]
    pub fn rank(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn x(&self) -> &[f64] {
        self.x.values()
    }

    #[inline]
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_point(&self) -> &OrderedPoint {
        &self.x
    }
}

/// A triangular interlacing pattern: rows `x^1, ..., x^n` with row `k` of
/// length `k` and consecutive rows interlaced.
#[derive(Debug, Clone, PartialEq)]
pub struct GTPattern {
    rows: Vec<Vec<f64>>,
}

impl GTPattern {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::domain("pattern must have at least one row"));
        }
        for (k, row) in rows.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(Error::dimension(format!(
                    "row {} must have length {}, got {}",
                    k + 1,
                    k + 1,
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain("pattern entries must be finite"));
            }
        }
        for k in 1..rows.len() {
            if !is_interlaced(&rows[k], &rows[k - 1]) {
                return Err(Error::domain(format!("rows {} and {} do not interlace", k, k + 1)));
            }
        }
        Ok(GTPattern { rows })
    }

    /// Builds a pattern without checking interlacing. Used by samplers whose
    /// construction guarantees it; density evaluation re-checks.
    pub fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        GTPattern { rows }
    }

    /// Number of rows.
    #[inline]
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    #[inline]
    pub fn top_row(&self) -> &[f64] {
        self.rows.last().expect("pattern is never empty")
    }

    /// True when every pair of consecutive rows interlaces.
    pub fn is_valid(&self) -> bool {
        self.rows.iter().enumerate().all(|(k, r)| r.len() == k + 1)
            && (1..self.rows.len()).all(|k| is_interlaced(&self.rows[k], &self.rows[k - 1]))
    }

    /// Flattens the rows bottom (length 1) to top (length n).
    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flatten().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_point_accepts_weakly_increasing() {
        assert!(OrderedPoint::new(vec![0.0]).is_ok());
        assert!(OrderedPoint::new(vec![0.0, 0.0, 1.0]).is_ok());
        assert!(OrderedPoint::new(vec![1.0, 0.0]).is_err());
        assert!(OrderedPoint::new(vec![]).is_err());
        assert!(OrderedPoint::new(vec![f64::NAN]).is_err());
        assert!(OrderedPoint::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn strictness() {
        assert!(OrderedPoint::new(vec![0.0, 1.0]).unwrap().is_strict());
        assert!(!OrderedPoint::new(vec![0.0, 0.0]).unwrap().is_strict());
    }

    #[test]
    fn interlaced_point_validation() {
        assert!(InterlacedPoint::new(vec![0.0], vec![]).is_ok());
        assert!(InterlacedPoint::new(vec![-1.0, 1.0], vec![0.0]).is_ok());
        assert!(InterlacedPoint::new(vec![-1.0, 1.0], vec![2.0]).is_err());
        assert!(InterlacedPoint::new(vec![0.0, 1.0], vec![0.0, 0.5]).is_err());
        // degenerate boundary points are allowed
        assert!(InterlacedPoint::new(vec![0.0, 0.0], vec![0.0]).is_ok());
    }

    #[test]
    fn pattern_validation() {
        assert!(GTPattern::new(vec![vec![0.0]]).is_ok());
        let good = GTPattern::new(vec![vec![0.5], vec![0.0, 1.0]]).unwrap();
        assert_eq!(good.order(), 2);
        assert_eq!(good.top_row(), &[0.0, 1.0]);
        assert!(GTPattern::new(vec![vec![2.0], vec![0.0, 1.0]]).is_err());
        assert!(GTPattern::new(vec![vec![0.0, 1.0]]).is_err());
        let bad = GTPattern::from_rows_unchecked(vec![vec![2.0], vec![0.0, 1.0]]);
        assert!(!bad.is_valid());
    }

    #[test]
    fn flatten_order() {
        let p = GTPattern::new(vec![vec![0.5], vec![0.0, 1.0], vec![-1.0, 0.2, 1.5]]).unwrap();
        assert_eq!(p.flatten(), vec![0.5, 0.0, 1.0, -1.0, 0.2, 1.5]);
    }
}
