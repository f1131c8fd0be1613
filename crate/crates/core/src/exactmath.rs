//! Exact integer and rational arithmetic over small dense matrices.
//!
//! Integers are `num_bigint::BigInt` and fractions are `num_rational::BigRational`,
//! which keeps every value in lowest terms with a positive denominator. The
//! determinant runs a fixed-width Bareiss pass first and redoes the elimination
//! in arbitrary precision as soon as any intermediate product overflows.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{contract, Error, Result};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Dense integer matrix with row-major storage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return contract(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from machine-integer rows, which must all share one length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return contract("ragged rows");
            }
            data.extend(r.iter().map(|&v| BigInt::from(v)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        assert!(
            row < self.rows && col < self.cols,
            "index ({row},{col}) out of bounds"
        );
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        assert!(
            row < self.rows && col < self.cols,
            "index ({row},{col}) out of bounds"
        );
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[BigInt] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, col).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigInt::zero();
                for i in 0..self.cols {
                    acc += self.get(r, i) * other.get(i, c);
                }
                out.data[r * other.cols + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return contract(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            ));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Product with a rational vector, exact.
    pub fn mul_rational_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return contract(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            ));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(BigRational::zero(), |acc, (a, x)| {
                        acc + x * BigRational::from_integer(a.clone())
                    })
            })
            .collect())
    }

    /// The square matrix left after deleting one row and one column.
    pub fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for r in (0..self.rows).filter(|&r| r != skip_row) {
            for c in (0..self.cols).filter(|&c| c != skip_col) {
                data.push(self.get(r, c).clone());
            }
        }
        IntMatrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    fn with_column(&self, col: usize, v: &[BigInt]) -> IntMatrix {
        let mut m = self.clone();
        for (r, x) in v.iter().enumerate() {
            m.data[r * self.cols + col] = x.clone();
        }
        m
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.to_string()).collect())
            .collect();
        f.debug_struct("IntMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &rows)
            .finish()
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return contract(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        ));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let small: Option<Vec<i128>> = m.data.iter().map(|v| v.to_i128()).collect();
    if let Some(mut work) = small {
        if let Some(det) = bareiss_i128(&mut work, n) {
            return Ok(BigInt::from(det));
        }
    }
    let mut work = m.data.clone();
    Ok(bareiss_big(&mut work, n))
}

/// Returns `None` if any intermediate value leaves the `i128` range.
fn bareiss_i128(a: &mut [i128], n: usize) -> Option<i128> {
    let mut negate = false;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(pivot) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Some(0);
            };
            for c in 0..n {
                a.swap(k * n + c, pivot * n + c);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i * n + j].checked_mul(pivot)?;
                let rhs = a[i * n + k].checked_mul(a[k * n + j])?;
                a[i * n + j] = lhs.checked_sub(rhs)? / prev;
            }
        }
        prev = pivot;
    }
    let det = a[n * n - 1];
    Some(if negate { -det } else { det })
}

fn bareiss_big(a: &mut [BigInt], n: usize) -> BigInt {
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(pivot) => {
                    for c in 0..n {
                        a.swap(k * n + c, pivot * n + c);
                    }
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        let pivot = a[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &pivot - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = pivot;
    }
    let det = a[n * n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Solves `m x = v` exactly by Cramer's rule.
pub fn solve_cramer(m: &IntMatrix, v: &[BigInt]) -> Result<Vec<BigRational>> {
    if !m.is_square() {
        return contract("Cramer solve needs a square matrix");
    }
    if v.len() != m.rows {
        return contract(format!(
            "right-hand side has length {}, expected {}",
            v.len(),
            m.rows
        ));
    }
    let det = det_bareiss(m)?;
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    (0..m.cols)
        .map(|c| {
            let num = det_bareiss(&m.with_column(c, v))?;
            Ok(BigRational::new(num, det.clone()))
        })
        .collect()
}

/// Classical adjugate: `m · adj(m) = det(m) · I`.
pub fn adjugate(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return contract("adjugate of a non-square matrix");
    }
    let n = m.rows;
    if n == 1 {
        return Ok(IntMatrix::identity(1));
    }
    let mut adj = IntMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let cof = det_bareiss(&m.minor(r, c))?;
            let cof = if (r + c) % 2 == 1 { -cof } else { cof };
            adj.set(c, r, cof);
        }
    }
    Ok(adj)
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rational_norm_squared(v: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |acc, x| acc + x * x)
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Lossy view for human-readable output only.
pub fn approx(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_nonnegative(q: &BigRational) -> bool {
    !q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn det_cofactor(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m.get(0, 0).clone();
        }
        (0..n)
            .map(|c| {
                let term = m.get(0, c) * det_cofactor(&m.minor(0, c));
                if c % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(
            det_bareiss(&mat(&[&[2, 1], &[1, 2]])).unwrap(),
            BigInt::from(3)
        );
        assert_eq!(
            det_bareiss(&mat(&[&[1, 0], &[0, 1]])).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            det_bareiss(&IntMatrix::zeros(0, 0)).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            det_bareiss(&mat(&[&[0, 1], &[1, 0]])).unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            det_bareiss(&mat(&[&[0, 0, 1], &[0, 2, 0], &[3, 0, 0]])).unwrap(),
            BigInt::from(-6)
        );
        assert_eq!(
            det_bareiss(&mat(&[&[1, 2], &[2, 4]])).unwrap(),
            BigInt::zero()
        );
    }

    #[test]
    fn non_square_is_a_contract_error() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6]]);
        assert!(matches!(det_bareiss(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn falls_back_to_big_integers_on_overflow() {
        let huge = BigInt::from(i128::MAX) * BigInt::from(1_000_003);
        let m = IntMatrix::new(
            2,
            2,
            vec![huge.clone(), BigInt::from(3), BigInt::from(5), huge.clone()],
        )
        .unwrap();
        assert_eq!(det_bareiss(&m).unwrap(), &huge * &huge - BigInt::from(15));

        // fits in i128 initially, overflows during elimination
        let e = 1i64 << 62;
        let m = mat(&[&[e, 1, 0], &[1, e, 1], &[0, 1, e]]);
        assert_eq!(det_bareiss(&m).unwrap(), det_cofactor(&m));
    }

    #[test]
    fn hundred_random_5x5_against_cofactor_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..100 {
            let data: Vec<BigInt> = (0..25)
                .map(|_| BigInt::from(rng.gen_range(-8..=8)))
                .collect();
            let m = IntMatrix::new(5, 5, data).unwrap();
            assert_eq!(det_bareiss(&m).unwrap(), det_cofactor(&m));
        }
    }

    #[test]
    fn cramer_examples() {
        let x = solve_cramer(&mat(&[&[25]]), &big(&[7])).unwrap();
        assert_eq!(x, vec![ratio(7, 25)]);

        let x = solve_cramer(&IntMatrix::identity(3), &big(&[1, 2, 3])).unwrap();
        assert_eq!(x, vec![ratio(1, 1), ratio(2, 1), ratio(3, 1)]);

        let x = solve_cramer(&mat(&[&[2, 0], &[0, 2]]), &big(&[1, 1])).unwrap();
        assert_eq!(x, vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn cramer_rejects_singular() {
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(solve_cramer(&m, &big(&[1, 1])), Err(Error::SingularMatrix));
    }

    #[test]
    fn rationals_stay_reduced() {
        let a = ratio(2, 4) + ratio(1, 6);
        assert_eq!(a, ratio(2, 3));
        assert_eq!(*a.numer(), BigInt::from(2));
        assert_eq!(*a.denom(), BigInt::from(3));
        let z = ratio(3, -7) + -ratio(-3, 7);
        assert!(z.is_zero());
        assert_eq!(*z.denom(), BigInt::one());
        assert!(ratio(1, -2).denom().is_positive());
    }

    fn square(n: usize) -> impl Strategy<Value = IntMatrix> {
        prop::collection::vec(-6i64..=6, n * n).prop_map(move |v| {
            IntMatrix::new(n, n, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(m in (1usize..=6).prop_flat_map(square)) {
            prop_assert_eq!(det_bareiss(&m).unwrap(), det_cofactor(&m));
        }

        #[test]
        fn cramer_solution_satisfies_system(
            m in (1usize..=5).prop_flat_map(square),
            seed in prop::collection::vec(-9i64..=9, 5),
        ) {
            let v: Vec<BigInt> = seed[..m.rows()].iter().map(|&x| BigInt::from(x)).collect();
            match solve_cramer(&m, &v) {
                Ok(x) => {
                    let back = m.mul_rational_vec(&x).unwrap();
                    let want: Vec<BigRational> = v.iter().cloned().map(BigRational::from_integer).collect();
                    prop_assert_eq!(back, want);
                }
                Err(Error::SingularMatrix) => prop_assert!(det_bareiss(&m).unwrap().is_zero()),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn adjugate_identity(m in (1usize..=5).prop_flat_map(square)) {
            let det = det_bareiss(&m).unwrap();
            let prod = m.mul(&adjugate(&m).unwrap()).unwrap();
            let n = m.rows();
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { det.clone() } else { BigInt::zero() };
                    prop_assert_eq!(prod.get(r, c), &want);
                }
            }
        }
    }
}
