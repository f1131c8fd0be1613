//! Exact distance between the affine hulls of two simplices.
//!
//! With `A` holding the edge vectors `p^i - p^0` and `q^i - q^0` as columns and
//! `b = q^0 - p^0`, the squared hull distance is `min ‖Aχ - b‖²` over real `χ`.
//! The minimizer is unique iff the Gram matrix `AᵗA` is non-singular, in which
//! case it solves the normal equations `AᵗA χ = Aᵗb`.

use num_traits::{One, Signed, Zero};

use crate::error::{contract, Result};
use crate::exactmath::{
    adjugate, det_bareiss, dot, rational_norm_squared, solve_cramer, BigInt, BigRational, IntMatrix,
};
use crate::rowgen::Split;

/// The matrix `A` (one column per non-base vertex) and offset `b` of a simplex pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSystem {
    a: IntMatrix,
    b: Vec<BigInt>,
    split: Split,
}

impl PairSystem {
    pub fn new(a: IntMatrix, b: Vec<BigInt>, split: Split) -> Result<Self> {
        if a.cols() != split.n + split.m {
            return contract(format!(
                "A has {} columns but split ({}, {}) needs {}",
                a.cols(),
                split.n,
                split.m,
                split.n + split.m
            ));
        }
        if b.len() != a.rows() {
            return contract(format!("b has length {}, A has {} rows", b.len(), a.rows()));
        }
        Ok(Self { a, b, split })
    }

    /// Builds the system from rows of `(A, b)`: the last entry of each row is `b_j`.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], split: Split) -> Result<Self> {
        let mut a_rows = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        for r in rows {
            let Some((last, a_part)) = r.as_ref().split_last() else {
                return contract("empty row");
            };
            a_rows.push(a_part.to_vec());
            b.push(BigInt::from(*last));
        }
        let a = if a_rows.is_empty() {
            IntMatrix::zeros(0, split.n + split.m)
        } else {
            IntMatrix::from_rows(&a_rows)?
        };
        Self::new(a, b, split)
    }

    /// `P = conv(p)`, `Q = conv(q)`; the first vertex of each list is the base point.
    pub fn from_simplices<V: AsRef<[i64]>>(p: &[V], q: &[V]) -> Result<Self> {
        let (Some(p0), Some(q0)) = (p.first(), q.first()) else {
            return contract("simplices need at least one vertex each");
        };
        let (p0, q0) = (p0.as_ref(), q0.as_ref());
        let d = p0.len();
        if p.iter().chain(q).any(|v| v.as_ref().len() != d) {
            return contract("vertices of mixed dimension");
        }
        let split = Split::new(p.len() - 1, q.len() - 1);
        let rows: Vec<Vec<i64>> = (0..d)
            .map(|j| {
                let mut row: Vec<i64> = p[1..].iter().map(|v| v.as_ref()[j] - p0[j]).collect();
                row.extend(q[1..].iter().map(|v| v.as_ref()[j] - q0[j]));
                row.push(q0[j] - p0[j]);
                row
            })
            .collect();
        Self::from_rows(&rows, split)
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn split(&self) -> Split {
        self.split
    }

    /// Rows of the augmented matrix `[A | b]`.
    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.a.rows())
            .map(|j| {
                let mut r = self.a.row(j).to_vec();
                r.push(self.b[j].clone());
                r
            })
            .collect()
    }

    fn a_t_b(&self) -> Vec<BigInt> {
        (0..self.a.cols())
            .map(|c| dot(&self.a.column(c), &self.b))
            .collect()
    }

    /// `Aχ - b`, exact.
    pub fn residual(&self, chi: &[BigRational]) -> Result<Vec<BigRational>> {
        let a_chi = self.a.mul_rational_vec(chi)?;
        Ok(a_chi
            .into_iter()
            .zip(&self.b)
            .map(|(x, b)| x - BigRational::from_integer(b.clone()))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineSolution {
    /// `AᵗA` is singular: the hull distance has no unique minimizer.
    Singular,
    Unique {
        /// `(λ_1..λ_n, -μ_1..-μ_m)`.
        chi: Vec<BigRational>,
        squared_distance: BigRational,
    },
}

impl AffineSolution {
    pub fn is_singular(&self) -> bool {
        matches!(self, AffineSolution::Singular)
    }

    pub fn chi(&self) -> Option<&[BigRational]> {
        match self {
            AffineSolution::Singular => None,
            AffineSolution::Unique { chi, .. } => Some(chi),
        }
    }

    pub fn squared_distance(&self) -> Option<&BigRational> {
        match self {
            AffineSolution::Singular => None,
            AffineSolution::Unique {
                squared_distance, ..
            } => Some(squared_distance),
        }
    }
}

pub fn gram(s: &PairSystem) -> IntMatrix {
    let at = s.a.transpose();
    at.mul(&s.a).expect("AᵗA dimensions agree")
}

pub fn affine_distance(s: &PairSystem) -> AffineSolution {
    let g = gram(s);
    let rhs = s.a_t_b();
    let chi = match solve_cramer(&g, &rhs) {
        Ok(chi) => chi,
        Err(_) => return AffineSolution::Singular,
    };
    // residual ⟂ columns of A, so ‖Aχ-b‖² = bᵗb - (Aᵗb)ᵗχ
    let bb = BigRational::from_integer(dot(&s.b, &s.b));
    let projected = rhs
        .iter()
        .zip(&chi)
        .fold(BigRational::zero(), |acc, (r, x)| {
            acc + x * BigRational::from_integer(r.clone())
        });
    let squared_distance = bb - projected;
    debug_assert_eq!(
        squared_distance,
        rational_norm_squared(&s.residual(&chi).expect("lengths agree"))
    );
    AffineSolution::Unique {
        chi,
        squared_distance,
    }
}

/// `(bᵗb·det G - bᵗA·adj(G)·Aᵗb) / det G`, or `None` when `G = AᵗA` is singular.
pub fn adjugate_distance(s: &PairSystem) -> Option<BigRational> {
    let g = gram(s);
    let det = det_bareiss(&g).expect("Gram matrix is square");
    if det.is_zero() {
        return None;
    }
    let rhs = s.a_t_b();
    let adj = if g.rows() == 0 {
        IntMatrix::zeros(0, 0)
    } else {
        adjugate(&g).expect("Gram matrix is square")
    };
    let adj_rhs = adj.mul_vec(&rhs).expect("dimensions agree");
    let num = dot(&s.b, &s.b) * &det - dot(&rhs, &adj_rhs);
    Some(BigRational::new(num, det))
}

/// True when the hull minimizer lies in both simplices, so the polytope
/// distance equals the hull distance.
pub fn sharpness_check(sol: &AffineSolution, split: Split) -> Result<bool> {
    let Some(chi) = sol.chi() else {
        return contract("sharpness check on a singular system");
    };
    if chi.len() != split.n + split.m {
        return contract(format!(
            "χ has length {}, split ({}, {}) needs {}",
            chi.len(),
            split.n,
            split.m,
            split.n + split.m
        ));
    }
    let (lambda, neg_mu) = chi.split_at(split.n);
    let one = BigRational::one();
    let lambda_ok = lambda.iter().all(|v| !v.is_negative())
        && lambda.iter().fold(BigRational::zero(), |a, v| a + v) <= one;
    let mu_ok = neg_mu.iter().all(|v| !v.is_positive())
        && neg_mu.iter().fold(BigRational::zero(), |a, v| a + v) >= -one;
    Ok(lambda_ok && mu_ok)
}

/// `‖Aχ - b‖²` with `χ = (λ, -μ)`.
pub fn objective_value(
    s: &PairSystem,
    lambda: &[BigRational],
    mu: &[BigRational],
) -> Result<BigRational> {
    if lambda.len() != s.split.n || mu.len() != s.split.m {
        return contract(format!(
            "got λ of length {} and μ of length {} for split ({}, {})",
            lambda.len(),
            mu.len(),
            s.split.n,
            s.split.m
        ));
    }
    let chi: Vec<BigRational> = lambda
        .iter()
        .cloned()
        .chain(mu.iter().map(|v| -v))
        .collect();
    Ok(rational_norm_squared(&s.residual(&chi)?))
}
