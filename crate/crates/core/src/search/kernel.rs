//! Per-range subset evaluation.
//!
//! For `d` rows forming `M = [A | b]`, the squared distance from `b` to the
//! column space of `A` is `det(M)² / det(AᵗA)`, and by Cauchy–Binet
//! `det(AᵗA)` is the sum of the squared `(d-1)`-minors of `A`. The cofactor
//! kernel holds the first `d-1` rows fixed and precomputes the cofactor
//! vectors that make both quantities linear in the last row, so the inner loop
//! costs `O(d²)` machine multiplications per subset. The Gram kernel builds the
//! full system for every subset and solves the normal equations exactly.

use std::cmp::Ordering;

use num_traits::Zero;

use super::combin::{advance, unrank};
use crate::exactmath::{BigInt, BigRational};
use crate::lsq::{affine_distance, AffineSolution, PairSystem};
use crate::rowgen::RowList;

pub(crate) const MAX_FAST_DIM: usize = 8;

/// Smallest positive value found in a range, with the first subset attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RangeBest {
    pub value: BigRational,
    pub index: u64,
    pub rows: Vec<usize>,
}

impl RangeBest {
    /// Smaller value wins; equal values go to the earlier global index.
    pub fn precedes(&self, other: &RangeBest) -> bool {
        match self.value.cmp(&other.value) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.index < other.index,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct RangeOutcome {
    pub best: Option<RangeBest>,
    pub subsets: u64,
    pub singular: u64,
    pub zero: u64,
}

impl RangeOutcome {
    pub fn merge(mut self, other: RangeOutcome) -> RangeOutcome {
        self.subsets += other.subsets;
        self.singular += other.singular;
        self.zero += other.zero;
        self.best = match (self.best, other.best) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(if b.precedes(&a) { b } else { a }),
        };
        self
    }
}

/// Whether every intermediate of the cofactor kernel fits its machine type
/// for rows with entries bounded by `max_abs`.
pub(crate) fn cofactor_kernel_fits(d: usize, max_abs: i64) -> bool {
    if !(2..=MAX_FAST_DIM).contains(&d) {
        return false;
    }
    let k2 = (max_abs as f64).powi(2).max(1.0);
    let df = d as f64;
    // Hadamard: |det M| ≤ (d k²)^(d/2), each (d-1)-minor ≤ ((d-1) k²)^((d-1)/2)
    let log_det = 0.5 * df * (df * k2).log2();
    let log_minor = 0.5 * (df - 1.0) * ((df - 1.0) * k2).log2();
    let log_gram = 2.0 * log_minor + df.log2();
    log_det + 1.0 < 62.0 && log_gram + 1.0 < 62.0
}

/// `a/b < c/d` for positive denominators; cross products that leave `i128`
/// are redone in arbitrary precision.
fn fraction_less(a: i128, b: i128, c: i128, d: i128) -> bool {
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(l), Some(r)) => l < r,
        _ => BigInt::from(a) * BigInt::from(d) < BigInt::from(c) * BigInt::from(b),
    }
}

/// Fraction-free determinant of an `n × n` row-major block; small `n` only.
fn det_small(a: &mut [i128], n: usize) -> i128 {
    if n == 0 {
        return 1;
    }
    let mut negate = false;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            negate = !negate;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * pivot - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = pivot;
    }
    if negate {
        -a[n * n - 1]
    } else {
        a[n * n - 1]
    }
}

/// Determinant of `rows` restricted to `cols`, skipping `skip_row`.
fn sub_det(rows: &[&[i64]], skip_row: Option<usize>, cols: &[usize]) -> i64 {
    let mut buf = [0i128; MAX_FAST_DIM * MAX_FAST_DIM];
    let n = cols.len();
    let mut r = 0;
    for (i, row) in rows.iter().enumerate() {
        if Some(i) == skip_row {
            continue;
        }
        for (c, &col) in cols.iter().enumerate() {
            buf[r * n + c] = row[col] as i128;
        }
        r += 1;
    }
    debug_assert_eq!(r, n);
    det_small(&mut buf[..n * n], n) as i64
}

/// Cofactor data for a fixed prefix of `d - 1` rows.
struct Prefix {
    /// `det[prefix; r] = u · r` for a full row `r`.
    u: [i64; MAX_FAST_DIM],
    /// Minor of `A` that drops prefix row `i` equals `w[i] · r_A`.
    w: [[i64; MAX_FAST_DIM]; MAX_FAST_DIM],
    /// Minor of `A` that drops the last row: `det` of the prefix's `A`-part.
    fixed_minor_sq: i128,
}

impl Prefix {
    fn new(rows: &[&[i64]], d: usize) -> Self {
        let mut u = [0i64; MAX_FAST_DIM];
        let mut w = [[0i64; MAX_FAST_DIM]; MAX_FAST_DIM];
        let all_cols: Vec<usize> = (0..d).collect();
        let mut cols = Vec::with_capacity(d);
        for (j, uj) in u.iter_mut().enumerate().take(d) {
            cols.clear();
            cols.extend(all_cols.iter().copied().filter(|&c| c != j));
            let m = sub_det(rows, None, &cols);
            *uj = if j % 2 == 0 { m } else { -m };
        }
        let a_cols = d - 1;
        for (i, wi) in w.iter_mut().enumerate().take(d - 1) {
            for (j, slot) in wi.iter_mut().enumerate().take(a_cols) {
                cols.clear();
                cols.extend((0..a_cols).filter(|&c| c != j));
                let m = sub_det(rows, Some(i), &cols);
                *slot = if j % 2 == 0 { m } else { -m };
            }
        }
        let fixed = u[d - 1] as i128;
        Prefix {
            u,
            w,
            fixed_minor_sq: fixed * fixed,
        }
    }

    /// `(det(M)², det(AᵗA))` with `r` as the last row.
    #[inline]
    fn eval(&self, r: &[i64], d: usize) -> (i128, i128) {
        let det: i64 = self.u[..d].iter().zip(r).map(|(u, v)| u * v).sum();
        let mut gram = self.fixed_minor_sq;
        for wi in self.w.iter().take(d - 1) {
            let mut c = 0i64;
            for j in 0..d - 1 {
                c += wi[j] * r[j];
            }
            gram += (c as i128) * (c as i128);
        }
        ((det as i128) * (det as i128), gram)
    }
}

/// Cofactor kernel over subsets `[start, start + count)` of one row list;
/// `index_base` converts local ranks into global enumeration indices.
pub(crate) fn scan_cofactor(
    list: &RowList,
    start: u64,
    count: u64,
    index_base: u64,
) -> RangeOutcome {
    let d = list.d;
    let n_rows = list.len();
    let rows: Vec<&[i64]> = list.entries().collect();
    let mut out = RangeOutcome::default();
    if count == 0 {
        return out;
    }

    let first = unrank(n_rows, d, start);
    let mut prefix_idx: Vec<usize> = first[..d - 1].to_vec();
    let mut last_start = first[d - 1];
    let mut remaining = count;
    let mut global = index_base + start;

    // best so far as det² / gram, compared by cross-multiplication
    let mut best: Option<(i128, i128, u64, Vec<usize>)> = None;
    let mut prefix_rows: Vec<&[i64]> = Vec::with_capacity(d);

    loop {
        prefix_rows.clear();
        prefix_rows.extend(prefix_idx.iter().map(|&i| rows[i]));
        let prefix = Prefix::new(&prefix_rows, d);

        let take = ((n_rows - last_start) as u64).min(remaining);
        let stop = last_start + take as usize;
        for (last, row) in rows.iter().enumerate().take(stop).skip(last_start) {
            let (num, gram) = prefix.eval(row, d);
            if gram == 0 {
                out.singular += 1;
            } else if num == 0 {
                out.zero += 1;
            } else {
                let better = match &best {
                    None => true,
                    Some((bn, bg, _, _)) => fraction_less(num, gram, *bn, *bg),
                };
                if better {
                    let mut subset = prefix_idx.clone();
                    subset.push(last);
                    best = Some((num, gram, global, subset));
                }
            }
            global += 1;
        }
        out.subsets += take;
        remaining -= take;
        if remaining == 0 {
            break;
        }
        // prefixes range over (d-1)-subsets of the first n-1 rows
        if !advance(n_rows - 1, &mut prefix_idx) {
            break;
        }
        last_start = prefix_idx[d - 2] + 1;
    }

    out.best = best.map(|(num, gram, index, rows)| RangeBest {
        value: BigRational::new(BigInt::from(num), BigInt::from(gram)),
        index,
        rows,
    });
    out
}

/// Gram kernel: exact normal-equation solve per subset.
pub(crate) fn scan_gram(list: &RowList, start: u64, count: u64, index_base: u64) -> RangeOutcome {
    let d = list.d;
    let n_rows = list.len();
    let mut out = RangeOutcome::default();
    if count == 0 {
        return out;
    }
    let mut subset = unrank(n_rows, d, start);
    let mut selected: Vec<&[i64]> = Vec::with_capacity(d);
    for offset in 0..count {
        selected.clear();
        selected.extend(subset.iter().map(|&i| list.rows[i].entries.as_slice()));
        let system = PairSystem::from_rows(&selected, list.split).expect("rows have length d");
        out.subsets += 1;
        match affine_distance(&system) {
            AffineSolution::Singular => out.singular += 1,
            AffineSolution::Unique {
                squared_distance, ..
            } => {
                if squared_distance.is_zero() {
                    out.zero += 1;
                } else {
                    let cand = RangeBest {
                        value: squared_distance,
                        index: index_base + start + offset,
                        rows: subset.clone(),
                    };
                    if out.best.as_ref().is_none_or(|b| cand.precedes(b)) {
                        out.best = Some(cand);
                    }
                }
            }
        }
        if offset + 1 < count && !advance(n_rows, &mut subset) {
            break;
        }
    }
    out
}
