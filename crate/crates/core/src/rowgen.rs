//! Row lists for the pair `(A, b)`.
//!
//! A pair of simplices with `n + 1` and `m + 1` vertices in `[0,k]^d` gives a
//! `d × (d-1)` difference matrix `A` and an offset `b`. Coordinate `j` of every
//! vertex contributes one row `(x_1-x_0, …, x_n-x_0, y_1-y_0, …, y_m-y_0, y_0-x_0)`,
//! and rows are independent of one another, so the search enumerates rows once
//! and then picks `d` of them. Rows are reduced by the gcd of their entries and
//! sign-normalized since neither operation can increase the affine distance nor
//! turn a positive distance into zero.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Dimensions `(n, m)` of the two simplices; `n + m = d - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Split {
    pub n: usize,
    pub m: usize,
}

impl Split {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn dimension(&self) -> usize {
        self.n + self.m + 1
    }
}

/// One coordinate of every vertex: `x_0, x_1..x_n` for `P`, `y_0, y_1..y_m` for `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorTuple {
    pub x: Vec<i64>,
    pub x0: i64,
    pub y: Vec<i64>,
    pub y0: i64,
}

impl GeneratorTuple {
    pub fn split(&self) -> Split {
        Split::new(self.x.len(), self.y.len())
    }

    pub fn raw_entries(&self) -> Vec<i64> {
        let mut e = Vec::with_capacity(self.x.len() + self.y.len() + 1);
        e.extend(self.x.iter().map(|v| v - self.x0));
        e.extend(self.y.iter().map(|v| v - self.y0));
        e.push(self.y0 - self.x0);
        e
    }

    pub fn raw_row(&self) -> RawRow {
        RawRow {
            entries: self.raw_entries(),
            provenance: self.clone(),
        }
    }

    /// Applies `v ↦ k - v` to every field, which negates the raw row.
    pub fn reflect(&self, k: i64) -> GeneratorTuple {
        GeneratorTuple {
            x: self.x.iter().map(|v| k - v).collect(),
            x0: k - self.x0,
            y: self.y.iter().map(|v| k - v).collect(),
            y0: k - self.y0,
        }
    }

    pub fn within(&self, k: i64) -> bool {
        let ok = |v: &i64| (0..=k).contains(v);
        self.x.iter().all(ok) && ok(&self.x0) && self.y.iter().all(ok) && ok(&self.y0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRow {
    pub entries: Vec<i64>,
    pub provenance: GeneratorTuple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalRow {
    pub entries: Vec<i64>,
    pub divisor: i64,
    pub flipped: bool,
    pub provenance: GeneratorTuple,
}

impl CanonicalRow {
    /// The entries scaled back to the raw row of the stored provenance.
    pub fn unreduced(&self) -> Vec<i64> {
        let sign = if self.flipped { -1 } else { 1 };
        self.entries
            .iter()
            .map(|e| sign * self.divisor * e)
            .collect()
    }

    /// Lower is preferred when several generators share canonical entries.
    fn provenance_rank(&self) -> u8 {
        match (self.divisor == 1, self.flipped) {
            (true, false) => 0,
            (true, true) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowList {
    pub d: usize,
    pub k: i64,
    pub split: Split,
    pub rows: Vec<CanonicalRow>,
}

impl RowList {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, index: usize) -> &CanonicalRow {
        &self.rows[index]
    }

    pub fn entries(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.rows.iter().map(|r| r.entries.as_slice())
    }
}

/// Divides out the gcd and makes the first non-zero entry positive.
///
/// Returns `None` when the `A`-part (all but the last entry) vanishes: such a
/// row pins one residual coordinate at `|b_j| ≥ 1`.
pub fn canonicalize(r: &RawRow) -> Option<CanonicalRow> {
    let (_, a_part) = r.entries.split_last()?;
    if a_part.iter().all(|&v| v == 0) {
        return None;
    }
    let divisor = r.entries.iter().fold(0i64, |g, &v| g.gcd(&v));
    let first = *r.entries.iter().find(|&&v| v != 0)?;
    let flipped = first < 0;
    let sign = if flipped { -1 } else { 1 };
    Some(CanonicalRow {
        entries: r.entries.iter().map(|v| sign * v / divisor).collect(),
        divisor,
        flipped,
        provenance: r.provenance.clone(),
    })
}

fn check_split(d: usize, k: i64, split: Split) -> Result<()> {
    if d < 2 {
        return contract(format!("dimension {d} is below 2"));
    }
    if k < 1 {
        return contract(format!("k = {k} is below 1"));
    }
    if split.m == 0 || split.n + split.m != d - 1 {
        return contract(format!(
            "split ({}, {}) is invalid for d = {d}: need n + m = d - 1 and m ≥ 1",
            split.n, split.m
        ));
    }
    Ok(())
}

/// Odometer over `digits` positions in `[0, k]`, last position fastest.
fn for_each_tuple(digits: usize, k: i64, mut f: impl FnMut(&[i64])) {
    let mut cur = vec![0i64; digits];
    loop {
        f(&cur);
        let mut pos = digits;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if cur[pos] < k {
                cur[pos] += 1;
                break;
            }
            cur[pos] = 0;
        }
    }
}

fn tuple_from_digits(digits: &[i64], split: Split) -> GeneratorTuple {
    let (x, rest) = digits.split_at(split.n);
    let x0 = rest[0];
    let (y, rest) = rest[1..].split_at(split.m);
    GeneratorTuple {
        x: x.to_vec(),
        x0,
        y: y.to_vec(),
        y0: rest[0],
    }
}

/// All distinct canonical rows for `(d, k)` and the given split, sorted by entries.
pub fn generate_rows(d: usize, k: i64, n: usize, m: usize) -> Result<RowList> {
    let split = Split::new(n, m);
    check_split(d, k, split)?;

    let mut seen: BTreeMap<Vec<i64>, CanonicalRow> = BTreeMap::new();
    for_each_tuple(d + 1, k, |digits| {
        let Some(row) = canonicalize(&tuple_from_digits(digits, split).raw_row()) else {
            return;
        };
        match seen.entry(row.entries.clone()) {
            Entry::Vacant(slot) => {
                slot.insert(row);
            }
            Entry::Occupied(mut slot) => {
                if row.provenance_rank() < slot.get().provenance_rank() {
                    slot.insert(row);
                }
            }
        }
    });

    Ok(RowList {
        d,
        k,
        split,
        rows: seen.into_values().collect(),
    })
}

/// A generator tuple in `[0,k]` whose raw row equals `c.entries` exactly.
pub fn realize_row(c: &CanonicalRow, k: i64) -> Result<GeneratorTuple> {
    if c.divisor == 1 {
        let tuple = if c.flipped {
            c.provenance.reflect(k)
        } else {
            c.provenance.clone()
        };
        debug_assert_eq!(tuple.raw_entries(), c.entries);
        return Ok(tuple);
    }
    let split = c.provenance.split();
    let mut found = None;
    for_each_tuple(split.n + split.m + 2, k, |digits| {
        if found.is_none() {
            let t = tuple_from_digits(digits, split);
            if t.raw_entries() == c.entries {
                found = Some(t);
            }
        }
    });
    found.ok_or_else(|| Error::NoExactRealization {
        entries: c.entries.clone(),
    })
}
