//! Enumeration of row subsets and the certified minimum.
//!
//! Subsets of each split's row list are visited in lexicographic order; the
//! global enumeration index is `split_position · C(|L|, d) + rank`, so a single
//! integer orders every candidate, names a resume point, and breaks ties.

pub mod combin;
mod kernel;

use std::num::NonZeroU64;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::exactmath::{BigInt, BigRational};
use crate::lsq::{affine_distance, sharpness_check, AffineSolution, PairSystem};
use crate::oracle::{simplex_distance_squared, SimplexPair};
use crate::rowgen::{generate_rows, realize_row, RowList, Split};

use combin::{binomial, binomial_big};
use kernel::{cofactor_kernel_fits, scan_cofactor, scan_gram, RangeBest, RangeOutcome};

/// How each subset is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// Fixed-prefix cofactor updates in machine integers; falls back to
    /// [`Kernel::Gram`] when the entry bounds could overflow.
    #[default]
    Cofactor,
    /// Gram matrix and exact Cramer solve for every subset.
    Gram,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub worker_count: usize,
    /// Subsets between progress lines; `0` disables them.
    pub progress_interval: u64,
    /// Global index of the first subset to evaluate.
    pub resume_token: Option<u64>,
    /// Best candidate carried over from an interrupted run.
    pub resume_best: Option<Candidate>,
    /// Evaluate at most this many subsets.
    pub max_subsets: Option<u64>,
    pub kernel: Kernel,
    /// Subsets between checkpoint callbacks.
    pub checkpoint_interval: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            worker_count: 1,
            progress_interval: 0,
            resume_token: None,
            resume_best: None,
            max_subsets: None,
            kernel: Kernel::Cofactor,
            checkpoint_interval: None,
        }
    }
}

impl SearchConfig {
    pub fn with_workers(worker_count: usize) -> Self {
        Self {
            worker_count,
            ..Self::default()
        }
    }
}

/// A minimizing subset: value, global index, split and row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub squared_distance: BigRational,
    pub index: u64,
    pub split: Split,
    pub rows: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CandidateRepr {
    numerator: String,
    denominator: String,
    index: u64,
    split: Split,
    rows: Vec<usize>,
}

impl Serialize for Candidate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CandidateRepr {
            numerator: self.squared_distance.numer().to_string(),
            denominator: self.squared_distance.denom().to_string(),
            index: self.index,
            split: self.split,
            rows: self.rows.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Candidate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CandidateRepr::deserialize(d)?;
        let num: BigInt = r.numerator.parse().map_err(D::Error::custom)?;
        let den: BigInt = r.denominator.parse().map_err(D::Error::custom)?;
        if !den.is_positive() {
            return Err(D::Error::custom("denominator must be positive"));
        }
        Ok(Candidate {
            squared_distance: BigRational::new(num, den),
            index: r.index,
            split: r.split,
            rows: r.rows,
        })
    }
}

/// Resume state written between segments of a long search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub d: usize,
    pub k: i64,
    pub next_index: u64,
    pub total: u64,
    pub best: Option<Candidate>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub subsets_evaluated: u64,
    pub singular_count: u64,
    pub zero_count: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub d: usize,
    pub k: i64,
    pub min_squared_distance: BigRational,
    pub inv_eps_squared: BigRational,
    /// Every subset of every split was evaluated.
    pub complete: bool,
    /// The hull minimizer of the witness system lies inside both simplices.
    pub sharp: bool,
    /// Complete, sharp, and confirmed on the reconstructed simplices.
    pub certified: bool,
    pub witness_split: Split,
    pub witness_row_indices: Vec<usize>,
    pub witness_rows: Vec<Vec<i64>>,
    pub witness: Option<SimplexPair>,
    /// Why the witness could not be rebuilt, if it could not.
    pub witness_error: Option<String>,
    pub stats: SearchStats,
}

/// Exact sizes of the three enumeration strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpaceCounts {
    /// Every `(d+1)`-point set with every bipartition.
    pub naive: BigInt,
    /// `naive / (2^d d!)`, rounded down: the count if hypercube symmetry were free.
    pub symmetry_limit: BigInt,
    /// `⌊(d+1)/2⌋ · C(|L|, d)`.
    pub rowlist: BigInt,
}

/// All `(n, m)` with `n + m = d - 1` and `n ≤ m`, by increasing `n`.
pub fn splits(d: usize) -> Vec<Split> {
    if d < 2 {
        return Vec::new();
    }
    (0..=(d - 1) / 2)
        .map(|n| Split::new(n, d - 1 - n))
        .collect()
}

pub fn search_space_counts(d: usize, k: i64, list_size: usize) -> SearchSpaceCounts {
    let points = BigInt::from(k + 1).pow(d as u32);
    let bipartitions = (BigInt::one() << (d + 1)) - BigInt::from(2);
    let naive = bipartitions * binomial_big(&points, d as u64 + 1);
    let factorial: BigInt = (1..=d).map(BigInt::from).product();
    let symmetry_limit = &naive / ((BigInt::one() << d) * factorial);
    let rowlist = BigInt::from(splits(d).len()) * binomial_big(&BigInt::from(list_size), d as u64);
    SearchSpaceCounts {
        naive,
        symmetry_limit,
        rowlist,
    }
}

fn choose(n: usize, r: usize) -> Result<u64> {
    binomial(n as u64, r as u64).ok_or_else(|| Error::ResourceGuard {
        what: "subset count",
        size: binomial_big(&BigInt::from(n), r as u64).to_string(),
        limit: u64::MAX.to_string(),
    })
}

fn effective_kernel(list: &RowList, requested: Kernel) -> Kernel {
    let max_abs = list.entries().flatten().map(|v| v.abs()).max().unwrap_or(0);
    match requested {
        Kernel::Cofactor if cofactor_kernel_fits(list.d, max_abs) => Kernel::Cofactor,
        _ => Kernel::Gram,
    }
}

/// A contiguous range of one split's subsets.
#[derive(Debug, Clone, Copy)]
struct Chunk {
    split_pos: usize,
    start: u64,
    count: u64,
}

/// Contiguous chunks covering global indices `[from, to)`.
fn chunks(per_split: u64, n_splits: usize, from: u64, to: u64, size: u64) -> Vec<Chunk> {
    let mut out = Vec::new();
    for split_pos in 0..n_splits {
        let base = split_pos as u64 * per_split;
        let lo = from.max(base);
        let hi = to.min(base + per_split);
        let mut at = lo;
        while at < hi {
            let count = size.min(hi - at);
            out.push(Chunk {
                split_pos,
                start: at - base,
                count,
            });
            at += count;
        }
    }
    out
}

struct Engine<'a> {
    lists: &'a [RowList],
    kernels: Vec<Kernel>,
    per_split: u64,
    progress_interval: u64,
    progress: AtomicU64,
    total: u64,
}

impl Engine<'_> {
    fn scan(&self, chunk: Chunk) -> RangeOutcome {
        let list = &self.lists[chunk.split_pos];
        let base = chunk.split_pos as u64 * self.per_split;
        let out = match self.kernels[chunk.split_pos] {
            Kernel::Cofactor => scan_cofactor(list, chunk.start, chunk.count, base),
            Kernel::Gram => scan_gram(list, chunk.start, chunk.count, base),
        };
        if let Some(step) = NonZeroU64::new(self.progress_interval) {
            let before = self.progress.fetch_add(out.subsets, Ordering::Relaxed);
            let after = before + out.subsets;
            if before / step != after / step {
                eprintln!("[d={} k={}] {after}/{} subsets", list.d, list.k, self.total);
            }
        }
        out
    }

    /// Evaluates `[from, to)` on `pool`; the reduction is order-independent.
    fn run(&self, pool: &rayon::ThreadPool, from: u64, to: u64, workers: usize) -> RangeOutcome {
        let span = to.saturating_sub(from);
        let mut size = (span / (workers as u64 * 16)).max(1);
        if self.progress_interval > 0 {
            size = size.min(self.progress_interval);
        }
        let work = chunks(self.per_split, self.lists.len(), from, to, size);
        pool.install(|| {
            work.par_iter()
                .map(|&c| self.scan(c))
                .reduce(RangeOutcome::default, RangeOutcome::merge)
        })
    }
}

fn to_candidate(best: RangeBest, per_split: u64, lists: &[RowList]) -> Candidate {
    let split = lists[(best.index / per_split) as usize].split;
    Candidate {
        squared_distance: best.value,
        index: best.index,
        split,
        rows: best.rows,
    }
}

fn from_candidate(c: &Candidate) -> RangeBest {
    RangeBest {
        value: c.squared_distance.clone(),
        index: c.index,
        rows: c.rows.clone(),
    }
}

struct Scan {
    best: Option<Candidate>,
    stats: SearchStats,
    complete: bool,
}

fn scan_lists(
    d: usize,
    k: i64,
    lists: &[RowList],
    config: &SearchConfig,
    on_checkpoint: &mut dyn FnMut(&Checkpoint),
) -> Result<Scan> {
    let started = Instant::now();
    if config.worker_count == 0 {
        return contract("worker_count must be at least 1");
    }
    let size = lists[0].len();
    if size < d {
        return Err(Error::EmptySearch {
            rows: size,
            needed: d,
        });
    }
    if lists.iter().any(|l| l.len() != size || l.d != d) {
        return contract("row lists of one search must share size and dimension");
    }
    let per_split = choose(size, d)?;
    let total = per_split
        .checked_mul(lists.len() as u64)
        .ok_or_else(|| Error::ResourceGuard {
            what: "subset count",
            size: format!("{} x {per_split}", lists.len()),
            limit: u64::MAX.to_string(),
        })?;

    let from = config.resume_token.unwrap_or(0).min(total);
    let to = match config.max_subsets {
        Some(cap) => from.saturating_add(cap).min(total),
        None => total,
    };

    let engine = Engine {
        lists,
        kernels: lists
            .iter()
            .map(|l| effective_kernel(l, config.kernel))
            .collect(),
        per_split,
        progress_interval: config.progress_interval,
        progress: AtomicU64::new(from),
        total,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_count)
        .build()
        .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;

    let mut acc = RangeOutcome {
        best: config.resume_best.as_ref().map(from_candidate),
        ..RangeOutcome::default()
    };
    let segment = config
        .checkpoint_interval
        .filter(|&s| s > 0)
        .unwrap_or(u64::MAX);
    let mut at = from;
    while at < to {
        let end = at.saturating_add(segment).min(to);
        acc = acc.merge(engine.run(&pool, at, end, config.worker_count));
        at = end;
        if config.checkpoint_interval.is_some() {
            on_checkpoint(&Checkpoint {
                d,
                k,
                next_index: at,
                total,
                best: acc.best.clone().map(|b| to_candidate(b, per_split, lists)),
                stats: SearchStats {
                    subsets_evaluated: acc.subsets,
                    singular_count: acc.singular,
                    zero_count: acc.zero,
                    elapsed: started.elapsed(),
                },
            });
        }
    }

    Ok(Scan {
        best: acc.best.map(|b| to_candidate(b, per_split, lists)),
        stats: SearchStats {
            subsets_evaluated: acc.subsets,
            singular_count: acc.singular,
            zero_count: acc.zero,
            elapsed: started.elapsed(),
        },
        complete: to == total && (from == 0 || config.resume_best.is_some()),
    })
}

/// Minimum over a single row list (one split).
#[derive(Debug, Clone)]
pub struct ListMinimum {
    pub best: Candidate,
    pub complete: bool,
    pub stats: SearchStats,
}

pub fn enumerate_min(list: &RowList, config: &SearchConfig) -> Result<ListMinimum> {
    let scan = scan_lists(
        list.d,
        list.k,
        std::slice::from_ref(list),
        config,
        &mut |_| {},
    )?;
    let best = scan.best.ok_or(Error::NoCandidate)?;
    Ok(ListMinimum {
        best,
        complete: scan.complete,
        stats: scan.stats,
    })
}

/// Vertex lists whose rows of `(A, b)` are exactly the selected canonical rows.
pub fn reconstruct_witness(indices: &[usize], list: &RowList) -> Result<SimplexPair> {
    let d = list.d;
    if indices.len() != d {
        return contract(format!("witness needs {d} rows, got {}", indices.len()));
    }
    let Split { n, m } = list.split;
    let mut p = vec![vec![0i64; d]; n + 1];
    let mut q = vec![vec![0i64; d]; m + 1];
    for (j, &idx) in indices.iter().enumerate() {
        let t = realize_row(list.get(idx), list.k)?;
        p[0][j] = t.x0;
        q[0][j] = t.y0;
        for i in 0..n {
            p[i + 1][j] = t.x[i];
        }
        for i in 0..m {
            q[i + 1][j] = t.y[i];
        }
    }
    Ok(SimplexPair { k: list.k, p, q })
}

pub fn row_lists(d: usize, k: i64) -> Result<Vec<RowList>> {
    if d < 2 {
        return contract(format!("dimension {d} is below 2"));
    }
    splits(d)
        .into_iter()
        .map(|s| generate_rows(d, k, s.n, s.m))
        .collect()
}

/// Smallest positive hull distance over all splits, certified where possible.
pub fn epsilon(d: usize, k: i64, config: &SearchConfig) -> Result<SearchResult> {
    epsilon_with_checkpoints(d, k, config, &mut |_| {})
}

pub fn epsilon_with_checkpoints(
    d: usize,
    k: i64,
    config: &SearchConfig,
    on_checkpoint: &mut dyn FnMut(&Checkpoint),
) -> Result<SearchResult> {
    if k < 1 {
        return contract(format!("k = {k} is below 1"));
    }
    let lists = row_lists(d, k)?;
    let scan = scan_lists(d, k, &lists, config, on_checkpoint)?;
    let best = scan.best.ok_or(Error::NoCandidate)?;
    let list = lists
        .iter()
        .find(|l| l.split == best.split)
        .expect("candidate split comes from the lists");
    certify(d, k, best, list, scan.complete, scan.stats)
}

fn certify(
    d: usize,
    k: i64,
    best: Candidate,
    list: &RowList,
    complete: bool,
    stats: SearchStats,
) -> Result<SearchResult> {
    let witness_rows: Vec<Vec<i64>> = best
        .rows
        .iter()
        .map(|&i| list.get(i).entries.clone())
        .collect();
    let system = PairSystem::from_rows(&witness_rows, best.split)?;
    let solution = affine_distance(&system);
    let sharp = match &solution {
        AffineSolution::Unique {
            squared_distance, ..
        } if *squared_distance == best.squared_distance => sharpness_check(&solution, best.split)?,
        _ => return contract("witness system does not reproduce the searched value"),
    };

    let (witness, witness_error, confirmed) = match reconstruct_witness(&best.rows, list) {
        Ok(pair) => {
            let rebuilt = PairSystem::from_simplices(&pair.p, &pair.q)?;
            debug_assert_eq!(rebuilt, system);
            let confirmed =
                rebuilt == system && simplex_distance_squared(&pair) == best.squared_distance;
            (Some(pair), None, confirmed)
        }
        Err(e) => (None, Some(e.to_string()), false),
    };

    let min = best.squared_distance;
    debug_assert!(!min.is_zero());
    Ok(SearchResult {
        d,
        k,
        inv_eps_squared: min.recip(),
        min_squared_distance: min,
        complete,
        sharp,
        certified: complete && sharp && confirmed,
        witness_split: best.split,
        witness_row_indices: best.rows,
        witness_rows,
        witness,
        witness_error,
        stats,
    })
}
