//! Independent checks: exact simplex-to-simplex distance, the exhaustive
//! point-set search for tiny cells, and the catalog of known kissing pairs.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{BigInt, BigRational};
use crate::lsq::{affine_distance, sharpness_check, AffineSolution, PairSystem};
use crate::search::combin::{advance, binomial, unrank};

/// Two lattice simplices given by their vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplexPair {
    pub k: i64,
    #[serde(rename = "P")]
    pub p: Vec<Vec<i64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<i64>>,
}

impl SimplexPair {
    pub fn dimension(&self) -> usize {
        self.p.first().map_or(0, Vec::len)
    }

    pub fn within_cube(&self) -> bool {
        self.p
            .iter()
            .chain(&self.q)
            .flatten()
            .all(|v| (0..=self.k).contains(v))
    }

    pub fn swapped(&self) -> SimplexPair {
        SimplexPair {
            k: self.k,
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessFixture {
    pub d: usize,
    pub k: i64,
    pub pair: SimplexPair,
    /// `1 / ε(d,k)²`.
    pub expected_inv_squared: BigInt,
}

fn select(vertices: &[Vec<i64>], mask: u32) -> Vec<&[i64]> {
    vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, v)| v.as_slice())
        .collect()
}

/// Exact `d(P, Q)²` by enumerating face pairs.
///
/// The closest points lie in the relative interiors of some face of `P` and
/// some face of `Q`; on that face pair the hull minimizer is feasible. Face
/// pairs with a singular Gram matrix are skipped since a smaller face pair
/// attains the same minimum.
pub fn simplex_distance_squared(pair: &SimplexPair) -> BigRational {
    assert!(
        !pair.p.is_empty() && !pair.q.is_empty() && pair.p.len() < 32 && pair.q.len() < 32,
        "both simplices need between 1 and 31 vertices"
    );
    let d = pair.dimension();
    let mut best: Option<BigRational> = None;
    for pm in 1u32..(1 << pair.p.len()) {
        let ps = select(&pair.p, pm);
        for qm in 1u32..(1 << pair.q.len()) {
            let qs = select(&pair.q, qm);
            if ps.len() + qs.len() > d + 2 {
                continue;
            }
            let system = PairSystem::from_simplices(&ps, &qs).expect("vertices share a dimension");
            let sol = affine_distance(&system);
            let AffineSolution::Unique {
                squared_distance, ..
            } = &sol
            else {
                continue;
            };
            if !sharpness_check(&sol, system.split()).expect("solution is unique") {
                continue;
            }
            if best.as_ref().is_none_or(|b| squared_distance < b) {
                best = Some(squared_distance.clone());
            }
        }
    }
    best.expect("a pair of single vertices is always feasible")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub squared: BigRational,
    pub witness: SimplexPair,
}

pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

/// `ε(d,k)²` over every `(d+1)`-point set and every bipartition of it.
pub fn brute_force_epsilon(d: usize, k: i64) -> Result<BruteForce> {
    if d < 2 || k < 1 {
        return Err(Error::Contract(format!(
            "brute force needs d ≥ 2 and k ≥ 1, got ({d}, {k})"
        )));
    }
    let side = (k + 1) as u64;
    let n_points = side.checked_pow(d as u32).filter(|&n| n <= u32::MAX as u64);
    let sets = n_points.and_then(|n| binomial(n, d as u64 + 1));
    let (n_points, sets) = match (n_points, sets) {
        (Some(n), Some(s)) if s <= BRUTE_FORCE_LIMIT => (n as usize, s),
        _ => {
            return Err(Error::ResourceGuard {
                what: "point subsets for brute force",
                size: format!("C({}^{d}, {})", k + 1, d + 1),
                limit: BRUTE_FORCE_LIMIT.to_string(),
            })
        }
    };

    let points: Vec<Vec<i64>> = (0..n_points)
        .map(|mut idx| {
            let mut p = vec![0i64; d];
            for c in (0..d).rev() {
                p[c] = (idx % side as usize) as i64;
                idx /= side as usize;
            }
            p
        })
        .collect();

    let chunk = 4096u64;
    let n_chunks = sets.div_ceil(chunk);
    let best = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let count = chunk.min(sets - start);
            let mut subset = unrank(n_points, d + 1, start);
            let mut local: Option<(BigRational, u64, SimplexPair)> = None;
            for offset in 0..count {
                if let Some((value, pair)) = best_bipartition(&points, &subset, k) {
                    if local.as_ref().is_none_or(|(b, _, _)| value < *b) {
                        local = Some((value, start + offset, pair));
                    }
                }
                if offset + 1 < count {
                    advance(n_points, &mut subset);
                }
            }
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => Some(if (&b.0, b.1) < (&a.0, a.1) { b } else { a }),
            },
        );
    let (squared, _, witness) = best.ok_or(Error::NoCandidate)?;
    Ok(BruteForce { squared, witness })
}

/// Smallest positive distance over the bipartitions of one point set; the
/// part holding the first point is `P`.
fn best_bipartition(
    points: &[Vec<i64>],
    subset: &[usize],
    k: i64,
) -> Option<(BigRational, SimplexPair)> {
    let size = subset.len();
    let mut best: Option<(BigRational, SimplexPair)> = None;
    for mask in 1u32..(1 << size) {
        if mask & 1 == 0 || mask == (1 << size) - 1 {
            continue;
        }
        let (mut p, mut q) = (Vec::new(), Vec::new());
        for (i, &idx) in subset.iter().enumerate() {
            if mask & (1 << i) != 0 {
                p.push(points[idx].clone());
            } else {
                q.push(points[idx].clone());
            }
        }
        let pair = SimplexPair { k, p, q };
        let value = simplex_distance_squared(&pair);
        if value.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, pair));
        }
    }
    best
}

#[derive(Deserialize)]
struct CatalogFile {
    version: u32,
    fixtures: Vec<CatalogEntry>,
}

#[derive(Deserialize)]
struct CatalogEntry {
    d: usize,
    k: i64,
    #[serde(rename = "P")]
    p: Vec<Vec<i64>>,
    #[serde(rename = "Q")]
    q: Vec<Vec<i64>>,
    expected_inv_sq: String,
}

pub const CATALOG_JSON: &str = include_str!("../data/witnesses.json");

/// Known kissing pairs, with `1/ε(d,k)²` for each.
pub fn witness_catalog() -> Vec<WitnessFixture> {
    let file: CatalogFile = serde_json::from_str(CATALOG_JSON).expect("bundled catalog parses");
    assert_eq!(file.version, 1, "unsupported catalog version");
    file.fixtures
        .into_iter()
        .map(|e| WitnessFixture {
            d: e.d,
            k: e.k,
            pair: SimplexPair {
                k: e.k,
                p: e.p,
                q: e.q,
            },
            expected_inv_squared: e.expected_inv_sq.parse().expect("integer in catalog"),
        })
        .collect()
}

pub fn fixture(d: usize, k: i64) -> Option<WitnessFixture> {
    witness_catalog().into_iter().find(|f| f.d == d && f.k == k)
}

/// `1 / value` as an integer when the value is a unit fraction.
pub fn unit_fraction_denominator(value: &BigRational) -> Option<BigInt> {
    (value.numer().is_one()).then(|| value.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ratio;

    fn pair(k: i64, p: &[&[i64]], q: &[&[i64]]) -> SimplexPair {
        SimplexPair {
            k,
            p: p.iter().map(|v| v.to_vec()).collect(),
            q: q.iter().map(|v| v.to_vec()).collect(),
        }
    }

    /// Squared distance between two lines in R³ through `a + s u` and `b + t v`.
    fn line_distance_3d(a: [i64; 3], u: [i64; 3], b: [i64; 3], v: [i64; 3]) -> BigRational {
        let n = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let w: i64 = (0..3).map(|i| (b[i] - a[i]) * n[i]).sum();
        let nn: i64 = n.iter().map(|x| x * x).sum();
        ratio(w * w, nn)
    }

    #[test]
    fn segment_pair_distance() {
        let s = pair(4, &[&[0, 0, 0], &[3, 4, 4]], &[&[4, 1, 2], &[0, 4, 3]]);
        assert_eq!(simplex_distance_squared(&s), ratio(1, 1050));
        assert_eq!(
            line_distance_3d([0, 0, 0], [3, 4, 4], [4, 1, 2], [-4, 3, 1]),
            ratio(1, 1050)
        );
    }

    #[test]
    fn cube_diagonals_match_line_oracle() {
        let s = pair(1, &[&[0, 0, 0], &[1, 1, 1]], &[&[1, 0, 0], &[0, 1, 0]]);
        let lines = line_distance_3d([0, 0, 0], [1, 1, 1], [1, 0, 0], [-1, 1, 0]);
        assert_eq!(lines, ratio(1, 6));
        assert_eq!(simplex_distance_squared(&s), lines);
    }

    #[test]
    fn segment_and_triangle_in_four_dimensions() {
        let s = pair(
            1,
            &[&[0, 0, 0, 0], &[1, 1, 1, 1]],
            &[&[1, 0, 0, 0], &[0, 1, 1, 0], &[0, 1, 0, 1]],
        );
        assert_eq!(simplex_distance_squared(&s), ratio(1, 18));
    }

    #[test]
    fn intersecting_simplices() {
        assert!(simplex_distance_squared(&pair(1, &[&[0, 0]], &[&[0, 0]])).is_zero());
        let crossing = pair(2, &[&[0, 0], &[2, 2]], &[&[0, 2], &[2, 0]]);
        assert!(simplex_distance_squared(&crossing).is_zero());
        let touching = pair(2, &[&[0, 0], &[2, 0]], &[&[1, 0], &[1, 2]]);
        assert!(simplex_distance_squared(&touching).is_zero());
    }

    #[test]
    fn closest_point_is_a_vertex_when_the_hull_minimizer_is_outside() {
        // hull distance of these segments is 0 (coplanar lines cross outside)
        let s = pair(3, &[&[0, 0], &[1, 0]], &[&[3, 1], &[3, 3]]);
        assert_eq!(simplex_distance_squared(&s), ratio(5, 1));
    }

    #[test]
    fn parallel_segments() {
        let s = pair(2, &[&[0, 0], &[2, 0]], &[&[1, 1], &[2, 1]]);
        assert_eq!(simplex_distance_squared(&s), ratio(1, 1));
    }

    #[test]
    fn brute_force_small_cells() {
        assert_eq!(brute_force_epsilon(2, 1).unwrap().squared, ratio(1, 2));
        assert_eq!(brute_force_epsilon(2, 2).unwrap().squared, ratio(1, 5));
        let r = brute_force_epsilon(3, 1).unwrap();
        assert_eq!(r.squared, ratio(1, 6));
        assert_eq!(simplex_distance_squared(&r.witness), ratio(1, 6));
    }

    #[test]
    fn brute_force_guard() {
        assert!(matches!(
            brute_force_epsilon(3, 4),
            Err(Error::ResourceGuard { .. })
        ));
        assert!(matches!(
            brute_force_epsilon(40, 9),
            Err(Error::ResourceGuard { .. })
        ));
    }

    #[test]
    fn catalog_covers_the_table() {
        let cat = witness_catalog();
        let expected: Vec<(usize, i64, u64)> = vec![
            (3, 1, 6),
            (3, 2, 50),
            (3, 3, 299),
            (3, 4, 1050),
            (3, 5, 2870),
            (3, 6, 6466),
            (3, 7, 12750),
            (3, 8, 22826),
            (4, 1, 18),
            (4, 2, 452),
            (4, 3, 8591),
            (5, 1, 58),
            (6, 1, 202),
        ];
        let got: Vec<(usize, i64, u64)> = cat
            .iter()
            .map(|f| (f.d, f.k, (&f.expected_inv_squared).try_into().unwrap()))
            .collect();
        assert_eq!(got, expected);
        for f in &cat {
            assert!(f.pair.within_cube());
            assert_eq!(f.pair.dimension(), f.d);
        }
    }

    #[test]
    fn unit_fractions() {
        assert_eq!(
            unit_fraction_denominator(&ratio(1, 58)),
            Some(BigInt::from(58))
        );
        assert_eq!(unit_fraction_denominator(&ratio(2, 7)), None);
    }
}
