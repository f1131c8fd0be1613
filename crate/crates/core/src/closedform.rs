//! Closed-form values and small exhaustive quotient scans.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::{ratio, BigInt, BigRational};

/// `ε(2,k)²`: `1/((k-1)² + k²)` for `k ≥ 2` and `1/2` for `k = 1`.
pub fn epsilon2_squared(k: i64) -> Result<BigRational> {
    match k {
        i64::MIN..=0 => Err(Error::Contract(format!("k = {k} is below 1"))),
        // the formula would give 1/1; the unit square is its own case
        1 => Ok(ratio(1, 2)),
        _ => Ok(ratio(1, (k - 1) * (k - 1) + k * k)),
    }
}

/// Keeps the smaller of two fractions `num/den` with positive denominators.
fn min_fraction(a: Option<(i128, i128)>, b: Option<(i128, i128)>) -> Option<(i128, i128)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if b.0 * a.1 < a.0 * b.1 { b } else { a }),
    }
}

fn to_rational(f: (i128, i128)) -> BigRational {
    BigRational::new(BigInt::from(f.0), BigInt::from(f.1))
}

/// Minimum of `(x₂x₃ - x₁x₄)² / (x₁² + x₂²)` over lattice `x ∈ [-k,k]⁴` with
/// both quantities non-zero.
pub fn min_quotient_2d_squared(k: i64) -> Result<BigRational> {
    if k < 1 {
        return Err(Error::Contract(format!("k = {k} is below 1")));
    }
    let mut best = None;
    for x1 in -k..=k {
        for x2 in -k..=k {
            let den = (x1 * x1 + x2 * x2) as i128;
            if den == 0 {
                continue;
            }
            for x3 in -k..=k {
                for x4 in -k..=k {
                    let num = (x2 * x3 - x1 * x4) as i128;
                    if num != 0 {
                        best = min_fraction(best, Some((num * num, den)));
                    }
                }
            }
        }
    }
    Ok(to_rational(
        best.expect("k ≥ 1 admits a non-degenerate point"),
    ))
}

pub const QUOTIENT_3D_DEFAULT_MAX_K: i64 = 3;

/// Minimum of `det[x₁..₃; x₄..₆; x₇..₉]² / ‖(x₁..₃) × (x₄..₆)‖²` over lattice
/// `x ∈ [-k,k]⁹` with both positive. Scans `(2k+1)⁹` points, so `k` above
/// [`QUOTIENT_3D_DEFAULT_MAX_K`] needs `allow_large`.
pub fn min_quotient_3d_squared(k: i64, allow_large: bool) -> Result<BigRational> {
    if k < 1 {
        return Err(Error::Contract(format!("k = {k} is below 1")));
    }
    if k > QUOTIENT_3D_DEFAULT_MAX_K && !allow_large {
        return Err(Error::ResourceGuard {
            what: "3D quotient scan",
            size: format!("(2·{k}+1)^9 points"),
            limit: format!("k ≤ {QUOTIENT_3D_DEFAULT_MAX_K} without override"),
        });
    }
    let mut firsts: Vec<[i64; 3]> = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            for c in -k..=k {
                firsts.push([a, b, c]);
            }
        }
    }

    let best = firsts
        .par_iter()
        .map(|u| {
            let mut best = None;
            for v in &firsts {
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let den = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as i128;
                if den == 0 {
                    continue;
                }
                // det is linear in the third row with coefficients n
                for w in &firsts {
                    let det = (n[0] * w[0] + n[1] * w[1] + n[2] * w[2]) as i128;
                    if det != 0 {
                        best = min_fraction(best, Some((det * det, den)));
                    }
                }
            }
            best
        })
        .reduce(|| None, min_fraction);
    Ok(to_rational(
        best.expect("k ≥ 1 admits a non-degenerate point"),
    ))
}

/// Squared distance of the segments `(0,0,0)–(k-1,k,k)` and `(k,1,2)–(0,k,k-1)`:
/// `1/(2(2k²-4k+5)(2k²-2k+1))`, an upper bound on `ε(3,k)²`.
pub fn segment_pair_3k_squared(k: i64) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::Contract(format!(
            "segment pattern needs k ≥ 2, got {k}"
        )));
    }
    let k = BigInt::from(k);
    let a = BigInt::from(2) * &k * &k - BigInt::from(4) * &k + BigInt::from(5);
    let b = BigInt::from(2) * &k * &k - BigInt::from(2) * &k + BigInt::from(1);
    Ok(BigRational::new(BigInt::from(1), BigInt::from(2) * a * b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_values() {
        assert_eq!(epsilon2_squared(4).unwrap(), ratio(1, 25));
        assert_eq!(epsilon2_squared(2).unwrap(), ratio(1, 5));
        assert_eq!(epsilon2_squared(1).unwrap(), ratio(1, 2));
        assert!(epsilon2_squared(0).is_err());
    }

    #[test]
    fn quotient_2d() {
        assert_eq!(min_quotient_2d_squared(1).unwrap(), ratio(1, 2));
        assert_eq!(min_quotient_2d_squared(2).unwrap(), ratio(1, 5));
        assert_eq!(min_quotient_2d_squared(4).unwrap(), ratio(1, 25));
    }

    #[test]
    fn every_2d_quotient_respects_the_lower_bound() {
        for k in 2..=5i64 {
            let bound = (k - 1) * (k - 1) + k * k;
            for x1 in -k..=k {
                for x2 in -k..=k {
                    let den = x1 * x1 + x2 * x2;
                    for x3 in -k..=k {
                        for x4 in -k..=k {
                            let num = x2 * x3 - x1 * x4;
                            if den != 0 && num != 0 {
                                // num²/den ≥ 1/bound
                                assert!(num * num * bound >= den, "{x1} {x2} {x3} {x4}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_3d_small() {
        assert_eq!(min_quotient_3d_squared(1, false).unwrap(), ratio(1, 6));
    }

    #[test]
    fn quotient_3d_guard() {
        assert!(matches!(
            min_quotient_3d_squared(4, false),
            Err(Error::ResourceGuard { .. })
        ));
    }

    #[test]
    fn segment_formula() {
        assert_eq!(segment_pair_3k_squared(4).unwrap(), ratio(1, 1050));
        assert_eq!(segment_pair_3k_squared(2).unwrap(), ratio(1, 50));
        assert_eq!(segment_pair_3k_squared(3).unwrap(), ratio(1, 286));
        assert!(segment_pair_3k_squared(3).unwrap() > ratio(1, 299));
        assert!(segment_pair_3k_squared(1).is_err());
    }
}
