//! Lexicographic ranking of `r`-subsets of `{0, …, n-1}`.

use num_traits::One;

use crate::exactmath::BigInt;

pub fn binomial(n: u64, r: u64) -> Option<u64> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    u64::try_from(acc).ok()
}

pub fn binomial_big(n: &BigInt, r: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// The subset at position `rank` in lexicographic order.
pub fn unrank(n: usize, r: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(r);
    let mut next = 0usize;
    for i in 0..r {
        let mut c = next;
        loop {
            let below = binomial((n - c - 1) as u64, (r - i - 1) as u64).expect("rank fits in u64");
            if rank < below {
                break;
            }
            rank -= below;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

pub fn rank(n: usize, subset: &[usize]) -> u64 {
    let r = subset.len();
    let mut acc = 0u64;
    let mut start = 0usize;
    for (i, &c) in subset.iter().enumerate() {
        for j in start..c {
            acc += binomial((n - j - 1) as u64, (r - i - 1) as u64).expect("rank fits in u64");
        }
        start = c + 1;
    }
    acc
}

/// Advances to the lexicographic successor; `false` once the last subset is passed.
pub fn advance(n: usize, subset: &mut [usize]) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < n - r + i {
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(359, 4), Some(680_588_251));
        assert_eq!(binomial(5, 6), Some(0));
        assert_eq!(binomial(200, 100), None);
        assert_eq!(
            binomial_big(&BigInt::from(256), 5),
            BigInt::from(8_809_549_056u64)
        );
    }

    #[test]
    fn ranks_follow_enumeration_order() {
        let (n, r) = (9, 4);
        let mut s: Vec<usize> = (0..r).collect();
        let mut idx = 0u64;
        loop {
            assert_eq!(rank(n, &s), idx);
            assert_eq!(unrank(n, r, idx), s);
            idx += 1;
            if !advance(n, &mut s) {
                break;
            }
        }
        assert_eq!(idx, binomial(9, 4).unwrap());
    }
}
