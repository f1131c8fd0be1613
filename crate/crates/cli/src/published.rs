//! Published reference values and the budget tiers used by `table`.

use clap::ValueEnum;
use kissing_core::BigInt;
use serde::Serialize;

/// Row-list sizes `|L(d,k)|` for `d = 3..7`, starting at `k = 1`.
pub const ROW_COUNTS: &[(usize, &[usize])] = &[
    (3, &[6, 24, 72, 144, 288, 432, 720, 1008, 1440, 1872]),
    (4, &[14, 89, 359, 929, 2189, 4019, 7469, 11969]),
    (5, &[30, 300, 1620, 5400, 15120]),
    (6, &[62, 965, 6971]),
    (7, &[126, 3024]),
];

/// Known `1/ε(d,k)²` for `d ≥ 3`.
pub const INVERSE_SQUARES: &[(usize, i64, u64)] = &[
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

pub fn row_count_cells() -> impl Iterator<Item = (usize, i64, usize)> {
    ROW_COUNTS.iter().flat_map(|&(d, counts)| {
        counts
            .iter()
            .enumerate()
            .map(move |(i, &c)| (d, i as i64 + 1, c))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    Fast,
    Standard,
    Heavy,
}

impl Budget {
    /// Largest number of evaluated subsets a cell may need to run under this tier.
    pub fn subset_limit(self) -> u128 {
        match self {
            Budget::Fast => 1_000_000,
            Budget::Standard => 6_000_000,
            Budget::Heavy => u128::MAX,
        }
    }

    pub fn admits(self, subsets: &BigInt) -> bool {
        self == Budget::Heavy || *subsets <= BigInt::from(self.subset_limit())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_published_row_cell() {
        assert_eq!(row_count_cells().count(), 28);
    }

    #[test]
    fn tiers_are_nested() {
        assert!(Budget::Fast.subset_limit() < Budget::Standard.subset_limit());
        assert!(Budget::Heavy.admits(&(BigInt::from(u128::MAX) * 2)));
        // (4,2) needs 2·C(89,4) subsets, (3,5) needs 2·C(288,3)
        assert!(Budget::Standard.admits(&BigInt::from(4_883_252)));
        assert!(!Budget::Standard.admits(&BigInt::from(7_879_872)));
        assert!(!Budget::Fast.admits(&BigInt::from(4_883_252)));
    }
}
