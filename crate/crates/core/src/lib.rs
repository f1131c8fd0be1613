//! Exact computation of the smallest distance between two disjoint lattice
//! polytopes in `[0,k]^d`.
//!
//! The search reduces the problem to pairs of simplices whose dimensions sum
//! to `d - 1`, bounds their distance below by the distance of their affine
//! hulls (an exact least-squares value), and enumerates candidate systems row
//! by row. Every minimum is then checked against the simplices themselves.

pub mod closedform;
pub mod error;
pub mod exactmath;
pub mod lsq;
pub mod oracle;
pub mod rowgen;
pub mod search;

pub use error::{Error, Result};
pub use exactmath::{BigInt, BigRational, IntMatrix};
pub use lsq::{AffineSolution, PairSystem};
pub use oracle::{SimplexPair, WitnessFixture};
pub use rowgen::{CanonicalRow, GeneratorTuple, RowList, Split};
pub use search::{Kernel, SearchConfig, SearchResult};
