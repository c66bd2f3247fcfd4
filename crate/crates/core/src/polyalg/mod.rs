//! Truncated multivariate Taylor algebra centered at an expansion point.
//!
//! Everything downstream (recursion, kernel evaluation) is assembled from these
//! operations. Storage is dense and graded-lexicographic; every value is immutable once
//! built and cheap to share across threads.

mod coeff_fn;
mod jet;
mod multi_index;
mod taylor;

pub use coeff_fn::{series_mul, CoefficientFn, FourierTerm, PolyTerm, SpatialFn, Taylorized};
pub use jet::{TimeJet, TimeVar};
pub use multi_index::{binomial, factorial, MultiIndex, MAX_FACTORIAL_ORDER};
pub use taylor::{MonomialBasis, TaylorPoly};
