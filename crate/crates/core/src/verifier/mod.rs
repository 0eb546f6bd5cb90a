//! Numerical verification of the perimeter-difference limit and its
//! exponential rate along the `(Np, Nq−1)` family.

mod genericity;
mod lazutkin;
mod limit;
mod report;
mod sweep;

pub use genericity::{genericity, genericity_of, GenericityReport};
pub use lazutkin::{lazutkin_asymptotics, AngleSlopes, LazutkinReport};
pub use limit::{extract_limit, fit_rate, LimitEstimate, LimitMethod, RateFit, Sequence};
pub use report::{verify, Margins, SequenceRow, Thresholds, VerifyOptions, VerifyReport};
pub use sweep::{sweep, SweepFailure, SweepPoint, SweepReport};
