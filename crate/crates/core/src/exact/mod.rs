//! Exact rational scalars, dense linear algebra, and the LP kernel.
//!
//! Everything downstream — core-variety iteration, measure extraction,
//! facial tests — reduces to the primitives here, and all of it is exact:
//! a returned point re-evaluates against its constraints to literal zeros
//! and nonnegatives, never approximately.

mod cone;
mod lp;
mod mat;
mod rat;

pub use cone::{extreme_rays, lp, primitive, relint_point, ConeDesc, RelintPoint};
pub use lp::{simplex, simplex_with_stats, LpBuilder, LpResult, LpStatus, SolveStats};
pub use mat::{kernel_basis, Mat};
pub use rat::Rat;
