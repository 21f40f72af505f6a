//! Exact counting of quadratic Vinogradov mean values `J_s(A)` over prime fields.
//!
//! The crate counts solutions to
//!
//! ```text
//! x₁ + … + x_s = x_{s+1} + … + x_{2s},   x₁² + … + x_s² = x_{s+1}² + … + x_{2s}²
//! ```
//!
//! with all `x_i` drawn from a set `A ⊆ 𝔽_p`, together with the related
//! objects used to bound that count: representation functions on 𝔽_p², modular
//! hyperbolae and their Möbius transformations, incidences with parabolae and
//! lines, exponential sums along the moment curve, and sumset growth.
//!
//! Every quantity that admits a fast algorithm also has a brute-force route,
//! and the two are required to agree exactly.

pub mod energy;
pub mod error;
pub mod expsum;
mod fft;
pub mod field;
pub mod gridfn;
pub mod harness;
pub mod incidence;
pub mod moebius;
pub mod setlib;

pub use error::{Error, Result};
pub use field::{PrimeContext, ProjPoint, Residue};
pub use setlib::{generate_set, ResidueSet, SetKind, SetSpec};

use serde::{Deserialize, Serialize};

/// Work caps shared by every counting kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Loop iterations allowed for brute-force enumeration.
    pub brute_ops: u64,
    /// Entries allowed in a sparse map (and pair products in sparse convolution).
    pub sparse_entries: u64,
    /// Cells allowed in a dense p×p grid.
    pub dense_cells: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { brute_ops: 100_000_000, sparse_entries: 10_000_000, dense_cells: 1 << 26 }
    }
}

impl Limits {
    pub(crate) fn check(&self, what: &'static str, needed: u128, cap: u64) -> Result<()> {
        if needed > cap as u128 {
            Err(Error::ResourceLimit { what, needed, cap: cap as u128 })
        } else {
            Ok(())
        }
    }

    pub(crate) fn dense_ok(&self, ctx: PrimeContext) -> bool {
        ctx.p64() * ctx.p64() <= self.dense_cells
    }
}

/// Smallest integer `t ≥ 0` with `t^k ≥ n`, computed exactly.
pub fn ceil_root(n: &num_bigint::BigUint, k: u32) -> u64 {
    use num_bigint::BigUint;
    let guess = num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::MAX).powf(1.0 / k as f64);
    let mut t = (guess as u64).saturating_sub(2);
    while BigUint::from(t).pow(k) < *n {
        t += 1;
    }
    while t > 0 && BigUint::from(t - 1).pow(k) >= *n {
        t -= 1;
    }
    t
}
