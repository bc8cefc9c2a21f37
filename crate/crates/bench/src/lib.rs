//! Fixtures shared by the criterion benches.

use relmirror::{builtin, PairGeometry, Result};

/// Builtin geometries with the orders used for timing.
pub const CASES: [(&str, u32); 3] = [("p2_cubic", 9), ("p3_quartic", 12), ("blp3_k3", 4)];

/// Geometries with a positive m-vector, for which periods are defined.
pub const PERIOD_CASES: [(&str, u32); 2] = [("p2_cubic", 9), ("p3_quartic", 12)];

pub fn fixture(name: &str, order: u32) -> Result<PairGeometry> {
    Ok(builtin(name)?.with_order(order))
}
