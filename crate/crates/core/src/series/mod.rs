//! Truncated power series over coefficient rings, plus Laurent variables z and x.

mod novikov;
mod policy;
mod ring;
mod xlaurent;
mod zlaurent;

pub use novikov::{exp_linear, pairing, NovikovSeries, ScalarSeries};
pub use policy::{Exponent, TruncationPolicy};
pub use ring::{CoefficientRing, Scalars};
pub use xlaurent::XLaurentSeries;
pub use zlaurent::{linear_factor, nilpotent_reciprocal, ZLaurentElement, ZLaurentRing};
