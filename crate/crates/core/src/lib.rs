//! Exact formal power series and the mirror-map pipeline for log Calabi-Yau
//! pairs: I-functions, mirror maps, the proper Landau-Ginzburg potential,
//! quantum and classical periods, and checks of the identities relating them.

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod identities;
pub mod periods;
pub mod pipeline;
pub mod rational;
pub mod series;

pub use algebra::{projective_space, AlgebraElement, GradedAlgebra, RestrictionMap};
pub use catalog::{builtin, load_geometry, InvariantTable, PairGeometry};
pub use error::{Error, Result};
pub use rational::{format_rational, parse_rational, Rational};
pub use series::{
    CoefficientRing, NovikovSeries, ScalarSeries, Scalars, TruncationPolicy, XLaurentSeries,
    ZLaurentElement, ZLaurentRing,
};
