//! I-functions, mirror maps, normalization and the change of variables.

mod ifunction;
mod local;
mod mirror;
mod relative;

pub use ifunction::{
    closed_form_i, extended_i, hypergeometric_factor, is_unit, j_function, projective_j, relative_i,
    relative_modification, unit_entry, AmbientSeries, IFunction, RelativeSeries,
};
pub use relative::{RelativeElement, RelativeRing};
pub use local::{i_function_yd0, is_trivial, single_invariant_prediction, tau_d, LocalModel};
pub use mirror::{
    check_string_shape, contact_series, extract_g, geometry_i_function, invert_mirror_map, mirror_data, unit_component,
    ContactEntry, Direction, GExtraction, MirrorChange, MirrorData, Normalized, split_and_normalize,
};
