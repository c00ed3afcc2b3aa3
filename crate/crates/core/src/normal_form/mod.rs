//! The two normal forms of `a` near a double characteristic, their side
//! conditions, and the cutoff-extended functional `Q(w, theta)`.

pub mod cutoff;
pub mod extended_q;
pub mod spec;

pub use cutoff::Cutoff;
pub use extended_q::{build_extended_q, ConstantPart, ExtendedQ, IdentitySides};
pub use spec::{
    build_normal_form, check_side_conditions, NormalFormSpec, SideCheck, SideConditionReport,
    SignGrid, Variant, BBIS_FAILURE,
};
