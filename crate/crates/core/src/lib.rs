//! Control sets of semigroups of SL(n, ℝ) acting on `K = SO(n)`, on the maximal
//! flag manifold `K/M` and on projective space.
//!
//! The pipeline samples a space, builds an ε-reachability graph under the
//! generator words of a semigroup, and reads control sets off its strongly
//! connected components. Fixed points of regular elements then label each set by
//! a signed permutation (on `K`) or a permutation (on flags), from which the
//! subgroups `C(S) ⊆ M` and `W(S) ⊆ W` and the count of control sets follow.

pub mod engine;
mod error;
pub mod flag;
pub mod k_action;
pub mod linalg;
pub mod verify;
pub mod weyl;

pub use engine::{
    analyze_control_sets, build_reach_graph, find_control_sets, label_control_sets, sample_space, ControlSetRecord, GeneratorSet,
    GraphOptions, Label, Preset, ReachGraph, SampleCloud, Space,
};
pub use error::{Error, Result};
pub use flag::{act_on_flag, act_on_projective, fixed_points_on_flag, fixed_points_on_projective, FlagPoint, ProjPoint};
pub use k_action::{act_on_k, fixed_points_on_k, project_to_flag, right_translate, FixedPointOnK, PointOnK};
pub use linalg::{
    is_regular_positive, iwasawa_decompose, iwasawa_project, regular_split_decompose, GroupElement, IwasawaTriple,
    Matrix, RegularSplit, REGULARITY_TOL,
};
pub use verify::VerificationReport;
pub use weyl::{
    conjugate_c_by_w, enumerate_m, enumerate_mstar, enumerate_w, weyl_class, FiniteGroupElement, SignVector,
    SignedPermutation, WeylElement,
};
