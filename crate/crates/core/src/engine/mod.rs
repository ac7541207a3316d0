//! Discretized reachability analysis of matrix semigroups.

pub mod cloud;
pub mod control;
pub mod graph;
pub(crate) mod index;
pub mod presets;

pub use cloud::{flag_cloud_of, sample_space, SampleCloud, Space};
pub use control::{
    analyze_control_sets, classify_invariant, find_control_sets, find_regular_word, label_control_sets,
    order_control_sets, prune_unlabeled, unlabeled,
    ControlSetRecord, Label, Labeling,
};
pub use graph::{
    build_reach_graph, cloud_dispersion, default_word_depth, enumerate_words, GraphOptions, ReachGraph, Word,
    EPSILON_FACTOR,
};
pub use presets::{full_group, slplus2, slplus3, GeneratorSet, Preset};
