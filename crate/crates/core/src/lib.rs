//! Hole-bounded reachability for multi-pushdown automata, untimed and timed.

pub mod bench;
pub mod closure;
pub mod holesearch;
pub mod model;
pub mod oracle;
pub mod parse;
pub mod semantics;
pub mod witness;

pub use closure::{compute_wr, compute_wrt, enumerate_states, time_elapse_closure, transitive_closure, WellNested};
pub use holesearch::{check_reachable, compute_ahs_hs, repeated_reachability, Analysis, RepeatMode, SearchOptions};
pub use model::{validate_model, Kind, Model};
pub use parse::{parse_model, serialize_model};
pub use semantics::{hole_bound_of_run, replay, RunStep, Witness};
pub use witness::{assemble_witness, hole_witness, timed_wellnested_witness, wellnested_witness};
