//! From balanced extensions to Hamilton cycles inside a cyclic system.

mod factors;
mod rewire;
mod search;
mod slice;

pub use factors::extend_to_one_factors;
pub use rewire::{merge_to_hamilton, reorder_for_consistency, MergeWindow, RewirePolicy};
pub use search::{find_ordered_hamilton, ordered_hamilton_successors, SearchBudget};
pub use slice::{assemble_slice, carve_reservoir, AssemblyParams, PairReservoir, SliceAssembly, SliceReservoir};
