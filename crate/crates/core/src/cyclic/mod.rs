//! Cyclic systems, the decompositions into them, sparse reservoirs and the
//! superregularity and expansion checkers.

mod expander;
mod reserve;
mod superregular;
mod sysdecom;
mod system;

pub use expander::{check_robust_outexpander, ExpanderPlan, ExpanderVerdict};
pub use reserve::{reserve_sparse, sample_reservoir, ReserveParams, Reservation};
pub use superregular::{
    check_superregular, Reg1Evidence, Reg1Mode, Reg1Plan, SuperregularParams, SuperregularityReport,
};
pub use sysdecom::{
    balancing_pair, matchings_needed, sysdecom, sysdecombip, DecomposeParams, ReservePolicy,
    SliceEntry, SysDecomposition, SysVerdicts, SystemSlice, CHUNKS_PER_MATCHING, PHASE_ONE_DEGREE,
};
pub use system::CyclicSystem;
