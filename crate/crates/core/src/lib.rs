//! Finite racks, their 4-Legendrian structures, and rack colorings of
//! Legendrian knot fronts.

pub mod census;
pub mod coloring;
pub mod exec;
pub mod fourleg;
pub mod front;
pub mod perm;
pub mod rack;

pub use exec::Exec;
pub use perm::{PermGroup, Permutation};
pub use rack::RackTable;
