//! Points, the convex sets of the construction, and exact projections onto them.

mod cubic;
mod epigraph;
pub mod oracle;
mod point;
mod sets;

pub use cubic::monotone_cubic_root;
pub use epigraph::{project_smooth_epigraph, project_smooth_epigraph_with, EpigraphSolverConfig};
pub use oracle::{brute_force_project, SetSampler, Window};
pub use point::PointN;
pub use sets::{project, ConvexFunction, ConvexSetDescriptor, Jet, SquareInX};
