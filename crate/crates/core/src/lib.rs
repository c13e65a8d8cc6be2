pub mod energy;
pub mod error;
pub mod geometry;
pub mod link;
pub mod scenario;
pub mod convex;
pub mod sca;
pub mod experiments;
