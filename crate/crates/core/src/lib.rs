pub mod algebra;
pub mod error;
pub mod examples;
pub mod measures;
pub mod report;
pub mod sdp;
pub mod solver;
pub mod space;
pub mod trajectories;
pub mod uncertainty;
pub mod value;
pub mod verify;
