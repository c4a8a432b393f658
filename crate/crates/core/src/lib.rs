//! Barrier-path limit analysis for polynomial optimization problems.

pub mod ingest;
pub mod numerics;
pub mod poly;
pub mod systems;
pub mod pathtrace;
pub mod strata;
pub mod asymptotics;
pub mod infinity;
pub mod classify;
