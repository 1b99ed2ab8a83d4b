pub mod analytic;
pub mod clemens;
pub mod counter;
pub mod fan;
pub mod fixtures;
pub mod invariants;
pub mod picard;
pub mod polycore;
