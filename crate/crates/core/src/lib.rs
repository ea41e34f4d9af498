pub mod dot;
pub mod generators;
pub mod laws;
pub mod order;
pub mod residual;
pub mod testbed;
pub mod topology;
