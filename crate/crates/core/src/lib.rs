pub mod algebra;
pub mod gasmodel;
pub mod nomsig;
pub mod zkproto;
pub mod trigger;
pub mod contract;
pub mod envelope;
