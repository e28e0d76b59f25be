pub mod algebra;
pub mod curve;
pub mod family;
pub mod nevanlinna;
pub mod poly;
pub mod stochastic;
