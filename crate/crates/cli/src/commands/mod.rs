pub mod check;
pub mod evolve;
pub mod spectrum;
pub mod sweep;
