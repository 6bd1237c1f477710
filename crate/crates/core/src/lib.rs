pub mod algos;
pub mod analysis;
pub mod cli;
pub mod config;
pub mod gens;
pub mod lp;
pub mod types;
