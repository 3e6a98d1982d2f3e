pub mod format;
pub mod gf2;
pub mod hall;
pub mod batch;
pub mod solver;
pub mod montecarlo;
