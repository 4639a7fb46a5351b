pub mod construct;
pub mod costs;
pub mod error;
pub mod infogeo;
pub mod linops;
pub mod measure;
pub mod monotone;
pub mod suites;
pub mod uncertainty;
