pub mod spectral;
pub mod evolution;
pub mod randomization;
pub mod expansion;
pub mod solver;
pub mod experiments;
pub mod io;
