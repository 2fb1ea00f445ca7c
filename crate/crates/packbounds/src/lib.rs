pub mod bounds;
pub mod cli;
pub mod dff;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod scales;
