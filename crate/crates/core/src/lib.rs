pub mod der;
pub mod linalg;
pub mod rttm;
pub mod signal;
pub mod sim;
pub mod sync;
pub mod beamform;
pub mod cacgmm;
pub mod select;
pub mod gss;
pub mod rectify;
pub mod cli;
