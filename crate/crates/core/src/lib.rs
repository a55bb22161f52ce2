pub mod checker;
pub mod cli;
pub mod diagnose;
pub mod hls;
pub mod search;
pub mod trace;
