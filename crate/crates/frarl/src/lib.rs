//! File formats, run directories, reports and the command-line driver for
//! [`frarl_core`].

pub mod io;
pub mod compare;
pub mod curves;
pub mod parallel;
pub mod run;
