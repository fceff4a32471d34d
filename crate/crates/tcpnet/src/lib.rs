//! File formats and the command-line front end for TCP-nets. The reasoning
//! itself lives in `tcpnet-core`, re-exported here.

pub mod cli;
pub mod codec;

pub use tcpnet_core;
