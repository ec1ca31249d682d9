//! Command-line front end: text data files, certificate documents, and the
//! `s1data` subcommands.

pub mod app;
pub mod cert;
pub mod format;

pub use app::run;
