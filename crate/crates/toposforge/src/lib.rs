//! File formats, seeded corpora, verification suites and the command-line
//! front end over `toposforge-core`.

pub mod corpus;
pub mod io;
pub mod suites;
pub mod cli;
