pub mod cli;
pub mod ends;
pub mod exact;
pub mod format;
pub mod generators;
pub mod maps;
pub mod progroup;
pub mod report;
pub mod tower;
pub mod tree;
