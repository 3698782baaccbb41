pub mod aja;
pub mod aja2tree;
pub mod corpus;
pub mod crosscheck;
pub mod alphabet;
pub mod cli;
pub mod error;
pub mod formula;
pub mod limits;
pub mod oracle;
pub mod pipeline;
pub mod stacktree;
pub mod syntax;
pub mod treeauto;
pub mod vldl2aja;
pub mod vps;

pub use error::{Error, Result};
