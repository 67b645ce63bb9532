pub mod cli;
pub mod corpus;
pub mod den;
pub mod dynamics;
pub mod equational;
pub mod int;
pub mod metric;
pub mod metrics;
pub mod polarity;
pub mod registry;
pub mod report;
pub mod syntax;
pub mod typing;
