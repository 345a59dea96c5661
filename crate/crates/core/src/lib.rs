pub mod cli;
pub mod cmatrix;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod groups;
pub mod json;
pub mod lemmas;
pub mod symbols;
