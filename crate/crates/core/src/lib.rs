//! Speaker and addressee identification for quotations in novels.
//!
//! The crate is organized around a pipeline: load an annotated quotation
//! corpus ([`corpus`]), cut bounded context windows around each quotation
//! ([`text`]), render identification prompts and parse model answers
//! ([`prompt`]), run an identification backend ([`backend`]), score the
//! predictions ([`eval`]), and derive a directed character dialogue network
//! from the resulting (speaker, quotation, addressee) triplets ([`network`]).

pub mod backend;
pub mod corpus;
pub mod eval;
pub mod network;
pub mod prompt;
pub mod text;
