//! Command-line layer over `imagclass`: table reproduction against a
//! reference transcription, a JSON-lines row cache, and renderers.

pub mod app;
pub mod cache;
pub mod jsonnum;
pub mod output;
pub mod reference;
pub mod render;
pub mod table;
