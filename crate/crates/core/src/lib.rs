//! A language workbench: a metamodel (`.mm`), constraints (`.inv`) and
//! action semantics (`.act`) are woven by a `.mashup` manifest into one
//! class table that an interpreter executes over JSON models.
//!
//! ```no_run
//! use std::path::Path;
//! use mashup_core::pipeline::load_language;
//!
//! let lang = load_language(Path::new("examples/fuml-lite/fuml.mashup")).unwrap();
//! println!("{}", mashup_core::composer::emit_report(&lang.woven));
//! ```

pub mod behavior;
pub mod composer;
pub mod contracts;
pub mod diag;
pub mod expr;
pub mod gen;
pub mod meta;
pub mod pipeline;
pub mod runtime;
pub mod syntax;
pub mod types;
