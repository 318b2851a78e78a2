//! Comparison of UML class diagrams by name, meaning and structure.

pub mod correspondence;
pub mod engine;
pub mod lexical;
pub mod model;
pub mod resources;
pub mod semantic;
pub mod structural;

pub use engine::{compare_models, CompareConfig, EngineError};
pub use model::{parse_model, serialize_model, ElementKind, Model, ModelError};
pub use resources::{load_ontology, Lexicon, Ontology, Resources};
