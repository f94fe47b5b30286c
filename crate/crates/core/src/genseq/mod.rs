//! Model registry, plan resolution, sequence synthesis, coherence
//! enforcement and export.

mod coherence;
mod export;
mod generate;
mod model;
mod plan;
mod registry;
mod resolve;

pub use coherence::{derive_variables, enforce_coherence, CoherenceReport, Rule};
pub use export::{
    export, export_csv, export_plotdata, table_plotdata, table_to_csv, to_csv_string, ExportFormat,
};
pub use generate::{
    generate, generate_batch, generate_gated, synthesize, GeneratedSequence, ModelUse,
    SequenceProvenance,
};
pub use model::{FittedModel, ModelKind, Provenance, RegistryEntry, RegistryKey};
pub use plan::{GenerationOptions, GenerationPlan};
pub use registry::{ModelRegistry, RegistrySnapshot, REGISTRY_ENV};
pub use resolve::{allowed_kinds, resolve, suggestion, Assignment, Derivation, Resolution, Source};
