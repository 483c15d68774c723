//! Detect crosscutting concerns in UML communication diagrams and
//! refactor the design into aspects.
//!
//! The pipeline, stage by stage:
//!
//! 1. [`xmi`] — stream-parse an XMI 1.1 model export (the dialect used by
//!    common UML tooling: messages carry denormalized `UML:TaggedValue`
//!    children) into a raw model.
//! 2. [`model`] — resolve participants, parse message labels
//!    (`4.2.1: [any misuse]:block user()`), and order everything into the
//!    canonical message table.
//! 3. [`concerns`] — classify classes as functional / non-functional from
//!    a TOML configuration.
//! 4. [`crosscut`] — count repeated functional→non-functional calls and
//!    select aspect candidates by threshold.
//! 5. [`transform`] — rewrite the design: remove the explicit calls into
//!    candidate classes, derive pointcuts from their enclosing join
//!    points, absorb the calls made inside the intercepted scope into the
//!    advice body.
//! 6. [`metrics`] — fan-in/fan-out coupling before and after, with the
//!    delta as the headline.
//! 7. [`codegen`] — deterministic aspect and class source skeletons plus
//!    digest manifest.
//! 8. [`render`] — DOT diagrams of each interaction before and after,
//!    aspects filled red.
//!
//! The [`cli`] module wires the stages into the `aodkit` binary.

pub mod cli;
pub mod codegen;
pub mod concerns;
pub mod crosscut;
pub mod diagnostics;
pub mod metrics;
pub mod model;
pub mod render;
pub mod transform;
pub mod xmi;

#[cfg(test)]
pub(crate) mod testutil;

pub use codegen::{generate_all, generate_aspect, generate_class, mangle_type_name, GeneratedUnit};
pub use concerns::{AdviceKind, ConcernMap, ConcernType, ToolConfig};
pub use crosscut::{
    annotate_repetitions, detect_aspect_candidates, repetition_counts, AspectCandidateSet,
};
pub use diagnostics::{Diagnostic, Severity};
pub use metrics::{coupling_report, fan_in, fan_out, CouplingMode, CouplingReport};
pub use model::{build_message_table, MessageRecord, MessageTable, SequenceExpr};
pub use render::{parse_dot, to_dot, DotGraph};
pub use transform::{transform_model, AodModel, AspectSpec};
pub use xmi::{parse_xmi, parse_xmi_bytes, RawModel};
