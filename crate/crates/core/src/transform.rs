//! The aspect-oriented refactoring: remove explicit base→aspect calls,
//! derive pointcuts from enclosing join points, and package intercepted
//! behavior (plus the calls it made) as advice.
//!
//! The transformation is a partition of the original rows:
//!
//! * rows calling an aspectized class become advice and land in
//!   `removed_rows`;
//! * rows the aspect object sent within the intercepted nesting scope are
//!   absorbed into the advice body and land in `absorbed_rows`;
//! * everything else passes through to `base_messages` untouched.

use crate::codegen::mangle_type_name;
use crate::concerns::{fold_name, AdviceKind, ConcernType};
use crate::crosscut::AspectCandidateSet;
use crate::diagnostics::Diagnostic;
use crate::model::{MessageRecord, MessageTable};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// One call the aspect object originally made inside an intercepted scope,
/// re-homed into the advice body. The guard is the absorbed row's own.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BodyCall {
    pub target_class: String,
    pub operation: String,
    pub guard: Option<String>,
}

/// One piece of advice: intercept `pointcut_class.pointcut_operation` and
/// run the aspect's `operation` there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdviceSpec {
    pub aspect_class: String,
    pub operation: String,
    pub kind: AdviceKind,
    pub pointcut_class: String,
    pub pointcut_operation: String,
    pub guard: Option<String>,
    pub body_calls: Vec<BodyCall>,
}

/// All advice derived for one aspectized class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AspectSpec {
    /// Mangled type name (`Security`).
    pub name: String,
    /// The class as named in the model (`security`).
    pub source_class: String,
    pub advices: Vec<AdviceSpec>,
}

/// The transformed design: the base interaction model with every
/// aspect-directed call removed, plus the aspects that replace them.
/// `removed_rows` and `absorbed_rows` are the audit trail; together with
/// `base_messages` they partition the original table exactly.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AodModel {
    pub base_messages: MessageTable,
    pub aspects: Vec<AspectSpec>,
    pub removed_rows: Vec<MessageRecord>,
    pub absorbed_rows: Vec<MessageRecord>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("nothing remains as base: every class in the model is aspectized")]
    NoBaseRemains,
    #[error(
        "internal consistency: candidate class {0:?} receives messages but none \
         qualify as crosscutting calls (functional sender, call kind)"
    )]
    CandidateWithoutRows(String),
}

/// Result of [`transform_model`]: the model plus warnings about corners
/// (rows without join points, non-call rows into aspects, ...).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransformBuild {
    pub model: AodModel,
    pub diagnostics: Vec<Diagnostic>,
}

/// The latest row strictly before `rows[index]` whose receiver object is
/// the message's sender object — the point in the interaction where the
/// sender is active and a pointcut can hook.
pub fn enclosing_join_point(rows: &[MessageRecord], index: usize) -> Option<&MessageRecord> {
    let sender = &rows[index].sender_object;
    rows[..index].iter().rev().find(|r| &r.receiver_object == sender)
}

/// Derive the advice for the crosscutting row `rows[index]`.
///
/// Returns `None` when the row has no enclosing join point (the caller is
/// expected to leave the row in the base model and warn). The body calls
/// here are the row's own nested scope; when scopes of several advices
/// overlap, [`transform_model`] reassigns each absorbed row to the most
/// specific advice instead.
pub fn derive_advice(
    rows: &[MessageRecord],
    index: usize,
    candidates: &AspectCandidateSet,
    kind: AdviceKind,
) -> Option<AdviceSpec> {
    let m = &rows[index];
    let join_point = enclosing_join_point(rows, index)?;
    let body_calls = rows
        .iter()
        .filter(|r| {
            r.is_call()
                && r.sender_object == m.receiver_object
                && m.seq.is_strict_prefix_of(&r.seq)
                && !candidates.contains(&r.receiver_class)
        })
        .map(|r| BodyCall {
            target_class: r.receiver_class.clone(),
            operation: r.name.clone(),
            guard: r.guard.clone(),
        })
        .collect();
    Some(AdviceSpec {
        aspect_class: m.receiver_class.clone(),
        operation: m.name.clone(),
        kind,
        pointcut_class: join_point.receiver_class.clone(),
        pointcut_operation: join_point.name.clone(),
        guard: m.guard.clone(),
        body_calls,
    })
}

fn advice_dedup_key(a: &AdviceSpec) -> (String, String, String, String, AdviceKind) {
    (
        fold_name(&a.aspect_class),
        fold_name(&a.operation),
        fold_name(&a.pointcut_class),
        fold_name(&a.pointcut_operation),
        a.kind,
    )
}

/// Rewrite the table into an aspect-oriented design.
///
/// With an empty candidate set (or an empty table) this is the identity.
/// A candidate that never appears as a receiver is treated as already
/// woven and skipped, which makes re-transforming a transformed base model
/// the identity; a candidate that receives messages none of which qualify
/// as crosscutting calls is an internal inconsistency and an error.
pub fn transform_model(
    table: &MessageTable,
    candidates: &AspectCandidateSet,
    advice_kind: AdviceKind,
) -> Result<TransformBuild, TransformError> {
    if candidates.is_empty() || table.is_empty() {
        return Ok(TransformBuild {
            model: AodModel {
                base_messages: table.clone(),
                ..AodModel::default()
            },
            diagnostics: Vec::new(),
        });
    }

    // degenerate input: no class left to anchor a pointcut
    let all_aspectized = table.rows.iter().all(|r| {
        candidates.contains(&r.sender_class) && candidates.contains(&r.receiver_class)
    });
    if all_aspectized {
        return Err(TransformError::NoBaseRemains);
    }

    // per-candidate sanity: receiving messages without any qualifying
    // crosscutting call cannot happen for honestly computed candidates
    for class in candidates.classes() {
        let receives_any = table
            .rows
            .iter()
            .any(|r| fold_name(&r.receiver_class) == fold_name(class));
        if !receives_any {
            continue; // already woven (or never present): nothing to do
        }
        let qualifies = table.rows.iter().any(|r| {
            r.is_call()
                && r.sender_concern == ConcernType::Functional
                && fold_name(&r.receiver_class) == fold_name(class)
        });
        if !qualifies {
            return Err(TransformError::CandidateWithoutRows(class.to_string()));
        }
    }

    let mut diagnostics = Vec::new();
    let mut base_rows: Vec<MessageRecord> = Vec::new();
    let mut removed_rows: Vec<MessageRecord> = Vec::new();
    let mut absorbed_rows: Vec<MessageRecord> = Vec::new();
    // advice in first-encounter order, deduplicated; body calls merged
    let mut advices: Vec<AdviceSpec> = Vec::new();

    for diagram in table.diagram_names() {
        let rows: Vec<MessageRecord> = table
            .diagram_rows(diagram)
            .into_iter()
            .cloned()
            .collect();

        // which rows anchor advice, and which get absorbed into which
        #[derive(Clone, Copy, PartialEq)]
        enum Fate {
            Base,
            Advice,
            RemovedNonCall,
            RemovedAspectSender,
            Absorbed(usize),
        }
        let mut fates = vec![Fate::Base; rows.len()];

        for (i, row) in rows.iter().enumerate() {
            if !candidates.contains(&row.receiver_class) {
                continue;
            }
            if !row.is_call() {
                fates[i] = Fate::RemovedNonCall;
                diagnostics.push(Diagnostic::warning(format!(
                    "diagram {diagram:?}: non-call message {:?} targets aspectized class {:?}; \
                     removed without advice",
                    row.name, row.receiver_class
                )));
                continue;
            }
            if row.sender_concern != ConcernType::Functional {
                fates[i] = Fate::RemovedAspectSender;
                diagnostics.push(Diagnostic::warning(format!(
                    "diagram {diagram:?}: call {:?} into aspectized class {:?} has a \
                     non-functional sender; removed without advice",
                    row.name, row.receiver_class
                )));
                continue;
            }
            if enclosing_join_point(&rows, i).is_some() {
                fates[i] = Fate::Advice;
            } else {
                diagnostics.push(Diagnostic::warning(format!(
                    "diagram {diagram:?}: crosscutting call {:?} has no enclosing join point; \
                     left in the base model",
                    row.name
                )));
            }
        }

        // absorption: a row sent by an intercepted aspect object inside the
        // intercepted scope moves into that advice's body; when scopes nest,
        // the most specific (longest-prefix) advice wins
        for (k, row) in rows.iter().enumerate() {
            if fates[k] != Fate::Base || !row.is_call() {
                continue;
            }
            if candidates.contains(&row.receiver_class) {
                continue; // crosscutting rows are never absorbed
            }
            let absorbing = rows
                .iter()
                .enumerate()
                .filter(|(i, advice_row)| {
                    fates[*i] == Fate::Advice
                        && advice_row.receiver_object == row.sender_object
                        && advice_row.seq.is_strict_prefix_of(&row.seq)
                })
                .max_by_key(|(_, advice_row)| advice_row.seq.components().len());
            if let Some((i, _)) = absorbing {
                fates[k] = Fate::Absorbed(i);
            }
        }

        // materialize advice with its assigned body calls
        for (i, row) in rows.iter().enumerate() {
            if fates[i] != Fate::Advice {
                continue;
            }
            let join_point =
                enclosing_join_point(&rows, i).expect("advice fate implies a join point");
            let body_calls: Vec<BodyCall> = rows
                .iter()
                .enumerate()
                .filter(|(k, _)| fates[*k] == Fate::Absorbed(i))
                .map(|(_, r)| BodyCall {
                    target_class: r.receiver_class.clone(),
                    operation: r.name.clone(),
                    guard: r.guard.clone(),
                })
                .collect();
            let advice = AdviceSpec {
                aspect_class: row.receiver_class.clone(),
                operation: row.name.clone(),
                kind: advice_kind,
                pointcut_class: join_point.receiver_class.clone(),
                pointcut_operation: join_point.name.clone(),
                guard: row.guard.clone(),
                body_calls,
            };
            match advices
                .iter_mut()
                .find(|a| advice_dedup_key(a) == advice_dedup_key(&advice))
            {
                Some(existing) => {
                    for call in advice.body_calls {
                        if !existing.body_calls.contains(&call) {
                            existing.body_calls.push(call);
                        }
                    }
                }
                None => advices.push(advice),
            }
        }

        for (row, fate) in rows.into_iter().zip(&fates) {
            match fate {
                Fate::Base => base_rows.push(row),
                Fate::Advice | Fate::RemovedNonCall | Fate::RemovedAspectSender => {
                    removed_rows.push(row)
                }
                Fate::Absorbed(_) => absorbed_rows.push(row),
            }
        }
    }

    // canonical ordering inside each advice and across aspects
    for advice in &mut advices {
        advice.body_calls.sort_by(|a, b| {
            (fold_name(&a.target_class), fold_name(&a.operation))
                .cmp(&(fold_name(&b.target_class), fold_name(&b.operation)))
        });
    }
    let mut by_aspect: BTreeMap<String, AspectSpec> = BTreeMap::new();
    for advice in advices {
        let folded = fold_name(&advice.aspect_class);
        let entry = by_aspect.entry(folded).or_insert_with(|| AspectSpec {
            name: mangle_type_name(&advice.aspect_class)
                .expect("class names from the table are non-empty"),
            source_class: advice.aspect_class.trim().to_string(),
            advices: Vec::new(),
        });
        entry.advices.push(advice);
    }
    for aspect in by_aspect.values_mut() {
        aspect.advices.sort_by(|a, b| {
            (
                fold_name(&a.operation),
                fold_name(&a.pointcut_class),
                fold_name(&a.pointcut_operation),
            )
                .cmp(&(
                    fold_name(&b.operation),
                    fold_name(&b.pointcut_class),
                    fold_name(&b.pointcut_operation),
                ))
        });
    }
    for class in candidates.classes() {
        if !by_aspect.contains_key(&fold_name(class)) {
            let stranded = base_rows
                .iter()
                .any(|r| fold_name(&r.receiver_class) == fold_name(class));
            if stranded {
                diagnostics.push(Diagnostic::warning(format!(
                    "candidate class {class:?} produced no advice (its crosscutting calls \
                     lack join points); it remains in the base model"
                )));
            }
        }
    }

    Ok(TransformBuild {
        model: AodModel {
            base_messages: MessageTable::new(base_rows),
            aspects: by_aspect.into_values().collect(),
            removed_rows,
            absorbed_rows,
        },
        diagnostics,
    })
}
