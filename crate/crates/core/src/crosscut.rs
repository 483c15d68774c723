//! Crosscutting detection: count how often each (message name, receiver
//! class) pair is called from functional into non-functional classes, and
//! select aspect candidates by threshold.
//!
//! Counting is model-wide — the same service invoked from several diagrams
//! accumulates one count — and sender-agnostic: crosscutting means the same
//! operation is triggered from many places, so only the target identity
//! matters.

use crate::concerns::{fold_name, ConcernMap, ConcernType, ConfigError};
use crate::model::MessageTable;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

/// Identity of one potentially crosscutting call: the message name and the
/// class receiving it. Comparison is trim- and case-insensitive; the
/// originally seen casing is kept for display.
#[derive(Debug, Clone)]
pub struct RepetitionKey {
    pub message_name: String,
    pub receiver_class: String,
}

impl RepetitionKey {
    pub fn new(message_name: impl Into<String>, receiver_class: impl Into<String>) -> Self {
        RepetitionKey {
            message_name: message_name.into(),
            receiver_class: receiver_class.into(),
        }
    }

    fn folded(&self) -> (String, String) {
        (
            fold_name(&self.message_name),
            fold_name(&self.receiver_class),
        )
    }
}

impl PartialEq for RepetitionKey {
    fn eq(&self, other: &Self) -> bool {
        self.folded() == other.folded()
    }
}

impl Eq for RepetitionKey {}

impl PartialOrd for RepetitionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RepetitionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.folded().cmp(&other.folded())
    }
}

impl Hash for RepetitionKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.folded().hash(state);
    }
}

/// Model-wide repetition counts in canonical (folded-key) order.
pub type RepetitionCounts = BTreeMap<RepetitionKey, u32>;

/// Count functional→non-functional call repetitions across the whole table.
///
/// Only call-kind rows with a functional sender and a non-functional
/// receiver count; every diagram contributes to the same tally.
pub fn repetition_counts(table: &MessageTable) -> RepetitionCounts {
    let mut counts = RepetitionCounts::new();
    for row in table.call_rows() {
        if row.sender_concern == ConcernType::Functional
            && row.receiver_concern == ConcernType::NonFunctional
        {
            let key = RepetitionKey::new(row.name.clone(), row.receiver_class.clone());
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

/// Return a copy of the table where every row with a non-functional
/// receiver carries the model-wide count for its key (0 when nothing
/// qualifying was counted), and every other row carries none.
pub fn annotate_repetitions(table: &MessageTable) -> MessageTable {
    let counts = repetition_counts(table);
    let mut annotated = table.clone();
    for row in &mut annotated.rows {
        row.repetition = if row.receiver_concern == ConcernType::NonFunctional {
            let key = RepetitionKey::new(row.name.clone(), row.receiver_class.clone());
            Some(counts.get(&key).copied().unwrap_or(0))
        } else {
            None
        };
    }
    annotated
}

/// One piece of evidence for a candidate: a counted message and its count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub message: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    display: String,
    evidence: Vec<Evidence>,
}

/// The classes selected for aspectization, with the counts that selected
/// them. Iteration order is canonical (sorted by folded class name).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AspectCandidateSet {
    pub threshold: u32,
    candidates: BTreeMap<String, Candidate>,
}

impl AspectCandidateSet {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    /// Candidate class names (display casing) in canonical order.
    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.candidates.values().map(|c| c.display.as_str())
    }

    pub fn contains(&self, class_name: &str) -> bool {
        self.candidates.contains_key(&fold_name(class_name))
    }

    /// Every counted key targeting the class, sorted by message name;
    /// at least one entry reaches the threshold for a real candidate.
    pub fn evidence_for(&self, class_name: &str) -> &[Evidence] {
        self.candidates
            .get(&fold_name(class_name))
            .map(|c| c.evidence.as_slice())
            .unwrap_or(&[])
    }

    /// The serializable candidate report:
    /// `{threshold, candidates: [{class, evidence: [{message, count}]}]}`.
    pub fn report(&self) -> CandidateReport {
        CandidateReport {
            threshold: self.threshold,
            candidates: self
                .candidates
                .values()
                .map(|c| CandidateEntry {
                    class: c.display.clone(),
                    evidence: c.evidence.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    pub threshold: u32,
    pub candidates: Vec<CandidateEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateEntry {
    pub class: String,
    pub evidence: Vec<Evidence>,
}

/// Select every non-functional class with at least one counted key at or
/// above the threshold. Candidates come back in canonical order together
/// with all counted evidence for each class.
pub fn detect_aspect_candidates(
    counts: &RepetitionCounts,
    concerns: &ConcernMap,
    threshold: u32,
) -> Result<AspectCandidateSet, ConfigError> {
    if threshold < 1 {
        return Err(ConfigError::InvalidThreshold(threshold.into()));
    }
    let mut set = AspectCandidateSet {
        threshold,
        candidates: BTreeMap::new(),
    };
    for (key, &count) in counts {
        if count < threshold {
            continue;
        }
        if concerns.classify(&key.receiver_class) != ConcernType::NonFunctional {
            continue;
        }
        set.candidates
            .entry(fold_name(&key.receiver_class))
            .or_insert_with(|| Candidate {
                display: key.receiver_class.trim().to_string(),
                evidence: Vec::new(),
            });
    }
    // attach all counted evidence for each selected class, in key order
    for (key, &count) in counts {
        if let Some(candidate) = set.candidates.get_mut(&fold_name(&key.receiver_class)) {
            candidate.evidence.push(Evidence {
                message: key.message_name.trim().to_string(),
                count,
            });
        }
    }
    Ok(set)
}
