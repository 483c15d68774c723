//! Message-table construction: label parsing, sequence-expression ordering,
//! and assembly of the per-diagram interaction model.
//!
//! The table is the pivot structure of the pipeline: one row per message,
//! carrying participants, concern classifications, the dotted sequence
//! expression, guard, and kind. Everything downstream (crosscutting
//! detection, transformation, metrics, rendering) reads this table and
//! nothing re-reads the XML.

use crate::concerns::{classify, ConcernMap, ConcernType};
use crate::diagnostics::Diagnostic;
use crate::xmi::{resolve_participants, tags, RawModel};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Placeholder for rows whose message name cannot be determined at all.
pub const UNNAMED: &str = "\u{ab}unnamed\u{bb}";

/// Synthetic diagram name for messages carrying no diagram tag.
pub const UNASSIGNED_DIAGRAM: &str = "unassigned";

/// A Dewey-style dotted sequence expression such as `4.2.1`.
///
/// Always non-empty; components are positive. The derived ordering on the
/// inner vector is exactly the Dewey order: componentwise numeric, with a
/// strict prefix preceding its extensions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SequenceExpr(Vec<u32>);

impl SequenceExpr {
    pub fn new(components: Vec<u32>) -> Result<Self, LabelError> {
        if components.is_empty() || components.contains(&0) {
            return Err(LabelError::BadSequence {
                text: String::new(),
                seq: components
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join("."),
            });
        }
        Ok(SequenceExpr(components))
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// True when `self` is a proper prefix of `other` (`4.2` before `4.2.1`).
    pub fn is_strict_prefix_of(&self, other: &SequenceExpr) -> bool {
        self.0.len() < other.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for SequenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in &self.0 {
            if !first {
                f.write_str(".")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for SequenceExpr {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LabelError::BadSequence {
            text: s.to_string(),
            seq: s.to_string(),
        };
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(bad());
        }
        let mut components = Vec::new();
        for part in trimmed.split('.') {
            let n: u32 = part.trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            components.push(n);
        }
        Ok(SequenceExpr(components))
    }
}

impl Serialize for SequenceExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SequenceExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}

/// Total order on sequence expressions: lexicographic on the numeric
/// components, a strict prefix preceding its extensions.
pub fn compare_seq(a: &SequenceExpr, b: &SequenceExpr) -> Ordering {
    a.cmp(b)
}

/// Errors from [`parse_label`]; each carries the offending text.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("empty label text")]
    Empty,
    #[error("label {0:?} has no ':' after the sequence expression")]
    MissingSeparator(String),
    #[error("label {text:?}: {seq:?} is not a dotted sequence of positive integers")]
    BadSequence { text: String, seq: String },
    #[error("label {0:?}: guard bracket is never closed")]
    UnterminatedGuard(String),
    #[error("label {0:?}: guard must be followed by ':'")]
    GuardSeparator(String),
    #[error("label {0:?}: assignment target before '=' is empty")]
    EmptyAssignment(String),
    #[error("label {0:?}: message name is empty")]
    EmptyName(String),
    #[error("label {0:?}: missing '(...)' argument list")]
    MissingParens(String),
    #[error("label {0:?}: unexpected text after the closing ')'")]
    TrailingText(String),
}

/// The decomposition of one message label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLabel {
    pub seq: SequenceExpr,
    pub guard: Option<String>,
    pub assignment: Option<String>,
    pub name: String,
    pub args: Vec<String>,
}

/// Parse a message label of the form
/// `SEQ ':' WS? ('[' GUARD ']' ':')? (IDENT '=' WS?)? NAME '(' ARGS? ')'`.
///
/// Names may contain internal spaces; arguments are comma-separated and
/// trimmed.
pub fn parse_label(text: &str) -> Result<ParsedLabel, LabelError> {
    let whole = text.trim();
    if whole.is_empty() {
        return Err(LabelError::Empty);
    }
    let err_text = || whole.to_string();

    let (seq_part, rest) = whole
        .split_once(':')
        .ok_or_else(|| LabelError::MissingSeparator(err_text()))?;
    let seq: SequenceExpr = seq_part.parse().map_err(|_| LabelError::BadSequence {
        text: err_text(),
        seq: seq_part.trim().to_string(),
    })?;
    let mut rest = rest.trim_start();

    let mut guard = None;
    if let Some(after_bracket) = rest.strip_prefix('[') {
        let close = after_bracket
            .find(']')
            .ok_or_else(|| LabelError::UnterminatedGuard(err_text()))?;
        guard = Some(after_bracket[..close].trim().to_string());
        rest = after_bracket[close + 1..].trim_start();
        rest = rest
            .strip_prefix(':')
            .ok_or_else(|| LabelError::GuardSeparator(err_text()))?
            .trim_start();
    }

    let mut assignment = None;
    let paren_at = rest.find('(');
    if let Some(eq_at) = rest.find('=') {
        if paren_at.map_or(true, |p| eq_at < p) {
            let target = rest[..eq_at].trim();
            if target.is_empty() {
                return Err(LabelError::EmptyAssignment(err_text()));
            }
            assignment = Some(target.to_string());
            rest = rest[eq_at + 1..].trim_start();
        }
    }

    let open = rest
        .find('(')
        .ok_or_else(|| LabelError::MissingParens(err_text()))?;
    let close = rest
        .rfind(')')
        .filter(|&c| c > open)
        .ok_or_else(|| LabelError::MissingParens(err_text()))?;
    if !rest[close + 1..].trim().is_empty() {
        return Err(LabelError::TrailingText(err_text()));
    }
    let name = rest[..open].trim();
    if name.is_empty() {
        return Err(LabelError::EmptyName(err_text()));
    }
    let inner = rest[open + 1..close].trim();
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };

    Ok(ParsedLabel {
        seq,
        guard,
        assignment,
        name: name.to_string(),
        args,
    })
}

/// Render label parts back to canonical text:
/// `seq: [guard]:assignment= name(arg, arg)`.
/// Re-parsing the result reproduces the parts (fixed point).
pub fn render_label(
    seq: &SequenceExpr,
    guard: Option<&str>,
    assignment: Option<&str>,
    name: &str,
    args: &[String],
) -> String {
    let mut out = format!("{seq}: ");
    if let Some(g) = guard {
        out.push('[');
        out.push_str(g);
        out.push_str("]:");
    }
    if let Some(a) = assignment {
        out.push_str(a);
        out.push_str("= ");
    }
    out.push_str(name);
    out.push('(');
    out.push_str(&args.join(", "));
    out.push(')');
    out
}

impl ParsedLabel {
    pub fn render(&self) -> String {
        render_label(
            &self.seq,
            self.guard.as_deref(),
            self.assignment.as_deref(),
            &self.name,
            &self.args,
        )
    }
}

/// Whether a message is a plain synchronous call, an asynchronous one, or
/// the export did not say.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Synchronicity {
    Synchronous,
    Asynchronous,
    Unknown,
}

impl Synchronicity {
    fn from_tag(value: Option<&str>) -> Self {
        match value.map(str::trim) {
            Some(v) if v.eq_ignore_ascii_case("synchronous") => Synchronicity::Synchronous,
            Some(v) if v.eq_ignore_ascii_case("asynchronous") => Synchronicity::Asynchronous,
            _ => Synchronicity::Unknown,
        }
    }
}

/// Call messages drive crosscutting detection, codegen, and metrics;
/// anything else (returns, signals) is kept but inert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageKind {
    Call,
    Other,
}

impl MessageKind {
    fn from_tag(value: Option<&str>) -> Self {
        match value.map(str::trim) {
            // absent means call: communication-diagram messages are method
            // calls unless the export marks them otherwise
            None => MessageKind::Call,
            Some(v) if v.eq_ignore_ascii_case("call") => MessageKind::Call,
            Some(_) => MessageKind::Other,
        }
    }
}

/// One row of the message table.
///
/// Serialized field order follows the documented column order (message
/// name, sender triple, receiver triple, sequence, diagram, repetition),
/// with the auxiliary fields after.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageRecord {
    pub name: String,
    pub sender_object: String,
    pub sender_class: String,
    pub sender_concern: ConcernType,
    pub receiver_object: String,
    pub receiver_class: String,
    pub receiver_concern: ConcernType,
    pub seq: SequenceExpr,
    pub diagram: String,
    pub repetition: Option<u32>,
    pub seqno: Option<u32>,
    pub guard: Option<String>,
    pub assignment: Option<String>,
    pub args: Vec<String>,
    pub synchronicity: Synchronicity,
    pub kind: MessageKind,
}

impl MessageRecord {
    pub fn is_call(&self) -> bool {
        self.kind == MessageKind::Call
    }

    /// Canonical label text for this row (`4.2.1: [any misuse]:block user()`).
    pub fn label(&self) -> String {
        render_label(
            &self.seq,
            self.guard.as_deref(),
            self.assignment.as_deref(),
            &self.name,
            &self.args,
        )
    }
}

/// The full message table: rows grouped by diagram (groups in diagram-name
/// order), totally ordered within each diagram.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageTable {
    pub rows: Vec<MessageRecord>,
}

impl MessageTable {
    pub fn new(rows: Vec<MessageRecord>) -> Self {
        MessageTable { rows }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Diagram names in table order (already sorted by construction).
    pub fn diagram_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for row in &self.rows {
            if names.last() != Some(&row.diagram.as_str()) && !names.contains(&row.diagram.as_str())
            {
                names.push(&row.diagram);
            }
        }
        names
    }

    /// Rows of one diagram, in table order.
    pub fn diagram_rows(&self, diagram: &str) -> Vec<&MessageRecord> {
        self.rows.iter().filter(|r| r.diagram == diagram).collect()
    }

    pub fn call_rows(&self) -> impl Iterator<Item = &MessageRecord> {
        self.rows.iter().filter(|r| r.is_call())
    }

    /// Plain-text aligned rendering mirroring the documented column order.
    pub fn to_text_table(&self) -> String {
        const HEADERS: [&str; 10] = [
            "Message Name",
            "Object Sender",
            "Class Sender",
            "Concern Type",
            "Object Receiver",
            "Class Receiver",
            "Concern Type",
            "Message Sequence",
            "Diagram Name",
            "Repetition",
        ];
        let cells: Vec<[String; 10]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.name.clone(),
                    r.sender_object.clone(),
                    r.sender_class.clone(),
                    r.sender_concern.to_string(),
                    r.receiver_object.clone(),
                    r.receiver_class.clone(),
                    r.receiver_concern.to_string(),
                    r.label(),
                    r.diagram.clone(),
                    r.repetition.map(|n| n.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        let mut widths: [usize; 10] = HEADERS.map(str::len);
        for row in &cells {
            for (w, cell) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let write_row = |out: &mut String, row: &[String]| {
            for (i, (cell, width)) in row.iter().zip(widths.iter()).enumerate() {
                if i > 0 {
                    out.push_str("  ");
                }
                out.push_str(cell);
                if i + 1 < row.len() {
                    for _ in cell.len()..*width {
                        out.push(' ');
                    }
                }
            }
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        };
        let header_cells: Vec<String> = HEADERS.iter().map(|h| h.to_string()).collect();
        write_row(&mut out, &header_cells);
        let dashes: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        write_row(&mut out, &dashes);
        for row in &cells {
            write_row(&mut out, row);
        }
        out
    }
}

/// Result of [`build_message_table`]: the table plus everything worth
/// telling the user about the input.
#[derive(Debug, Clone, Default)]
pub struct TableBuild {
    pub table: MessageTable,
    pub diagnostics: Vec<Diagnostic>,
}

/// Build the message table from a parsed raw model and a concern map.
///
/// Field provenance: the `lt` label is the richest source and wins over
/// the denormalized tagged values whenever both speak (each disagreement
/// is diagnosed). Rows are grouped by diagram; within a diagram they are
/// ordered by the `seqno` tag when every row of that diagram has one,
/// otherwise by the dotted sequence expression. Diagram groups appear in
/// diagram-name order.
pub fn build_message_table(raw: &RawModel, concerns: &ConcernMap) -> TableBuild {
    let mut diagnostics = Vec::new();
    let resolved = resolve_participants(raw);
    diagnostics.extend(resolved.diagnostics.iter().cloned());

    struct Staged {
        record: MessageRecord,
        xmi_id: String,
    }
    let mut staged: Vec<Staged> = Vec::new();

    for (index, (message, names)) in raw.messages.iter().zip(&resolved.rows).enumerate() {
        debug_assert_eq!(message.xmi_id, names.message_id);
        let at = |d: Diagnostic| d.at_element(message.xmi_id.clone());

        let label = match message.tag(tags::LABEL) {
            Some(text) => match parse_label(text) {
                Ok(parsed) => Some(parsed),
                Err(e) => {
                    diagnostics.push(at(Diagnostic::warning(format!(
                        "unusable lt label, falling back to tagged values: {e}"
                    ))));
                    None
                }
            },
            None => None,
        };

        // name: label wins over the element's name attribute
        let attr_name = message.name.trim();
        let name = match &label {
            Some(parsed) => {
                if !attr_name.is_empty() && attr_name != parsed.name {
                    diagnostics.push(at(Diagnostic::warning(format!(
                        "label name {:?} disagrees with element name {:?}; label wins",
                        parsed.name, attr_name
                    ))));
                }
                parsed.name.clone()
            }
            None if !attr_name.is_empty() => attr_name.to_string(),
            None => {
                diagnostics.push(at(Diagnostic::warning("message has no usable name")));
                UNNAMED.to_string()
            }
        };

        // dotted sequence: label wins over privatedata4
        let tag_seq = match message.tag(tags::SEQUENCE).map(str::trim) {
            Some(text) if !text.is_empty() => match text.parse::<SequenceExpr>() {
                Ok(seq) => Some(seq),
                Err(_) => {
                    diagnostics.push(at(Diagnostic::warning(format!(
                        "sequence tag {text:?} is not a dotted sequence; ignored"
                    ))));
                    None
                }
            },
            _ => None,
        };
        let seqno = match message.tag(tags::SEQNO).map(str::trim) {
            Some(text) if !text.is_empty() => match text.parse::<u32>() {
                Ok(n) => Some(n),
                Err(_) => {
                    diagnostics.push(at(Diagnostic::warning(format!(
                        "seqno tag {text:?} is not an integer; ignored"
                    ))));
                    None
                }
            },
            _ => None,
        };
        let seq = match (&label, tag_seq) {
            (Some(parsed), Some(tag)) => {
                if parsed.seq != tag {
                    diagnostics.push(at(Diagnostic::warning(format!(
                        "label sequence {} disagrees with sequence tag {}; label wins",
                        parsed.seq, tag
                    ))));
                }
                parsed.seq.clone()
            }
            (Some(parsed), None) => parsed.seq.clone(),
            (None, Some(tag)) => tag,
            (None, None) => match seqno {
                Some(n) if n > 0 => SequenceExpr(vec![n]),
                _ => {
                    diagnostics.push(at(Diagnostic::warning(
                        "message carries no sequence information; using document position",
                    )));
                    SequenceExpr(vec![index as u32 + 1])
                }
            },
        };

        // guard: label wins over the conditional tag
        let tag_guard = message
            .tag(tags::CONDITIONAL)
            .map(str::trim)
            .filter(|g| !g.is_empty())
            .map(str::to_string);
        let guard = match &label {
            Some(parsed) => match (&parsed.guard, &tag_guard) {
                (Some(lg), Some(tg)) => {
                    if lg != tg {
                        diagnostics.push(at(Diagnostic::warning(format!(
                            "label guard {lg:?} disagrees with conditional tag {tg:?}; label wins"
                        ))));
                    }
                    Some(lg.clone())
                }
                (Some(lg), None) => Some(lg.clone()),
                (None, tg) => tg.clone(),
            },
            None => tag_guard,
        };

        let diagram = match message.tag(tags::DIAGRAM).map(str::trim) {
            Some(id) if !id.is_empty() => match raw.diagrams.get(id) {
                Some(diagram_name) => diagram_name.trim().to_string(),
                None => {
                    diagnostics.push(at(Diagnostic::warning(format!(
                        "diagram id {id:?} has no UML:Diagram element; using the id as the name"
                    ))));
                    id.to_string()
                }
            },
            _ => {
                diagnostics.push(at(Diagnostic::warning(format!(
                    "message has no diagram tag; assigned to {UNASSIGNED_DIAGRAM:?}"
                ))));
                UNASSIGNED_DIAGRAM.to_string()
            }
        };

        let record = MessageRecord {
            name,
            sender_object: names.sender_object.clone(),
            sender_class: names.sender_class.clone(),
            sender_concern: classify(&names.sender_class, concerns),
            receiver_object: names.receiver_object.clone(),
            receiver_class: names.receiver_class.clone(),
            receiver_concern: classify(&names.receiver_class, concerns),
            seq,
            diagram,
            repetition: None,
            seqno,
            guard,
            assignment: label.as_ref().and_then(|p| p.assignment.clone()),
            args: label.map(|p| p.args).unwrap_or_default(),
            synchronicity: Synchronicity::from_tag(message.tag(tags::SYNCHRONICITY)),
            kind: MessageKind::from_tag(message.tag(tags::MESSAGE_KIND)),
        };
        staged.push(Staged {
            record,
            xmi_id: message.xmi_id.clone(),
        });
    }

    // group by diagram, order groups by name, order rows within each group
    let mut diagram_names: Vec<String> = staged.iter().map(|s| s.record.diagram.clone()).collect();
    diagram_names.sort();
    diagram_names.dedup();

    let mut rows = Vec::with_capacity(staged.len());
    for diagram in &diagram_names {
        let mut group: Vec<&Staged> = staged
            .iter()
            .filter(|s| &s.record.diagram == diagram)
            .collect();
        let all_have_seqno = group.iter().all(|s| s.record.seqno.is_some());
        let order_key = |s: &Staged| {
            let primary = if all_have_seqno {
                s.record.seqno.expect("checked above")
            } else {
                0
            };
            (primary, s.record.seq.clone())
        };
        group.sort_by(|a, b| {
            order_key(a)
                .cmp(&order_key(b))
                .then_with(|| a.record.name.cmp(&b.record.name))
                .then_with(|| a.xmi_id.cmp(&b.xmi_id))
        });
        for pair in group.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let tie = if all_have_seqno {
                a.record.seqno == b.record.seqno
            } else {
                a.record.seq == b.record.seq
            };
            if tie {
                diagnostics.push(
                    Diagnostic::warning(format!(
                        "diagram {diagram:?}: rows {:?} and {:?} share an order key; \
                         falling back to name/id order",
                        a.record.name, b.record.name
                    ))
                    .at_element(b.xmi_id.clone()),
                );
            }
        }
        rows.extend(group.into_iter().map(|s| s.record.clone()));
    }

    TableBuild {
        table: MessageTable::new(rows),
        diagnostics,
    }
}
