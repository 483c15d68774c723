//! Fan-in/fan-out coupling for the object-oriented model and the
//! transformed base model, and the before/after comparison report.
//!
//! The metric is structural: fan-out of a class is the number of DISTINCT
//! receiver classes of the call messages it sends (self-calls excluded),
//! fan-in the dual. Repeated calls to one class are one dependency; a
//! message-count weighting is available behind [`CouplingMode`] for
//! comparison studies.

use crate::concerns::fold_name;
use crate::model::MessageTable;
use crate::transform::AodModel;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// How to weight a dependency between two classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingMode {
    /// Count each distinct counterpart class once (the declared metric).
    #[default]
    DistinctClasses,
    /// Count every call message (repeated calls weigh more).
    MessageCount,
}

/// The two directions of coupling for one class in one model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FanMetrics {
    pub fan_in: u64,
    pub fan_out: u64,
}

/// Before/after values for one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCoupling {
    pub ood: FanMetrics,
    pub aod: FanMetrics,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CouplingTotals {
    pub ood_total: u64,
    pub aod_total: u64,
}

/// The full comparison: per-class values over the union of classes,
/// aspectized classes (0/0 on the AOD side) listed separately, and the
/// headline delta = ood_total − aod_total.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CouplingReport {
    pub mode: CouplingMode,
    pub per_class: BTreeMap<String, ClassCoupling>,
    pub aspects: Vec<String>,
    pub totals: CouplingTotals,
    pub delta: i64,
}

/// Directed dependency weight from `sender` to `receiver` classes over the
/// call rows of `table`, honoring the mode; rows whose endpoint classes
/// fold equal (self-calls) never count.
fn weight<F>(table: &MessageTable, mode: CouplingMode, mut keep: F) -> u64
where
    F: FnMut(&str, &str) -> bool,
{
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();
    let mut messages: u64 = 0;
    for row in &table.rows {
        if !row.is_call() {
            continue;
        }
        let sender = fold_name(&row.sender_class);
        let receiver = fold_name(&row.receiver_class);
        if sender == receiver || !keep(&sender, &receiver) {
            continue;
        }
        messages += 1;
        pairs.insert((sender, receiver));
    }
    match mode {
        CouplingMode::DistinctClasses => pairs.len() as u64,
        CouplingMode::MessageCount => messages,
    }
}

/// Number of distinct receiver classes of call rows sent by `class`
/// (self-calls excluded).
pub fn fan_out(class: &str, table: &MessageTable) -> u64 {
    fan_out_with(class, table, CouplingMode::DistinctClasses)
}

/// Number of distinct sender classes of call rows received by `class`
/// (self-calls excluded).
pub fn fan_in(class: &str, table: &MessageTable) -> u64 {
    fan_in_with(class, table, CouplingMode::DistinctClasses)
}

/// [`fan_out`] with an explicit weighting mode.
pub fn fan_out_with(class: &str, table: &MessageTable, mode: CouplingMode) -> u64 {
    let folded = fold_name(class);
    weight(table, mode, |sender, _| sender == folded)
}

/// [`fan_in`] with an explicit weighting mode.
pub fn fan_in_with(class: &str, table: &MessageTable, mode: CouplingMode) -> u64 {
    let folded = fold_name(class);
    weight(table, mode, |_, receiver| receiver == folded)
}

/// Compare coupling before and after the transformation.
///
/// The AOD side is measured on the transformed base model with every pair
/// involving an aspectized class excluded: woven interception is
/// non-invasive, so aspects contribute no explicit coupling and report
/// 0/0. Per-class rows cover the union of classes of both models, keyed by
/// the first-seen (trimmed) spelling.
pub fn coupling_report(ood: &MessageTable, aod: &AodModel, mode: CouplingMode) -> CouplingReport {
    let aspectized: BTreeSet<String> = aod
        .aspects
        .iter()
        .map(|a| fold_name(&a.source_class))
        .collect();
    let base = &aod.base_messages;

    // union of classes, folded key -> display name
    let mut classes: BTreeMap<String, String> = BTreeMap::new();
    for table in [ood, base] {
        for row in &table.rows {
            for class in [&row.sender_class, &row.receiver_class] {
                classes
                    .entry(fold_name(class))
                    .or_insert_with(|| class.trim().to_string());
            }
        }
    }

    let mut per_class = BTreeMap::new();
    for (folded, display) in &classes {
        let ood_metrics = FanMetrics {
            fan_in: fan_in_with(display, ood, mode),
            fan_out: fan_out_with(display, ood, mode),
        };
        let aod_metrics = if aspectized.contains(folded) {
            FanMetrics::default()
        } else {
            FanMetrics {
                fan_in: weight(base, mode, |sender, receiver| {
                    receiver == folded && !aspectized.contains(sender)
                }),
                fan_out: weight(base, mode, |sender, receiver| {
                    sender == folded && !aspectized.contains(receiver)
                }),
            }
        };
        per_class.insert(
            display.clone(),
            ClassCoupling {
                ood: ood_metrics,
                aod: aod_metrics,
            },
        );
    }

    let totals = CouplingTotals {
        ood_total: weight(ood, mode, |_, _| true),
        aod_total: weight(base, mode, |sender, receiver| {
            !aspectized.contains(sender) && !aspectized.contains(receiver)
        }),
    };
    let aspects: Vec<String> = aod
        .aspects
        .iter()
        .map(|a| a.source_class.clone())
        .collect();

    CouplingReport {
        mode,
        per_class,
        aspects,
        delta: totals.ood_total as i64 - totals.aod_total as i64,
        totals,
    }
}

impl CouplingReport {
    /// Plain-text rendering: one row per class, then the aspects and the
    /// headline totals.
    pub fn to_text_table(&self) -> String {
        let headers = ["Class", "OOD fan-in", "OOD fan-out", "AOD fan-in", "AOD fan-out"];
        let rows: Vec<[String; 5]> = self
            .per_class
            .iter()
            .map(|(class, c)| {
                [
                    class.clone(),
                    c.ood.fan_in.to_string(),
                    c.ood.fan_out.to_string(),
                    c.aod.fan_in.to_string(),
                    c.aod.fan_out.to_string(),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let emit = |out: &mut String, cells: &[String]| {
            let mut line = String::new();
            for (w, cell) in widths.iter().zip(cells) {
                if !line.is_empty() {
                    line.push_str("  ");
                }
                let _ = write!(line, "{cell:<width$}", width = *w);
            }
            out.push_str(line.trim_end());
            out.push('\n');
        };
        emit(&mut out, &headers.map(str::to_string));
        emit(&mut out, &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
        for row in &rows {
            emit(&mut out, row);
        }
        if !self.aspects.is_empty() {
            let _ = writeln!(out, "Aspects (excluded from AOD totals): {}", self.aspects.join(", "));
        }
        let _ = writeln!(
            out,
            "Totals: OOD {}, AOD {}, delta {}",
            self.totals.ood_total, self.totals.aod_total, self.delta
        );
        out
    }
}
