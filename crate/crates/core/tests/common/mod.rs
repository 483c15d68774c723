//! Shared helpers for the integration suites: fixture loading, the
//! synthetic repetition model, and a random interaction-tree generator
//! for property tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use proptest::prelude::*;

use aodkit::concerns::{ConcernMap, ConcernType, ToolConfig};
use aodkit::model::{
    build_message_table, compare_seq, MessageKind, MessageRecord, MessageTable, SequenceExpr,
    Synchronicity,
};
use aodkit::xmi::parse_xmi_bytes;

/// Absolute path of a file under `crates/core/fixtures/`.
pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// Absolute path of a file under `crates/core/tests/golden/`.
pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
        .join(name)
}

/// The checked-in concern configuration for the banking fixtures.
pub fn fixture_config() -> ToolConfig {
    let text = std::fs::read_to_string(fixture_path("concerns.cfg"))
        .expect("fixture config must be readable");
    ToolConfig::from_toml_str(&text).expect("fixture config must parse")
}

/// Parse one of the XMI fixtures into the raw model and build its message
/// table with the given concern map.
pub fn load_fixture_table(xmi_name: &str, concerns: &ConcernMap) -> MessageTable {
    let bytes = std::fs::read(fixture_path(xmi_name)).expect("fixture must be readable");
    let raw = parse_xmi_bytes(&bytes).expect("fixture must parse");
    build_message_table(&raw, concerns).table
}

/// The banking model table (both diagrams) with the fixture concern map.
pub fn cheque_table() -> (ToolConfig, MessageTable) {
    let config = fixture_config();
    let table = load_fixture_table("cheque_service.xmi", &config.concerns);
    (config, table)
}

/// A bare message row for synthetic tables; everything not specified by
/// the caller takes the common default (call kind, synchronous, no guard).
pub fn row(
    diagram: &str,
    seq: &[u32],
    name: &str,
    sender: (&str, &str),
    receiver: (&str, &str),
    concerns: &ConcernMap,
) -> MessageRecord {
    MessageRecord {
        name: name.to_string(),
        sender_object: sender.0.to_string(),
        sender_class: sender.1.to_string(),
        sender_concern: concerns.classify(sender.1),
        receiver_object: receiver.0.to_string(),
        receiver_class: receiver.1.to_string(),
        receiver_concern: concerns.classify(receiver.1),
        seq: SequenceExpr::new(seq.to_vec()).expect("test seq must be valid"),
        diagram: diagram.to_string(),
        repetition: None,
        seqno: None,
        guard: None,
        assignment: None,
        args: Vec::new(),
        synchronicity: Synchronicity::Synchronous,
        kind: MessageKind::Call,
    }
}

/// Concern map used by the synthetic repetition model: the same class
/// inventory as the banking fixtures.
pub fn banking_concerns() -> ConcernMap {
    ConcernMap::from_entries(
        [
            ("home page".to_string(), ConcernType::Functional),
            ("customer".to_string(), ConcernType::Functional),
            ("account data base".to_string(), ConcernType::Functional),
            ("option menu page".to_string(), ConcernType::Functional),
            ("login page".to_string(), ConcernType::NonFunctional),
            ("security".to_string(), ConcernType::NonFunctional),
        ],
        ["customer".to_string()],
    )
    .expect("static concern map must build")
}

/// Synthetic model with known model-wide repetition totals:
/// `click login`→login page ×6, `enter`→login page ×6,
/// `check behavior`→security ×5, `check user status`→security ×4.
/// Each occurrence is a nested call whose parent targets the sender, so
/// every crosscutting call has an enclosing join point.
pub fn synthetic_repetition_table(concerns: &ConcernMap) -> MessageTable {
    let specs: [(&str, (&str, &str), u32); 4] = [
        ("click login", ("l-page", "login page"), 6),
        ("enter", ("l-page", "login page"), 6),
        ("check behavior", ("monitoring", "security"), 5),
        ("check user status", ("monitoring", "security"), 4),
    ];
    let mut rows = Vec::new();
    let mut top = 0u32;
    for (name, receiver, occurrences) in specs {
        for i in 0..occurrences {
            top += 1;
            // parent call into a functional class, then the counted call
            // nested underneath it
            let diagram = format!("session {}", i % 3 + 1);
            rows.push(row(
                &diagram,
                &[top],
                "access",
                ("user", "customer"),
                ("h-page", "home page"),
                concerns,
            ));
            rows.push(row(
                &diagram,
                &[top, 1],
                name,
                ("h-page", "home page"),
                receiver,
                concerns,
            ));
        }
    }
    sort_rows(&mut rows);
    MessageTable::new(rows)
}

/// Canonical table order: diagram name, then Dewey sequence.
pub fn sort_rows(rows: &mut [MessageRecord]) {
    rows.sort_by(|a, b| {
        a.diagram
            .cmp(&b.diagram)
            .then_with(|| compare_seq(&a.seq, &b.seq))
    });
}

// ---------------------------------------------------------------------
// Random interaction-tree models for property tests.
//
// Participants: one functional "driver" object that sends the top-level
// calls, two further functional classes, and two non-functional classes.
// Top-level calls always target functional classes, so every nested
// crosscutting call has an enclosing join point by construction.
// ---------------------------------------------------------------------

/// (object, class) participant pool; indices 0..=2 are functional.
pub const PARTICIPANTS: [(&str, &str); 5] = [
    ("d1", "driver"),
    ("p1", "portal"),
    ("l1", "ledger"),
    ("a1", "audit log"),
    ("s1", "session guard"),
];

const NAME_POOL: [&str; 5] = ["open", "submit", "record entry", "validate", "notify"];

/// Concern map for the random models.
pub fn random_model_concerns() -> ConcernMap {
    ConcernMap::from_entries(
        [
            ("driver".to_string(), ConcernType::Functional),
            ("portal".to_string(), ConcernType::Functional),
            ("ledger".to_string(), ConcernType::Functional),
            ("audit log".to_string(), ConcernType::NonFunctional),
            ("session guard".to_string(), ConcernType::NonFunctional),
        ],
        [],
    )
    .expect("static concern map must build")
}

/// One node of a random interaction tree.
#[derive(Debug, Clone)]
pub struct NodeSpec {
    pub name_idx: usize,
    pub target_idx: usize,
    pub guarded: bool,
    pub children: Vec<NodeSpec>,
}

fn node_strategy() -> impl Strategy<Value = NodeSpec> {
    let leaf = (0..NAME_POOL.len(), 0..PARTICIPANTS.len(), any::<bool>()).prop_map(
        |(name_idx, target_idx, guarded)| NodeSpec {
            name_idx,
            target_idx,
            guarded,
            children: Vec::new(),
        },
    );
    leaf.prop_recursive(3, 24, 4, |inner| {
        (
            0..NAME_POOL.len(),
            0..PARTICIPANTS.len(),
            any::<bool>(),
            prop::collection::vec(inner, 0..4),
        )
            .prop_map(|(name_idx, target_idx, guarded, children)| NodeSpec {
                name_idx,
                target_idx,
                guarded,
                children,
            })
    })
}

/// A whole random model: one or two diagrams of one to three trees each.
pub fn model_strategy() -> impl Strategy<Value = Vec<Vec<NodeSpec>>> {
    prop::collection::vec(prop::collection::vec(node_strategy(), 1..4), 1..3)
}

fn emit_node(
    node: &NodeSpec,
    sender_idx: usize,
    seq: Vec<u32>,
    diagram: &str,
    concerns: &ConcernMap,
    depth: usize,
    rows: &mut Vec<MessageRecord>,
) {
    // top-level calls target functional classes so that nested
    // crosscutting calls always have an enclosing join point
    let mut target_idx = if depth == 0 {
        node.target_idx % 3
    } else {
        node.target_idx
    };
    if target_idx == sender_idx {
        target_idx = if depth == 0 {
            (target_idx + 1) % 3
        } else {
            (target_idx + 1) % PARTICIPANTS.len()
        };
    }
    let sender = PARTICIPANTS[sender_idx];
    let receiver = PARTICIPANTS[target_idx];
    let mut record = row(
        diagram,
        &seq,
        NAME_POOL[node.name_idx],
        sender,
        receiver,
        concerns,
    );
    if node.guarded {
        record.guard = Some("retry wanted".to_string());
    }
    rows.push(record);
    for (i, child) in node.children.iter().enumerate() {
        let mut child_seq = seq.clone();
        child_seq.push(i as u32 + 1);
        emit_node(child, target_idx, child_seq, diagram, concerns, depth + 1, rows);
    }
}

/// Materialize a random model into a canonical message table.
pub fn build_random_model(spec: &[Vec<NodeSpec>], concerns: &ConcernMap) -> MessageTable {
    let mut rows = Vec::new();
    for (d, trees) in spec.iter().enumerate() {
        let diagram = format!("flow {}", d + 1);
        for (r, tree) in trees.iter().enumerate() {
            emit_node(tree, 0, vec![r as u32 + 1], &diagram, concerns, 0, &mut rows);
        }
    }
    sort_rows(&mut rows);
    MessageTable::new(rows)
}

/// Multiset equality over message rows, ignoring order.
pub fn same_multiset(a: &[MessageRecord], b: &[MessageRecord]) -> bool {
    fn keyed(rows: &[MessageRecord]) -> Vec<String> {
        let mut keys: Vec<String> = rows
            .iter()
            .map(|r| format!("{}|{}|{}|{}|{}", r.diagram, r.seq, r.sender_object, r.receiver_object, r.label()))
            .collect();
        keys.sort();
        keys
    }
    keyed(a) == keyed(b)
}
