//! Shared unit-test fixtures: the cheque-service interaction model used
//! throughout the documentation, expressed directly as message records.

use crate::concerns::{ConcernMap, ConcernType};
use crate::crosscut::{detect_aspect_candidates, repetition_counts, AspectCandidateSet};
use crate::model::{MessageKind, MessageRecord, MessageTable, SequenceExpr, Synchronicity};

pub fn concerns() -> ConcernMap {
    ConcernMap::from_entries(
        [
            ("login page".to_string(), ConcernType::NonFunctional),
            ("security".to_string(), ConcernType::NonFunctional),
            ("home page".to_string(), ConcernType::Functional),
            ("customer".to_string(), ConcernType::Functional),
            ("account data base".to_string(), ConcernType::Functional),
            ("option menu page".to_string(), ConcernType::Functional),
        ],
        ["customer".to_string()],
    )
    .unwrap()
}

pub struct RowSpec {
    pub name: &'static str,
    pub sender: (&'static str, &'static str),
    pub receiver: (&'static str, &'static str),
    pub seq: &'static str,
    pub guard: Option<&'static str>,
    pub assignment: Option<&'static str>,
    pub args: &'static [&'static str],
}

pub const R: RowSpec = RowSpec {
    name: "",
    sender: ("", ""),
    receiver: ("", ""),
    seq: "1",
    guard: None,
    assignment: None,
    args: &[],
};

pub fn build(diagram: &str, specs: &[RowSpec]) -> Vec<MessageRecord> {
    let map = concerns();
    specs
        .iter()
        .map(|s| MessageRecord {
            name: s.name.to_string(),
            sender_object: s.sender.0.to_string(),
            sender_class: s.sender.1.to_string(),
            sender_concern: map.classify(s.sender.1),
            receiver_object: s.receiver.0.to_string(),
            receiver_class: s.receiver.1.to_string(),
            receiver_concern: map.classify(s.receiver.1),
            seq: s.seq.parse::<SequenceExpr>().unwrap(),
            diagram: diagram.to_string(),
            repetition: None,
            seqno: None,
            guard: s.guard.map(str::to_string),
            assignment: s.assignment.map(str::to_string),
            args: s.args.iter().map(|a| a.to_string()).collect(),
            synchronicity: Synchronicity::Synchronous,
            kind: MessageKind::Call,
        })
        .collect()
}

pub fn cheque_rows() -> Vec<MessageRecord> {
    build(
        "cheque service",
        &[
            RowSpec { name: "access", sender: ("user", "customer"), receiver: ("h-page", "home page"), seq: "1", ..R },
            RowSpec { name: "click login", sender: ("h-page", "home page"), receiver: ("l-page", "login page"), seq: "1.1", ..R },
            RowSpec { name: "display login", sender: ("l-page", "login page"), receiver: ("user", "customer"), seq: "1.2", ..R },
            RowSpec { name: "enter", sender: ("user", "customer"), receiver: ("l-page", "login page"), seq: "2", args: &["username", "password"], ..R },
            RowSpec { name: "verify", sender: ("l-page", "login page"), receiver: ("db", "account data base"), seq: "2.1", args: &["username", "password"], ..R },
            RowSpec { name: "valid user", sender: ("db", "account data base"), receiver: ("om-page", "option menu page"), seq: "2.2", ..R },
            RowSpec { name: "display option", sender: ("om-page", "option menu page"), receiver: ("user", "customer"), seq: "2.3", ..R },
            RowSpec { name: "check behavior", sender: ("h-page", "home page"), receiver: ("monitoring", "security"), seq: "3", assignment: Some("behave"), ..R },
            RowSpec { name: "recording", sender: ("monitoring", "security"), receiver: ("db", "account data base"), seq: "3.1", ..R },
            RowSpec { name: "select cheque", sender: ("user", "customer"), receiver: ("om-page", "option menu page"), seq: "4", ..R },
            RowSpec { name: "display cheque", sender: ("om-page", "option menu page"), receiver: ("db", "account data base"), seq: "4.1", assignment: Some("display"), ..R },
            RowSpec { name: "check user status", sender: ("db", "account data base"), receiver: ("monitoring", "security"), seq: "4.2", ..R },
            RowSpec { name: "block user", sender: ("monitoring", "security"), receiver: ("h-page", "home page"), seq: "4.2.1", guard: Some("any misuse"), ..R },
            RowSpec { name: "logout", sender: ("h-page", "home page"), receiver: ("user", "customer"), seq: "4.2.2", ..R },
            RowSpec { name: "view cheque", sender: ("om-page", "option menu page"), receiver: ("user", "customer"), seq: "4.3", ..R },
        ],
    )
}

pub fn logging_rows() -> Vec<MessageRecord> {
    build(
        "logging",
        &[
            RowSpec { name: "access", sender: ("user", "customer"), receiver: ("h-page", "home page"), seq: "1", ..R },
            RowSpec { name: "click login", sender: ("h-page", "home page"), receiver: ("l-page", "login page"), seq: "1.1", ..R },
            RowSpec { name: "display login", sender: ("l-page", "login page"), receiver: ("user", "customer"), seq: "1.2", ..R },
            RowSpec { name: "enter", sender: ("user", "customer"), receiver: ("l-page", "login page"), seq: "2", args: &["username", "password"], ..R },
            RowSpec { name: "verify", sender: ("l-page", "login page"), receiver: ("db", "account data base"), seq: "2.1", args: &["username", "password"], ..R },
            RowSpec { name: "valid user", sender: ("db", "account data base"), receiver: ("om-page", "option menu page"), seq: "2.2", ..R },
            RowSpec { name: "display option", sender: ("om-page", "option menu page"), receiver: ("user", "customer"), seq: "2.3", ..R },
        ],
    )
}

/// The two-diagram fixture model: the cheque-service flow plus a shorter
/// logging flow over the same participants.
pub fn fixture_table() -> MessageTable {
    let mut rows = cheque_rows();
    rows.extend(logging_rows());
    MessageTable::new(rows)
}

/// Candidates computed over the fixture: {login page, security} at any
/// threshold between 1 and 4.
pub fn fixture_candidates(table: &MessageTable) -> AspectCandidateSet {
    detect_aspect_candidates(&repetition_counts(table), &concerns(), 1).unwrap()
}
