//! Streaming ingest of EA-dialect XMI 1.1 documents.
//!
//! The parser is event-based and single-pass: nothing beyond the element
//! currently being read is buffered. Elements are matched by local name so
//! namespace prefix variations between exporters do not matter. Only the
//! XMI 1.1 dialect is accepted; other versions fail up front instead of
//! half-parsing.

use crate::diagnostics::Diagnostic;
use indexmap::IndexMap;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use std::io::{self, BufRead, Read};
use thiserror::Error;

/// Tagged-value names the rest of the pipeline relies on.
pub mod tags {
    pub const SEQNO: &str = "seqno";
    pub const SOURCE_NAME: &str = "ea_sourceName";
    pub const TARGET_NAME: &str = "ea_targetName";
    pub const SOURCE_TYPE: &str = "ea_sourceType";
    pub const TARGET_TYPE: &str = "ea_targetType";
    pub const DIAGRAM: &str = "diagram";
    pub const CONDITIONAL: &str = "conditional";
    pub const SYNCHRONICITY: &str = "privatedata1";
    pub const MESSAGE_KIND: &str = "privatedata3";
    pub const SEQUENCE: &str = "privatedata4";
    pub const LABEL: &str = "lt";
}

/// Placeholder used when neither the object table nor the name tags can
/// name a participant.
pub const UNRESOLVED: &str = "\u{ab}unresolved\u{bb}";

/// One UML:Message element, verbatim. Tag values keep their whitespace;
/// trimming happens at resolution time only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMessage {
    pub xmi_id: String,
    pub name: String,
    pub sender_id: String,
    pub receiver_id: String,
    pub tagged: IndexMap<String, String>,
}

impl RawMessage {
    pub fn tag(&self, name: &str) -> Option<&str> {
        self.tagged.get(name).map(String::as_str)
    }
}

/// An object (classifier role) participating in diagrams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawObject {
    pub name: String,
    pub classifier_id: Option<String>,
}

/// Everything the ingest stage extracts from one document, in document
/// order. Immutable after construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawModel {
    pub messages: Vec<RawMessage>,
    pub objects: IndexMap<String, RawObject>,
    pub classifiers: IndexMap<String, String>,
    pub diagrams: IndexMap<String, String>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum XmiError {
    #[error("XML syntax error at {line}:{column}: {message}")]
    Syntax {
        line: u64,
        column: u64,
        message: String,
    },
    #[error("unsupported document: {0}")]
    UnsupportedFormat(String),
    #[error("unsupported XMI version {0:?}: only the XMI 1.1 export dialect is supported")]
    UnsupportedVersion(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// BufRead adapter that tracks the line/column of the last consumed byte,
/// so syntax errors can be located without buffering the document.
struct CountingReader<R> {
    inner: R,
    line: u64,
    column: u64,
}

impl<R: BufRead> CountingReader<R> {
    fn new(inner: R) -> Self {
        CountingReader {
            inner,
            line: 1,
            column: 1,
        }
    }
}

impl<R: BufRead> Read for CountingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let available = self.inner.fill_buf()?;
        let n = available.len().min(buf.len());
        buf[..n].copy_from_slice(&available[..n]);
        self.consume(n);
        Ok(n)
    }
}

impl<R: BufRead> BufRead for CountingReader<R> {
    fn fill_buf(&mut self) -> io::Result<&[u8]> {
        self.inner.fill_buf()
    }

    fn consume(&mut self, amt: usize) {
        if let Ok(buf) = self.inner.fill_buf() {
            for &byte in &buf[..amt.min(buf.len())] {
                if byte == b'\n' {
                    self.line += 1;
                    self.column = 1;
                } else {
                    self.column += 1;
                }
            }
        }
        self.inner.consume(amt);
    }
}

fn local_name(start: &BytesStart<'_>) -> String {
    String::from_utf8_lossy(start.name().local_name().as_ref()).into_owned()
}

struct Attrs {
    pairs: Vec<(String, String)>,
}

impl Attrs {
    fn get(&self, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Lookup by the attribute's local name, accepting both the dotted
    /// XMI 1.x style (`xmi.id`) and prefixed style (`xmi:id`).
    fn get_local(&self, local: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(k, _)| {
                k == local
                    || k.rsplit_once(':').map(|(_, l)| l) == Some(local)
                    || k.rsplit_once('.').map(|(_, l)| l) == Some(local)
            })
            .map(|(_, v)| v.as_str())
    }
}

struct DocumentParser<R: BufRead> {
    reader: Reader<CountingReader<R>>,
    model: RawModel,
    root_seen: bool,
    current_message: Option<RawMessage>,
    message_depth: usize,
    synthetic_counter: usize,
}

impl<R: BufRead> DocumentParser<R> {
    fn new(input: R) -> Self {
        let mut reader = Reader::from_reader(CountingReader::new(input));
        let config = reader.config_mut();
        config.trim_text(true);
        DocumentParser {
            reader,
            model: RawModel::default(),
            root_seen: false,
            current_message: None,
            message_depth: 0,
            synthetic_counter: 0,
        }
    }

    fn position(&self) -> (u64, u64) {
        let counting = self.reader.get_ref();
        (counting.line, counting.column)
    }

    fn syntax_error(&self, message: impl Into<String>) -> XmiError {
        let (line, column) = self.position();
        XmiError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn attrs(&self, start: &BytesStart<'_>) -> Result<Attrs, XmiError> {
        let mut pairs = Vec::new();
        for attr in start.attributes() {
            let attr = attr.map_err(|e| self.syntax_error(e.to_string()))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|e| self.syntax_error(e.to_string()))?
                .into_owned();
            pairs.push((key, value));
        }
        Ok(Attrs { pairs })
    }

    fn check_root(&mut self, name: &str, attrs: &Attrs) -> Result<(), XmiError> {
        if name != "XMI" {
            return Err(XmiError::UnsupportedFormat(format!(
                "document has no XMI root marker (root element is <{name}>)"
            )));
        }
        match attrs.get_local("version") {
            Some(version) if version.trim() == "1.1" => {}
            Some(version) => return Err(XmiError::UnsupportedVersion(version.trim().to_string())),
            None => self.model.diagnostics.push(Diagnostic::warning(
                "XMI root carries no version attribute; assuming 1.1",
            )),
        }
        self.root_seen = true;
        Ok(())
    }

    fn handle_start(&mut self, start: &BytesStart<'_>) -> Result<(), XmiError> {
        let name = local_name(start);
        let attrs = self.attrs(start)?;
        if !self.root_seen {
            return self.check_root(&name, &attrs);
        }
        if self.current_message.is_some() {
            self.message_depth += 1;
            match name.as_str() {
                "TaggedValue" => self.collect_tagged_value(&attrs),
                "Message" => {
                    let id = attrs.get_local("id").unwrap_or("").to_string();
                    self.model.diagnostics.push(
                        Diagnostic::warning("nested UML:Message element ignored").at_element(id),
                    );
                }
                _ => {}
            }
            return Ok(());
        }
        match name.as_str() {
            "Message" => self.begin_message(&attrs),
            "Class" | "Actor" | "Interface" => self.collect_classifier(&attrs),
            "ClassifierRole" | "Object" => self.collect_object(&attrs),
            "Diagram" => self.collect_diagram(&attrs),
            _ => {}
        }
        Ok(())
    }

    fn handle_end(&mut self, local: &str) {
        if self.current_message.is_some() {
            if self.message_depth > 0 {
                self.message_depth -= 1;
            } else if local == "Message" {
                self.finish_message();
            }
        }
    }

    fn begin_message(&mut self, attrs: &Attrs) {
        let xmi_id = match attrs.get_local("id") {
            Some(id) if !id.is_empty() => id.to_string(),
            _ => {
                self.synthetic_counter += 1;
                let id = format!("synthetic:{}", self.synthetic_counter);
                self.model.diagnostics.push(
                    Diagnostic::warning("UML:Message has no xmi.id; synthesized one")
                        .at_element(id.clone()),
                );
                id
            }
        };
        self.current_message = Some(RawMessage {
            xmi_id,
            name: attrs.get("name").unwrap_or("").to_string(),
            sender_id: attrs.get("sender").unwrap_or("").to_string(),
            receiver_id: attrs.get("receiver").unwrap_or("").to_string(),
            tagged: IndexMap::new(),
        });
        self.message_depth = 0;
    }

    fn collect_tagged_value(&mut self, attrs: &Attrs) {
        let message = self
            .current_message
            .as_mut()
            .expect("tagged value outside message");
        let (Some(tag), Some(value)) = (attrs.get("tag"), attrs.get("value")) else {
            self.model.diagnostics.push(
                Diagnostic::warning("UML:TaggedValue without tag/value attributes ignored")
                    .at_element(message.xmi_id.clone()),
            );
            return;
        };
        // first occurrence wins, like ids
        if !message.tagged.contains_key(tag) {
            message.tagged.insert(tag.to_string(), value.to_string());
        }
    }

    fn finish_message(&mut self) {
        let message = self.current_message.take().expect("no open message");
        if self
            .model
            .messages
            .iter()
            .any(|m| m.xmi_id == message.xmi_id)
        {
            self.model.diagnostics.push(
                Diagnostic::warning("duplicate xmi.id; first occurrence wins")
                    .at_element(message.xmi_id),
            );
            return;
        }
        self.model.messages.push(message);
    }

    fn collect_classifier(&mut self, attrs: &Attrs) {
        if let (Some(id), Some(name)) = (attrs.get_local("id"), attrs.get("name")) {
            if self.model.classifiers.contains_key(id) {
                self.model.diagnostics.push(
                    Diagnostic::warning("duplicate xmi.id; first occurrence wins").at_element(id),
                );
                return;
            }
            self.model
                .classifiers
                .insert(id.to_string(), name.to_string());
        }
    }

    fn collect_object(&mut self, attrs: &Attrs) {
        if let (Some(id), Some(name)) = (attrs.get_local("id"), attrs.get("name")) {
            if self.model.objects.contains_key(id) {
                self.model.diagnostics.push(
                    Diagnostic::warning("duplicate xmi.id; first occurrence wins").at_element(id),
                );
                return;
            }
            let classifier_id = attrs
                .get("base")
                .or_else(|| attrs.get("classifier"))
                .map(str::to_string);
            self.model.objects.insert(
                id.to_string(),
                RawObject {
                    name: name.to_string(),
                    classifier_id,
                },
            );
        }
    }

    fn collect_diagram(&mut self, attrs: &Attrs) {
        if let (Some(id), Some(name)) = (attrs.get_local("id"), attrs.get("name")) {
            if self.model.diagrams.contains_key(id) {
                self.model.diagnostics.push(
                    Diagnostic::warning("duplicate xmi.id; first occurrence wins").at_element(id),
                );
                return;
            }
            self.model.diagrams.insert(id.to_string(), name.to_string());
        }
    }

    fn run(mut self) -> Result<RawModel, XmiError> {
        let mut buf = Vec::new();
        loop {
            let event = {
                let result = self.reader.read_event_into(&mut buf);
                match result {
                    Ok(event) => event,
                    Err(e) => return Err(self.syntax_error(e.to_string())),
                }
            };
            match event {
                Event::Start(ref start) => self.handle_start(start)?,
                Event::Empty(ref start) => {
                    let name = local_name(start);
                    self.handle_start(start)?;
                    // self-closing: immediately balance the start
                    if self.current_message.is_some() {
                        if name == "Message" && self.message_depth == 0 {
                            self.finish_message();
                        } else {
                            self.handle_end(&name);
                        }
                    }
                }
                Event::End(ref end) => {
                    let local =
                        String::from_utf8_lossy(end.name().local_name().as_ref()).into_owned();
                    self.handle_end(&local);
                }
                Event::Eof => break,
                _ => {}
            }
            buf.clear();
        }
        if !self.root_seen {
            return Err(XmiError::UnsupportedFormat(
                "document has no XMI root marker".into(),
            ));
        }
        if let Some(message) = self.current_message.take() {
            self.model.diagnostics.push(
                Diagnostic::warning("UML:Message element never closed").at_element(message.xmi_id),
            );
        }
        Ok(self.model)
    }
}

/// Parse an XMI 1.1 document from a byte stream into a [`RawModel`].
pub fn parse_xmi(input: impl BufRead) -> Result<RawModel, XmiError> {
    DocumentParser::new(input).run()
}

/// Convenience wrapper over [`parse_xmi`] for in-memory documents.
pub fn parse_xmi_bytes(bytes: &[u8]) -> Result<RawModel, XmiError> {
    parse_xmi(io::Cursor::new(bytes))
}

/// Participant names of one message after id resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipantNames {
    pub message_id: String,
    pub sender_object: String,
    pub sender_class: String,
    pub receiver_object: String,
    pub receiver_class: String,
}

/// Output of [`resolve_participants`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolvedParticipants {
    pub rows: Vec<ParticipantNames>,
    pub diagnostics: Vec<Diagnostic>,
}

struct Endpoint<'a> {
    role: &'a str,
    id: &'a str,
    name_tag: &'a str,
}

/// Resolve sender/receiver object and class names for every message.
///
/// The object table is authoritative; the denormalized `ea_sourceName` /
/// `ea_targetName` tags are the fallback. Values are whitespace-trimmed
/// here and nowhere earlier. Failures degrade to the `«unresolved»`
/// placeholder; each affected message gets one diagnostic.
pub fn resolve_participants(raw: &RawModel) -> ResolvedParticipants {
    let mut out = ResolvedParticipants::default();
    for message in &raw.messages {
        let mut notes: Vec<String> = Vec::new();
        let mut resolve = |endpoint: Endpoint<'_>| -> (String, String) {
            match raw.objects.get(endpoint.id) {
                Some(object) => {
                    let class = match &object.classifier_id {
                        Some(cid) => match raw.classifiers.get(cid) {
                            Some(name) => name.trim().to_string(),
                            None => {
                                notes.push(format!(
                                    "{} classifier id {cid:?} not in classifier table",
                                    endpoint.role
                                ));
                                UNRESOLVED.to_string()
                            }
                        },
                        None => {
                            notes.push(format!(
                                "{} object has no classifier link",
                                endpoint.role
                            ));
                            UNRESOLVED.to_string()
                        }
                    };
                    (object.name.trim().to_string(), class)
                }
                None => match message.tag(endpoint.name_tag).map(str::trim) {
                    Some(name) if !name.is_empty() => {
                        notes.push(format!(
                            "{} id {:?} not in object table; name taken from {} tag",
                            endpoint.role, endpoint.id, endpoint.name_tag
                        ));
                        (name.to_string(), UNRESOLVED.to_string())
                    }
                    _ => {
                        notes.push(format!(
                            "{} id {:?} unresolved (no object entry, no {} tag)",
                            endpoint.role, endpoint.id, endpoint.name_tag
                        ));
                        (UNRESOLVED.to_string(), UNRESOLVED.to_string())
                    }
                },
            }
        };

        let (sender_object, sender_class) = resolve(Endpoint {
            role: "sender",
            id: &message.sender_id,
            name_tag: tags::SOURCE_NAME,
        });
        let (receiver_object, receiver_class) = resolve(Endpoint {
            role: "receiver",
            id: &message.receiver_id,
            name_tag: tags::TARGET_NAME,
        });

        if !notes.is_empty() {
            out.diagnostics.push(
                Diagnostic::warning(format!(
                    "participant resolution for message {:?}: {}",
                    message.name,
                    notes.join("; ")
                ))
                .at_element(message.xmi_id.clone()),
            );
        }
        out.rows.push(ParticipantNames {
            message_id: message.xmi_id.clone(),
            sender_object,
            sender_class,
            receiver_object,
            receiver_class,
        });
    }
    out
}

/// Count `UML:Message` elements by raw text scan, independent of the XML
/// parser. Used to cross-check message counts.
pub fn scan_message_element_count(document: &str) -> usize {
    let mut count = 0;
    let mut rest = document;
    while let Some(pos) = rest.find('<') {
        rest = &rest[pos + 1..];
        let tag: String = rest
            .chars()
            .take_while(|c| !c.is_whitespace() && *c != '>' && *c != '/')
            .collect();
        let local = tag.rsplit_once(':').map(|(_, l)| l).unwrap_or(&tag);
        if local == "Message" {
            count += 1;
        }
    }
    count
}
