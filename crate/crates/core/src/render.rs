//! DOT renderings of each diagram before and after the transformation,
//! aspect classes filled red, plus a minimal DOT parser used by tests and
//! callers to validate the emitted text.
//!
//! One node per participant (`"object:Class"`), one directed edge per
//! message labeled with the canonical message label. Output is
//! deterministic: nodes sorted, edges in table order.

use crate::concerns::fold_name;
use crate::model::MessageRecord;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

/// Quote an arbitrary string as a DOT ID.
fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

/// Render one diagram's rows as a DOT digraph.
///
/// `aspects` holds the aspectized class names: their participant nodes are
/// filled red, and an aspect class with no participant in `rows` still
/// gets a standalone red node (labeled by the class name) so the woven
/// design stays visible.
pub fn to_dot(diagram: &str, rows: &[MessageRecord], aspects: &[String]) -> String {
    let folded_aspects: BTreeSet<String> = aspects.iter().map(|a| fold_name(a)).collect();

    // participant nodes: id and label are "object:Class"
    let mut nodes: BTreeMap<String, bool> = BTreeMap::new(); // id -> red?
    for row in rows {
        for (object, class) in [
            (&row.sender_object, &row.sender_class),
            (&row.receiver_object, &row.receiver_class),
        ] {
            let id = format!("{object}:{class}");
            let red = folded_aspects.contains(&fold_name(class));
            nodes.insert(id, red);
        }
    }
    // aspect classes with no participant still appear, labeled by class
    for aspect in aspects {
        let present = rows.iter().any(|r| {
            fold_name(&r.sender_class) == fold_name(aspect)
                || fold_name(&r.receiver_class) == fold_name(aspect)
        });
        if !present {
            nodes.insert(aspect.trim().to_string(), true);
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(diagram));
    out.push_str("    rankdir=LR;\n");
    for (id, red) in &nodes {
        if *red {
            let _ = writeln!(
                out,
                "    {} [label={}, style=filled, fillcolor=red];",
                quote(id),
                quote(id)
            );
        } else {
            let _ = writeln!(out, "    {} [label={}];", quote(id), quote(id));
        }
    }
    for row in rows {
        let from = format!("{}:{}", row.sender_object, row.sender_class);
        let to = format!("{}:{}", row.receiver_object, row.receiver_class);
        let _ = writeln!(
            out,
            "    {} -> {} [label={}];",
            quote(&from),
            quote(&to),
            quote(&row.label())
        );
    }
    out.push_str("}\n");
    out
}

/// A parsed DOT graph (the subset this tool emits).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub name: String,
    /// Graph-level attributes such as `rankdir`.
    pub attrs: BTreeMap<String, String>,
    pub nodes: Vec<DotNode>,
    pub edges: Vec<DotEdge>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotNode {
    pub id: String,
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotEdge {
    pub from: String,
    pub to: String,
    pub attrs: BTreeMap<String, String>,
}

impl DotGraph {
    pub fn node(&self, id: &str) -> Option<&DotNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Nodes carrying `style=filled, fillcolor=red`.
    pub fn red_nodes(&self) -> Vec<&DotNode> {
        self.nodes
            .iter()
            .filter(|n| {
                n.attrs.get("style").map(String::as_str) == Some("filled")
                    && n.attrs.get("fillcolor").map(String::as_str) == Some("red")
            })
            .collect()
    }

    /// Number of edges whose head is `id`.
    pub fn in_degree(&self, id: &str) -> usize {
        self.edges.iter().filter(|e| e.to == id).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DotError {
    #[error("offset {0}: unterminated quoted string")]
    UnterminatedString(usize),
    #[error("offset {offset}: unexpected character {found:?}")]
    UnexpectedChar { offset: usize, found: char },
    #[error("offset {offset}: expected {expected}, found {found:?}")]
    Unexpected {
        offset: usize,
        expected: &'static str,
        found: String,
    },
    #[error("unexpected end of input: expected {0}")]
    UnexpectedEnd(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Equals,
    Comma,
    Semicolon,
    Arrow,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Id(text) => format!("{text:?}"),
            Token::LBrace => "'{'".to_string(),
            Token::RBrace => "'}'".to_string(),
            Token::LBracket => "'['".to_string(),
            Token::RBracket => "']'".to_string(),
            Token::Equals => "'='".to_string(),
            Token::Comma => "','".to_string(),
            Token::Semicolon => "';'".to_string(),
            Token::Arrow => "'->'".to_string(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, DotError> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' => { tokens.push((i, Token::LBrace)); i += 1; }
            '}' => { tokens.push((i, Token::RBrace)); i += 1; }
            '[' => { tokens.push((i, Token::LBracket)); i += 1; }
            ']' => { tokens.push((i, Token::RBracket)); i += 1; }
            '=' => { tokens.push((i, Token::Equals)); i += 1; }
            ',' => { tokens.push((i, Token::Comma)); i += 1; }
            ';' => { tokens.push((i, Token::Semicolon)); i += 1; }
            '-' => {
                if bytes.get(i + 1) == Some(&'>') {
                    tokens.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return Err(DotError::UnexpectedChar { offset: i, found: '-' });
                }
            }
            '"' => {
                let start = i;
                i += 1;
                let mut value = String::new();
                loop {
                    match bytes.get(i) {
                        None => return Err(DotError::UnterminatedString(start)),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            match bytes.get(i + 1) {
                                Some('n') => value.push('\n'),
                                Some(escaped) => value.push(*escaped),
                                None => return Err(DotError::UnterminatedString(start)),
                            }
                            i += 2;
                        }
                        Some(other) => {
                            value.push(*other);
                            i += 1;
                        }
                    }
                }
                tokens.push((start, Token::Id(value)));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_alphanumeric() || bytes[i] == '_' || bytes[i] == '.')
                {
                    i += 1;
                }
                tokens.push((start, Token::Id(bytes[start..i].iter().collect())));
            }
            other => return Err(DotError::UnexpectedChar { offset: i, found: other }),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn next(&mut self, expected: &'static str) -> Result<(usize, Token), DotError> {
        let token = self
            .tokens
            .get(self.at)
            .cloned()
            .ok_or(DotError::UnexpectedEnd(expected))?;
        self.at += 1;
        Ok(token)
    }

    fn expect_id(&mut self, expected: &'static str) -> Result<String, DotError> {
        match self.next(expected)? {
            (_, Token::Id(text)) => Ok(text),
            (offset, other) => Err(DotError::Unexpected {
                offset,
                expected,
                found: other.describe(),
            }),
        }
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), DotError> {
        match self.next(expected)? {
            (_, found) if found == token => Ok(()),
            (offset, found) => Err(DotError::Unexpected {
                offset,
                expected,
                found: found.describe(),
            }),
        }
    }

    fn attr_list(&mut self) -> Result<BTreeMap<String, String>, DotError> {
        let mut attrs = BTreeMap::new();
        self.expect(Token::LBracket, "'['")?;
        if self.peek() == Some(&Token::RBracket) {
            self.at += 1;
            return Ok(attrs);
        }
        loop {
            let key = self.expect_id("attribute name")?;
            self.expect(Token::Equals, "'='")?;
            let value = self.expect_id("attribute value")?;
            attrs.insert(key, value);
            match self.next("',' or ']'")? {
                (_, Token::Comma) => continue,
                (_, Token::RBracket) => break,
                (offset, other) => {
                    return Err(DotError::Unexpected {
                        offset,
                        expected: "',' or ']'",
                        found: other.describe(),
                    })
                }
            }
        }
        Ok(attrs)
    }
}

/// Parse the DOT subset this tool emits: a named digraph with graph
/// attributes, node statements, and `a -> b` edge statements, each with an
/// optional bracketed attribute list and optional trailing semicolon.
pub fn parse_dot(text: &str) -> Result<DotGraph, DotError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let keyword = parser.expect_id("'digraph'")?;
    if keyword != "digraph" {
        return Err(DotError::Unexpected {
            offset: 0,
            expected: "'digraph'",
            found: format!("{keyword:?}"),
        });
    }
    let name = match parser.peek() {
        Some(Token::Id(_)) => parser.expect_id("graph name")?,
        _ => String::new(),
    };
    parser.expect(Token::LBrace, "'{'")?;

    let mut graph = DotGraph {
        name,
        ..DotGraph::default()
    };
    loop {
        match parser.next("statement or '}'")? {
            (_, Token::RBrace) => break,
            (_, Token::Semicolon) => continue,
            (_, Token::Id(first)) => {
                match parser.peek() {
                    // graph attribute: id = id
                    Some(Token::Equals) => {
                        parser.at += 1;
                        let value = parser.expect_id("attribute value")?;
                        graph.attrs.insert(first, value);
                    }
                    // edge: id -> id [attrs]
                    Some(Token::Arrow) => {
                        parser.at += 1;
                        let to = parser.expect_id("edge target")?;
                        let attrs = match parser.peek() {
                            Some(Token::LBracket) => parser.attr_list()?,
                            _ => BTreeMap::new(),
                        };
                        graph.edges.push(DotEdge { from: first, to, attrs });
                    }
                    // node: id [attrs]
                    _ => {
                        let attrs = match parser.peek() {
                            Some(Token::LBracket) => parser.attr_list()?,
                            _ => BTreeMap::new(),
                        };
                        graph.nodes.push(DotNode { id: first, attrs });
                    }
                }
                if parser.peek() == Some(&Token::Semicolon) {
                    parser.at += 1;
                }
            }
            (offset, other) => {
                return Err(DotError::Unexpected {
                    offset,
                    expected: "statement or '}'",
                    found: other.describe(),
                })
            }
        }
    }
    if let Some((offset, token)) = parser.tokens.get(parser.at) {
        return Err(DotError::Unexpected {
            offset: *offset,
            expected: "end of input",
            found: token.describe(),
        });
    }
    Ok(graph)
}
