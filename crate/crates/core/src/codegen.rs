//! Deterministic source-skeleton emission: one AspectJ-dialect aspect per
//! aspectized class, one plain class skeleton per functional class, plus a
//! JSON manifest with content digests.
//!
//! The generated text is an output file format, never compiled here; the
//! committed golden files are the normative shape of the templates.

use crate::concerns::{fold_name, AdviceKind, ConcernMap, ConcernType};
use crate::diagnostics::Diagnostic;
use crate::model::MessageTable;
use crate::transform::{AodModel, AspectSpec};
use crate::xmi::UNRESOLVED;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// One generated source file, not yet written to disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedUnit {
    /// Path relative to the output directory, e.g. `aspects/Security.aj`.
    pub file_name: String,
    pub kind: UnitKind,
    /// Final content; always ends with exactly one newline.
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitKind {
    Aspect,
    Class,
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitKind::Aspect => f.write_str("aspect"),
            UnitKind::Class => f.write_str("class"),
        }
    }
}

/// File extensions for the two unit kinds (without the dot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileExtensions {
    pub aspect: String,
    pub class: String,
}

impl Default for FileExtensions {
    fn default() -> Self {
        FileExtensions {
            aspect: "aj".to_string(),
            class: "java".to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodegenError {
    #[error("cannot derive an identifier from {0:?}: nothing remains after filtering")]
    EmptyIdentifier(String),
    #[error("identifier collision: {first:?} and {second:?} both mangle to {mangled:?}")]
    NameCollision {
        first: String,
        second: String,
        mangled: String,
    },
    #[error("advice for operation {operation:?} of aspect {aspect:?} has an unresolved pointcut class")]
    UnresolvedPointcut { aspect: String, operation: String },
}

/// Everything `generate_all` produces: the units in canonical order
/// (aspects first, then classes, each sorted by file name), the manifest
/// document, and warnings about classes that yield no unit.
#[derive(Debug, Clone)]
pub struct CodegenOutput {
    pub units: Vec<GeneratedUnit>,
    pub manifest_json: String,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Serialize)]
struct ManifestEntry {
    file_name: String,
    kind: UnitKind,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    units: Vec<ManifestEntry>,
}

fn capitalize(fragment: &str) -> String {
    let mut chars = fragment.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// UpperCamelCase identifier from a free-form model name: split on
/// anything that is not a letter or digit, capitalize each fragment,
/// concatenate. Idempotent on already-mangled input.
pub fn mangle_type_name(raw: &str) -> Result<String, CodegenError> {
    let mangled: String = raw
        .split(|c: char| !c.is_alphanumeric())
        .filter(|fragment| !fragment.is_empty())
        .map(capitalize)
        .collect();
    if mangled.is_empty() {
        return Err(CodegenError::EmptyIdentifier(raw.to_string()));
    }
    Ok(mangled)
}

/// lowerCamelCase variant of [`mangle_type_name`] for methods and
/// parameters.
pub fn mangle_method_name(raw: &str) -> Result<String, CodegenError> {
    let mangled = mangle_type_name(raw)?;
    let mut chars = mangled.chars();
    let first = chars.next().expect("mangled identifiers are non-empty");
    Ok(first.to_lowercase().chain(chars).collect())
}

/// sha-256 of the unit text, lowercase hex.
pub fn content_digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Allocates `base`, `base2`, `base3`, ... so repeated operations never
/// emit duplicate member names.
struct NameAllocator {
    taken: BTreeMap<String, u32>,
}

impl NameAllocator {
    fn new() -> Self {
        NameAllocator {
            taken: BTreeMap::new(),
        }
    }

    fn allocate(&mut self, base: &str) -> String {
        let n = self.taken.entry(base.to_string()).or_insert(0);
        *n += 1;
        if *n == 1 {
            base.to_string()
        } else {
            format!("{base}{n}")
        }
    }
}

fn advice_header(kind: AdviceKind, pointcut_name: &str) -> String {
    match kind {
        AdviceKind::Before => format!("    before(): {pointcut_name}() {{"),
        AdviceKind::After => format!("    after(): {pointcut_name}() {{"),
        AdviceKind::Around => format!("    Object around(): {pointcut_name}() {{"),
    }
}

/// Emit the aspect declaration for one aspectized class: per advice a
/// named pointcut, an advice of the configured kind dispatching to a
/// private method, the private method holding the absorbed body calls
/// (guarded ones wrapped in a placeholder predicate), and one boolean
/// placeholder per distinct guard.
pub fn generate_aspect(spec: &AspectSpec) -> Result<GeneratedUnit, CodegenError> {
    let mut lines: Vec<String> = Vec::new();
    lines.push(format!("public aspect {} {{", spec.name));

    // guard text -> placeholder method name, deduplicated by mangled name
    let mut guards: BTreeMap<String, String> = BTreeMap::new();
    let mut guard_method = |guard: &str| -> Result<String, CodegenError> {
        let name = mangle_method_name(guard)?;
        guards.entry(name.clone()).or_insert_with(|| guard.to_string());
        Ok(name)
    };

    let mut names = NameAllocator::new();
    let mut private_methods: Vec<Vec<String>> = Vec::new();
    for advice in &spec.advices {
        if advice.pointcut_class == UNRESOLVED {
            return Err(CodegenError::UnresolvedPointcut {
                aspect: spec.name.clone(),
                operation: advice.operation.clone(),
            });
        }
        let method = names.allocate(&mangle_method_name(&advice.operation)?);
        let pointcut_name = format!("{method}JoinPoint");
        let pointcut_class = mangle_type_name(&advice.pointcut_class)?;
        let pointcut_op = mangle_method_name(&advice.pointcut_operation)?;

        lines.push(String::new());
        lines.push(format!(
            "    pointcut {pointcut_name}(): execution(* {pointcut_class}.{pointcut_op}(..));"
        ));
        lines.push(String::new());
        lines.push(advice_header(advice.kind, &pointcut_name));
        match &advice.guard {
            Some(guard) => {
                let predicate = guard_method(guard)?;
                lines.push(format!("        if ({predicate}()) {{"));
                lines.push(format!("            {method}();"));
                lines.push("        }".to_string());
            }
            None => lines.push(format!("        {method}();")),
        }
        if advice.kind == AdviceKind::Around {
            lines.push("        return proceed();".to_string());
        }
        lines.push("    }".to_string());

        let mut body: Vec<String> = Vec::new();
        body.push(format!("    private void {method}() {{"));
        for call in &advice.body_calls {
            let target = mangle_type_name(&call.target_class)?;
            let op = mangle_method_name(&call.operation)?;
            match &call.guard {
                Some(guard) => {
                    let predicate = guard_method(guard)?;
                    body.push(format!("        if ({predicate}()) {{"));
                    body.push(format!("            {target}.{op}();"));
                    body.push("        }".to_string());
                }
                None => body.push(format!("        {target}.{op}();")),
            }
        }
        body.push("    }".to_string());
        private_methods.push(body);
    }

    for body in private_methods {
        lines.push(String::new());
        lines.extend(body);
    }
    for (name, raw) in &guards {
        lines.push(String::new());
        lines.push(format!("    private boolean {name}() {{"));
        lines.push(format!("        return false; // TODO: evaluate {raw:?}"));
        lines.push("    }".to_string());
    }
    lines.push("}".to_string());

    Ok(GeneratedUnit {
        file_name: format!("{}.aj", spec.name),
        kind: UnitKind::Aspect,
        text: lines.join("\n") + "\n",
    })
}

/// Emit the class skeleton for one functional, non-actor class: one public
/// method per distinct call message the class receives (the original
/// model's receive set, so absorbed operations keep their home), with
/// `Object` parameter placeholders named after the argument text.
///
/// Returns `Ok(None)` for actors and non-functional classes — they get no
/// class unit.
pub fn generate_class(
    class_name: &str,
    table: &MessageTable,
    concerns: &ConcernMap,
) -> Result<Option<GeneratedUnit>, CodegenError> {
    if concerns.is_actor(class_name) || concerns.classify(class_name) != ConcernType::Functional {
        return Ok(None);
    }
    let type_name = mangle_type_name(class_name)?;

    // distinct received call names, first-seen raw text and args
    let mut received: BTreeMap<String, (String, Vec<String>)> = BTreeMap::new();
    for row in &table.rows {
        if !row.is_call() || fold_name(&row.receiver_class) != fold_name(class_name) {
            continue;
        }
        received
            .entry(fold_name(&row.name))
            .or_insert_with(|| (row.name.trim().to_string(), row.args.clone()));
    }

    // mangle and detect collisions between distinct message names
    let mut methods: BTreeMap<String, (String, Vec<String>)> = BTreeMap::new();
    for (raw, args) in received.into_values() {
        let method = mangle_method_name(&raw)?;
        if let Some((first_raw, _)) = methods.get(&method) {
            return Err(CodegenError::NameCollision {
                first: first_raw.clone(),
                second: raw,
                mangled: method,
            });
        }
        methods.insert(method, (raw, args));
    }

    let mut lines: Vec<String> = Vec::new();
    lines.push(format!("public class {type_name} {{"));
    for (method, (_, args)) in &methods {
        let mut params: Vec<String> = Vec::new();
        let mut seen = BTreeMap::new();
        for (i, arg) in args.iter().enumerate() {
            let ident = match mangle_method_name(arg) {
                Ok(ident) if seen.insert(ident.clone(), ()).is_none() => ident,
                _ => format!("arg{i}"),
            };
            params.push(format!("Object {ident}"));
        }
        lines.push(String::new());
        lines.push(format!("    public void {method}({}) {{", params.join(", ")));
        lines.push("    }".to_string());
    }
    lines.push("}".to_string());

    Ok(Some(GeneratedUnit {
        file_name: format!("{type_name}.java"),
        kind: UnitKind::Class,
        text: lines.join("\n") + "\n",
    }))
}

/// Generate every unit for a transformed model: one aspect per
/// [`AspectSpec`], one class per functional non-actor class of the
/// original table, and the manifest. Classes that yield no unit (actors,
/// unresolved placeholders, non-functional classes that were not
/// aspectized) are reported as warnings.
pub fn generate_all(
    table: &MessageTable,
    aod: &AodModel,
    concerns: &ConcernMap,
    extensions: &FileExtensions,
) -> Result<CodegenOutput, CodegenError> {
    let mut diagnostics = Vec::new();
    let mut units: Vec<GeneratedUnit> = Vec::new();

    let mut aspects: Vec<&AspectSpec> = aod.aspects.iter().collect();
    aspects.sort_by(|a, b| a.name.cmp(&b.name));
    for spec in aspects {
        let mut unit = generate_aspect(spec)?;
        unit.file_name = format!("aspects/{}.{}", spec.name, extensions.aspect);
        units.push(unit);
    }

    // distinct classes of the original model, first-seen display casing
    let mut classes: BTreeMap<String, String> = BTreeMap::new();
    for row in &table.rows {
        for class in [&row.sender_class, &row.receiver_class] {
            classes
                .entry(fold_name(class))
                .or_insert_with(|| class.trim().to_string());
        }
    }
    let aspectized: Vec<String> = aod
        .aspects
        .iter()
        .map(|a| fold_name(&a.source_class))
        .collect();
    for (folded, display) in &classes {
        if display == UNRESOLVED {
            diagnostics.push(Diagnostic::warning(
                "an unresolved participant placeholder appears in the model; no unit generated"
                    .to_string(),
            ));
            continue;
        }
        match generate_class(display, table, concerns)? {
            Some(mut unit) => {
                unit.file_name = format!(
                    "classes/{}.{}",
                    mangle_type_name(display)?,
                    extensions.class
                );
                units.push(unit);
            }
            None => {
                if concerns.is_actor(display) {
                    diagnostics.push(Diagnostic::warning(format!(
                        "class {display:?} is an actor; no unit generated"
                    )));
                } else if !aspectized.contains(folded) {
                    diagnostics.push(Diagnostic::warning(format!(
                        "class {display:?} is non-functional but was not aspectized; \
                         no unit generated"
                    )));
                }
            }
        }
    }

    // aspects come first, then classes; each group sorted by file name
    units.sort_by_key(|u| (u.kind == UnitKind::Class, u.file_name.clone()));
    for pair in units.windows(2) {
        if pair[0].file_name == pair[1].file_name {
            return Err(CodegenError::NameCollision {
                first: pair[0].file_name.clone(),
                second: pair[1].file_name.clone(),
                mangled: pair[0].file_name.clone(),
            });
        }
    }
    // a class and an aspect may still collide across directories only if
    // extensions are forced equal and directories merged externally; the
    // in-tree layout keeps them apart

    let manifest = Manifest {
        units: units
            .iter()
            .map(|u| ManifestEntry {
                file_name: u.file_name.clone(),
                kind: u.kind,
                sha256: content_digest(&u.text),
            })
            .collect(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail")
        + "\n";

    Ok(CodegenOutput {
        units,
        manifest_json,
        diagnostics,
    })
}
