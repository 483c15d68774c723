//! Command-line front end: `inspect`, `analyze`, `transform`, `codegen`.
//!
//! Every artifact goes to standard output or to files under `--out`;
//! every diagnostic goes to standard error. Exit status 0 means success,
//! 1 a user error (missing file, bad config, unusable input), 2 an
//! internal consistency failure.

use crate::codegen::{generate_all, CodegenError, FileExtensions};
use crate::concerns::{ConfigError, ToolConfig};
use crate::crosscut::{annotate_repetitions, detect_aspect_candidates, repetition_counts};
use crate::metrics::{coupling_report, CouplingMode};
use crate::model::{build_message_table, MessageTable};
use crate::render::to_dot;
use crate::transform::{transform_model, TransformError};
use crate::xmi::{parse_xmi, XmiError};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "aodkit",
    version,
    about = "Detect crosscutting concerns in UML communication diagrams and refactor them into aspects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an XMI export and print the message table.
    Inspect {
        /// XMI 1.1 file holding the communication diagrams
        xmi: PathBuf,
        /// Concern configuration (TOML); optional — without it every class
        /// counts as functional
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Count call repetitions and report aspect candidates as JSON.
    Analyze {
        xmi: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Override the config threshold (minimum repetition count)
        #[arg(long)]
        threshold: Option<u32>,
    },
    /// Refactor into an aspect-oriented design: model JSON, coupling
    /// report, and DOT diagrams under --out.
    Transform {
        xmi: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output directory for aod_model.json, coupling.json and the
        /// per-diagram DOT files
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threshold: Option<u32>,
        /// How coupling is weighted in the report
        #[arg(long, value_enum, default_value_t = CouplingModeArg::DistinctClasses)]
        coupling: CouplingModeArg,
    },
    /// Generate aspect and class source skeletons plus a manifest under
    /// --out.
    Codegen {
        xmi: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Output directory for aspects/, classes/ and manifest.json
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threshold: Option<u32>,
        /// File extension for aspect units
        #[arg(long, default_value = "aj")]
        aspect_ext: String,
        /// File extension for class units
        #[arg(long, default_value = "java")]
        class_ext: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CouplingModeArg {
    /// Each distinct counterpart class counts once
    DistinctClasses,
    /// Every call message counts
    MessageCount,
}

impl From<CouplingModeArg> for CouplingMode {
    fn from(arg: CouplingModeArg) -> Self {
        match arg {
            CouplingModeArg::DistinctClasses => CouplingMode::DistinctClasses,
            CouplingModeArg::MessageCount => CouplingMode::MessageCount,
        }
    }
}

#[derive(Debug)]
enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::User(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<XmiError> for CliError {
    fn from(e: XmiError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<CodegenError> for CliError {
    fn from(e: CodegenError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::NoBaseRemains => CliError::User(e.to_string()),
            TransformError::CandidateWithoutRows(_) => CliError::Internal(e.to_string()),
        }
    }
}

/// Run the CLI against the given argv (including the program name);
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Inspect { xmi, config } => inspect(&xmi, config.as_deref()),
        Command::Analyze {
            xmi,
            config,
            threshold,
        } => analyze(&xmi, &config, threshold),
        Command::Transform {
            xmi,
            config,
            out,
            threshold,
            coupling,
        } => transform(&xmi, &config, &out, threshold, coupling.into()),
        Command::Codegen {
            xmi,
            config,
            out,
            threshold,
            aspect_ext,
            class_ext,
        } => codegen(&xmi, &config, &out, threshold, &aspect_ext, &class_ext),
    }
}

struct Loaded {
    config: ToolConfig,
    table: MessageTable,
}

fn load(
    xmi: &Path,
    config_path: Option<&Path>,
    threshold: Option<u32>,
) -> Result<Loaded, CliError> {
    let mut config = match config_path {
        Some(path) => {
            let doc = fs::read_to_string(path).map_err(|e| {
                CliError::User(format!("cannot read config {}: {e}", path.display()))
            })?;
            ToolConfig::from_toml_str(&doc)?
        }
        None => ToolConfig::default(),
    };
    if let Some(t) = threshold {
        config.threshold = t;
    }

    let file = fs::File::open(xmi)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", xmi.display())))?;
    let raw = parse_xmi(BufReader::new(file))?;
    for diagnostic in &raw.diagnostics {
        eprintln!("{diagnostic}");
    }
    let built = build_message_table(&raw, &config.concerns);
    for diagnostic in &built.diagnostics {
        eprintln!("{diagnostic}");
    }
    Ok(Loaded {
        config,
        table: annotate_repetitions(&built.table),
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::User(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, content)
        .map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display())))
}

/// Diagram names become file stems; path separators must not leak in.
fn file_stem(diagram: &str) -> String {
    diagram
        .chars()
        .map(|c| if std::path::is_separator(c) || c == '\0' { '_' } else { c })
        .collect()
}

fn inspect(xmi: &Path, config: Option<&Path>) -> Result<(), CliError> {
    let loaded = load(xmi, config, None)?;
    print!("{}", loaded.table.to_text_table());
    Ok(())
}

#[derive(Serialize)]
struct RepetitionRow {
    message: String,
    receiver_class: String,
    count: u32,
}

#[derive(Serialize)]
struct AnalyzeDocument {
    repetitions: Vec<RepetitionRow>,
    report: crate::crosscut::CandidateReport,
}

fn analyze(xmi: &Path, config: &Path, threshold: Option<u32>) -> Result<(), CliError> {
    let loaded = load(xmi, Some(config), threshold)?;
    let counts = repetition_counts(&loaded.table);
    let candidates =
        detect_aspect_candidates(&counts, &loaded.config.concerns, loaded.config.threshold)?;
    let document = AnalyzeDocument {
        repetitions: counts
            .iter()
            .map(|(key, count)| RepetitionRow {
                message: key.message_name.clone(),
                receiver_class: key.receiver_class.clone(),
                count: *count,
            })
            .collect(),
        report: candidates.report(),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&document).expect("report serialization cannot fail")
    );
    Ok(())
}

fn transform(
    xmi: &Path,
    config: &Path,
    out: &Path,
    threshold: Option<u32>,
    mode: CouplingMode,
) -> Result<(), CliError> {
    let loaded = load(xmi, Some(config), threshold)?;
    let counts = repetition_counts(&loaded.table);
    let candidates =
        detect_aspect_candidates(&counts, &loaded.config.concerns, loaded.config.threshold)?;
    let build = transform_model(&loaded.table, &candidates, loaded.config.advice_kind)?;
    for diagnostic in &build.diagnostics {
        eprintln!("{diagnostic}");
    }

    let model_json = serde_json::to_string_pretty(&build.model)
        .expect("model serialization cannot fail")
        + "\n";
    write_file(&out.join("aod_model.json"), &model_json)?;

    let report = coupling_report(&loaded.table, &build.model, mode);
    let report_json = serde_json::to_string_pretty(&report)
        .expect("report serialization cannot fail")
        + "\n";
    write_file(&out.join("coupling.json"), &report_json)?;

    let aspect_classes: Vec<String> = build
        .model
        .aspects
        .iter()
        .map(|a| a.source_class.clone())
        .collect();
    for diagram in loaded.table.diagram_names() {
        let stem = file_stem(diagram);
        let ood_rows: Vec<_> = loaded
            .table
            .diagram_rows(diagram)
            .into_iter()
            .cloned()
            .collect();
        write_file(
            &out.join(format!("{stem}__ood.dot")),
            &to_dot(diagram, &ood_rows, &[]),
        )?;
        let aod_rows: Vec<_> = build
            .model
            .base_messages
            .diagram_rows(diagram)
            .into_iter()
            .cloned()
            .collect();
        write_file(
            &out.join(format!("{stem}__aod.dot")),
            &to_dot(diagram, &aod_rows, &aspect_classes),
        )?;
    }

    print!("{}", report.to_text_table());
    Ok(())
}

fn codegen(
    xmi: &Path,
    config: &Path,
    out: &Path,
    threshold: Option<u32>,
    aspect_ext: &str,
    class_ext: &str,
) -> Result<(), CliError> {
    let loaded = load(xmi, Some(config), threshold)?;
    let counts = repetition_counts(&loaded.table);
    let candidates =
        detect_aspect_candidates(&counts, &loaded.config.concerns, loaded.config.threshold)?;
    let build = transform_model(&loaded.table, &candidates, loaded.config.advice_kind)?;
    for diagnostic in &build.diagnostics {
        eprintln!("{diagnostic}");
    }
    let extensions = FileExtensions {
        aspect: aspect_ext.to_string(),
        class: class_ext.to_string(),
    };
    let output = generate_all(&loaded.table, &build.model, &loaded.config.concerns, &extensions)?;
    for diagnostic in &output.diagnostics {
        eprintln!("{diagnostic}");
    }
    for unit in &output.units {
        write_file(&out.join(&unit.file_name), &unit.text)?;
    }
    write_file(&out.join("manifest.json"), &output.manifest_json)?;
    eprintln!(
        "wrote {} units and manifest.json to {}",
        output.units.len(),
        out.display()
    );
    Ok(())
}
