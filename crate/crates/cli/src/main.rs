use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use com2match_core::correspondence::{
    check_references, link_view, parse_correspondence, serialize_correspondence, Confidence,
    LinkView, WModel,
};
use com2match_core::engine::{compare_models, export_document, CompareConfig};
use com2match_core::model::{
    parse_model, parse_model_unchecked, validate_model, Model, ModelIndex,
};
use com2match_core::resources::{load_ontology, parse_tsv_pairs, Lexicon, Ontology, Resources};

#[derive(Parser)]
#[command(
    name = "com2match",
    version,
    about = "Compare UML class-diagram models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two models and write the correspondence document.
    Compare {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[arg(long)]
        synonyms: Option<PathBuf>,
        #[arg(long)]
        abbrev: Option<PathBuf>,
        #[arg(long)]
        acronyms: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides localCoverage from the COM2MATCH_CONFIG file.
        #[arg(long)]
        local_coverage: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Validate a model, ontology, lexicon or correspondence file.
    Check {
        file: PathBuf,
        /// Models used to resolve correspondence references.
        #[arg(long)]
        left: Option<PathBuf>,
        #[arg(long)]
        right: Option<PathBuf>,
    },
    /// Write the validated links and the unmatched-elements report.
    Export {
        #[arg(long)]
        corr: PathBuf,
        #[arg(long)]
        left: Option<PathBuf>,
        #[arg(long)]
        right: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail with exit code 3 while any link is still pending.
        #[arg(long)]
        require_complete: bool,
    },
    /// Run the review service.
    Serve {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

enum Failure {
    Internal(String),
    Input(String),
    Policy(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Policy(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Internal(m) | Failure::Input(m) | Failure::Policy(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text)
        .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_config(local_coverage: Option<f64>) -> Result<CompareConfig, Failure> {
    let mut cfg = match std::env::var_os("COM2MATCH_CONFIG") {
        Some(p) => {
            let path = PathBuf::from(p);
            CompareConfig::from_json(&read(&path)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        None => CompareConfig::default(),
    };
    if let Some(c) = local_coverage {
        cfg.local_coverage = c;
    }
    cfg.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(cfg)
}

fn optional_text(path: &Option<PathBuf>) -> Result<String, Failure> {
    path.as_deref().map_or(Ok(String::new()), read)
}

const COLUMNS: [&str; 7] = [
    "M1",
    "M2",
    "Syn or Sem",
    "Explanation",
    "Global",
    "Local",
    "Level",
];

fn row(v: &LinkView) -> [String; 7] {
    [
        v.left_name.clone(),
        v.right_name.clone(),
        v.syn_or_sem.clone(),
        v.explanation.clone(),
        v.global.clone(),
        v.local.clone(),
        if v.homonym {
            format!("{} (homonym)", v.level)
        } else {
            v.level.clone()
        },
    ]
}

/// Three tables, sure first, in the column layout of the review screens.
fn summary(wm: &WModel, left: &Model, right: &Model) -> String {
    let (li, ri) = (ModelIndex::new(left), ModelIndex::new(right));
    let views: Vec<LinkView> = wm.links.iter().map(|l| link_view(l, &li, &ri)).collect();
    let mut out = String::new();
    for (title, confidence) in [
        ("Sure mapping", Confidence::Sure),
        ("Moderately sure mapping", Confidence::ModeratelySure),
        ("Improbable mapping", Confidence::Improbable),
    ] {
        let rows: Vec<[String; 7]> = views
            .iter()
            .filter(|v| v.confidence == confidence)
            .map(row)
            .collect();
        out.push_str(&format!("{title} ({})\n", rows.len()));
        let mut widths = COLUMNS.map(str::len);
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            format!("  {}\n", padded.join("  ").trim_end())
        };
        out.push_str(&line(&COLUMNS.map(String::from)));
        for r in &rows {
            out.push_str(&line(r));
        }
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run_compare(
    left: &Path,
    right: &Path,
    ontology: &Option<PathBuf>,
    synonyms: &Option<PathBuf>,
    abbrev: &Option<PathBuf>,
    acronyms: &Option<PathBuf>,
    out: &Option<PathBuf>,
    local_coverage: Option<f64>,
    format: Format,
) -> Outcome {
    let cfg = load_config(local_coverage)?;
    let (m1, m2) = (load_model(left)?, load_model(right)?);
    let onto = match ontology {
        Some(p) => {
            load_ontology(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        None => Ontology::empty(),
    };
    let lex = Lexicon::load(
        &optional_text(synonyms)?,
        &optional_text(abbrev)?,
        &optional_text(acronyms)?,
    )
    .map_err(|e| Failure::Input(e.to_string()))?;
    let res = Resources::new(onto, lex);
    let mut wm = compare_models(&m1, &m2, &res, &cfg).map_err(|e| Failure::Input(e.to_string()))?;
    wm.left.location = left.display().to_string();
    wm.right.location = right.display().to_string();
    let doc = serialize_correspondence(&wm);
    if let Some(path) = out {
        write(path, &doc)?;
    }
    match format {
        Format::Json => print!("{doc}"),
        Format::Text => print!("{}", summary(&wm, &m1, &m2)),
    }
    Ok(())
}

enum FileKind {
    Model,
    Ontology,
    Correspondence,
    Lexicon,
}

fn detect(path: &Path, text: &str) -> Result<FileKind, Failure> {
    if path.extension().is_some_and(|e| e == "tsv") {
        return Ok(FileKind::Lexicon);
    }
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(if value.get("links").is_some() {
        FileKind::Correspondence
    } else if value.get("classes").is_some() {
        FileKind::Model
    } else {
        FileKind::Ontology
    })
}

/// Reads the models a correspondence refers to: explicit paths, else its recorded locations.
fn referenced_models(
    wm: &WModel,
    left: &Option<PathBuf>,
    right: &Option<PathBuf>,
) -> Result<Option<(Model, Model)>, Failure> {
    let pick = |flag: &Option<PathBuf>, location: &str| {
        flag.clone()
            .or_else(|| Some(PathBuf::from(location)).filter(|p| p.is_file()))
    };
    match (
        pick(left, &wm.left.location),
        pick(right, &wm.right.location),
    ) {
        (Some(l), Some(r)) => Ok(Some((load_model(&l)?, load_model(&r)?))),
        _ => Ok(None),
    }
}

fn run_check(file: &Path, left: &Option<PathBuf>, right: &Option<PathBuf>) -> Outcome {
    let text = read(file)?;
    let name = file.display();
    let input = |e: &dyn std::fmt::Display| Failure::Input(format!("{name}: {e}"));
    match detect(file, &text)? {
        FileKind::Lexicon => {
            parse_tsv_pairs(&text).map_err(|e| input(&e))?;
        }
        FileKind::Ontology => {
            load_ontology(&text).map_err(|e| input(&e))?;
        }
        FileKind::Model => {
            let model = parse_model_unchecked(&text).map_err(|e| input(&e))?;
            let violations = validate_model(&model);
            if !violations.is_empty() {
                for v in &violations {
                    println!("{}: {}", v.element_id, v.message);
                }
                return Err(Failure::Input(format!(
                    "{name}: {} violation(s)",
                    violations.len()
                )));
            }
        }
        FileKind::Correspondence => {
            let wm = parse_correspondence(&text).map_err(|e| input(&e))?;
            match referenced_models(&wm, left, right)? {
                Some((m1, m2)) => check_references(&wm, &m1, &m2).map_err(|e| {
                    println!("{e}");
                    input(&e)
                })?,
                None => {
                    eprintln!("note: referenced models not found, element references not checked")
                }
            }
        }
    }
    println!("ok: {name}");
    Ok(())
}

fn run_export(
    corr: &Path,
    left: &Option<PathBuf>,
    right: &Option<PathBuf>,
    out: &Option<PathBuf>,
    require_complete: bool,
) -> Outcome {
    let wm = parse_correspondence(&read(corr)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", corr.display())))?;
    let (m1, m2) = referenced_models(&wm, left, right)?.ok_or_else(|| {
        Failure::Input("cannot locate the compared models; pass --left and --right".into())
    })?;
    let doc = export_document(&wm, &m1, &m2).map_err(|e| Failure::Input(e.to_string()))?;
    if require_complete && doc.pending > 0 {
        return Err(Failure::Policy(format!(
            "{} link(s) still pending",
            doc.pending
        )));
    }
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| Failure::Internal(e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_serve(data_dir: &Path, addr: &str, ui_dir: Option<&Path>) -> Outcome {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Internal(e.to_string()))?;
    runtime
        .block_on(com2match_service::serve(addr, data_dir, ui_dir))
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compare {
            left,
            right,
            ontology,
            synonyms,
            abbrev,
            acronyms,
            out,
            local_coverage,
            format,
        } => run_compare(
            left,
            right,
            ontology,
            synonyms,
            abbrev,
            acronyms,
            out,
            *local_coverage,
            *format,
        ),
        Command::Check { file, left, right } => run_check(file, left, right),
        Command::Export {
            corr,
            left,
            right,
            out,
            require_complete,
        } => run_export(corr, left, right, out, *require_complete),
        Command::Serve {
            data_dir,
            addr,
            ui_dir,
        } => run_serve(data_dir, addr, ui_dir.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
