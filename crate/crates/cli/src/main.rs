use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use atlas_core::analytics::{
    map_matrix, render_map, stage_table, stage_table_csv, stage_table_text,
};
use atlas_core::compose::check_sequence;
use atlas_core::registry::{
    has_errors, load_registry, save_registry, validate_record, Registry, RegistryStore,
};
use atlas_core::taxonomy::{parse_classification, ParseError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "atlas",
    version,
    about = "Validate, analyse and serve an AI tool registry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every record; exits 1 if any has errors.
    Validate { file: PathBuf },
    /// Per-stage tool counts by inference mode and deployment.
    Stats {
        file: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Print a descriptor in canonical form.
    Parse { descriptor: String },
    /// Can the outputs of `a` feed the inputs of `b`? Exits 1 if not.
    CheckSeq {
        a: String,
        b: String,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// The tool map for one stage, as JSON or SVG.
    Map {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        stage: u8,
        /// Write SVG here instead of printing JSON; `-` for stdout.
        #[arg(long, value_name = "OUT")]
        svg: Option<PathBuf>,
    },
    /// Write the registry in canonical JSON, or its live tools as CSV.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
    },
    /// Run the HTTP API. The moderator token comes from ATLAS_MODERATOR_TOKEN.
    Serve {
        file: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static files served next to the API.
        #[arg(long = "static", value_name = "DIR")]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<Registry> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    load_registry(&text).with_context(|| format!("{}", path.display()))
}

fn parse(descriptor: &str) -> Result<atlas_core::Classification> {
    parse_classification(descriptor).map_err(|e| anyhow::anyhow!(pointer(descriptor, &e)))
}

/// The error message with a caret under the offending byte.
fn pointer(source: &str, e: &ParseError) -> String {
    match e.position() {
        Some(pos) => {
            let column = source[..pos.min(source.len())].chars().count();
            format!("{e}\n  {source}\n  {}^", " ".repeat(column))
        }
        None => e.to_string(),
    }
}

fn run(command: Command) -> Result<ExitCode> {
    let mut out = std::io::stdout().lock();
    match command {
        Command::Validate { file } => {
            let registry = load(&file)?;
            let (mut errors, mut warnings) = (0, 0);
            for tool in registry.tools() {
                for issue in validate_record(tool) {
                    if issue.is_error() {
                        errors += 1;
                    } else {
                        warnings += 1;
                    }
                    eprintln!("{}: {issue}", tool.id);
                }
            }
            writeln!(
                out,
                "{} tools, {errors} errors, {warnings} warnings",
                registry.len()
            )?;
            return Ok(if errors == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
        Command::Stats { file, csv } => {
            let rows = stage_table(&load(&file)?);
            let text = if csv {
                stage_table_csv(&rows)
            } else {
                stage_table_text(&rows)
            };
            out.write_all(text.as_bytes())?;
        }
        Command::Parse { descriptor } => {
            writeln!(out, "{}", parse(&descriptor)?)?;
        }
        Command::CheckSeq { a, b, json } => {
            let report = check_sequence(&parse(&a)?, &parse(&b)?)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                let verdict = if report.compatible {
                    "compatible"
                } else {
                    "incompatible"
                };
                let residual: Vec<String> =
                    report.residual.iter().map(ToString::to_string).collect();
                writeln!(out, "{verdict}")?;
                writeln!(out, "residual: {}", residual.join(", "))?;
            }
            return Ok(if report.compatible {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
        Command::Map { file, stage, svg } => {
            let matrix = map_matrix(&load(&file)?, stage)?;
            match svg {
                None => writeln!(out, "{}", serde_json::to_string_pretty(&matrix)?)?,
                Some(path) if path.as_os_str() == "-" => {
                    out.write_all(render_map(&matrix).as_bytes())?
                }
                Some(path) => std::fs::write(&path, render_map(&matrix))
                    .with_context(|| format!("cannot write {}", path.display()))?,
            }
        }
        Command::Export { file, format } => {
            let registry = load(&file)?;
            match format {
                ExportFormat::Json => out.write_all(save_registry(&registry).as_bytes())?,
                ExportFormat::Csv => export_csv(&registry, &mut out)?,
            }
        }
        Command::Serve {
            file,
            port,
            static_dir,
        } => {
            let store = RegistryStore::open(&file)?;
            let token = std::env::var(atlas_service::TOKEN_ENV)
                .ok()
                .filter(|t| !t.is_empty());
            if token.is_none() {
                eprintln!(
                    "warning: {} is not set; moderation endpoints will refuse all calls",
                    atlas_service::TOKEN_ENV
                );
            }
            let app = atlas_service::router(atlas_service::AppState { store, token }, static_dir);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let (listener, addr) = atlas_service::bind(port).await?;
                writeln!(out, "listening on http://{addr}")?;
                out.flush()?;
                drop(out);
                atlas_service::serve(listener, app).await?;
                anyhow::Ok(())
            })?;
            return Ok(ExitCode::SUCCESS);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn export_csv(registry: &Registry, out: &mut impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "name",
        "purpose",
        "development_type",
        "overall_deployment",
        "cj_stages",
        "descriptors",
        "valid",
    ])?;
    for tool in registry.tools() {
        let stages: Vec<String> = tool.cj_stages.iter().map(u8::to_string).collect();
        let descriptors: Vec<String> = tool
            .capabilities
            .iter()
            .map(|c| c.classification.to_string())
            .collect();
        let valid = !has_errors(&validate_record(tool));
        w.write_record([
            tool.id.as_str(),
            &tool.name,
            &tool.purpose,
            tool.development_type.slug(),
            tool.overall_deployment().slug(),
            &stages.join(";"),
            &descriptors.join("; "),
            if valid { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}
