use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specogram::diag::has_errors;
use specogram::views::{self, GeneratedArtifact};
use specogram::{
    check_against_model, format_specogram, parse_domain_model, parse_specogram_partial, Diagnostic,
    EmitOptions, Specification, ViewKind,
};

/// Check, format and generate views from specogram files.
#[derive(Debug, Parser)]
#[command(name = "specogram", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report diagnostics for a specification.
    Check(CheckArgs),
    /// Generate views from a specification.
    Gen(GenArgs),
    /// Rewrite a specification in canonical layout.
    Fmt(FmtArgs),
}

#[derive(Debug, Args)]
struct CheckArgs {
    file: PathBuf,
    /// Domain model to check feature references against.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    check: CheckArgs,
    /// Views to emit.
    #[arg(long, value_delimiter = ',', default_value = "latex,puts")]
    views: Vec<ViewKind>,
    /// Emit `modify` frame clauses in the seamless requirements.
    #[arg(long)]
    frames: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FmtArgs {
    file: PathBuf,
    /// Rewrite the file in place.
    #[arg(long, conflicts_with = "check")]
    write: bool,
    /// Fail when the file is not canonically formatted.
    #[arg(long)]
    check: bool,
}

/// How a command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Diagnostics,
    Failure,
}

impl From<Status> for ExitCode {
    fn from(status: Status) -> Self {
        ExitCode::from(match status {
            Status::Ok => 0,
            Status::Diagnostics => 1,
            Status::Failure => 2,
        })
    }
}

struct IoFailure {
    path: PathBuf,
    error: io::Error,
}

impl IoFailure {
    fn report(&self) -> Status {
        eprintln!("specogram: {}: {}", self.path.display(), self.error);
        Status::Failure
    }
}

fn read(path: &Path) -> Result<String, IoFailure> {
    fs::read_to_string(path).map_err(|error| IoFailure {
        path: path.to_owned(),
        error,
    })
}

fn report(diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{d}");
    }
}

/// Parses the specification and checks it against the model, if any.
fn load(args: &CheckArgs) -> Result<(Option<Specification>, Vec<Diagnostic>), IoFailure> {
    let text = read(&args.file)?;
    let model_text = args.model.as_deref().map(read).transpose()?;
    let parsed = parse_specogram_partial(&text, &args.file);
    let mut diagnostics = parsed.diagnostics;
    if let (Some(spec), Some(model_text), Some(model_path)) = (&parsed.spec, model_text, &args.model) {
        match parse_domain_model(&model_text, model_path) {
            Ok(model) => diagnostics.extend(check_against_model(spec, &model, &parsed.source_map)),
            Err(model_diags) => diagnostics.extend(model_diags),
        }
    }
    Ok((parsed.spec, diagnostics))
}

fn check(args: &CheckArgs) -> Status {
    match load(args) {
        Ok((_, diagnostics)) => {
            report(&diagnostics);
            if has_errors(&diagnostics) {
                Status::Diagnostics
            } else {
                Status::Ok
            }
        }
        Err(e) => e.report(),
    }
}

/// Writes every artifact or none: files are staged under temporary names
/// and renamed once all of them are on disk.
fn write_all(artifacts: &[GeneratedArtifact], dir: &Path) -> Result<Vec<PathBuf>, IoFailure> {
    let fail = |path: &Path| {
        let path = path.to_owned();
        move |error| IoFailure { path, error }
    };
    fs::create_dir_all(dir).map_err(fail(dir))?;
    let mut staged = Vec::new();
    let result = (|| {
        for a in artifacts {
            let target = dir.join(&a.relative_path);
            let tmp = dir.join(format!(".{}.tmp", a.relative_path.display()));
            fs::write(&tmp, &a.content).map_err(fail(&tmp))?;
            staged.push((tmp, target));
        }
        Ok(())
    })();
    if let Err(e) = result {
        for (tmp, _) in &staged {
            let _ = fs::remove_file(tmp);
        }
        return Err(e);
    }
    let mut written = Vec::new();
    for (tmp, target) in staged {
        fs::rename(&tmp, &target).map_err(fail(&target))?;
        written.push(target);
    }
    Ok(written)
}

fn gen(args: &GenArgs) -> Status {
    let (spec, diagnostics) = match load(&args.check) {
        Ok(loaded) => loaded,
        Err(e) => return e.report(),
    };
    report(&diagnostics);
    let spec = match spec {
        Some(spec) if !has_errors(&diagnostics) => spec,
        _ => return Status::Diagnostics,
    };
    let options = match EmitOptions::new(args.views.iter().copied()) {
        Ok(options) => options.with_frames(args.frames).with_output_dir(&args.out),
        Err(e) => {
            eprintln!("specogram: {e}");
            return Status::Failure;
        }
    };
    let artifacts = views::generate(&spec, &options);
    match write_all(&artifacts, &options.output_dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            Status::Ok
        }
        Err(e) => e.report(),
    }
}

fn fmt(args: &FmtArgs) -> Status {
    let text = match read(&args.file) {
        Ok(text) => text,
        Err(e) => return e.report(),
    };
    let parsed = parse_specogram_partial(&text, &args.file);
    report(&parsed.diagnostics);
    let spec = match parsed.spec {
        Some(spec) if !has_errors(&parsed.diagnostics) => spec,
        _ => return Status::Diagnostics,
    };
    let formatted = format_specogram(&spec);
    if args.check {
        if formatted == text {
            Status::Ok
        } else {
            eprintln!("{}: not canonically formatted", args.file.display());
            Status::Diagnostics
        }
    } else if args.write {
        if formatted != text {
            if let Err(error) = fs::write(&args.file, formatted) {
                return IoFailure {
                    path: args.file.clone(),
                    error,
                }
                .report();
            }
        }
        Status::Ok
    } else {
        print!("{formatted}");
        Status::Ok
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Check(args) => check(args),
        Command::Gen(args) => gen(args),
        Command::Fmt(args) => fmt(args),
    }
    .into()
}
