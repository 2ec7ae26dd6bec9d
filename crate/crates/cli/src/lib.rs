//! Command-line driver: `check`, `graph`, `stubs` and `simulate`.
//!
//! Exit codes: 0 on success, 1 when the inputs have diagnostics or the
//! simulation fails, 2 on I/O and usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use psc_core::codegen::{emit_manifest, emit_stubs, file_stem};
use psc_core::logic::{pack_for_protocol, register_pack};
use psc_core::simulator::RunError;
use psc_core::{
    build_automaton, load_scenario, parse_protocol, run_scenario, validate, Diagnostic, Mode, ProtocolDecl,
};

pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "psc", version, about = "Protocol compiler and contract simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a protocol.
    Check { protocol: PathBuf },
    /// Print the protocol's automaton.
    Graph {
        protocol: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate handler stubs and the contract manifest.
    Stubs {
        protocol: PathBuf,
        /// Directory for `<name>_logic.rs` and `<name>.manifest`; without it
        /// both go to stdout, the manifest as trailing comments.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a scenario against the protocol.
    Simulate {
        protocol: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Business logic pack; inferred from the protocol name if omitted.
        #[arg(long)]
        pack: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Dump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Guarded,
    Unguarded,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Guarded => Mode::Guarded,
            ModeArg::Unguarded => Mode::Unguarded,
        }
    }
}

/// A failed command: what to print on stderr and the exit code.
struct Failure {
    code: i32,
    lines: Vec<String>,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: EXIT_IO, lines: vec![format!("{}: {}", path.display(), e)] }
    }

    fn diags(file: &Path, diags: &[Diagnostic]) -> Self {
        let name = file.display().to_string();
        Failure { code: EXIT_DIAGNOSTICS, lines: diags.iter().map(|d| d.render(&name)).collect() }
    }

    fn msg(code: i32, msg: String) -> Self {
        Failure { code, lines: vec![msg] }
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{}", text);
                EXIT_IO
            } else {
                let _ = write!(out, "{}", text);
                0
            };
        }
    };
    let result = match cli.command {
        Command::Check { protocol } => check(&protocol, out),
        Command::Graph { protocol, format, output } => graph(&protocol, format, output.as_deref(), out),
        Command::Stubs { protocol, output } => stubs(&protocol, output.as_deref(), out),
        Command::Simulate { protocol, scenario, mode, pack } => {
            simulate(&protocol, &scenario, mode.map(Mode::from), pack.as_deref(), out)
        }
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            for line in f.lines {
                let _ = writeln!(err, "{}", line);
            }
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// Parsed and validated protocol.
fn load_protocol(path: &Path) -> Result<ProtocolDecl, Failure> {
    let src = read(path)?;
    let decl = parse_protocol(&src).map_err(|d| Failure::diags(path, &d))?;
    let diags = validate(&decl);
    if diags.is_empty() {
        Ok(decl)
    } else {
        Err(Failure::diags(path, &diags))
    }
}

fn check(path: &Path, out: &mut dyn Write) -> CmdResult {
    let decl = load_protocol(path)?;
    let a = build_automaton(&decl);
    emit(
        out,
        &format!(
            "{}: protocol {} ok, {} states, {} transitions\n",
            path.display(),
            decl.name.node,
            a.state_count,
            a.transitions.len()
        ),
    )
}

fn graph(path: &Path, format: GraphFormat, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let a = build_automaton(&load_protocol(path)?);
    let text = match format {
        GraphFormat::Dot => a.to_dot(),
        GraphFormat::Dump => a.to_dump(),
    };
    match output {
        Some(p) => write_file(p, &text),
        None => emit(out, &text),
    }
}

fn stubs(path: &Path, output: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let decl = load_protocol(path)?;
    let stubs = emit_stubs(&decl);
    let manifest = emit_manifest(&decl, &build_automaton(&decl));
    match output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            let stem = file_stem(&decl.name.node);
            let logic = dir.join(format!("{}_logic.rs", stem));
            let manifest_path = dir.join(format!("{}.manifest", stem));
            write_file(&logic, &stubs.source)?;
            write_file(&manifest_path, &manifest)?;
            emit(
                out,
                &format!(
                    "wrote {} ({} stubs, {} lines) and {}\n",
                    logic.display(),
                    stubs.stubs.len(),
                    stubs.loc(),
                    manifest_path.display()
                ),
            )
        }
        None => {
            let mut text = stubs.source;
            text.push_str("\n// Manifest:\n");
            for line in manifest.lines() {
                text.push_str("// ");
                text.push_str(line);
                text.push('\n');
            }
            emit(out, &text)
        }
    }
}

fn simulate(
    protocol: &Path,
    scenario_path: &Path,
    mode: Option<Mode>,
    pack: Option<&str>,
    out: &mut dyn Write,
) -> CmdResult {
    let decl = load_protocol(protocol)?;
    let scenario = load_scenario(&read(scenario_path)?).map_err(|d| Failure::diags(scenario_path, &d))?;
    let pack = match pack {
        Some(p) => p,
        None => pack_for_protocol(&decl.name.node).ok_or_else(|| {
            Failure::msg(
                EXIT_DIAGNOSTICS,
                format!("no built-in logic for protocol {}; choose one with --pack", decl.name.node),
            )
        })?,
    };
    let handlers = register_pack(pack).map_err(|e| Failure::msg(EXIT_DIAGNOSTICS, e.to_string()))?;
    let run = run_scenario(&decl, &handlers, &scenario, mode).map_err(|e| match e {
        RunError::Protocol(d) => Failure::diags(protocol, &d),
        RunError::Scenario(d) => Failure::diags(scenario_path, &d),
        RunError::Sim(e) => Failure::msg(EXIT_DIAGNOSTICS, format!("simulation failed: {}", e)),
    })?;
    emit(out, &run.log)
}
