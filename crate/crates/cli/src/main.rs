use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use varitri::commands::Mode;
use varitri::{run, Command, Options, ProblemFile};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Output {
    Json,
    Latex,
}

/// Symbolic calculus on jet spaces: Euler-Lagrange equations, conservation
/// laws, Koszul-Tate and BV constructions, bounded cohomology.
#[derive(Parser, Debug)]
#[command(name = "varitri", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Problem file (JSON).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    output: Output,
    #[arg(long)]
    max_jet: Option<u32>,
    #[arg(long)]
    max_deg: Option<u32>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Worker threads for matrix assembly and elimination.
    #[arg(long)]
    threads: Option<usize>,
}

fn fail(command: Command, msg: &str) -> ExitCode {
    let err = serde_json::json!({
        "tool": varitri::report::TOOL,
        "command": command.name(),
        "status": "error",
        "error": msg,
    });
    println!("{}", serde_json::to_string_pretty(&err).expect("serializes"));
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(args.command, &e.to_string());
        }
    }
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(args.command, &format!("{}: {e}", args.input.display())),
    };
    let problem = match ProblemFile::from_json(&text) {
        Ok(p) => p,
        Err(e) => return fail(args.command, &e.to_string()),
    };
    let opts = Options {
        max_jet: args.max_jet,
        max_deg: args.max_deg,
        depth: args.depth,
        mode: args.mode,
    };
    match run(args.command, &problem, &opts) {
        Ok(report) => {
            match args.output {
                Output::Json => print!("{}", report.render_json()),
                Output::Latex => print!("{}", report.render_latex()),
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => fail(args.command, &e.to_string()),
    }
}
