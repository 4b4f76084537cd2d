//! Command-line front end: extract, generate, evolve, simulate, analyze,
//! render and compare.

pub mod commands;
pub mod config;
pub mod stats;

use std::io::Write;

use clap::{ArgAction, Parser, Subcommand};
use levelgan::{Error, Result};

use commands::*;

#[derive(Parser, Debug)]
#[command(name = "levelgan", version, about = "Mega Man level generation toolkit")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract typed training segments from an annotated corpus.
    Extract(ExtractArgs),
    /// Build one level from a genome and export it.
    Generate(GenerateArgs),
    /// Evolve levels with NSGA-II and write run manifests.
    Evolve(EvolveArgs),
    /// Report A* path length and connectivity of a level.
    Simulate(SimulateArgs),
    /// Novelty and distinct-segment statistics.
    Analyze(AnalyzeArgs),
    /// Render a level to PNG.
    Render(RenderArgs),
    /// Compare champion path lengths of two groups of runs.
    Compare(CompareArgs),
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Extract(a) => emit(out, &extract(a)?.render()),
        Command::Generate(a) => {
            let s = generate(a)?;
            emit(out, &(serde_json::to_string_pretty(&s).unwrap() + "\n"))
        }
        Command::Evolve(a) => {
            for r in evolve(a)? {
                emit(
                    out,
                    &format!(
                        "seed {}: final max path {} ({:.2}s) -> {}\n",
                        r.seed,
                        r.final_max_path,
                        r.seconds,
                        r.manifest.display()
                    ),
                )?;
            }
            Ok(())
        }
        Command::Simulate(a) => {
            let r = simulate(a)?;
            emit(out, &(serde_json::to_string_pretty(&r).unwrap() + "\n"))
        }
        Command::Analyze(a) => {
            let r = analyze(a)?;
            let mut text = r.summary_csv() + "\n" + &r.distinct_csv();
            if !r.corners.is_empty() {
                text += "\n";
                text += &r.corners_csv();
            }
            for n in &r.notes {
                text += &format!("note: {n}\n");
            }
            emit(out, &text)
        }
        Command::Render(a) => {
            let path = a.out.clone();
            let r = render_cmd(a)?;
            emit(
                out,
                &format!("wrote {} ({}x{})\n", path.display(), r.width, r.height),
            )
        }
        Command::Compare(a) => {
            let c = compare(a)?;
            emit(out, &(c.csv() + "\n" + &c.summary()))
        }
    }
}

/// The single stderr line printed on failure: `error[<category>]: <message>`.
pub fn error_line(e: &Error) -> String {
    let msg = e.to_string().replace('\n', " ");
    format!("error[{}]: {msg}", e.category())
}
