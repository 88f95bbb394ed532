//! Command-line front end: opacity checks, meta-strategy synthesis,
//! simulation against the region oracle, DOT exports and the Minsky
//! machine generator.
//!
//! Exit codes: 0 SAT/OK/true, 1 UNSAT/NOT-OK/false, 2 INDETERMINATE,
//! 64 input error, 70 internal failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use etopaq::belief::{BeliefLabel, Beliefs};
use etopaq::dot::{beliefs_dot, game_dot, regions_dot};
use etopaq::format::{parse_ta, print_ta};
use etopaq::game::{
    check_exists, check_metastrategy, explore_game, solve, witness_to_metastrategy, Exploration,
    Mode, SolveOptions, Verdict,
};
use etopaq::minsky::{encode, structural_check, MinskyMachine};
use etopaq::msf::{parse_msf, print_msf};
use etopaq::oracle::oracle_buckets;
use etopaq::region::RegionSpace;
use etopaq::strategy::{encountered_beliefs, MetaStrategy};

const EXIT_INPUT: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "etopaq",
    version,
    about = "Execution-time opacity for timed automata"
)]
struct Cli {
    /// Worker threads for game exploration.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckMode {
    Full,
    Weak,
    Exists,
    Almost,
    Closed,
}

impl CheckMode {
    fn game_mode(self) -> Option<Mode> {
        match self {
            CheckMode::Full => Some(Mode::Full),
            CheckMode::Weak => Some(Mode::Weak),
            CheckMode::Almost => Some(Mode::Almost),
            CheckMode::Closed => Some(Mode::Closed),
            CheckMode::Exists => None,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide controllability, or check a given meta-strategy.
    Check {
        ta: PathBuf,
        #[arg(long, value_enum)]
        mode: CheckMode,
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Write a winning meta-strategy, if one exists.
    Synthesize {
        ta: PathBuf,
        #[arg(long, value_enum)]
        mode: CheckMode,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the per-bucket private/public table computed on regions.
    Simulate {
        ta: PathBuf,
        #[arg(long)]
        strategy: Option<PathBuf>,
    },
    /// Export the reachable region graph.
    Regions {
        ta: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Export the belief automaton.
    Beliefs {
        ta: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        /// Name beliefs b0, b0', b(0,1), ... instead of listing regions.
        #[arg(long)]
        pretty: bool,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Export the explored opacity game.
    Game {
        ta: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        #[arg(long, value_enum, default_value = "full")]
        mode: CheckMode,
    },
    /// Compile a two-counter machine into a timed automaton.
    GenMinsky {
        machine: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Keep the literal gadgets, without urgent final locations.
        #[arg(long)]
        raw: bool,
    },
}

/// Errors in user input, reported with exit code 64.
#[derive(Debug, thiserror::Error)]
#[error("{0:#}")]
struct InputError(anyhow::Error);

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| InputError(e).into())
}

fn read(path: &Path) -> Result<String> {
    input(fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())))
}

fn load_space(path: &Path) -> Result<RegionSpace> {
    let src = read(path)?;
    let ta = input(parse_ta(&src).with_context(|| format!("in {}", path.display())))?;
    input(RegionSpace::new(&ta).with_context(|| format!("in {}", path.display())))
}

fn load_strategy(sp: &RegionSpace, path: &Path) -> Result<MetaStrategy> {
    let src = read(path)?;
    input(parse_msf(sp.ta(), &src).with_context(|| format!("in {}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn options(workers: usize) -> SolveOptions {
    SolveOptions {
        workers,
        ..SolveOptions::from_env()
    }
}

fn labels(sp: &RegionSpace, ls: &[BeliefLabel]) -> String {
    ls.iter()
        .map(|l| format!("({}, {})", l.tick.as_str(), sp.ta().set_string(l.enabled)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn check(sp: &RegionSpace, mode: CheckMode, strategy: Option<&Path>, workers: usize) -> Result<u8> {
    let beliefs = Beliefs::new(sp);
    match (mode.game_mode(), strategy) {
        (None, None) => {
            let hits = check_exists(&beliefs);
            if hits.is_empty() {
                println!("false");
                return Ok(1);
            }
            let list: Vec<String> = hits.iter().map(|b| b.to_string()).collect();
            println!("true");
            println!("buckets with private and public runs: {}", list.join(" "));
            Ok(0)
        }
        (None, Some(path)) => {
            let phi = load_strategy(sp, path)?;
            let enc = encountered_beliefs(&beliefs, &phi);
            let hit = enc
                .buckets
                .iter()
                .find(|(_, b)| beliefs.has_private_final(b) && beliefs.has_public_final(b));
            match hit {
                Some((k, _)) => {
                    println!("OK");
                    println!("shared bucket: {k}");
                    Ok(0)
                }
                None => {
                    println!("NOT-OK");
                    Ok(1)
                }
            }
        }
        (Some(m), Some(path)) => {
            let phi = load_strategy(sp, path)?;
            let report = check_metastrategy(&beliefs, &phi, m);
            match report.offending {
                None => {
                    println!("OK");
                    Ok(0)
                }
                Some(b) => {
                    println!("NOT-OK");
                    println!("first offending bucket: {b}");
                    Ok(1)
                }
            }
        }
        (Some(m), None) => match solve(&beliefs, m, &options(workers)) {
            Verdict::Sat(w) => {
                println!("SAT");
                println!("stem: {}", labels(sp, &w.stem));
                println!("loop: {}", labels(sp, &w.cycle));
                let phi = witness_to_metastrategy(&w)?;
                print!("{}", print_msf(sp.ta(), &phi));
                Ok(0)
            }
            Verdict::Unsat { explored } => {
                println!("UNSAT");
                println!("explored {explored} game states");
                Ok(1)
            }
            Verdict::Indeterminate { explored, reason } => {
                println!("INDETERMINATE");
                println!("{reason}; explored {explored} game states");
                Ok(2)
            }
        },
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Check { ta, mode, strategy } => {
            let sp = load_space(&ta)?;
            check(&sp, mode, strategy.as_deref(), cli.workers)
        }
        Cmd::Synthesize { ta, mode, output } => {
            let sp = load_space(&ta)?;
            let Some(m) = mode.game_mode() else {
                // the all-enabled strategy maximises both duration sets
                let ok = !check_exists(&Beliefs::new(&sp)).is_empty();
                if ok {
                    write(
                        &output,
                        &print_msf(sp.ta(), &MetaStrategy::all_enabled(sp.ta())),
                    )?;
                }
                println!("{}", if ok { "SAT" } else { "UNSAT" });
                return Ok(if ok { 0 } else { 1 });
            };
            match solve(&Beliefs::new(&sp), m, &options(cli.workers)) {
                Verdict::Sat(w) => {
                    let phi = witness_to_metastrategy(&w)?;
                    write(&output, &print_msf(sp.ta(), &phi))?;
                    println!("SAT");
                    Ok(0)
                }
                Verdict::Unsat { .. } => {
                    println!("UNSAT");
                    Ok(1)
                }
                Verdict::Indeterminate { reason, .. } => {
                    println!("INDETERMINATE");
                    println!("{reason}");
                    Ok(2)
                }
            }
        }
        Cmd::Simulate { ta, strategy } => {
            let sp = load_space(&ta)?;
            let phi = match strategy {
                Some(p) => load_strategy(&sp, &p)?,
                None => MetaStrategy::all_enabled(sp.ta()),
            };
            print!("{}", oracle_buckets(&sp, &phi));
            Ok(0)
        }
        Cmd::Regions { ta, dot, cap } => {
            let sp = load_space(&ta)?;
            write(&dot, &regions_dot(&sp, cap))?;
            Ok(0)
        }
        Cmd::Beliefs {
            ta,
            dot,
            pretty,
            cap,
        } => {
            let sp = load_space(&ta)?;
            let beliefs = Beliefs::new(&sp);
            let g = beliefs.explore(cap);
            write(&dot, &beliefs_dot(&beliefs, &g, pretty))?;
            println!("{} beliefs, {} edges", g.nodes.len(), g.edges.len());
            Ok(if g.complete { 0 } else { 2 })
        }
        Cmd::Game { ta, dot, mode } => {
            let sp = load_space(&ta)?;
            let m = input(
                mode.game_mode()
                    .context("the existential variant has no game"),
            )?;
            let beliefs = Beliefs::new(&sp);
            let (g, status) = explore_game(&beliefs, m, &options(cli.workers));
            write(&dot, &game_dot(&beliefs, &g))?;
            println!("{} game states", g.states.len());
            Ok(if status == Exploration::Complete {
                0
            } else {
                2
            })
        }
        Cmd::GenMinsky {
            machine,
            output,
            raw,
        } => {
            let src = read(&machine)?;
            let m: MinskyMachine = input(
                src.parse::<MinskyMachine>()
                    .with_context(|| format!("in {}", machine.display())),
            )?;
            let ta = encode(&m, raw);
            structural_check(&ta, &m)?;
            write(&output, &print_ta(&ta))?;
            println!("{} locations, {} edges", ta.locations.len(), ta.edges.len());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.is::<InputError>() {
                EXIT_INPUT
            } else {
                EXIT_INTERNAL
            };
            ExitCode::from(code)
        }
    }
}
