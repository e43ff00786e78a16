//! Command-line driver: simulate, flatten, bisim, enabled-at, export-dot.
//!
//! Exit codes: 0 on success (and for equivalent `bisim` verdicts), 1 on
//! parse, validation or semantic errors, 2 when `bisim` distinguishes the
//! models. `HCIF_DELTA` overrides the default sample step; an explicit
//! `--delta` wins over the environment.


use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bisim::{bounded_bisim, GameConfig, Verdict};
use crate::flatten::eliminate;
use crate::loader::{augment_entry_resets, initial_valuation, load, parse_valuation_line};
use crate::model::Composition;
use crate::predicate::Valuation;
use crate::sos::{Semantics, TransitionLabel};
use crate::syntax::ModelFile;
use crate::trace::TraceRecord;

#[derive(Parser)]
#[command(name = "hcif", version, about = "Hierarchical hybrid automata: simulation, flattening and bisimulation checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a random or interactive simulation, one JSON trace record per line.
    Simulate {
        file: PathBuf,
        /// Number of transitions to take.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Sample step for trajectories.
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated duration menu for time transitions.
        #[arg(long, value_delimiter = ',')]
        durations: Option<Vec<f64>>,
        /// Seed for the uniform choice among enabled transitions.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List enabled transitions and read selection indices from stdin.
        #[arg(long)]
        interactive: bool,
        /// Do not fold substructure initializations into entering resets.
        #[arg(long)]
        no_init_augment: bool,
    },
    /// Eliminate all hierarchy and write the flat model.
    Flatten {
        file: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check bounded stateless bisimulation between two models.
    Bisim {
        a: PathBuf,
        b: PathBuf,
        /// Depth bound of the game.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// File of initial valuations, one `name=value, ..` line each.
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        durations: Option<Vec<f64>>,
        #[arg(long)]
        no_init_augment: bool,
    },
    /// Print the guard and termination trajectories over one delay.
    EnabledAt {
        file: PathBuf,
        /// Duration of the delay.
        #[arg(long)]
        horizon: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        no_init_augment: bool,
    },
    /// Emit a Graphviz digraph with one cluster per hierarchy level.
    ExportDot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn effective_delta(flag: Option<f64>) -> f64 {
    flag.or_else(|| std::env::var("HCIF_DELTA").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(crate::DEFAULT_DELTA)
}

struct LoadedInput {
    file: ModelFile,
    decls: crate::model::Declarations,
    comp: Composition,
    sigma0: Valuation,
}

fn load_input(path: &Path, augment: bool) -> Result<LoadedInput, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
    let loaded = load(&text).map_err(|e| format!("{}: {}", path.display(), e))?;
    let file = if augment { augment_entry_resets(&loaded.file) } else { loaded.file };
    let sigma0 = initial_valuation(&file, &loaded.decls);
    Ok(LoadedInput { comp: file.comp.clone(), file, decls: loaded.decls, sigma0 })
}

fn write_output(path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {}", p.display(), e)),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

/// Runs the command line; returns the process exit status.
pub fn run_cli(
    args: &[String],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    stdin: &mut dyn BufRead,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", rendered);
                0
            } else {
                let _ = write!(stderr, "{}", rendered);
                1
            };
        }
    };
    match dispatch(cli, stdout, stderr, stdin) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(stderr, "error: {}", message);
            1
        }
    }
}

fn dispatch(
    cli: Cli,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    stdin: &mut dyn BufRead,
) -> Result<i32, String> {
    match cli.command {
        Command::Simulate { file, steps, delta, durations, seed, interactive, no_init_augment } => {
            let input = load_input(&file, !no_init_augment)?;
            let delta = effective_delta(delta);
            let durations = durations.unwrap_or_else(|| crate::DEFAULT_DURATIONS.to_vec());
            simulate(&input, steps, delta, &durations, seed, interactive, stdout, stderr, stdin)
        }
        Command::Flatten { file, output } => {
            let input = load_input(&file, false)?;
            let flat = eliminate(&input.comp).map_err(|e| e.to_string())?;
            let out_file = ModelFile { decls: input.file.decls, comp: Composition::Atomic(flat) };
            let text = crate::printer::print(&out_file);
            write_output(&output, &text, stdout)?;
            Ok(0)
        }
        Command::Bisim { a, b, depth, sigma, delta, durations, no_init_augment } => {
            let left = load_input(&a, !no_init_augment)?;
            let right = load_input(&b, !no_init_augment)?;
            let mut left_vars: Vec<_> = left.decls.iter().collect();
            let mut right_vars: Vec<_> = right.decls.iter().collect();
            left_vars.sort_by(|l, r| l.name.cmp(&r.name));
            right_vars.sort_by(|l, r| l.name.cmp(&r.name));
            if left_vars != right_vars {
                return Err("the two models declare different variables".into());
            }
            let initial_valuations = match sigma {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
                    let mut out = Vec::new();
                    for line in text.lines() {
                        let line = line.trim();
                        if line.is_empty() || line.starts_with('#') {
                            continue;
                        }
                        out.push(parse_valuation_line(line, &left.decls)?);
                    }
                    if out.is_empty() {
                        return Err(format!("{}: no valuations", path.display()));
                    }
                    out
                }
                None => vec![left.sigma0.clone()],
            };
            let cfg = GameConfig {
                depth,
                durations: durations.unwrap_or_else(|| crate::DEFAULT_DURATIONS.to_vec()),
                delta: effective_delta(delta),
                initial_valuations,
                tolerance: 1e-9,
            };
            let verdict = bounded_bisim(&left.decls, &left.comp, &right.comp, &cfg)
                .map_err(|e| e.to_string())?;
            match verdict {
                Verdict::EquivalentUpToBound => {
                    let _ = writeln!(stdout, "equivalent up to bound (depth {})", depth);
                    Ok(0)
                }
                Verdict::Distinguished(trace) => {
                    let _ = writeln!(stdout, "distinguished");
                    let _ = writeln!(stdout, "{}", trace);
                    Ok(2)
                }
            }
        }
        Command::EnabledAt { file, horizon, delta, no_init_augment } => {
            let input = load_input(&file, !no_init_augment)?;
            let delta = effective_delta(delta);
            let sem = Semantics::new(&input.decls);
            let successors = sem
                .time_successors(&input.comp, &input.sigma0, horizon, delta)
                .map_err(|e| e.to_string())?;
            if successors.is_empty() {
                let _ = writeln!(stderr, "no time transition of duration {} exists", horizon);
            }
            for (i, ts) in successors.iter().enumerate() {
                for (k, theta) in ts.bundle.theta.iter().enumerate() {
                    let record = serde_json::json!({
                        "bundle": i,
                        "s": k as f64 * delta,
                        "theta": theta.iter().collect::<Vec<_>>(),
                        "omega": ts.bundle.omega[k],
                    });
                    let _ = writeln!(stdout, "{}", record);
                }
            }
            Ok(0)
        }
        Command::ExportDot { file, output } => {
            let input = load_input(&file, false)?;
            let text = crate::dot::export_dot(&input.file);
            write_output(&output, &text, stdout)?;
            Ok(0)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    input: &LoadedInput,
    steps: usize,
    delta: f64,
    durations: &[f64],
    seed: u64,
    interactive: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    stdin: &mut dyn BufRead,
) -> Result<i32, String> {
    let sem = Semantics::new(&input.decls);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = (input.comp.clone(), input.sigma0.clone());

    for step in 0..steps {
        let successors = sem
            .successors(&state.0, &state.1, durations, delta)
            .map_err(|e| e.to_string())?;
        if successors.is_empty() {
            let _ = writeln!(stderr, "no enabled transitions after {} steps", step);
            break;
        }
        let choice = if interactive {
            let _ = writeln!(stderr, "step {}: enabled transitions", step);
            for (i, tr) in successors.iter().enumerate() {
                let desc = match &tr.label {
                    TransitionLabel::Action(a) => format!("action {}", a),
                    TransitionLabel::Env(b) => format!("env {}", b),
                    TransitionLabel::Time(bundle) => format!("time {}", bundle.duration()),
                };
                let _ = writeln!(stderr, "  {}) {} -> {}", i, desc, tr.target.0.tree_label());
            }
            let _ = write!(stderr, "select: ");
            let _ = stderr.flush();
            let mut line = String::new();
            if stdin.read_line(&mut line).map_err(|e| e.to_string())? == 0 {
                let _ = writeln!(stderr, "end of input");
                break;
            }
            match line.trim().parse::<usize>() {
                Ok(i) if i < successors.len() => i,
                _ => {
                    let _ = writeln!(stderr, "invalid selection `{}`", line.trim());
                    continue;
                }
            }
        } else {
            rng.gen_range(0..successors.len())
        };
        let tr = &successors[choice];
        let record = TraceRecord::new(
            step,
            &tr.label,
            &state.1,
            &tr.target.1,
            tr.target.0.tree_label(),
        );
        let _ = writeln!(stdout, "{}", record.to_json_line());
        state = tr.target.clone();
    }
    Ok(0)
}
