//! The `nerode` command line: validate, minimize, build syntactic monoids,
//! change symmetry and query languages of automata written in the text format
//! described in [`format`].
//!
//! Exit codes: 0 success, 1 I/O failure, 2 semantic invalidity, 3 parse error,
//! 4 resource or stability failure.

pub mod dot;
pub mod format;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use nerode_core::gset::{forget, restrict_automaton, GroupError};
use nerode_core::monoid::{render_table, syntactic_monoid, MonoidError, DEFAULT_CLOSURE_CAP};
use nerode_core::nominal::{nominal_syntactic_monoid, NominalError, DEFAULT_CARRIER_CAP, DEFAULT_MARGIN};
use nerode_core::{Automaton, AutomatonError, BackendTag};

use format::{FormatError, Model};

#[derive(Debug, Parser)]
#[command(name = "nerode", version, about = "Minimal automata and syntactic monoids over symmetric alphabets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a file and print VALID.
    Validate { file: PathBuf },
    /// Minimize an automaton.
    Minimize {
        file: PathBuf,
        /// Write the minimal automaton here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the report here instead of stderr.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        pool_margin: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Compute the syntactic monoid.
    Syn {
        file: PathBuf,
        /// Write the multiplication table here.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Write the Cayley graph here.
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        pool_margin: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Restrict the group action along a homomorphism.
    Restrict {
        file: PathBuf,
        #[arg(long)]
        hom: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Drop the group action.
    Forget {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a word is accepted.
    Accepts { file: PathBuf, word: Vec<String> },
    /// Decide language equality; prints a distinguishing word otherwise.
    Equiv { first: PathBuf, second: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Nominal(#[from] NominalError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Format(FormatError::Parse(_)) => 3,
            CliError::Format(FormatError::Nominal(e)) | CliError::Nominal(e) if e.is_resource() => 4,
            CliError::Monoid(MonoidError::CapExceeded { .. }) => 4,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &Path) -> Result<Model, CliError> {
    Ok(format::parse(&read(path)?)?)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Output of one command: text for stdout and text for stderr.
#[derive(Default)]
struct Output {
    stdout: String,
    stderr: String,
}

/// Runs a parsed command line, writing to the given streams, and returns the
/// exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli.command) {
        Ok(o) => {
            let _ = out.write_all(o.stdout.as_bytes());
            let _ = err.write_all(o.stderr.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Validate { file } => {
            load(&file)?;
            Ok(Output {
                stdout: "VALID\n".into(),
                ..Output::default()
            })
        }
        Command::Minimize {
            file,
            out,
            dot,
            report,
            pool_margin,
            cap,
        } => minimize(&load(&file)?, out, dot, report, pool_margin, cap),
        Command::Syn {
            file,
            table,
            dot,
            pool_margin,
            cap,
        } => syn(&load(&file)?, table, dot, pool_margin, cap),
        Command::Restrict { file, hom, out } => {
            let model = load(&file)?;
            let a = gset_automaton(&model, "restrict")?;
            let group = model.group.as_ref().expect("gset files carry a group");
            let f = format::parse_hom(&read(&hom)?, group)?;
            let b = restrict_automaton(&f, a)?;
            let restricted = Model {
                group: Some(f.source().clone()),
                ..model.with_finite(b.clone())
            };
            finish_lift(a, &b, &restricted, out)
        }
        Command::Forget { file, out } => {
            let model = load(&file)?;
            let a = gset_automaton(&model, "forget")?;
            let b = forget(a);
            let forgotten = Model {
                backend: BackendTag::Set,
                group: None,
                ..model.with_finite(b.clone())
            };
            finish_lift(a, &b, &forgotten, out)
        }
        Command::Accepts { file, word } => {
            let model = load(&file)?;
            let verdict = match &model.machine {
                format::Machine::Finite(a) => a.accepts(&format::parse_finite_word(a, &word)?)?,
                format::Machine::Nominal(a) => a.accepts(&format::parse_nominal_word(a, &word)?)?,
            };
            Ok(Output {
                stdout: format!("{verdict}\n"),
                ..Output::default()
            })
        }
        Command::Equiv { first, second } => {
            let (x, y) = (load(&first)?, load(&second)?);
            let witness = match (&x.machine, &y.machine) {
                (format::Machine::Finite(a), format::Machine::Finite(b)) => a
                    .forget()
                    .distinguishing_word(&b.forget())?
                    .map(|w| if w.is_empty() { "ε".to_string() } else { w.spaced(a.alphabet()) }),
                (format::Machine::Nominal(a), format::Machine::Nominal(b)) => {
                    a.distinguishing_word(b)?.map(|w| a.display_word(&w))
                }
                _ => {
                    return Err(CliError::Invalid(
                        "cannot compare a nominal automaton with a finite one".into(),
                    ))
                }
            };
            Ok(Output {
                stdout: match witness {
                    None => "true\n".into(),
                    Some(w) => format!("false\nwitness: {w}\n"),
                },
                ..Output::default()
            })
        }
    }
}

fn gset_automaton<'a>(model: &'a Model, what: &str) -> Result<&'a Automaton, CliError> {
    match (&model.machine, model.backend) {
        (format::Machine::Finite(a), BackendTag::GSet) => Ok(a),
        _ => Err(CliError::Invalid(format!("{what} needs a `backend: gset` file"))),
    }
}

/// All words up to the longest length that keeps the sample below this size.
const SAMPLE_LIMIT: usize = 4096;

fn sample_words(letters: usize) -> (usize, Vec<Vec<usize>>) {
    let mut words = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    let mut length = 0;
    while letters > 0 && words.len() + layer.len() * letters <= SAMPLE_LIMIT {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..letters).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
        length += 1;
        if length >= 8 {
            break;
        }
    }
    (length, words)
}

fn finish_lift(a: &Automaton, b: &Automaton, model: &Model, out: Option<PathBuf>) -> Result<Output, CliError> {
    let (length, words) = sample_words(a.alphabet().len());
    for w in &words {
        if a.accepts(w)? != b.accepts(w)? {
            return Err(CliError::Invalid(format!(
                "acceptance changed on `{}`",
                automaton_word(a, w)
            )));
        }
    }
    let text = format::emit(model);
    let confirm = format!(
        "acceptance unchanged on all {} words of length <= {length}\n",
        words.len()
    );
    Ok(match out {
        Some(path) => {
            write(&path, &text)?;
            Output {
                stdout: confirm,
                ..Output::default()
            }
        }
        None => Output {
            stdout: text,
            stderr: confirm,
        },
    })
}

fn automaton_word(a: &Automaton, w: &[usize]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        nerode_core::Word(w.to_vec()).spaced(a.alphabet())
    }
}

fn arrow(before: usize, after: usize) -> String {
    if before == after {
        format!("{before} → {after} (already minimal)")
    } else {
        format!("{before} → {after}")
    }
}

fn minimize(
    model: &Model,
    out: Option<PathBuf>,
    dot: Option<PathBuf>,
    report_path: Option<PathBuf>,
    margin: usize,
    cap: Option<usize>,
) -> Result<Output, CliError> {
    let mut report = format!("backend: {}\n", model.backend);
    let (min_model, dot_text) = match &model.machine {
        format::Machine::Finite(a) => {
            let min = a.minimize()?.min;
            report += &format!("states: {}\n", arrow(a.state_count(), min.state_count()));
            if model.backend == BackendTag::GSet {
                report += &format!(
                    "orbits: {}\n",
                    arrow(a.states().orbit_count(), min.states().orbit_count())
                );
                report += &format!("fixed points: {}\n", min.states().fixed_points().len());
            }
            report += "dK-finite: yes\n";
            report += "decomposition-finite: yes\n";
            report += &format!(
                "Myhill-Nerode: decomposition-regular, {} Nerode classes\n",
                min.state_count()
            );
            let text = dot::automaton(&model.name, &min);
            (model.with_finite(min), text)
        }
        format::Machine::Nominal(a) => {
            let m = a.minimize(margin, cap.unwrap_or(DEFAULT_CARRIER_CAP))?;
            let (before, after) = (a.states().orbit_count(), m.min.states().orbit_count());
            report += &format!("orbits: {}\n", arrow(before, after));
            report += &format!("dK-finite: {}\n", yes_no(m.min.states().is_dk_finite()));
            report += "orbit-finite: yes\n";
            report += &format!(
                "Myhill-Nerode: orbit-finite Nerode equivalence, {after} orbits (pool {} checked against {})\n",
                m.pool,
                m.pool + 1
            );
            let text = dot::nominal_automaton(&model.name, &m.min);
            (model.with_nominal(m.min), text)
        }
    };
    let text = format::emit(&min_model);
    let mut o = Output::default();
    match out {
        Some(p) => write(&p, &text)?,
        None => o.stdout = text,
    }
    if let Some(p) = dot {
        write(&p, &dot_text)?;
    }
    match report_path {
        Some(p) => write(&p, &report)?,
        None => o.stderr = report,
    }
    Ok(o)
}

fn syn(
    model: &Model,
    table: Option<PathBuf>,
    dot: Option<PathBuf>,
    margin: usize,
    cap: Option<usize>,
) -> Result<Output, CliError> {
    let mut o = Output::default();
    match &model.machine {
        format::Machine::Finite(a) => {
            let lm = syntactic_monoid(a, cap.unwrap_or(DEFAULT_CLOSURE_CAP))?;
            let rendered = render_table(&lm);
            let mut s = format!("elements: {}\n", lm.len());
            if model.backend == BackendTag::GSet {
                s += &format!("orbits: {}\n", lm.monoid().carrier().orbit_count());
            }
            for x in 0..lm.len() {
                let mark = if lm.chi()[x] { "  accepting" } else { "" };
                s += &format!("  {}{mark}\n", lm.label(x));
            }
            s += &rendered;
            o.stdout = s;
            if let Some(p) = table {
                write(&p, &rendered)?;
            }
            if let Some(p) = dot {
                write(&p, &dot::cayley(&model.name, &lm))?;
            }
        }
        format::Machine::Nominal(a) => {
            let summary = nominal_syntactic_monoid(a, margin, cap.unwrap_or(DEFAULT_CLOSURE_CAP))?;
            let min = a.minimize(margin, cap.unwrap_or(DEFAULT_CARRIER_CAP))?.min;
            let mut s = format!("{} orbits\n", summary.orbits.len());
            s += &format!(
                "elements with atoms in a pool of {}: {}\n",
                summary.pool, summary.elements_at_pool
            );
            for (k, orbit) in summary.orbits.iter().enumerate() {
                s += &format!(
                    "orbit {}: dim {}, stabilizer order {}, witness {}\n",
                    summary.object.orbit(k).name(),
                    orbit.dim,
                    orbit.stabilizer_order,
                    min.display_word(&orbit.witness)
                );
            }
            o.stdout = s.clone();
            if let Some(p) = table {
                write(&p, &s)?;
            }
            if dot.is_some() {
                return Err(CliError::Invalid(
                    "--dot for syn is available for finite backends only".into(),
                ));
            }
        }
    }
    Ok(o)
}
