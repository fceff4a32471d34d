//! The `tcpnet` command.
//!
//! [`run`] takes the argument list and two writers so it can be driven from
//! tests; the binary only forwards the process's arguments and streams.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{self, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use tcpnet_core::consistency::DirectedWitness;
use tcpnet_core::model::{ConstraintSet, Outcome, PartialAssignment, TcpNet, VarId};
use tcpnet_core::optimize::{complete_outcome, PruneReason, UndecidedCause};
use tcpnet_core::semantics::{
    dominates_with, flip_graph, oracle_pareto, DominanceLimits, FlipKind, SemanticsError, DEFAULT_OUTCOME_CAP,
};
use tcpnet_core::{is_conditionally_acyclic, search, ConsistencyVerdict, OptimizeError, SearchConfig, SearchEvent, SearchMode};

use crate::codec::{parse_constraints, parse_net, CodecError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_IMPLIED: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_DIRECTED: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;
pub const EXIT_CAP_EXCEEDED: i32 = 5;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_IO: i32 = 74;

/// Environment variable overriding the outcome-space cap.
pub const CAP_VAR: &str = "TCPNET_OUTCOME_CAP";

const EXIT_HELP: &str = "\
Exit codes:
  0   success (check: conditionally acyclic; dominates: implied)
  1   dominates: not implied
  2   search: no feasible outcome
  3   the net is conditionally directed
  4   search --verify: result differs from the brute-force oracle
  5   outcome-space cap exceeded
  64  usage error
  65  malformed or invalid input file
  66  input file cannot be read
  74  output cannot be written

Outcomes are written as comma-separated X=v pairs, e.g. J=black,P=white,S=white.
TCPNET_OUTCOME_CAP overrides the outcome-space cap (default 65536).";

#[derive(Debug, Parser)]
#[command(name = "tcpnet", version, about = "Reason about TCP-nets: consistency, optimisation and dominance", after_help = EXIT_HELP)]
struct Cli {
    /// One JSON record per line instead of prose.
    #[arg(long, global = true)]
    porcelain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the net is conditionally acyclic.
    Check { net: PathBuf },
    /// Best outcome extending the given values, ignoring constraints.
    Optimal {
        net: PathBuf,
        /// Fixed values, as X=v (repeatable or comma-separated).
        #[arg(long, value_name = "X=v")]
        given: Vec<String>,
    },
    /// Optimal outcomes under hard constraints, printed as they are found.
    Search {
        net: PathBuf,
        #[arg(long, value_name = "FILE")]
        constraints: PathBuf,
        #[command(flatten)]
        mode: ModeArgs,
        /// Skip root values whose propagated domains are subsumed.
        #[arg(long)]
        prune: bool,
        /// Skip the final check of each solution for a feasible dominator.
        #[arg(long)]
        no_certify: bool,
        /// Compare the result with the brute-force oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Test whether one outcome is preferred to another.
    Dominates {
        net: PathBuf,
        #[arg(long, value_name = "OUTCOME")]
        better: String,
        #[arg(long, value_name = "OUTCOME")]
        worse: String,
    },
    /// Brute-force answers from the full flip graph.
    Oracle {
        net: PathBuf,
        #[command(flatten)]
        query: OracleArgs,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct ModeArgs {
    /// Stop at the first optimal outcome.
    #[arg(long)]
    first: bool,
    /// Every optimal outcome (the default).
    #[arg(long)]
    all: bool,
    /// At most K optimal outcomes.
    #[arg(long, value_name = "K")]
    max: Option<NonZeroUsize>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct OracleArgs {
    /// Pareto-optimal outcomes under the constraints in FILE.
    #[arg(long, value_name = "FILE")]
    pareto: Option<PathBuf>,
    /// Whether the flip graph has no cycle.
    #[arg(long)]
    acyclic: bool,
    /// Every implied preference, one `better > worse` pair per line.
    #[arg(long)]
    closure: bool,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(EXIT_IO, format!("write failed: {e}"))
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::CapExceeded { .. } => Failure::new(EXIT_CAP_EXCEEDED, format!("{e}; raise {CAP_VAR}")),
            other => Failure::new(EXIT_USAGE, other.to_string()),
        }
    }
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let porcelain = cli.porcelain;
    let result = outcome_cap().and_then(|cap| {
        let mut ctx = Ctx { out, err, porcelain, cap };
        ctx.dispatch(cli.command)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            if porcelain {
                let _ = writeln!(out, "{}", json!({"event": "error", "code": f.code, "message": f.message}));
            }
            let _ = writeln!(err, "tcpnet: {}", f.message);
            f.code
        }
    }
}

fn outcome_cap() -> Result<usize, Failure> {
    match std::env::var(CAP_VAR) {
        Err(_) => Ok(DEFAULT_OUTCOME_CAP),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::new(EXIT_USAGE, format!("{CAP_VAR} must be a non-negative integer, got {v:?}"))),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn load_net(path: &Path) -> Result<TcpNet, Failure> {
    parse_net(&read(path)?).map_err(|e| data_error(path, e))
}

fn load_constraints(path: &Path, net: &TcpNet) -> Result<ConstraintSet, Failure> {
    parse_constraints(&read(path)?, net).map_err(|e| data_error(path, e))
}

fn data_error(path: &Path, e: CodecError) -> Failure {
    match e.span() {
        Some(_) => Failure::new(EXIT_DATA, format!("{}:{e}", path.display())),
        None => Failure::new(EXIT_DATA, format!("{}: {e}", path.display())),
    }
}

fn pairs(text: &str) -> Result<Vec<(&str, &str)>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("expected X=v, got {p:?}")))
        })
        .collect()
}

fn parse_outcome(net: &TcpNet, text: &str) -> Result<Outcome, Failure> {
    net.outcome(&pairs(text)?)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("bad outcome {text:?}: {e}")))
}

fn outcome_json(net: &TcpNet, o: &Outcome) -> Value {
    let map: Map<String, Value> = net
        .var_ids()
        .map(|v| (net.name(v).to_string(), Value::from(net.value_name(v, o.value(v)))))
        .collect();
    Value::Object(map)
}

struct Ctx<'w> {
    out: &'w mut dyn Write,
    err: &'w mut dyn Write,
    porcelain: bool,
    cap: usize,
}

impl Ctx<'_> {
    fn dispatch(&mut self, command: Command) -> Result<i32, Failure> {
        match command {
            Command::Check { net } => self.check(&load_net(&net)?),
            Command::Optimal { net, given } => self.optimal(&load_net(&net)?, &given),
            Command::Search {
                net,
                constraints,
                mode,
                prune,
                no_certify,
                verify,
            } => {
                let net = load_net(&net)?;
                let c = load_constraints(&constraints, &net)?;
                let mode = match (mode.first, mode.max) {
                    (true, _) => SearchMode::First,
                    (_, Some(k)) => SearchMode::Max(k),
                    _ => SearchMode::All,
                };
                let config = SearchConfig {
                    mode,
                    subsumption_pruning: prune,
                    certify: !no_certify,
                    outcome_cap: self.cap,
                    ..SearchConfig::default()
                };
                self.search(&net, &c, &config, verify)
            }
            Command::Dominates { net, better, worse } => {
                let net = load_net(&net)?;
                let a = parse_outcome(&net, &better)?;
                let b = parse_outcome(&net, &worse)?;
                self.dominates(&net, &a, &b)
            }
            Command::Oracle { net, query } => {
                let net = load_net(&net)?;
                if let Some(path) = query.pareto {
                    let c = load_constraints(&path, &net)?;
                    self.pareto(&net, &c)
                } else if query.acyclic {
                    self.acyclic(&net)
                } else {
                    self.closure(&net)
                }
            }
        }
    }

    fn record(&mut self, value: Value) -> io::Result<()> {
        writeln!(self.out, "{value}")
    }

    fn check(&mut self, net: &TcpNet) -> Result<i32, Failure> {
        let verdict = is_conditionally_acyclic(net);
        let path = |cycle: &[(VarId, VarId)]| {
            let mut names: Vec<&str> = cycle.iter().map(|&(a, _)| net.name(a)).collect();
            if let Some(&(first, _)) = cycle.first() {
                names.push(net.name(first));
            }
            names.join(" -> ")
        };
        match &verdict {
            ConsistencyVerdict::ConditionallyAcyclic(proof) => {
                if self.porcelain {
                    let certificates: Vec<Value> = proof
                        .certificates
                        .iter()
                        .map(|c| json!({"cycle": c.cycle.display(net).to_string(), "rule": c.rule.name()}))
                        .collect();
                    self.record(json!({
                        "verdict": "conditionally-acyclic",
                        "certificates": certificates,
                        "mixed_cycles": proof.mixed_cycles,
                        "exhaustive": proof.exhaustive,
                    }))?;
                } else {
                    writeln!(self.out, "conditionally acyclic")?;
                    for c in &proof.certificates {
                        writeln!(self.out, "cycle {}: acyclic by {}", c.cycle.display(net), c.rule)?;
                    }
                    if proof.mixed_cycles > 0 {
                        writeln!(self.out, "{} cycles with opposing directed arcs", proof.mixed_cycles)?;
                    }
                    if proof.exhaustive {
                        writeln!(self.out, "decided by enumerating every selector assignment")?;
                    }
                }
                Ok(EXIT_OK)
            }
            ConsistencyVerdict::ConditionallyDirected(witness) => {
                let (kind, w, cycle, rule) = match witness {
                    DirectedWitness::Selector { w, cycle, rule } => ("selector", Some(w), cycle, *rule),
                    DirectedWitness::Dependency { cycle } => ("dependency", None, cycle, None),
                };
                if self.porcelain {
                    self.record(json!({
                        "verdict": "conditionally-directed",
                        "witness": kind,
                        "assignment": w.map(|w| net.display_partial(w).to_string()),
                        "cycle": path(cycle),
                        "rule": rule.map(|r| r.name()),
                    }))?;
                } else {
                    writeln!(self.out, "conditionally directed")?;
                    match w {
                        Some(w) => writeln!(self.out, "under {}: {}", net.display_partial(w), path(cycle))?,
                        None => writeln!(self.out, "dependency graph cycle: {}", path(cycle))?,
                    }
                    if let Some(rule) = rule {
                        writeln!(self.out, "found by {rule}")?;
                    }
                }
                Ok(EXIT_DIRECTED)
            }
        }
    }

    fn optimal(&mut self, net: &TcpNet, given: &[String]) -> Result<i32, Failure> {
        let mut all = Vec::new();
        for g in given {
            all.extend(pairs(g)?);
        }
        let given = net
            .partial(&all)
            .map_err(|e| Failure::new(EXIT_USAGE, format!("bad --given: {e}")))?;
        let o = match complete_outcome(net, &given) {
            Ok(o) => o,
            Err(OptimizeError::NotConditionallyAcyclic) => return Err(not_acyclic()),
            Err(e) => return Err(Failure::new(EXIT_USAGE, e.to_string())),
        };
        if self.porcelain {
            self.record(json!({"event": "optimal", "outcome": outcome_json(net, &o)}))?;
        } else {
            writeln!(self.out, "{}", net.display_outcome(&o))?;
        }
        Ok(EXIT_OK)
    }

    fn search(&mut self, net: &TcpNet, c: &ConstraintSet, config: &SearchConfig, verify: bool) -> Result<i32, Failure> {
        let porcelain = self.porcelain;
        let mut write_failed = None;
        let out = &mut *self.out;
        let result = search(net, c, &PartialAssignment::new(), config, |event| {
            let line = if porcelain {
                Some(event_json(net, event).to_string())
            } else if let SearchEvent::SolutionEmitted(o) = event {
                Some(net.display_outcome(o).to_string())
            } else {
                None
            };
            if let Some(line) = line {
                if let Err(e) = writeln!(out, "{line}").and_then(|_| out.flush()) {
                    write_failed.get_or_insert(e);
                }
            }
        });
        if let Some(e) = write_failed {
            return Err(e.into());
        }
        let (solutions, code) = match result {
            Ok(report) => {
                if porcelain {
                    self.record(json!({
                        "event": "done",
                        "solutions": report.solutions.len(),
                        "dominance_queries": report.dominance_queries,
                        "certifications": report.certifications,
                        "rejected": report.rejected,
                        "undecided": report.undecided,
                        "pruned_inconsistent": report.pruned_inconsistent,
                        "pruned_subsumed": report.pruned_subsumed,
                    }))?;
                } else {
                    writeln!(
                        self.err,
                        "{} solutions, {} dominance queries, {} certified",
                        report.solutions.len(),
                        report.dominance_queries,
                        report.certifications
                    )?;
                }
                (report.solutions, EXIT_OK)
            }
            Err(OptimizeError::Infeasible) => {
                if porcelain {
                    self.record(json!({"event": "infeasible"}))?;
                } else {
                    writeln!(self.err, "no feasible outcome")?;
                }
                (Vec::new(), EXIT_INFEASIBLE)
            }
            Err(OptimizeError::NotConditionallyAcyclic) => return Err(not_acyclic()),
            Err(e) => return Err(Failure::new(EXIT_USAGE, e.to_string())),
        };
        if !verify {
            return Ok(code);
        }
        let oracle = oracle_pareto(net, c, self.cap)?;
        let found: BTreeSet<Outcome> = solutions.iter().cloned().collect();
        let expected_all = config.mode == SearchMode::All;
        let ok = found.len() == solutions.len()
            && found.is_subset(&oracle)
            && (if expected_all { found == oracle } else { found.is_empty() == oracle.is_empty() });
        if porcelain {
            self.record(json!({"event": "verified", "ok": ok, "oracle": oracle.len()}))?;
        }
        if ok {
            if !porcelain {
                writeln!(self.err, "verified against the oracle ({} optimal outcomes)", oracle.len())?;
            }
            Ok(code)
        } else {
            let missing: Vec<String> = oracle.difference(&found).map(|o| net.display_outcome(o).to_string()).collect();
            let extra: Vec<String> = found.difference(&oracle).map(|o| net.display_outcome(o).to_string()).collect();
            writeln!(
                self.err,
                "verification failed: missing [{}], not optimal [{}]",
                missing.join("; "),
                extra.join("; ")
            )?;
            Ok(EXIT_VERIFY_FAILED)
        }
    }

    fn dominates(&mut self, net: &TcpNet, better: &Outcome, worse: &Outcome) -> Result<i32, Failure> {
        let limits = DominanceLimits {
            outcome_cap: self.cap,
            budget: None,
        };
        match dominates_with(net, better, worse, &limits)? {
            Some(seq) => {
                if self.porcelain {
                    let steps: Vec<Value> = seq
                        .steps
                        .iter()
                        .map(|f| {
                            json!({
                                "kind": kind_name(f.kind()),
                                "from": outcome_json(net, &f.from),
                                "to": outcome_json(net, &f.to),
                                "text": f.display(net).to_string(),
                            })
                        })
                        .collect();
                    self.record(json!({"implied": true, "steps": steps}))?;
                } else {
                    let n = seq.len();
                    writeln!(self.out, "implied by {n} flip{}", if n == 1 { "" } else { "s" })?;
                    for f in &seq.steps {
                        writeln!(self.out, "  {}", f.display(net))?;
                    }
                }
                Ok(EXIT_OK)
            }
            None => {
                if self.porcelain {
                    self.record(json!({"implied": false}))?;
                } else {
                    writeln!(self.out, "not implied")?;
                }
                Ok(EXIT_NOT_IMPLIED)
            }
        }
    }

    fn pareto(&mut self, net: &TcpNet, c: &ConstraintSet) -> Result<i32, Failure> {
        for o in oracle_pareto(net, c, self.cap)? {
            if self.porcelain {
                self.record(json!({"event": "pareto", "outcome": outcome_json(net, &o)}))?;
            } else {
                writeln!(self.out, "{}", net.display_outcome(&o))?;
            }
        }
        Ok(EXIT_OK)
    }

    fn acyclic(&mut self, net: &TcpNet) -> Result<i32, Failure> {
        let graph = flip_graph(net, self.cap)?;
        let acyclic = graph.is_acyclic();
        if self.porcelain {
            self.record(json!({"acyclic": acyclic, "outcomes": graph.node_count(), "flips": graph.edge_count()}))?;
        } else {
            writeln!(self.out, "{}", if acyclic { "acyclic" } else { "cyclic" })?;
        }
        Ok(EXIT_OK)
    }

    fn closure(&mut self, net: &TcpNet) -> Result<i32, Failure> {
        let graph = flip_graph(net, self.cap)?;
        for (better, worse) in graph.transitive_closure() {
            let (a, b) = (graph.outcome(better), graph.outcome(worse));
            if self.porcelain {
                self.record(json!({"better": outcome_json(net, &a), "worse": outcome_json(net, &b)}))?;
            } else {
                writeln!(self.out, "{} > {}", net.display_outcome(&a), net.display_outcome(&b))?;
            }
        }
        Ok(EXIT_OK)
    }
}

fn not_acyclic() -> Failure {
    Failure::new(EXIT_DIRECTED, "the net is not conditionally acyclic; see `tcpnet check`")
}

fn kind_name(kind: FlipKind) -> &'static str {
    match kind {
        FlipKind::Cp => "cp",
        FlipKind::I => "i",
    }
}

fn event_json(net: &TcpNet, event: &SearchEvent) -> Value {
    match event {
        SearchEvent::SolutionEmitted(o) => json!({"event": "solution", "outcome": outcome_json(net, o)}),
        SearchEvent::BranchPruned { var, value, reason } => json!({
            "event": "pruned",
            "variable": net.name(*var),
            "value": net.value_name(*var, *value),
            "reason": match reason {
                PruneReason::Inconsistent => "inconsistent",
                PruneReason::Subsumed => "subsumed",
            },
        }),
        SearchEvent::ComponentSplit { count } => json!({"event": "split", "components": count}),
        SearchEvent::DominanceUndecided { cause } => json!({
            "event": "undecided",
            "cause": match cause {
                UndecidedCause::Budget => "budget",
                UndecidedCause::OutcomeCap => "outcome-cap",
                UndecidedCause::Completions => "completions",
            },
        }),
        SearchEvent::CandidateRejected(o) => json!({"event": "rejected", "outcome": outcome_json(net, o)}),
    }
}
