//! `qkprove` command-line interface.
//!
//! Exit codes: 0 proved/checked/valid/member, 1 exhausted or not a member,
//! 2 countermodel found, 3 input error, 4 proof-check failure.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use qkprove::calculi::{check, CalculusKind, CalculusSpec, CheckError, ProofTree};
use qkprove::grammar::{Character, Production, ThueSystem, Word};
use qkprove::propagation::PropagationGraph;
use qkprove::prover::{describe, prove, SearchBudget, SearchResult};
use qkprove::refine::{nestify, RefineError, Refiner};
use qkprove::semantics::{find_countermodel, find_sequent_countermodel, Bounds};
use qkprove::sequents::{parse_labeled, parse_nested, LabeledSequent, NestedSequent};
use qkprove::syntax::{parse_formula, FrameSpec};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_COUNTERMODEL: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "qkprove", version, about = "Proof toolkit for first-order modal logics with varying domains")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a nested proof of a formula or sequent.
    Prove(ProveArgs),
    /// Check a proof file against a calculus.
    Check(CheckArgs),
    /// Translate sequents between the labeled and nested forms.
    Translate(TranslateArgs),
    /// Eliminate relational rules from a labeled proof.
    Refine(RefineArgs),
    /// Membership in the language of a semi-Thue system.
    Grammar(GrammarArgs),
    /// Dump a propagation graph and answer reachability queries.
    Graph(GraphArgs),
    /// Search for a finite countermodel.
    Countermodel(CountermodelArgs),
}

#[derive(Args, Clone, Default)]
struct FrameArgs {
    #[arg(long)]
    serial: bool,
    #[arg(long)]
    inc_dom: bool,
    #[arg(long)]
    dec_dom: bool,
    /// Same as `--inc-dom --dec-dom`.
    #[arg(long)]
    const_dom: bool,
    #[arg(long)]
    nonempty_dom: bool,
    /// Path condition `G(n,k)` as `N:K`; repeatable.
    #[arg(long = "path", value_name = "N:K")]
    paths: Vec<String>,
    /// Comma-separated path conditions, e.g. `0:2,1:1`.
    #[arg(long, value_name = "N:K,...")]
    frame_paths: Option<String>,
}

impl FrameArgs {
    fn frame(&self) -> anyhow::Result<FrameSpec> {
        let mut frame = FrameSpec::empty();
        frame.serial = self.serial;
        frame.inc = self.inc_dom || self.const_dom;
        frame.dec = self.dec_dom || self.const_dom;
        frame.nonempty = self.nonempty_dom;
        let extra = self.frame_paths.iter().flat_map(|s| s.split(','));
        for item in self.paths.iter().map(String::as_str).chain(extra) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (n, k) = item
                .split_once(':')
                .ok_or_else(|| anyhow!("path condition `{item}` is not of the form N:K"))?;
            let n = n.trim().parse().with_context(|| format!("bad path condition `{item}`"))?;
            let k = k.trim().parse().with_context(|| format!("bad path condition `{item}`"))?;
            frame = frame.path(n, k);
        }
        Ok(frame)
    }
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = SearchBudget::default().max_creations)]
    max_creations: usize,
    #[arg(long, default_value_t = SearchBudget::default().max_depth)]
    max_depth: usize,
    #[arg(long, default_value_t = SearchBudget::default().max_nodes)]
    max_nodes: usize,
}

#[derive(Args)]
struct ProveArgs {
    /// Formula, or nested sequent with `--sequent`.
    goal: String,
    /// Read the goal as a nested sequent.
    #[arg(long)]
    sequent: bool,
    /// Include the proof in the JSON output.
    #[arg(long)]
    emit_proof: bool,
    /// Write the proof JSON to this file.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    frame: FrameArgs,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Proof JSON file, `-` for stdin.
    proof: PathBuf,
    /// g3, refined, nested or mixed.
    #[arg(long, default_value = "nested")]
    calculus: String,
    #[command(flatten)]
    frame: FrameArgs,
}

#[derive(Args)]
struct TranslateArgs {
    /// Sequent file (JSON or text syntax), `-` for stdin.
    input: PathBuf,
    #[arg(long, conflicts_with = "to_nested", required_unless_present = "to_nested")]
    to_labeled: bool,
    #[arg(long)]
    to_nested: bool,
}

#[derive(Args)]
struct RefineArgs {
    /// Labeled proof JSON file, `-` for stdin.
    proof: PathBuf,
    /// Write each refinement step as a JSON line to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Emit the nested proof instead of the refined labeled one.
    #[arg(long)]
    nested: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    frame: FrameArgs,
}

#[derive(Args)]
struct GrammarArgs {
    /// s4, s5, empty, paths:N:K,... or unions joined by `+`.
    #[arg(long)]
    system: Option<String>,
    /// Extra production such as `d -> bd` or `b -> eps`; repeatable.
    #[arg(long = "production")]
    productions: Vec<String>,
    /// Start character, `d` (◇) or `b` (◆).
    #[arg(long, default_value = "d")]
    start: String,
    /// String to test, e.g. `ddb`; `eps` for the empty string.
    #[arg(long)]
    string: Option<String>,
    /// List every generated string up to this length.
    #[arg(long)]
    language: Option<usize>,
}

#[derive(Args)]
struct GraphArgs {
    /// Sequent file (JSON or text syntax), `-` for stdin.
    input: PathBuf,
    /// Source label of a reachability query.
    #[arg(long, requires = "to")]
    from: Option<String>,
    #[arg(long, requires = "from")]
    to: Option<String>,
    /// Start character of the query.
    #[arg(long, default_value = "d")]
    start: String,
    /// System for the query; defaults to the path system of the frame flags.
    #[arg(long)]
    system: Option<String>,
    #[command(flatten)]
    frame: FrameArgs,
}

#[derive(Args)]
struct CountermodelArgs {
    /// Formula, or labeled sequent with `--sequent`.
    goal: String,
    #[arg(long)]
    sequent: bool,
    #[arg(long, default_value_t = Bounds::default().max_worlds)]
    max_worlds: usize,
    #[arg(long, default_value_t = Bounds::default().max_individuals)]
    max_individuals: usize,
    #[command(flatten)]
    frame: FrameArgs,
}

/// An error that carries its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    body: serde_json::Value,
}

fn input_error(e: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        body: json!({ "error": "input", "message": format!("{e:#}") }),
    }
}

fn check_failure(e: &CheckError) -> Failure {
    Failure {
        code: EXIT_CHECK,
        body: json!({
            "error": "check",
            "path": e.path,
            "rule": e.rule,
            "message": e.message,
        }),
    }
}

struct Out {
    pretty: bool,
}

impl Out {
    fn emit(&self, value: &impl Serialize, human: impl FnOnce() -> String) -> anyhow::Result<()> {
        let mut stdout = io::stdout().lock();
        if self.pretty {
            writeln!(stdout, "{}", human().trim_end())?;
        } else {
            writeln!(stdout, "{}", serde_json::to_string(value)?)?;
        }
        Ok(())
    }
}

fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

fn write_json(path: &PathBuf, value: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn read_nested(text: &str) -> anyhow::Result<NestedSequent> {
    let seq: NestedSequent = if is_json(text) {
        serde_json::from_str(text)?
    } else {
        parse_nested(text.trim())?
    };
    seq.check_labels()?;
    Ok(seq)
}

fn read_labeled(text: &str) -> anyhow::Result<LabeledSequent> {
    if is_json(text) {
        Ok(serde_json::from_str(text)?)
    } else {
        Ok(parse_labeled(text.trim())?)
    }
}

/// Labeled text is tried first; anything else is read as a nested sequent.
fn read_any_labeled(text: &str) -> anyhow::Result<LabeledSequent> {
    if is_json(text) {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("label").is_some() {
            return Ok(serde_json::from_value::<NestedSequent>(value)?.to_labeled()?);
        }
        return Ok(serde_json::from_value(value)?);
    }
    match parse_labeled(text.trim()) {
        Ok(s) => Ok(s),
        Err(labeled_err) => parse_nested(text.trim())
            .map_err(|_| anyhow!(labeled_err))?
            .to_labeled()
            .map_err(Into::into),
    }
}

fn parse_char(s: &str) -> anyhow::Result<Character> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let out = Out { pretty: cli.pretty };
    let io_err = |e: anyhow::Error| input_error(e);
    match cli.cmd {
        Command::Prove(a) => {
            let frame = a.frame.frame().map_err(io_err)?;
            let budget = SearchBudget {
                max_creations: a.budget.max_creations,
                max_depth: a.budget.max_depth,
                max_nodes: a.budget.max_nodes,
            };
            let result = if a.sequent {
                let seq = read_nested(&a.goal).map_err(io_err)?;
                prove(seq, &frame, &budget)
            } else {
                let phi = parse_formula(&a.goal).map_err(|e| io_err(e.into()))?;
                prove(phi, &frame, &budget)
            }
            .map_err(|e| io_err(e.into()))?;
            let (code, body) = match &result {
                SearchResult::Proved(p) => {
                    if let Some(path) = &a.output {
                        write_json(path, p).map_err(io_err)?;
                    }
                    let mut body = json!({
                        "result": "proved",
                        "frame": frame.to_string(),
                        "size": p.size(),
                        "height": p.height(),
                    });
                    if a.emit_proof {
                        body["proof"] = serde_json::to_value(p).expect("proofs serialize");
                    }
                    (EXIT_OK, body)
                }
                SearchResult::Exhausted(r) => (
                    EXIT_NEGATIVE,
                    json!({ "result": "exhausted", "frame": frame.to_string(), "report": r }),
                ),
            };
            out.emit(&body, || match &result {
                SearchResult::Proved(p) => format!("{}\n{p}", describe(&result)),
                SearchResult::Exhausted(_) => describe(&result),
            })
            .map_err(io_err)?;
            Ok(code)
        }
        Command::Check(a) => {
            let frame = a.frame.frame().map_err(io_err)?;
            let kind: CalculusKind = a.calculus.parse().map_err(|e: String| io_err(anyhow!(e)))?;
            let spec = CalculusSpec::new(kind, frame);
            let text = read_input(&a.proof).map_err(io_err)?;
            let (outcome, size) = if kind.is_nested() {
                let p: ProofTree<NestedSequent> =
                    serde_json::from_str(&text).map_err(|e| io_err(e.into()))?;
                (check(&spec, &p), p.size())
            } else {
                let p: ProofTree<LabeledSequent> =
                    serde_json::from_str(&text).map_err(|e| io_err(e.into()))?;
                (check(&spec, &p), p.size())
            };
            outcome.map_err(|e| check_failure(&e))?;
            let body = json!({ "result": "valid", "calculus": kind, "frame": spec.frame.to_string(), "size": size });
            out.emit(&body, || format!("valid {kind} proof ({size} nodes) for {}", spec.frame))
                .map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Translate(a) => {
            let text = read_input(&a.input).map_err(io_err)?;
            if a.to_labeled {
                let seq = read_nested(&text).map_err(io_err)?;
                let lab = seq.to_labeled().map_err(|e| io_err(e.into()))?;
                out.emit(&lab, || lab.to_string()).map_err(io_err)?;
            } else {
                let lab = read_labeled(&text).map_err(io_err)?;
                let seq = lab.to_nested().map_err(|e| io_err(e.into()))?;
                out.emit(&seq, || seq.to_string()).map_err(io_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Refine(a) => {
            let frame = a.frame.frame().map_err(io_err)?;
            let text = read_input(&a.proof).map_err(io_err)?;
            let proof: ProofTree<LabeledSequent> = serde_json::from_str(&text).map_err(|e| io_err(e.into()))?;
            let refine_err = |e: RefineError| match e {
                RefineError::InvalidInput(c) => check_failure(&c),
                other => Failure {
                    code: EXIT_CHECK,
                    body: json!({ "error": "refine", "message": other.to_string() }),
                },
            };
            let refiner = Refiner::new(&proof, &frame).map_err(refine_err)?;
            let (refined, trace) = refiner.finish().map_err(refine_err)?;
            check(&CalculusSpec::refined(frame.clone()), &refined).map_err(|e| check_failure(&e))?;
            if let Some(path) = &a.trace {
                let mut lines = String::new();
                for step in &trace.steps {
                    lines.push_str(&serde_json::to_string(step).expect("steps serialize"));
                    lines.push('\n');
                }
                let summary = json!({
                    "retagged": trace.retagged,
                    "steps": trace.steps.len(),
                    "input_size": trace.input_size,
                    "output_size": trace.output_size,
                });
                lines.push_str(&summary.to_string());
                lines.push('\n');
                fs::write(path, lines)
                    .with_context(|| format!("cannot write {}", path.display()))
                    .map_err(io_err)?;
            }
            let summary = format!(
                "{} steps, {} retagged, size {} -> {}",
                trace.steps.len(),
                trace.retagged,
                trace.input_size,
                trace.output_size
            );
            if a.nested {
                let nested = nestify(&refined).map_err(refine_err)?;
                check(&CalculusSpec::nested(frame), &nested).map_err(|e| check_failure(&e))?;
                emit_proof(&out, a.output.as_ref(), &nested, &summary)?;
            } else {
                emit_proof(&out, a.output.as_ref(), &refined, &summary)?;
            }
            Ok(EXIT_OK)
        }
        Command::Grammar(a) => {
            let mut system = match &a.system {
                Some(name) => ThueSystem::from_name(name).map_err(|e| io_err(e.into()))?,
                None => ThueSystem::empty(),
            };
            let extra: Vec<Production> = a
                .productions
                .iter()
                .map(|p| p.parse().map_err(|e| io_err(anyhow!("{e}"))))
                .collect::<Result<_, _>>()?;
            system = system.union(&ThueSystem::new(extra));
            let start = parse_char(&a.start).map_err(io_err)?;
            if a.string.is_none() && a.language.is_none() {
                return Err(io_err(anyhow!("nothing to do: give --string or --language")));
            }
            let mut code = EXIT_OK;
            let mut body = json!({ "system": system.to_string(), "start": start });
            let mut human = Vec::new();
            if let Some(n) = a.language {
                let words: Vec<Word> = system.to_cfg().language_up_to(start, n).into_iter().collect();
                human.push(words.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" "));
                body["language"] = serde_json::to_value(&words).expect("words serialize");
            }
            if let Some(s) = &a.string {
                let word: Word = s.parse().map_err(|e| io_err(anyhow!("{e}")))?;
                let member = system.derives(start, &word);
                let verdict = if member { "member" } else { "non-member" };
                if !member {
                    code = EXIT_NEGATIVE;
                }
                body["string"] = serde_json::to_value(&word).expect("words serialize");
                body["result"] = json!(verdict);
                human.push(verdict.to_string());
            }
            out.emit(&body, || human.join("\n")).map_err(io_err)?;
            Ok(code)
        }
        Command::Graph(a) => {
            let frame = a.frame.frame().map_err(io_err)?;
            let text = read_input(&a.input).map_err(io_err)?;
            let seq = read_any_labeled(&text).map_err(io_err)?;
            let graph = PropagationGraph::of_sequent(&seq);
            let mut body = json!({
                "vertices": graph.vertices,
                "edges": graph.edges,
                "symmetric": graph.is_symmetric(),
            });
            let mut human = graph.to_string();
            if let (Some(from), Some(to)) = (&a.from, &a.to) {
                let system = match &a.system {
                    Some(name) => ThueSystem::from_name(name).map_err(|e| io_err(e.into()))?,
                    None => CalculusSpec::refined(frame).path_system(),
                };
                let start = parse_char(&a.start).map_err(io_err)?;
                for l in [from, to] {
                    if !graph.has_vertex(l) {
                        return Err(io_err(anyhow!("label `{l}` is not a vertex")));
                    }
                }
                let witness = graph.reachability(&system).witness(start, from, to);
                human.push_str(&match &witness {
                    Some(p) => format!("{to} reachable from {from} via {p} ({})", p.string()),
                    None => format!("{to} not reachable from {from}"),
                });
                body["query"] = json!({
                    "from": from,
                    "to": to,
                    "start": start,
                    "system": system.to_string(),
                    "reachable": witness.is_some(),
                    "witness": witness,
                });
            }
            out.emit(&body, || human).map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Countermodel(a) => {
            let frame = a.frame.frame().map_err(io_err)?;
            let bounds = Bounds {
                max_worlds: a.max_worlds,
                max_individuals: a.max_individuals,
            };
            if a.sequent {
                let seq = read_any_labeled(&a.goal).map_err(io_err)?;
                match find_sequent_countermodel(&seq, &frame, &bounds) {
                    Some(cm) => {
                        let body = json!({ "result": "countermodel", "model": cm.model, "interpretation": cm.interpretation });
                        out.emit(&body, || {
                            let labels: Vec<String> =
                                cm.interpretation.labels.iter().map(|(l, w)| format!("{l}={w}")).collect();
                            let vars: Vec<String> =
                                cm.interpretation.vars.iter().map(|(x, d)| format!("{x}={d}")).collect();
                            format!("{}labels: {}\nvariables: {}", cm.model, labels.join(", "), vars.join(", "))
                        })
                        .map_err(io_err)?;
                        Ok(EXIT_COUNTERMODEL)
                    }
                    None => no_countermodel(&out, &bounds),
                }
            } else {
                let phi = parse_formula(&a.goal).map_err(|e| io_err(e.into()))?;
                if !phi.free_vars().is_empty() {
                    return Err(io_err(anyhow!("formula has free variables")));
                }
                match find_countermodel(&phi, &frame, &bounds) {
                    Some(cm) => {
                        let body = json!({ "result": "countermodel", "model": cm.model, "world": cm.world });
                        out.emit(&body, || format!("{}false at world {}", cm.model, cm.world))
                            .map_err(io_err)?;
                        Ok(EXIT_COUNTERMODEL)
                    }
                    None => no_countermodel(&out, &bounds),
                }
            }
        }
    }
}

fn no_countermodel(out: &Out, bounds: &Bounds) -> Result<u8, Failure> {
    let body = json!({ "result": "valid", "bounds": bounds });
    out.emit(&body, || {
        format!(
            "no countermodel with at most {} worlds and {} individuals",
            bounds.max_worlds, bounds.max_individuals
        )
    })
    .map_err(input_error)?;
    Ok(EXIT_OK)
}

fn emit_proof<S>(out: &Out, path: Option<&PathBuf>, proof: &ProofTree<S>, summary: &str) -> Result<(), Failure>
where
    S: qkprove::calculi::Sequent,
{
    match path {
        Some(p) => {
            write_json(p, proof).map_err(input_error)?;
            out.emit(&json!({ "result": "refined", "output": p }), || summary.to_string())
                .map_err(input_error)
        }
        None => out.emit(proof, || format!("{summary}\n{proof}")).map_err(input_error),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.body);
            ExitCode::from(f.code)
        }
    }
}

