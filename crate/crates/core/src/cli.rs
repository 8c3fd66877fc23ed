//! The `nzflow` command line: `info | build | synth | verify | oracle`.
//!
//! Exit codes: 0 ok, 1 flow rejected by `verify`, 2 unreadable or malformed
//! input, 3 hypothesis failure, 4 disconnected Cayley graph, 5 internal
//! assertion, 6 oracle refusal.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{build_cayley, validate_connection, CayleyGraph, ConnectionMultiset};
use crate::flow::{verify_flow, z3_oracle, z3_to_integer, FlowAssignment, FlowError, MultiGraph};
use crate::group::{
    build_group, derived_subgroup, has_noncyclic_sylow2, resolve_word, Element, FiniteGroup,
    GroupSpec,
};
use crate::synth::{
    hypothesis_report, synthesize, Certificate, HypothesisReport, SynthError, TraceNode,
};

#[derive(Debug, Parser)]
#[command(
    name = "nzflow",
    version,
    about = "Nowhere-zero 3-flows on Cayley graphs of supersolvable groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group facts and the hypothesis report.
    Info(InfoArgs),
    /// Materialize the Cayley graph of a job.
    Build(BuildArgs),
    /// Construct and certify a nowhere-zero 3-flow.
    Synth(SynthArgs),
    /// Check a flow against a graph.
    Verify(VerifyArgs),
    /// Exhaustive Z3-flow search on a small graph.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    /// Job file (the connection is optional).
    #[arg(long)]
    pub input: PathBuf,
    /// Also write the facts as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Graph JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Certificate JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Print the construction trace.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Graph JSON, or a job file whose Cayley graph is rebuilt.
    #[arg(long)]
    pub input: PathBuf,
    /// Flow JSON, or a certificate.
    #[arg(long)]
    pub flow: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: i64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Graph JSON, or a job file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 18)]
    pub max_rank: usize,
    /// Witness flow JSON; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A group plus a connection multiset.
///
/// Connection entries are an element (index or word such as `"r^2 s"`)
/// or `{"element": .., "multiplicity": ..}`; repeated entries add up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub group: GroupSpec,
    #[serde(default)]
    pub connection: Vec<ConnectionEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConnectionEntry {
    Bare(ElementRef),
    Counted {
        element: ElementRef,
        #[serde(default = "one")]
        multiplicity: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(Element),
    Word(String),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Rejected(String),
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    #[error("{0}")]
    Disconnected(String),
    #[error("internal assertion: {0}")]
    Internal(String),
    #[error("oracle refused: cycle rank {rank} exceeds --max-rank {cap}")]
    OracleRefusal { rank: usize, cap: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Rejected(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Disconnected(_) => 4,
            CliError::Internal(_) => 5,
            CliError::OracleRefusal { .. } => 6,
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Disconnected(_) => CliError::Disconnected(e.to_string()),
            SynthError::ValencyTooLow(_) | SynthError::Hypothesis(_) => {
                CliError::Hypothesis(e.to_string())
            }
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Info(a) => cmd_info(a, out),
        Command::Build(a) => cmd_build(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Output JSON goes to `path` when given, else to `out`.
fn deliver(path: Option<&Path>, out: &mut dyn Write, json: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, json),
        None => emit(out, json),
    }
}

pub fn load_job(path: &Path) -> Result<(FiniteGroup, JobSpec), CliError> {
    let job: JobSpec = parse(path, &read(path)?)?;
    let group = build_group(&job.group).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((group, job))
}

/// Resolves the job's connection entries against `group`.
pub fn resolve_connection(
    group: &FiniteGroup,
    job: &JobSpec,
) -> Result<ConnectionMultiset, CliError> {
    let mut counts: BTreeMap<Element, usize> = BTreeMap::new();
    for entry in &job.connection {
        let (element, multiplicity) = match entry {
            ConnectionEntry::Bare(e) => (e, 1),
            ConnectionEntry::Counted {
                element,
                multiplicity,
            } => (element, *multiplicity),
        };
        let g = match element {
            ElementRef::Index(i) if *i < group.order() => *i,
            ElementRef::Index(i) => {
                return Err(CliError::Input(format!("element {i} out of range")))
            }
            ElementRef::Word(w) => {
                resolve_word(group, w).map_err(|e| CliError::Input(e.to_string()))?
            }
        };
        *counts.entry(g).or_default() += multiplicity;
    }
    let raw: Vec<(Element, usize)> = counts.into_iter().collect();
    validate_connection(group, &raw).map_err(|e| CliError::Input(e.to_string()))
}

fn load_cayley(path: &Path) -> Result<CayleyGraph, CliError> {
    let (group, job) = load_job(path)?;
    if job.connection.is_empty() {
        return Err(CliError::Input(format!(
            "{}: job has no connection",
            path.display()
        )));
    }
    let x = resolve_connection(&group, &job)?;
    Ok(build_cayley(&group, &x))
}

/// A graph file, or failing that a job file.
fn load_graph(path: &Path) -> Result<MultiGraph, CliError> {
    let text = read(path)?;
    let value: serde_json::Value = parse(path, &text)?;
    if value.get("group").is_some() {
        return Ok(load_cayley(path)?.graph().clone());
    }
    parse(path, &text)
}

/// A flow file, or the flow inside a certificate.
fn load_flow(path: &Path) -> Result<FlowAssignment, CliError> {
    let text = read(path)?;
    let value: serde_json::Value = parse(path, &text)?;
    if value.is_object() {
        let cert: Certificate = parse(path, &text)?;
        return Ok(cert.flow);
    }
    parse(path, &text)
}

#[derive(Debug, Serialize)]
struct GroupFacts {
    group: String,
    order: usize,
    derived_order: usize,
    cyclic_sylow2: bool,
    report: HypothesisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    valency: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    connected: Option<bool>,
}

fn cmd_info(a: &InfoArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (group, job) = load_job(&a.input)?;
    let report = hypothesis_report(&group);
    let mut facts = GroupFacts {
        group: group.name().to_string(),
        order: group.order(),
        derived_order: derived_subgroup(&group).order(),
        cyclic_sylow2: !has_noncyclic_sylow2(&group),
        report,
        valency: None,
        connected: None,
    };
    if !job.connection.is_empty() {
        let x = resolve_connection(&group, &job)?;
        facts.valency = Some(x.cardinality());
        facts.connected = Some(build_cayley(&group, &x).graph().component_count() == 1);
    }
    let mut s = String::new();
    let _ = writeln!(s, "group: {}", facts.group);
    let _ = writeln!(s, "order: {}", facts.order);
    let _ = writeln!(s, "derived subgroup order: {}", facts.derived_order);
    let _ = writeln!(s, "supersolvable: {}", report.supersolvable);
    let _ = writeln!(s, "nilpotent: {}", report.nilpotent);
    let _ = writeln!(s, "cyclic Sylow 2-subgroup: {}", facts.cyclic_sylow2);
    let _ = writeln!(
        s,
        "square-free derived subgroup: {}",
        report.squarefree_derived
    );
    let _ = writeln!(s, "applicable: {}", report.applicable);
    if let (Some(v), Some(c)) = (facts.valency, facts.connected) {
        let _ = writeln!(s, "valency: {v}");
        let _ = writeln!(s, "connected: {c}");
    }
    emit(out, &s)?;
    if let Some(p) = &a.out {
        write_file(p, &to_json(&facts))?;
    }
    Ok(())
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cay = load_cayley(&a.input)?;
    if let Some(p) = &a.dot {
        write_file(p, &cayley_dot(&cay, None))?;
    }
    deliver(a.out.as_deref(), out, &to_json(cay.graph()))
}

fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cay = load_cayley(&a.input)?;
    let cert = synthesize(cay.group(), cay.connection())?;
    if let Some(p) = &a.dot {
        write_file(p, &cayley_dot(&cay, Some(&cert.flow)))?;
    }
    if a.trace {
        let mut s = String::new();
        render_trace(&cert.trace, 0, &mut s);
        emit(out, &s)?;
    }
    deliver(a.out.as_deref(), out, &to_json(&cert))?;
    if a.out.is_some() {
        let g = cay.graph();
        emit(
            out,
            &format!(
                "certified nowhere-zero 3-flow on {} vertices, {} edges ({})\n",
                g.vertex_count(),
                g.edge_count(),
                cert.trace.case
            ),
        )?;
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.k < 2 {
        return Err(CliError::Input(format!(
            "--k must be at least 2, got {}",
            a.k
        )));
    }
    let g = load_graph(&a.input)?;
    let f = load_flow(&a.flow)?;
    let report = verify_flow(&g, &f, a.k).map_err(|e| CliError::Rejected(e.to_string()))?;
    if report.ok {
        return emit(out, &format!("valid nowhere-zero {}-flow\n", a.k));
    }
    let mut s = format!("not a nowhere-zero {}-flow\n", a.k);
    for v in &report.violations {
        let _ = writeln!(
            s,
            "  {}",
            serde_json::to_string(v).expect("violations serialize")
        );
    }
    emit(out, &s)?;
    Err(CliError::Rejected(format!(
        "{} violations",
        report.violations.len()
    )))
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = load_graph(&a.input)?;
    let found = match z3_oracle(&g, a.max_rank) {
        Ok(found) => found,
        Err(FlowError::RankCapExceeded { rank, cap }) => {
            return Err(CliError::OracleRefusal { rank, cap })
        }
        Err(e) => return Err(CliError::Internal(e.to_string())),
    };
    let Some(z) = found else {
        return emit(out, "no nowhere-zero 3-flow\n");
    };
    let f = z3_to_integer(&g, &z).map_err(|e| CliError::Internal(e.to_string()))?;
    let report = verify_flow(&g, &f, 3).map_err(|e| CliError::Internal(e.to_string()))?;
    if !report.ok {
        return Err(CliError::Internal(format!(
            "oracle witness failed verification: {:?}",
            report.violations
        )));
    }
    match &a.out {
        Some(p) => {
            write_file(p, &to_json(&f))?;
            emit(out, "nowhere-zero 3-flow found\n")
        }
        None => emit(out, &to_json(&f)),
    }
}

fn render_trace(node: &TraceNode, depth: usize, s: &mut String) {
    let data = serde_json::to_string(&node.data).expect("trace data serializes");
    let _ = writeln!(
        s,
        "{}{} [{}] {}",
        "  ".repeat(depth),
        node.step,
        node.case,
        data
    );
    for c in &node.children {
        render_trace(c, depth + 1, s);
    }
}

/// DOT rendering. Edges labelled by involutions are drawn as rungs (red,
/// bold), the rest as rails. With a flow each edge points along its
/// positive direction and carries its value.
pub fn cayley_dot(cay: &CayleyGraph, flow: Option<&FlowAssignment>) -> String {
    let group = cay.group();
    let mut s = String::new();
    let directed = flow.is_some();
    let _ = writeln!(
        s,
        "{} cayley {{",
        if directed { "digraph" } else { "graph" }
    );
    let _ = writeln!(s, "  label=\"{}\";", group.name().replace('"', "'"));
    let _ = writeln!(s, "  node [shape=circle];");
    for v in 0..cay.graph().vertex_count() {
        let _ = writeln!(s, "  {v};");
    }
    let arrow = if directed { "->" } else { "--" };
    for e in cay.graph().edges() {
        let label = cay.label(e.id);
        let (style, color) = if group.is_involution(label.element) {
            ("bold", "red")
        } else {
            ("solid", "black")
        };
        let (tail, head, text) = match flow.and_then(|f| f.get(e.id)) {
            Some(a) if a.value < 0 => (
                a.head,
                a.tail,
                format!("x={} f={}", label.element, -a.value),
            ),
            Some(a) => (a.tail, a.head, format!("x={} f={}", label.element, a.value)),
            None => (e.u, e.v, format!("x={}", label.element)),
        };
        let _ = writeln!(
            s,
            "  {tail} {arrow} {head} [id=\"e{}\", label=\"{text}\", style={style}, color={color}];",
            e.id
        );
    }
    s.push_str("}\n");
    s
}
