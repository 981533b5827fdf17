//! `fuzzy-alc`: command-line front end for the fuzzy ALC reasoner.
//!
//! Every subcommand reads a knowledge-base file, expands its terminology and
//! answers one question about it. Output is text by default or JSON with
//! `--format json`, where degrees are exact fraction strings.
//!
//! Exit codes: 0 answered, 1 negative verdict, 2 input error, 3 resource
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fuzzy_alc::oracle::{grid_oracle_entails, GridError};
use fuzzy_alc::parser::{parse_concept, parse_kb, parse_query, ParseError, Query};
use fuzzy_alc::reasoner::{Mode, Reasoner, ReasonerError, ReasonerOptions};
use fuzzy_alc::tableau::{extract_model, ProofLog, SatResult, TableauError, DEFAULT_STEP_BUDGET};
use fuzzy_alc::terminology::{ExpansionOptions, TerminologyError};
use fuzzy_alc::{Assertion, Degree, FuzzyConstraint, KnowledgeBase};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "fuzzy-alc", version, about = "Reasoner for fuzzy ALC knowledge bases")]
struct Cli {
    /// Search regime for satisfiability tests.
    #[arg(long, value_enum, default_value_t = ModeArg::Full, global = true)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Cross-check `entails` answers with the grid oracle.
    #[arg(long, global = true)]
    oracle: bool,
    /// Maximum number of concept nodes the terminology expansion may produce.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Maximum number of rule applications per satisfiability test.
    #[arg(long, global = true, default_value_t = DEFAULT_STEP_BUDGET)]
    steps: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Full,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate the KB and report whether it is satisfiable.
    Check { kb: PathBuf },
    /// Decide whether the KB entails a fuzzy assertion such as "(a : C) >= 0.5".
    Entails {
        kb: PathBuf,
        query: String,
        /// Print the tableau proof log of the refutation.
        #[arg(long)]
        proof: bool,
    },
    /// Greatest lower bound of the truth degree of an assertion.
    Glb { kb: PathBuf, assertion: String },
    /// Least upper bound of the truth degree of an assertion.
    Lub { kb: PathBuf, assertion: String },
    /// Decide whether concept C is subsumed by concept D under the KB's terminology.
    Subsumes { kb: PathBuf, sub: String, sup: String },
    /// Print the canonical model of the first clash-free completion.
    Model { kb: PathBuf },
    /// Rank all individuals by the glb of their membership in a concept.
    Rank {
        kb: PathBuf,
        concept: String,
        /// Compute the bounds concurrently.
        #[arg(long)]
        parallel: bool,
    },
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Resource(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Resource(_) => 3,
        }
    }
}

impl From<ReasonerError> for Failure {
    fn from(e: ReasonerError) -> Self {
        match e {
            ReasonerError::Terminology(TerminologyError::BudgetExceeded { .. })
            | ReasonerError::Tableau(TableauError::BudgetExceeded(_)) => Failure::Resource(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<GridError> for Failure {
    fn from(e: GridError) -> Self {
        match e {
            GridError::TooLarge(_) => Failure::Resource(format!("oracle: {e}")),
            other => Failure::Input(format!("oracle: {other}")),
        }
    }
}

/// What a subcommand produced: the text and JSON renderings and whether
/// the verdict was positive.
struct Answer {
    text: String,
    json: Value,
    positive: bool,
}

fn parse_error(source: &str, e: ParseError) -> Failure {
    Failure::Input(format!("{source}:{e}"))
}

fn load(path: &Path) -> Result<KnowledgeBase, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_kb(&text).map_err(|e| parse_error(&path.display().to_string(), e))
}

fn options(cli: &Cli) -> ReasonerOptions {
    let mut expansion = ExpansionOptions::default();
    if let Some(budget) = cli.budget {
        expansion.budget = budget;
    }
    let mode = match cli.mode {
        ModeArg::Full => Mode::Full,
        ModeArg::Trace => Mode::Trace,
    };
    ReasonerOptions { mode, expansion, step_budget: cli.steps }
}

fn query_constraint(text: &str) -> Result<FuzzyConstraint, Failure> {
    match parse_query(text).map_err(|e| parse_error("query", e))? {
        Query::Constraint(c) => Ok(c),
        Query::Assertion(a) => Err(Failure::Input(format!("query `{a}` needs a bound such as `>= 0.5`"))),
    }
}

fn query_assertion(text: &str) -> Result<Assertion, Failure> {
    match parse_query(text).map_err(|e| parse_error("query", e))? {
        Query::Assertion(a) => Ok(a),
        Query::Constraint(c) => Err(Failure::Input(format!("`{c}` has a bound; give the bare assertion"))),
    }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({ "schemaVersion": SCHEMA_VERSION, "command": command });
    if let (Value::Object(out), Value::Object(body)) = (&mut out, body) {
        out.extend(body);
    }
    out
}

fn verdict(positive: bool) -> String {
    positive.to_string()
}

fn check(reasoner: &Reasoner) -> Result<Answer, Failure> {
    let satisfiable = reasoner.is_satisfiable()?;
    let report = reasoner.expansion_report();
    let text = if satisfiable { "satisfiable" } else { "unsatisfiable" }.to_string();
    let json = envelope(
        "check",
        json!({
            "satisfiable": satisfiable,
            "individuals": reasoner.individuals().iter().map(|n| n.as_ref()).collect::<Vec<_>>(),
            "assertions": reasoner.abox().len(),
            "introducedPrimitives": report.introduced_primitives.iter().map(|n| n.as_ref()).collect::<Vec<_>>(),
            "expansion": { "sizeBefore": report.size_before, "sizeAfter": report.size_after },
        }),
    );
    Ok(Answer { text, json, positive: satisfiable })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OracleReport {
    entailed: bool,
    domain_bound: usize,
    agrees: bool,
}

fn entails(cli: &Cli, reasoner: &Reasoner, text: &str, proof: bool) -> Result<Answer, Failure> {
    let query = query_constraint(text)?;
    let entailed = reasoner.entails(&query)?;
    let mut lines = vec![verdict(entailed)];
    let mut body = json!({ "query": query.to_string(), "entailed": entailed });

    if cli.oracle {
        let kb = KnowledgeBase::assertional(reasoner.abox().to_vec());
        let expanded = FuzzyConstraint::new(reasoner.expand_assertion(&query.assertion)?, query.rel, query.degree.clone());
        let grid = grid_oracle_entails(&kb, &expanded, None)?;
        let report = OracleReport { entailed: grid.entailed, domain_bound: grid.domain_bound, agrees: grid.entailed == entailed };
        if !report.agrees {
            eprintln!("warning: the grid oracle answers {} within domain bound {}", grid.entailed, grid.domain_bound);
        }
        lines.push(format!("oracle: {} (domain bound {})", grid.entailed, grid.domain_bound));
        body["oracle"] = serde_json::to_value(&report).expect("oracle report serializes");
    }
    if proof {
        let outcome = reasoner.search(Some(&query), true)?;
        let log: ProofLog = outcome.proof.unwrap_or_default();
        lines.push(log.to_string().trim_end().to_string());
        body["proof"] = serde_json::to_value(&log).expect("proof log serializes");
        body["stats"] = serde_json::to_value(outcome.stats).expect("stats serialize");
    }
    Ok(Answer { text: lines.join("\n"), json: envelope("entails", body), positive: entailed })
}

fn bound(reasoner: &Reasoner, text: &str, upper: bool) -> Result<Answer, Failure> {
    let assertion = query_assertion(text)?;
    let result = if upper { reasoner.lub(&assertion)? } else { reasoner.glb(&assertion)? };
    let command = if upper { "lub" } else { "glb" };
    let mut text = format!(
        "{}\ncandidates: {}\nentailment tests: {}",
        result.degree,
        result.candidates.len(),
        result.entailment_tests
    );
    if result.inconsistent {
        text.push_str("\nthe knowledge base is unsatisfiable");
    }
    let json = envelope(
        command,
        json!({
            "assertion": assertion.to_string(),
            "degree": result.degree,
            "candidates": result.candidates,
            "entailmentTests": result.entailment_tests,
            "inconsistent": result.inconsistent,
        }),
    );
    Ok(Answer { text, json, positive: true })
}

fn subsumes(reasoner: &Reasoner, sub: &str, sup: &str) -> Result<Answer, Failure> {
    let c = parse_concept(sub).map_err(|e| parse_error("concept", e))?;
    let d = parse_concept(sup).map_err(|e| parse_error("concept", e))?;
    let subsumed = reasoner.subsumes(&c, &d)?;
    let json = envelope("subsumes", json!({ "sub": c.to_string(), "sup": d.to_string(), "subsumed": subsumed }));
    Ok(Answer { text: verdict(subsumed), json, positive: subsumed })
}

fn model(reasoner: &Reasoner) -> Result<Answer, Failure> {
    // The canonical model needs a full completion, whatever the mode.
    let SatResult::Satisfiable(completion) = reasoner.search(None, false)?.result else {
        return Ok(Answer { text: "UNSAT".into(), json: envelope("model", json!({ "satisfiable": false })), positive: false });
    };
    let interp = extract_model(&completion).map_err(|e| Failure::Input(format!("model extraction failed: {e}")))?;
    let mut lines = vec![format!(
        "domain: {{{}}}",
        interp.domain().iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    )];
    let mut concepts = Vec::new();
    for (name, element, degree) in interp.concept_entries() {
        lines.push(format!("{name}({element}) = {degree}"));
        concepts.push(json!({ "concept": name.as_ref(), "element": element.to_string(), "degree": degree }));
    }
    let mut roles = Vec::new();
    for (name, from, to, degree) in interp.role_entries() {
        lines.push(format!("{name}({from}, {to}) = {degree}"));
        roles.push(json!({ "role": name.as_ref(), "from": from.to_string(), "to": to.to_string(), "degree": degree }));
    }
    let domain: Vec<String> = interp.domain().iter().map(ToString::to_string).collect();
    let json = envelope(
        "model",
        json!({ "satisfiable": true, "domain": domain, "concepts": concepts, "roles": roles }),
    );
    Ok(Answer { text: lines.join("\n"), json, positive: true })
}

fn rank(reasoner: &Reasoner, text: &str, parallel: bool) -> Result<Answer, Failure> {
    let concept = parse_concept(text).map_err(|e| parse_error("concept", e))?;
    let ranked: Vec<(fuzzy_alc::Name, Degree)> = reasoner.rank(&concept, parallel)?;
    let text = ranked.iter().map(|(n, d)| format!("{n} {d}")).collect::<Vec<_>>().join("\n");
    let entries: Vec<Value> = ranked.iter().map(|(n, d)| json!({ "individual": n.as_ref(), "degree": d })).collect();
    let json = envelope("rank", json!({ "concept": concept.to_string(), "ranking": entries }));
    Ok(Answer { text, json, positive: true })
}

fn run(cli: &Cli) -> Result<Answer, Failure> {
    let kb_path = match &cli.command {
        Command::Check { kb }
        | Command::Entails { kb, .. }
        | Command::Glb { kb, .. }
        | Command::Lub { kb, .. }
        | Command::Subsumes { kb, .. }
        | Command::Model { kb }
        | Command::Rank { kb, .. } => kb,
    };
    let kb = load(kb_path)?;
    let reasoner = Reasoner::with_options(&kb, options(cli))?;
    match &cli.command {
        Command::Check { .. } => check(&reasoner),
        Command::Entails { query, proof, .. } => entails(cli, &reasoner, query, *proof),
        Command::Glb { assertion, .. } => bound(&reasoner, assertion, false),
        Command::Lub { assertion, .. } => bound(&reasoner, assertion, true),
        Command::Subsumes { sub, sup, .. } => subsumes(&reasoner, sub, sup),
        Command::Model { .. } => model(&reasoner),
        Command::Rank { concept, parallel, .. } => rank(&reasoner, concept, *parallel),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(answer) => {
            match cli.format {
                Format::Text => println!("{}", answer.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&answer.json).expect("JSON output serializes")),
            }
            ExitCode::from(if answer.positive { 0 } else { 1 })
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
