use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use distset_core::classifier::{classify, render_text};
use distset_core::constructions::{glue, graph_space, max_product, space_to_graph, tree_space, Graph, TreeData};
use distset_core::distance_set::{Component, DistanceSetDesc};
use distset_core::metric::{distance_spectrum, FiniteMetricSpace, MatrixFile};
use distset_core::mpf::{check_sufficient_condition, is_metric_preserving_finite, slope_construction, TabulatedFunction};
use distset_core::oracles::{
    find_embedding, find_isometry, graph_embed, graph_iso, verify_reduction, GraphEmbeds, GraphIsomorphic, Isometric,
    Embeds, SearchLimits,
};
use distset_core::rational::Rational;
use distset_core::urysohn::{
    four_values_check, urysohn_stage, verify_one_point_homogeneity, verify_universality, StageDump, UrysohnError,
};

const TOOL: &str = "distset";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "distset", version, about = "Distance-set classification and finite metric space tools")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest domain the oracles will search (default 12, or DISTSET_MAX_POINTS).
    #[arg(long, global = true)]
    max_points: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a distance-set description.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build a space (or graph) from a named construction.
    #[command(subcommand)]
    Construct(Construct),
    /// Search for an isometry or embedding witness.
    Oracle {
        relation: Relation,
        left: PathBuf,
        right: PathBuf,
    },
    /// Check the graph-space reduction and emit a certificate.
    Reduce(ReduceArgs),
    /// Build a finite Urysohn stage and verify it.
    Urysohn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 40)]
        budget: usize,
        #[arg(long, default_value_t = 3)]
        embed_bound: usize,
        #[arg(long, default_value_t = 2)]
        homog_bound: usize,
    },
    /// Check or construct metric-preserving functions.
    #[command(subcommand)]
    Mpf(Mpf),
}

#[derive(Subcommand)]
enum Construct {
    /// X ⊕_r Y.
    Glue {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        r: Rational,
        #[arg(long, default_value_t = 0)]
        xbar: usize,
        #[arg(long, default_value_t = 0)]
        ybar: usize,
    },
    /// Max-metric product X × Z.
    Product { x: PathBuf, z: PathBuf },
    /// Tree space from a tree-data file.
    Tree {
        #[arg(long)]
        input: PathBuf,
    },
    /// Graph to space: edges at r, non-edges at rp.
    GraphSpace {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Rational,
        #[arg(long)]
        rp: Rational,
    },
    /// Space to graph: edges where the distance is r.
    ToGraph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: Rational,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Relation {
    Isometry,
    Embedding,
    GraphIso,
    GraphEmbed,
}

impl Relation {
    fn name(self) -> &'static str {
        match self {
            Relation::Isometry => "isometry",
            Relation::Embedding => "embedding",
            Relation::GraphIso => "graph-iso",
            Relation::GraphEmbed => "graph-embed",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphRelation {
    Iso,
    Embed,
}

#[derive(Args)]
struct ReduceArgs {
    /// JSON list of graph pairs; defaults to every pair on 1..=max-vertices vertices.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    max_vertices: usize,
    #[arg(long, default_value = "1")]
    r: Rational,
    #[arg(long, default_value = "2")]
    rp: Rational,
    #[arg(long, value_enum, default_value_t = GraphRelation::Iso)]
    relation: GraphRelation,
}

#[derive(Subcommand)]
enum Mpf {
    /// Metric-preservation and sufficient-condition checks for a tabulated function.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
    /// Slope construction from explicit tail and pool lists.
    Slope {
        #[arg(long)]
        a: Rational,
        #[arg(long)]
        b: Rational,
        #[arg(long, value_delimiter = ',', required = true)]
        tail: Vec<Rational>,
        #[arg(long, value_delimiter = ',')]
        pool: Vec<Rational>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

/// Input bytes in read order, for the provenance digest.
#[derive(Default)]
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        Ok(bytes)
    }

    fn parse<T: for<'de> Deserialize<'de>>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(path)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))
    }

    fn space(&mut self, path: &Path) -> Result<FiniteMetricSpace, CliError> {
        let file: MatrixFile = self.parse(path)?;
        FiniteMetricSpace::try_from(file).map_err(domain)
    }

    fn graph(&mut self, path: &Path) -> Result<Graph, CliError> {
        let file: GraphFile = self.parse(path)?;
        Graph::new(file.n, file.edges).map_err(domain)
    }

    fn distance_set(&mut self, path: &Path) -> Result<DistanceSetDesc, CliError> {
        let components: Vec<Component> = self.parse(path)?;
        DistanceSetDesc::new(components).map_err(domain)
    }

    /// Arguments other than the output destination and format also feed the
    /// digest, so file-less commands still get a distinguishing value.
    fn arguments<I: IntoIterator<Item = String>>(&mut self, args: I) {
        let mut skip_next = false;
        for arg in args {
            if std::mem::take(&mut skip_next) {
                continue;
            }
            if arg == "--output" || arg == "--format" {
                skip_next = true;
                continue;
            }
            if arg.starts_with("--output=") || arg.starts_with("--format=") {
                continue;
            }
            self.hasher.update((arg.len() as u64).to_le_bytes());
            self.hasher.update(arg.as_bytes());
        }
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[derive(Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// A command's result: JSON payload, text rendering, and whether it should
/// still exit with a domain error after being written.
struct Outcome {
    result: Value,
    text: String,
    failure: Option<String>,
}

impl Outcome {
    fn ok(result: Value, text: String) -> Self {
        Outcome {
            result,
            text,
            failure: None,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn matrix_text(x: &FiniteMetricSpace) -> String {
    let mut out = format!("{} points, spectrum {:?}\n", x.len(), distance_spectrum(x));
    for row in x.matrix() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

fn limits(cli_max: Option<usize>) -> SearchLimits {
    cli_max.map_or_else(SearchLimits::from_env, |max_points| SearchLimits { max_points })
}

fn run_construct(c: &Construct, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let space = match c {
        Construct::Glue { x, y, r, xbar, ybar } => {
            let (x, y) = (inputs.space(x)?, inputs.space(y)?);
            glue(&x, &y, r, *xbar, *ybar).map_err(domain)?
        }
        Construct::Product { x, z } => {
            let (x, z) = (inputs.space(x)?, inputs.space(z)?);
            max_product(&x, &z)
        }
        Construct::Tree { input } => {
            let data: TreeData = inputs.parse(input)?;
            tree_space(&data).map_err(domain)?
        }
        Construct::GraphSpace { input, r, rp } => {
            let g = inputs.graph(input)?;
            graph_space(&g, r, rp).map_err(domain)?
        }
        Construct::ToGraph { input, r } => {
            let x = inputs.space(input)?;
            let g = space_to_graph(&x, r);
            let text = format!("{} vertices, edges {:?}\n", g.n, g.edges);
            return Ok(Outcome::ok(to_value(&g), text));
        }
    };
    let text = matrix_text(&space);
    Ok(Outcome::ok(to_value(&space), text))
}

fn run_oracle(rel: Relation, left: &Path, right: &Path, lim: &SearchLimits, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let witness = match rel {
        Relation::Isometry | Relation::Embedding => {
            let (x, y) = (inputs.space(left)?, inputs.space(right)?);
            if rel == Relation::Isometry {
                find_isometry(&x, &y, lim)
            } else {
                find_embedding(&x, &y, lim)
            }
        }
        Relation::GraphIso | Relation::GraphEmbed => {
            let (g, h) = (inputs.graph(left)?, inputs.graph(right)?);
            if rel == Relation::GraphIso {
                graph_iso(&g, &h, lim)
            } else {
                graph_embed(&g, &h, lim)
            }
        }
    }
    .map_err(domain)?;
    let (value, text) = match &witness {
        Some(w) => (json!(w), format!("{}: {:?}\n", rel.name(), w)),
        None => (json!("none"), format!("{}: none\n", rel.name())),
    };
    Ok(Outcome::ok(json!({ "relation": rel.name(), "witness": value }), text))
}

fn run_reduce(args: &ReduceArgs, lim: &SearchLimits, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    let graph_pairs: Vec<(Graph, Graph)> = match &args.input {
        Some(path) => {
            let files: Vec<(GraphFile, GraphFile)> = inputs.parse(path)?;
            files
                .into_iter()
                .map(|(g, h)| Ok((Graph::new(g.n, g.edges)?, Graph::new(h.n, h.edges)?)))
                .collect::<Result<_, distset_core::constructions::GraphError>>()
                .map_err(domain)?
        }
        None => {
            let graphs: Vec<Graph> = (1..=args.max_vertices).flat_map(Graph::all_on).collect();
            graphs
                .iter()
                .flat_map(|g| graphs.iter().map(move |h| (g.clone(), h.clone())))
                .collect()
        }
    };
    let pairs = graph_pairs
        .into_iter()
        .map(|(g, h)| {
            let fg = graph_space(&g, &args.r, &args.rp)?;
            let fh = graph_space(&h, &args.r, &args.rp)?;
            Ok(((g, h), (fg, fh)))
        })
        .collect::<Result<Vec<_>, distset_core::constructions::ConstructionError>>()
        .map_err(domain)?;
    let cert = match args.relation {
        GraphRelation::Iso => verify_reduction(&pairs, &GraphIsomorphic(*lim), &Isometric(*lim)),
        GraphRelation::Embed => verify_reduction(&pairs, &GraphEmbeds(*lim), &Embeds(*lim)),
    }
    .map_err(domain)?;
    let verdict = if cert.passed() { "PASS" } else { "FAIL" };
    let mut text = format!("{verdict} over {} pairs\n", cert.pairs.len());
    if let Some(i) = cert.counterexample {
        let _ = writeln!(text, "first counterexample: pair {i}");
    }
    Ok(Outcome::ok(to_value(&cert), text))
}

fn run_urysohn(
    input: &Path,
    budget: usize,
    s: usize,
    k: usize,
    lim: &SearchLimits,
    inputs: &mut Inputs,
) -> Result<Outcome, CliError> {
    let desc = inputs.distance_set(input)?;
    let a: BTreeSet<Rational> = desc
        .finite_values()
        .ok_or_else(|| CliError::Domain("urysohn stages need a finite distance set".into()))?;
    let values: Vec<Rational> = a.iter().cloned().collect();
    if let Err(w) = four_values_check(&values) {
        return Err(domain(UrysohnError::FourValuesFails(w)));
    }
    let (stage, failure) = match urysohn_stage(&a, budget, s, k) {
        Ok(stage) => (stage, None),
        Err(UrysohnError::BudgetTooSmall(stage)) => {
            let msg = format!("saturation not reached within {} points", stage.space.len());
            (*stage, Some(msg))
        }
        Err(e) => return Err(domain(e)),
    };
    let universality = verify_universality(&stage.space, &a, s, lim).map_err(domain)?;
    let homogeneity = verify_one_point_homogeneity(&stage.space, k);
    let result = json!({
        "stage": StageDump::from(&stage),
        "universality": { "embed_bound": s, "holds": universality.is_ok(), "missing": universality.as_ref().err() },
        "homogeneity": { "homog_bound": k, "holds": homogeneity.is_ok(), "stuck": homogeneity.as_ref().err() },
    });
    let text = format!(
        "{} points, saturated: {}\nuniversal at size {s}: {}\none-point homogeneous at size {k}: {}\n",
        stage.space.len(),
        stage.saturated,
        universality.is_ok(),
        homogeneity.is_ok()
    );
    Ok(Outcome {
        result,
        text,
        failure,
    })
}

fn run_mpf(m: &Mpf, inputs: &mut Inputs) -> Result<Outcome, CliError> {
    match m {
        Mpf::Check { input } => {
            let pairs: Vec<(Rational, Rational)> = inputs.parse(input)?;
            let f = TabulatedFunction::try_from(pairs).map_err(domain)?;
            let preserving = is_metric_preserving_finite(&f).map_err(domain)?;
            let sufficient = check_sufficient_condition(&f);
            let result = json!({
                "metric_preserving": preserving.is_ok(),
                "witness": preserving.as_ref().err(),
                "sufficient_condition": sufficient,
            });
            let text = format!(
                "metric preserving: {}\nsufficient condition: {sufficient}\n",
                preserving.is_ok()
            );
            Ok(Outcome::ok(result, text))
        }
        Mpf::Slope { a, b, tail, pool } => {
            let f = slope_construction(a, b, tail, pool).map_err(domain)?;
            let text = f.pairs().fold(String::new(), |mut s, (x, y)| {
                let _ = writeln!(s, "{x} -> {y}");
                s
            });
            Ok(Outcome::ok(to_value(&f), text))
        }
    }
}

fn run(cli: &Cli) -> Result<(String, Option<String>), CliError> {
    let lim = limits(cli.max_points);
    let mut inputs = Inputs::default();
    inputs.arguments(std::env::args().skip(1));
    let (subcommand, outcome) = match &cli.command {
        Command::Analyze { input } => {
            let desc = inputs.distance_set(input)?;
            let report = classify(&desc).map_err(domain)?;
            let text = render_text(&report);
            ("analyze", Outcome::ok(to_value(&report), text))
        }
        Command::Construct(c) => ("construct", run_construct(c, &mut inputs)?),
        Command::Oracle { relation, left, right } => ("oracle", run_oracle(*relation, left, right, &lim, &mut inputs)?),
        Command::Reduce(args) => ("reduce", run_reduce(args, &lim, &mut inputs)?),
        Command::Urysohn {
            input,
            budget,
            embed_bound,
            homog_bound,
        } => (
            "urysohn",
            run_urysohn(input, *budget, *embed_bound, *homog_bound, &lim, &mut inputs)?,
        ),
        Command::Mpf(m) => ("mpf", run_mpf(m, &mut inputs)?),
    };
    let digest = inputs.digest();
    let rendered = match cli.format {
        Format::Json => {
            let envelope = json!({
                "tool": TOOL,
                "version": VERSION,
                "subcommand": subcommand,
                "input_digest": digest,
                "result": outcome.result,
            });
            let mut s = serde_json::to_string_pretty(&envelope).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Text => format!("{TOOL} {VERSION} {subcommand} (input sha256 {digest})\n{}", outcome.text),
    };
    Ok((rendered, outcome.failure))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (rendered, failure) = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &rendered).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match failure {
        Some(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
