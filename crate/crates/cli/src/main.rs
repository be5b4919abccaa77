use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use segal_core::double_cat::{self, census_double, check_pointed, check_stable};
use segal_core::graph_segal::{self, build_xg};
use segal_core::hall::{build_hall, check_algebra_laws, is_commutative};
use segal_core::operad::{build_operad, check_invertible, Profile};
use segal_core::simplicial::{check_2segal_pullbacks, check_2segal_triangulations, check_identities};
use segal_core::tree_segal::{self, build_xt};
use segal_core::umap;
use segal_core::{Error, Flavour, Graph, LevelwiseSimplicialSet, RootedForest};

mod reproduce;

/// Build and check 2-Segal sets of rooted trees and graphs.
#[derive(Parser)]
#[command(name = "tseg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tree constructions.
    #[command(subcommand)]
    Segal(SegalCmd),
    /// Graph constructions.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// The map from a tree construction to its graph construction.
    #[command(subcommand)]
    Umap(UmapCmd),
    /// The double category of a reduced set.
    #[command(subcommand)]
    Double(DoubleCmd),
    /// The Hall algebra of a reduced set.
    #[command(subcommand)]
    Hall(HallCmd),
    /// The coloured operad of a set.
    #[command(subcommand)]
    Operad(OperadCmd),
    /// Recompute the reference counts and compare.
    Reproduce {
        /// Include the slower sweeps.
        #[arg(long)]
        all: bool,
        /// Seed for the randomized spot checks.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavourArg {
    Labelled,
    Planar,
    Plain,
}

impl From<FlavourArg> for Flavour {
    fn from(f: FlavourArg) -> Self {
        match f {
            FlavourArg::Labelled => Flavour::Labelled,
            FlavourArg::Planar => Flavour::Planar,
            FlavourArg::Plain => Flavour::Plain,
        }
    }
}

#[derive(Args)]
struct TreeInput {
    /// File holding a tree expression such as `r(a(b,c))`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "labelled")]
    flavour: FlavourArg,
    /// Highest level built; defaults to two more than the vertex count.
    #[arg(long)]
    trunc: Option<usize>,
}

#[derive(Args)]
struct GraphInput {
    /// File with one `u-v` edge per line and an optional `vertices:` line.
    #[arg(long)]
    input: PathBuf,
    /// Identify isomorphic partitioned subgraphs.
    #[arg(long)]
    unlabelled: bool,
    /// Accept loops `v-v`.
    #[arg(long)]
    loops: bool,
    #[arg(long)]
    trunc: Option<usize>,
}

#[derive(Subcommand)]
enum SegalCmd {
    /// Build the set and print its census; `--out` writes the tables.
    Build {
        #[command(flatten)]
        tree: TreeInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the simplicial identities and the 2-Segal conditions.
    Verify {
        #[command(flatten)]
        tree: TreeInput,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Build the set and print its census; `--out` writes the tables.
    Build {
        #[command(flatten)]
        graph: GraphInput,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the simplicial identities and the 2-Segal conditions.
    Verify {
        #[command(flatten)]
        graph: GraphInput,
    },
}

#[derive(Subcommand)]
enum UmapCmd {
    /// Print whether the map is simplicial, CULF and relatively Segal.
    Check {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "labelled")]
        flavour: FlavourArg,
    },
}

#[derive(Subcommand)]
enum DoubleCmd {
    /// Write the morphisms as DOT and the squares as JSON.
    Export {
        /// Tables written by `segal build` or `graph build`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        #[arg(long)]
        squares: PathBuf,
        /// Keep identity morphisms in the DOT output.
        #[arg(long)]
        identities: bool,
        /// Only nondegenerate squares.
        #[arg(long)]
        strict: bool,
    },
    /// Count objects, morphisms and squares and check stability.
    Census {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum HallCmd {
    /// Print the multiplication table.
    Table {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Check associativity and unit, and report commutativity.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum OperadCmd {
    /// List operation sets; `--profile "c1,c2|c0"` takes level-1 ids.
    Ops {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Check that all cocomposition maps are bijections.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        max_arity: Option<usize>,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tseg: {e}");
            ExitCode::from(2)
        }
    }
}

type CliResult = Result<Outcome, String>;

fn run(command: Command) -> CliResult {
    match command {
        Command::Segal(SegalCmd::Build { tree, out }) => {
            let t = read_tree(&tree.input, tree.flavour.into())?;
            let trunc = tree.trunc.unwrap_or_else(|| tree_segal::default_truncation(&t));
            let x = build_xt(&t, tree.flavour.into(), trunc).map_err(err)?;
            write_set(out.as_deref(), x.set())?;
            print_json(&x.census());
            Ok(Outcome::Ok)
        }
        Command::Segal(SegalCmd::Verify { tree }) => {
            let t = read_tree(&tree.input, tree.flavour.into())?;
            let trunc = tree.trunc.unwrap_or_else(|| tree_segal::default_truncation(&t));
            let x = build_xt(&t, tree.flavour.into(), trunc).map_err(err)?;
            verify(x.set())
        }
        Command::Graph(GraphCmd::Build { graph, out }) => {
            let (g, trunc) = read_graph(&graph)?;
            let x = build_xg(&g, !graph.unlabelled, trunc).map_err(err)?;
            write_set(out.as_deref(), x.set())?;
            print_json(&x.census());
            Ok(Outcome::Ok)
        }
        Command::Graph(GraphCmd::Verify { graph }) => {
            let (g, trunc) = read_graph(&graph)?;
            let x = build_xg(&g, !graph.unlabelled, trunc).map_err(err)?;
            verify(x.set())
        }
        Command::Umap(UmapCmd::Check { tree, flavour }) => {
            let t = read_tree(&tree, flavour.into())?;
            let v = umap::verdict(&t, flavour.into()).map_err(err)?;
            print_json(&v);
            Ok(if v.simplicial_map { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Command::Double(DoubleCmd::Export { input, dot, squares, identities, strict }) => {
            let d = double_cat::extract(&read_set(&input)?).map_err(err)?;
            write(&dot, &double_cat::to_dot(&d, d.objects(), identities))?;
            write(&squares, &double_cat::squares_json(&d, strict))?;
            Ok(Outcome::Ok)
        }
        Command::Double(DoubleCmd::Census { input, strict }) => {
            let d = double_cat::extract(&read_set(&input)?).map_err(err)?;
            let stable = check_stable(&d);
            let pointed = check_pointed(&d);
            let laws = double_cat::check_category_laws(&d);
            print_json(&json!({
                "census": census_double(&d, strict),
                "stable": stable,
                "pointed": pointed,
                "category_law_failures": laws.len(),
            }));
            Ok(if stable.holds && pointed.holds && laws.is_empty() { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Command::Hall(HallCmd::Table { input, format }) => {
            let h = build_hall(&read_set(&input)?).map_err(err)?;
            match format {
                TableFormat::Csv => emit(&h.to_csv()),
                TableFormat::Json => emit(&format!("{}\n", h.to_json())),
            }
            Ok(Outcome::Ok)
        }
        Command::Hall(HallCmd::Check { input }) => {
            let h = build_hall(&read_set(&input)?).map_err(err)?;
            let laws = check_algebra_laws(&h);
            let comm = is_commutative(&h);
            let witness = comm.witness.map(|(a, b)| [h.code(a), h.code(b)]);
            print_json(&json!({
                "dimension": h.dim(),
                "law_violations": laws,
                "commutative": comm.commutative,
                "witness": witness,
            }));
            Ok(if laws.is_empty() { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Command::Operad(OperadCmd::Ops { input, profile, max_arity }) => {
            let x = read_set(&input)?;
            let o = build_operad(&x, max_arity).map_err(err)?;
            let listing: Vec<_> = match profile {
                Some(p) => {
                    let p = parse_profile(&p, x.len(1))?;
                    vec![(p.clone(), o.operations(&p).to_vec())]
                }
                None => o.inhabited().into_iter().map(|(p, v)| (p.clone(), v.to_vec())).collect(),
            };
            let rows: Vec<_> = listing
                .iter()
                .map(|(p, ops)| {
                    json!({
                        "inputs": p.inputs,
                        "output": p.output,
                        "operations": ops.iter().map(|&e| x.code(p.inputs.len(), e)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            print_json(&rows);
            Ok(Outcome::Ok)
        }
        Command::Operad(OperadCmd::Verify { input, max_arity }) => {
            let o = build_operad(&read_set(&input)?, max_arity).map_err(err)?;
            let r = check_invertible(&o);
            print_json(&r);
            Ok(if r.holds { Outcome::Ok } else { Outcome::CheckFailed })
        }
        Command::Reproduce { all, seed } => {
            let rows = reproduce::rows(all, seed).map_err(err)?;
            emit(&reproduce::render(&rows));
            Ok(if rows.iter().all(|r| r.matches()) { Outcome::Ok } else { Outcome::CheckFailed })
        }
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn verify(x: &LevelwiseSimplicialSet) -> CliResult {
    let n = x.truncation();
    let identities = check_identities(x);
    let pullbacks = check_2segal_pullbacks(x, n);
    let triangulations = check_2segal_triangulations(x, n.min(6));
    let ok = identities.is_empty() && pullbacks.holds && triangulations.holds;
    print_json(&json!({
        "truncation": n,
        "identity_violations": identities.len(),
        "pullbacks": pullbacks,
        "triangulations": triangulations,
        "two_segal": ok,
    }));
    Ok(if ok { Outcome::Ok } else { Outcome::CheckFailed })
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_tree(path: &Path, flavour: Flavour) -> Result<RootedForest, String> {
    let text: String = read(path)?.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join(" ");
    match RootedForest::parse(&text, Flavour::Labelled) {
        Ok(t) => t.with_flavour(flavour).map_err(err),
        Err(_) => RootedForest::parse(&text, flavour).map_err(err),
    }
}

fn read_graph(input: &GraphInput) -> Result<(Graph, usize), String> {
    let g = Graph::parse(&read(&input.input)?, input.loops).map_err(err)?;
    let g = if input.unlabelled { g.without_labels() } else { g };
    let trunc = input.trunc.unwrap_or_else(|| graph_segal::default_truncation(&g));
    Ok((g, trunc))
}

fn read_set(path: &Path) -> Result<LevelwiseSimplicialSet, String> {
    LevelwiseSimplicialSet::from_json(&read(path)?).map_err(err)
}

fn write_set(out: Option<&Path>, x: &LevelwiseSimplicialSet) -> Result<(), String> {
    match out {
        Some(p) => write(p, &x.to_json()),
        None => Ok(()),
    }
}

fn parse_profile(text: &str, colours: usize) -> Result<Profile, String> {
    let (inputs, output) = text.split_once('|').ok_or("a profile looks like `c1,c2|c0`")?;
    let id = |s: &str| -> Result<u32, String> {
        let c: u32 = s.trim().parse().map_err(|_| format!("`{}` is not a level-1 id", s.trim()))?;
        if c as usize >= colours {
            return Err(format!("level 1 has no element {c}"));
        }
        Ok(c)
    };
    Ok(Profile { inputs: inputs.split(',').map(id).collect::<Result<_, _>>()?, output: id(output)? })
}

fn print_json<T: Serialize>(value: &T) {
    emit(&format!("{}\n", serde_json::to_string_pretty(value).expect("plain data serializes")));
}

/// Writes to stdout; a reader that went away (`tseg .. | head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("tseg: {e}");
            std::process::exit(2);
        }
    }
}
