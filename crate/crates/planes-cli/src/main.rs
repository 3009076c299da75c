//! Command line for the planes library.
//!
//! Exit codes: 0 = success or predicate true, 1 = predicate false,
//! 2 = usage or operation error.

use std::collections::BTreeSet;
use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use planes::amalgam::{canonical_amalgam_with_budget, free_amalgam, AmalgamSpec};
use planes::completion::free_complete_with_budget;
use planes::digraph::{compatible_ordering, cl_closure, digraph_from_ordering, Compat};
use planes::gadgets::{
    build_c_gadget_with_budget, build_coded_chain, build_superstability_gadget,
    build_tree_digraph_with_budget, CodedChainSpec, GadgetResult,
};
use planes::iso::isomorphism_search_with_budget;
use planes::json;
use planes::openness::{confined_core, extract_hf_ordering, rank};
use planes::plane::{ElementId, PartialPlane};
use planes::{PlaneError, Result, DEFAULT_ELEMENT_BUDGET, DEFAULT_ISO_BUDGET};

#[derive(Parser)]
#[command(name = "planes", version, about = "Partial planes, free completions and gadgets")]
#[command(after_help = "Plane arguments name JSON files; \"-\" reads standard input. \
Set PLANES_BUDGET to override the element and search ceilings.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a plane document against the axioms and print its size.
    Validate { input: String },
    /// Write the dual plane.
    Dual { input: String, output: Option<String> },
    /// Free-complete a plane for k stages; writes a staged document.
    Complete {
        input: String,
        #[arg(short)]
        k: usize,
        output: Option<String>,
    },
    /// Exit 0 if the plane is open, else print the confined core and exit 1.
    CheckOpen { input: String },
    /// Extract a hyper-free ordering over a base, if one exists.
    HfOrder {
        input: String,
        /// Base element labels, comma separated.
        #[arg(long, value_delimiter = ',')]
        base: Vec<String>,
    },
    /// Print the rank of an open plane.
    Rank { input: String },
    /// Orient a plane's incidences along an ordering document.
    Digraph { input: String, ordering: String },
    /// Find an ordering compatible with a digraph, or print a cycle and exit 1.
    Compat { input: String },
    /// Compute the predecessor closure of a set in a digraph.
    Closure {
        input: String,
        /// Non-base element labels, comma separated.
        #[arg(long, value_delimiter = ',')]
        set: Vec<String>,
    },
    /// Glue two planes along shared labels; -k additionally completes.
    Amalgam {
        left: String,
        right: String,
        /// Labels identified between the two sides, comma separated.
        #[arg(long, value_delimiter = ',')]
        shared: Vec<String>,
        #[arg(short)]
        k: Option<usize>,
        output: Option<String>,
    },
    /// Build one of the named constructions.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Search for an isomorphism; exit 1 when none exists.
    Iso {
        left: String,
        right: String,
        /// JSON object mapping left labels to right labels.
        #[arg(long)]
        pin: Option<String>,
    },
}

#[derive(Args)]
struct GadgetOut {
    /// Print the incidence table instead of the JSON document.
    #[arg(long)]
    emit_table: bool,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// The 21-step construction with its forced-last point.
    Superstab {
        #[command(flatten)]
        out: GadgetOut,
    },
    /// A chain of superstability gadgets coded by a bit string.
    Chain {
        #[arg(long)]
        eta: String,
        #[command(flatten)]
        out: GadgetOut,
    },
    /// The apex point F-constructed from 2^(2n) base points.
    Ctree {
        #[arg(short)]
        n: u32,
        #[command(flatten)]
        out: GadgetOut,
    },
    /// The complete binary tree digraph of the given depth.
    Tree {
        #[arg(short)]
        d: u32,
        #[command(flatten)]
        out: GadgetOut,
    },
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| PlaneError::InvalidDocument(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| PlaneError::InvalidDocument(format!("{path}: {e}")))
    }
}

fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        r => r.map_err(|e| PlaneError::InvalidDocument(format!("stdout: {e}"))),
    }
}

fn write_output(path: Option<&str>, text: &str) -> Result<()> {
    match path {
        None | Some("-") => emit(text),
        Some(p) => std::fs::write(p, text)
            .map_err(|e| PlaneError::InvalidDocument(format!("{p}: {e}"))),
    }
}

fn load_plane(path: &str) -> Result<PartialPlane> {
    json::plane_or_staged_from_json(&read_input(path)?)
}

fn env_budget(default: usize) -> usize {
    match std::env::var("PLANES_BUDGET") {
        Ok(s) => s.parse().unwrap_or(default),
        Err(_) => default,
    }
}

fn resolve_set(plane: &PartialPlane, labels: &[String]) -> Result<BTreeSet<ElementId>> {
    labels.iter().map(|l| plane.require(l)).collect()
}

fn labels_json(plane: &PartialPlane, set: &BTreeSet<ElementId>) -> String {
    let labels: Vec<&str> = set.iter().map(|&e| plane.label(e)).collect();
    let mut out = serde_json::to_string_pretty(&labels).expect("string array");
    out.push('\n');
    out
}

fn emit_gadget(g: &GadgetResult, out: &GadgetOut) -> Result<()> {
    let text = if out.emit_table {
        g.table.clone()
    } else {
        json::gadget_to_json(g)
    };
    write_output(out.out.as_deref(), &text)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let budget = env_budget(DEFAULT_ELEMENT_BUDGET);
    match cli.command {
        Command::Validate { input } => {
            let plane = load_plane(&input)?;
            emit(&format!(
                "{} points, {} lines, {} incidences\n",
                plane.n_points(),
                plane.n_lines(),
                plane.n_incidences()
            ))?;
        }
        Command::Dual { input, output } => {
            let plane = load_plane(&input)?;
            write_output(output.as_deref(), &json::plane_to_json(&plane.dual()))?;
        }
        Command::Complete { input, k, output } => {
            let plane = load_plane(&input)?;
            let staged = free_complete_with_budget(&plane, k, budget)?;
            write_output(output.as_deref(), &json::staged_to_json(&staged))?;
        }
        Command::CheckOpen { input } => {
            let plane = load_plane(&input)?;
            let report = confined_core(&plane, &BTreeSet::new())?;
            if !report.residual_core.is_empty() {
                emit(&labels_json(&plane, &report.residual_core))?;
                return Ok(ExitCode::from(1));
            }
        }
        Command::HfOrder { input, base } => {
            let plane = load_plane(&input)?;
            let base = resolve_set(&plane, &base)?;
            match extract_hf_ordering(&plane, &base)? {
                Some(o) => emit(&json::ordering_to_json(&plane, &o))?,
                None => return Ok(ExitCode::from(1)),
            }
        }
        Command::Rank { input } => {
            let plane = load_plane(&input)?;
            emit(&format!("{}\n", rank(&plane)?))?;
        }
        Command::Digraph { input, ordering } => {
            let plane = load_plane(&input)?;
            let o = json::ordering_from_json(&plane, &read_input(&ordering)?)?;
            let d = digraph_from_ordering(&plane, &o)?;
            emit(&json::digraph_to_json(&d))?;
        }
        Command::Compat { input } => {
            let d = json::digraph_from_json(&read_input(&input)?)?;
            match compatible_ordering(&d) {
                Compat::Ordering(o) => emit(&json::ordering_to_json(d.plane(), &o))?,
                Compat::Cycle(cycle) => {
                    let set: BTreeSet<ElementId> = cycle.iter().copied().collect();
                    emit(&labels_json(d.plane(), &set))?;
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Closure { input, set } => {
            let d = json::digraph_from_json(&read_input(&input)?)?;
            let set = resolve_set(d.plane(), &set)?;
            let closed = cl_closure(&d, &set)?;
            emit(&labels_json(d.plane(), &closed))?;
        }
        Command::Amalgam { left, right, shared, k, output } => {
            let spec = AmalgamSpec::by_labels(load_plane(&left)?, load_plane(&right)?, &shared);
            let text = match k {
                None => json::plane_to_json(&free_amalgam(&spec)?),
                Some(k) => {
                    let c = canonical_amalgam_with_budget(&spec, k, budget)?;
                    for w in &c.warnings {
                        eprintln!("warning: {w}");
                    }
                    json::staged_to_json(&c.staged)
                }
            };
            write_output(output.as_deref(), &text)?;
        }
        Command::Gadget { which } => match which {
            GadgetCommand::Superstab { out } => emit_gadget(&build_superstability_gadget(), &out)?,
            GadgetCommand::Chain { eta, out } => {
                emit_gadget(&build_coded_chain(&CodedChainSpec::parse(&eta)?)?, &out)?
            }
            GadgetCommand::Ctree { n, out } => {
                emit_gadget(&build_c_gadget_with_budget(n, budget)?, &out)?
            }
            GadgetCommand::Tree { d, out } => {
                let tree = build_tree_digraph_with_budget(d, budget)?;
                let text = if out.emit_table {
                    return Err(PlaneError::InvalidGadget(
                        "the tree digraph has no incidence table".to_string(),
                    ));
                } else {
                    json::digraph_to_json(&tree)
                };
                write_output(out.out.as_deref(), &text)?
            }
        },
        Command::Iso { left, right, pin } => {
            let p1 = load_plane(&left)?;
            let p2 = load_plane(&right)?;
            let mut pins = Vec::new();
            if let Some(path) = pin {
                let map: std::collections::BTreeMap<String, String> =
                    serde_json::from_str(&read_input(&path)?)?;
                for (a, b) in &map {
                    pins.push((p1.require(a)?, p2.require(b)?));
                }
            }
            let iso_budget = env_budget(DEFAULT_ISO_BUDGET);
            match isomorphism_search_with_budget(&p1, &p2, &pins, iso_budget)? {
                Some(map) => {
                    let pairs: Vec<[String; 2]> = map
                        .pairs()
                        .iter()
                        .map(|&(a, b)| [p1.label(a).to_string(), p2.label(b).to_string()])
                        .collect();
                    let doc = serde_json::json!({ "isomorphic": true, "pairs": pairs });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("document")))?;
                }
                None => {
                    let doc = serde_json::json!({ "isomorphic": false });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&doc).expect("document")))?;
                    return Ok(ExitCode::from(1));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
