use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use chirotope::bowtie::DEFAULT_MODULE_CAP;
use chirotope::chain::{chain_count, chain_tree, parse_sigma};
use chirotope::counting::{count_tree, CountOptions};
use chirotope::io::{parse_input, points_to_json, tree_to_json, DbSettings, InputFile};
use chirotope::random::{random_point_tree, RandomTreeSpec};
use chirotope::realization::{realize_tree, search_points, RealizeOptions};
use chirotope::rewrite::{canonical_tree, canonicalize, Strategy};
use chirotope::triangulation::{count_triangulations_brute, DEFAULT_ENUMERATION_CAP, MAX_ENUMERATION};
use chirotope::{Chirotope, ChirotopeTree, NodeId, PointConfig};

#[derive(Parser)]
#[command(name = "chiro", version, about = "Decompose chirotopes and count their triangulations")]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for node polynomials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory holding order-type database files.
    #[arg(long, global = true)]
    db_dir: Option<PathBuf>,
    /// Read 16-bit database coordinates as big-endian.
    #[arg(long, global = true)]
    big_endian: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a chirotope file or the rules of a tree file.
    Validate { file: PathBuf },
    /// Print the extreme elements and the hull cycle.
    Extremes { file: PathBuf },
    /// Print the canonical tree of a chirotope.
    Decompose {
        file: PathBuf,
        /// Largest ground set searched for modules.
        #[arg(long, default_value_t = DEFAULT_MODULE_CAP)]
        max_node_size: usize,
    },
    /// Rewrite a tree into its canonical form.
    Canonicalize {
        file: PathBuf,
        /// Pick rewrite moves at random with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Also rewrite with K random seeds and require identical results.
        #[arg(long, value_name = "K")]
        check_confluence: Option<u64>,
        /// Largest ground set searched for modules.
        #[arg(long, default_value_t = DEFAULT_MODULE_CAP)]
        max_node_size: usize,
    },
    /// Count triangulations exactly.
    Count {
        file: PathBuf,
        /// Enumerate triangulations of the expanded chirotope instead.
        #[arg(long)]
        brute: bool,
        /// Largest chirotope enumerated by `--brute`.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        brute_cap: usize,
        /// Largest ground set searched for modules.
        #[arg(long, default_value_t = DEFAULT_MODULE_CAP)]
        max_node_size: usize,
    },
    /// Count triangulations of a chain of four-point blocks.
    Chain {
        /// One block per character: 0 or 1 for its orientation.
        #[arg(long)]
        sigma: String,
        /// Evaluate the closed formula only.
        #[arg(long)]
        formula_only: bool,
    },
    /// Find exact points realizing a tree or chirotope.
    Realize {
        file: PathBuf,
        /// File to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Attempts per placement and per node search.
        #[arg(long, default_value_t = 48)]
        budget: usize,
        /// Largest ground set searched for modules.
        #[arg(long, default_value_t = DEFAULT_MODULE_CAP)]
        max_node_size: usize,
    },
    /// Write a random tree with point realizations of its nodes.
    RandomTree {
        /// Number of tree nodes.
        #[arg(long)]
        nodes: usize,
        /// Elements per node (the smallest size when --max-node-size is larger).
        #[arg(long)]
        node_size: usize,
        /// Largest node size; defaults to `--node-size`.
        #[arg(long)]
        max_node_size: Option<usize>,
        /// Largest number of edges at a node.
        #[arg(long)]
        max_degree: usize,
        /// Random seed.
        #[arg(long)]
        seed: u64,
        /// Side of the integer grid points are drawn from.
        #[arg(long, default_value_t = 64)]
        grid: i64,
        /// File to write.
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// Command result: text for humans and a JSON value.
struct Output {
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            // A closed pipe on stdout is not a failure of the command.
            let _ = if cli.json { writeln!(io::stdout(), "{}", out.json) } else { writeln!(io::stdout(), "{}", out.text) };
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.json {
                let _ = writeln!(io::stdout(), "{}", json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(1)
        }
    }
}

fn read_input(cli: &Cli, path: &Path) -> Result<InputFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let db = cli.db_dir.as_deref().map(|dir| DbSettings { dir, big_endian: cli.big_endian });
    Ok(parse_input(&text, db).with_context(|| format!("parsing {}", path.display()))?)
}

/// The tree in the file, or the canonical tree of the chirotope in it.
fn read_tree(cli: &Cli, path: &Path, cap: usize) -> Result<(ChirotopeTree, BTreeMap<NodeId, PointConfig>)> {
    Ok(match read_input(cli, path)? {
        InputFile::Tree(t) => (t.tree, t.points),
        InputFile::Chirotope(c) => (canonical_tree(&c.chirotope()?, cap)?, BTreeMap::new()),
    })
}

fn read_chirotope(cli: &Cli, path: &Path) -> Result<Chirotope> {
    Ok(match read_input(cli, path)? {
        InputFile::Tree(t) => t.tree.expand(),
        InputFile::Chirotope(c) => c.chirotope()?,
    })
}

fn names(labels: &[chirotope::Label]) -> Vec<&str> {
    labels.iter().map(|l| l.as_str()).collect()
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn tree_output(tree: &ChirotopeTree) -> Result<Output> {
    let v = tree_to_json(&tree.normalized(), None);
    Ok(Output { text: serde_json::to_string_pretty(&v)?, json: v })
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Validate { file } => match read_input(cli, file)? {
            InputFile::Chirotope(c) => {
                let chi = c.chirotope()?;
                Ok(Output {
                    text: format!("valid chirotope on {} elements", chi.len()),
                    json: json!({ "valid": true, "kind": "chirotope", "elements": chi.len() }),
                })
            }
            InputFile::Tree(t) => Ok(Output {
                text: format!("valid tree with {} nodes on {} elements", t.tree.node_count(), t.tree.total_element_count()),
                json: json!({
                    "valid": true,
                    "kind": "tree",
                    "nodes": t.tree.node_count(),
                    "elements": t.tree.total_element_count(),
                }),
            }),
        },
        Command::Extremes { file } => {
            let chi = read_chirotope(cli, file)?;
            let (ext, hull) = (chi.extremes(), chi.hull_cycle());
            Ok(Output {
                text: format!("extremes: {}\nhull: {}", names(&ext).join(" "), names(&hull).join(" ")),
                json: json!({ "extremes": names(&ext), "hull": names(&hull) }),
            })
        }
        Command::Decompose { file, max_node_size } => {
            let chi = read_chirotope(cli, file)?;
            tree_output(&canonical_tree(&chi, *max_node_size)?)
        }
        Command::Canonicalize { file, seed, check_confluence, max_node_size } => {
            let (tree, _) = read_tree(cli, file, *max_node_size)?;
            let mut strategy = seed.map_or(Strategy::Deterministic, Strategy::seeded);
            let canon = canonicalize(&tree, &mut strategy, *max_node_size)?;
            if let Some(k) = check_confluence {
                let fp = canon.fingerprint();
                let base = seed.unwrap_or(0);
                for s in base..base + k {
                    let other = canonicalize(&tree, &mut Strategy::seeded(s.wrapping_add(1)), *max_node_size)?;
                    if other.fingerprint() != fp {
                        bail!("rewriting with seed {} reached a different canonical tree", s.wrapping_add(1));
                    }
                }
            }
            tree_output(&canon)
        }
        Command::Count { file, brute, brute_cap, max_node_size } => {
            let (count, method) = if *brute {
                let chi = read_chirotope(cli, file)?;
                (count_triangulations_brute(&chi, (*brute_cap).min(MAX_ENUMERATION))?, "brute")
            } else {
                let (tree, _) = read_tree(cli, file, *max_node_size)?;
                (count_tree(&tree, &CountOptions::default())?, "tree")
            };
            Ok(Output { text: count.to_string(), json: json!({ "count": count.to_string(), "method": method }) })
        }
        Command::Chain { sigma, formula_only } => {
            let word = parse_sigma(sigma)?;
            let formula = chain_count(word.len())?;
            if !*formula_only {
                let counted = count_tree(&chain_tree(&word)?, &CountOptions::default())?;
                if counted != formula {
                    bail!("tree count {counted} disagrees with the closed formula {formula}");
                }
            }
            Ok(Output {
                text: formula.to_string(),
                json: json!({ "sigma": sigma, "blocks": word.len(), "count": formula.to_string(), "checked": !*formula_only }),
            })
        }
        Command::Realize { file, output, budget, max_node_size } => {
            let (tree, mut points) = read_tree(cli, file, *max_node_size)?;
            for (id, chi) in tree.nodes() {
                if !points.contains_key(&id) {
                    let pc = search_points(chi, *budget, id.0 as u64).with_context(|| format!("no points found for node {id}"))?;
                    points.insert(id, pc);
                }
            }
            let opts = RealizeOptions { doublings: *budget, ..RealizeOptions::default() };
            let pc = realize_tree(&tree, &points, &opts)?;
            write_json(output, &points_to_json(&pc))?;
            Ok(Output {
                text: format!("realized {} points, coordinates up to {} bits", pc.len(), pc.bit_length()),
                json: json!({ "points": pc.len(), "bits": pc.bit_length(), "output": output.display().to_string() }),
            })
        }
        Command::RandomTree { nodes, node_size, max_node_size, max_degree, seed, grid, output } => {
            let spec = RandomTreeSpec {
                nodes: *nodes,
                min_size: *node_size,
                max_size: max_node_size.unwrap_or(*node_size),
                max_degree: *max_degree,
                grid: *grid,
            };
            let r = random_point_tree(&spec, *seed)?;
            write_json(output, &tree_to_json(&r.tree, Some(&r.points)))?;
            Ok(Output {
                text: format!("wrote tree with {} nodes on {} elements", r.tree.node_count(), r.tree.total_element_count()),
                json: json!({
                    "nodes": r.tree.node_count(),
                    "elements": r.tree.total_element_count(),
                    "fingerprint": r.tree.fingerprint().digest(),
                    "output": output.display().to_string(),
                }),
            })
        }
    }
}
