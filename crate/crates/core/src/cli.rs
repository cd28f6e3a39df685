//! Command-line interface.
//!
//! Exit status 0 means success (or a positive verdict), 1 a negative
//! verdict or failed check, 2 a usage, input or parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::branch::{
    self, exact_branch_decomposition, greedy_branch_decomposition, parse_branch_tree,
    parse_rooted_tree, root_tree, write_branch_tree, RootedBranchTree, MAX_EXACT,
};
use crate::construct::construct_with_data;
use crate::decomp::{parse_decomposition, write_decomposition, KDecomposition};
use crate::matroid::oracle::{self, MAX_BRUTE};
use crate::matroid::{parse_matroid, ElementSet, MatroidInstance};
use crate::tutte::{self, parse_rational, EvalMode};
use crate::verify::{extract_witness, verify, Verdict};

#[derive(Parser, Debug)]
#[command(name = "dwidth", version, about = "K-decompositions of matroids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Search {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Basis {
    Whitney,
    Xy,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a K-decomposition from a represented matroid.
    Construct {
        #[arg(long)]
        matroid: PathBuf,
        /// Branch tree file, rooted or unrooted.
        #[arg(long, conflicts_with = "bd_search")]
        bd: Option<PathBuf>,
        /// Branch-decomposition search when no tree is given (default: exact
        /// for small ground sets, greedy otherwise).
        #[arg(long, value_enum)]
        bd_search: Option<Search>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Decide whether a decomposition describes a matroid.
    Verify { file: PathBuf },
    /// Rank of a subset.
    Rank {
        file: PathBuf,
        /// Comma-separated element indices; empty for the empty set.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
    },
    /// Tutte polynomial coefficients.
    Tutte {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "xy")]
        basis: Basis,
    },
    /// Evaluate the Tutte polynomial at a rational point.
    TutteEval {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Branch-decomposition search and width.
    Bw {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long)]
        exact: bool,
    },
    /// Compare decomposition ranks with the matroid on every subset.
    Check {
        file: PathBuf,
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long, required = true)]
        exhaustive: bool,
    },
    /// Whitney counts by brute force.
    OracleTutte {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long, value_enum, default_value = "whitney")]
        basis: Basis,
    },
}

/// A failure carrying its exit status.
struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        msg: msg.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_matroid(path: &Path) -> Result<MatroidInstance, Failure> {
    parse_matroid(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_decomposition(path: &Path) -> Result<KDecomposition, Failure> {
    parse_decomposition(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path, n: usize) -> Result<RootedBranchTree, Failure> {
    let text = read(path)?;
    let rooted = text
        .lines()
        .any(|l| l.split_whitespace().next() == Some("root"));
    let tree = if rooted {
        parse_rooted_tree(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        let t = parse_branch_tree(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        root_tree(&t, None).map_err(|e| usage(e.to_string()))?
    };
    if tree.len() != n {
        return Err(usage(format!(
            "branch tree has {} leaves, matroid has {n} elements",
            tree.len()
        )));
    }
    Ok(tree)
}

fn search_tree(m: &MatroidInstance, search: Search) -> Result<(branch::BranchTree, usize), Failure> {
    match search {
        Search::Exact => exact_branch_decomposition(m).map_err(|e| usage(e.to_string())),
        Search::Greedy => Ok(greedy_branch_decomposition(m)),
    }
}

fn parse_set(n: usize, s: &str) -> Result<ElementSet, Failure> {
    let mut set = ElementSet::empty(n);
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let e: usize = tok
            .parse()
            .map_err(|_| usage(format!("invalid element {tok:?}")))?;
        if e >= n {
            return Err(usage(format!("element {e} out of range for n={n}")));
        }
        set.insert(e);
    }
    Ok(set)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("write failed: {e}"));
    match cmd {
        Command::Construct {
            matroid,
            bd,
            bd_search,
            output,
        } => {
            let m = load_matroid(&matroid)?;
            let linear = m.to_linear().map_err(|e| usage(e.to_string()))?;
            let tree = match bd {
                Some(path) => load_tree(&path, m.len())?,
                None => {
                    let search = bd_search.unwrap_or(if m.len() <= MAX_EXACT {
                        Search::Exact
                    } else {
                        Search::Greedy
                    });
                    let (t, _) = search_tree(&m, search)?;
                    root_tree(&t, None).map_err(|e| usage(e.to_string()))?
                }
            };
            let c = construct_with_data(&linear, &tree).map_err(|e| usage(e.to_string()))?;
            fs::write(&output, write_decomposition(&c.decomposition))
                .map_err(|e| usage(format!("{}: {e}", output.display())))?;
            writeln!(
                out,
                "K={} boundary_dim={}",
                c.decomposition.width(),
                c.max_boundary_dim()
            )
            .map_err(io)?;
            Ok(0)
        }
        Command::Verify { file } => {
            let d = load_decomposition(&file)?;
            let verdict = match verify(&d) {
                Ok(v) => v,
                Err(e) => {
                    writeln!(out, "not a matroid: {e}").map_err(io)?;
                    return Ok(1);
                }
            };
            writeln!(out, "{verdict}").map_err(io)?;
            if verdict == Verdict::Matroid {
                return Ok(0);
            }
            if let Ok((a, b)) = extract_witness(&d, &verdict) {
                let r = |s: &ElementSet| d.eval_rank(s).map(|x| x.to_string()).unwrap_or_default();
                writeln!(out, "A = {a} r(A) = {}", r(&a)).map_err(io)?;
                writeln!(out, "B = {b} r(B) = {}", r(&b)).map_err(io)?;
                writeln!(
                    out,
                    "A∪B = {u} r(A∪B) = {}\nA∩B = {i} r(A∩B) = {}",
                    r(&a.union(&b)),
                    r(&a.intersection(&b)),
                    u = a.union(&b),
                    i = a.intersection(&b)
                )
                .map_err(io)?;
            }
            Ok(1)
        }
        Command::Rank { file, set } => {
            let d = load_decomposition(&file)?;
            let f = parse_set(d.len(), &set)?;
            let r = d.eval_rank(&f).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "{r}").map_err(io)?;
            Ok(0)
        }
        Command::Tutte { file, basis } => {
            let d = load_decomposition(&file)?;
            let w = tutte::whitney_coefficients(&d).map_err(|e| usage(e.to_string()))?;
            let text = match basis {
                Basis::Whitney => w.to_text(),
                Basis::Xy => tutte::to_tutte(&w).to_text(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::TutteEval {
            file,
            x,
            y,
            modulus,
        } => {
            let parse = |s: &str| parse_rational(s).ok_or_else(|| usage(format!("invalid rational {s:?}")));
            let (x, y) = (parse(&x)?, parse(&y)?);
            let mode = match modulus {
                None => EvalMode::Exact,
                Some(0) => return Err(usage("modulus must be positive")),
                Some(m) => EvalMode::Modular(m),
            };
            let d = load_decomposition(&file)?;
            let value = tutte::evaluate(&d, &x, &y, mode).map_err(|e| usage(e.to_string()))?;
            writeln!(out, "{value}").map_err(io)?;
            Ok(0)
        }
        Command::Bw { matroid, exact } => {
            let m = load_matroid(&matroid)?;
            let (t, w) = search_tree(&m, if exact { Search::Exact } else { Search::Greedy })?;
            writeln!(out, "# width {w}").map_err(io)?;
            out.write_all(write_branch_tree(&t).as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Check {
            file,
            matroid,
            exhaustive: _,
        } => {
            let d = load_decomposition(&file)?;
            let m = load_matroid(&matroid)?;
            if d.len() != m.len() {
                return Err(usage(format!(
                    "decomposition has {} elements, matroid has {}",
                    d.len(),
                    m.len()
                )));
            }
            let table = oracle::rank_table(&m).map_err(|e| usage(e.to_string()))?;
            for (mask, &want) in table.iter().enumerate() {
                let f = ElementSet::from_mask(m.len(), mask as u64);
                let got = d.eval_rank(&f).map_err(|e| usage(e.to_string()))?;
                if got != want as i64 {
                    writeln!(out, "mismatch at {f}: decomposition {got}, matroid {want}").map_err(io)?;
                    return Ok(1);
                }
            }
            writeln!(out, "ok: {} subsets agree", table.len()).map_err(io)?;
            Ok(0)
        }
        Command::OracleTutte { matroid, basis } => {
            let m = load_matroid(&matroid)?;
            if m.len() > MAX_BRUTE {
                return Err(usage(format!("brute force limited to {MAX_BRUTE} elements")));
            }
            let w = oracle::brute_whitney(&m).map_err(|e| usage(e.to_string()))?;
            let text = match basis {
                Basis::Whitney => w.to_text(),
                Basis::Xy => tutte::to_tutte(&w).to_text(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
