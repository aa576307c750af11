//! Command-line workflow around the line sum library.
//!
//! Exit codes: 0 ok, 1 verify failure, 2 incompatible/unrealizable,
//! 3 malformed, 64 parse error, 65 shape mismatch, 70 internal error,
//! 75 budget exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linesum::construct::{build, verify};
use linesum::files::{InstanceFile, TensorFile};
use linesum::linesum::{compatible, maximal_matrix, LineSumArray};
use linesum::oracle::{solve, SearchBudget};
use linesum::symmetric::build_symmetric;
use linesum::tensor::{iter_lines, Shape, Tensor};
use linesum::{Error, Verdict};

#[derive(Parser)]
#[command(
    name = "linesum",
    version,
    about = "Line sum arrays of q-ary multidimensional matrices: check, build, verify"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether an instance is compatible (realizable)
    Check {
        /// Instance JSON file
        instance: PathBuf,
    },
    /// Construct a tensor realizing the instance
    Build {
        instance: PathBuf,
        /// Output tensor JSON file
        #[arg(short, long)]
        output: PathBuf,
        /// Require a symmetric realization (cube shapes only)
        #[arg(long)]
        symmetric: bool,
    },
    /// Check that a tensor has exactly the prescribed line sums
    Verify { tensor: PathBuf, instance: PathBuf },
    /// Write the line sum array of a tensor as an instance file
    Linesums {
        tensor: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a valid instance from a random tensor (seeded, reproducible)
    Gen {
        /// Comma-separated extents, e.g. 3,3,2
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        /// Alphabet size (entries range over 0..q-1)
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample a symmetric tensor (cube shapes only)
        #[arg(long)]
        symmetric: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Exhaustive search: find any realization or prove none exists
    Oracle {
        instance: PathBuf,
        /// Search symmetric realizations only
        #[arg(long)]
        symmetric: bool,
        /// Node budget for the backtracking search
        #[arg(long, default_value_t = 100_000_000)]
        max_nodes: u64,
    },
    /// Write the maximal matrix packed along one axis
    Maximal {
        instance: PathBuf,
        /// Packing axis (1-based)
        #[arg(long)]
        axis: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    };
    ExitCode::from(code)
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::NotRealizable(v) => match **v {
            Verdict::Malformed(_) => 3,
            _ => 2,
        },
        Error::Unrealizable(_) | Error::SymmetricUnrealizable(_) => 2,
        Error::Shape(_) | Error::Bounds(_) | Error::Input(_) => 64,
        Error::BudgetExceeded(_) => 75,
        Error::RepairExhausted(_) | Error::Internal { .. } => 70,
    }
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Check { instance } => cmd_check(&instance),
        Cmd::Build {
            instance,
            output,
            symmetric,
        } => cmd_build(&instance, &output, symmetric),
        Cmd::Verify { tensor, instance } => cmd_verify(&tensor, &instance),
        Cmd::Linesums { tensor, output } => cmd_linesums(&tensor, &output),
        Cmd::Gen {
            shape,
            q,
            seed,
            symmetric,
            output,
        } => cmd_gen(shape, q, seed, symmetric, &output),
        Cmd::Oracle {
            instance,
            symmetric,
            max_nodes,
        } => cmd_oracle(&instance, symmetric, max_nodes),
        Cmd::Maximal {
            instance,
            axis,
            output,
        } => cmd_maximal(&instance, axis, &output),
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<LineSumArray, Error> {
    InstanceFile::from_json(&read_text(path)?)?.into_array()
}

fn read_tensor(path: &Path) -> Result<Tensor, Error> {
    TensorFile::from_json(&read_text(path)?)?.into_tensor()
}

/// Space-separated digit grid, one matrix row (axis 1) per line. d=2 only.
fn grid(m: &Tensor) -> String {
    let (n1, n2) = (m.shape().extent(1), m.shape().extent(2));
    let mut out = String::new();
    for i in 1..=n1 {
        let row: Vec<String> = (1..=n2).map(|j| m.get(&[i, j]).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn cmd_check(instance: &Path) -> Result<u8, Error> {
    let s = read_instance(instance)?;
    match compatible(&s) {
        Verdict::Compatible => {
            println!("Compatible");
            Ok(0)
        }
        Verdict::Incompatible(w) => {
            println!("Incompatible: {w}");
            Ok(2)
        }
        Verdict::Malformed(reason) => {
            println!("Malformed: {reason}");
            Ok(3)
        }
    }
}

fn cmd_build(instance: &Path, output: &Path, symmetric: bool) -> Result<u8, Error> {
    let s = read_instance(instance)?;
    let m = if symmetric {
        build_symmetric(&s)?
    } else {
        build(&s)?
    };
    write_text(output, &TensorFile::from_tensor(&m).to_json())?;
    if m.shape().d() == 2 {
        print!("{}", grid(&m));
    }
    Ok(0)
}

fn cmd_verify(tensor: &Path, instance: &Path) -> Result<u8, Error> {
    let m = read_tensor(tensor)?;
    let s = read_instance(instance)?;
    if verify(&m, &s).is_err() {
        eprintln!("error: tensor and instance shapes differ");
        return Ok(65);
    }
    for line in iter_lines(m.shape()) {
        let got = m.line_sum(&line)? as u64;
        let want = s.sum(&line);
        if got != want {
            println!("mismatch on {line}: tensor sums to {got}, instance prescribes {want}");
            return Ok(1);
        }
    }
    println!("Verified");
    Ok(0)
}

fn cmd_linesums(tensor: &Path, output: &Path) -> Result<u8, Error> {
    let m = read_tensor(tensor)?;
    let s = LineSumArray::from_tensor(&m);
    write_text(output, &InstanceFile::from_array(&s).to_json())?;
    Ok(0)
}

fn cmd_gen(
    dims: Vec<usize>,
    q: u32,
    seed: u64,
    symmetric: bool,
    output: &Path,
) -> Result<u8, Error> {
    let shape = Shape::new(dims, q)?;
    if symmetric && shape.dims().windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Input(
            "--symmetric requires all extents equal".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<u32> = if symmetric {
        // sample each orbit once, at its first cell in flat order
        let mut by_orbit: std::collections::HashMap<Vec<usize>, u32> =
            std::collections::HashMap::new();
        shape
            .iter_coords()
            .map(|coords| {
                let mut key = coords;
                key.sort_unstable();
                *by_orbit.entry(key).or_insert_with(|| rng.gen_range(0..q))
            })
            .collect()
    } else {
        (0..shape.cells()).map(|_| rng.gen_range(0..q)).collect()
    };
    let m = Tensor::from_entries(shape, entries)?;
    let s = LineSumArray::from_tensor(&m);
    write_text(output, &InstanceFile::from_array(&s).to_json())?;
    Ok(0)
}

fn cmd_oracle(instance: &Path, symmetric: bool, max_nodes: u64) -> Result<u8, Error> {
    let s = read_instance(instance)?;
    let budget = SearchBudget {
        max_nodes,
        symmetric,
        entry_bounds: None,
    };
    match solve(&s, &budget)? {
        Some(m) => {
            print!("{}", TensorFile::from_tensor(&m).to_json());
            Ok(0)
        }
        None => {
            println!("Unrealizable");
            Ok(2)
        }
    }
}

fn cmd_maximal(instance: &Path, axis: usize, output: &Path) -> Result<u8, Error> {
    let s = read_instance(instance)?;
    let m = match maximal_matrix(&s, axis) {
        Ok(m) => m,
        Err(Error::Input(msg)) => {
            // a per-line bound violation is a malformed instance, not a
            // file-format problem
            eprintln!("error: {msg}");
            return Ok(3);
        }
        Err(e) => return Err(e),
    };
    write_text(output, &TensorFile::from_tensor(&m).to_json())?;
    Ok(0)
}
