use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod run;

/// Frequency rectangles, orthogonal arrays, Hadamard matrices and
/// t-independent vector sets.
///
/// Exit status: 0 on success, 1 when a verification fails, 2 on usage or
/// input errors.
#[derive(Debug, Parser)]
#[command(name = "freqrect", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write output to FILE instead of stdout.
    #[arg(short = 'o', long = "output", global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker-count hint. Output never depends on it.
    #[arg(long, global = true, env = "FREQRECT_THREADS", value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build designs.
    #[command(subcommand)]
    Construct(Construct),
    /// Check designs read from files.
    #[command(subcommand)]
    Verify(Verify),
    /// Search for maximum t-independent vector sets.
    #[command(subcommand)]
    Search(Search),
    /// Closed-form bounds.
    #[command(subcommand)]
    Bounds(Bounds),
    /// Convert between design types.
    #[command(subcommand)]
    Convert(Convert),
}

#[derive(Debug, Subcommand)]
pub enum Construct {
    /// Hadamard matrix of a given order.
    Hadamard {
        #[arg(long)]
        order: usize,
        /// sylvester, paley or auto.
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Two-level orthogonal array: full factorial, or from a Hadamard matrix.
    Oa {
        /// All 2^K binary K-tuples (strength K).
        #[arg(long, value_name = "K", conflicts_with = "order", required_unless_present = "order")]
        factorial: Option<usize>,
        /// Append the XOR column to the factorial array.
        #[arg(long, requires = "factorial")]
        parity: bool,
        /// OA(N, N-1, 2, 2) from a Hadamard matrix of order N.
        #[arg(long, value_name = "N")]
        order: Option<usize>,
    },
    /// k-MOFR(2m, 2n; 2) from a binary strength-2 OA with mn runs.
    #[command(name = "double", alias = "thm23")]
    Double {
        #[arg(long, value_name = "FILE")]
        oa: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// (4a-2)-MOFR(4, 2a; 2) from a Hadamard matrix of order 4a.
    #[command(name = "four-row", alias = "thm26")]
    FourRow {
        #[arg(long, value_name = "FILE")]
        hadamard: PathBuf,
    },
    /// t-orthogonal MOFS from cyclic shifts of binary OA columns.
    #[command(name = "cyclic", alias = "thm31")]
    Cyclic {
        #[arg(long, value_name = "FILE")]
        oa: PathBuf,
    },
    /// t-orthogonal MOFR(q^M, q^N; q) from a t-independent vector set.
    #[command(name = "from-vectors", alias = "thm33")]
    FromVectors {
        #[arg(long, value_name = "FILE")]
        vectors: PathBuf,
        #[arg(long = "M", value_name = "M")]
        m: usize,
        #[arg(long = "N", value_name = "N")]
        n: usize,
        #[arg(long)]
        t: usize,
    },
    /// p-1 binary MOFS of order 2p for an odd prime p.
    Mofs2p {
        #[arg(long)]
        p: usize,
        /// Output the intermediate arrays, permutation and stars instead of the set.
        #[arg(long)]
        emit_intermediates: bool,
    },
    /// All concatenations of two 3-independent vector sets.
    Product {
        #[arg(long, value_name = "FILE")]
        first: PathBuf,
        #[arg(long, value_name = "FILE")]
        second: PathBuf,
    },
    /// v -> v v 0^(N-M) for vectors of length M.
    Pad {
        #[arg(long, value_name = "FILE")]
        vectors: PathBuf,
        #[arg(long = "N", value_name = "N")]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Every block is a frequency rectangle.
    Fr { file: PathBuf },
    /// The set is t-orthogonal (pairwise orthogonal for t = 2).
    Mofr {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
    /// Orthogonal array at its declared strength, or at --t.
    Oa {
        file: PathBuf,
        #[arg(long)]
        t: Option<usize>,
    },
    /// H H^T = nI.
    Hadamard { file: PathBuf },
    /// Every t-subset is linearly independent.
    Vectors {
        file: PathBuf,
        #[arg(long)]
        t: usize,
    },
    /// Block structure of M^T M and the rank of M.
    Gram { file: PathBuf },
    /// Eigenvalue multiplicities of M^T M.
    Spectrum { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Search {
    /// Maximum t-independent set of length-n vectors.
    Ind {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Node budget.
        #[arg(long)]
        budget: Option<u64>,
        /// Wall-clock budget in seconds.
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<f64>,
    },
    /// As `ind`, over vectors with nonzero first-M and last-N parts.
    Constrained {
        #[arg(long = "M", value_name = "M")]
        m: usize,
        #[arg(long = "N", value_name = "N")]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_name = "SECONDS")]
        time_limit: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Bounds {
    /// Known values and bounds on Ind_q(n, t).
    Ind {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// A binary [n,k,d] code exists.
        #[arg(long, value_name = "N,K,D")]
        code_lower: Vec<String>,
        /// D is the largest distance of a binary [n,k] code.
        #[arg(long, value_name = "N,K,D")]
        code_upper: Vec<String>,
    },
    /// Bound on Ind from binary linear-code parameters.
    Code {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        /// lower or upper.
        #[arg(long)]
        mode: String,
    },
    /// Largest possible MOFR(m, n; q) set.
    Mofr {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Convert {
    /// t-orthogonal rectangle set to OA(mn, k, q, t).
    Fr2oa {
        file: PathBuf,
        #[arg(long)]
        t: Option<usize>,
    },
    /// Binary strength-2 OA(2n, k, 2, 2) to k-MOFR(2, 2n; 2).
    Oa2fr { file: PathBuf },
    /// Hadamard matrix of order 4a to OA(4a, 4a-1, 2, 2).
    Had2oa { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run::main(cli)
}
