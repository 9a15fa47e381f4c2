use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "hwcong",
    version,
    about = "Higher Hasse-Witt matrices, their congruences and limits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Let failed experimental checks change the exit status.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, env = "HWCONG_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Largest number of coefficients a single polynomial may hold.
    #[arg(long, global = true, env = "HWCONG_MAX_TERMS")]
    pub max_terms: Option<u128>,

    /// Multiply-add budget per operation.
    #[arg(long, global = true, env = "HWCONG_BUDGET")]
    pub budget: Option<u128>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the matrices of a Laurent polynomial.
    Hw(HwArgs),
    /// Check congruences and report their defects.
    Verify(VerifyArgs),
    /// Frobenius and connection limits.
    Limits(LimitsArgs),
    /// Logarithm, group law and integrality checks.
    Fgl(FglArgs),
    /// Zeta numerators, unit roots and comparisons with the limits.
    Zeta(ZetaArgs),
    /// Seeded random polynomials for property suites.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct PolyArgs {
    /// Polynomial in text form, e.g. "x + y + x^-1*y^-1".
    #[arg(long = "f", value_name = "TEXT", conflicts_with = "file")]
    pub f: Option<String>,

    /// Polynomial in JSON form.
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,

    /// Variable names in order; inferred from the text when omitted.
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,

    /// Parameter names; coefficients then lie in Z[params].
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,

    /// Index by every lattice point of the Newton polytope.
    #[arg(long, conflicts_with = "interior")]
    pub all_points: bool,

    /// Index by interior lattice points (the default).
    #[arg(long)]
    pub interior: bool,
}

#[derive(Args, Debug)]
pub struct HwArgs {
    #[command(flatten)]
    pub poly: PolyArgs,

    #[arg(long = "p")]
    pub p: Option<u64>,

    /// Work modulo p^K instead of exactly.
    #[arg(long = "K", alias = "precision")]
    pub k: Option<u32>,

    /// Truncation degree for parameter rings.
    #[arg(long = "N", alias = "trunc")]
    pub n: Option<u32>,

    /// Print the matrix built from f^(m-1).
    #[arg(long, value_name = "m")]
    pub beta: Vec<u64>,

    /// Print the matrix at level s, built from f^(p^s - 1).
    #[arg(long, value_name = "s")]
    pub alpha: Vec<u32>,

    /// Print the Hasse-Witt matrix modulo p.
    #[arg(long)]
    pub hasse_witt: bool,

    /// Print the recursion matrices for levels 1..=S.
    #[arg(long, value_name = "S")]
    pub gamma: Option<u32>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub poly: PolyArgs,

    #[arg(long = "p")]
    pub p: Option<u64>,

    #[arg(long = "K", alias = "precision")]
    pub k: Option<u32>,

    #[arg(long = "N", alias = "trunc")]
    pub n: Option<u32>,

    /// Part of the main theorem to check: i, ii or iii.
    #[arg(long, value_name = "PART")]
    pub theorem1: Vec<String>,

    /// Divisibility and support of the recursion polynomials.
    #[arg(long)]
    pub lemma21: bool,

    /// Exact identity between the recursion matrices and the beta matrices.
    #[arg(long)]
    pub lemma23ii: bool,

    /// Congruences for m prime to p.
    #[arg(long)]
    pub lemma23iii: bool,

    /// Divisibility of D(sigma^m(a)) on the parameters and small monomials.
    #[arg(long)]
    pub lemma31: bool,

    /// Congruences between beta matrices and the zeta numerator (experimental).
    #[arg(long)]
    pub asd: bool,

    /// Frame factorization of the Frobenius quotient for the cubic family (experimental).
    #[arg(long)]
    pub frame: bool,

    #[arg(long, default_value_t = 2)]
    pub smax: u32,

    #[arg(long, default_value_t = 0)]
    pub mmax: u32,

    /// Level for the frame factorization.
    #[arg(long = "s", default_value_t = 1)]
    pub s: u32,

    /// Derivation d/d<param>.
    #[arg(long = "D", value_name = "DERIVATION")]
    pub d: Option<String>,

    /// Values of m for --lemma23iii and --asd.
    #[arg(long, value_delimiter = ',')]
    pub ms: Vec<u64>,

    /// Largest constant tried by --asd.
    #[arg(long, default_value_t = 3)]
    pub c_max: i64,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub poly: PolyArgs,

    #[arg(long = "p")]
    pub p: Option<u64>,

    /// Precision of the limits: modulo p^e.
    #[arg(long = "e", default_value_t = 1)]
    pub e: u32,

    #[arg(long = "N", alias = "trunc")]
    pub n: Option<u32>,

    /// Connection limits for these derivations (repeatable).
    #[arg(long = "D", value_name = "DERIVATION")]
    pub d: Vec<String>,

    /// Skip the Frobenius limit.
    #[arg(long)]
    pub no_frobenius: bool,
}

#[derive(Args, Debug)]
pub struct FglArgs {
    #[command(flatten)]
    pub poly: PolyArgs,

    /// Prime for --witness.
    #[arg(long = "p")]
    pub p: Option<u64>,

    /// Total degree of the series.
    #[arg(long = "N", default_value_t = 4)]
    pub n: u32,

    /// Print the logarithm.
    #[arg(long)]
    pub log: bool,

    /// Primes at which to check that the group law has integral coefficients.
    #[arg(long, value_delimiter = ',')]
    pub check_integrality: Vec<u64>,

    /// Integrality certificate built from the recursion matrices.
    #[arg(long)]
    pub witness: bool,

    /// Unit, commutativity and associativity of the group law.
    #[arg(long)]
    pub axioms: bool,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    /// Curve c*y^2 + h(x).
    #[arg(long, alias = "f", value_name = "TEXT")]
    pub curve: String,

    #[arg(long = "p")]
    pub p: u64,

    /// Point counts beyond the minimum, checked against the numerator.
    #[arg(long, default_value_t = 0)]
    pub extra: u32,

    /// Lift the unit roots modulo p^K.
    #[arg(long)]
    pub unit_roots: bool,

    /// Compare trace and determinant of the Frobenius limit with the unit roots.
    #[arg(long)]
    pub match_limits: bool,

    /// Check that det(1 - T HW) divides the numerator modulo p.
    #[arg(long)]
    pub hw_factor: bool,

    #[arg(long = "K", default_value_t = 3)]
    pub k: u32,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,

    #[arg(long, default_value_t = 20)]
    pub count: usize,

    #[arg(long, default_value_t = 2)]
    pub max_vars: usize,

    #[arg(long, default_value_t = 6)]
    pub max_support: usize,

    #[arg(long, default_value_t = 3)]
    pub coeff_bound: i64,

    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub exp_min: i64,

    #[arg(long, default_value_t = 2)]
    pub exp_max: i64,

    #[arg(long, default_value_t = 4)]
    pub max_g: usize,

    /// Require an invertible Hasse-Witt matrix modulo each prime.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7")]
    pub primes: Vec<u64>,

    #[arg(long)]
    pub all_points: bool,
}
