use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hnormal::associahedra::{self, AssocError};
use hnormal::barhomology::{self, BarError, FiniteMonoid};
use hnormal::charclass::{self, CharError, GeneratorFamily};
use hnormal::exactlin::{is_prime, Coefficients, HomologyGroup, LinalgError};
use hnormal::normality::{self, Family, Grid, Instance, Ledger, NormalityError};
use hnormal::trees::{enumerate_trees, LengthEntry, MetricTree, Tree, TreeError};
use hnormal::Length;

/// Trees, associahedra, bar homology, Steenrod P^1 on characteristic
/// classes, and p-local N_k(l)-normality of SU(m) -> SU(n) and
/// SO(2m+1) -> SO(2n+1).
#[derive(Parser, Debug)]
#[command(name = "hnormal", version)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verdict for one instance.
    Classify(InstanceArgs),
    /// Full certificate for one instance inside its non-normality window.
    Witness(InstanceArgs),
    /// Verdict and certificate rows over a grid, as CSV.
    Sweep(SweepArgs),
    /// P^1 of a Chern or Pontryagin class.
    Steenrod(SteenrodArgs),
    /// Planar rooted trees.
    #[command(subcommand)]
    Trees(TreesCommand),
    /// Cubical associahedra.
    #[command(subcommand)]
    Assoc(AssocCommand),
    /// Truncated bar constructions.
    #[command(subcommand)]
    Bar(BarCommand),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Su,
    So,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Su => Family::Su,
            FamilyArg::So => Family::SoOdd,
        }
    }
}

#[derive(Args, Debug)]
struct LedgerArgs {
    /// Add the claim that SU(2) -> SU(3) is 3-locally N_k(l) for all k, l.
    #[arg(long)]
    with_p3_annotation: bool,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    ledger: LedgerArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Defaults to n-max - 1.
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    k_max: usize,
    #[arg(long)]
    l_max: usize,
    /// Largest odd prime included.
    #[arg(long)]
    p_max: u64,
    /// Report instances with both NORMAL and NOT_NORMAL derivations; exit 2
    /// if there are any.
    #[arg(long)]
    check_consistency: bool,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    ledger: LedgerArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassFamily {
    Chern,
    Pontryagin,
}

#[derive(Args, Debug)]
struct SteenrodArgs {
    #[arg(long, value_enum)]
    family: ClassFamily,
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    i: usize,
    /// Work in the quotient by monomials of total exponent > K.
    #[arg(long)]
    truncate: Option<u32>,
    #[arg(long)]
    json: bool,
    /// Recompute through the splitting principle; exit 2 on mismatch.
    #[arg(long)]
    verify_oracle: bool,
}

#[derive(Subcommand, Debug)]
enum TreesCommand {
    /// All trees with the given number of leaves.
    Enumerate {
        #[arg(long)]
        leaves: usize,
        #[arg(long)]
        binary: bool,
        #[arg(long)]
        json: bool,
    },
    /// Cut a metric tree at spine edges of length at least the threshold.
    Cut {
        #[arg(long)]
        tree: String,
        /// JSON list of {"edge": "0.1", "len": "3/2"}; "inf" for infinity.
        #[arg(long)]
        lengths: PathBuf,
        #[arg(long)]
        threshold: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AssocCoeff {
    Z,
    F2,
    F3,
}

#[derive(Subcommand, Debug)]
enum AssocCommand {
    Cells {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    Homology {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        coeff: AssocCoeff,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
enum BarCommand {
    Homology {
        /// cyclic:Q or table:FILE
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        /// z or fp:P
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        json: bool,
    },
}

enum CliError {
    Usage(String),
    Internal(String),
}

type CliResult = Result<(), CliError>;

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(format!("csv error: {e}"))
    }
}

impl From<NormalityError> for CliError {
    fn from(e: NormalityError) -> Self {
        match e {
            NormalityError::InconsistentRules { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CharError> for CliError {
    fn from(e: CharError) -> Self {
        match e {
            CharError::Linalg(LinalgError::PDividesDenominator { .. }) | CharError::OracleBasis(_) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<AssocError> for CliError {
    fn from(e: AssocError) -> Self {
        match e {
            AssocError::MissingFace(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BarError> for CliError {
    fn from(e: BarError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        builder = builder.num_threads(j);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    let mut out = BufWriter::new(io::stdout());
    let result = pool.install(|| run(cli.command, &mut out)).and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            let _ = out.flush();
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            let _ = out.flush();
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command, out: &mut impl Write) -> CliResult {
    match cmd {
        Command::Classify(a) => classify(&a, out),
        Command::Witness(a) => witness(&a, out),
        Command::Sweep(a) => sweep(&a, out),
        Command::Steenrod(a) => steenrod(&a, out),
        Command::Trees(TreesCommand::Enumerate { leaves, binary, json }) => trees_enumerate(leaves, binary, json, out),
        Command::Trees(TreesCommand::Cut { tree, lengths, threshold, json }) => {
            trees_cut(&tree, &lengths, &threshold, json, out)
        }
        Command::Assoc(AssocCommand::Cells { n, json }) => assoc_cells(n, json, out),
        Command::Assoc(AssocCommand::Homology { n, coeff, json }) => assoc_homology(n, coeff, json, out),
        Command::Bar(BarCommand::Homology { group, k, coeff, json }) => bar_homology(&group, k, &coeff, json, out),
    }
}

fn ledger(args: &LedgerArgs) -> Result<Ledger, CliError> {
    let base = Ledger::from_env_or_shipped().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(if args.with_p3_annotation { base.with_p3_annotation() } else { base })
}

fn instance(a: &InstanceArgs) -> Result<Instance, CliError> {
    Ok(Instance::new(a.family.into(), a.m, a.n, a.k, a.l, a.p)?)
}

fn write_json(out: &mut impl Write, value: &impl Serialize) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn describe(inst: &Instance) -> String {
    match inst.family {
        Family::Su => format!("SU({}) -> SU({})", inst.m, inst.n),
        Family::SoOdd => format!("SO({}) -> SO({})", 2 * inst.m + 1, 2 * inst.n + 1),
    }
}

fn classify(a: &InstanceArgs, out: &mut impl Write) -> CliResult {
    let inst = instance(a)?;
    let v = normality::classify(&inst, &ledger(&a.ledger)?)?;
    if a.json {
        return write_json(out, &v);
    }
    writeln!(out, "instance    {}, k={}, l={}, p={}", describe(&inst), inst.k, inst.l, inst.p)?;
    writeln!(out, "verdict     {}", v.verdict)?;
    writeln!(out, "provenance  {}", v.provenance.as_deref().unwrap_or("-"))?;
    writeln!(out, "citation    {}", v.citation)?;
    Ok(())
}

fn witness(a: &InstanceArgs, out: &mut impl Write) -> CliResult {
    let inst = instance(a)?;
    let cert = normality::certify(&inst, &ledger(&a.ledger)?)?;
    if a.json {
        return write_json(out, &cert);
    }
    writeln!(out, "instance     {}, k={}, l={}, p={}", describe(&inst), inst.k, inst.l, inst.p)?;
    writeln!(out, "verdict      {}", cert.verdict)?;
    writeln!(out, "provenance   {}", cert.provenance.as_deref().unwrap_or("-"))?;
    match &cert.witness {
        Some(w) => writeln!(out, "witness      l'={} i={} j={}", w.lprime, w.i, w.j)?,
        None => writeln!(out, "witness      none")?,
    }
    match cert.coefficient {
        Some(c) => writeln!(out, "coefficient  {c} mod {}", inst.p)?,
        None => writeln!(out, "coefficient  -")?,
    }
    if let Some(c) = &cert.checks {
        for (name, ok) in [
            ("coefficient_nonzero", c.coefficient_nonzero),
            ("range_check_1", c.range_check_1),
            ("range_check_2", c.range_check_2),
            ("source_absent", c.source_absent),
            ("extraction_agrees", c.extraction_agrees),
        ] {
            writeln!(out, "  {name:<20} {}", if ok { "pass" } else { "FAIL" })?;
        }
    }
    writeln!(out, "status       {}", cert.status)?;
    Ok(())
}

const SWEEP_CHUNK: usize = 512;

fn sweep(a: &SweepArgs, out: &mut impl Write) -> CliResult {
    let grid = Grid {
        family: a.family.into(),
        m_max: a.m_max.unwrap_or(a.n_max.saturating_sub(1)),
        n_max: a.n_max,
        k_max: a.k_max,
        l_max: a.l_max,
        p_max: a.p_max,
    };
    let ledger = ledger(&a.ledger)?;
    let instances = grid.instances();

    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(&mut *out),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let mut counts = [0usize; 3];
    for chunk in instances.chunks(SWEEP_CHUNK) {
        for row in normality::sweep_rows(chunk, &ledger) {
            match row.verdict.as_str() {
                "NORMAL" => counts[0] += 1,
                "NOT_NORMAL" => counts[1] += 1,
                _ => counts[2] += 1,
            }
            writer.serialize(&row)?;
        }
        writer.flush()?;
    }
    drop(writer);

    if a.out.is_some() {
        writeln!(
            out,
            "{} instances: {} NORMAL, {} NOT_NORMAL, {} other",
            instances.len(),
            counts[0],
            counts[1],
            counts[2]
        )?;
    }
    if a.check_consistency {
        let conflicts = normality::consistency_sweep(&grid, &ledger);
        let report: &mut dyn Write = if a.out.is_some() { out } else { &mut io::stderr() };
        writeln!(report, "conflicts: {}", conflicts.len())?;
        for c in &conflicts {
            writeln!(
                report,
                "  {}  NORMAL by {}  NOT_NORMAL by {}",
                c.instance,
                c.normal.join(","),
                c.not_normal.join(",")
            )?;
        }
        if !conflicts.is_empty() {
            return Err(CliError::Internal(format!("INCONSISTENT_RULES at {} instances", conflicts.len())));
        }
    }
    Ok(())
}

fn class_family(f: ClassFamily, n: usize) -> Result<GeneratorFamily, CliError> {
    Ok(match f {
        ClassFamily::Chern => GeneratorFamily::chern(n)?,
        ClassFamily::Pontryagin => GeneratorFamily::pontryagin(n)?,
    })
}

fn steenrod(a: &SteenrodArgs, out: &mut impl Write) -> CliResult {
    let family = class_family(a.family, a.n)?;
    let mut poly = charclass::wu_p1(a.p, family, a.i)?;
    if a.verify_oracle {
        let oracle = charclass::splitting_oracle(a.p, family, a.i)?;
        if oracle != poly {
            return Err(CliError::Internal(format!(
                "Wu formula disagrees with the splitting oracle: {poly} vs {oracle}"
            )));
        }
    }
    if let Some(k) = a.truncate {
        poly = poly.truncate(k);
    }
    if a.json {
        let generators: Vec<String> = (family.first()..=family.rank())
            .map(|j| format!("{}{j}", if matches!(a.family, ClassFamily::Chern) { 'c' } else { 'p' }))
            .collect();
        let value = json!({
            "family": match a.family { ClassFamily::Chern => "chern", ClassFamily::Pontryagin => "pontryagin" },
            "p": a.p,
            "n": a.n,
            "i": a.i,
            "truncate": a.truncate,
            "generators": generators,
            "terms": poly.to_json(),
            "text": poly.to_string(),
        });
        return write_json(out, &value);
    }
    writeln!(out, "{poly}")?;
    Ok(())
}

fn trees_enumerate(leaves: usize, binary: bool, json: bool, out: &mut impl Write) -> CliResult {
    let trees = enumerate_trees(leaves, binary)?;
    if json {
        let list: Vec<String> = trees.iter().map(Tree::serialize).collect();
        return write_json(out, &list);
    }
    for t in trees {
        writeln!(out, "{t}")?;
    }
    Ok(())
}

fn render_metric(t: &MetricTree) -> String {
    let lens: Vec<String> = t.lengths().iter().map(|(e, l)| format!("{e}={l}")).collect();
    if lens.is_empty() {
        t.tree().serialize()
    } else {
        format!("{}  {}", t.tree(), lens.join(" "))
    }
}

fn trees_cut(tree: &str, lengths: &PathBuf, threshold: &str, json: bool, out: &mut impl Write) -> CliResult {
    let tree = Tree::parse(tree)?;
    let text = std::fs::read_to_string(lengths).map_err(|e| CliError::Usage(format!("{}: {e}", lengths.display())))?;
    let table: Vec<LengthEntry> =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", lengths.display())))?;
    let metric = MetricTree::from_table(tree, &table)?;
    let threshold: Length = threshold.parse()?;
    let cut = metric.cut(&threshold);
    if json {
        let value = json!({
            "pieces": cut.pieces.iter().map(MetricTree::to_json).collect::<Vec<_>>(),
            "cut_lengths": cut.cut_lengths.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
        return write_json(out, &value);
    }
    for (idx, piece) in cut.pieces.iter().enumerate() {
        writeln!(out, "piece {idx}: {}", render_metric(piece))?;
        if let Some(l) = cut.cut_lengths.get(idx) {
            writeln!(out, "  cut edge length {l}")?;
        }
    }
    Ok(())
}

fn assoc_cells(n: usize, json: bool, out: &mut impl Write) -> CliResult {
    let cells = associahedra::cells(n)?;
    if json {
        let records: Vec<_> = cells.iter().map(|c| c.record()).collect();
        return write_json(out, &records);
    }
    for c in &cells {
        let r = c.record();
        let pinned = if r.pinned.is_empty() { "-".to_string() } else { r.pinned.join(",") };
        writeln!(out, "{}\t{}\t{}", r.dim, r.tree, pinned)?;
    }
    Ok(())
}

fn group_json(h: &[HomologyGroup], coeffs: Coefficients) -> Value {
    Value::Array(
        h.iter()
            .enumerate()
            .map(|(d, g)| {
                json!({
                    "degree": d,
                    "coefficients": coeffs.to_string(),
                    "rank": g.rank,
                    "torsion": g.torsion.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "text": group_text(g, coeffs),
                })
            })
            .collect(),
    )
}

fn group_text(g: &HomologyGroup, coeffs: Coefficients) -> String {
    match coeffs {
        Coefficients::Integers => g.to_string(),
        Coefficients::PrimeField(p) => match g.rank {
            0 => "0".into(),
            1 => format!("F{p}"),
            r => format!("F{p}^{r}"),
        },
    }
}

fn print_homology(
    label: &str,
    h: &[HomologyGroup],
    coeffs: Coefficients,
    json: bool,
    out: &mut impl Write,
) -> CliResult {
    if json {
        return write_json(out, &group_json(h, coeffs));
    }
    for (d, g) in h.iter().enumerate() {
        writeln!(out, "H_{d}({label}; {coeffs}) = {}", group_text(g, coeffs))?;
    }
    Ok(())
}

fn assoc_homology(n: usize, coeff: AssocCoeff, json: bool, out: &mut impl Write) -> CliResult {
    let coeffs = match coeff {
        AssocCoeff::Z => Coefficients::Integers,
        AssocCoeff::F2 => Coefficients::PrimeField(2),
        AssocCoeff::F3 => Coefficients::PrimeField(3),
    };
    let cx = associahedra::boundary(n)?;
    if !cx.boundary_squares_vanish() {
        return Err(CliError::Internal(format!("boundary of K_{n} does not square to zero")));
    }
    print_homology(&format!("K_{n}"), &cx.homology(coeffs), coeffs, json, out)
}

fn bar_homology(group: &str, k: usize, coeff: &str, json: bool, out: &mut impl Write) -> CliResult {
    let monoid = if let Some(q) = group.strip_prefix("cyclic:") {
        let q: usize = q.parse().map_err(|_| CliError::Usage(format!("--group: bad order {q:?}")))?;
        FiniteMonoid::cyclic(q)?
    } else if let Some(path) = group.strip_prefix("table:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
        FiniteMonoid::from_json(&text)?
    } else {
        return Err(CliError::Usage(format!("--group must be cyclic:Q or table:FILE, got {group:?}")));
    };
    let coeffs = if coeff == "z" {
        Coefficients::Integers
    } else if let Some(p) = coeff.strip_prefix("fp:") {
        match p.parse::<u64>() {
            Ok(p) if is_prime(p) => Coefficients::PrimeField(p),
            _ => return Err(CliError::Usage(format!("--coeff: {p:?} is not a prime"))),
        }
    } else {
        return Err(CliError::Usage(format!("--coeff must be z or fp:P, got {coeff:?}")));
    };
    let bc = barhomology::projective_space(&monoid, k)?;
    if !bc.boundary_squares_vanish() {
        return Err(CliError::Internal("bar boundary does not square to zero".into()));
    }
    print_homology(&format!("B_{k}G"), &barhomology::bar_homology(&bc, coeffs), coeffs, json, out)
}
