//! `tk`: batch front end to the truthkit kernel.
//!
//! Exit status is 0 when a check finds nothing, 1 when it reports violations and 2 on
//! configuration or input errors.

mod fuzz;

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use truthkit::classes::{
    convert, diagonal_refute, induced_truth, parse_class, validate_class, write_class,
    AckermannCoding, Class, Family, TruthClass,
};
use truthkit::eval::{self, diagram, Assignment, TruthSet};
use truthkit::hfset::{collapse, Digraph};
use truthkit::hierarchy::true_k;
use truthkit::proofcheck::{check_gref, GrefMode};
use truthkit::report::Report;
use truthkit::schemes::{
    check_grounded, check_internal, check_truth_property, gen_ref, gen_scheme, parse_theory,
    RefKind, SchemeTag, TruthProperty,
};
use truthkit::syntax::enumerate;
use truthkit::{parse, stage, FinStructure, Formula, Var};

/// `print!` that returns write errors instead of panicking, so a closed pipe ends quietly.
macro_rules! say {
    ($($arg:tt)*) => {
        write!(std::io::stdout().lock(), $($arg)*)?
    };
}

macro_rules! sayln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(
    name = "tk",
    version,
    about = "Truth classes and satisfaction over finite set structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct StructureArgs {
    /// Use the standard stage V_n.
    #[arg(long, conflicts_with = "structure")]
    stage: Option<u32>,
    /// Read a structure file.
    #[arg(long)]
    structure: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write the report as JSON lines to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ref,
    Con,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Prop,
    Depth,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula in a structure.
    Eval {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        formula: String,
        /// Assignments `var=id`.
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
    /// Print the true sentences of bounded depth, with constants for the elements.
    Diagram {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
    /// Check a class file against the compositional clauses.
    ValidateClass {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        class: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Convert between satisfaction and truth classes.
    ConvertClass {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        class: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Whether V_a reflects a formula inside V_N.
    Reflect {
        #[arg(long = "N", alias = "stage")]
        n: u32,
        #[arg(long)]
        a: Option<u32>,
        #[arg(long)]
        formula: String,
        /// Print the table over every a from 1 to N.
        #[arg(long)]
        scan: bool,
    },
    /// Evaluate a sentence with the partial truth predicate True_k.
    TrueK {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        formula: String,
    },
    /// Print an axiom-scheme instance.
    GenScheme {
        #[arg(long)]
        scheme: SchemeTag,
        #[arg(long)]
        formula: String,
        /// Also evaluate the instance in this structure.
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Print a reflection instance as a theory-file line.
    GenRef {
        #[arg(long, default_value = "ZF")]
        base: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, value_enum, default_value = "ref")]
        kind: Kind,
        #[arg(long, default_value_t = 1)]
        iter: u32,
        #[arg(long)]
        formula: String,
    },
    /// Evaluate the reflection instances of a theory with provability grounded by proof search.
    CheckRef {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, default_value_t = 1_000)]
        budget: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check an internal scheme against a truth class.
    CheckInternal {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        scheme: SchemeTag,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Truth class file; defaults to the truth set of the structure.
        #[arg(long)]
        class: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check a correctness property on seeded random sentence sequences.
    CheckProperty {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        property: TruthProperty,
        /// Truth class file; defaults to the truth set of the structure.
        #[arg(long)]
        class: Option<PathBuf>,
        /// Depth of the sentences in the sequences.
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, default_value_t = 4)]
        length: usize,
        #[arg(long, default_value_t = 1_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check closure of a truth class under derivability.
    CheckGref {
        #[command(flatten)]
        structure: StructureArgs,
        /// Truth class file; defaults to the induced class of depth `--depth` over x.
        #[arg(long)]
        class: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, value_enum, default_value = "prop")]
        mode: Mode,
        /// Conclusion depth bound in depth mode.
        #[arg(long, default_value_t = 2)]
        x: u32,
        /// Longest proof considered.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Refute a binary formula as a satisfaction predicate by diagonalization.
    Diagonal {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        formula: String,
    },
    /// Collapse a well-founded extensional digraph onto sets.
    Collapse {
        /// Lines `node <name>` and `edge <member> <container>`.
        #[arg(long)]
        graph: PathBuf,
    },
    /// Toggle class entries and report which validator clauses notice.
    Fuzz {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Number of sampled mutations; 0 means every entry.
        #[arg(long, default_value_t = 0)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mutate the induced truth class instead of the satisfaction class.
        #[arg(long)]
        truth: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(args: &StructureArgs) -> anyhow::Result<FinStructure> {
    match (args.stage, &args.structure) {
        (Some(n), _) => Ok(stage(n)?),
        (None, Some(path)) => Ok(FinStructure::parse(&read(path)?)?),
        (None, None) => bail!("give --stage or --structure"),
    }
}

fn formula(text: &str) -> anyhow::Result<Formula> {
    parse(text).with_context(|| format!("parsing {text}"))
}

fn truth_class(m: &FinStructure, path: &Path) -> anyhow::Result<TruthClass> {
    match parse_class(&read(path)?, m)? {
        Class::Truth(t) => Ok(t),
        Class::Sat(_) => bail!(
            "{} is a satisfaction class; convert it first",
            path.display()
        ),
    }
}

/// Prints the summary and writes the JSON lines; the exit status reflects the violations.
fn emit(report: &Report, out: &OutArgs) -> anyhow::Result<ExitCode> {
    say!("{}", report.summary());
    if let Some(path) = &out.out {
        fs::write(path, report.to_jsonl())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn assignment(m: &FinStructure, f: &Formula, pairs: &[String]) -> anyhow::Result<Assignment> {
    let mut a = Assignment::new();
    for pair in pairs {
        let (v, id) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("expected var=id, found {pair}"))?;
        let id: u64 = id.parse().with_context(|| format!("bad id in {pair}"))?;
        let e = m
            .elem_by_id(id)
            .ok_or_else(|| anyhow!("no element with id {id}"))?;
        a.insert(Var::new(v), e);
    }
    if let Some(v) = f.free_vars().iter().find(|v| !a.contains_key(*v)) {
        bail!("free variable {v} needs --assign {v}=<id>");
    }
    Ok(a)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Eval {
            structure,
            formula: text,
            assign,
        } => {
            let m = load(&structure)?;
            let f = formula(&text)?;
            let a = assignment(&m, &f, &assign)?;
            sayln!("{}", eval::sat(&m, &f, &a)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Diagram { structure, depth } => {
            let m = load(&structure)?;
            let vars = [Var::new("x"), Var::new("y")];
            let t = induced_truth(&m, &Family::depth(&vars, depth))?;
            for s in &t.sentences {
                sayln!("{s}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateClass {
            structure,
            class,
            out,
        } => {
            let m = load(&structure)?;
            let c = parse_class(&read(&class)?, &m)?;
            emit(&validate_class(&m, &c)?, &out)
        }
        Command::ConvertClass {
            structure,
            class,
            out,
        } => {
            let m = load(&structure)?;
            let c = parse_class(&read(&class)?, &m)?;
            let text = write_class(&m, &convert(&m, &c)?);
            match &out.out {
                Some(path) => fs::write(path, text)?,
                None => say!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reflect {
            n,
            a,
            formula: text,
            scan,
        } => {
            let f = formula(&text)?;
            let range: Vec<u32> = match (scan, a) {
                (true, _) => (1..=n).collect(),
                (false, Some(a)) => vec![a],
                (false, None) => bail!("give --a or --scan"),
            };
            for a in range {
                sayln!("{a}\t{}", eval::reflects(n, a, &f)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::TrueK {
            structure,
            depth,
            formula: text,
        } => {
            let m = load(&structure)?;
            sayln!("{}", true_k(&m, depth, &formula(&text)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::GenScheme {
            scheme,
            formula: text,
            structure,
        } => {
            let instance = gen_scheme(scheme, &formula(&text)?)?;
            sayln!("{}", instance.sentence);
            if structure.stage.is_some() || structure.structure.is_some() {
                let m = load(&structure)?;
                let value = eval::holds(&m, &instance.sentence)?;
                sayln!("{value}");
                if !value {
                    return Ok(ExitCode::from(1));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GenRef {
            base,
            n,
            kind,
            iter,
            formula: text,
        } => {
            let kind = match kind {
                Kind::Ref => RefKind::Ref,
                Kind::Con => RefKind::Con,
            };
            let r = gen_ref(&base, n, &formula(&text)?, kind, iter)?;
            sayln!("{} @ref base={base} n={n} iter={iter}", r.sentence);
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckRef {
            structure,
            theory,
            budget,
            out,
        } => {
            let m = load(&structure)?;
            let theory = parse_theory(&read(&theory)?)?;
            emit(&check_grounded(&m, &theory, budget)?, &out)
        }
        Command::CheckInternal {
            structure,
            scheme,
            depth,
            class,
            out,
        } => {
            let m = Arc::new(load(&structure)?);
            let report = match class {
                Some(path) => {
                    let t = truth_class(&m, &path)?;
                    check_internal(&t.view(m.clone()), scheme, depth)?
                }
                None => check_internal(&diagram(m.clone(), u32::MAX, false), scheme, depth)?,
            };
            emit(&report, &out)
        }
        Command::CheckProperty {
            structure,
            property,
            class,
            depth,
            length,
            count,
            seed,
            out,
        } => {
            if length == 0 {
                bail!("--length must be at least 1");
            }
            let m = Arc::new(load(&structure)?);
            let consts: Vec<_> = m.elements().map(|e| m.constant(e)).collect();
            let pool = enumerate::sentences(&[Var::new("x")], &consts, depth);
            if pool.is_empty() {
                bail!("no sentences of depth {depth}");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sequences: Vec<Vec<Formula>> = (0..count)
                .map(|_| {
                    let len = rng.gen_range(1..=length);
                    (0..len)
                        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                        .collect()
                })
                .collect();
            let t: Box<dyn TruthSet> = match class {
                Some(path) => Box::new(truth_class(&m, &path)?.view(m.clone())),
                None => Box::new(diagram(m.clone(), u32::MAX, true)),
            };
            emit(
                &check_truth_property(t.as_ref(), property, &sequences)?,
                &out,
            )
        }
        Command::CheckGref {
            structure,
            class,
            depth,
            mode,
            x,
            budget,
            out,
        } => {
            let m = load(&structure)?;
            let t = match class {
                Some(path) => truth_class(&m, &path)?,
                None => induced_truth(&m, &Family::depth(&[Var::new("x")], depth))?,
            };
            let mode = match mode {
                Mode::Full => GrefMode::Full,
                Mode::Prop => GrefMode::Prop,
                Mode::Depth => GrefMode::DepthBounded { x, extra: vec![] },
            };
            emit(&check_gref(&m, &t, &mode, budget)?, &out)
        }
        Command::Diagonal {
            structure,
            formula: text,
        } => {
            let m = load(&structure)?;
            let s = formula(&text)?;
            let coding = AckermannCoding::for_diagonal(&s, &m)?;
            let d = diagonal_refute(&m, &s, &|f| coding.code(f))?;
            sayln!("R = {}", d.r);
            sayln!("code = {}", m.id(d.code));
            sayln!("S(r, r) = {}, R(r) = {}", d.s_value, d.r_value);
            Ok(ExitCode::SUCCESS)
        }
        Command::Collapse { graph } => {
            let mut g = Digraph::default();
            for (i, raw) in read(&graph)?.lines().enumerate() {
                let line = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
                match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                    [] => {}
                    ["node", name] => {
                        g.add_node(name);
                    }
                    ["edge", member, container] => g.add_edge(member, container),
                    _ => bail!(
                        "{} line {}: expected `node` or `edge`",
                        graph.display(),
                        i + 1
                    ),
                }
            }
            for (name, set) in collapse(&g)? {
                match set.code() {
                    Some(code) => sayln!("{name}\t{set}\t{code}"),
                    None => sayln!("{name}\t{set}"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz {
            structure,
            depth,
            count,
            seed,
            truth,
            out,
        } => {
            let m = load(&structure)?;
            let result = fuzz::sweep(&m, depth, count, seed, truth)?;
            say!("{}", result.matrix());
            emit(&result.report, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tk: {e:#}");
            ExitCode::from(2)
        }
    }
}
