use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use morita_core::census::{run_census, write_records, CensusMode, CensusTask};
use morita_core::format::{
    self, read_context_bundle, read_lat, read_map, write_context_bundle, MapFile,
};
use morita_core::morita::{
    build_context_from_pair, build_involutive_context, check_involutive_conditions,
    check_involutive_context, check_morita_context, check_pair_conditions,
    check_pair_conditions_full, extract_pair_from_context, InvolutiveWitness,
};
use morita_core::quantale::endo_quantale;
use morita_core::tensor::tensor_product;
use morita_core::{Error, FiniteSupLattice, Limits, MoritaPairWitness};

#[derive(Parser)]
#[command(name = "morita", version, about = "Morita pairs between quantales on finite sup-lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a .lat, .qnt, .act or .map file.
    Validate { file: PathBuf },
    /// Tensor product of two or three lattices; also writes a .elem sidecar.
    Tensor {
        #[arg(num_args = 2..=3, required = true)]
        factors: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Size and shape of the quantale of sup-preserving endomaps.
    Endo {
        lattice: PathBuf,
        /// Write the quantale as a .qnt file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check surjectivity and conditions 1-6 for a witness (p, q).
    CheckPair {
        #[command(flatten)]
        pair: PairArgs,
        /// Also run the checks over every tensor element.
        #[arg(long)]
        full: bool,
    },
    /// Build the Morita context of a witness and write it as a bundle directory.
    BuildContext {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check every Morita context law on a bundle directory.
    CheckContext { dir: PathBuf },
    /// Recover (p, q) from a context bundle.
    Extract {
        dir: PathBuf,
        /// Two comma-separated paths: `p.map,q.map`.
        #[arg(short, long, value_parser = parse_map_pair)]
        output: (PathBuf, PathBuf),
    },
    /// Check conditions a)-c) for p: X ⊗ X* ⊗ X → X and, if they hold, the
    /// imprimitivity bimodule it induces.
    CheckInvolutive {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        p: PathBuf,
    },
    /// Search all lattices up to the given sizes for witnesses.
    Census {
        #[arg(long)]
        max_x: usize,
        #[arg(long)]
        max_y: usize,
        #[arg(long, default_value_t = 1)]
        min_x: usize,
        #[arg(long, default_value_t = 1)]
        min_y: usize,
        #[arg(long)]
        involutive: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(clap::Args)]
struct PairArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    p: PathBuf,
    #[arg(long)]
    q: PathBuf,
}

/// Pass, or a failed check whose report has been printed.
type Outcome = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = Limits::from_env();
    match run(cli.command, &limits) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotSupMap(_)
        | Error::NotAMultimorphism(_)
        | Error::ConditionsFailed(_)
        | Error::ContextInvalid(_)
        | Error::StarNotWellDefined { .. }
        | Error::ActionNotWellDefined(..)
        | Error::NotCompositionClosed(..) => 1,
        _ => 2,
    }
}

fn run(command: Command, limits: &Limits) -> Outcome {
    match command {
        Command::Validate { file } => validate(&file, limits),
        Command::Tensor { factors, output } => tensor(&factors, &output, limits),
        Command::Endo { lattice, output } => endo(&lattice, output.as_deref(), limits),
        Command::CheckPair { pair, full } => {
            let Some(w) = load_pair(&pair, limits)? else { return Ok(false) };
            let report = check_pair_conditions(&w);
            println!("pair conditions:\n{report}");
            let mut ok = report.passed();
            if full {
                let full_report = check_pair_conditions_full(&w, limits)?;
                println!("pair conditions over all tensor elements:\n{full_report}");
                ok &= full_report.passed();
            }
            Ok(ok)
        }
        Command::BuildContext { pair, output } => {
            let Some(w) = load_pair(&pair, limits)? else { return Ok(false) };
            let ctx = match build_context_from_pair(&w, limits) {
                Ok(ctx) => ctx,
                Err(Error::ConditionsFailed(report)) => {
                    println!("pair conditions:\n{report}");
                    return Ok(false);
                }
                Err(e) => return Err(e),
            };
            write_context_bundle(&output, &ctx)?;
            println!(
                "wrote {} (|A| = {}, |B| = {})",
                output.display(),
                ctx.a().len(),
                ctx.b().len()
            );
            Ok(true)
        }
        Command::CheckContext { dir } => {
            let report = check_morita_context(&read_context_bundle(&dir)?);
            println!("context checks:\n{report}");
            Ok(report.passed())
        }
        Command::Extract { dir, output } => extract(&dir, &output, limits),
        Command::CheckInvolutive { x, p } => check_involutive(&x, &p, limits),
        Command::Census {
            max_x,
            max_y,
            min_x,
            min_y,
            involutive,
            jobs,
            output,
        } => {
            let mode = if involutive { CensusMode::Involutive } else { CensusMode::General };
            let mut task = CensusTask::new(max_x, max_y, mode);
            task.x_sizes = min_x..=max_x;
            task.y_sizes = min_y..=max_y;
            task.limits = *limits;
            task.jobs = jobs;
            let (records, summary) = run_census(&task)?;
            let io_err = |source| Error::Io {
                path: output.display().to_string(),
                source,
            };
            let file = File::create(&output).map_err(io_err)?;
            let mut out = BufWriter::new(file);
            write_records(&mut out, &records).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            println!(
                "{} records from {} lattice pairs ({} p candidates, {} q candidates, {} witnesses before deduplication)",
                summary.records,
                summary.lattice_pairs,
                summary.p_candidates,
                summary.q_candidates,
                summary.witnesses
            );
            for s in &summary.skipped {
                println!("skipped: {s}");
            }
            for f in &summary.verification_failures {
                println!("verification failure: {f}");
            }
            Ok(summary.verification_failures.is_empty())
        }
    }
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn validate(file: &Path, limits: &Limits) -> Outcome {
    let result = match extension(file) {
        "lat" => read_lat(file).map(|l| {
            println!(
                "lattice with {} elements, {} join-irreducible, {}distributive",
                l.len(),
                l.join_irreducibles().len(),
                if l.is_distributive() { "" } else { "not " }
            );
        }),
        "qnt" => format::read_qnt(file).map(|q| {
            println!(
                "quantale with {} elements{}{}{}",
                q.len(),
                if q.is_commutative() { ", commutative" } else { "" },
                if q.unit().is_some() { ", unital" } else { "" },
                if q.is_involutive() { ", involutive" } else { "" },
            );
        }),
        "act" => {
            let text = std::fs::read_to_string(file).map_err(|source| Error::Io {
                path: file.display().to_string(),
                source,
            })?;
            if text.lines().any(|l| l.trim_start().starts_with("left_act")) {
                format::read_bimodule(file).and_then(|x| {
                    let report = morita_core::module::check_bimodule(&x);
                    match report.counterexample() {
                        None => {
                            println!("bimodule on {} elements", x.carrier().len());
                            Ok(())
                        }
                        Some(f) => Err(Error::ShapeMismatch(f.describe(&x))),
                    }
                })
            } else {
                format::read_action(file).and_then(|a| {
                    match morita_core::module::check_module(&a).counterexample() {
                        None => {
                            println!("{} module on {} elements", a.side(), a.carrier().len());
                            Ok(())
                        }
                        Some(f) => Err(Error::ShapeMismatch(f.describe(&a))),
                    }
                })
            }
        }
        "map" => read_map(file).and_then(|m| {
            let f = morita_core::Multimorphism::new(m.factors.clone(), m.codomain.clone(), m.values)?;
            let t = tensor_product(&m.factors, limits)?;
            let lifted = t.lift(&f)?;
            println!(
                "multimorphism of arity {} into {} elements; lift is {}surjective",
                m.factors.len(),
                m.codomain.len(),
                if lifted.is_surjective() { "" } else { "not " }
            );
            Ok(())
        }),
        other => {
            return Err(Error::Format {
                path: file.display().to_string(),
                line: 0,
                message: format!("unknown file type {other:?}"),
            })
        }
    };
    match result {
        Ok(()) => Ok(true),
        Err(e) if e.is_input_error() => Err(e),
        Err(e) => {
            println!("invalid: {e}");
            Ok(false)
        }
    }
}

fn tensor(factors: &[PathBuf], output: &Path, limits: &Limits) -> Outcome {
    let lats = factors
        .iter()
        .map(|f| read_lat(f).map(Arc::new))
        .collect::<Result<Vec<_>, _>>()?;
    let t = tensor_product(&lats, limits)?;
    format::write_lat(output, t.lattice())?;
    let elem = output.with_extension("elem");
    format::write_elem(&elem, &t)?;
    println!(
        "tensor with {} elements written to {} and {}",
        t.len(),
        output.display(),
        elem.display()
    );
    Ok(true)
}

fn endo(lattice: &Path, output: Option<&Path>, limits: &Limits) -> Outcome {
    let x = Arc::new(read_lat(lattice)?);
    let q = endo_quantale(&x, limits)?;
    let quantale = q.quantale();
    println!(
        "Q(X) has {} elements; identity is {}; {}commutative",
        q.len(),
        quantale.carrier().name(q.identity()),
        if quantale.is_commutative() { "" } else { "not " }
    );
    if let Some(path) = output {
        format::write_qnt(path, quantale)?;
        println!("written to {}", path.display());
    }
    Ok(true)
}

fn expect_factors(m: &MapFile, path: &Path, factors: &[&FiniteSupLattice], codomain: &FiniteSupLattice) -> Result<(), Error> {
    let same = m.factors.len() == factors.len()
        && m.factors.iter().zip(factors).all(|(a, b)| a.as_ref() == *b)
        && m.codomain.as_ref() == codomain;
    if same {
        Ok(())
    } else {
        Err(Error::Format {
            path: path.display().to_string(),
            line: 0,
            message: "factors or codomain do not match the lattices given on the command line".into(),
        })
    }
}

/// The witness, or `None` after printing why `p` or `q` is not a trimorphism.
fn load_pair(args: &PairArgs, limits: &Limits) -> Result<Option<MoritaPairWitness>, Error> {
    let x = Arc::new(read_lat(&args.x)?);
    let y = Arc::new(read_lat(&args.y)?);
    let p = read_map(&args.p)?;
    let q = read_map(&args.q)?;
    expect_factors(&p, &args.p, &[&x, &y, &x], &x)?;
    expect_factors(&q, &args.q, &[&y, &x, &y], &y)?;
    match MoritaPairWitness::from_generators(x, y, &p.values, &q.values, limits) {
        Ok(w) => Ok(Some(w)),
        Err(e @ (Error::NotSupMap(_) | Error::NotAMultimorphism(_))) => {
            println!("  FAIL  multimorphism: {e}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn parse_map_pair(s: &str) -> Result<(PathBuf, PathBuf), String> {
    match s.split_once(',') {
        Some((p, q)) if !p.is_empty() && !q.is_empty() => Ok((p.into(), q.into())),
        _ => Err("expected two paths separated by a comma".into()),
    }
}

fn relative_ref(target: &Path, from_dir: &Path) -> String {
    let abs = |p: &Path| std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let target = abs(target);
    pathdiff::diff_paths(&target, abs(from_dir))
        .unwrap_or(target)
        .display()
        .to_string()
}

fn extract(dir: &Path, output: &(PathBuf, PathBuf), limits: &Limits) -> Outcome {
    let ctx = read_context_bundle(dir)?;
    let w = match extract_pair_from_context(&ctx, limits) {
        Ok(w) => w,
        Err(Error::ContextInvalid(report)) => {
            println!("context checks:\n{report}");
            return Ok(false);
        }
        Err(e) => return Err(e),
    };
    let (nx, ny) = (w.x().len(), w.y().len());
    for (path, gen, [a, b], dims) in [
        (&output.0, w.p_generators(), ["X.lat", "Y.lat"], [nx, ny, nx]),
        (&output.1, w.q_generators(), ["Y.lat", "X.lat"], [ny, nx, ny]),
    ] {
        let out_dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let ra = relative_ref(&dir.join(a), &out_dir);
        let rb = relative_ref(&dir.join(b), &out_dir);
        format::write_map(path, &[&ra, &rb, &ra], &ra, &dims, gen)?;
    }
    println!("wrote {} and {}", output.0.display(), output.1.display());
    Ok(true)
}

fn check_involutive(x_path: &Path, p_path: &Path, limits: &Limits) -> Outcome {
    let x = Arc::new(read_lat(x_path)?);
    let p = read_map(p_path)?;
    let xs = x.conjugate();
    expect_factors(&p, p_path, &[&x, &xs, &x], &x)?;
    let w = match InvolutiveWitness::from_generators(x, &p.values, limits) {
        Ok(w) => w,
        Err(e @ (Error::NotSupMap(_) | Error::NotAMultimorphism(_))) => {
            println!("  FAIL  multimorphism: {e}");
            return Ok(false);
        }
        Err(e) => return Err(e),
    };
    let report = check_involutive_conditions(&w);
    println!("involutive conditions:\n{report}");
    if !report.passed() {
        return Ok(false);
    }
    let ic = build_involutive_context(&w, limits)?;
    let ctx_report = check_involutive_context(&ic);
    println!("imprimitivity bimodule and context:\n{ctx_report}");
    Ok(ctx_report.passed())
}
