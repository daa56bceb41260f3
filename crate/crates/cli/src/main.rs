//! `polystab` command-line front end.
//!
//! JSON goes to stdout, a human summary to stderr. Exit codes: 0 YES or
//! success, 1 NO, 2 error, 3 UNKNOWN or BOUNDARY.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polystab::graph::{parse_dimacs, Graph, MAX_BRUTE_FORCE_CAP};
use polystab::optimize::{
    decide_exists_hurwitz, decide_exists_m_matrix, decide_max_radius, decide_min_radius, Answer, DecideConfig,
};
use polystab::reductions::{build_instance, convex_combination, load_polytope_json, LoadedPolytope, ReductionKind};
use polystab::spectral::{eigenvalues, DEFAULT_MARGIN};
use polystab::switched::{
    conjecture_experiment, integrate, rows_to_csv, AssessConfig, ExperimentConfig, Flag, SwitchingPolicy,
};
use polystab::SimplexPoint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "polystab",
    version,
    about = "Stability questions on matrix polytopes built from graphs"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random starts for the numeric searches.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    /// Margin for strict spectral inequalities.
    #[arg(long, global = true, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a reduction from a DIMACS graph and write its polytope JSON.
    Reduce {
        graph: PathBuf,
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        j: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Decide an existence question on a polytope file.
    Decide {
        polytope: PathBuf,
        #[arg(long)]
        question: Question,
        /// Skip the graph oracle even when it applies.
        #[arg(long)]
        force_numeric: bool,
        /// Largest graph handed to the exact oracle.
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalues of a convex combination, closed form beside the eigensolver.
    Spectrum {
        polytope: PathBuf,
        /// `uniform`, `vertex:I` (1-based) or comma-separated weights.
        #[arg(long, default_value = "uniform")]
        weights: String,
    },
    /// Simulate the switched system and write the trajectory CSV.
    Simulate {
        polytope: PathBuf,
        /// `constant:I`, `periodic:I@D,I@D,...`, `min-projection[:PERIOD]`
        /// or `mix:uniform|W,W,...` (indices 1-based).
        #[arg(long, default_value = "min-projection")]
        policy: String,
        /// `eI` (1-based basis vector), `ones` or comma-separated values.
        #[arg(long, default_value = "e1")]
        x0: String,
        #[arg(long, default_value_t = 50.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fixed versus switched stabilizability over many graphs.
    Experiment {
        /// DIMACS files or directories of them.
        #[arg(long, num_args = 1..)]
        graphs: Vec<PathBuf>,
        /// Number of Erdős–Rényi graphs to generate.
        #[arg(long, default_value_t = 0)]
        random_graphs: usize,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        /// `A..B` (inclusive), `A,B,...` or a single value.
        #[arg(long, default_value = "2..4")]
        j: String,
        #[arg(long, default_value_t = 50.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1e-2)]
        sample_period: f64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    MinRadius,
    MaxRadius,
    MMatrix,
    Hurwitz,
}

impl From<Kind> for ReductionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::MinRadius => ReductionKind::MinRadius,
            Kind::MaxRadius => ReductionKind::MaxRadius,
            Kind::MMatrix => ReductionKind::MMatrix,
            Kind::Hurwitz => ReductionKind::Hurwitz,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Question {
    /// A convex combination with spectral radius below one.
    SchurExists,
    /// A convex combination with spectral radius above one.
    UnstableExists,
    /// A convex combination that is a nonsingular M-matrix.
    MMatrixExists,
    /// A convex combination that is Hurwitz.
    HurwitzExists,
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_polytope(path: &Path) -> Result<LoadedPolytope> {
    load_polytope_json(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn parse_weights(spec: &str, k: usize) -> Result<SimplexPoint> {
    if spec == "uniform" {
        return Ok(SimplexPoint::uniform(k));
    }
    if let Some(i) = spec.strip_prefix("vertex:") {
        let i: usize = i.parse().context("vertex index")?;
        ensure!((1..=k).contains(&i), "vertex index {i} outside 1..={k}");
        return Ok(SimplexPoint::vertex(k, i - 1)?);
    }
    let w = parse_list(spec)?;
    ensure!(w.len() == k, "{} weights given for {k} matrices", w.len());
    Ok(SimplexPoint::new(w)?)
}

fn parse_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}")))
        .collect()
}

fn parse_index(s: &str, k: usize) -> Result<usize> {
    let i: usize = s.trim().parse().with_context(|| format!("bad index {s:?}"))?;
    ensure!((1..=k).contains(&i), "index {i} outside 1..={k}");
    Ok(i - 1)
}

fn parse_policy(spec: &str, k: usize) -> Result<SwitchingPolicy> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match name {
        "constant" => SwitchingPolicy::Constant(parse_index(arg, k)?),
        "periodic" => SwitchingPolicy::Periodic(
            arg.split(',')
                .map(|seg| {
                    let (i, d) = seg.split_once('@').context("periodic segments are INDEX@DURATION")?;
                    Ok((parse_index(i, k)?, d.trim().parse::<f64>().context("duration")?))
                })
                .collect::<Result<_>>()?,
        ),
        "min-projection" => SwitchingPolicy::MinProjection {
            sample_period: if arg.is_empty() {
                1e-2
            } else {
                arg.parse().context("sample period")?
            },
        },
        "mix" => SwitchingPolicy::ConstantMix(parse_weights(arg, k)?),
        _ => bail!("unknown policy {spec:?}"),
    })
}

fn parse_x0(spec: &str, n: usize) -> Result<Vec<f64>> {
    if spec == "ones" {
        return Ok(vec![1.0; n]);
    }
    if let Some(i) = spec.strip_prefix('e') {
        if let Ok(i) = i.parse::<usize>() {
            ensure!((1..=n).contains(&i), "basis index {i} outside 1..={n}");
            let mut x = vec![0.0; n];
            x[i - 1] = 1.0;
            return Ok(x);
        }
    }
    let x = parse_list(spec)?;
    ensure!(x.len() == n, "x0 has {} entries, expected {n}", x.len());
    Ok(x)
}

fn parse_j_range(spec: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        ensure!(a <= b, "empty range {spec}");
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad j {s:?}")))
        .collect()
}

fn graph_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(p)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            inner.retain(|f| f.is_file());
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string(value).expect("JSON values serialize"));
}

fn exit_for(answer: Answer) -> u8 {
    match answer {
        Answer::Yes => 0,
        Answer::No => 1,
        Answer::Unknown | Answer::Boundary => 3,
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    ensure!(g.margin > 0.0 && g.margin.is_finite(), "--margin must be positive");
    ensure!(g.restarts >= 1, "--restarts must be at least 1");
    match cli.command {
        Command::Reduce { graph, kind, j, out } => {
            let graph = parse_dimacs(&read(&graph)?).with_context(|| format!("parsing {}", graph.display()))?;
            let inst = build_instance(&graph, j, kind.into())?;
            let text = inst.to_json();
            eprintln!(
                "{}: n = {}, k = {}, r = {}",
                inst.kind.as_str(),
                inst.polytope.n(),
                inst.polytope.k(),
                inst.r
            );
            match out {
                Some(path) => {
                    write_atomic(&path, &text)?;
                    print_json(&json!({
                        "kind": inst.kind, "j": inst.j, "n": inst.polytope.n(), "k": inst.polytope.k(),
                        "r": inst.r, "out": path,
                    }));
                }
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Decide {
            polytope,
            question,
            force_numeric,
            cap,
            out,
        } => {
            ensure!(cap <= MAX_BRUTE_FORCE_CAP, "--cap may not exceed {MAX_BRUTE_FORCE_CAP}");
            let loaded = load_polytope(&polytope)?;
            let config = DecideConfig {
                brute_force_cap: cap,
                restarts: g.restarts,
                seed: g.seed,
                margin: g.margin,
                force_numeric,
            };
            let decision = match question {
                Question::SchurExists => decide_min_radius(&loaded, &config),
                Question::UnstableExists => decide_max_radius(&loaded, &config),
                Question::MMatrixExists => decide_exists_m_matrix(&loaded, &config),
                Question::HurwitzExists => decide_exists_hurwitz(&loaded, &config),
            }?;
            let text = decision.to_json();
            if let Some(path) = out {
                write_atomic(&path, &format!("{text}\n"))?;
            }
            println!("{text}");
            eprintln!(
                "{:?} via {:?}, margin {:e}",
                decision.answer, decision.method, decision.margin
            );
            Ok(exit_for(decision.answer))
        }
        Command::Spectrum { polytope, weights } => {
            let loaded = load_polytope(&polytope)?;
            let p = loaded.polytope();
            let pi = parse_weights(&weights, p.k())?;
            let m = convex_combination(p, &pi)?;
            let solver = eigenvalues(&m)?;
            let numeric: Vec<[f64; 2]> = solver.eigenvalues().iter().map(|e| [e.re, e.im]).collect();
            let closed = match loaded.instance() {
                Some(inst) => Some(inst.closed_form_spectrum(&pi)?.eigenvalues()),
                None => None,
            };
            let deviation = closed.as_ref().map(|c| {
                c.iter()
                    .zip(solver.eigenvalues())
                    .map(|(x, e)| (x - e.re).abs().max(e.im.abs()))
                    .fold(0.0, f64::max)
            });
            for (i, e) in solver.eigenvalues().iter().enumerate() {
                let cf = closed.as_ref().map_or(String::from("-"), |c| format!("{:.12}", c[i]));
                eprintln!("{i:>3}  closed form {cf:>16}  eigensolver {:.12} {:+.3e}i", e.re, e.im);
            }
            if let Some(d) = deviation {
                eprintln!("max deviation {d:e}");
            }
            print_json(&json!({
                "weights": pi,
                "closed_form": closed,
                "eigensolver": numeric,
                "spectral_radius": solver.radius(),
                "spectral_abscissa": solver.abscissa(),
                "max_deviation": deviation,
            }));
            Ok(0)
        }
        Command::Simulate {
            polytope,
            policy,
            x0,
            horizon,
            step,
            out,
        } => {
            let loaded = load_polytope(&polytope)?;
            let p = loaded.polytope();
            let policy = parse_policy(&policy, p.k())?;
            let x0 = parse_x0(&x0, p.n())?;
            let traj = integrate(p, &policy, &x0, horizon, step)?;
            if let Some(path) = &out {
                write_atomic(path, &traj.to_csv())?;
            }
            let x = traj.final_state();
            let final_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let rate = traj.decay_rate_estimate();
            eprintln!(
                "final norm {final_norm:.6e}, rate estimate {rate:.6e}, {:?}",
                traj.termination
            );
            print_json(&json!({
                "final_time": traj.times.last(),
                "final_norm": final_norm,
                "rate_estimate": rate,
                "termination": traj.termination,
                "switches": traj.switch_log.len().saturating_sub(1),
                "out": out,
            }));
            Ok(0)
        }
        Command::Experiment {
            graphs,
            random_graphs,
            n,
            edge_prob,
            j,
            horizon,
            step,
            sample_period,
            out,
        } => {
            let mut named = Vec::new();
            for f in graph_files(&graphs)? {
                let id = f
                    .file_stem()
                    .map_or_else(|| f.display().to_string(), |s| s.to_string_lossy().into_owned());
                let graph = parse_dimacs(&read(&f)?).with_context(|| format!("parsing {}", f.display()))?;
                named.push((id, graph));
            }
            ensure!((0.0..=1.0).contains(&edge_prob), "--edge-prob must lie in [0, 1]");
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            for i in 0..random_graphs {
                named.push((format!("er-{i}"), Graph::random(n, edge_prob, &mut rng)?));
            }
            ensure!(!named.is_empty(), "no graphs: pass --graphs or --random-graphs");
            let config = ExperimentConfig {
                assess: AssessConfig {
                    seed: g.seed,
                    horizon,
                    step,
                    policies: vec![SwitchingPolicy::MinProjection { sample_period }],
                    ..AssessConfig::default()
                },
                decide: DecideConfig {
                    restarts: g.restarts,
                    seed: g.seed,
                    margin: g.margin,
                    ..DecideConfig::default()
                },
            };
            let rows = conjecture_experiment(&named, &parse_j_range(&j)?, &config)?;
            let csv = rows_to_csv(&rows);
            let count = |f: Flag| rows.iter().filter(|r| r.flag == Some(f)).count();
            let flagged = rows.iter().filter(|r| r.flag.is_some()).count();
            match &out {
                Some(path) => write_atomic(path, &csv)?,
                None => print!("{csv}"),
            }
            eprintln!("{} rows, {flagged} flagged", rows.len());
            if out.is_some() {
                print_json(&json!({
                    "rows": rows.len(),
                    "flagged": flagged,
                    "counterexample_candidates": count(Flag::ConjectureCounterexampleCandidate),
                    "numeric_failures": count(Flag::NumericFailure),
                    "soundness_violations": count(Flag::SoundnessViolation),
                    "out": out,
                }));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
