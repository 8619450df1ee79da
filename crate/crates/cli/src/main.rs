use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use algsoa::algebra::{check_bijection, count_lifting_tables, enumerate_algebra_structures, check_filler};
use algsoa::arrow::{ArrowObj, GeneratingSet, Square};
use algsoa::certificate::{self, Certificate};
use algsoa::io;
use algsoa::laws::{self, FactorizationRule};
use algsoa::presheaf::{FinCategory, PresheafMap};
use algsoa::sequence::{build_comparison, run_garner, run_quillen, run_sequence, Mode, OrdinalBudget, SequenceState};
use algsoa::Error;

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_EXHAUSTED: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "algsoa", version, about = "Small object argument on finite presheaves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the JSON report (or certificate) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Problem {
    /// Catalog key or path to a category document.
    #[arg(long)]
    category: Option<String>,
    /// Catalog key or path to a generating-set document.
    #[arg(long, default_value = "point")]
    gens: String,
    /// Path to a map document.
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value_t = 32)]
    budget_successors: usize,
    #[arg(long, default_value_t = 1)]
    budget_omega_blocks: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Garner sequence and emit a certificate.
    Factorize {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        output: Output,
    },
    /// Run the classical sequence and emit a certificate.
    Quillen {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        output: Output,
    },
    /// Run both sequences and the comparison maps between them.
    Compare {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        output: Output,
    },
    /// Check the laws of built-in factorisation rules.
    Laws {
        #[arg(long, value_delimiter = ',', default_value = "graph,cograph")]
        rules: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check a seeded single-entry corruption of graph or cograph instead.
        #[arg(long)]
        mutation: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Count algebra structures and lifting tables on the input map.
    Enumerate {
        #[arg(long)]
        category: Option<String>,
        #[arg(long, default_value = "point")]
        gens: String,
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Solve a lifting problem with the table stored in a certificate.
    Fill {
        #[arg(long)]
        certificate: PathBuf,
        /// `{"generator": i, "top": [[..]], "bottom": [[..]]}`
        #[arg(long)]
        problem: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Re-check a certificate.
    Validate {
        certificate: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input { .. } | Error::NotFound { .. } | Error::Incompatible(_) | Error::Precondition(_) => EXIT_INPUT,
            _ => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_failure(format!("cannot read {}: {e}", path.display())))
}

/// A catalog key, or a file when one exists at that path.
fn key_or_file(arg: &str) -> Result<Value, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = read(path)?;
        io::parse_json(&text).map_err(|e| input_failure(format!("{}: {e}", path.display())))
    } else {
        Ok(Value::String(arg.to_string()))
    }
}

fn in_file<T>(path: &Path, r: algsoa::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

struct Loaded {
    gens: GeneratingSet,
    g: ArrowObj,
}

fn load(category: Option<&str>, gens: &str, map: &Path) -> Result<Loaded, Failure> {
    let gens_v = key_or_file(gens)?;
    let gens = in_file(Path::new("--gens"), io::generators_from_value(&gens_v, ""))?;
    let text = read(map)?;
    let g = in_file(map, io::parse_json(&text).and_then(|v| io::map_from_value(&v, "")))?;
    let base: Option<Arc<FinCategory>> = match category {
        Some(c) => Some(in_file(Path::new("--category"), io::category_from_value(&key_or_file(c)?, ""))?),
        None => None,
    };
    if let Some(base) = base {
        if **gens.base() != *base || **g.source().base() != *base {
            return Err(input_failure("inputs do not live over the category given by --category"));
        }
    }
    if **gens.base() != **g.source().base() {
        return Err(input_failure("the map and the generating set live over different categories"));
    }
    Ok(Loaded {
        gens,
        g: ArrowObj::from(g),
    })
}

fn budget(p: &Problem) -> Result<OrdinalBudget, Failure> {
    Ok(OrdinalBudget::new(p.budget_successors, p.budget_omega_blocks)?)
}

fn emit(output: &Output, json: &Value, text: &str) -> Result<(), Failure> {
    let rendered = format!("{}\n", serde_json::to_string_pretty(json).expect("plain data"));
    if let Some(path) = &output.out {
        fs::write(path, &rendered).map_err(|e| input_failure(format!("cannot write {}: {e}", path.display())))?;
    }
    match output.format {
        Format::Json => print!("{rendered}"),
        Format::Text => println!("{text}"),
    }
    Ok(())
}

fn sizes(s: &[usize]) -> String {
    if s.len() == 1 {
        s[0].to_string()
    } else {
        format!("{s:?}")
    }
}

fn stage_table(state: &SequenceState) -> String {
    let mut out = String::from("stage  label     |K|\n");
    for (i, s) in state.stages().iter().enumerate() {
        out.push_str(&format!("{i:<6} {:<9} {}\n", s.label(), sizes(s.object().sizes())));
    }
    out
}

fn verdict(state: &SequenceState) -> (String, u8) {
    match state.converged_at() {
        Some(c) => (
            format!("converged at stage {}; |K| = {}", state.stage(c).label(), sizes(state.stage(c).object().sizes())),
            EXIT_OK,
        ),
        None => ("budget exhausted without convergence".to_string(), EXIT_EXHAUSTED),
    }
}

fn run_certified(mode: Mode, problem: &Problem, output: &Output) -> Outcome {
    let inputs = load(problem.category.as_deref(), &problem.gens, &problem.map)?;
    let budget = budget(problem)?;
    let state = match mode {
        Mode::Garner => run_garner(&inputs.gens, &inputs.g, budget)?,
        Mode::Quillen => run_quillen(&inputs.gens, &inputs.g, budget)?,
    };
    state.check_invariants()?;
    let cert = certificate::emit(&state)?;
    let (line, code) = verdict(&state);
    let mut text = format!("mode: {mode}\n{}{line}", stage_table(&state));
    if let Some(a) = &cert.algebra {
        text.push_str(&format!("\nalgebra on stage {}: {} fillers", a.stage, a.lifting_table.len()));
    }
    let json = serde_json::to_value(&cert).expect("plain data");
    emit(output, &json, &text)?;
    Ok(code)
}

fn compare(problem: &Problem, output: &Output) -> Outcome {
    let inputs = load(problem.category.as_deref(), &problem.gens, &problem.map)?;
    let budget = budget(problem)?;
    let (garner, quillen) = std::thread::scope(|s| {
        let g = s.spawn(|| run_sequence(Mode::Garner, &inputs.gens, &inputs.g, budget, false));
        let q = s.spawn(|| run_sequence(Mode::Quillen, &inputs.gens, &inputs.g, budget, false));
        (g.join().expect("garner run"), q.join().expect("classical run"))
    });
    let (garner, quillen) = (garner?, quillen?);
    let qs = build_comparison(&garner, &quillen)?;
    let surjective: Vec<bool> = qs.iter().map(PresheafMap::is_surjective).collect();
    let all = surjective.iter().all(|&b| b);

    let mut text = String::from("stage  label     quillen   garner    q surjective\n");
    let mut rows = Vec::new();
    for (i, (q, &surj)) in qs.iter().zip(&surjective).enumerate() {
        let label = garner.stage(i).label();
        text.push_str(&format!(
            "{i:<6} {label:<9} {:<9} {:<9} {}\n",
            sizes(q.source().sizes()),
            sizes(q.target().sizes()),
            if surj { "yes" } else { "no" }
        ));
        rows.push(json!({
            "stage": i,
            "label": label,
            "quillen": q.source().sizes(),
            "garner": q.target().sizes(),
            "surjective": surj,
        }));
    }
    let (line, code) = verdict(&garner);
    text.push_str(&format!("garner: {line}\n"));
    text.push_str(if all { "all comparison maps are surjective" } else { "some comparison map is not surjective" });
    let json = json!({
        "garner_converged_at": garner.converged_at(),
        "quillen_converged_at": quillen.converged_at(),
        "stages": rows,
        "all_surjective": all,
    });
    emit(output, &json, &text)?;
    Ok(if !all { EXIT_COUNTEREXAMPLE } else { code })
}

fn run_laws(rules: &[String], seed: u64, mutation: Option<u64>, output: &Output) -> Outcome {
    let sample = laws::default_sample(seed);
    let rules: Vec<Arc<dyn FactorizationRule>> = match mutation {
        Some(m) => vec![Arc::new(laws::seeded_mutation(m, &sample)?)],
        None => rules.iter().map(|r| laws::rule_by_name(r.trim())).collect::<algsoa::Result<_>>()?,
    };
    let report = laws::check_laws(&rules, &sample)?;
    let json = json!({ "seed": seed, "report": report });
    emit(output, &json, &report.to_string())?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

fn enumerate(category: Option<&str>, gens: &str, map: &Path, output: &Output) -> Outcome {
    let inputs = load(category, gens, map)?;
    let algebras = enumerate_algebra_structures(&inputs.gens, &inputs.g)?.len();
    let tables = count_lifting_tables(&inputs.gens, &inputs.g)?;
    let b = check_bijection(&inputs.gens, &inputs.g)?;
    let text = format!(
        "algebra structures: {algebras}\nlifting tables: {tables}\nbijection: {}",
        if b.holds { "holds" } else { "FAILS" }
    );
    let json = json!({
        "algebras": algebras,
        "lifting_tables": tables,
        "bijection": b.holds,
        "mapping": b.mapping,
    });
    emit(output, &json, &text)?;
    Ok(if b.holds { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
}

fn load_certificate(path: &Path) -> Result<Certificate, Failure> {
    let text = read(path)?;
    let v = in_file(path, io::parse_json(&text))?;
    serde_json::from_value(v).map_err(|e| input_failure(format!("{}: not a certificate: {e}", path.display())))
}

fn fill(cert_path: &Path, problem_path: &Path, output: &Output) -> Outcome {
    let cert = load_certificate(cert_path)?;
    in_file(cert_path, certificate::validate(&cert).map_err(|e| Error::Input {
        pointer: String::new(),
        message: e.to_string(),
    }))?;
    let Some(algebra) = &cert.algebra else {
        return Err(input_failure(format!("{}: the run did not converge; no lifting table", cert_path.display())));
    };
    let text = read(problem_path)?;
    let v = in_file(problem_path, io::parse_json(&text))?;
    let field = |k: &str| v.get(k).ok_or_else(|| input_failure(format!("{}: missing field /{k}", problem_path.display())));
    let generator = field("generator")?
        .as_u64()
        .ok_or_else(|| input_failure(format!("{}: /generator must be an index", problem_path.display())))? as usize;
    let table = |k: &str| -> Result<Vec<Vec<usize>>, Failure> {
        serde_json::from_value(field(k)?.clone()).map_err(|e| input_failure(format!("{}: /{k}: {e}", problem_path.display())))
    };
    let (top, bottom) = (table("top")?, table("bottom")?);
    let Some(entry) = algebra
        .lifting_table
        .iter()
        .find(|r| r.generator == generator && r.top == top && r.bottom == bottom)
    else {
        return Err(input_failure("no commuting square with that generator, top and bottom"));
    };

    // re-check the triangles on the rebuilt square
    let base = io::category_from_value(&cert.category, "/category")?;
    let rebuild = |c: &certificate::CompactPresheaf| algsoa::presheaf::Presheaf::new(base.clone(), c.sizes.clone(), c.actions.clone());
    let j = &cert.generators[generator];
    let (a, b) = (rebuild(&j.source)?, rebuild(&j.target)?);
    let stage = &cert.stages[algebra.stage];
    let k = rebuild(&stage.object)?;
    let y = rebuild(&cert.input.target)?;
    let jm = PresheafMap::new(a.clone(), b.clone(), j.components.clone())?;
    let rho = PresheafMap::new(k.clone(), y.clone(), stage.rho.clone())?;
    let sq = Square::new(
        ArrowObj::from(jm),
        ArrowObj::from(rho),
        PresheafMap::new(a, k.clone(), top)?,
        PresheafMap::new(b.clone(), y, bottom)?,
    )?;
    let d = PresheafMap::new(b, k, entry.filler.clone())?;
    check_filler(&sq, &d)?;

    let json = json!({ "generator": generator, "order": entry.order, "filler": entry.filler });
    emit(output, &json, &format!("filler: {:?}", entry.filler))?;
    Ok(EXIT_OK)
}

fn validate(path: &Path, output: &Output) -> Outcome {
    let text = read(path)?;
    match certificate::validate_text(&text) {
        Ok(summary) => {
            let line = format!(
                "certificate valid: {} run, {} stages, {}, {} fillers re-checked",
                summary.mode,
                summary.stages,
                match summary.converged_at {
                    Some(c) => format!("converged at stage {c}"),
                    None => "exhausted".to_string(),
                },
                summary.fillers_checked
            );
            emit(output, &json!({ "valid": true, "summary": summary }), &line)?;
            Ok(EXIT_OK)
        }
        Err(Error::Invalid(msg)) => {
            emit(output, &json!({ "valid": false, "reason": msg }), &format!("certificate INVALID: {msg}"))?;
            Ok(EXIT_COUNTEREXAMPLE)
        }
        Err(e) => Err(in_file(path, Err::<(), _>(e)).unwrap_err()),
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Factorize { problem, output } => run_certified(Mode::Garner, problem, output),
        Command::Quillen { problem, output } => run_certified(Mode::Quillen, problem, output),
        Command::Compare { problem, output } => compare(problem, output),
        Command::Laws {
            rules,
            seed,
            mutation,
            output,
        } => run_laws(rules, *seed, *mutation, output),
        Command::Enumerate {
            category,
            gens,
            map,
            output,
        } => enumerate(category.as_deref(), gens, map, output),
        Command::Fill {
            certificate,
            problem,
            output,
        } => fill(certificate, problem, output),
        Command::Validate { certificate, output } => validate(certificate, output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    let started = Instant::now();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    eprintln!("elapsed: {} ms", started.elapsed().as_millis());
    ExitCode::from(code)
}
