use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};
use setfusion::constructions::{
    build_generation_circuit, generation_input, simulate_generation, Certificate, Construction, RuleSet,
};
use setfusion::fusion::{
    canonical_filters, compile_lambda, covers_canonical, verify_lambda, CompileTarget, Compiled, Lambda,
    LambdaWitness, VerifyMode,
};
use setfusion::sets::{DiscreteSpace, Subset};
use setfusion::solvers::{
    counting_bound, cubic_bound, finiteness_test, random_graph_experiment, solve_cyclic_intersections,
    solve_discrete, solve_discrete_multi, solve_rho, solve_rho_can_neq, solve_side_count, ComplexityResult,
    RhoMethod, SearchBudget, Side,
};
use setfusion::spaces::{make_generators, neq, SpaceKind};

use crate::input::{self, fail, InputError};
use crate::report::{needs_more_budget, result_value};
use crate::transfer::Pair;
use crate::{Command, Finish, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    /// Total operations.
    D,
    /// Intersections only.
    Dcap,
    /// Unions only.
    Dcup,
    /// Cover complexity.
    Rho,
    /// Cover complexity over semi-ultra-filters.
    RhoUltra,
    /// Intersection gates of a cyclic sequence.
    Dcirc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    LambdaSearch,
    SetCover,
}

impl From<MethodArg> for RhoMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::LambdaSearch => RhoMethod::LambdaSearch,
            MethodArg::SetCover => RhoMethod::SetCover,
        }
    }
}

#[derive(Args, Debug)]
pub struct TargetArgs {
    /// Space descriptor, e.g. `stars:4x4`, `bool:2`, `rect:2`.
    #[arg(long)]
    pub space: String,
    /// Target set: file path, catalog name (`neq:N`, `chess:RxC`) or 0/1 string.
    #[arg(long)]
    pub target: String,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value_t = MethodArg::LambdaSearch)]
    pub method: MethodArg,
    #[arg(long)]
    pub space: String,
    /// Repeat for a multi-target `d`.
    #[arg(long, required = true)]
    pub target: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CertKind {
    Construction,
    Cyclic,
    Lambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Closure,
    Enumerate,
    Ultra,
    /// Only the canonical filters of a graph target over stars.
    Canonical,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: CertKind,
    /// Certificate file.
    #[arg(long, alias = "lambda", alias = "construction")]
    pub cert: PathBuf,
    /// Must match the certificate header when given.
    #[arg(long)]
    pub space: Option<String>,
    /// Expected value; repeat for multi-output constructions. Required except for `lambda`.
    #[arg(long)]
    pub target: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Closure)]
    pub mode: ModeArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompileTo {
    Cyclic,
    Acyclic,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    #[arg(value_enum)]
    pub to: CompileTo,
    #[arg(long)]
    pub lambda: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Grid to hypercube.
    Forward,
    /// Hypercube to grid.
    Backward,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["set", "construction"])))]
pub struct TransferArgs {
    #[arg(value_enum)]
    pub direction: Direction,
    /// Grid side is 2^n, hypercube dimension 2n.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub set: Option<String>,
    /// Construction certificate file.
    #[arg(long)]
    pub construction: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NeqArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct GenrulesArgs {
    #[arg(long)]
    pub m: usize,
    /// Rules `a,b,c` separated by `;`, entries in 1..=m.
    #[arg(long, default_value = "")]
    pub rules: String,
    /// A single input `Y` as an m-character 0/1 string; otherwise every input is checked.
    #[arg(long)]
    pub input: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Uniform random graphs with exact ρ and D∩.
    RandomGraph {
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum Bounds {
    /// Largest s with 3·s·⌈log₂(m+s)⌉ < k.
    Counting {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
    /// Operation count of the acyclic compile of a pair family.
    Cubic {
        #[arg(long)]
        lambda: PathBuf,
    },
}

pub fn dispatch(cmd: &Command, budget: &SearchBudget) -> Result<Outcome, InputError> {
    match cmd {
        Command::Solve(a) => solve(a, budget),
        Command::Verify(a) => verify(a),
        Command::Compile(a) => compile(a),
        Command::Finiteness(a) => finiteness(a),
        Command::Transfer(a) => transfer(a),
        Command::Neq(a) => neq_chain(a, budget),
        Command::Genrules(a) => genrules(a),
        Command::Experiment(Experiment::RandomGraph { sizes, samples, seed }) => {
            let report = random_graph_experiment(sizes, *samples, *seed, budget)?;
            Ok(plain(vec![serde_json::to_value(report)?]))
        }
        Command::Bounds(Bounds::Counting { k, m }) => Ok(plain(vec![serde_json::to_value(counting_bound(*k, *m)?)?])),
        Command::Bounds(Bounds::Cubic { lambda }) => {
            let (space, target, lambda) = lambda_cert(lambda)?;
            Ok(plain(vec![serde_json::to_value(cubic_bound(&target, &space, &lambda)?)?]))
        }
    }
}

fn plain(results: Vec<Value>) -> Outcome {
    Outcome {
        results,
        finish: Finish::Ok,
        certificate: None,
    }
}

fn solved(r: &ComplexityResult, targets: &[Subset]) -> Result<Outcome, InputError> {
    let verified = r.is_exact().then(|| r.verify(targets)).transpose()?;
    let finish = if verified == Some(false) {
        Finish::VerificationFailed
    } else if needs_more_budget(r) {
        Finish::BudgetExhausted
    } else {
        Finish::Ok
    };
    Ok(Outcome {
        results: vec![result_value(r, verified)],
        finish,
        certificate: r.witness.certificate().transpose()?,
    })
}

fn solve(a: &SolveArgs, budget: &SearchBudget) -> Result<Outcome, InputError> {
    let space = input::space(&a.space)?;
    let targets = a
        .target
        .iter()
        .map(|t| input::target(t, &space))
        .collect::<Result<Vec<_>, _>>()?;
    if targets.len() > 1 && a.measure != MeasureArg::D {
        return fail("several targets are only supported for --measure d");
    }
    let t = &targets[0];
    let r = match a.measure {
        MeasureArg::D if targets.len() > 1 => solve_discrete_multi(&targets, &space, budget)?,
        MeasureArg::D => solve_discrete(t, &space, budget)?,
        MeasureArg::Dcap => solve_side_count(t, &space, Side::Intersections, budget)?,
        MeasureArg::Dcup => solve_side_count(t, &space, Side::Unions, budget)?,
        MeasureArg::Rho => solve_rho(t, &space, a.method.into(), false, budget)?,
        MeasureArg::RhoUltra => solve_rho(t, &space, a.method.into(), true, budget)?,
        MeasureArg::Dcirc => solve_cyclic_intersections(t, &space, budget)?,
    };
    solved(&r, &targets)
}

fn lambda_cert(path: &Path) -> Result<(Arc<DiscreteSpace>, Subset, Lambda), InputError> {
    match input::certificate(path)? {
        Certificate::Lambda { space, target, lambda } => Ok((space, target, lambda)),
        _ => fail(format!("{} is not a pair-family certificate", path.display())),
    }
}

fn element(space: &DiscreteSpace, w: usize) -> String {
    space.ground().label(w).to_string()
}

/// First element where the computed and expected sets differ.
fn mismatch(space: &DiscreteSpace, got: &Subset, want: &Subset) -> Value {
    match got.iter().find(|&w| !want.contains(w)) {
        Some(w) => json!({"element": element(space, w), "problem": "computed but not in the target"}),
        None => {
            let w = want.iter().find(|&w| !got.contains(w)).expect("sets differ");
            json!({"element": element(space, w), "problem": "in the target but not computed"})
        }
    }
}

fn verify_values(space: &DiscreteSpace, got: &[Subset], want: &[Subset]) -> Option<Value> {
    if got.len() != want.len() {
        return Some(json!({"problem": format!("{} outputs, {} targets", got.len(), want.len())}));
    }
    got.iter().zip(want).find(|(g, w)| g != w).map(|(g, w)| mismatch(space, g, w))
}

fn verify(a: &VerifyArgs) -> Result<Outcome, InputError> {
    let cert = input::certificate(&a.cert)?;
    input::check_space(a.space.as_deref(), cert.space())?;
    let space = cert.space().clone();
    let targets = a
        .target
        .iter()
        .map(|t| input::target(t, &space))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut result, witness) = match (a.kind, &cert) {
        (CertKind::Construction, Certificate::Construction(c)) => {
            if targets.is_empty() {
                return fail("verify construction needs --target");
            }
            let cost = c.cost();
            let values = c.output_values();
            (
                json!({
                    "kind": "construction",
                    "steps": c.len(),
                    "intersections": cost.intersections,
                    "unions": cost.unions,
                    "outputs": values.iter().map(Subset::to_bit_string).collect::<Vec<_>>(),
                }),
                verify_values(&space, &values, &targets),
            )
        }
        (CertKind::Cyclic, Certificate::Cyclic(s)) => {
            let [target] = &targets[..] else {
                return fail("verify cyclic needs exactly one --target");
            };
            let (value, trace) = s.evaluate();
            (
                json!({
                    "kind": "cyclic",
                    "gates": s.gates().len(),
                    "intersections": s.cost().intersections,
                    "rounds": trace.rounds,
                    "output": value.to_bit_string(),
                }),
                verify_values(&space, std::slice::from_ref(&value), std::slice::from_ref(target)),
            )
        }
        (CertKind::Lambda, Certificate::Lambda { target, lambda, .. }) => {
            match &targets[..] {
                [] => {}
                [t] if t == target => {}
                _ => return fail("--target does not match the certificate"),
            }
            let witness = verify_pairs(&space, target, lambda, a.mode)?;
            (
                json!({"kind": "lambda", "pairs": lambda.len(), "mode": format!("{:?}", a.mode).to_lowercase()}),
                witness,
            )
        }
        _ => return fail(format!("{} is not a {:?} certificate", a.cert.display(), a.kind).to_lowercase()),
    };
    let valid = witness.is_none();
    result["valid"] = valid.into();
    if let Some(w) = witness {
        result["witness"] = w;
    }
    Ok(Outcome {
        results: vec![result],
        finish: if valid { Finish::Ok } else { Finish::VerificationFailed },
        certificate: None,
    })
}

fn lambda_witness(space: &DiscreteSpace, lambda: &Lambda, w: Option<LambdaWitness>) -> Option<Value> {
    w.map(|w| match w {
        LambdaWitness::Element(x) => json!({"element": element(space, x), "problem": "closure disagrees with the target"}),
        LambdaWitness::Filter { filter, element: x } => json!({
            "element": element(space, x),
            "problem": "uncovered semi-filter above this element",
            "filter": filter.minimal().iter().map(|&m| lambda.universe().to_global(m).to_bit_string()).collect::<Vec<_>>(),
        }),
    })
}

fn verify_pairs(space: &DiscreteSpace, target: &Subset, lambda: &Lambda, mode: ModeArg) -> Result<Option<Value>, InputError> {
    let mode = match mode {
        ModeArg::Closure => VerifyMode::Closure,
        ModeArg::Enumerate => VerifyMode::Enumerate,
        ModeArg::Ultra => VerifyMode::EnumerateUltra,
        ModeArg::Canonical => {
            let (universe, filters) = canonical_filters(target, space)?;
            if universe != *lambda.universe() {
                return fail("pair family is not over the complement of the target");
            }
            return Ok(filters
                .iter()
                .find(|(_, f)| !lambda.pairs().iter().any(|&p| covers_canonical(p, f)))
                .map(|((u, v), _)| json!({"edge": [u, v], "problem": "canonical filter not covered"})));
        }
    };
    let v = verify_lambda(target, space, lambda, mode)?;
    Ok(lambda_witness(space, lambda, v.witness))
}

fn compile(a: &CompileArgs) -> Result<Outcome, InputError> {
    let (space, target, lambda) = lambda_cert(&a.lambda)?;
    let check = verify_lambda(&target, &space, &lambda, VerifyMode::Closure)?;
    if let Some(w) = lambda_witness(&space, &lambda, check.witness) {
        return Ok(Outcome {
            results: vec![json!({"kind": "compile", "valid": false, "witness": w})],
            finish: Finish::VerificationFailed,
            certificate: None,
        });
    }
    let to = match a.to {
        CompileTo::Cyclic => CompileTarget::Cyclic,
        CompileTo::Acyclic => CompileTarget::Acyclic,
    };
    let (compiled, trace) = compile_lambda(&target, &space, &lambda, to)?;
    let certificate = match &compiled {
        Compiled::Cyclic(s) => s.to_certificate()?,
        Compiled::Acyclic(c) => c.to_certificate()?,
    };
    Ok(Outcome {
        results: vec![json!({
            "kind": "compile",
            "target": format!("{:?}", a.to).to_lowercase(),
            "pairs": lambda.len(),
            "intersections": compiled.intersections(),
            "stages": trace.stages.len(),
            "value": compiled.value().to_bit_string(),
            "certificate": certificate,
        })],
        finish: Finish::Ok,
        certificate: Some(certificate),
    })
}

fn finiteness(a: &TargetArgs) -> Result<Outcome, InputError> {
    let space = input::space(&a.space)?;
    let target = input::target(&a.target, &space)?;
    let w = finiteness_test(&target, &space)?;
    Ok(plain(vec![json!({
        "kind": "finiteness",
        "finite": w.is_finite(),
        "witness": format!("{w:?}"),
    })]))
}

fn transfer(a: &TransferArgs) -> Result<Outcome, InputError> {
    let pair = Pair::new(a.n)?;
    if let Some(set) = &a.set {
        let (from, to) = match a.direction {
            Direction::Forward => (&pair.grid, &pair.cube),
            Direction::Backward => (&pair.cube, &pair.grid),
        };
        let s = input::target(set, from)?;
        let image = match a.direction {
            Direction::Forward => pair.phi.image(&s)?,
            Direction::Backward => pair.phi.preimage(&s)?,
        };
        return Ok(plain(vec![json!({
            "kind": "transfer",
            "from": from.descriptor(),
            "to": to.descriptor(),
            "image": image.to_bit_string(),
        })]));
    }
    let path = a.construction.as_ref().expect("clap enforces one input");
    let Certificate::Construction(c) = input::certificate(path)? else {
        return fail(format!("{} is not a construction certificate", path.display()));
    };
    let moved: Construction = match a.direction {
        Direction::Forward => pair.forward(&c)?,
        Direction::Backward => pair.backward(&c)?,
    };
    let text = moved.to_certificate()?;
    let cost = moved.cost();
    Ok(Outcome {
        results: vec![json!({
            "kind": "transfer",
            "to": moved.space().descriptor(),
            "intersections": cost.intersections,
            "unions": cost.unions,
            "value": moved.evaluate().value.to_bit_string(),
            "certificate": text,
        })],
        finish: Finish::Ok,
        certificate: Some(text),
    })
}

fn neq_chain(a: &NeqArgs, budget: &SearchBudget) -> Result<Outcome, InputError> {
    let n = a.n;
    let space = Arc::new(make_generators(SpaceKind::GraphStars { rows: n, cols: n })?);
    let target = neq(n)?;
    let targets = std::slice::from_ref(&target);
    type Solver<'a> = Box<dyn Fn() -> setfusion::Result<ComplexityResult> + 'a>;
    let runs: Vec<(&str, Solver)> = vec![
        ("D∩", Box::new(|| solve_side_count(&target, &space, Side::Intersections, budget))),
        ("ρ", Box::new(|| solve_rho(&target, &space, RhoMethod::LambdaSearch, false, budget))),
        ("ρ (set cover)", Box::new(|| solve_rho(&target, &space, RhoMethod::SetCover, false, budget))),
        ("ρ_ultra", Box::new(|| solve_rho(&target, &space, RhoMethod::LambdaSearch, true, budget))),
        ("D°∩", Box::new(|| solve_cyclic_intersections(&target, &space, budget))),
        ("ρ_can_neq", Box::new(|| solve_rho_can_neq(n, budget))),
    ];
    let mut results = Vec::new();
    let mut finish = Finish::Ok;
    for (label, run) in runs {
        match run() {
            Ok(r) => {
                let verified = r.is_exact().then(|| r.verify(targets)).transpose()?;
                if verified == Some(false) {
                    finish = finish.max(Finish::VerificationFailed);
                } else if needs_more_budget(&r) {
                    finish = finish.max(Finish::BudgetExhausted);
                }
                let mut v = json!({"label": label});
                v.as_object_mut().unwrap().extend(result_value(&r, verified).as_object().unwrap().clone());
                results.push(v);
            }
            Err(e @ setfusion::Error::Cap { .. }) => results.push(json!({"label": label, "skipped": e.to_string()})),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome {
        results,
        finish,
        certificate: None,
    })
}

fn genrules(a: &GenrulesArgs) -> Result<Outcome, InputError> {
    let rules = RuleSet::new(a.m, input::rules(&a.rules)?)?;
    let circuit = build_generation_circuit(&rules)?;
    let (value, trace) = circuit.evaluate();
    let inputs: Vec<Subset> = match &a.input {
        Some(y) => {
            let y = Subset::parse_bits(y)?;
            if y.len() != a.m {
                return fail(format!("--input needs {} characters", a.m));
            }
            vec![y]
        }
        None if a.m <= 16 => (0..1u64 << a.m).map(|w| Subset::from_word(a.m, w)).collect(),
        None => return fail("more than 16 rule elements; pass --input"),
    };
    let mut disagreements = Vec::new();
    let mut accepted = 0;
    for y in &inputs {
        let direct = simulate_generation(&rules, y)?;
        let by_circuit = value.contains(generation_input(a.m, y)?);
        accepted += direct as usize;
        if direct != by_circuit {
            disagreements.push(y.to_bit_string());
        }
    }
    let text = circuit.to_certificate()?;
    Ok(Outcome {
        results: vec![json!({
            "kind": "genrules",
            "rules": rules.rules().len(),
            "gates": circuit.gates().len(),
            "intersections": circuit.cost().intersections,
            "rounds": trace.rounds,
            "inputs_checked": inputs.len(),
            "accepted": accepted,
            "disagreements": disagreements,
            "certificate": text,
        })],
        finish: if disagreements.is_empty() { Finish::Ok } else { Finish::VerificationFailed },
        certificate: Some(text),
    })
}
