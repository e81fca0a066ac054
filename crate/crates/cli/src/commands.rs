use clap::ValueEnum;
use varitri_core::expr::parse;
use varitri_core::jetalg::{DiffPoly, EvoField, JetContext};
use varitri_core::ktbv::{
    antibracket, bv_differential, bv_extend, h0_report, kt_extend, master_equation_check, BvModel,
};
use varitri_core::tricomplex::{
    bounded_cohomology, closure_check, extend_delta, presymplectic_form, ClosureMode, Differential,
    InternalDifferential, RelationStatus, Truncation,
};
use varitri_core::varops::{
    conservation_check, euler_operator, evaluate_functional, frechet_derivative, helmholtz_check, lie_bracket,
    noether_identity_check, schouten_bracket, symmetry_check, SymmetryTarget, Verdict,
};

use crate::problem::{Operand, ProblemFile};
use crate::report::{betti_table, Record, Report, Status, Value};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    El,
    Helmholtz,
    CurrentCheck,
    SymmetryCheck,
    NoetherCheck,
    Kt,
    BvMaster,
    BvH0,
    Closure,
    Cohomology,
    Eval,
    Presymplectic,
    Bracket,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().expect("named").get_name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Strict,
    ToDepth,
}

/// Command-line overrides of the problem file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub max_jet: Option<u32>,
    pub max_deg: Option<u32>,
    pub depth: Option<usize>,
    pub mode: Option<Mode>,
}

impl Options {
    fn echo(&self) -> Value {
        let opt = |v: Option<i64>| v.map_or(Value::text("default"), Value::Int);
        Record::new()
            .with("max_jet", opt(self.max_jet.map(i64::from)))
            .with("max_deg", opt(self.max_deg.map(i64::from)))
            .with("depth", opt(self.depth.map(|d| d as i64)))
            .with(
                "mode",
                Value::text(match self.mode.unwrap_or(Mode::Strict) {
                    Mode::Strict => "strict",
                    Mode::ToDepth => "to-depth",
                }),
            )
            .build()
    }
}

pub fn run(cmd: Command, problem: &ProblemFile, opts: &Options) -> Result<Report, CliError> {
    let ctx = problem.context()?;
    let mut body = Record::new().with("options", opts.echo());
    let status = match cmd {
        Command::El => el(&ctx, problem, &mut body)?,
        Command::Helmholtz => helmholtz(&ctx, problem, &mut body)?,
        Command::CurrentCheck => current_check(&ctx, problem, &mut body)?,
        Command::SymmetryCheck => symmetry(&ctx, problem, &mut body)?,
        Command::NoetherCheck => noether(&ctx, problem, &mut body)?,
        Command::Kt => kt(&ctx, problem, &mut body)?,
        Command::BvMaster => bv_master(&ctx, problem, &mut body)?,
        Command::BvH0 => bv_h0(&ctx, problem, opts, &mut body)?,
        Command::Closure => closure(&ctx, problem, opts, &mut body)?,
        Command::Cohomology => cohomology(&ctx, problem, opts, &mut body)?,
        Command::Eval => eval(&ctx, problem, &mut body)?,
        Command::Presymplectic => presymplectic(&ctx, problem, &mut body)?,
        Command::Bracket => bracket(&ctx, problem, &mut body)?,
    };
    Ok(Report::new(&cmd.name(), status, body))
}

fn field_list(ctx: &JetContext) -> Value {
    Value::List(
        ctx.fields()
            .iter()
            .map(|f| {
                let mut r = Record::new()
                    .with("name", Value::text(f.name.clone()))
                    .with("ghost", Value::int(f.ghost));
                if let Some(of) = f.antifield_of {
                    r.push("antifield_of", Value::text(ctx.field(of).name.clone()));
                }
                r.build()
            })
            .collect(),
    )
}

/// One `{field, <label>}` record per nonzero component.
fn per_field(ctx: &JetContext, label: &str, comps: &[DiffPoly], keep_zero: bool) -> Value {
    Value::List(
        comps
            .iter()
            .enumerate()
            .filter(|(_, p)| keep_zero || !p.is_zero())
            .map(|(i, p)| {
                Record::new()
                    .with("field", Value::text(ctx.field(i).name.clone()))
                    .with(label, Value::expr(ctx, p))
                    .build()
            })
            .collect(),
    )
}

fn verdict(ctx: &JetContext, v: &Verdict) -> Record {
    Record::new()
        .with("holds", Value::Bool(v.holds))
        .with("residues", Value::exprs(ctx, &v.residues))
}

fn el(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let l = problem.lagrangian(ctx)?;
    body.push("lagrangian", Value::expr(ctx, &l));
    body.push(
        "euler_lagrange",
        per_field(ctx, "expression", &euler_operator(ctx, &l), true),
    );
    Ok(Status::Done)
}

fn helmholtz(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let f = problem.equations(ctx)?;
    let holds = helmholtz_check(ctx, &f);
    let l = frechet_derivative(ctx, &f);
    let adj = l.adjoint();
    let mut keys: Vec<_> = l.entries().chain(adj.entries()).map(|(k, _)| k.clone()).collect();
    keys.sort();
    keys.dedup();
    let mut residue = Vec::new();
    for (r, c, sigma) in keys {
        let d = &l.entry(r, c, &sigma) - &adj.entry(r, c, &sigma);
        if !d.is_zero() {
            residue.push(
                Record::new()
                    .with("row", Value::int(r))
                    .with("col", Value::int(c))
                    .with(
                        "sigma",
                        Value::List(sigma.counts().iter().map(|&k| Value::int(k)).collect()),
                    )
                    .with("coefficient", Value::expr(ctx, &d))
                    .build(),
            );
        }
    }
    body.push("equations", Value::exprs(ctx, &f));
    body.push("variational", Value::Bool(holds));
    body.push("non_self_adjoint_part", Value::List(residue));
    Ok(Status::of(holds))
}

fn current_check(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let sys = problem.system(ctx)?;
    let mut all = true;
    let mut out = Vec::new();
    for j in problem.currents(ctx)? {
        let v = conservation_check(&sys, &j)?;
        all &= v.holds;
        out.push(verdict(ctx, &v).with("current", Value::form(ctx, &j)).build());
    }
    body.push("currents", Value::List(out));
    Ok(Status::of(all))
}

fn symmetry(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let lagrangian = match &problem.lagrangian {
        Some(_) => Some(problem.lagrangian(ctx)?),
        None => None,
    };
    let sys = match &lagrangian {
        Some(_) => None,
        None => Some(problem.system(ctx)?),
    };
    let target = match (&lagrangian, &sys) {
        (Some(l), _) => SymmetryTarget::Lagrangian(l),
        (None, Some(s)) => SymmetryTarget::System(s),
        _ => unreachable!("one target is set"),
    };
    body.push(
        "mode",
        Value::text(if lagrangian.is_some() {
            "lagrangian"
        } else {
            "equations"
        }),
    );
    let mut all = true;
    let mut out = Vec::new();
    for chi in problem.symmetries(ctx)? {
        let target = match &target {
            SymmetryTarget::Lagrangian(l) => SymmetryTarget::Lagrangian(l),
            SymmetryTarget::System(s) => SymmetryTarget::System(s),
        };
        let v = symmetry_check(ctx, &chi, target)?;
        all &= v.holds;
        out.push(
            verdict(ctx, &v)
                .with("characteristic", per_field(ctx, "component", &chi.components, false))
                .build(),
        );
    }
    body.push("symmetries", Value::List(out));
    Ok(Status::of(all))
}

fn noether(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let l = problem.lagrangian(ctx)?;
    let mut all = true;
    let mut out = Vec::new();
    for (i, r) in problem.gauge_ops(ctx)?.iter().enumerate() {
        let v = noether_identity_check(ctx, r, &l)?;
        all &= v.holds;
        out.push(verdict(ctx, &v).with("gauge_op", Value::int(i + 1)).build());
    }
    body.push("identities", Value::List(out));
    Ok(Status::of(all))
}

fn kt(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let sys = problem.system(ctx)?;
    match kt_extend(&sys) {
        Ok((ext, delta)) => {
            body.push("fields", field_list(&ext));
            body.push("delta", per_field(&ext, "image", delta.images(), false));
            body.push("square_zero", Value::Bool(true));
            Ok(Status::Holds)
        }
        Err(varitri_core::Error::NotSquareZero(g)) => {
            body.push("square_zero", Value::Bool(false));
            body.push("failing_generator", Value::text(g));
            Ok(Status::Fails)
        }
        Err(e) => Err(e.into()),
    }
}

fn bv_model(ctx: &JetContext, problem: &ProblemFile) -> Result<BvModel, CliError> {
    let l = problem.lagrangian(ctx)?;
    let ops = problem.gauge_ops(ctx)?;
    let mut model = bv_extend(ctx, &l, &ops)?;
    if let Some(text) = &problem.bv_action {
        let s = parse(&model.context, text).map_err(|e| CliError::Input(format!("bv_action: {e}")))?;
        model = model.with_action(s)?;
    }
    if problem.solved_form.is_some() {
        model = model.with_system(problem.system(ctx)?);
    }
    Ok(model)
}

fn bv_master(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let model = bv_model(ctx, problem)?;
    let bv = &model.context;
    let v = master_equation_check(bv, &model.action)?;
    body.push("fields", field_list(bv));
    body.push("action", Value::expr(bv, &model.action));
    body.push("master_equation", Value::Bool(v.holds));
    body.push("residues", per_field(bv, "residue", &v.residues, false));
    if v.holds {
        let d = bv_differential(bv, &model.action)?;
        body.push("differential", per_field(bv, "image", d.images(), false));
        body.push("square_zero", Value::Bool(d.is_square_zero()));
    }
    Ok(Status::of(v.holds))
}

fn bv_h0(ctx: &JetContext, problem: &ProblemFile, opts: &Options, body: &mut Record) -> Result<Status, CliError> {
    let model = bv_model(ctx, problem)?;
    let bv = &model.context;
    let k = opts.max_jet.unwrap_or(1);
    let d = opts.max_deg.unwrap_or(2);
    let h = h0_report(&model, k, d)?;
    body.push("max_jet", Value::int(k));
    body.push("max_deg", Value::int(d));
    body.push("table", betti_table(&h.table));
    body.push("classes_certified", Value::Bool(h.classes.certified));
    body.push(
        "classes",
        Value::List(
            h.representatives
                .iter()
                .map(|c| {
                    Record::new()
                        .with("representative", Value::expr(bv, &c.representative))
                        .with("gauge_invariant", Value::Bool(c.gauge_invariant))
                        .with("nontrivial_on_shell", Value::Bool(c.nontrivial_on_shell))
                        .build()
                })
                .collect(),
        ),
    );
    Ok(Status::Done)
}

fn problem_delta(ctx: &JetContext, problem: &ProblemFile) -> Result<InternalDifferential, CliError> {
    if problem.delta.is_none() {
        return Ok(InternalDifferential::zero(ctx));
    }
    Ok(extend_delta(ctx, &problem.delta_images(ctx)?)?)
}

fn closure(ctx: &JetContext, problem: &ProblemFile, opts: &Options, body: &mut Record) -> Result<Status, CliError> {
    let delta = problem_delta(ctx, problem)?;
    let mut key = problem.key(ctx)?;
    if let Some(depth) = opts.depth {
        key = key.truncated(depth);
    }
    let mode = match opts.mode.unwrap_or(Mode::Strict) {
        Mode::Strict => ClosureMode::Strict,
        Mode::ToDepth => ClosureMode::ToDepth,
    };
    let report = closure_check(&key, &delta, mode)?;
    let status_name = |s: RelationStatus| match s {
        RelationStatus::Holds => "holds",
        RelationStatus::Fails => "fails",
        RelationStatus::Unresolved => "unresolved",
    };
    body.push("depth", Value::int(key.depth));
    body.push("closed", Value::Bool(report.closed()));
    body.push(
        "relations",
        Value::List(
            report
                .results
                .iter()
                .map(|r| {
                    Record::new()
                        .with("relation", Value::text(r.relation.to_string()))
                        .with("status", Value::text(status_name(r.status)))
                        .with("residue", Value::form(ctx, &r.residue))
                        .build()
                })
                .collect(),
        ),
    );
    Ok(Status::of(report.closed()))
}

fn cohomology(ctx: &JetContext, problem: &ProblemFile, opts: &Options, body: &mut Record) -> Result<Status, CliError> {
    let spec = problem
        .truncation
        .as_ref()
        .ok_or_else(|| CliError::Input("problem file has no `truncation`".into()))?;
    let (context, diff) = match spec.differential.as_str() {
        "d_h" => (ctx.clone(), Differential::Horizontal),
        "d_v" => (ctx.clone(), Differential::Vertical),
        "delta" => (ctx.clone(), Differential::Internal(problem_delta(ctx, problem)?)),
        "D" => (ctx.clone(), Differential::Total(problem_delta(ctx, problem)?)),
        "delta_kt" => {
            let (ext, d) = kt_extend(&problem.system(ctx)?)?;
            (ext, Differential::Internal(d))
        }
        "D_BV" => {
            let model = bv_model(ctx, problem)?;
            let d = bv_differential(&model.context, &model.action)?;
            (model.context, Differential::Internal(d))
        }
        other => return Err(CliError::Input(format!("unknown differential `{other}`"))),
    };
    let trunc = Truncation {
        max_jet: opts.max_jet.unwrap_or(spec.max_jet),
        max_weight: opts.max_deg.unwrap_or(spec.max_deg),
        p: spec.p.unwrap_or((0, 0)),
        q: spec.q.unwrap_or((0, 0)),
        ghost: spec.ghost.unwrap_or((0, 0)),
    };
    if trunc.p.0 > trunc.p.1 || trunc.q.0 > trunc.q.1 || trunc.ghost.0 > trunc.ghost.1 {
        return Err(CliError::Input("truncation window is empty".into()));
    }
    let table = bounded_cohomology(&context, diff, trunc)?;
    body.push("fields", field_list(&context));
    body.push("table", betti_table(&table));
    Ok(Status::Done)
}

fn eval(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let l = problem.lagrangian(ctx)?;
    let section = problem.section(ctx)?;
    let bounds = problem.bounds()?;
    let value = evaluate_functional(ctx, &l, &section, &bounds)?;
    body.push("lagrangian", Value::expr(ctx, &l));
    body.push("value", Value::expr(ctx, &DiffPoly::constant(value)));
    Ok(Status::Done)
}

fn presymplectic(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let l = problem.lagrangian(ctx)?;
    let p = presymplectic_form(ctx, &l)?;
    let closed = p.omega.d_v().is_zero();
    body.push("boundary", Value::form(ctx, &p.boundary));
    body.push("omega", Value::form(ctx, &p.omega));
    body.push("omega_closed", Value::Bool(closed));
    Ok(Status::of(closed))
}

fn operand_expr(ctx: &JetContext, o: &Operand) -> Result<DiffPoly, CliError> {
    match o {
        Operand::Expr(s) => parse(ctx, s).map_err(|e| CliError::Input(format!("bracket operand: {e}"))),
        Operand::Field(_) => Err(CliError::Input("this bracket takes expressions".into())),
    }
}

fn operand_field(ctx: &JetContext, o: &Operand) -> Result<EvoField, CliError> {
    match o {
        Operand::Field(m) => crate::problem::evo_field(ctx, m),
        Operand::Expr(_) => Err(CliError::Input("the Lie bracket takes characteristics".into())),
    }
}

fn bracket(ctx: &JetContext, problem: &ProblemFile, body: &mut Record) -> Result<Status, CliError> {
    let spec = problem
        .bracket
        .as_ref()
        .ok_or_else(|| CliError::Input("problem file has no `bracket`".into()))?;
    body.push("kind", Value::text(spec.kind.clone()));
    match spec.kind.as_str() {
        "lie" => {
            let a = operand_field(ctx, &spec.left)?;
            let b = operand_field(ctx, &spec.right)?;
            let c = lie_bracket(ctx, &a, &b)?;
            body.push("result", per_field(ctx, "component", &c.components, false));
            body.push("zero", Value::Bool(c.is_zero()));
        }
        "anti" | "schouten" => {
            let a = operand_expr(ctx, &spec.left)?;
            let b = operand_expr(ctx, &spec.right)?;
            let c = if spec.kind == "anti" {
                antibracket(ctx, &a, &b)?
            } else {
                schouten_bracket(ctx, &a, &b)?
            };
            let trivial = euler_operator(ctx, &c).iter().all(DiffPoly::is_zero);
            body.push("result", Value::expr(ctx, &c));
            body.push("trivial", Value::Bool(trivial));
        }
        other => return Err(CliError::Input(format!("unknown bracket kind `{other}`"))),
    }
    Ok(Status::Done)
}
