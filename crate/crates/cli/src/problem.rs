//! Problem files: JSON documents naming a jet context and the data a
//! command needs. Expressions are strings in the engine's grammar.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Deserialize;
use varitri_core::expr::parse;
use varitri_core::forms::BiForm;
use varitri_core::jetalg::{DiffPoly, EvoField, FieldDecl, JetContext, Rational, Symbol};
use varitri_core::tricomplex::FormKey;
use varitri_core::varops::{PdeSystem, SolvedRelation, TotalDiffOperator};

use crate::CliError;

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default)]
    pub ghost: i32,
    #[serde(default)]
    pub antifield_of: Option<String>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SolvedSpec {
    /// A single jet variable, e.g. `u_t`.
    pub lhs: String,
    pub rhs: String,
}

/// A gauge generator: one row per field, linear in the parameters.
#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum GaugeSpec {
    Rows(Vec<String>),
    Full { params: Vec<String>, rows: Vec<String> },
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct KeyComponent {
    pub r: usize,
    pub a: usize,
    pub form: String,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct KeySpec {
    pub degree: i32,
    pub p: usize,
    pub q: usize,
    pub depth: usize,
    #[serde(default)]
    pub components: Vec<KeyComponent>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    pub differential: String,
    #[serde(default = "one")]
    pub max_jet: u32,
    #[serde(default = "two")]
    pub max_deg: u32,
    #[serde(default)]
    pub p: Option<(usize, usize)>,
    #[serde(default)]
    pub q: Option<(usize, usize)>,
    #[serde(default)]
    pub ghost: Option<(i32, i32)>,
}

fn one() -> u32 {
    1
}

fn two() -> u32 {
    2
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum Operand {
    Expr(String),
    Field(BTreeMap<String, String>),
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    /// `lie`, `anti` or `schouten`.
    pub kind: String,
    pub left: Operand,
    pub right: Operand,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub base: Vec<String>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    pub lagrangian: Option<String>,
    pub equations: Option<Vec<String>>,
    pub solved_form: Option<Vec<SolvedSpec>>,
    pub currents: Option<Vec<String>>,
    pub gauge_ops: Option<Vec<GaugeSpec>>,
    /// Each entry is one expression linear in `E1, ..., Em`.
    pub noether_ops: Option<Vec<String>>,
    pub bv_action: Option<String>,
    pub key: Option<KeySpec>,
    pub delta: Option<BTreeMap<String, String>>,
    pub truncation: Option<TruncationSpec>,
    pub section: Option<BTreeMap<String, String>>,
    #[serde(rename = "box")]
    pub bounds: Option<Vec<(Number, Number)>>,
    pub symmetries: Option<Vec<BTreeMap<String, String>>>,
    pub bracket: Option<BracketSpec>,
}

fn missing(what: &str) -> CliError {
    CliError::Input(format!("problem file has no `{what}`"))
}

fn expr_error(what: &str, e: varitri_core::Error) -> CliError {
    CliError::Input(format!("{what}: {e}"))
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid problem file: {e}")))
    }

    pub fn context(&self) -> Result<JetContext, CliError> {
        let mut decls = Vec::new();
        for f in &self.fields {
            let decl = match &f.antifield_of {
                None => FieldDecl::new(f.name.clone(), f.ghost),
                Some(of) => {
                    let idx = self.fields.iter().position(|g| &g.name == of).ok_or_else(|| {
                        CliError::Input(format!("`{}` is the antifield of undeclared `{of}`", f.name))
                    })?;
                    FieldDecl::antifield(f.name.clone(), f.ghost, idx)
                }
            };
            decls.push(decl);
        }
        JetContext::new(self.base.clone(), decls).map_err(|e| expr_error("context", e))
    }

    pub fn lagrangian(&self, ctx: &JetContext) -> Result<DiffPoly, CliError> {
        let text = self.lagrangian.as_ref().ok_or_else(|| missing("lagrangian"))?;
        parse(ctx, text).map_err(|e| expr_error("lagrangian", e))
    }

    pub fn equations(&self, ctx: &JetContext) -> Result<Vec<DiffPoly>, CliError> {
        let list = self.equations.as_ref().ok_or_else(|| missing("equations"))?;
        list.iter()
            .enumerate()
            .map(|(i, s)| parse(ctx, s).map_err(|e| expr_error(&format!("equation {}", i + 1), e)))
            .collect()
    }

    /// The system from `equations`, or from the Euler-Lagrange equations of
    /// the Lagrangian when no equations are given, with the solved form and
    /// Noether operators attached when present.
    pub fn system(&self, ctx: &JetContext) -> Result<PdeSystem, CliError> {
        let equations = if self.equations.is_some() {
            self.equations(ctx)?
        } else if self.lagrangian.is_some() {
            varitri_core::varops::euler_operator(ctx, &self.lagrangian(ctx)?)
        } else {
            return Err(missing("equations"));
        };
        let mut sys = PdeSystem::new(ctx.clone(), equations).map_err(|e| expr_error("system", e))?;
        if let Some(solved) = &self.solved_form {
            let rels = solved
                .iter()
                .map(|s| solved_relation(ctx, s))
                .collect::<Result<Vec<_>, _>>()?;
            sys = sys.with_solved_form(rels).map_err(|e| expr_error("solved_form", e))?;
        }
        if let Some(ops) = &self.noether_ops {
            let m = sys.equations.len();
            let names: Vec<String> = (1..=m).map(|i| format!("E{i}")).collect();
            let parsed = ops
                .iter()
                .map(|s| linear_operator(ctx, &names, std::slice::from_ref(s)))
                .collect::<Result<Vec<_>, _>>()?;
            sys = sys.with_noether_ops(parsed).map_err(|e| expr_error("noether_ops", e))?;
        }
        Ok(sys)
    }

    pub fn gauge_ops(&self, ctx: &JetContext) -> Result<Vec<TotalDiffOperator>, CliError> {
        let ops = self.gauge_ops.as_ref().ok_or_else(|| missing("gauge_ops"))?;
        ops.iter()
            .map(|g| match g {
                GaugeSpec::Rows(rows) => linear_operator(ctx, &["eps".to_string()], rows),
                GaugeSpec::Full { params, rows } => linear_operator(ctx, params, rows),
            })
            .collect()
    }

    pub fn currents(&self, ctx: &JetContext) -> Result<Vec<BiForm>, CliError> {
        let list = self.currents.as_ref().ok_or_else(|| missing("currents"))?;
        list.iter()
            .enumerate()
            .map(|(i, s)| {
                parse(ctx, s)
                    .map(BiForm::new)
                    .map_err(|e| expr_error(&format!("current {}", i + 1), e))
            })
            .collect()
    }

    pub fn symmetries(&self, ctx: &JetContext) -> Result<Vec<EvoField>, CliError> {
        let list = self.symmetries.as_ref().ok_or_else(|| missing("symmetries"))?;
        list.iter().map(|m| evo_field(ctx, m)).collect()
    }

    pub fn delta_images(&self, ctx: &JetContext) -> Result<Vec<(String, DiffPoly)>, CliError> {
        let map = self.delta.as_ref().ok_or_else(|| missing("delta"))?;
        map.iter()
            .map(|(k, v)| {
                parse(ctx, v)
                    .map(|p| (k.clone(), p))
                    .map_err(|e| expr_error(&format!("delta image of `{k}`"), e))
            })
            .collect()
    }

    pub fn key(&self, ctx: &JetContext) -> Result<FormKey, CliError> {
        let spec = self.key.as_ref().ok_or_else(|| missing("key"))?;
        let mut key = FormKey::new(spec.degree, spec.p, spec.q, spec.depth);
        for c in &spec.components {
            let w = parse(ctx, &c.form).map_err(|e| expr_error(&format!("key slot ({}, {})", c.r, c.a), e))?;
            let slot = &key.get(c.r, c.a) + &BiForm::new(w);
            key.set(c.r, c.a, slot).map_err(|e| expr_error("key", e))?;
        }
        Ok(key)
    }

    pub fn section(&self, ctx: &JetContext) -> Result<Vec<DiffPoly>, CliError> {
        let map = self.section.as_ref().ok_or_else(|| missing("section"))?;
        for k in map.keys() {
            if ctx.field_index(k).is_none() {
                return Err(CliError::Input(format!("section names undeclared field `{k}`")));
            }
        }
        ctx.fields()
            .iter()
            .map(|f| match map.get(&f.name) {
                Some(s) => parse(ctx, s).map_err(|e| expr_error(&format!("section of `{}`", f.name), e)),
                None => Err(CliError::Input(format!("section has no component for `{}`", f.name))),
            })
            .collect()
    }

    pub fn bounds(&self) -> Result<Vec<(Rational, Rational)>, CliError> {
        let list = self.bounds.as_ref().ok_or_else(|| missing("box"))?;
        list.iter().map(|(a, b)| Ok((number(a)?, number(b)?))).collect()
    }
}

fn number(n: &Number) -> Result<Rational, CliError> {
    match n {
        Number::Int(i) => Ok(Rational::from_integer((*i).into())),
        Number::Text(s) => {
            Rational::from_str(s.trim()).map_err(|_| CliError::Input(format!("`{s}` is not a rational number")))
        }
    }
}

fn solved_relation(ctx: &JetContext, s: &SolvedSpec) -> Result<SolvedRelation, CliError> {
    let lhs = parse(ctx, &s.lhs).map_err(|e| expr_error("solved_form lhs", e))?;
    let not_jet = || CliError::Input(format!("solved_form lhs `{}` is not a single jet variable", s.lhs));
    let mut terms = lhs.terms();
    let (m, c) = terms.next().ok_or_else(not_jet)?;
    if terms.next().is_some() || *c != Rational::from_integer(1.into()) {
        return Err(not_jet());
    }
    match m.factors() {
        [(Symbol::Jet(f, sigma), 1)] => Ok(SolvedRelation {
            field: f.index as usize,
            sigma: sigma.clone(),
            rhs: parse(ctx, &s.rhs).map_err(|e| expr_error("solved_form rhs", e))?,
        }),
        _ => Err(not_jet()),
    }
}

/// Parses rows linear in the named placeholders, which are declared as
/// extra ghost-zero fields for the duration of the parse.
fn linear_operator(ctx: &JetContext, params: &[String], rows: &[String]) -> Result<TotalDiffOperator, CliError> {
    let ext = ctx
        .extended(params.iter().map(|p| FieldDecl::new(p.clone(), 0)))
        .map_err(|e| expr_error("operator placeholders", e))?;
    let parsed = rows
        .iter()
        .map(|r| parse(&ext, r).map_err(|e| expr_error("operator row", e)))
        .collect::<Result<Vec<_>, _>>()?;
    let sources: Vec<usize> = (ctx.num_fields()..ext.num_fields()).collect();
    TotalDiffOperator::from_linear(&ext, &parsed, &sources).map_err(|e| expr_error("operator", e))
}

pub fn evo_field(ctx: &JetContext, map: &BTreeMap<String, String>) -> Result<EvoField, CliError> {
    let mut comps = vec![DiffPoly::zero(); ctx.num_fields()];
    for (name, text) in map {
        let i = ctx
            .field_index(name)
            .ok_or_else(|| CliError::Input(format!("characteristic names undeclared field `{name}`")))?;
        comps[i] = parse(ctx, text).map_err(|e| expr_error(&format!("characteristic of `{name}`"), e))?;
    }
    Ok(EvoField::new(comps))
}
