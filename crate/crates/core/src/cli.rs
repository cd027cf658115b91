//! Command-line front end.
//!
//! Every command emits a document `{schema, command, result, verification, timing}`
//! with sorted keys and all numbers written as decimal strings. Exit codes: 0 on
//! success, 1 when a verification check fails, 2 on invalid input, 3 when the
//! precision budget is exhausted.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::fundclass::{
    artin_evaluate, artin_normalization, artin_table, cocycle_from_tuple, fundamental_tuple,
    invariant_cyclic_unramified, norm_group, tame_tuple, tuple_fingerprint, tuple_from_cocycle,
    verify_cocycle, ArtinRow, EncodingTuple, ExtensionSpec, Family, FundclassError, LocalCocycle,
    Tower,
};
use crate::groups::{AbelianPresentation, GroupElement, SubgroupSpec};
use crate::padic_fields::{norm, FieldElement, PadicError};
use crate::zmod_cohomology::{
    cohomology, dim_shift_backward, dim_shift_forward, genchange, inflate, infres_invert,
    solve_coboundary, Cochain, CochainSpace, CohomologyError, FiniteGModule, GroupView,
    InducedFlavor, InducedModule,
};

pub const SCHEMA: &str = "fundclass/1";

#[derive(Debug, Parser)]
#[command(
    name = "fundclass",
    version,
    about = "Explicit local fundamental classes of abelian extensions of Q_p"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the encoding tuple of the fundamental class.
    Compute {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Re-check a tuple or cocycle document and re-emit it.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the reciprocity map on an element of Q_p^x.
    Artin {
        #[command(flatten)]
        spec: SpecArgs,
        /// An integer or a fraction `a/b`.
        #[arg(long)]
        element: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Expand the tuple into the full cocycle table on Gal(L/K).
    Expand {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Finite-module group cohomology oracle.
    Cohomology {
        #[command(flatten)]
        args: CohomologyArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Unramified,
    Tame,
    Cyclotomic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    General,
    Tame,
}

impl Route {
    fn name(self) -> &'static str {
        match self {
            Route::General => "general",
            Route::Tame => "tame",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub e: Option<u64>,
    #[arg(long)]
    pub f: Option<u64>,
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long)]
    pub prec: Option<u32>,
    /// Residue `u` of the radicand `ω(u)·p` (tame only).
    #[arg(long)]
    pub twist: Option<u64>,
    #[arg(long, value_enum, default_value_t = Route::General)]
    pub route: Route,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub no_timing: bool,
    /// Threads for the cocycle sweep.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CohomologyOp {
    H1,
    H2,
    Genchange,
    Dimshift,
    Infres,
}

#[derive(Debug, Clone, Args)]
pub struct CohomologyArgs {
    /// Group orders such as `4` or `2x2`.
    #[arg(long)]
    pub group: String,
    /// JSON file `{"factors": [..], "actions": [[..], ..]}`; actions default to trivial.
    #[arg(long)]
    pub module: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub op: CohomologyOp,
    #[arg(long)]
    pub k: Option<u64>,
    /// Subgroup generators such as `2,0;0,1`.
    #[arg(long)]
    pub subgroup: Option<String>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(m: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: m.into(),
        }
    }
}

impl From<FundclassError> for CliError {
    fn from(e: FundclassError) -> Self {
        let code = match &e {
            FundclassError::Input(_) => 2,
            FundclassError::Padic(PadicError::Precision(_)) => 3,
            FundclassError::Padic(
                PadicError::InvalidInput(_) | PadicError::Mismatch(_) | PadicError::TooLarge(_),
            ) => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<PadicError> for CliError {
    fn from(e: PadicError) -> Self {
        FundclassError::from(e).into()
    }
}

impl From<CohomologyError> for CliError {
    fn from(e: CohomologyError) -> Self {
        let code = match &e {
            CohomologyError::Group(_)
            | CohomologyError::InvalidModule(_)
            | CohomologyError::TooLarge(_)
            | CohomologyError::NotCoprime { .. }
            | CohomologyError::Unsupported(_)
            | CohomologyError::Mismatch(_) => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// One named check of a verification block.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub count: u64,
    pub witness: Option<String>,
}

impl Check {
    fn new(name: &str, passed: bool, count: u64, witness: Option<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            count,
            witness,
        }
    }

    fn from_result(
        name: &str,
        count: u64,
        r: crate::fundclass::Result<bool>,
        what: &str,
    ) -> CliResult<Self> {
        match r {
            Ok(true) => Ok(Check::new(name, true, count, None)),
            Ok(false) => Ok(Check::new(name, false, count, Some(what.into()))),
            Err(e) if e.is_precision() => Err(e.into()),
            Err(e) => Ok(Check::new(name, false, count, Some(e.to_string()))),
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "passed": self.passed,
            "count": self.count.to_string(),
            "witness": self.witness,
        })
    }
}

fn verification_json(checks: &[Check]) -> Value {
    json!({
        "passed": checks.iter().all(|c| c.passed),
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    })
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

fn family_name(f: &Family) -> &'static str {
    match f {
        Family::Unramified { .. } => "unramified",
        Family::TameAbelian { .. } => "tame",
        Family::CyclotomicWild { .. } => "cyclotomic",
    }
}

pub fn spec_to_json(spec: &ExtensionSpec) -> Value {
    let mut m = Map::new();
    m.insert("p".into(), s(spec.p));
    m.insert("family".into(), s(family_name(&spec.family)));
    match spec.family {
        Family::Unramified { n } => {
            m.insert("n".into(), s(n));
        }
        Family::TameAbelian { e, f } => {
            m.insert("e".into(), s(e));
            m.insert("f".into(), s(f));
        }
        Family::CyclotomicWild { nu } => {
            m.insert("nu".into(), s(nu));
        }
    }
    m.insert("precision".into(), s(spec.precision));
    m.insert("twist".into(), s(spec.twist));
    Value::Object(m)
}

fn field_str<'a>(v: &'a Value, key: &str) -> CliResult<&'a str> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::input(format!("missing string field '{key}'")))
}

fn field_num<T: std::str::FromStr>(v: &Value, key: &str) -> CliResult<T> {
    field_str(v, key)?
        .parse()
        .map_err(|_| CliError::input(format!("field '{key}' is not a number")))
}

pub fn spec_from_json(v: &Value) -> CliResult<ExtensionSpec> {
    let p = field_num(v, "p")?;
    let family = match field_str(v, "family")? {
        "unramified" => Family::Unramified {
            n: field_num(v, "n")?,
        },
        "tame" => Family::TameAbelian {
            e: field_num(v, "e")?,
            f: field_num(v, "f")?,
        },
        "cyclotomic" => Family::CyclotomicWild {
            nu: field_num(v, "nu")?,
        },
        other => return Err(CliError::input(format!("unknown family '{other}'"))),
    };
    let spec = ExtensionSpec::new(p, family)
        .with_precision(field_num(v, "precision")?)
        .with_twist(field_num(v, "twist")?);
    spec.validate()?;
    Ok(spec)
}

impl SpecArgs {
    pub fn to_spec(&self) -> CliResult<ExtensionSpec> {
        let need = |x: Option<u64>, flag: &str| {
            x.ok_or_else(|| CliError::input(format!("this family needs --{flag}")))
        };
        let family = match self.family {
            FamilyArg::Unramified => Family::Unramified {
                n: need(self.n, "n")?,
            },
            FamilyArg::Tame => Family::TameAbelian {
                e: need(self.e, "e")?,
                f: self.f.unwrap_or(1),
            },
            FamilyArg::Cyclotomic => Family::CyclotomicWild {
                nu: self.nu.unwrap_or(1),
            },
        };
        let mut spec = ExtensionSpec::new(self.p, family);
        if let Some(prec) = self.prec {
            spec = spec.with_precision(prec);
        }
        if let Some(t) = self.twist {
            spec = spec.with_twist(t);
        }
        spec.validate()?;
        if self.route == Route::Tame
            && !matches!(spec.canonical().family, Family::TameAbelian { .. })
        {
            return Err(CliError::input(
                "the tame route needs a tame family with e > 1",
            ));
        }
        Ok(spec)
    }
}

fn tower_json(tower: &Tower) -> Value {
    json!({
        "n": s(tower.n),
        "f": s(tower.f),
        "orders": tower.quotient.orders().iter().map(s).collect::<Vec<_>>(),
        "indices": tower.indices.iter().map(s).collect::<Vec<_>>(),
    })
}

fn artin_rows_json(rows: &[ArtinRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "element": r.element.to_json(),
                    "class": r.class.iter().map(s).collect::<Vec<_>>(),
                    "image": s(&r.image),
                })
            })
            .collect(),
    )
}

fn elems_json(xs: &[FieldElement]) -> Value {
    Value::Array(xs.iter().map(FieldElement::to_json).collect())
}

struct Computed {
    tower: Tower,
    tuple: EncodingTuple,
    gamma: Option<FieldElement>,
    eta: Vec<FieldElement>,
}

fn run_route(spec: &ExtensionSpec, route: Route) -> CliResult<Computed> {
    Ok(match route {
        Route::General => {
            let (tower, data, tuple) = fundamental_tuple(spec)?;
            Computed {
                tower,
                tuple,
                gamma: Some(data.gamma),
                eta: data.eta,
            }
        }
        Route::Tame => {
            let (tower, tuple) = tame_tuple(spec)?;
            Computed {
                tower,
                tuple,
                gamma: None,
                eta: Vec::new(),
            }
        }
    })
}

fn tuple_result(spec: &ExtensionSpec, route: Route, c: &Computed) -> CliResult<Value> {
    let tower = &c.tower;
    let mut m = Map::new();
    m.insert("kind".into(), s("tuple"));
    m.insert("spec".into(), spec_to_json(spec));
    m.insert("route".into(), s(route.name()));
    m.insert("precision".into(), s(spec.precision));
    m.insert("working_precision".into(), s(tower.field.prec()));
    m.insert("field".into(), s(tower.field.id()));
    m.insert("tower".into(), tower_json(tower));
    m.insert("alpha".into(), elems_json(&c.tuple.alpha));
    m.insert(
        "beta".into(),
        Value::Array(c.tuple.beta.iter().map(|r| elems_json(r)).collect()),
    );
    if let Some(g) = &c.gamma {
        m.insert("gamma".into(), g.to_json());
        m.insert("eta".into(), elems_json(&c.eta));
    }
    m.insert("norm_group".into(), norm_group(tower)?.to_json());
    m.insert(
        "artin".into(),
        artin_rows_json(&artin_table(tower, &c.tuple)?),
    );
    m.insert(
        "fingerprint".into(),
        tuple_fingerprint(tower, &c.tuple)?.to_json(),
    );
    Ok(Value::Object(m))
}

fn load_tower(result: &Value) -> CliResult<(ExtensionSpec, Tower)> {
    let spec = spec_from_json(
        result
            .get("spec")
            .ok_or_else(|| CliError::input("missing spec"))?,
    )?;
    let working: u32 = field_num(result, "working_precision")?;
    if working < spec.precision {
        return Err(CliError::input(
            "working precision below requested precision",
        ));
    }
    let tower = Tower::new(&spec, working)?;
    if result.get("tower") != Some(&tower_json(&tower)) {
        return Err(CliError::input("tower block does not match the extension parameters"));
    }
    Ok((spec, tower))
}

fn elem(tower: &Tower, v: Option<&Value>, what: &str) -> CliResult<FieldElement> {
    let v = v.ok_or_else(|| CliError::input(format!("missing {what}")))?;
    FieldElement::from_json(&tower.field, v).map_err(|e| CliError::input(format!("{what}: {e}")))
}

fn elem_list(tower: &Tower, v: Option<&Value>, what: &str) -> CliResult<Vec<FieldElement>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input(format!("missing array {what}")))?;
    arr.iter().map(|x| elem(tower, Some(x), what)).collect()
}

fn witness_triple(w: &Option<(GroupElement, GroupElement, GroupElement)>) -> Option<String> {
    w.as_ref().map(|(g, h, k)| format!("{g}|{h}|{k}"))
}

/// The verification block of a tuple document.
pub fn verify_tuple_result(result: &Value, jobs: usize) -> CliResult<Vec<Check>> {
    let (_, tower) = load_tower(result)?;
    let alpha = elem_list(&tower, result.get("alpha"), "alpha")?;
    let beta_rows = result
        .get("beta")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input("missing beta"))?;
    let beta = beta_rows
        .iter()
        .map(|r| elem_list(&tower, Some(r), "beta"))
        .collect::<CliResult<Vec<_>>>()?;
    let r = tower.indices.len();
    if alpha.len() != r || beta.len() != r || beta.iter().any(|row| row.len() != r) {
        return Err(CliError::input("alpha/beta sizes do not match Gal(L/K)"));
    }
    let t = EncodingTuple {
        indices: tower.indices.clone(),
        orders: tower.quotient.orders().to_vec(),
        alpha,
        beta,
    };
    let digits = tower.precision() as i64;
    let entries = (r + r * r) as u64;
    let mut checks = Vec::new();

    checks.push(Check::from_result(
        "tuple_laws",
        entries,
        t.check_laws(&tower).map(|_| true),
        "",
    )?);

    let c = cocycle_from_tuple(&t, &tower)?;
    let rep = verify_cocycle(&c, jobs)?;
    checks.push(Check::new(
        "cocycle",
        rep.passed,
        rep.triples,
        witness_triple(&rep.witness),
    ));

    let back = tuple_from_cocycle(&c, &tower.indices).and_then(|b| b.congruent(&t, digits));
    checks.push(Check::from_result(
        "round_trip",
        entries,
        back,
        "extracted tuple differs",
    )?);

    let artin =
        artin_table(&tower, &t).map(|rows| Some(&artin_rows_json(&rows)) == result.get("artin"));
    checks.push(Check::from_result(
        "artin",
        r as u64,
        artin,
        "reciprocity rows differ from the document",
    )?);

    let fp = tuple_fingerprint(&tower, &t);
    let ng = norm_group(&tower)?.to_json();
    let fp_ok = fp.as_ref().map(|f| {
        Some(&f.to_json()) == result.get("fingerprint") && Some(&ng) == result.get("norm_group")
    });
    checks.push(Check::from_result(
        "fingerprint",
        1,
        fp_ok.map_err(Clone::clone),
        "fingerprint differs from the document",
    )?);

    if let Ok(f) = &fp {
        let ok = f.orders == t.orders;
        let w = (!ok).then(|| format!("class orders {:?}, expected {:?}", f.orders, t.orders));
        checks.push(Check::new("order", ok, r as u64, w));
    }

    if let Some(g) = result.get("gamma") {
        let gamma = elem(&tower, Some(g), "gamma")?;
        let eta = elem_list(&tower, result.get("eta"), "eta")?;
        let ok = norm(&gamma, &tower.h_autos())
            .map_err(FundclassError::from)
            .and_then(|nv| Ok(nv.congruent(&tower.pi, digits)?));
        checks.push(Check::from_result("gamma", 1, ok, "N_{LM/L}(gamma) != pi")?);
        if eta.len() != r {
            return Err(CliError::input("eta has the wrong length"));
        }
        let mut ok = Ok(true);
        for (k, &i) in tower.indices.iter().enumerate() {
            let step = (|| -> crate::fundclass::Result<bool> {
                let lhs = eta[k].apply(&tower.h_gen).div(&eta[k])?;
                let rhs = gamma.apply(&tower.sigma[i]).div(&gamma)?;
                Ok(lhs.congruent(&rhs, digits)?)
            })();
            match step {
                Ok(true) => {}
                other => {
                    ok = other.map(|_| false);
                    break;
                }
            }
        }
        checks.push(Check::from_result(
            "eta",
            r as u64,
            ok,
            "Hilbert 90 equation fails",
        )?);
    }
    Ok(checks)
}

fn cocycle_key(g: &GroupElement, h: &GroupElement) -> String {
    format!("{g}|{h}")
}

fn cocycle_result(
    spec: &ExtensionSpec,
    route: Route,
    tower: &Tower,
    c: &LocalCocycle,
) -> CliResult<Value> {
    let mut table = Map::new();
    let n = c.order();
    for a in 0..n {
        for b in 0..n {
            let (g, h) = (c.group.element_at(a), c.group.element_at(b));
            table.insert(cocycle_key(&g, &h), c.get(a, b).to_json());
        }
    }
    let mut m = Map::new();
    m.insert("kind".into(), s("cocycle"));
    m.insert("spec".into(), spec_to_json(spec));
    m.insert("route".into(), s(route.name()));
    m.insert("precision".into(), s(spec.precision));
    m.insert("working_precision".into(), s(tower.field.prec()));
    m.insert("field".into(), s(tower.field.id()));
    m.insert("tower".into(), tower_json(tower));
    m.insert("table".into(), Value::Object(table));
    if let Family::Unramified { .. } = spec.canonical().family {
        let (a, b) = invariant_cyclic_unramified(c)?;
        m.insert("invariant".into(), s(format!("{a}/{b}")));
    }
    Ok(Value::Object(m))
}

/// The verification block of a cocycle document.
pub fn verify_cocycle_result(result: &Value, jobs: usize) -> CliResult<Vec<Check>> {
    let (_, tower) = load_tower(result)?;
    let table = result
        .get("table")
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::input("missing table"))?;
    let group = tower.quotient.clone();
    let n = group.order() as usize;
    if table.len() != n * n {
        return Err(CliError::input(format!(
            "table has {} entries, expected {}",
            table.len(),
            n * n
        )));
    }
    let mut values = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let key = cocycle_key(&group.element_at(a), &group.element_at(b));
            values.push(elem(
                &tower,
                table.get(&key),
                &format!("table entry {key}"),
            )?);
        }
    }
    let c = LocalCocycle {
        autos: tower.quotient_autos(),
        group,
        table: values,
        precision: tower.precision(),
    };
    let rep = verify_cocycle(&c, jobs)?;
    let mut checks = vec![Check::new(
        "cocycle",
        rep.passed,
        rep.triples,
        witness_triple(&rep.witness),
    )];
    if let Some(inv) = result.get("invariant") {
        let got = invariant_cyclic_unramified(&c).map(|(a, b)| s(format!("{a}/{b}")) == *inv);
        checks.push(Check::from_result(
            "invariant",
            1,
            got,
            "invariant differs from the document",
        )?);
    }
    Ok(checks)
}

fn parse_rational(tower: &Tower, text: &str) -> CliResult<FieldElement> {
    let bad = || {
        CliError::input(format!(
            "element '{text}' is not an integer or a fraction a/b"
        ))
    };
    let (a, b) = match text.split_once('/') {
        Some((a, b)) => (
            a.trim().parse::<i128>().map_err(|_| bad())?,
            b.trim().parse::<i128>().map_err(|_| bad())?,
        ),
        None => (text.trim().parse::<i128>().map_err(|_| bad())?, 1),
    };
    if a == 0 || b == 0 {
        return Err(CliError::input("the element must be a nonzero rational"));
    }
    let f = &tower.field;
    Ok(FieldElement::from_int(f, a).div(&FieldElement::from_int(f, b))?)
}

fn artin_result(
    spec: &ExtensionSpec,
    route: Route,
    element: Option<&str>,
) -> CliResult<(Value, Vec<Check>)> {
    let c = run_route(spec, route)?;
    let tower = &c.tower;
    let rows = artin_table(tower, &c.tuple)?;
    let mut m = Map::new();
    m.insert("kind".into(), s("artin"));
    m.insert("spec".into(), spec_to_json(spec));
    m.insert("route".into(), s(route.name()));
    m.insert("field".into(), s(tower.field.id()));
    m.insert("tower".into(), tower_json(tower));
    m.insert("table".into(), artin_rows_json(&rows));
    let mut checks = Vec::new();
    let mut generated = true;
    for (k, row) in rows.iter().enumerate() {
        generated &= artin_evaluate(tower, &rows, &row.element)
            .map(|g| g == tower.quotient.generator(k))
            .unwrap_or(false);
    }
    checks.push(Check::new(
        "rows_map_to_generators",
        generated,
        rows.len() as u64,
        None,
    ));
    if let Some(text) = element {
        let a = parse_rational(tower, text)?;
        let g = artin_evaluate(tower, &rows, &a)?;
        m.insert("element".into(), s(text));
        m.insert(
            "class".into(),
            Value::Array(norm_group(tower)?.class_of(&a)?.iter().map(s).collect()),
        );
        m.insert("image".into(), s(&g));
    }
    if let Family::CyclotomicWild { .. } = spec.family {
        m.insert(
            "normalization".into(),
            s(artin_normalization(tower, &rows)?.name()),
        );
    }
    Ok((Value::Object(m), checks))
}

fn load_module(
    group: &AbelianPresentation,
    path: &Option<PathBuf>,
) -> CliResult<Option<(FiniteGModule, Value)>> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let nums = |x: &Value| -> Option<i64> {
        x.as_i64()
            .or_else(|| x.as_str().and_then(|t| t.parse().ok()))
    };
    let factors: Vec<u64> = v
        .get("factors")
        .and_then(Value::as_array)
        .and_then(|a| {
            a.iter()
                .map(|x| nums(x).and_then(|k| u64::try_from(k).ok()))
                .collect()
        })
        .ok_or_else(|| CliError::input("module: 'factors' must be a list of integers"))?;
    let r = factors.len();
    let actions: Vec<Vec<i64>> = match v.get("actions") {
        None => {
            let id: Vec<i64> = (0..r * r).map(|i| i64::from(i % (r + 1) == 0)).collect();
            vec![id; group.rank()]
        }
        Some(a) => a
            .as_array()
            .and_then(|a| {
                a.iter()
                    .map(|m| m.as_array().and_then(|m| m.iter().map(nums).collect()))
                    .collect()
            })
            .ok_or_else(|| {
                CliError::input("module: 'actions' must be a list of integer matrices")
            })?,
    };
    let m = FiniteGModule::new(group, factors.clone(), actions.clone())?;
    let echo = json!({
        "factors": factors.iter().map(s).collect::<Vec<_>>(),
        "actions": actions.iter().map(|m| m.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(Some((m, echo)))
}

/// `{"degree": d, "values": {"g|g'": [coords]}}` with elements written `a0,a1`.
fn cochain_json(c: &Cochain) -> Value {
    let view = c.space().view();
    let n = view.order();
    let mut values = Map::new();
    let mut tuple = vec![0usize; c.degree()];
    for cell in 0..n.pow(c.degree() as u32) {
        let mut rest = cell;
        for slot in tuple.iter_mut().rev() {
            *slot = rest % n;
            rest /= n;
        }
        let key: Vec<String> = tuple.iter().map(|&i| view.element(i).to_string()).collect();
        values.insert(
            key.join("|"),
            Value::Array(c.get(&tuple).iter().map(s).collect()),
        );
    }
    json!({ "degree": s(c.degree()), "values": values })
}

fn parse_subgroup(text: &str) -> CliResult<SubgroupSpec> {
    let generators = text
        .split(';')
        .map(|g| {
            g.parse::<GroupElement>()
                .map_err(|e| CliError::input(e.to_string()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SubgroupSpec { generators })
}

fn cohomology_result(args: &CohomologyArgs) -> CliResult<(Value, Vec<Check>)> {
    let group: AbelianPresentation = args
        .group
        .parse()
        .map_err(|e: crate::groups::GroupError| CliError::input(e.to_string()))?;
    let mut m = Map::new();
    m.insert("kind".into(), s("cohomology"));
    m.insert("group".into(), s(&group));
    let op_name = format!("{:?}", args.op).to_lowercase();
    m.insert("op".into(), s(&op_name));
    let mut checks = Vec::new();
    if args.op == CohomologyOp::Genchange {
        if group.rank() != 1 {
            return Err(CliError::input("genchange needs a cyclic group"));
        }
        let n = group.orders()[0];
        let k = args
            .k
            .ok_or_else(|| CliError::input("genchange needs --k"))?;
        let gc = genchange(n, k)?;
        m.insert("k".into(), s(k));
        m.insert("witness".into(), cochain_json(&gc.witness));
        m.insert("cup_chi".into(), s(gc.cup_chi));
        m.insert("cup_chi_k".into(), s(gc.cup_chi_k));
        checks.push(Check::new("cup_chi", gc.cup_chi == (k % n) as i64, 1, None));
        checks.push(Check::new("cup_chi_k", gc.cup_chi_k == 1, 1, None));
        return Ok((Value::Object(m), checks));
    }
    let (module, echo) = load_module(&group, &args.module)?
        .ok_or_else(|| CliError::input("this operation needs --module"))?;
    m.insert("module".into(), echo);
    let space = CochainSpace::new(
        GroupView::full(
            &group,
            crate::zmod_cohomology::DEFAULT_MAX_GROUP_ORDER as u64,
        )?,
        Arc::new(module),
    )?;
    match args.op {
        CohomologyOp::H1 | CohomologyOp::H2 => {
            let deg = if args.op == CohomologyOp::H1 { 1 } else { 2 };
            let h = cohomology(&space, deg)?;
            m.insert(
                "divisors".into(),
                Value::Array(h.orders.iter().map(s).collect()),
            );
            m.insert(
                "representatives".into(),
                Value::Array(h.representatives.iter().map(cochain_json).collect()),
            );
            let ok = h.representatives.iter().all(Cochain::is_cocycle);
            checks.push(Check::new(
                "representatives_are_cocycles",
                ok,
                h.representatives.len() as u64,
                None,
            ));
        }
        CohomologyOp::Dimshift => {
            let h = cohomology(&space, 2)?;
            let aug = InducedModule::new(&space, InducedFlavor::Augmentation)?;
            let mut ok = true;
            let mut shifted = Vec::new();
            for rep in &h.representatives {
                let c2 = rep.normalized()?;
                let c1 = dim_shift_backward(&aug, &c2)?;
                let back = dim_shift_forward(&aug, &c1)?;
                ok &= c1.is_cocycle() && back.values() == c2.values();
                shifted.push(cochain_json(&c1));
            }
            m.insert(
                "divisors".into(),
                Value::Array(h.orders.iter().map(s).collect()),
            );
            m.insert("shifted".into(), Value::Array(shifted));
            checks.push(Check::new(
                "round_trip",
                ok,
                h.representatives.len() as u64,
                None,
            ));
        }
        CohomologyOp::Infres => {
            let sub = parse_subgroup(
                args.subgroup
                    .as_deref()
                    .ok_or_else(|| CliError::input("infres needs --subgroup"))?,
            )?;
            let h = cohomology(&space, 2)?;
            let mut out = Vec::new();
            let mut ok = true;
            for rep in &h.representatives {
                let res = infres_invert(&space, &sub, rep)?;
                let diff = rep.normalized()?.sub(&inflate(&space, &res))?;
                ok &= res.u.is_cocycle() && solve_coboundary(&diff)?.is_some();
                out.push(json!({
                    "quotient": s(&res.quotient.quotient),
                    "fixed_factors": res.fixed.module.factors().iter().map(s).collect::<Vec<_>>(),
                    "u": cochain_json(&res.u),
                }));
            }
            m.insert(
                "subgroup".into(),
                s(args.subgroup.as_deref().unwrap_or_default()),
            );
            m.insert(
                "divisors".into(),
                Value::Array(h.orders.iter().map(s).collect()),
            );
            m.insert("inverted".into(), Value::Array(out));
            checks.push(Check::new(
                "inflation_matches",
                ok,
                h.representatives.len() as u64,
                None,
            ));
        }
        CohomologyOp::Genchange => unreachable!("handled above"),
    }
    Ok((Value::Object(m), checks))
}

fn command_echo(name: &str, fields: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), s(name));
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    Value::Object(m)
}

fn document(
    command: Value,
    result: Value,
    checks: &[Check],
    started: Instant,
    out: &OutputArgs,
) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), s(SCHEMA));
    m.insert("command".into(), command);
    m.insert("result".into(), result);
    m.insert("verification".into(), verification_json(checks));
    if !out.no_timing {
        m.insert(
            "timing".into(),
            json!({ "millis": s(started.elapsed().as_millis()) }),
        );
    }
    Value::Object(m)
}

fn elem_text(v: &Value) -> String {
    let shift = v.get("shift").and_then(Value::as_str).unwrap_or("0");
    let rows: Vec<String> = v
        .get("coeffs")
        .and_then(Value::as_array)
        .map(|rows| {
            rows.iter()
                .map(|r| {
                    let cs: Vec<&str> = r
                        .as_array()
                        .map(|r| r.iter().filter_map(Value::as_str).collect())
                        .unwrap_or_default();
                    format!("[{}]", cs.join(" "))
                })
                .collect()
        })
        .unwrap_or_default();
    let body = rows.join(" ");
    if shift == "0" {
        body
    } else {
        format!("p^{shift} * {body}")
    }
}

/// Aligned plain-text rendering of a document.
pub fn render_text(doc: &Value) -> String {
    let mut out = String::new();
    let r = &doc["result"];
    let kind = r["kind"].as_str().unwrap_or("");
    out.push_str(&format!(
        "schema   {}\n",
        doc["schema"].as_str().unwrap_or("")
    ));
    out.push_str(&format!("kind     {kind}\n"));
    if let Some(f) = r.get("field").and_then(Value::as_str) {
        out.push_str(&format!("field    {f}\n"));
    }
    let labels: Vec<String> = r["tower"]["indices"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(Value::as_str)
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default();
    if let Some(alpha) = r.get("alpha").and_then(Value::as_array) {
        out.push_str("\nalpha\n");
        for (l, a) in labels.iter().zip(alpha) {
            out.push_str(&format!("  {:<8} {}\n", format!("alpha_{l}"), elem_text(a)));
        }
        out.push_str("beta\n");
        for (i, row) in r["beta"].as_array().into_iter().flatten().enumerate() {
            for (j, b) in row.as_array().into_iter().flatten().enumerate() {
                out.push_str(&format!(
                    "  {:<8} {}\n",
                    format!("beta_{}{}", labels[i], labels[j]),
                    elem_text(b)
                ));
            }
        }
    }
    if let Some(rows) = r
        .get("artin")
        .or_else(|| r.get("table").filter(|_| kind == "artin"))
        .and_then(Value::as_array)
    {
        out.push_str("\nreciprocity\n");
        for row in rows {
            out.push_str(&format!(
                "  {:<12} -> {}\n",
                row["image"].as_str().unwrap_or(""),
                elem_text(&row["element"])
            ));
        }
    }
    if kind == "cocycle" {
        out.push_str("\ncocycle\n");
        for (k, v) in r["table"].as_object().into_iter().flatten() {
            out.push_str(&format!("  {k:<12} {}\n", elem_text(v)));
        }
    }
    for key in [
        "image",
        "normalization",
        "invariant",
        "divisors",
        "cup_chi",
        "cup_chi_k",
    ] {
        if let Some(v) = r.get(key) {
            let text = match v {
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{key:<14} {text}\n"));
        }
    }
    out.push_str("\nverification\n");
    for c in doc["verification"]["checks"]
        .as_array()
        .into_iter()
        .flatten()
    {
        let status = if c["passed"].as_bool() == Some(true) {
            "pass"
        } else {
            "FAIL"
        };
        let w = c["witness"]
            .as_str()
            .map(|w| format!("  witness {w}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "  {:<28} {status} ({}){w}\n",
            c["name"].as_str().unwrap_or(""),
            c["count"].as_str().unwrap_or("")
        ));
    }
    out
}

fn emit(doc: &Value, out: &OutputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(doc).expect("serialisable") + "\n",
        Format::Text => render_text(doc),
    };
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError {
            code: 1,
            message: format!("{}: {e}", path.display()),
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError {
            code: 1,
            message: e.to_string(),
        }),
    }
}

fn spec_echo(name: &str, spec: &ExtensionSpec, route: Route, extra: Vec<(&str, Value)>) -> Value {
    let mut fields = vec![("spec", spec_to_json(spec)), ("route", s(route.name()))];
    fields.extend(extra);
    command_echo(name, fields)
}

fn exit_for(checks: &[Check]) -> i32 {
    if checks.iter().all(|c| c.passed) {
        0
    } else {
        1
    }
}

fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    let started = Instant::now();
    match cli.command {
        Command::Compute { spec, out } => {
            let es = spec.to_spec()?;
            let c = run_route(&es, spec.route)?;
            let result = tuple_result(&es, spec.route, &c)?;
            let checks = verify_tuple_result(&result, out.jobs)?;
            emit(
                &document(
                    spec_echo("compute", &es, spec.route, vec![]),
                    result,
                    &checks,
                    started,
                    &out,
                ),
                &out,
                stdout,
            )?;
            Ok(exit_for(&checks))
        }
        Command::Expand { spec, out } => {
            let es = spec.to_spec()?;
            let c = run_route(&es, spec.route)?;
            let cocycle = cocycle_from_tuple(&c.tuple, &c.tower)?;
            let result = cocycle_result(&es, spec.route, &c.tower, &cocycle)?;
            let checks = verify_cocycle_result(&result, out.jobs)?;
            emit(
                &document(
                    spec_echo("expand", &es, spec.route, vec![]),
                    result,
                    &checks,
                    started,
                    &out,
                ),
                &out,
                stdout,
            )?;
            Ok(exit_for(&checks))
        }
        Command::Artin { spec, element, out } => {
            let es = spec.to_spec()?;
            let (result, checks) = artin_result(&es, spec.route, element.as_deref())?;
            let extra = element.map(|e| vec![("element", s(e))]).unwrap_or_default();
            emit(
                &document(
                    spec_echo("artin", &es, spec.route, extra),
                    result,
                    &checks,
                    started,
                    &out,
                ),
                &out,
                stdout,
            )?;
            Ok(exit_for(&checks))
        }
        Command::Cohomology { args, out } => {
            let (result, checks) = cohomology_result(&args)?;
            let mut fields = vec![("group", s(&args.group)), ("op", result["op"].clone())];
            if let Some(k) = args.k {
                fields.push(("k", s(k)));
            }
            if let Some(sub) = &args.subgroup {
                fields.push(("subgroup", s(sub)));
            }
            if let Some(path) = &args.module {
                fields.push(("module", s(path.display())));
            }
            emit(
                &document(
                    command_echo("cohomology", fields),
                    result,
                    &checks,
                    started,
                    &out,
                ),
                &out,
                stdout,
            )?;
            Ok(exit_for(&checks))
        }
        Command::Verify { input, out } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
            let doc: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", input.display())))?;
            if doc.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
                return Err(CliError::input(format!("expected schema {SCHEMA}")));
            }
            let result = doc
                .get("result")
                .ok_or_else(|| CliError::input("missing result"))?;
            let checks = match result.get("kind").and_then(Value::as_str) {
                Some("tuple") => verify_tuple_result(result, out.jobs)?,
                Some("cocycle") => verify_cocycle_result(result, out.jobs)?,
                other => {
                    return Err(CliError::input(format!(
                        "cannot verify a document of kind {other:?}"
                    )))
                }
            };
            let command = doc.get("command").cloned().unwrap_or(Value::Null);
            emit(
                &document(command, result.clone(), &checks, started, &out),
                &out,
                stdout,
            )?;
            Ok(exit_for(&checks))
        }
    }
}

/// Parses `argv` (including the program name) and runs the command, writing the
/// document to `stdout` and diagnostics to `stderr`; returns the exit code.
pub fn dispatch(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(code) => {
            if code != 0 {
                let _ = writeln!(stderr, "fundclass: verification failed");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "fundclass: {}", e.message);
            e.code
        }
    }
}

/// [`dispatch`] on the process streams.
pub fn parse_and_dispatch(argv: &[String]) -> i32 {
    dispatch(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &str) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("fundclass")
            .chain(args.split_whitespace())
            .map(String::from)
            .collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = dispatch(&argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn compute_emits_versioned_document() {
        let (code, out, _) = call("compute --p 5 --family unramified --n 2 --prec 12 --no-timing");
        assert_eq!(code, 0);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["schema"], "fundclass/1");
        assert_eq!(doc["verification"]["passed"], true);
        assert!(doc.get("timing").is_none());
        assert_eq!(doc["result"]["precision"], "12");
    }

    #[test]
    fn bad_prime_is_input_error() {
        let (code, _, err) = call("compute --p 4 --family unramified --n 2");
        assert_eq!(code, 2);
        assert!(err.contains("p must be prime"));
        assert_eq!(call("compute --p 5").0, 2);
        assert_eq!(call("compute --p 5 --family tame").0, 2);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ExtensionSpec::new(7, Family::TameAbelian { e: 3, f: 2 }).with_twist(3);
        assert_eq!(spec_from_json(&spec_to_json(&spec)).unwrap(), spec);
    }

    #[test]
    fn cohomology_examples() {
        let dir = std::env::temp_dir().join(format!("fundclass-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let z4 = dir.join("trivZ4.json");
        fs::write(&z4, r#"{"factors":[4]}"#).unwrap();
        let z3 = dir.join("trivZ3.json");
        fs::write(&z3, r#"{"factors":[3],"actions":[[1]]}"#).unwrap();
        let (code, out, _) = call(&format!(
            "cohomology --group 6 --module {} --op h2 --no-timing",
            z4.display()
        ));
        assert_eq!(code, 0);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["result"]["divisors"], json!(["2"]));
        let (_, out, _) = call(&format!(
            "cohomology --group 2 --module {} --op h2 --no-timing",
            z3.display()
        ));
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["result"]["divisors"], json!([]));
        let (code, out, _) = call("cohomology --group 4 --op genchange --k 3 --no-timing");
        assert_eq!(code, 0);
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["result"]["cup_chi"], "3");
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn text_format_lists_tuple_and_rows() {
        let (code, out, _) = call("compute --p 5 --family tame --e 4 --f 2 --prec 10 --route tame --format text --no-timing");
        assert_eq!(code, 0);
        assert!(out.contains("beta_01"));
        assert!(out.contains("reciprocity"));
        assert!(out.contains("cocycle"));
    }
}
