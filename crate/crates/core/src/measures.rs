//! Measures `M Val -> Val`, the correctness-condition checkers and the
//! monoid-fold construction of list measures.
//!
//! The four checkers test, respectively:
//!
//! * `measPureSpec`: `meas (pure v) == v`
//! * `measJoinSpec`: `meas (join mmv) == meas (map meas mmv)`
//! * `measPlusSpec`: `meas (map (v ⊕) mv) == v ⊕ meas mv` for non-empty `mv`
//! * `measMonSpec`: `f ⊑ g` pointwise implies `meas (map f m) ⊑ meas (map g m)`
//!
//! They are refutation tools: exhaustive when the generated space fits in
//! the budget, otherwise a seeded sample. Nested structures handed to the
//! join check are non-empty at both levels, matching the structures that
//! arise when solving (transitions are never empty).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{BinOp, ValueAlgebra};
use crate::error::{Error, Result};
use crate::report::{check_law, LawOutcome, LawReport, Verdict};
use crate::space::{Grid, Product, Space, StructureGenerator, Tuples};
use crate::uncertainty::{MStruct, UncertaintyKind};
use crate::value::{Carrier, Value};

pub const MEAS_PURE: &str = "measPureSpec";
pub const MEAS_JOIN: &str = "measJoinSpec";
pub const MEAS_PLUS: &str = "measPlusSpec";
pub const MEAS_MON: &str = "measMonSpec";

/// A monoid `(Val, ⊙, neutr)` whose right fold is used as a list measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MonoidSpec {
    pub odot: BinOp,
    pub neutr: Value,
}

type MeasFn = Arc<dyn Fn(&MStruct<Value>) -> Value + Send + Sync>;

#[derive(Clone)]
pub enum MeasureDef {
    Identity,
    Min,
    Max,
    Expected,
    Sum,
    Avg,
    MaxVar,
    Length,
    MonoidFold(MonoidSpec),
    Custom(String, UncertaintyKind, MeasFn),
}

impl MeasureDef {
    pub const CATALOG: [&'static str; 8] = [
        "identity", "min", "max", "expected", "sum", "avg", "max_var", "length",
    ];

    pub fn name(&self) -> &str {
        match self {
            MeasureDef::Identity => "identity",
            MeasureDef::Min => "min",
            MeasureDef::Max => "max",
            MeasureDef::Expected => "expected",
            MeasureDef::Sum => "sum",
            MeasureDef::Avg => "avg",
            MeasureDef::MaxVar => "max_var",
            MeasureDef::Length => "length",
            MeasureDef::MonoidFold(_) => "monoid_fold",
            MeasureDef::Custom(name, ..) => name,
        }
    }

    pub fn kind(&self) -> UncertaintyKind {
        match self {
            MeasureDef::Identity => UncertaintyKind::Identity,
            MeasureDef::Expected => UncertaintyKind::Stoch,
            MeasureDef::Custom(_, kind, _) => *kind,
            _ => UncertaintyKind::NonDet,
        }
    }
}

impl FromStr for MeasureDef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identity" => MeasureDef::Identity,
            "min" => MeasureDef::Min,
            "max" => MeasureDef::Max,
            "expected" => MeasureDef::Expected,
            "sum" => MeasureDef::Sum,
            "avg" => MeasureDef::Avg,
            "max_var" => MeasureDef::MaxVar,
            "length" => MeasureDef::Length,
            other => return Err(Error::UnknownMeasure(other.to_string())),
        })
    }
}

impl fmt::Debug for MeasureDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureDef::MonoidFold(m) => write!(f, "monoid_fold({:?}, {})", m.odot, m.neutr),
            other => f.write_str(other.name()),
        }
    }
}

impl PartialEq for MeasureDef {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MeasureDef::MonoidFold(a), MeasureDef::MonoidFold(b)) => a == b,
            (MeasureDef::Custom(a, ka, _), MeasureDef::Custom(b, kb, _)) => a == b && ka == kb,
            (a, b) => std::mem::discriminant(a) == std::mem::discriminant(b),
        }
    }
}

/// Expected outcome of a condition check, kept for regression tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DocumentedStatus {
    pub pure: Expect,
    pub join: Expect,
    pub plus: Expect,
    pub mon: Expect,
}

/// A measure bound to an uncertainty kind and a value carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub def: MeasureDef,
    pub kind: UncertaintyKind,
    pub carrier: Carrier,
}

/// Looks up a catalog measure and checks it fits the carrier.
pub fn make_measure(name: &str, alg: &ValueAlgebra) -> Result<Measure> {
    Measure::new(name.parse()?, alg.carrier)
}

/// The NonDet measure `foldr ⊙ neutr`.
pub fn monoid_fold_measure(m: MonoidSpec, carrier: Carrier) -> Measure {
    Measure {
        def: MeasureDef::MonoidFold(m),
        kind: UncertaintyKind::NonDet,
        carrier,
    }
}

impl Measure {
    pub fn new(def: MeasureDef, carrier: Carrier) -> Result<Measure> {
        if matches!(def, MeasureDef::Avg | MeasureDef::Expected) && !carrier.has_division() {
            return Err(Error::MeasureCarrier {
                measure: def.name().to_string(),
                carrier: carrier.name(),
            });
        }
        Ok(Measure {
            kind: def.kind(),
            def,
            carrier,
        })
    }

    pub fn custom(
        name: &str,
        kind: UncertaintyKind,
        carrier: Carrier,
        f: impl Fn(&MStruct<Value>) -> Value + Send + Sync + 'static,
    ) -> Measure {
        Measure {
            def: MeasureDef::Custom(name.to_string(), kind, Arc::new(f)),
            kind,
            carrier,
        }
    }

    pub fn name(&self) -> &str {
        self.def.name()
    }

    /// Per-condition expectations for catalog measures with `⊕ = +` on a
    /// non-negative grid.
    pub fn documented_status(&self) -> DocumentedStatus {
        use Expect::*;
        let (pure, join, plus) = match self.def {
            MeasureDef::Identity | MeasureDef::Min | MeasureDef::Max | MeasureDef::Expected => {
                (Pass, Pass, Pass)
            }
            MeasureDef::Sum => (Pass, Pass, Fail),
            MeasureDef::Avg => (Pass, Fail, Pass),
            MeasureDef::MaxVar => (Fail, Fail, Pass),
            MeasureDef::Length => (Fail, Fail, Fail),
            MeasureDef::MonoidFold(_) | MeasureDef::Custom(..) => (Unknown, Unknown, Unknown),
        };
        let mon = match self.def {
            MeasureDef::MonoidFold(_) | MeasureDef::Custom(..) => Unknown,
            _ => Pass,
        };
        DocumentedStatus {
            pure,
            join,
            plus,
            mon,
        }
    }

    pub fn apply(&self, ms: &MStruct<Value>) -> Result<Value> {
        if ms.kind() != self.kind {
            return Err(Error::MeasureKind {
                measure: self.name().to_string(),
                kind: ms.kind(),
            });
        }
        let zero = self.carrier.zero();
        let foldr = |init: Value, f: &dyn Fn(&Value, Value) -> Value| {
            ms.values().rev().fold(init, |acc, x| f(x, acc))
        };
        Ok(match &self.def {
            MeasureDef::Identity => ms.values().next().cloned().expect("identity structure"),
            MeasureDef::Min => {
                let mut it = ms.values();
                match it.next() {
                    None => zero,
                    Some(first) => it.fold(first.clone(), |m, x| m.min(x)),
                }
            }
            MeasureDef::Max => foldr(zero, &|x, acc| x.max(&acc)),
            MeasureDef::Sum => foldr(zero, &|x, acc| x.add(&acc)),
            MeasureDef::Avg => {
                if ms.is_empty() {
                    zero
                } else {
                    self.carrier
                        .coerce(&foldr(zero, &|x, acc| x.add(&acc)).div_count(ms.len()))?
                }
            }
            MeasureDef::MaxVar => {
                let one = self.carrier.one();
                foldr(zero, &|x, acc| x.add(&one).max(&acc))
            }
            MeasureDef::Length => self.carrier.from_i64(ms.len() as i64),
            MeasureDef::Expected => {
                let total = ms.entries().into_iter().fold(zero, |acc, (v, w)| {
                    acc.add(&v.mul(w.expect("weighted entry")))
                });
                self.carrier.coerce(&total)?
            }
            MeasureDef::MonoidFold(m) => foldr(m.neutr.clone(), &|x, acc| m.odot.apply(x, &acc)),
            MeasureDef::Custom(_, _, f) => f(ms),
        })
    }
}

/// Generator sizes for the condition checkers.
#[derive(Debug, Clone)]
pub struct ConditionConfig {
    pub values: Vec<Value>,
    pub max_len: usize,
    pub nested_max_len: usize,
    pub weight_denom: u32,
    pub nested_weight_denom: u32,
    /// Size of the domain of the value tables used by `measMonSpec`.
    pub table_domain: usize,
    pub budget: u64,
    pub seed: u64,
}

impl ConditionConfig {
    pub fn new(values: Vec<Value>) -> Self {
        ConditionConfig {
            values,
            max_len: 3,
            nested_max_len: 3,
            weight_denom: 4,
            nested_weight_denom: 2,
            table_domain: 2,
            budget: 1_000_000,
            seed: 0,
        }
    }

    /// Integers `0..=hi` in the given carrier.
    pub fn grid(carrier: Carrier, hi: i64) -> Self {
        Self::new((0..=hi).map(|n| carrier.from_i64(n)).collect())
    }

    pub fn with_budget(mut self, budget: u64, seed: u64) -> Self {
        self.budget = budget;
        self.seed = seed;
        self
    }

    fn structs(&self, kind: UncertaintyKind, carrier: Carrier) -> StructureGenerator<Grid<Value>> {
        StructureGenerator::with_options(
            kind,
            Grid(self.values.clone()),
            0,
            self.max_len,
            self.weight_denom,
            carrier,
        )
    }

    fn nested(
        &self,
        kind: UncertaintyKind,
        carrier: Carrier,
    ) -> StructureGenerator<StructureGenerator<Grid<Value>>> {
        let inner = StructureGenerator::with_options(
            kind,
            Grid(self.values.clone()),
            1,
            self.nested_max_len,
            self.nested_weight_denom,
            carrier,
        );
        StructureGenerator::with_options(
            kind,
            inner,
            1,
            self.nested_max_len,
            self.nested_weight_denom,
            carrier,
        )
    }
}

/// Whether `measPlusSpec` requires a non-empty structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlusVariant {
    NonEmpty,
    Unrestricted,
}

fn weight_carrier(carrier: Carrier) -> Carrier {
    match carrier {
        Carrier::Float => Carrier::Float,
        _ => Carrier::Rational,
    }
}

pub fn check_meas_pure<S>(
    meas: &Measure,
    alg: &ValueAlgebra,
    values: &S,
    budget: u64,
    seed: u64,
) -> Result<LawOutcome>
where
    S: Space<Item = Value>,
{
    check_law(MEAS_PURE, values, budget, seed, |v| {
        let got = meas.apply(&MStruct::pure(meas.kind, v.clone()))?;
        Ok(Verdict::check(alg.eq(&got, v), || {
            format!("meas (pure {v}) = {got} ≠ {v}")
        }))
    })
}

pub fn check_meas_join<S>(
    meas: &Measure,
    alg: &ValueAlgebra,
    nested: &S,
    budget: u64,
    seed: u64,
) -> Result<LawOutcome>
where
    S: Space<Item = MStruct<MStruct<Value>>>,
{
    check_law(MEAS_JOIN, nested, budget, seed, |mmv| {
        let lhs = meas.apply(&mmv.join_ref()?)?;
        let inner = mmv
            .values()
            .map(|mv| meas.apply(mv))
            .collect::<Result<Vec<_>>>()?;
        let mut inner = inner.into_iter();
        let rhs = meas.apply(&mmv.map(|_| inner.next().unwrap()))?;
        Ok(Verdict::check(alg.eq(&lhs, &rhs), || {
            format!(
                "{}: meas (join mmv) = {lhs} ≠ meas (map meas mmv) = {rhs}",
                show_nested(mmv)
            )
        }))
    })
}

pub fn check_meas_plus<V, S>(
    meas: &Measure,
    alg: &ValueAlgebra,
    values: &V,
    structs: &S,
    budget: u64,
    seed: u64,
    variant: PlusVariant,
) -> Result<LawOutcome>
where
    V: Space<Item = Value>,
    S: Space<Item = MStruct<Value>>,
{
    check_law(
        MEAS_PLUS,
        &Product(values, structs),
        budget,
        seed,
        |(v, mv)| {
            if variant == PlusVariant::NonEmpty && mv.is_empty() {
                return Err(Error::EmptyStructure {
                    law: MEAS_PLUS.to_string(),
                });
            }
            let lhs = meas.apply(&mv.map(|x| alg.plus(v, x)))?;
            let rhs = alg.plus(v, &meas.apply(mv)?);
            Ok(Verdict::check(alg.eq(&lhs, &rhs), || {
                format!(
                    "v={v}, mv={}: meas (map (v ⊕) mv) = {lhs} ≠ v ⊕ meas mv = {rhs}",
                    show(mv)
                )
            }))
        },
    )
}

/// `measMonSpec` over value tables `f ⊑ g` on `0..domain` and structures
/// over that domain.
pub fn check_meas_mon<V, S>(
    meas: &Measure,
    alg: &ValueAlgebra,
    values: &V,
    domain: usize,
    structs: &S,
    budget: u64,
    seed: u64,
) -> Result<LawOutcome>
where
    V: Space<Item = Value>,
    S: Space<Item = MStruct<usize>>,
{
    let tables = Tuples {
        elem: values,
        arity: domain,
    };
    check_law(
        MEAS_MON,
        &Product(Product(&tables, &tables), structs),
        budget,
        seed,
        |((f, g), m)| {
            if !f.iter().zip(g).all(|(a, b)| alg.leq(a, b)) {
                return Ok(Verdict::Vacuous);
            }
            let lhs = meas.apply(&m.map(|i| f[*i].clone()))?;
            let rhs = meas.apply(&m.map(|i| g[*i].clone()))?;
            Ok(Verdict::check(alg.leq(&lhs, &rhs), || {
                format!("f={f:?} ⊑ g={g:?}, m={m:?}: {lhs} ⋢ {rhs}")
            }))
        },
    )
}

/// Runs the four condition checks with generators built from `cfg`.
pub fn check_conditions(
    meas: &Measure,
    alg: &ValueAlgebra,
    cfg: &ConditionConfig,
) -> Result<LawReport> {
    check_conditions_with(meas, alg, cfg, PlusVariant::NonEmpty)
}

pub fn check_conditions_with(
    meas: &Measure,
    alg: &ValueAlgebra,
    cfg: &ConditionConfig,
    variant: PlusVariant,
) -> Result<LawReport> {
    let wc = weight_carrier(alg.carrier);
    let values = Grid(cfg.values.clone());
    let (budget, seed) = (cfg.budget, cfg.seed);
    let mut report = LawReport::default();
    report.push(check_meas_pure(meas, alg, &values, budget, seed)?);
    report.push(check_meas_join(
        meas,
        alg,
        &cfg.nested(meas.kind, wc),
        budget,
        seed,
    )?);
    let structs = match variant {
        PlusVariant::NonEmpty => cfg.structs(meas.kind, wc).non_empty(),
        PlusVariant::Unrestricted => cfg.structs(meas.kind, wc),
    };
    report.push(check_meas_plus(
        meas, alg, &values, &structs, budget, seed, variant,
    )?);
    let domain = StructureGenerator::with_options(
        meas.kind,
        Grid((0..cfg.table_domain).collect()),
        0,
        cfg.max_len,
        cfg.weight_denom,
        wc,
    );
    report.push(check_meas_mon(
        meas,
        alg,
        &values,
        cfg.table_domain,
        &domain,
        budget,
        seed,
    )?);
    Ok(report)
}

/// Checks `odotNeutrRight`, `odotNeutrLeft`, `odotAssociative`,
/// `oplusOdotDistrLeft` and `odotMon` over the configured values.
pub fn check_monoid_preconditions(
    m: &MonoidSpec,
    alg: &ValueAlgebra,
    cfg: &ConditionConfig,
) -> Result<LawReport> {
    let values = Grid(cfg.values.clone());
    let triples = Tuples {
        elem: &values,
        arity: 3,
    };
    let quads = Tuples {
        elem: &values,
        arity: 4,
    };
    let op = |a: &Value, b: &Value| m.odot.apply(a, b);
    let (budget, seed) = (cfg.budget, cfg.seed);
    let mut report = LawReport::default();

    report.push(check_law("odotNeutrRight", &values, budget, seed, |l| {
        let got = op(l, &m.neutr);
        Ok(Verdict::check(alg.eq(&got, l), || {
            format!("{l} ⊙ {} = {got}", m.neutr)
        }))
    })?);
    report.push(check_law("odotNeutrLeft", &values, budget, seed, |r| {
        let got = op(&m.neutr, r);
        Ok(Verdict::check(alg.eq(&got, r), || {
            format!("{} ⊙ {r} = {got}", m.neutr)
        }))
    })?);
    report.push(check_law("odotAssociative", &triples, budget, seed, |t| {
        let (l, v, r) = (&t[0], &t[1], &t[2]);
        let (a, b) = (op(l, &op(v, r)), op(&op(l, v), r));
        Ok(Verdict::check(alg.eq(&a, &b), || {
            format!("({l}, {v}, {r}): {a} ≠ {b}")
        }))
    })?);
    report.push(check_law(
        "oplusOdotDistrLeft",
        &triples,
        budget,
        seed,
        |t| {
            let (n, l, r) = (&t[0], &t[1], &t[2]);
            let a = alg.plus(n, &op(l, r));
            let b = op(&alg.plus(n, l), &alg.plus(n, r));
            Ok(Verdict::check(alg.eq(&a, &b), || {
                format!("(n={n}, l={l}, r={r}): n ⊕ (l ⊙ r) = {a} ≠ (n ⊕ l) ⊙ (n ⊕ r) = {b}")
            }))
        },
    )?);
    report.push(check_law("odotMon", &quads, budget, seed, |t| {
        let (a, b, c, d) = (&t[0], &t[1], &t[2], &t[3]);
        if !(alg.leq(a, b) && alg.leq(c, d)) {
            return Ok(Verdict::Vacuous);
        }
        let (l, r) = (op(a, c), op(b, d));
        Ok(Verdict::check(alg.leq(&l, &r), || {
            format!("({a}, {b}, {c}, {d}): {l} ⋢ {r}")
        }))
    })?);
    Ok(report)
}

/// Checks that permuting outcomes never changes the measured value, over all
/// permutations of the generated structures.
pub fn check_order_insensitive(
    meas: &Measure,
    alg: &ValueAlgebra,
    cfg: &ConditionConfig,
) -> Result<LawOutcome> {
    let structs = cfg.structs(meas.kind, weight_carrier(alg.carrier));
    check_law("orderInsensitive", &structs, cfg.budget, cfg.seed, |ms| {
        let base = meas.apply(ms)?;
        for perm in permutations(ms.len()) {
            let permuted = permute(ms, &perm);
            let got = meas.apply(&permuted)?;
            if !alg.eq(&got, &base) {
                return Ok(Verdict::Fail(format!(
                    "{} gives {base}, permuted {} gives {got}",
                    show(ms),
                    show(&permuted)
                )));
            }
        }
        Ok(Verdict::Pass)
    })
}

fn permute(ms: &MStruct<Value>, perm: &[usize]) -> MStruct<Value> {
    match ms {
        MStruct::Identity(_) => ms.clone(),
        MStruct::NonDet(xs) => MStruct::NonDet(perm.iter().map(|&i| xs[i].clone()).collect()),
        MStruct::Stoch(xs) => MStruct::Stoch(perm.iter().map(|&i| xs[i].clone()).collect()),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub(crate) fn show(ms: &MStruct<Value>) -> String {
    match ms {
        MStruct::Identity(v) => format!("Identity({v})"),
        MStruct::NonDet(xs) => format!("[{}]", join_display(xs.iter())),
        MStruct::Stoch(xs) => format!(
            "[{}]",
            xs.iter()
                .map(|(v, w)| format!("({v}, {w})"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn show_nested(mmv: &MStruct<MStruct<Value>>) -> String {
    match mmv {
        MStruct::Identity(inner) => format!("Identity({})", show(inner)),
        MStruct::NonDet(xs) => format!("[{}]", xs.iter().map(show).collect::<Vec<_>>().join(", ")),
        MStruct::Stoch(xs) => format!(
            "[{}]",
            xs.iter()
                .map(|(m, w)| format!("({}, {w})", show(m)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn join_display<'a>(it: impl Iterator<Item = &'a Value>) -> String {
    it.map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> MStruct<Value> {
        MStruct::NonDet(xs.iter().map(|&n| Value::Int(n)).collect())
    }

    fn int_alg() -> ValueAlgebra {
        ValueAlgebra::numeric(Carrier::Int, BinOp::Add)
    }

    fn rat_alg() -> ValueAlgebra {
        ValueAlgebra::numeric(Carrier::Rational, BinOp::Add)
    }

    fn dist(entries: &[(i64, i64, i64)]) -> MStruct<Value> {
        MStruct::Stoch(
            entries
                .iter()
                .map(|&(v, n, d)| (Value::rational(v, 1), Value::rational(n, d)))
                .collect(),
        )
    }

    #[test]
    fn catalog_values() {
        let alg = int_alg();
        let list = ints(&[7, 5, 5, 3, 1]);
        assert_eq!(
            make_measure("min", &alg).unwrap().apply(&list).unwrap(),
            Value::Int(1)
        );
        assert_eq!(
            make_measure("sum", &alg).unwrap().apply(&list).unwrap(),
            Value::Int(21)
        );
        assert_eq!(
            make_measure("max", &alg).unwrap().apply(&list).unwrap(),
            Value::Int(7)
        );
        assert_eq!(
            make_measure("length", &alg).unwrap().apply(&list).unwrap(),
            Value::Int(5)
        );
        assert_eq!(
            make_measure("max_var", &alg).unwrap().apply(&list).unwrap(),
            Value::Int(8)
        );

        let min = make_measure("min", &alg).unwrap();
        assert_eq!(min.apply(&ints(&[])).unwrap(), Value::Int(0));
        assert_eq!(min.apply(&ints(&[4])).unwrap(), Value::Int(4));

        let expected = make_measure("expected", &rat_alg()).unwrap();
        let d = dist(&[(1, 5, 10), (2, 3, 10), (3, 2, 10)]);
        assert_eq!(expected.apply(&d).unwrap(), Value::rational(17, 10));

        let avg = make_measure("avg", &rat_alg()).unwrap();
        let mixed = MStruct::NonDet(vec![Value::rational(1, 1), Value::rational(5, 2)]);
        assert_eq!(avg.apply(&mixed).unwrap(), Value::rational(7, 4));
    }

    #[test]
    fn catalog_rejects_bad_requests() {
        assert!(matches!(
            make_measure("median", &int_alg()),
            Err(Error::UnknownMeasure(_))
        ));
        assert!(matches!(
            make_measure("avg", &int_alg()),
            Err(Error::MeasureCarrier { .. })
        ));
        assert!(matches!(
            make_measure("expected", &int_alg()),
            Err(Error::MeasureCarrier { .. })
        ));
        let min = make_measure("min", &int_alg()).unwrap();
        assert!(matches!(
            min.apply(&MStruct::Identity(Value::Int(1))),
            Err(Error::MeasureKind { .. })
        ));
    }

    #[test]
    fn monoid_fold_values() {
        let max = monoid_fold_measure(
            MonoidSpec {
                odot: BinOp::Max,
                neutr: Value::Int(0),
            },
            Carrier::Int,
        );
        assert_eq!(max.apply(&ints(&[3, 1, 2])).unwrap(), Value::Int(3));
        assert_eq!(max.apply(&ints(&[7, 5, 5, 3, 1])).unwrap(), Value::Int(7));
        let sum = monoid_fold_measure(
            MonoidSpec {
                odot: BinOp::Add,
                neutr: Value::Int(0),
            },
            Carrier::Int,
        );
        assert_eq!(sum.apply(&ints(&[])).unwrap(), Value::Int(0));
    }

    #[test]
    fn pure_condition() {
        let alg = int_alg();
        let grid = Grid((0..=9).map(Value::Int).collect());
        let min = make_measure("min", &alg).unwrap();
        assert!(check_meas_pure(&min, &alg, &grid, 100, 0).unwrap().passed);
        let mv = make_measure("max_var", &alg).unwrap();
        let out = check_meas_pure(&mv, &alg, &grid, 100, 0).unwrap();
        assert!(!out.passed);
        assert_eq!(
            out.counter_example.as_deref(),
            Some("meas (pure 0) = 1 ≠ 0")
        );
        let id = Measure::new(MeasureDef::Identity, Carrier::Int).unwrap();
        assert!(check_meas_pure(&id, &alg, &grid, 100, 0).unwrap().passed);
    }

    #[test]
    fn join_condition_worked_examples() {
        let alg = rat_alg();
        let avg = make_measure("avg", &alg).unwrap();
        let nested = MStruct::NonDet(vec![
            MStruct::NonDet(vec![Value::rational(1, 1)]),
            MStruct::NonDet(vec![Value::rational(2, 1), Value::rational(3, 1)]),
        ]);
        let out = check_meas_join(&avg, &alg, &crate::space::Listed(vec![nested]), 10, 0).unwrap();
        assert!(!out.passed);
        assert!(out
            .counter_example
            .unwrap()
            .contains("= 2 ≠ meas (map meas mmv) = 7/4"));

        // dps1 = [(1,.5),(2,.3),(3,.2)], dps2 = [(1,.4),(4,.6)], outer weights .1 / .9
        let expected = make_measure("expected", &alg).unwrap();
        let dpdps = MStruct::Stoch(vec![
            (
                dist(&[(1, 5, 10), (2, 3, 10), (3, 2, 10)]),
                Value::rational(1, 10),
            ),
            (dist(&[(1, 4, 10), (4, 6, 10)]), Value::rational(9, 10)),
        ]);
        let lhs = expected.apply(&dpdps.clone().join().unwrap()).unwrap();
        assert_eq!(lhs, Value::rational(269, 100));
        let out =
            check_meas_join(&expected, &alg, &crate::space::Listed(vec![dpdps]), 10, 0).unwrap();
        assert!(out.passed);
    }

    #[test]
    fn plus_condition_worked_examples() {
        let alg = int_alg();
        let sum = make_measure("sum", &alg).unwrap();
        let out = check_meas_plus(
            &sum,
            &alg,
            &Grid(vec![Value::Int(1)]),
            &crate::space::Listed(vec![ints(&[1, 2])]),
            10,
            0,
            PlusVariant::NonEmpty,
        )
        .unwrap();
        assert!(!out.passed);
        assert!(out
            .counter_example
            .unwrap()
            .contains("= 5 ≠ v ⊕ meas mv = 4"));

        let mul = ValueAlgebra::numeric(Carrier::Int, BinOp::Mul);
        let cfg = ConditionConfig::grid(Carrier::Int, 3);
        let r = check_conditions(&make_measure("sum", &mul).unwrap(), &mul, &cfg).unwrap();
        assert!(r.passed(MEAS_PLUS));

        let ralg = rat_alg();
        let expected = make_measure("expected", &ralg).unwrap();
        let dps1 = dist(&[(1, 5, 10), (2, 3, 10), (3, 2, 10)]);
        for v in 0..5 {
            let v = Value::rational(v, 1);
            let lhs = expected.apply(&dps1.map(|x| ralg.plus(&v, x))).unwrap();
            assert_eq!(lhs, v.add(&Value::rational(17, 10)));
        }
    }

    #[test]
    fn plus_condition_rejects_empty_structures() {
        let alg = int_alg();
        let min = make_measure("min", &alg).unwrap();
        let err = check_meas_plus(
            &min,
            &alg,
            &Grid(vec![Value::Int(1)]),
            &crate::space::Listed(vec![ints(&[])]),
            10,
            0,
            PlusVariant::NonEmpty,
        );
        assert!(matches!(err, Err(Error::EmptyStructure { .. })));
        // without the premise, min fails on the empty list: min [] = 0 ≠ 1 + 0
        let out = check_meas_plus(
            &min,
            &alg,
            &Grid(vec![Value::Int(1)]),
            &crate::space::Listed(vec![ints(&[])]),
            10,
            0,
            PlusVariant::Unrestricted,
        )
        .unwrap();
        assert!(!out.passed);
    }

    fn status_of(r: &LawReport) -> (bool, bool, bool, bool) {
        (
            r.passed(MEAS_PURE),
            r.passed(MEAS_JOIN),
            r.passed(MEAS_PLUS),
            r.passed(MEAS_MON),
        )
    }

    fn expect_matches(d: DocumentedStatus, got: (bool, bool, bool, bool)) {
        let ok = |e: Expect, g: bool| match e {
            Expect::Pass => g,
            Expect::Fail => !g,
            Expect::Unknown => true,
        };
        assert!(
            ok(d.pure, got.0) && ok(d.join, got.1) && ok(d.plus, got.2) && ok(d.mon, got.3),
            "{d:?} vs {got:?}"
        );
    }

    #[test]
    fn regression_matrix_matches_documented_status() {
        let ialg = int_alg();
        let icfg = ConditionConfig::grid(Carrier::Int, 3);
        for name in ["min", "max", "sum", "max_var", "length"] {
            let m = make_measure(name, &ialg).unwrap();
            let r = check_conditions(&m, &ialg, &icfg).unwrap();
            expect_matches(m.documented_status(), status_of(&r));
            for o in &r.outcomes {
                assert_eq!(o.passed, o.counter_example.is_none(), "{name} {o:?}");
            }
        }
        let ralg = rat_alg();
        let rcfg = ConditionConfig::grid(Carrier::Rational, 3);
        for name in ["avg", "expected"] {
            let m = make_measure(name, &ralg).unwrap();
            let r = check_conditions(&m, &ralg, &rcfg).unwrap();
            expect_matches(m.documented_status(), status_of(&r));
        }
        let id = Measure::new(MeasureDef::Identity, Carrier::Int).unwrap();
        let r = check_conditions(&id, &ialg, &icfg).unwrap();
        assert!(r.all_passed());
    }

    #[test]
    fn max_var_also_fails_join() {
        let alg = int_alg();
        let m = make_measure("max_var", &alg).unwrap();
        let r = check_conditions(&m, &alg, &ConditionConfig::grid(Carrier::Int, 3)).unwrap();
        assert_eq!(r.failed_laws(), vec![MEAS_PURE, MEAS_JOIN]);
        assert!(r
            .get(MEAS_JOIN)
            .unwrap()
            .counter_example
            .as_ref()
            .unwrap()
            .starts_with("[[0]]"));
    }

    #[test]
    fn monoid_preconditions() {
        let add = int_alg();
        let cfg = ConditionConfig::grid(Carrier::Int, 3);
        let max0 = MonoidSpec {
            odot: BinOp::Max,
            neutr: Value::Int(0),
        };
        assert!(check_monoid_preconditions(&max0, &add, &cfg)
            .unwrap()
            .all_passed());

        let plus0 = MonoidSpec {
            odot: BinOp::Add,
            neutr: Value::Int(0),
        };
        let r = check_monoid_preconditions(&plus0, &add, &cfg).unwrap();
        assert_eq!(r.failed_laws(), vec!["oplusOdotDistrLeft"]);

        let mul = ValueAlgebra::numeric(Carrier::Int, BinOp::Mul);
        assert!(check_monoid_preconditions(&plus0, &mul, &cfg)
            .unwrap()
            .all_passed());
    }

    #[test]
    fn order_insensitivity() {
        let ialg = int_alg();
        let cfg = ConditionConfig {
            max_len: 4,
            ..ConditionConfig::grid(Carrier::Int, 2)
        };
        for name in ["min", "max", "sum"] {
            let m = make_measure(name, &ialg).unwrap();
            assert!(
                check_order_insensitive(&m, &ialg, &cfg).unwrap().passed,
                "{name}"
            );
        }
        let ralg = rat_alg();
        let rcfg = ConditionConfig {
            max_len: 4,
            ..ConditionConfig::grid(Carrier::Rational, 2)
        };
        for name in ["avg", "expected"] {
            let m = make_measure(name, &ralg).unwrap();
            assert!(
                check_order_insensitive(&m, &ralg, &rcfg).unwrap().passed,
                "{name}"
            );
        }
        // a fold with a non-commutative operator is order sensitive
        let first = monoid_fold_measure(
            MonoidSpec {
                odot: BinOp::custom("first", |a, _| a.clone()),
                neutr: Value::Int(0),
            },
            Carrier::Int,
        );
        assert!(!check_order_insensitive(&first, &ialg, &cfg).unwrap().passed);
    }
}
