//! The uncertainty monad: deterministic, non-deterministic and stochastic
//! finite structures, plus executable checks of the monad laws.

use std::fmt::Debug;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{check_law, LawReport, Verdict};
use crate::space::{compositions, Grid, Listed, Product, StructureGenerator, Tuples};
use crate::value::{Carrier, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UncertaintyKind {
    Identity,
    NonDet,
    Stoch,
}

impl UncertaintyKind {
    pub const ALL: [UncertaintyKind; 3] = [
        UncertaintyKind::Identity,
        UncertaintyKind::NonDet,
        UncertaintyKind::Stoch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UncertaintyKind::Identity => "identity",
            UncertaintyKind::NonDet => "nondet",
            UncertaintyKind::Stoch => "stoch",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// A finite uncertainty structure.
///
/// Equality is entry-sequence equality: same kind, same outcomes in the same
/// order, and (for `Stoch`) numerically equal weights. Duplicate outcomes are
/// kept as separate entries.
#[derive(Debug, Clone, PartialEq)]
pub enum MStruct<A> {
    Identity(A),
    NonDet(Vec<A>),
    Stoch(Vec<(A, Value)>),
}

impl<A> MStruct<A> {
    /// Unit of the monad. Stochastic structures get the exact weight 1.
    pub fn pure(kind: UncertaintyKind, a: A) -> Self {
        match kind {
            UncertaintyKind::Identity => MStruct::Identity(a),
            UncertaintyKind::NonDet => MStruct::NonDet(vec![a]),
            UncertaintyKind::Stoch => MStruct::Stoch(vec![(a, Value::rational(1, 1))]),
        }
    }

    pub fn kind(&self) -> UncertaintyKind {
        match self {
            MStruct::Identity(_) => UncertaintyKind::Identity,
            MStruct::NonDet(_) => UncertaintyKind::NonDet,
            MStruct::Stoch(_) => UncertaintyKind::Stoch,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MStruct::Identity(_) => 1,
            MStruct::NonDet(xs) => xs.len(),
            MStruct::Stoch(xs) => xs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_not_empty(&self) -> bool {
        !self.is_empty()
    }

    pub fn values(&self) -> Values<'_, A> {
        match self {
            MStruct::Identity(a) => Values::Plain(std::slice::from_ref(a).iter()),
            MStruct::NonDet(xs) => Values::Plain(xs.iter()),
            MStruct::Stoch(xs) => Values::Weighted(xs.iter()),
        }
    }

    /// Outcomes with their weights; non-stochastic entries carry `None`.
    pub fn entries(&self) -> Vec<(&A, Option<&Value>)> {
        match self {
            MStruct::Identity(a) => vec![(a, None)],
            MStruct::NonDet(xs) => xs.iter().map(|a| (a, None)).collect(),
            MStruct::Stoch(xs) => xs.iter().map(|(a, w)| (a, Some(w))).collect(),
        }
    }

    /// Sum of the weights of a stochastic structure.
    pub fn weight_sum(&self) -> Option<Value> {
        match self {
            MStruct::Stoch(xs) => Some(
                xs.iter()
                    .fold(Value::rational(0, 1), |acc, (_, w)| acc.add(w)),
            ),
            _ => None,
        }
    }

    /// Applies `f` to every outcome; kind, weights and order are untouched.
    pub fn map<B>(&self, mut f: impl FnMut(&A) -> B) -> MStruct<B> {
        match self {
            MStruct::Identity(a) => MStruct::Identity(f(a)),
            MStruct::NonDet(xs) => MStruct::NonDet(xs.iter().map(f).collect()),
            MStruct::Stoch(xs) => {
                MStruct::Stoch(xs.iter().map(|(a, w)| (f(a), w.clone())).collect())
            }
        }
    }

    /// `join (map f self)`.
    pub fn bind<B>(&self, f: impl FnMut(&A) -> MStruct<B>) -> Result<MStruct<B>> {
        self.map(f).join()
    }
}

impl<A> MStruct<MStruct<A>> {
    /// Flattens one level. NonDet concatenates outer-then-inner; Stoch
    /// multiplies each inner weight by its outer weight.
    pub fn join(self) -> Result<MStruct<A>> {
        let outer = self.kind();
        let mismatch = |inner: UncertaintyKind| Error::KindMismatch { outer, inner };
        match self {
            MStruct::Identity(inner) => match inner {
                MStruct::Identity(a) => Ok(MStruct::Identity(a)),
                other => Err(mismatch(other.kind())),
            },
            MStruct::NonDet(xs) => {
                let mut out = Vec::new();
                for inner in xs {
                    match inner {
                        MStruct::NonDet(ys) => out.extend(ys),
                        other => return Err(mismatch(other.kind())),
                    }
                }
                Ok(MStruct::NonDet(out))
            }
            MStruct::Stoch(xs) => {
                let mut out = Vec::new();
                for (inner, w) in xs {
                    match inner {
                        MStruct::Stoch(ys) => {
                            out.extend(ys.into_iter().map(|(a, v)| (a, v.mul(&w))))
                        }
                        other => return Err(mismatch(other.kind())),
                    }
                }
                Ok(MStruct::Stoch(out))
            }
        }
    }
}

impl<A: Clone> MStruct<MStruct<A>> {
    /// [`MStruct::join`] without consuming the nested structure.
    pub fn join_ref(&self) -> Result<MStruct<A>> {
        let outer = self.kind();
        let mismatch = |inner: UncertaintyKind| Error::KindMismatch { outer, inner };
        match self {
            MStruct::Identity(inner) => match inner {
                MStruct::Identity(a) => Ok(MStruct::Identity(a.clone())),
                other => Err(mismatch(other.kind())),
            },
            MStruct::NonDet(xs) => {
                let mut out = Vec::with_capacity(xs.iter().map(MStruct::len).sum());
                for inner in xs {
                    match inner {
                        MStruct::NonDet(ys) => out.extend(ys.iter().cloned()),
                        other => return Err(mismatch(other.kind())),
                    }
                }
                Ok(MStruct::NonDet(out))
            }
            MStruct::Stoch(xs) => {
                let mut out = Vec::with_capacity(xs.iter().map(|(m, _)| m.len()).sum());
                for (inner, w) in xs {
                    match inner {
                        MStruct::Stoch(ys) => out.extend(ys.iter().map(|(a, v)| (a.clone(), v.mul(w)))),
                        other => return Err(mismatch(other.kind())),
                    }
                }
                Ok(MStruct::Stoch(out))
            }
        }
    }
}

/// Outcomes of a structure in order, weights dropped.
#[derive(Debug, Clone)]
pub enum Values<'a, A> {
    Plain(std::slice::Iter<'a, A>),
    Weighted(std::slice::Iter<'a, (A, Value)>),
}

impl<'a, A> Iterator for Values<'a, A> {
    type Item = &'a A;

    fn next(&mut self) -> Option<&'a A> {
        match self {
            Values::Plain(it) => it.next(),
            Values::Weighted(it) => it.next().map(|(a, _)| a),
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self {
            Values::Plain(it) => it.size_hint(),
            Values::Weighted(it) => it.size_hint(),
        }
    }
}

impl<A> DoubleEndedIterator for Values<'_, A> {
    fn next_back(&mut self) -> Option<Self::Item> {
        match self {
            Values::Plain(it) => it.next_back(),
            Values::Weighted(it) => it.next_back().map(|(a, _)| a),
        }
    }
}

impl<A> ExactSizeIterator for Values<'_, A> {}

/// Entry-sequence equality with a tolerance on floating weights.
pub fn struct_approx_eq<A: PartialEq>(a: &MStruct<A>, b: &MStruct<A>, tol: f64) -> bool {
    match (a, b) {
        (MStruct::Stoch(xs), MStruct::Stoch(ys)) => {
            xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|((x, w), (y, v))| x == y && w.approx_eq(v, tol))
        }
        _ => a == b,
    }
}

/// Sizes of the structures used by the monad-law checks.
#[derive(Debug, Clone)]
pub struct LawGenerator {
    /// Outcome values are `0..domain`; map functions are all tables
    /// `domain -> domain`.
    pub domain: usize,
    /// Longest flat structure.
    pub max_len: usize,
    /// Longest structure at each level of a nested structure, and in the
    /// range of Kleisli tables.
    pub nested_max_len: usize,
    /// Bound on the total number of entries (all levels) in the triple
    /// nests used for associativity of join.
    pub assoc_max_total: usize,
    /// Stochastic weights are positive multiples of `1 / weight_denom`.
    pub weight_denom: u32,
    /// Weight denominator for nested stochastic structures.
    pub nested_weight_denom: u32,
    pub weight_carrier: Carrier,
}

impl Default for LawGenerator {
    fn default() -> Self {
        LawGenerator {
            domain: 3,
            max_len: 3,
            nested_max_len: 2,
            assoc_max_total: 8,
            weight_denom: 4,
            nested_weight_denom: 2,
            weight_carrier: Carrier::Rational,
        }
    }
}

type Sample = i64;

impl LawGenerator {
    fn values(&self) -> Grid<Sample> {
        Grid((0..self.domain as Sample).collect())
    }

    pub fn flat(&self, kind: UncertaintyKind) -> StructureGenerator<Grid<Sample>> {
        StructureGenerator::with_options(
            kind,
            self.values(),
            0,
            self.max_len,
            self.weight_denom,
            self.weight_carrier,
        )
    }

    fn inner(&self, kind: UncertaintyKind) -> StructureGenerator<Grid<Sample>> {
        StructureGenerator::with_options(
            kind,
            self.values(),
            0,
            self.nested_max_len,
            self.nested_weight_denom,
            self.weight_carrier,
        )
    }

    fn nested(
        &self,
        kind: UncertaintyKind,
    ) -> StructureGenerator<StructureGenerator<Grid<Sample>>> {
        StructureGenerator::with_options(
            kind,
            self.inner(kind),
            0,
            self.nested_max_len,
            self.nested_weight_denom,
            self.weight_carrier,
        )
    }

    fn tables(&self) -> Tuples<Grid<Sample>> {
        Tuples {
            elem: self.values(),
            arity: self.domain,
        }
    }

    fn kleisli(&self, kind: UncertaintyKind) -> Tuples<StructureGenerator<Grid<Sample>>> {
        Tuples {
            elem: self.inner(kind),
            arity: self.domain,
        }
    }

    /// Triple nests with sequentially labelled leaves, so that any reordering
    /// of entries is observable.
    pub fn assoc_nests(&self, kind: UncertaintyKind) -> Listed<MStruct<MStruct<MStruct<Sample>>>> {
        let budget = self.assoc_max_total;
        let leaves = vec![((), 1usize)];
        let inner = self.structs_over(kind, &leaves, budget);
        let inner_items: Vec<_> = inner.into_iter().map(|(s, w)| (s, w + 1)).collect();
        let middle = self.structs_over(kind, &inner_items, budget);
        let middle_items: Vec<_> = middle.into_iter().map(|(s, w)| (s, w + 1)).collect();
        let outer = self.structs_over(kind, &middle_items, budget);
        Listed(
            outer
                .into_iter()
                .map(|(s, _)| {
                    let mut next = 0;
                    s.map(|m| {
                        m.map(|i| {
                            i.map(|_| {
                                next += 1;
                                next - 1
                            })
                        })
                    })
                })
                .collect(),
        )
    }

    fn structs_over<T: Clone>(
        &self,
        kind: UncertaintyKind,
        items: &[(T, usize)],
        budget: usize,
    ) -> Vec<(MStruct<T>, usize)> {
        fn seqs<T: Clone>(
            items: &[(T, usize)],
            budget: usize,
            max_len: usize,
        ) -> Vec<(Vec<T>, usize)> {
            let mut out = vec![(Vec::new(), 0)];
            let mut frontier = vec![(Vec::new(), 0usize)];
            for _ in 0..max_len {
                let mut grown = Vec::new();
                for (seq, total) in &frontier {
                    for (item, w) in items {
                        if total + w <= budget {
                            let mut s: Vec<T> = seq.clone();
                            s.push(item.clone());
                            grown.push((s, total + w));
                        }
                    }
                }
                out.extend(grown.iter().cloned());
                frontier = grown;
            }
            out
        }
        let denom = self.nested_weight_denom;
        let (min, max) = match kind {
            UncertaintyKind::Identity => (1, 1),
            UncertaintyKind::NonDet => (0, budget),
            UncertaintyKind::Stoch => (1, denom as usize),
        };
        let mut out = Vec::new();
        for (seq, total) in seqs(items, budget, max) {
            if seq.len() < min {
                continue;
            }
            match kind {
                UncertaintyKind::Identity => out.push((MStruct::Identity(seq[0].clone()), total)),
                UncertaintyKind::NonDet => out.push((MStruct::NonDet(seq), total)),
                UncertaintyKind::Stoch => {
                    for comp in compositions(denom, seq.len()) {
                        let entries = seq
                            .iter()
                            .cloned()
                            .zip(comp.iter().map(|&c| {
                                let w = Value::rational(c as i64, denom as i64);
                                match self.weight_carrier {
                                    Carrier::Float => Value::Float(w.to_f64()),
                                    _ => w,
                                }
                            }))
                            .collect();
                        out.push((MStruct::Stoch(entries), total));
                    }
                }
            }
        }
        out
    }
}

fn apply(table: &[Sample], x: &Sample) -> Sample {
    table[*x as usize]
}

fn show<T: Debug>(t: &T) -> String {
    format!("{t:?}")
}

fn same<T: PartialEq + Debug>(
    left: &T,
    right: &T,
    case: impl FnOnce() -> String,
) -> Result<Verdict> {
    Ok(Verdict::check(left == right, || {
        format!("{}: {left:?} != {right:?}", case())
    }))
}

/// Checks the functor and monad laws for one kind of structure: `mapPresId`,
/// `mapPresComp`, `pureNatTrans`, `joinNatTrans`, `pureNeutralLeft`,
/// `pureNeutralRight`, `joinAssoc` and `bindJoinSpec`.
pub fn check_monad_laws(
    kind: UncertaintyKind,
    gen: &LawGenerator,
    budget: u64,
    seed: u64,
) -> Result<LawReport> {
    let flat = gen.flat(kind);
    let tables = gen.tables();
    let mut report = LawReport::default();

    report.push(check_law("mapPresId", &flat, budget, seed, |ma| {
        same(&ma.map(|x| *x), ma, || show(ma))
    })?);

    report.push(check_law(
        "mapPresComp",
        &Product(&flat, Product(&tables, &tables)),
        budget,
        seed,
        |(ma, (f, g))| {
            let composed = ma.map(|x| apply(g, &apply(f, x)));
            let stepwise = ma.map(|x| apply(f, x)).map(|y| apply(g, y));
            same(&composed, &stepwise, || {
                format!("ma={ma:?} f={f:?} g={g:?}")
            })
        },
    )?);

    report.push(check_law(
        "pureNatTrans",
        &Product(gen.values(), &tables),
        budget,
        seed,
        |(a, f)| {
            let lhs = MStruct::pure(kind, *a).map(|x| apply(f, x));
            let rhs = MStruct::pure(kind, apply(f, a));
            same(&lhs, &rhs, || format!("a={a} f={f:?}"))
        },
    )?);

    let nested = gen.nested(kind);
    report.push(check_law(
        "joinNatTrans",
        &Product(&nested, &tables),
        budget,
        seed,
        |(mma, f)| {
            let lhs = mma.join_ref()?.map(|x| apply(f, x));
            let rhs = mma.map(|ma| ma.map(|x| apply(f, x))).join()?;
            same(&lhs, &rhs, || format!("mma={mma:?} f={f:?}"))
        },
    )?);

    let kleisli = gen.kleisli(kind);
    report.push(check_law(
        "pureNeutralLeft",
        &Product(gen.values(), &kleisli),
        budget,
        seed,
        |(a, k)| {
            let lhs = MStruct::pure(kind, *a).bind(|x| k[*x as usize].clone())?;
            same(&lhs, &k[*a as usize], || format!("a={a} k={k:?}"))
        },
    )?);

    report.push(check_law("pureNeutralRight", &flat, budget, seed, |ma| {
        let lhs = ma.map(|x| MStruct::pure(kind, *x)).join()?;
        same(&lhs, ma, || show(ma))
    })?);

    let nests = gen.assoc_nests(kind);
    report.push(check_law("joinAssoc", &nests, budget, seed, |mmma| {
        let lhs = mmma
            .map(|mma| mma.join_ref())
            .transpose_result()?
            .join()?;
        let rhs = mmma.join_ref()?.join()?;
        same(&lhs, &rhs, || show(mmma))
    })?);

    report.push(check_law(
        "bindJoinSpec",
        &Product(&flat, &kleisli),
        budget,
        seed,
        |(ma, k)| {
            let lhs = ma.bind(|x| k[*x as usize].clone())?;
            let rhs = ma.map(|x| k[*x as usize].clone()).join()?;
            same(&lhs, &rhs, || format!("ma={ma:?} k={k:?}"))
        },
    )?);

    Ok(report)
}

/// Checks `pureNotEmpty`, `mapPresNotEmpty` and `bindPresNotEmpty`. Bind is
/// exercised only with functions whose every image is non-empty.
pub fn check_nonempty_preservation(
    kind: UncertaintyKind,
    gen: &LawGenerator,
    budget: u64,
    seed: u64,
) -> Result<LawReport> {
    let flat = gen.flat(kind).non_empty();
    let tables = gen.tables();
    let kleisli = Tuples {
        elem: gen.inner(kind).non_empty(),
        arity: gen.domain,
    };
    let mut report = LawReport::default();

    report.push(check_law(
        "pureNotEmpty",
        &gen.values(),
        budget,
        seed,
        |a| {
            Ok(Verdict::check(
                MStruct::pure(kind, *a).is_not_empty(),
                || format!("a={a}"),
            ))
        },
    )?);

    report.push(check_law(
        "mapPresNotEmpty",
        &Product(&flat, &tables),
        budget,
        seed,
        |(ma, f)| {
            Ok(Verdict::check(
                ma.map(|x| apply(f, x)).is_not_empty(),
                || format!("ma={ma:?} f={f:?}"),
            ))
        },
    )?);

    report.push(check_law(
        "bindPresNotEmpty",
        &Product(&flat, &kleisli),
        budget,
        seed,
        |(ma, k)| {
            let out = ma.bind(|x| k[*x as usize].clone())?;
            Ok(Verdict::check(out.is_not_empty(), || {
                format!("ma={ma:?} k={k:?}")
            }))
        },
    )?);

    Ok(report)
}

impl<A> MStruct<Result<A>> {
    pub(crate) fn transpose_result(self) -> Result<MStruct<A>> {
        Ok(match self {
            MStruct::Identity(a) => MStruct::Identity(a?),
            MStruct::NonDet(xs) => MStruct::NonDet(xs.into_iter().collect::<Result<_>>()?),
            MStruct::Stoch(xs) => MStruct::Stoch(
                xs.into_iter()
                    .map(|(a, w)| a.map(|a| (a, w)))
                    .collect::<Result<_>>()?,
            ),
        })
    }
}
