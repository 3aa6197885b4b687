//! The reward carrier: combination operator, reference zero and total preorder.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::report::{check_law, LawReport, Verdict};
use crate::space::{Grid, Tuples};
use crate::value::{Carrier, Value};

pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

type BinFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;
type RelFn = Arc<dyn Fn(&Value, &Value) -> bool + Send + Sync>;

/// A binary operation on values. Custom operations compare equal by name.
#[derive(Clone)]
pub enum BinOp {
    Add,
    Mul,
    Max,
    Min,
    Custom(String, BinFn),
}

impl BinOp {
    pub fn custom(name: &str, f: impl Fn(&Value, &Value) -> Value + Send + Sync + 'static) -> Self {
        BinOp::Custom(name.to_string(), Arc::new(f))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "add" => Some(BinOp::Add),
            "mul" => Some(BinOp::Mul),
            "max" => Some(BinOp::Max),
            "min" => Some(BinOp::Min),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            BinOp::Add => "add",
            BinOp::Mul => "mul",
            BinOp::Max => "max",
            BinOp::Min => "min",
            BinOp::Custom(name, _) => name,
        }
    }

    pub fn apply(&self, a: &Value, b: &Value) -> Value {
        match self {
            BinOp::Add => a.add(b),
            BinOp::Mul => a.mul(b),
            BinOp::Max => a.max(b),
            BinOp::Min => a.min(b),
            BinOp::Custom(_, f) => f(a, b),
        }
    }
}

impl fmt::Debug for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for BinOp {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

/// The preorder used to compare values. `Numeric` is the usual `<=`.
#[derive(Clone)]
pub enum Preorder {
    Numeric,
    Custom(String, RelFn),
}

impl Preorder {
    pub fn custom(name: &str, f: impl Fn(&Value, &Value) -> bool + Send + Sync + 'static) -> Self {
        Preorder::Custom(name.to_string(), Arc::new(f))
    }

    pub fn name(&self) -> &str {
        match self {
            Preorder::Numeric => "numeric",
            Preorder::Custom(name, _) => name,
        }
    }
}

impl fmt::Debug for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for Preorder {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueAlgebra {
    pub carrier: Carrier,
    pub plus: BinOp,
    pub zero: Value,
    pub leq: Preorder,
    /// Absolute tolerance for equality checks in reports; 0 on exact carriers.
    pub eq_tolerance: f64,
}

impl ValueAlgebra {
    /// Numeric carrier with `<=`, the given combination and zero `0`.
    pub fn numeric(carrier: Carrier, plus: BinOp) -> Self {
        ValueAlgebra {
            carrier,
            plus,
            zero: carrier.zero(),
            leq: Preorder::Numeric,
            eq_tolerance: if carrier.is_exact() {
                0.0
            } else {
                DEFAULT_FLOAT_TOLERANCE
            },
        }
    }

    pub fn with_zero(mut self, zero: Value) -> Self {
        self.zero = zero;
        self
    }

    pub fn with_leq(mut self, leq: Preorder) -> Self {
        self.leq = leq;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        if !self.carrier.is_exact() {
            self.eq_tolerance = tol;
        }
        self
    }

    pub fn plus(&self, a: &Value, b: &Value) -> Value {
        self.plus.apply(a, b)
    }

    /// `a ⊑ b`. Floats compare exactly so that argmax stays deterministic.
    pub fn leq(&self, a: &Value, b: &Value) -> bool {
        match &self.leq {
            Preorder::Numeric => matches!(a.num_cmp(b), Some(Ordering::Less | Ordering::Equal)),
            Preorder::Custom(_, f) => f(a, b),
        }
    }

    /// Equality within `eq_tolerance`, for law and condition reports.
    pub fn eq(&self, a: &Value, b: &Value) -> bool {
        a.approx_eq(b, self.eq_tolerance)
    }

    pub fn from_i64(&self, n: i64) -> Value {
        self.carrier.from_i64(n)
    }
}

/// Reflexivity, transitivity (all triples) and totality (all pairs).
pub fn check_total_preorder(alg: &ValueAlgebra, samples: &[Value]) -> Result<LawReport> {
    let grid = Grid(samples.to_vec());
    let mut report = LawReport::default();
    report.push(check_law("reflexive", &grid, u64::MAX, 0, |a| {
        Ok(Verdict::check(alg.leq(a, a), || format!("{a} ⋢ {a}")))
    })?);
    report.push(check_law(
        "transitive",
        &Tuples {
            elem: &grid,
            arity: 3,
        },
        u64::MAX,
        0,
        |t| {
            let (a, b, c) = (&t[0], &t[1], &t[2]);
            if !(alg.leq(a, b) && alg.leq(b, c)) {
                return Ok(Verdict::Vacuous);
            }
            Ok(Verdict::check(alg.leq(a, c), || {
                format!("({a}, {b}, {c}): {a} ⊑ {b} ⊑ {c} but {a} ⋢ {c}")
            }))
        },
    )?);
    report.push(check_law(
        "total",
        &Tuples {
            elem: &grid,
            arity: 2,
        },
        u64::MAX,
        0,
        |t| {
            let (a, b) = (&t[0], &t[1]);
            Ok(Verdict::check(alg.leq(a, b) || alg.leq(b, a), || {
                format!("({a}, {b})")
            }))
        },
    )?);
    Ok(report)
}

/// `v1 ⊑ v2 → v3 ⊑ v4 → (v1 ⊕ v3) ⊑ (v2 ⊕ v4)` over all 4-tuples of samples.
pub fn check_plus_mon(alg: &ValueAlgebra, samples: &[Value]) -> Result<LawReport> {
    let grid = Grid(samples.to_vec());
    let mut report = LawReport::default();
    report.push(check_law(
        "plusMonSpec",
        &Tuples {
            elem: &grid,
            arity: 4,
        },
        u64::MAX,
        0,
        |t| {
            let (v1, v2, v3, v4) = (&t[0], &t[1], &t[2], &t[3]);
            if !(alg.leq(v1, v2) && alg.leq(v3, v4)) {
                return Ok(Verdict::Vacuous);
            }
            let (l, r) = (alg.plus(v1, v3), alg.plus(v2, v4));
            Ok(Verdict::check(alg.leq(&l, &r), || {
                format!("{v1} ⊑ {v2}, {v3} ⊑ {v4} but {v1}⊕{v3} = {l} ⋢ {v2}⊕{v4} = {r}")
            }))
        },
    )?);
    Ok(report)
}
