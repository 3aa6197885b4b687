//! Indexable finite generator spaces for law and condition checks.
//!
//! Every space has a length and a total `get(index)`, so a check either walks
//! all indices (exhaustive) or draws a seeded sample of indices. Counter-examples
//! are always reported by generation index, which keeps reports reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::uncertainty::{MStruct, UncertaintyKind};
use crate::value::{Carrier, Value};

pub trait Space {
    type Item;
    fn len(&self) -> u128;
    fn get(&self, index: u128) -> Self::Item;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<S: Space + ?Sized> Space for &S {
    type Item = S::Item;
    fn len(&self) -> u128 {
        (**self).len()
    }
    fn get(&self, index: u128) -> Self::Item {
        (**self).get(index)
    }
}

/// Either every index of a space, or `budget` seeded draws from it.
#[derive(Debug, Clone)]
pub struct Cases {
    len: u128,
    exhaustive: bool,
    remaining: u64,
    next: u128,
    rng: ChaCha8Rng,
}

impl Cases {
    pub fn new(len: u128, budget: u64, seed: u64) -> Self {
        let exhaustive = len <= budget as u128;
        Cases {
            len,
            exhaustive,
            remaining: if exhaustive { len as u64 } else { budget },
            next: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }
}

impl Iterator for Cases {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if self.exhaustive {
            let i = self.next;
            self.next += 1;
            Some(i)
        } else {
            Some(self.rng.gen_range(0..self.len))
        }
    }
}

#[derive(Debug, Clone)]
pub struct Grid<T>(pub Vec<T>);

impl<T: Clone> Space for Grid<T> {
    type Item = T;
    fn len(&self) -> u128 {
        self.0.len() as u128
    }
    fn get(&self, index: u128) -> T {
        self.0[index as usize].clone()
    }
}

/// Pairs; the first component is the most significant digit.
#[derive(Debug, Clone)]
pub struct Product<A, B>(pub A, pub B);

impl<A: Space, B: Space> Space for Product<A, B> {
    type Item = (A::Item, B::Item);
    fn len(&self) -> u128 {
        self.0.len().saturating_mul(self.1.len())
    }
    fn get(&self, index: u128) -> Self::Item {
        let b = self.1.len();
        (self.0.get(index / b), self.1.get(index % b))
    }
}

/// Fixed-length vectors over a space; doubles as finite function tables.
#[derive(Debug, Clone)]
pub struct Tuples<S> {
    pub elem: S,
    pub arity: usize,
}

impl<S: Space> Space for Tuples<S> {
    type Item = Vec<S::Item>;
    fn len(&self) -> u128 {
        pow_sat(self.elem.len(), self.arity)
    }
    fn get(&self, index: u128) -> Self::Item {
        decode_digits(index, self.elem.len(), self.arity)
            .into_iter()
            .map(|d| self.elem.get(d))
            .collect()
    }
}

/// Generator of uncertainty structures of one kind over an element space.
///
/// NonDet structures have between `min_len` and `max_len` outcomes. Stoch
/// structures have between `max(min_len, 1)` and `max_len` outcomes whose
/// weights are positive multiples of `1 / weight_denom` summing to one.
#[derive(Debug, Clone)]
pub struct StructureGenerator<S> {
    pub kind: UncertaintyKind,
    elem: S,
    elem_len: u128,
    /// `powers[k]` is `elem_len^k`, saturating.
    powers: Vec<u128>,
    min_len: usize,
    max_len: usize,
    /// `weights[n]` is `n / weight_denom` in the weight carrier.
    weights: Vec<Value>,
    compositions: Vec<Vec<Vec<u32>>>,
}

impl<S: Space> StructureGenerator<S> {
    pub fn new(kind: UncertaintyKind, elem: S, max_len: usize) -> Self {
        Self::with_options(kind, elem, 0, max_len, 4, Carrier::Rational)
    }

    pub fn with_options(
        kind: UncertaintyKind,
        elem: S,
        min_len: usize,
        max_len: usize,
        weight_denom: u32,
        weight_carrier: Carrier,
    ) -> Self {
        assert!(weight_denom >= 1, "weight denominator must be positive");
        let compositions = (0..=max_len)
            .map(|k| compositions(weight_denom, k))
            .collect();
        StructureGenerator {
            kind,
            elem_len: elem.len(),
            powers: (0..=max_len).map(|k| pow_sat(elem.len(), k)).collect(),
            elem,
            min_len,
            max_len,
            weights: (0..=weight_denom).map(|n| Self::make_weight(n, weight_denom, weight_carrier)).collect(),
            compositions,
        }
    }

    /// Same generator restricted to non-empty structures.
    pub fn non_empty(mut self) -> Self {
        self.min_len = self.min_len.max(1);
        self
    }

    fn lengths(&self) -> std::ops::RangeInclusive<usize> {
        match self.kind {
            UncertaintyKind::Identity => 1..=1,
            UncertaintyKind::NonDet => self.min_len..=self.max_len,
            UncertaintyKind::Stoch => self.min_len.max(1)..=self.max_len,
        }
    }

    fn count_of_len(&self, k: usize) -> u128 {
        let values = self.powers[k];
        match self.kind {
            UncertaintyKind::Stoch => values.saturating_mul(self.compositions[k].len() as u128),
            _ => values,
        }
    }

    /// The `k` elements whose base-`elem_len` digits spell `index`,
    /// most significant first.
    fn decode(&self, mut index: u128, k: usize) -> Vec<S::Item> {
        let mut out = Vec::with_capacity(k);
        match (u64::try_from(index), u64::try_from(self.elem_len)) {
            // 64-bit division is much cheaper than 128-bit
            (Ok(mut i), Ok(base)) => {
                for _ in 0..k {
                    out.push(self.elem.get((i % base) as u128));
                    i /= base;
                }
            }
            _ => {
                for _ in 0..k {
                    out.push(self.elem.get(index % self.elem_len));
                    index /= self.elem_len;
                }
            }
        }
        out.reverse();
        out
    }

    fn weight(&self, numer: u32) -> Value {
        self.weights[numer as usize].clone()
    }

    fn make_weight(numer: u32, denom: u32, carrier: Carrier) -> Value {
        let w = Value::rational(numer as i64, denom as i64);
        match carrier {
            Carrier::Float => Value::Float(w.to_f64()),
            _ => w,
        }
    }
}

impl<S: Space> Space for StructureGenerator<S> {
    type Item = MStruct<S::Item>;

    fn len(&self) -> u128 {
        self.lengths()
            .map(|k| self.count_of_len(k))
            .fold(0u128, u128::saturating_add)
    }

    fn get(&self, mut index: u128) -> Self::Item {
        for k in self.lengths() {
            let count = self.count_of_len(k);
            if index >= count {
                index -= count;
                continue;
            }
            return match self.kind {
                UncertaintyKind::Identity => MStruct::Identity(self.elem.get(index)),
                UncertaintyKind::NonDet => MStruct::NonDet(self.decode(index, k)),
                UncertaintyKind::Stoch => {
                    let comps = &self.compositions[k];
                    let values = self.powers[k];
                    let comp = &comps[(index / values) as usize];
                    let outcomes = self.decode(index % values, k);
                    MStruct::Stoch(outcomes.into_iter().zip(comp).map(|(x, &w)| (x, self.weight(w))).collect())
                }
            };
        }
        panic!("index out of range for structure generator")
    }
}

/// Materialised space; used for spaces built by recursive enumeration.
#[derive(Debug, Clone)]
pub struct Listed<T>(pub Vec<T>);

impl<T: Clone> Space for Listed<T> {
    type Item = T;
    fn len(&self) -> u128 {
        self.0.len() as u128
    }
    fn get(&self, index: u128) -> T {
        self.0[index as usize].clone()
    }
}

fn pow_sat(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

fn decode_digits(mut index: u128, base: u128, width: usize) -> Vec<u128> {
    let mut digits = vec![0; width];
    for slot in digits.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    digits
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let max_here = total.saturating_sub(parts as u32 - 1);
        for first in 1..=max_here {
            prefix.push(first);
            go(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        return out;
    }
    go(total, parts, &mut Vec::new(), &mut out);
    out
}
