//! Basis symbols `L_r`, `M_r` and finite formal linear combinations of them.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The two families of basis vectors. `L` sorts before `M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    L,
    M,
}

/// A basis vector `L_r` or `M_r`, ordered by family then index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisSymbol {
    pub family: Family,
    pub index: i64,
}

impl BasisSymbol {
    pub const fn new(family: Family, index: i64) -> Self {
        Self { family, index }
    }

    pub const fn l(index: i64) -> Self {
        Self::new(Family::L, index)
    }

    pub const fn m(index: i64) -> Self {
        Self::new(Family::M, index)
    }

    pub fn is_l(&self) -> bool {
        self.family == Family::L
    }

    pub fn is_m(&self) -> bool {
        self.family == Family::M
    }

    /// Same family, index moved by `by`.
    pub fn shifted(self, by: i64) -> Result<Self> {
        Ok(Self::new(self.family, checked_index_add(self.index, by)?))
    }
}

pub fn checked_index_add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::IndexOverflow)
}

pub fn checked_index_sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::IndexOverflow)
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.family {
            Family::L => 'L',
            Family::M => 'M',
        };
        write!(f, "{tag}_{}", self.index)
    }
}

impl fmt::Debug for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `L_3`, `L3`, `M_-1`, `M-1`.
impl FromStr for BasisSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid basis symbol {s:?}"));
        let mut chars = s.chars();
        let family = match chars.next() {
            Some('L') => Family::L,
            Some('M') => Family::M,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let index = rest.parse().map_err(|_| bad())?;
        Ok(Self::new(family, index))
    }
}

impl Serialize for BasisSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite linear combination of basis symbols. Zero coefficients are never
/// stored, so the empty map is the zero element.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<BasisSymbol, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(sym: BasisSymbol) -> Self {
        Self::term(sym, Scalar::one())
    }

    pub fn term(sym: BasisSymbol, coeff: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(sym, coeff);
        out
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (BasisSymbol, Scalar)>) -> Self {
        let mut out = Self::zero();
        for (sym, coeff) in terms {
            out.add_term(sym, coeff);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, sym: BasisSymbol) -> Scalar {
        self.terms.get(&sym).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, BasisSymbol, Scalar> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = BasisSymbol> + '_ {
        self.terms.keys().copied()
    }

    /// Adds `coeff · sym`, dropping the entry if it cancels.
    pub fn add_term(&mut self, sym: BasisSymbol, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(sym) {
            btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += &coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// `self += coeff · other`
    pub fn add_scaled(&mut self, coeff: &Scalar, other: &Element) {
        if coeff.is_zero() {
            return;
        }
        for (sym, c) in other.iter() {
            self.add_term(*sym, coeff * c);
        }
    }

    pub fn scaled(&self, coeff: &Scalar) -> Element {
        if coeff.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(s, c)| (*s, coeff * c)).collect(),
        }
    }

    /// `a·x + b·y`
    pub fn combine(a: &Scalar, x: &Element, b: &Scalar, y: &Element) -> Element {
        let mut out = x.scaled(a);
        out.add_scaled(b, y);
        out
    }

    /// Keeps only the terms whose symbol satisfies `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(BasisSymbol) -> bool) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .filter(|(s, _)| keep(**s))
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    /// Structural check that no zero coefficient is stored.
    pub fn is_pruned(&self) -> bool {
        self.terms.values().all(|c| !c.is_zero())
    }
}

impl From<BasisSymbol> for Element {
    fn from(sym: BasisSymbol) -> Self {
        Element::basis(sym)
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), rhs);
        out
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from(-1), rhs);
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scaled(&Scalar::from(-1))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (sym, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{sym}")?;
            } else if num_traits::Zero::is_zero(c.im()) {
                write!(f, "{c}{sym}")?;
            } else {
                write!(f, "({c}){sym}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a list of `[symbol, scalar]` pairs in canonical symbol order.
impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for pair in &self.terms {
            seq.serialize_element(&pair)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(BasisSymbol, Scalar)>::deserialize(deserializer)?;
        Ok(Element::from_terms(pairs))
    }
}
