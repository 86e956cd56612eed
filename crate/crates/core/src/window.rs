use serde::{Deserialize, Serialize};

use crate::element::{BasisSymbol, Family};
use crate::error::{Error, Result};

/// Inclusive index range `[lo, hi]`, used to quantify over finitely many
/// basis symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[-radius, radius]`
    pub fn symmetric(radius: i64) -> Self {
        let radius = radius.abs();
        Self { lo: -radius, hi: radius }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn contains(&self, index: i64) -> bool {
        self.lo <= index && index <= self.hi
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Number of indices.
    pub fn width(&self) -> u64 {
        (self.hi as i128 - self.lo as i128 + 1) as u64
    }

    pub fn indices(&self) -> impl DoubleEndedIterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    /// All `L_r` then all `M_r` for `r` in the window, in canonical order.
    pub fn symbols(&self) -> Vec<BasisSymbol> {
        [Family::L, Family::M]
            .into_iter()
            .flat_map(|fam| self.indices().map(move |r| BasisSymbol::new(fam, r)))
            .collect()
    }

    pub fn padded(&self, by: i64) -> Result<Self> {
        let lo = self.lo.checked_sub(by).ok_or(Error::IndexOverflow)?;
        let hi = self.hi.checked_add(by).ok_or(Error::IndexOverflow)?;
        Self::new(lo, hi)
    }

    /// Smallest window containing every index, or `None` for an empty input.
    pub fn hull(indices: impl IntoIterator<Item = i64>) -> Option<Self> {
        let mut it = indices.into_iter();
        let first = it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), r| (lo.min(r), hi.max(r)));
        Some(Self { lo, hi })
    }
}

impl TryFrom<(i64, i64)> for Window {
    type Error = Error;
    fn try_from((lo, hi): (i64, i64)) -> Result<Self> {
        Window::new(lo, hi)
    }
}

impl From<Window> for (i64, i64) {
    fn from(w: Window) -> Self {
        (w.lo, w.hi)
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
