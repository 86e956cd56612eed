//! Homogeneous sparse linear systems over ℚ(i) and their exact kernels.
//!
//! Rows are reduced incrementally into a reduced row echelon form. The RREF of
//! a row space is unique, so the kernel basis read off from it does not depend
//! on the order in which rows arrive.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::element::BasisSymbol;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Name of a coefficient unknown, e.g. `a[3]` or `d[-1,2]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UnknownId {
    pub tag: String,
    pub subs: Vec<i64>,
}

impl UnknownId {
    pub fn new(tag: &str, subs: &[i64]) -> Self {
        Self {
            tag: tag.to_owned(),
            subs: subs.to_vec(),
        }
    }
}

impl fmt::Display for UnknownId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.tag)?;
        for (n, s) in self.subs.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for UnknownId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Where an assembled row came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RowOrigin {
    Triple {
        args: [BasisSymbol; 3],
        coordinate: BasisSymbol,
    },
    Pair {
        args: [BasisSymbol; 2],
        coordinate: BasisSymbol,
    },
}

pub type SparseRow = BTreeMap<usize, Scalar>;

/// A homogeneous system `A·v = 0` over named unknowns.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    unknowns: Vec<UnknownId>,
    positions: HashMap<UnknownId, usize>,
    rows: Vec<SparseRow>,
    origins: Vec<Option<RowOrigin>>,
}

impl ConstraintSystem {
    pub fn new(unknowns: impl IntoIterator<Item = UnknownId>) -> Result<Self> {
        let mut sys = Self::default();
        for u in unknowns {
            sys.register(u)?;
        }
        Ok(sys)
    }

    pub fn register(&mut self, unknown: UnknownId) -> Result<usize> {
        if self.positions.contains_key(&unknown) {
            return Err(Error::DuplicateUnknown(unknown.to_string()));
        }
        let pos = self.unknowns.len();
        self.positions.insert(unknown.clone(), pos);
        self.unknowns.push(unknown);
        Ok(pos)
    }

    pub fn position(&self, unknown: &UnknownId) -> Result<usize> {
        self.positions
            .get(unknown)
            .copied()
            .ok_or_else(|| Error::UnknownNotFound(unknown.to_string()))
    }

    pub fn unknowns(&self) -> &[UnknownId] {
        &self.unknowns
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn origins(&self) -> &[Option<RowOrigin>] {
        &self.origins
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Adds `Σ coeff·unknown = 0`. Repeated unknowns are summed; a row that
    /// cancels to nothing is dropped and `false` is returned.
    pub fn add_row<'a>(
        &mut self,
        entries: impl IntoIterator<Item = (&'a UnknownId, Scalar)>,
        origin: Option<RowOrigin>,
    ) -> Result<bool> {
        let mut row = SparseRow::new();
        for (u, c) in entries {
            let pos = self.position(u)?;
            accumulate(&mut row, pos, &c);
        }
        self.push_positional(row, origin)
    }

    /// Same as [`add_row`](Self::add_row) with unknowns given by position.
    pub fn add_positional_row(
        &mut self,
        entries: impl IntoIterator<Item = (usize, Scalar)>,
        origin: Option<RowOrigin>,
    ) -> Result<bool> {
        let mut row = SparseRow::new();
        for (pos, c) in entries {
            if pos >= self.unknowns.len() {
                return Err(Error::UnknownNotFound(format!("#{pos}")));
            }
            accumulate(&mut row, pos, &c);
        }
        self.push_positional(row, origin)
    }

    fn push_positional(&mut self, row: SparseRow, origin: Option<RowOrigin>) -> Result<bool> {
        if row.is_empty() {
            return Ok(false);
        }
        self.rows.push(row);
        self.origins.push(origin);
        Ok(true)
    }

    /// `A·v`, one entry per row.
    pub fn residuals(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|row| {
                row.iter().fold(Scalar::zero(), |mut acc, (pos, c)| {
                    if !v[*pos].is_zero() {
                        acc += &(c * &v[*pos]);
                    }
                    acc
                })
            })
            .collect()
    }

    pub fn is_satisfied_by(&self, v: &[Scalar]) -> bool {
        v.len() == self.unknowns.len() && self.residuals(v).iter().all(Scalar::is_zero)
    }
}

fn accumulate(row: &mut SparseRow, pos: usize, c: &Scalar) {
    if c.is_zero() {
        return;
    }
    let slot = row.entry(pos).or_default();
    *slot += c;
    if slot.is_zero() {
        row.remove(&pos);
    }
}

/// Incrementally maintained reduced row echelon form.
///
/// Each stored row has a leading 1 at its pivot column and zeros at every
/// other pivot column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn pivot_row(&self, col: usize) -> Option<&SparseRow> {
        self.pivots.get(&col)
    }

    /// Rows sorted by pivot column.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.pivots.iter().map(|(c, r)| (*c, r))
    }

    /// Remainder of `row` after eliminating every pivot column.
    pub fn reduce(&self, row: &SparseRow) -> SparseRow {
        // Subtracting a pivot row never touches another pivot column, so the
        // pivot-column coefficients of the input can be read up front.
        let hits: Vec<(usize, Scalar)> = row
            .iter()
            .filter(|(col, _)| self.pivots.contains_key(col))
            .map(|(col, c)| (*col, c.clone()))
            .collect();
        let mut out = row.clone();
        for (col, factor) in hits {
            for (j, v) in &self.pivots[&col] {
                accumulate(&mut out, *j, &-(&factor * v));
            }
        }
        out
    }

    pub fn is_in_span(&self, row: &SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    /// Inserts a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        let mut rem = self.reduce(row);
        let Some((&pivot, lead)) = rem.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("leading coefficient of a pruned row is nonzero");
        for c in rem.values_mut() {
            *c = &*c * &inv;
        }
        for other in self.pivots.values_mut() {
            if let Some(factor) = other.get(&pivot).cloned() {
                for (j, v) in &rem {
                    accumulate(other, *j, &-(&factor * v));
                }
            }
        }
        self.pivots.insert(pivot, rem);
        true
    }
}

/// Exact basis of a kernel, indexed by named unknowns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionSpace {
    pub unknowns: Vec<UnknownId>,
    pub basis: Vec<Vec<Scalar>>,
}

impl SolutionSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, unknown: &UnknownId) -> Option<usize> {
        self.unknowns.iter().position(|u| u == unknown)
    }

    /// Value of `unknown` in basis vector `n`.
    pub fn value(&self, n: usize, unknown: &UnknownId) -> Option<&Scalar> {
        self.position(unknown).map(|p| &self.basis[n][p])
    }

    /// Every basis vector satisfies every row of `sys`.
    pub fn satisfies(&self, sys: &ConstraintSystem) -> bool {
        self.unknowns == sys.unknowns() && self.basis.iter().all(|v| sys.is_satisfied_by(v))
    }

    /// Rank of the basis, recomputed from scratch.
    pub fn rank(&self) -> usize {
        rank_of(&self.basis)
    }
}

fn dense_to_sparse(v: &[Scalar]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// Rank of a list of dense vectors.
pub fn rank_of(vectors: &[Vec<Scalar>]) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(&dense_to_sparse(v));
    }
    ech.rank()
}

/// Scales `v` so that its first nonzero coordinate is 1.
fn normalize_leading(v: &mut [Scalar]) {
    if let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() {
        if !lead.is_one() {
            let inv = lead.inv().expect("nonzero");
            for c in v.iter_mut() {
                *c = &*c * &inv;
            }
        }
    }
}

/// Row-reduces the whole system. Exposed so callers can inspect the rank.
pub fn echelon_of(sys: &ConstraintSystem) -> Echelon {
    let mut ech = Echelon::new();
    for row in sys.rows() {
        ech.insert(row);
        if ech.rank() == sys.unknowns().len() {
            break;
        }
    }
    ech
}

/// Exact kernel basis. One vector per free column, in increasing column
/// order, each normalized so its first nonzero coordinate is 1.
pub fn nullspace(sys: &ConstraintSystem) -> SolutionSpace {
    let n = sys.unknowns().len();
    let ech = echelon_of(sys);
    let mut basis = Vec::with_capacity(n - ech.rank());
    for free in (0..n).filter(|c| ech.pivot_row(*c).is_none()) {
        let mut v = vec![Scalar::zero(); n];
        v[free] = Scalar::one();
        for (pivot, row) in ech.rows() {
            if let Some(c) = row.get(&free) {
                v[pivot] = -c;
            }
        }
        normalize_leading(&mut v);
        basis.push(v);
    }
    SolutionSpace {
        unknowns: sys.unknowns().to_vec(),
        basis,
    }
}

/// Image of `space` under projection onto the coordinates in `keep`,
/// re-reduced to an independent basis (RREF rows, leading coefficient 1).
/// The kept unknowns stay in their original relative order.
pub fn project_solution(space: &SolutionSpace, keep: &[UnknownId]) -> Result<SolutionSpace> {
    let mut wanted = vec![false; space.unknowns.len()];
    for u in keep {
        let pos = space
            .position(u)
            .ok_or_else(|| Error::UnknownNotFound(u.to_string()))?;
        wanted[pos] = true;
    }
    let kept: Vec<usize> = (0..space.unknowns.len()).filter(|i| wanted[*i]).collect();
    let mut ech = Echelon::new();
    for v in &space.basis {
        let projected: Vec<Scalar> = kept.iter().map(|i| v[*i].clone()).collect();
        ech.insert(&dense_to_sparse(&projected));
    }
    let basis = ech
        .rows()
        .map(|(_, row)| {
            let mut v = vec![Scalar::zero(); kept.len()];
            for (j, c) in row {
                v[*j] = c.clone();
            }
            v
        })
        .collect();
    Ok(SolutionSpace {
        unknowns: kept.iter().map(|i| space.unknowns[*i].clone()).collect(),
        basis,
    })
}
