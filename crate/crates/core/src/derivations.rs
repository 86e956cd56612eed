//! Windowed linear systems for ⅓-derivations and their classification.
//!
//! An ansatz assigns unknown coefficients to the images of the basis symbols
//! in a domain window. Every basis triple of an equation window whose
//! bracket and images stay inside the ansatz contributes one row per output
//! coordinate of `3φ([x,y,z]) - [φx,y,z] - [x,φy,z] - [x,y,φz]`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    BracketDef, FiniteFunctional, LinearMap, LinearOperator, TernaryBracket,
};
use crate::element::{checked_index_add, BasisSymbol, Element, Family};
use crate::error::{Error, Result};
use crate::lab::{check_one_third_derivation, CheckReport, Sampling};
use crate::linalg::{nullspace, project_solution, ConstraintSystem, RowOrigin, SolutionSpace, UnknownId};
use crate::scalar::Scalar;
use crate::window::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    /// `φ(L_r) = a_r L_{r+g} + b_r M_{r+g}`, `φ(M_r) = c_r L_{r+g} + d_r M_{r+g}`
    Graded(i64),
    /// `φ(L_r) = Σ_i a_{r,i} L_i + Σ_j b_{r,j} M_j`, likewise `c`, `d` for `M_r`,
    /// with `i, j` ranging over the image window.
    FullWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ansatz {
    pub kind: AnsatzKind,
    pub domain: Window,
    pub image: Window,
}

impl Ansatz {
    pub fn graded(g: i64, domain: Window) -> Self {
        Self {
            kind: AnsatzKind::Graded(g),
            domain,
            image: domain,
        }
    }

    pub fn full_window(domain: Window, image: Window) -> Self {
        Self {
            kind: AnsatzKind::FullWindow,
            domain,
            image,
        }
    }

    fn tags(family: Family) -> (&'static str, &'static str) {
        match family {
            Family::L => ("a", "b"),
            Family::M => ("c", "d"),
        }
    }

    /// All unknowns, grouped by domain index.
    pub fn unknowns(&self) -> Vec<UnknownId> {
        self.unknowns_over(self.domain)
    }

    /// Unknowns belonging to the images of symbols indexed by `w`.
    pub fn unknowns_over(&self, w: Window) -> Vec<UnknownId> {
        let mut out = Vec::new();
        for r in w.indices() {
            match self.kind {
                AnsatzKind::Graded(_) => {
                    for tag in ["a", "b", "c", "d"] {
                        out.push(UnknownId::new(tag, &[r]));
                    }
                }
                AnsatzKind::FullWindow => {
                    for tag in ["a", "b", "c", "d"] {
                        out.extend(self.image.indices().map(|i| UnknownId::new(tag, &[r, i])));
                    }
                }
            }
        }
        out
    }

    /// `φ(sym)` as `(output coordinate, unknown)` pairs, or `None` when
    /// `sym` is outside the domain.
    pub fn image_of(&self, sym: BasisSymbol) -> Result<Option<Vec<(BasisSymbol, UnknownId)>>> {
        let r = sym.index;
        if !self.domain.contains(r) {
            return Ok(None);
        }
        let (to_l, to_m) = Self::tags(sym.family);
        Ok(Some(match self.kind {
            AnsatzKind::Graded(g) => {
                let t = checked_index_add(r, g)?;
                vec![
                    (BasisSymbol::l(t), UnknownId::new(to_l, &[r])),
                    (BasisSymbol::m(t), UnknownId::new(to_m, &[r])),
                ]
            }
            AnsatzKind::FullWindow => self
                .image
                .indices()
                .map(|i| (BasisSymbol::l(i), UnknownId::new(to_l, &[r, i])))
                .chain(
                    self.image
                        .indices()
                        .map(|j| (BasisSymbol::m(j), UnknownId::new(to_m, &[r, j]))),
                )
                .collect(),
        }))
    }

    /// Coefficient vector of `op` in this ansatz. Fails if `op` sends a
    /// domain symbol outside what the ansatz can represent.
    pub fn coordinates_of(&self, sys: &ConstraintSystem, op: &impl LinearMap) -> Result<Vec<Scalar>> {
        let mut v = vec![Scalar::zero(); sys.unknowns().len()];
        for sym in self.domain.symbols() {
            let slots: BTreeMap<BasisSymbol, UnknownId> =
                self.image_of(sym)?.expect("domain symbol").into_iter().collect();
            for (out, c) in op.apply_basis(sym)?.iter() {
                let unknown = slots.get(out).ok_or_else(|| {
                    Error::DomainError(format!("image of {sym} has a term {out} outside the ansatz"))
                })?;
                v[sys.position(unknown)?] = c.clone();
            }
        }
        Ok(v)
    }

    /// The operator whose coefficients are `v`, defined on the symbols
    /// indexed by `space.unknowns`.
    pub fn materialize(&self, space: &SolutionSpace, v: &[Scalar]) -> Result<LinearOperator> {
        let mut table: BTreeMap<BasisSymbol, Element> = BTreeMap::new();
        for r in self.domain.indices() {
            for family in [Family::L, Family::M] {
                let sym = BasisSymbol::new(family, r);
                let Some(slots) = self.image_of(sym)? else { continue };
                let mut img = Element::zero();
                let mut present = false;
                for (out, u) in slots {
                    if let Some(p) = space.position(&u) {
                        present = true;
                        img.add_term(out, v[p].clone());
                    }
                }
                if present {
                    table.insert(sym, img);
                }
            }
        }
        Ok(LinearOperator::Custom(table))
    }
}

type TripleRows = Vec<(BasisSymbol, BTreeMap<UnknownId, Scalar>)>;

fn rows_for_triple(
    b: &impl TernaryBracket,
    ansatz: &Ansatz,
    args: [BasisSymbol; 3],
) -> Result<Option<TripleRows>> {
    let mut images = Vec::with_capacity(3);
    for s in args {
        match ansatz.image_of(s)? {
            Some(img) => images.push(img),
            None => return Ok(None),
        }
    }
    let out = b.bracket_basis(args[0], args[1], args[2])?;
    let mut acc: BTreeMap<BasisSymbol, BTreeMap<UnknownId, Scalar>> = BTreeMap::new();
    let mut add = |coord: BasisSymbol, u: &UnknownId, c: Scalar| {
        let slot = acc.entry(coord).or_default().entry(u.clone()).or_default();
        *slot += &c;
    };
    let three = Scalar::from(3);
    for (sym, coeff) in out.iter() {
        let Some(img) = ansatz.image_of(*sym)? else { return Ok(None) };
        let weight = &three * coeff;
        for (coord, u) in img {
            add(coord, &u, weight.clone());
        }
    }
    for (slot, img) in images.iter().enumerate() {
        for (s, u) in img {
            let mut t = args;
            t[slot] = *s;
            for (coord, c) in b.bracket_basis(t[0], t[1], t[2])?.iter() {
                add(*coord, u, -c);
            }
        }
    }
    Ok(Some(
        acc.into_iter()
            .map(|(coord, row)| (coord, row.into_iter().filter(|(_, c)| !c.is_zero()).collect()))
            .filter(|(_, row): &(BasisSymbol, BTreeMap<UnknownId, Scalar>)| !row.is_empty())
            .collect(),
    ))
}

/// Builds the ⅓-derivation system of `b` for `ansatz` from the basis triples
/// of `eq_window`. Triples referencing a symbol outside the domain are
/// skipped whole.
pub fn assemble_system(b: &impl TernaryBracket, ansatz: &Ansatz, eq_window: Window) -> Result<ConstraintSystem> {
    let symbols = eq_window.symbols();
    let n = symbols.len();
    let triples: Vec<[BasisSymbol; 3]> = (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |l| (i, j, l))))
        .map(|(i, j, l)| [symbols[i], symbols[j], symbols[l]])
        .collect();
    let per_triple: Vec<Option<TripleRows>> = triples
        .par_iter()
        .map(|t| rows_for_triple(b, ansatz, *t))
        .collect::<Result<_>>()?;

    let mut sys = ConstraintSystem::new(ansatz.unknowns())?;
    let mut qualified = false;
    for (args, rows) in triples.into_iter().zip(per_triple) {
        let Some(rows) = rows else { continue };
        qualified = true;
        for (coordinate, row) in rows {
            sys.add_row(
                row.iter().map(|(u, c)| (u, c.clone())),
                Some(RowOrigin::Triple { args, coordinate }),
            )?;
        }
    }
    if !qualified {
        return Err(Error::EmptySystem);
    }
    Ok(sys)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OffendingVector {
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationVerdict {
    pub matches: bool,
    pub expected_description: String,
    pub core_dimension: usize,
    pub expected_dimension: usize,
    pub offending_vectors: Vec<OffendingVector>,
    pub row_count: usize,
    pub unknown_count: usize,
    pub core_space: SolutionSpace,
}

/// Half the domain radius.
pub fn default_margin(domain: Window) -> i64 {
    (domain.width() as i64 - 1) / 4
}

pub fn solve_and_classify(
    b: &BracketDef,
    ansatz: &Ansatz,
    eq_window: Window,
    core: Window,
) -> Result<ClassificationVerdict> {
    solve_and_classify_with_margin(b, ansatz, eq_window, core, default_margin(ansatz.domain))
}

/// Solves the windowed system, projects onto the unknowns of `core`, and
/// compares with the closed-form families: `D_g` for `A_ω^δ` in graded mode,
/// and `φ(L_r) = hL_r`, `φ(M_r) = f(M_r)Σ c_i L_i + Σ d_{r,j} M_j` with
/// `Σ_j f(M_j) d_{r,j} = h f(M_r)` for `A_{f,k}` in full-window mode.
pub fn solve_and_classify_with_margin(
    b: &BracketDef,
    ansatz: &Ansatz,
    eq_window: Window,
    core: Window,
    margin: i64,
) -> Result<ClassificationVerdict> {
    let inner = ansatz.domain.padded(-margin).ok();
    if !inner.is_some_and(|w| w.contains_window(&core)) {
        return Err(Error::DomainError(format!(
            "core {core} must sit inside domain {} with margin {margin}",
            ansatz.domain
        )));
    }
    let sys = assemble_system(b, ansatz, eq_window)?;
    let space = nullspace(&sys);
    let core_space = project_solution(&space, &ansatz.unknowns_over(core))?;
    let (expected_description, expected_dimension, offending) = match (b, ansatz.kind) {
        (BracketDef::AOmegaDelta, AnsatzKind::Graded(g)) => (
            format!("multiples of D_{g}: a_r = d_r constant, b_r = c_r = 0"),
            1,
            graded_offenders(&core_space, core),
        ),
        (BracketDef::Afk { f, .. }, AnsatzKind::FullWindow) => {
            if !f.support().all(|(r, _)| ansatz.image.contains(r)) {
                return Err(Error::DomainError("support of f must lie in the image window".into()));
            }
            let img = ansatz.image.width() as usize;
            let any_f = core.indices().any(|r| !f.at(r).is_zero());
            let dim = 1 + if any_f { img } else { 0 } + core.width() as usize * (img - 1);
            (
                "phi(L_r) = h L_r, phi(M_r) = f(M_r) sum c_i L_i + sum d_{r,j} M_j, sum_j f(M_j) d_{r,j} = h f(M_r)"
                    .to_string(),
                dim,
                full_window_offenders(&core_space, core, ansatz.image, f),
            )
        }
        _ => {
            return Err(Error::DomainError(format!(
                "no closed-form classification for {} with this ansatz",
                b.name()
            )))
        }
    };
    Ok(ClassificationVerdict {
        matches: offending.is_empty() && core_space.dim() == expected_dimension,
        expected_description,
        core_dimension: core_space.dim(),
        expected_dimension,
        offending_vectors: offending,
        row_count: sys.row_count(),
        unknown_count: sys.unknowns().len(),
        core_space,
    })
}

fn val<'a>(space: &'a SolutionSpace, n: usize, tag: &str, subs: &[i64]) -> &'a Scalar {
    space
        .value(n, &UnknownId::new(tag, subs))
        .expect("core unknown present")
}

fn graded_offenders(space: &SolutionSpace, core: Window) -> Vec<OffendingVector> {
    let mut out = Vec::new();
    for n in 0..space.dim() {
        let h = val(space, n, "a", &[core.lo()]).clone();
        let bad = core.indices().find_map(|r| {
            if !val(space, n, "b", &[r]).is_zero() || !val(space, n, "c", &[r]).is_zero() {
                Some(format!("b or c nonzero at r = {r}"))
            } else if *val(space, n, "a", &[r]) != h || *val(space, n, "d", &[r]) != h {
                Some(format!("a or d not constant at r = {r}"))
            } else {
                None
            }
        });
        if let Some(reason) = bad {
            out.push(OffendingVector { index: n, reason });
        }
    }
    out
}

fn full_window_offenders(
    space: &SolutionSpace,
    core: Window,
    image: Window,
    f: &FiniteFunctional,
) -> Vec<OffendingVector> {
    let anchor = core.indices().find(|r| !f.at(*r).is_zero());
    let mut out = Vec::new();
    for n in 0..space.dim() {
        let h = val(space, n, "a", &[core.lo(), core.lo()]).clone();
        let c_seq: Vec<Scalar> = match anchor {
            Some(t) => {
                let inv = f.at(t).inv().expect("nonzero");
                image.indices().map(|i| val(space, n, "c", &[t, i]) * &inv).collect()
            }
            None => vec![Scalar::zero(); image.width() as usize],
        };
        let check = |r: i64| -> Option<String> {
            for (pos, i) in image.indices().enumerate() {
                if !val(space, n, "b", &[r, i]).is_zero() {
                    return Some(format!("b[{r},{i}] nonzero"));
                }
                let want_a = if i == r { h.clone() } else { Scalar::zero() };
                if *val(space, n, "a", &[r, i]) != want_a {
                    return Some(format!("a[{r},{i}] differs from h[r=i]"));
                }
                if *val(space, n, "c", &[r, i]) != &c_seq[pos] * &f.at(r) {
                    return Some(format!("c[{r},{i}] is not c_i f(M_r)"));
                }
            }
            let mut residual = -&(&h * &f.at(r));
            for j in image.indices() {
                residual += &(&f.at(j) * val(space, n, "d", &[r, j]));
            }
            if !residual.is_zero() {
                return Some(format!("sum_j f(M_j) d[{r},j] - h f(M_r) = {residual} at r = {r}"));
            }
            None
        };
        if let Some(reason) = core.indices().find_map(check) {
            out.push(OffendingVector { index: n, reason });
        }
    }
    out
}

/// Exhaustive ⅓-derivation check of a closed-form family member.
pub fn forward_check_family(b: &impl TernaryBracket, family: &impl LinearMap, w: Window) -> Result<CheckReport> {
    check_one_third_derivation(b, family, w, Sampling::exhaustive())
}

/// Closed-form ⅓-derivations of `A_{f,k}`:
/// `φ(L_r) = h L_r`, `φ(M_r) = f(M_r) Σ_i c_i L_i + Σ_j d_{r,j} M_j` with
/// `d_{r,j} = diag·[r=j] + extra_{r,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneThirdFamily {
    pub h: Scalar,
    pub c: BTreeMap<i64, Scalar>,
    pub diag: Scalar,
    pub extra: BTreeMap<(i64, i64), Scalar>,
    pub f: FiniteFunctional,
}

impl OneThirdFamily {
    pub fn d(&self, r: i64, j: i64) -> Scalar {
        let mut v = self.extra.get(&(r, j)).cloned().unwrap_or_default();
        if r == j {
            v += &self.diag;
        }
        v
    }

    /// `Σ_j f(M_j) d_{r,j} - h f(M_r)`.
    pub fn residual(&self, r: i64) -> Scalar {
        let mut acc = &(&self.diag - &self.h) * &self.f.at(r);
        for ((_, j), v) in self.extra.range((r, i64::MIN)..=(r, i64::MAX)) {
            acc += &(&self.f.at(*j) * v);
        }
        acc
    }

    /// The residual vanishes for every integer `r`.
    pub fn is_consistent(&self) -> bool {
        let rows = self.extra.keys().map(|(r, _)| *r);
        let fs = self.f.support().map(|(r, _)| r);
        rows.chain(fs).all(|r| self.residual(r).is_zero())
    }

    /// A random consistent member whose supports lie in `rows` (for `extra`)
    /// and `image` (for `c` and the columns of `extra`). Needs the support
    /// of `f` inside `rows ∩ image`.
    pub fn random(f: &FiniteFunctional, rows: Window, image: Window, rng: &mut ChaCha8Rng) -> Self {
        let small = |rng: &mut ChaCha8Rng| Scalar::from(rng.gen_range(-4i64..=4));
        let h = small(rng);
        let diag = small(rng);
        let c = image.indices().map(|i| (i, small(rng))).collect();
        let (pivot, fp) = f
            .support()
            .next()
            .map(|(r, v)| (r, v.clone()))
            .expect("nonzero functional");
        let mut extra = BTreeMap::new();
        for r in rows.indices() {
            let mut sum = Scalar::zero();
            for j in image.indices().filter(|j| *j != pivot) {
                let v = small(rng);
                sum += &(&f.at(j) * &v);
                extra.insert((r, j), v);
            }
            // Σ_j f(M_j) extra_{r,j} = (h - diag) f(M_r)
            let target = &(&h - &diag) * &f.at(r);
            let fix = &(&target - &sum) * &fp.inv().expect("nonzero");
            extra.insert((r, pivot), fix);
        }
        let extra = extra.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self { h, c, diag, extra, f: f.clone() }
    }
}

impl LinearMap for OneThirdFamily {
    fn apply_basis(&self, x: BasisSymbol) -> Result<Element> {
        match x.family {
            Family::L => Ok(Element::term(x, self.h.clone())),
            Family::M => {
                let mut out = Element::zero();
                let fr = self.f.at(x.index);
                if !fr.is_zero() {
                    for (i, ci) in &self.c {
                        out.add_term(BasisSymbol::l(*i), &fr * ci);
                    }
                }
                out.add_term(x, self.diag.clone());
                for ((_, j), v) in self.extra.range((x.index, i64::MIN)..=(x.index, i64::MAX)) {
                    out.add_term(BasisSymbol::m(*j), v.clone());
                }
                Ok(out)
            }
        }
    }
}

/// Random consistent family members, reproducible from `seed`.
pub fn random_family_members(
    f: &FiniteFunctional,
    rows: Window,
    image: Window,
    count: usize,
    seed: u64,
) -> Vec<OneThirdFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| OneThirdFamily::random(f, rows, image, &mut rng)).collect()
}

/// Constraints on products of the form `x·y = φ_x(y)` with
/// `φ_{L_i} = Σ_k α_{i,k} D_k` and `φ_{M_j} = Σ_k β_{j,k} D_k`: commutativity on
/// mixed pairs, `Σ_k α_{i,k} M_{k+j} = Σ_k β_{j,k} L_{k+i}`.
pub fn tp_triviality_system(w_index: Window, w_basis: Window, include_m_rows: bool) -> Result<ConstraintSystem> {
    let mut unknowns = Vec::new();
    for tag in ["alpha", "beta"] {
        for i in w_basis.indices() {
            unknowns.extend(w_index.indices().map(|k| UnknownId::new(tag, &[i, k])));
        }
    }
    let mut sys = ConstraintSystem::new(unknowns)?;
    for i in w_basis.indices() {
        for j in w_basis.indices() {
            let args = [BasisSymbol::l(i), BasisSymbol::m(j)];
            let mut rows: BTreeMap<BasisSymbol, Vec<(UnknownId, Scalar)>> = BTreeMap::new();
            for k in w_index.indices() {
                if include_m_rows {
                    rows.entry(BasisSymbol::m(checked_index_add(k, j)?))
                        .or_default()
                        .push((UnknownId::new("alpha", &[i, k]), Scalar::one()));
                }
                rows.entry(BasisSymbol::l(checked_index_add(k, i)?))
                    .or_default()
                    .push((UnknownId::new("beta", &[j, k]), Scalar::from(-1)));
            }
            for (coordinate, row) in rows {
                sys.add_row(
                    row.iter().map(|(u, c)| (u, c.clone())),
                    Some(RowOrigin::Pair { args, coordinate }),
                )?;
            }
        }
    }
    Ok(sys)
}

/// Kernel of [`tp_triviality_system`]; only the zero product survives.
pub fn tp_triviality_solver(w_index: Window, w_basis: Window) -> Result<SolutionSpace> {
    Ok(nullspace(&tp_triviality_system(w_index, w_basis, true)?))
}
