//! Transposed Poisson products on `A_{f,k}` given by parameters `(α, c, d)`:
//!
//! * `L_i · L_j = 0`
//! * `L_i · M_j = M_j · L_i = α f(M_j) L_i`
//! * `M_i · M_j = f(M_i) f(M_j) Σ_p c_p L_p + Σ_q d_{i,j,q} M_q`

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{BilinearProduct, FiniteFunctional, LinearMap, ProductDef};
use crate::element::{checked_index_add, BasisSymbol, Element, Family};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::window::Window;

/// Parameters of one product in the family. All maps are finitely supported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct TpParams {
    pub alpha: Scalar,
    pub c: BTreeMap<i64, Scalar>,
    pub d: BTreeMap<(i64, i64, i64), Scalar>,
    pub f: FiniteFunctional,
    pub k: i64,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    alpha: Scalar,
    #[serde(default)]
    c: BTreeMap<i64, Scalar>,
    #[serde(default)]
    d: Vec<(i64, i64, i64, Scalar)>,
    f: FiniteFunctional,
    #[serde(default)]
    k: i64,
}

impl TryFrom<ParamsRepr> for TpParams {
    type Error = Error;
    fn try_from(r: ParamsRepr) -> Result<Self> {
        let mut d = BTreeMap::new();
        for (i, j, q, v) in r.d {
            if d.insert((i, j, q), v).is_some() {
                return Err(Error::Parse(format!("d[{i},{j},{q}] given twice")));
            }
        }
        Ok(TpParams::new(r.alpha, r.c, d, r.f, r.k))
    }
}

impl From<TpParams> for ParamsRepr {
    fn from(p: TpParams) -> Self {
        ParamsRepr {
            alpha: p.alpha,
            c: p.c,
            d: p.d.into_iter().map(|((i, j, q), v)| (i, j, q, v)).collect(),
            f: p.f,
            k: p.k,
        }
    }
}

impl TpParams {
    /// Zero entries of `c` and `d` are dropped.
    pub fn new(
        alpha: Scalar,
        c: BTreeMap<i64, Scalar>,
        d: BTreeMap<(i64, i64, i64), Scalar>,
        f: FiniteFunctional,
        k: i64,
    ) -> Self {
        Self {
            alpha,
            c: c.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            d: d.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            f,
            k,
        }
    }

    fn d_at(&self, i: i64, j: i64, q: i64) -> Scalar {
        self.d.get(&(i, j, q)).cloned().unwrap_or_default()
    }

    /// `(q, d_{i,j,q})` for the nonzero entries.
    fn d_row(&self, i: i64, j: i64) -> impl Iterator<Item = (i64, &Scalar)> {
        self.d
            .range((i, j, i64::MIN)..=(i, j, i64::MAX))
            .map(|((_, _, q), v)| (*q, v))
    }

    /// Every index occurring in a support of `f`, `c` or `d`.
    pub fn support_indices(&self) -> BTreeSet<i64> {
        let mut out: BTreeSet<i64> = self.f.support().map(|(r, _)| r).collect();
        out.extend(self.c.keys().copied());
        for (i, j, q) in self.d.keys() {
            out.extend([*i, *j, *q]);
        }
        out
    }

    /// Product of two basis symbols per the table above.
    pub fn product_basis(&self, x: BasisSymbol, y: BasisSymbol) -> Result<Element> {
        match (x.family, y.family) {
            (Family::L, Family::L) => Ok(Element::zero()),
            (Family::L, Family::M) | (Family::M, Family::L) => {
                let (l, m) = if x.is_l() { (x, y) } else { (y, x) };
                Ok(Element::term(l, &self.alpha * &self.f.at(m.index)))
            }
            (Family::M, Family::M) => {
                let mut out = Element::zero();
                let ff = &self.f.at(x.index) * &self.f.at(y.index);
                if !ff.is_zero() {
                    for (p, cp) in &self.c {
                        out.add_term(BasisSymbol::l(*p), &ff * cp);
                    }
                }
                for (q, v) in self.d_row(x.index, y.index) {
                    out.add_term(BasisSymbol::m(q), v.clone());
                }
                Ok(out)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryWitness {
    pub i: i64,
    pub j: i64,
    pub q: i64,
    /// `d_{i,j,q} - d_{j,i,q}`
    pub residual: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginalWitness {
    pub i: i64,
    pub j: i64,
    /// `Σ_q f(M_q) d_{i,j,q} - α f(M_i) f(M_j)`
    pub residual: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExchangeWitness {
    pub r: i64,
    pub s: i64,
    pub t: i64,
    pub p: i64,
    /// `Σ_q d_{r,s,q} d_{q,t,p} - Σ_q d_{s,t,q} d_{q,r,p}`
    pub residual: Scalar,
}

/// Witnesses for each of the three parameter constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TpValidationReport {
    pub symmetry: Vec<SymmetryWitness>,
    pub marginal: Vec<MarginalWitness>,
    pub exchange: Vec<ExchangeWitness>,
}

impl TpValidationReport {
    pub fn is_valid(&self) -> bool {
        self.symmetry.is_empty() && self.marginal.is_empty() && self.exchange.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.symmetry.len() + self.marginal.len() + self.exchange.len()
    }
}

/// Checks symmetry of `d`, the marginal law and the exchange law. Outside
/// the supports every term vanishes, so the finite check is complete.
pub fn validate_params(p: &TpParams) -> TpValidationReport {
    let mut report = TpValidationReport::default();

    let pairs: BTreeSet<(i64, i64, i64)> =
        p.d.keys().map(|&(i, j, q)| (i.min(j), i.max(j), q)).collect();
    for (i, j, q) in pairs {
        let residual = &p.d_at(i, j, q) - &p.d_at(j, i, q);
        if !residual.is_zero() {
            report.symmetry.push(SymmetryWitness { i, j, q, residual });
        }
    }

    let mut marginal_idx: BTreeSet<i64> = p.f.support().map(|(r, _)| r).collect();
    for (i, j, _) in p.d.keys() {
        marginal_idx.extend([*i, *j]);
    }
    for &i in &marginal_idx {
        for &j in &marginal_idx {
            let mut residual = -&(&p.alpha * &(&p.f.at(i) * &p.f.at(j)));
            for (q, v) in p.d_row(i, j) {
                residual += &(&p.f.at(q) * v);
            }
            if !residual.is_zero() {
                report.marginal.push(MarginalWitness { i, j, residual });
            }
        }
    }

    let idx: BTreeSet<i64> = p.d.keys().flat_map(|&(i, j, q)| [i, j, q]).collect();
    // (r,s,t) ↦ Σ_q d_{r,s,q} d_{q,t,·} as a map over p
    let compose = |r: i64, s: i64, t: i64| -> BTreeMap<i64, Scalar> {
        let mut acc: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (q, v) in p.d_row(r, s) {
            for (pp, w) in p.d_row(q, t) {
                *acc.entry(pp).or_default() += &(v * w);
            }
        }
        acc
    };
    for &r in &idx {
        for &s in &idx {
            for &t in &idx {
                let left = compose(r, s, t);
                let right = compose(s, t, r);
                let ps: BTreeSet<i64> = left.keys().chain(right.keys()).copied().collect();
                for pp in ps {
                    let l = left.get(&pp).cloned().unwrap_or_default();
                    let rr = right.get(&pp).cloned().unwrap_or_default();
                    let residual = &l - &rr;
                    if !residual.is_zero() {
                        report.exchange.push(ExchangeWitness { r, s, t, p: pp, residual });
                    }
                }
            }
        }
    }
    report
}

/// `d_{i,j,p} = d_p f(M_i) f(M_j)` and `α = Σ_q f(M_q) d_q`.
pub fn build_example_family(
    f: FiniteFunctional,
    d_seq: &BTreeMap<i64, Scalar>,
    c: BTreeMap<i64, Scalar>,
    k: i64,
) -> TpParams {
    let mut alpha = Scalar::zero();
    for (q, dq) in d_seq {
        alpha += &(&f.at(*q) * dq);
    }
    let mut d = BTreeMap::new();
    for (i, fi) in f.support() {
        for (j, fj) in f.support() {
            let fij = fi * fj;
            for (q, dq) in d_seq {
                d.insert((i, j, *q), &fij * dq);
            }
        }
    }
    TpParams::new(alpha, c, d, f, k)
}

/// A product whose parameters passed [`validate_params`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TpProduct {
    params: TpParams,
}

impl TpProduct {
    pub fn new(params: TpParams) -> Result<Self> {
        let report = validate_params(&params);
        if !report.is_valid() {
            return Err(Error::InvalidParams(Box::new(report)));
        }
        Ok(Self { params })
    }

    pub fn params(&self) -> &TpParams {
        &self.params
    }
}

impl BilinearProduct for TpProduct {
    fn product_basis(&self, x: BasisSymbol, y: BasisSymbol) -> Result<Element> {
        self.params.product_basis(x, y)
    }
}

pub fn tp_product(p: TpParams) -> Result<ProductDef> {
    Ok(ProductDef::TpFamily(Box::new(TpProduct::new(p)?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoissonClass {
    /// `α = 0` and `c = 0`: the ordinary Poisson law holds as well.
    PoissonAndTransposed,
    TransposedOnly,
}

pub fn classify_poisson(p: &TpParams) -> Result<PoissonClass> {
    let report = validate_params(p);
    if !report.is_valid() {
        return Err(Error::InvalidParams(Box::new(report)));
    }
    if p.alpha.is_zero() && p.c.values().all(Scalar::is_zero) {
        Ok(PoissonClass::PoissonAndTransposed)
    } else {
        Ok(PoissonClass::TransposedOnly)
    }
}

/// Hull of the parameter supports and their sums `a+b`, `a+b+k`, padded by
/// `|k|`. Contains 0 so that the zero structure still gets a window.
pub fn support_closure_window(p: &TpParams) -> Result<Window> {
    let base: Vec<i64> = p.support_indices().into_iter().chain([0]).collect();
    let mut all = base.clone();
    for &a in &base {
        for &b in &base {
            let ab = checked_index_add(a, b)?;
            all.push(ab);
            all.push(checked_index_add(ab, p.k)?);
        }
    }
    let hull = Window::hull(all).expect("nonempty");
    hull.padded(p.k.checked_abs().ok_or(Error::IndexOverflow)?)
}

/// `x ↦ z·x` for a fixed `z`.
pub struct LeftMultiplication<'a, P: BilinearProduct> {
    pub product: &'a P,
    pub by: Element,
}

impl<'a, P: BilinearProduct> LeftMultiplication<'a, P> {
    pub fn new(product: &'a P, by: Element) -> Self {
        Self { product, by }
    }
}

impl<P: BilinearProduct> LinearMap for LeftMultiplication<'_, P> {
    fn apply_basis(&self, x: BasisSymbol) -> Result<Element> {
        self.product.product(&self.by, &Element::basis(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasisSymbol as B;

    fn int(v: i64) -> Scalar {
        Scalar::from(v)
    }

    fn map(entries: &[(i64, i64)]) -> BTreeMap<i64, Scalar> {
        entries.iter().map(|(k, v)| (*k, int(*v))).collect()
    }

    fn example(alpha_override: Option<i64>) -> TpParams {
        let mut p = build_example_family(FiniteFunctional::from_ints(&[(0, 1)]), &map(&[(0, 5)]), map(&[(1, 1)]), 2);
        if let Some(a) = alpha_override {
            p.alpha = int(a);
        }
        p
    }

    #[test]
    fn zero_structure_is_valid() {
        let p = TpParams::new(Scalar::zero(), BTreeMap::new(), BTreeMap::new(), FiniteFunctional::from_ints(&[(0, 1)]), 0);
        assert!(validate_params(&p).is_valid());
        assert_eq!(classify_poisson(&p).unwrap(), PoissonClass::PoissonAndTransposed);
    }

    #[test]
    fn example_instance() {
        let p = example(None);
        assert_eq!(p.alpha, int(5));
        assert_eq!(p.d_at(0, 0, 0), int(5));
        assert!(validate_params(&p).is_valid());
        assert_eq!(classify_poisson(&p).unwrap(), PoissonClass::TransposedOnly);
    }

    #[test]
    fn wrong_alpha_breaks_the_marginal_law() {
        let report = validate_params(&example(Some(4)));
        assert_eq!(
            report.marginal,
            vec![MarginalWitness { i: 0, j: 0, residual: int(1) }]
        );
        assert!(report.symmetry.is_empty() && report.exchange.is_empty());
        assert!(matches!(tp_product(example(Some(4))), Err(Error::InvalidParams(_))));
        assert!(classify_poisson(&example(Some(4))).is_err());
    }

    #[test]
    fn example_family_with_vanishing_alpha() {
        let f = FiniteFunctional::from_ints(&[(0, 1), (2, 1)]);
        let p = build_example_family(f, &map(&[(1, 1)]), BTreeMap::new(), 0);
        assert!(p.alpha.is_zero());
        for (i, j) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
            assert_eq!(p.d_at(i, j, 1), int(1));
        }
        assert_eq!(p.d.len(), 4);
        assert!(validate_params(&p).is_valid());
        assert_eq!(classify_poisson(&p).unwrap(), PoissonClass::PoissonAndTransposed);
    }

    #[test]
    fn empty_sequence_gives_zero_family() {
        let p = build_example_family(FiniteFunctional::from_ints(&[(0, 1)]), &BTreeMap::new(), BTreeMap::new(), 0);
        assert!(p.alpha.is_zero());
        assert!(p.d.is_empty());
    }

    #[test]
    fn nonzero_c_is_transposed_only() {
        let p = TpParams::new(Scalar::zero(), map(&[(2, 1)]), BTreeMap::new(), FiniteFunctional::from_ints(&[(0, 1)]), 0);
        assert_eq!(classify_poisson(&p).unwrap(), PoissonClass::TransposedOnly);
    }

    #[test]
    fn asymmetric_and_non_exchanging_d() {
        let mut d = BTreeMap::new();
        d.insert((0, 1, 0), int(1));
        let p = TpParams::new(Scalar::zero(), BTreeMap::new(), d, FiniteFunctional::from_ints(&[(5, 1)]), 0);
        let report = validate_params(&p);
        assert_eq!(report.symmetry, vec![SymmetryWitness { i: 0, j: 1, q: 0, residual: int(1) }]);
        assert!(!report.exchange.is_empty());
    }

    #[test]
    fn product_table() {
        let prod = tp_product(example(None)).unwrap();
        assert_eq!(prod.product_basis(B::l(3), B::m(0)).unwrap(), Element::term(B::l(3), int(5)));
        assert_eq!(prod.product_basis(B::m(0), B::l(3)).unwrap(), Element::term(B::l(3), int(5)));
        assert!(prod.product_basis(B::l(2), B::l(7)).unwrap().is_zero());
        assert_eq!(
            prod.product_basis(B::m(0), B::m(0)).unwrap(),
            Element::from_terms([(B::l(1), int(1)), (B::m(0), int(5))])
        );
        assert!(prod.product_basis(B::m(1), B::m(0)).unwrap().is_zero());
    }

    #[test]
    fn closure_window_of_example() {
        assert_eq!(support_closure_window(&example(None)).unwrap(), Window::new(-2, 6).unwrap());
    }

    #[test]
    fn left_multiplication() {
        let prod = tp_product(example(None)).unwrap();
        let op = LeftMultiplication::new(&prod, Element::basis(B::m(0)));
        assert_eq!(op.apply_basis(B::l(4)).unwrap(), Element::term(B::l(4), int(5)));
    }
}
