//! Law checkers. Each one quantifies an identity over basis tuples drawn from a
//! window, either exhaustively or by seeded random sampling, and records
//! exact residuals for every failing case.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    relabel_m_negation, BilinearProduct, BracketDef, LinearMap, ProductDef, TernaryBracket,
};
use crate::element::{BasisSymbol, Element, Family};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::scalar::Scalar;
use crate::window::Window;

/// Cap on exhaustively evaluated instances unless the caller says otherwise.
pub const DEFAULT_BUDGET: u64 = 2_000_000;
/// Default number of random samples.
pub const DEFAULT_SAMPLES: u64 = 10_000;
/// At most this many violations are stored per report; all are counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 64;

/// Index range used for randomized sampling unless configured otherwise.
pub fn default_random_range() -> Window {
    Window::symmetric(20)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    FundamentalIdentity,
    SkewSymmetry,
    OneThirdDerivation,
    Leibniz,
    TransposedLeibniz,
    PoissonLeibniz,
    CommutativeAssociative,
    Involution,
    AlgebraMorphism,
    RelabelIntertwining,
}

impl Law {
    pub fn id(&self) -> &'static str {
        match self {
            Law::FundamentalIdentity => "fundamental-identity",
            Law::SkewSymmetry => "skew-symmetry",
            Law::OneThirdDerivation => "one-third-derivation",
            Law::Leibniz => "leibniz",
            Law::TransposedLeibniz => "transposed-leibniz",
            Law::PoissonLeibniz => "poisson-leibniz",
            Law::CommutativeAssociative => "commutative-associative",
            Law::Involution => "involution",
            Law::AlgebraMorphism => "algebra-morphism",
            Law::RelabelIntertwining => "relabel-intertwining",
        }
    }

    /// The identity being checked, written out.
    pub fn formula(&self) -> &'static str {
        match self {
            Law::FundamentalIdentity => {
                "[x,y,[u,v,w]] = [[x,y,u],v,w] + [u,[x,y,v],w] + [u,v,[x,y,w]]"
            }
            Law::SkewSymmetry => "[x,y,z] changes sign under every transposition",
            Law::OneThirdDerivation => "phi([x,y,z]) = 1/3([phi x,y,z] + [x,phi y,z] + [x,y,phi z])",
            Law::Leibniz => "op(xy) = op(x)y + x op(y)",
            Law::TransposedLeibniz => "3u[x,y,z] = [xu,y,z] + [x,yu,z] + [x,y,zu]",
            Law::PoissonLeibniz => "[x,y,uv] = u[x,y,v] + [x,y,u]v",
            Law::CommutativeAssociative => "xy = yx and (xy)z = x(yz)",
            Law::Involution => "op(op(x)) = x",
            Law::AlgebraMorphism => "op(xy) = op(x)op(y)",
            Law::RelabelIntertwining => "relabel([x,y,z]_omega) = [relabel x, relabel y, relabel z]",
        }
    }
}

/// How a checker quantifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Every tuple over the window; refuses if there are more than `budget`.
    Exhaustive { budget: u64 },
    /// `samples` uniform tuples over the window, reproducible from `seed`.
    Randomized { samples: u64, seed: u64 },
}

impl Sampling {
    pub fn exhaustive() -> Self {
        Sampling::Exhaustive { budget: DEFAULT_BUDGET }
    }

    pub fn randomized(seed: u64) -> Self {
        Sampling::Randomized { samples: DEFAULT_SAMPLES, seed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub inputs: Vec<BasisSymbol>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    pub lhs: Element,
    pub rhs: Element,
    pub residual: Element,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub law: Law,
    pub mode: Mode,
    pub window: Window,
    pub cases_run: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// One comparison produced for a tuple.
struct Case {
    tag: Option<&'static str>,
    lhs: Element,
    rhs: Element,
}

impl Case {
    fn new(lhs: Element, rhs: Element) -> Self {
        Self { tag: None, lhs, rhs }
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    count: u64,
    kept: Vec<Violation>,
}

impl Tally {
    fn record(&mut self, inputs: &[BasisSymbol], cases: Vec<Case>) {
        for case in cases {
            self.cases += 1;
            let residual = &case.lhs - &case.rhs;
            if residual.is_zero() {
                continue;
            }
            self.count += 1;
            if self.kept.len() < MAX_RECORDED_VIOLATIONS {
                self.kept.push(Violation {
                    inputs: inputs.to_vec(),
                    case: case.tag.map(str::to_owned),
                    lhs: case.lhs,
                    rhs: case.rhs,
                    residual,
                });
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.count += other.count;
        let room = MAX_RECORDED_VIOLATIONS.saturating_sub(self.kept.len());
        self.kept.extend(other.kept.into_iter().take(room));
        self
    }
}

fn random_symbol(rng: &mut ChaCha8Rng, w: &Window) -> BasisSymbol {
    let family = if rng.gen_bool(0.5) { Family::L } else { Family::M };
    BasisSymbol::new(family, rng.gen_range(w.lo()..=w.hi()))
}

/// Drives `eval` over `arity`-tuples of basis symbols. An empty case list
/// means the tuple was skipped.
fn run_tuples<F>(law: Law, arity: u32, w: Window, sampling: Sampling, eval: F) -> Result<CheckReport>
where
    F: Fn(&[BasisSymbol]) -> Result<Vec<Case>> + Sync,
{
    let (tally, mode, seed) = match sampling {
        Sampling::Exhaustive { budget } => {
            let symbols = w.symbols();
            let n = symbols.len() as u128;
            let needed = n.pow(arity);
            if needed > budget as u128 {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let n = n as u64;
            let tally = (0..needed as u64)
                .into_par_iter()
                .try_fold(Tally::default, |mut tally, code| {
                    let mut rest = code;
                    let mut inputs = vec![symbols[0]; arity as usize];
                    for slot in inputs.iter_mut().rev() {
                        *slot = symbols[(rest % n) as usize];
                        rest /= n;
                    }
                    let cases = eval(&inputs)?;
                    tally.record(&inputs, cases);
                    Ok::<_, Error>(tally)
                })
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
            (tally, Mode::Exhaustive, None)
        }
        Sampling::Randomized { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tuples: Vec<Vec<BasisSymbol>> = (0..samples)
                .map(|_| (0..arity).map(|_| random_symbol(&mut rng, &w)).collect())
                .collect();
            let mut tally = tuples
                .par_iter()
                .try_fold(Tally::default, |mut tally, inputs| {
                    let cases = eval(inputs)?;
                    tally.record(inputs, cases);
                    Ok::<_, Error>(tally)
                })
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
            tally.kept.sort_by(|a, b| a.inputs.cmp(&b.inputs));
            (tally, Mode::Randomized, Some(seed))
        }
    };
    Ok(CheckReport {
        law,
        mode,
        window: w,
        cases_run: tally.cases,
        violation_count: tally.count,
        violations: tally.kept,
        seed,
    })
}

fn basis(s: BasisSymbol) -> Element {
    Element::basis(s)
}

/// `[x,y,[u,v,w]] = [[x,y,u],v,w] + [u,[x,y,v],w] + [u,v,[x,y,w]]` on 5-tuples.
pub fn check_fundamental_identity(
    b: &impl TernaryBracket,
    w: Window,
    sampling: Sampling,
) -> Result<CheckReport> {
    run_tuples(Law::FundamentalIdentity, 5, w, sampling, |t| {
        let [x, y, u, v, z] = [t[0], t[1], t[2], t[3], t[4]].map(basis);
        let lhs = b.bracket(&x, &y, &b.bracket(&u, &v, &z)?)?;
        let mut rhs = b.bracket(&b.bracket(&x, &y, &u)?, &v, &z)?;
        rhs = &rhs + &b.bracket(&u, &b.bracket(&x, &y, &v)?, &z)?;
        rhs = &rhs + &b.bracket(&u, &v, &b.bracket(&x, &y, &z)?)?;
        Ok(vec![Case::new(lhs, rhs)])
    })
}

/// Every transposition of the arguments negates the bracket, on all basis
/// triples of the window.
pub fn check_skew_symmetry(b: &impl TernaryBracket, w: Window) -> Result<CheckReport> {
    let sampling = Sampling::exhaustive();
    run_tuples(Law::SkewSymmetry, 3, w, sampling, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let base = b.bracket_basis(x, y, z)?;
        let neg = -&base;
        Ok(vec![
            Case {
                tag: Some("swap 1,2"),
                lhs: b.bracket_basis(y, x, z)?,
                rhs: neg.clone(),
            },
            Case {
                tag: Some("swap 2,3"),
                lhs: b.bracket_basis(x, z, y)?,
                rhs: neg.clone(),
            },
            Case {
                tag: Some("swap 1,3"),
                lhs: b.bracket_basis(z, y, x)?,
                rhs: neg,
            },
        ])
    })
}

fn one_third_case(
    b: &impl TernaryBracket,
    op: &impl LinearMap,
    t: &[BasisSymbol],
) -> Result<Vec<Case>> {
    let [x, y, z] = [t[0], t[1], t[2]].map(basis);
    let lhs = op.apply(&b.bracket(&x, &y, &z)?)?;
    let mut sum = b.bracket(&op.apply(&x)?, &y, &z)?;
    sum = &sum + &b.bracket(&x, &op.apply(&y)?, &z)?;
    sum = &sum + &b.bracket(&x, &y, &op.apply(&z)?)?;
    let third = Scalar::ratio(1, 3).expect("nonzero denominator");
    Ok(vec![Case::new(lhs, sum.scaled(&third))])
}

/// `φ([x,y,z]) = ⅓([φx,y,z] + [x,φy,z] + [x,y,φz])` on basis triples.
pub fn check_one_third_derivation(
    b: &impl TernaryBracket,
    op: &impl LinearMap,
    w: Window,
    sampling: Sampling,
) -> Result<CheckReport> {
    run_tuples(Law::OneThirdDerivation, 3, w, sampling, |t| one_third_case(b, op, t))
}

/// As [`check_one_third_derivation`], but triples on which `op` is undefined
/// (a `DomainError`) are skipped instead of aborting the run.
pub fn check_one_third_derivation_where_defined(
    b: &impl TernaryBracket,
    op: &impl LinearMap,
    w: Window,
    sampling: Sampling,
) -> Result<CheckReport> {
    run_tuples(Law::OneThirdDerivation, 3, w, sampling, |t| {
        match one_third_case(b, op, t) {
            Err(Error::DomainError(_)) => Ok(Vec::new()),
            other => other,
        }
    })
}

/// Leibniz rule of `op` with respect to `p` on basis pairs.
pub fn check_leibniz(p: &impl BilinearProduct, op: &impl LinearMap, w: Window) -> Result<CheckReport> {
    run_tuples(Law::Leibniz, 2, w, Sampling::exhaustive(), |t| {
        let [x, y] = [t[0], t[1]].map(basis);
        let lhs = op.apply(&p.product(&x, &y)?)?;
        let rhs = &p.product(&op.apply(&x)?, &y)? + &p.product(&x, &op.apply(&y)?)?;
        Ok(vec![Case::new(lhs, rhs)])
    })
}

/// Leibniz rule in the algebra `A`.
pub fn check_derivation(op: &impl LinearMap, w: Window) -> Result<CheckReport> {
    check_leibniz(&ProductDef::AlgebraA, op, w)
}

/// `3u[x,y,z] = [xu,y,z] + [x,yu,z] + [x,y,zu]` on 4-tuples `(u,x,y,z)`.
pub fn check_tp_compatibility(
    b: &impl TernaryBracket,
    p: &impl BilinearProduct,
    w: Window,
    sampling: Sampling,
) -> Result<CheckReport> {
    run_tuples(Law::TransposedLeibniz, 4, w, sampling, |t| {
        let [u, x, y, z] = [t[0], t[1], t[2], t[3]].map(basis);
        let lhs = p.product(&u, &b.bracket(&x, &y, &z)?)?.scaled(&Scalar::from(3));
        let mut rhs = b.bracket(&p.product(&x, &u)?, &y, &z)?;
        rhs = &rhs + &b.bracket(&x, &p.product(&y, &u)?, &z)?;
        rhs = &rhs + &b.bracket(&x, &y, &p.product(&z, &u)?)?;
        Ok(vec![Case::new(lhs, rhs)])
    })
}

/// `[x,y,uv] = u[x,y,v] + [x,y,u]v` on 4-tuples `(x,y,u,v)`.
pub fn check_poisson_compatibility(
    b: &impl TernaryBracket,
    p: &impl BilinearProduct,
    w: Window,
    sampling: Sampling,
) -> Result<CheckReport> {
    run_tuples(Law::PoissonLeibniz, 4, w, sampling, |t| {
        let [x, y, u, v] = [t[0], t[1], t[2], t[3]].map(basis);
        let lhs = b.bracket(&x, &y, &p.product(&u, &v)?)?;
        let rhs = &p.product(&u, &b.bracket(&x, &y, &v)?)?
            + &p.product(&b.bracket(&x, &y, &u)?, &v)?;
        Ok(vec![Case::new(lhs, rhs)])
    })
}

/// Commutativity on the first two entries and associativity on each triple.
pub fn check_commutative_associative(
    p: &impl BilinearProduct,
    w: Window,
    sampling: Sampling,
) -> Result<CheckReport> {
    run_tuples(Law::CommutativeAssociative, 3, w, sampling, |t| {
        let [x, y, z] = [t[0], t[1], t[2]].map(basis);
        let xy = p.product(&x, &y)?;
        let mut cases = Vec::with_capacity(2);
        // Pairs are visited once per third entry; only test them once.
        if matches!(sampling, Sampling::Randomized { .. }) || t[2] == w.symbols()[0] {
            cases.push(Case {
                tag: Some("commutativity"),
                lhs: xy.clone(),
                rhs: p.product(&y, &x)?,
            });
        }
        cases.push(Case {
            tag: Some("associativity"),
            lhs: p.product(&xy, &z)?,
            rhs: p.product(&x, &p.product(&y, &z)?)?,
        });
        Ok(cases)
    })
}

/// `op(op(x)) = x` on basis symbols.
pub fn check_involution(op: &impl LinearMap, w: Window) -> Result<CheckReport> {
    run_tuples(Law::Involution, 1, w, Sampling::exhaustive(), |t| {
        let x = basis(t[0]);
        Ok(vec![Case::new(op.apply(&op.apply(&x)?)?, x)])
    })
}

/// `op(xy) = op(x)op(y)` on basis pairs.
pub fn check_algebra_morphism(
    op: &impl LinearMap,
    p: &impl BilinearProduct,
    w: Window,
) -> Result<CheckReport> {
    run_tuples(Law::AlgebraMorphism, 2, w, Sampling::exhaustive(), |t| {
        let [x, y] = [t[0], t[1]].map(basis);
        let lhs = op.apply(&p.product(&x, &y)?)?;
        let rhs = p.product(&op.apply(&x)?, &op.apply(&y)?)?;
        Ok(vec![Case::new(lhs, rhs)])
    })
}

/// The `M_r ↦ M_{-r}` relabeling carries the ω-form bracket onto the
/// `A_ω^δ` bracket, on basis triples.
pub fn check_relabel_intertwining(w: Window) -> Result<CheckReport> {
    let omega = BracketDef::OmegaForm;
    let target = BracketDef::AOmegaDelta;
    run_tuples(Law::RelabelIntertwining, 3, w, Sampling::exhaustive(), |t| {
        let [x, y, z] = [t[0], t[1], t[2]].map(basis);
        let lhs = relabel_m_negation(&omega.bracket(&x, &y, &z)?)?;
        let rhs = target.bracket(
            &relabel_m_negation(&x)?,
            &relabel_m_negation(&y)?,
            &relabel_m_negation(&z)?,
        )?;
        Ok(vec![Case::new(lhs, rhs)])
    })
}

/// Outcome of [`generator_closure`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureOutcome {
    pub spanned: bool,
    pub rounds_used: u32,
    pub missing: Vec<BasisSymbol>,
    pub span_dim: usize,
}

/// Closes `gens` under the bracket, margin defaulting to the window width.
pub fn generator_closure(
    b: &impl TernaryBracket,
    gens: &[Element],
    w: Window,
    max_rounds: u32,
) -> Result<ClosureOutcome> {
    generator_closure_with_margin(b, gens, w, max_rounds, w.width() as i64)
}

/// Repeatedly adds brackets of already obtained elements to the span of
/// `gens`. Elements whose support leaves `w` padded by `margin` are
/// dropped. Stops once every basis symbol of `w` lies in the span, or when a
/// round adds nothing new; running out of rounds before either is an error.
pub fn generator_closure_with_margin(
    b: &impl TernaryBracket,
    gens: &[Element],
    w: Window,
    max_rounds: u32,
    margin: i64,
) -> Result<ClosureOutcome> {
    if gens.is_empty() {
        return Err(Error::DomainError("generator list is empty".into()));
    }
    let outer = w.padded(margin)?;
    let columns: HashMap<BasisSymbol, usize> = outer
        .symbols()
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let to_row = |e: &Element| -> Option<SparseRow> {
        e.iter()
            .map(|(s, c)| columns.get(s).map(|col| (*col, c.clone())))
            .collect()
    };

    let mut span = Echelon::new();
    let mut elems: Vec<Element> = Vec::new();
    for g in gens {
        if let Some(row) = to_row(g) {
            if span.insert(&row) {
                elems.push(g.clone());
            }
        }
    }

    let missing = |span: &Echelon| -> Vec<BasisSymbol> {
        w.symbols()
            .into_iter()
            .filter(|s| !span.is_in_span(&SparseRow::from([(columns[s], Scalar::one())])))
            .collect()
    };

    let mut fresh_from = 0;
    for round in 1..=max_rounds {
        if missing(&span).is_empty() {
            return Ok(ClosureOutcome {
                spanned: true,
                rounds_used: round - 1,
                missing: Vec::new(),
                span_dim: span.rank(),
            });
        }
        let n = elems.len();
        // Unordered triples i < j < l with at least one element from the
        // previous round; alternation makes the rest redundant.
        let triples: Vec<(usize, usize, usize)> = (fresh_from.max(2)..n)
            .flat_map(|l| (1..l).flat_map(move |j| (0..j).map(move |i| (i, j, l))))
            .collect();
        let produced: Vec<Element> = triples
            .par_iter()
            .map(|&(i, j, l)| b.bracket(&elems[i], &elems[j], &elems[l]))
            .collect::<Result<_>>()?;
        for e in produced {
            if e.is_zero() {
                continue;
            }
            if let Some(row) = to_row(&e) {
                if span.insert(&row) {
                    elems.push(e);
                }
            }
        }
        if elems.len() == n {
            let missing = missing(&span);
            return Ok(ClosureOutcome {
                spanned: missing.is_empty(),
                rounds_used: round,
                missing,
                span_dim: span.rank(),
            });
        }
        fresh_from = n;
    }
    let left = missing(&span);
    if left.is_empty() {
        return Ok(ClosureOutcome {
            spanned: true,
            rounds_used: max_rounds,
            missing: left,
            span_dim: span.rank(),
        });
    }
    Err(Error::BudgetExceeded {
        needed: max_rounds as u128 + 1,
        budget: max_rounds as u64,
    })
}
