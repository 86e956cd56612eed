//! Acceptance gate: one line per criterion, exact comparisons throughout.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use translie_cli::{parse_config, run};
use translie_core::derivations::{
    assemble_system, forward_check_family, random_family_members, solve_and_classify, tp_triviality_solver,
};
use translie_core::lab::{
    check_algebra_morphism, check_commutative_associative, check_derivation, check_fundamental_identity,
    check_involution, check_one_third_derivation, check_poisson_compatibility, check_relabel_intertwining,
    check_skew_symmetry, check_tp_compatibility, generator_closure, CheckReport, Sampling,
};
use translie_core::tp::{
    build_example_family, classify_poisson, support_closure_window, tp_product, validate_params,
    LeftMultiplication,
};
use translie_core::{
    Ansatz, BasisSymbol, BilinearProduct, BracketDef, Element, FiniteFunctional, LinearOperator, PoissonClass,
    ProductDef, Scalar, TernaryBracket, TpParams, Window,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Box<dyn Fn() -> Outcome>);

const SEED: u64 = 20_240_917;

fn win(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).unwrap()
}

fn int_map(entries: &[(i64, i64)]) -> BTreeMap<i64, Scalar> {
    entries.iter().map(|(k, v)| (*k, Scalar::from(*v))).collect()
}

fn require(report: &CheckReport, what: &str) -> Result<u64, String> {
    if report.passed() {
        Ok(report.cases_run)
    } else {
        Err(format!(
            "{what}: {} violations, first {:?}",
            report.violation_count,
            report.violations.first()
        ))
    }
}

fn err(e: translie_core::Error) -> String {
    e.to_string()
}

fn three_lie_suite(b: &BracketDef, name: &str) -> Result<u64, String> {
    let mut cases = require(&check_skew_symmetry(b, win(-4, 4)).map_err(err)?, &format!("{name} skew"))?;
    cases += require(
        &check_fundamental_identity(b, win(-2, 2), Sampling::exhaustive()).map_err(err)?,
        &format!("{name} identity exhaustive"),
    )?;
    let random = Sampling::Randomized {
        samples: 10_000,
        seed: SEED,
    };
    cases += require(
        &check_fundamental_identity(b, win(-20, 20), random).map_err(err)?,
        &format!("{name} identity randomized"),
    )?;
    Ok(cases)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cases = three_lie_suite(&BracketDef::AOmegaDelta, "A_omega^delta")?;
    let took = start.elapsed();
    if took > Duration::from_secs(60) {
        return Err(format!("took {took:?}, target is under 60 s"));
    }
    Ok(format!("{cases} cases, 0 violations, {:.1} s", took.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    for (k, f) in [(0, vec![(0, 1)]), (2, vec![(0, 1)]), (-1, vec![(0, 1), (1, 2)])] {
        let b = BracketDef::afk(k, FiniteFunctional::from_ints(&f)).map_err(err)?;
        total += three_lie_suite(&b, &format!("A_f,k k={k}"))?;
    }
    Ok(format!("3 parameter sets, {total} cases, 0 violations"))
}

fn criterion_3() -> Outcome {
    let cases = require(&check_relabel_intertwining(win(-5, 5)).map_err(err)?, "relabeling")?;
    Ok(format!("{cases} triples, 0 violations"))
}

fn criterion_4() -> Outcome {
    let w = win(-5, 5);
    let mut cases = require(&check_derivation(&LinearOperator::Delta, w).map_err(err)?, "delta")?;
    for k in -3..=3 {
        cases += require(
            &check_derivation(&LinearOperator::DSubK(k), w).map_err(err)?,
            &format!("d_{k}"),
        )?;
    }
    cases += require(&check_involution(&LinearOperator::Omega, w).map_err(err)?, "omega involution")?;
    cases += require(
        &check_algebra_morphism(&LinearOperator::Omega, &ProductDef::AlgebraA, w).map_err(err)?,
        "omega morphism",
    )?;
    Ok(format!("{cases} cases, 0 violations"))
}

fn criterion_5() -> Outcome {
    let mut cases = 0;
    for k in -4..=4 {
        cases += require(
            &forward_check_family(&BracketDef::AOmegaDelta, &LinearOperator::DCapK(k), win(-8, 8)).map_err(err)?,
            &format!("D_{k}"),
        )?;
    }
    Ok(format!("D_-4..D_4, {cases} triples, 0 violations"))
}

fn criterion_6() -> Outcome {
    for g in -3..=3 {
        let ansatz = Ansatz::graded(g, win(-10, 10));
        let v = solve_and_classify(&BracketDef::AOmegaDelta, &ansatz, win(-10, 10), win(-5, 5)).map_err(err)?;
        if !v.matches || v.core_dimension != 1 {
            return Err(format!(
                "degree {g}: core dimension {}, offending {:?}",
                v.core_dimension, v.offending_vectors
            ));
        }
    }
    Ok("core dimension 1 with the D_g pattern for every g in [-3,3]".into())
}

fn criterion_7() -> Outcome {
    let space = tp_triviality_solver(win(-3, 3), win(-3, 3)).map_err(err)?;
    if space.dim() != 0 {
        return Err(format!("dimension {}", space.dim()));
    }
    Ok(format!("{} unknowns, dimension 0", space.unknowns.len()))
}

fn criterion_8() -> Outcome {
    let f = FiniteFunctional::from_ints(&[(0, 1), (1, 2)]);
    let b = BracketDef::afk(1, f.clone()).map_err(err)?;
    let ansatz = Ansatz::full_window(win(-4, 4), win(-4, 4));
    let v = solve_and_classify(&b, &ansatz, win(-4, 4), win(-2, 2)).map_err(err)?;
    if !v.offending_vectors.is_empty() {
        return Err(format!("offending {:?}", v.offending_vectors));
    }
    if !v.matches {
        return Err(format!(
            "core dimension {} vs expected {}",
            v.core_dimension, v.expected_dimension
        ));
    }
    let sys = assemble_system(&b, &ansatz, win(-4, 4)).map_err(err)?;
    for (n, member) in random_family_members(&f, win(-4, 4), win(-4, 4), 5, SEED).iter().enumerate() {
        let coords = ansatz.coordinates_of(&sys, member).map_err(err)?;
        if !sys.is_satisfied_by(&coords) {
            return Err(format!("family member {n} violates an assembled row"));
        }
    }
    Ok(format!(
        "{} basis vectors fit the shape, 5 family members satisfy all {} rows",
        v.core_dimension,
        sys.row_count()
    ))
}

fn example_params() -> TpParams {
    build_example_family(FiniteFunctional::from_ints(&[(0, 1)]), &int_map(&[(0, 5)]), int_map(&[(1, 1)]), 2)
}

fn criterion_9() -> Outcome {
    let params = example_params();
    if params.alpha != Scalar::from(5) {
        return Err(format!("alpha = {}", params.alpha));
    }
    let report = validate_params(&params);
    if !report.is_valid() {
        return Err(format!("validation: {report:?}"));
    }
    let b = BracketDef::afk(2, params.f.clone()).map_err(err)?;
    let closure = support_closure_window(&params).map_err(err)?;
    let product = tp_product(params.clone()).map_err(err)?;
    let full = Sampling::exhaustive();
    require(
        &check_commutative_associative(&product, closure, full).map_err(err)?,
        "commutative-associative",
    )?;
    require(&check_tp_compatibility(&b, &product, closure, full).map_err(err)?, "transposed Leibniz")?;
    let random = Sampling::Randomized { samples: 1000, seed: SEED };
    require(
        &check_tp_compatibility(&b, &product, win(-20, 20), random).map_err(err)?,
        "transposed Leibniz randomized",
    )?;
    if classify_poisson(&params).map_err(err)? != PoissonClass::TransposedOnly {
        return Err("expected the transposed-only class".into());
    }
    let poisson = check_poisson_compatibility(&b, &product, closure, full).map_err(err)?;
    let witness = poisson.violations.first().ok_or("no Poisson violation found")?;
    let [x, y, u, v] = [0, 1, 2, 3].map(|i| Element::basis(witness.inputs[i]));
    let lhs = b.bracket(&x, &y, &product.product(&u, &v).map_err(err)?).map_err(err)?;
    let rhs = &product.product(&u, &b.bracket(&x, &y, &v).map_err(err)?).map_err(err)?
        + &product.product(&b.bracket(&x, &y, &u).map_err(err)?, &v).map_err(err)?;
    if lhs == rhs {
        return Err("reported Poisson witness does not reproduce".into());
    }

    // α = 0, c = 0 variants: the zero d and d_{i,j,1} = 5 f(M_i) f(M_j).
    for d_seq in [int_map(&[]), int_map(&[(1, 5)])] {
        let p = build_example_family(FiniteFunctional::from_ints(&[(0, 1)]), &d_seq, BTreeMap::new(), 2);
        if classify_poisson(&p).map_err(err)? != PoissonClass::PoissonAndTransposed {
            return Err("alpha = 0 variant misclassified".into());
        }
        let w = support_closure_window(&p).map_err(err)?;
        let prod = tp_product(p).map_err(err)?;
        require(&check_poisson_compatibility(&b, &prod, w, full).map_err(err)?, "Poisson law, alpha = 0")?;
    }
    let names: Vec<String> = witness.inputs.iter().map(BasisSymbol::to_string).collect();
    Ok(format!(
        "alpha = 5, closure window {closure}, Poisson witness ({}), alpha = 0 variants pass",
        names.join(", ")
    ))
}

fn criterion_10() -> Outcome {
    let params = example_params();
    let b = BracketDef::afk(2, params.f.clone()).map_err(err)?;
    let product = tp_product(params).map_err(err)?;
    let mut cases = 0;
    for z in [BasisSymbol::l(0), BasisSymbol::m(0), BasisSymbol::m(2)] {
        let op = LeftMultiplication::new(&product, Element::basis(z));
        cases += require(
            &check_one_third_derivation(&b, &op, win(-6, 6), Sampling::exhaustive()).map_err(err)?,
            &format!("left multiplication by {z}"),
        )?;
    }
    Ok(format!("L_0, M_0, M_2: {cases} triples, 0 violations"))
}

fn criterion_11() -> Outcome {
    let b = BracketDef::AOmegaDelta;
    let all: Vec<Element> = [-1, 0, 1]
        .into_iter()
        .flat_map(|r| [BasisSymbol::l(r), BasisSymbol::m(r)])
        .map(Element::basis)
        .collect();
    let out = generator_closure(&b, &all, win(-10, 10), 12).map_err(err)?;
    if !out.spanned || out.rounds_used > 12 {
        return Err(format!("missing {:?}", out.missing));
    }
    let only_l: Vec<Element> = [-1, 0, 1].into_iter().map(|r| Element::basis(BasisSymbol::l(r))).collect();
    let weak = generator_closure(&b, &only_l, win(-10, 10), 12).map_err(err)?;
    if weak.spanned || !(-10..=10).all(|r| weak.missing.contains(&BasisSymbol::m(r))) {
        return Err("dropping the M generators did not report every M symbol".into());
    }
    Ok(format!(
        "spanned in {} rounds; without M generators {} symbols missing",
        out.rounds_used,
        weak.missing.len()
    ))
}

fn run_all_configs() -> Result<Vec<(String, String)>, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let config = parse_config(&text).map_err(|e| e.to_string())?;
        let report = run(&config).map_err(|e| e.to_string())?;
        out.push((path.file_name().unwrap().to_string_lossy().into_owned(), report.to_json()));
    }
    Ok(out)
}

fn criterion_12(started: Instant) -> Outcome {
    let first = run_all_configs()?;
    let second = run_all_configs()?;
    for ((name, a), (_, b)) in first.iter().zip(&second) {
        if a != b {
            return Err(format!("{name}: reports differ between runs"));
        }
    }
    let took = started.elapsed();
    if took > Duration::from_secs(300) {
        return Err(format!("suite took {took:?}"));
    }
    Ok(format!(
        "{} reports byte-identical across two runs, suite {:.1} s",
        first.len(),
        took.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let criteria: Vec<Criterion> = vec![
        (1, "3-Lie axioms for A_omega^delta", Box::new(criterion_1)),
        (2, "3-Lie axioms for A_f,k", Box::new(criterion_2)),
        (3, "relabeling intertwines the brackets", Box::new(criterion_3)),
        (4, "operator laws on A", Box::new(criterion_4)),
        (5, "D_k are one-third derivations", Box::new(criterion_5)),
        (6, "graded one-third derivation solver", Box::new(criterion_6)),
        (7, "only the zero TP product on A_omega^delta", Box::new(criterion_7)),
        (8, "one-third derivations of A_f,k", Box::new(criterion_8)),
        (9, "TP structure family and Poisson dichotomy", Box::new(criterion_9)),
        (10, "left multiplications are one-third derivations", Box::new(criterion_10)),
        (11, "finite generation", Box::new(criterion_11)),
        (12, "deterministic reports", Box::new(move || criterion_12(started))),
    ];
    let mut failed = 0;
    for (n, title, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {n:>2} PASS  {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {title}: {detail}");
            }
        }
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
