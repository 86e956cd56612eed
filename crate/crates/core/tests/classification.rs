use translie_core::derivations::{
    assemble_system, forward_check_family, random_family_members, solve_and_classify, tp_triviality_solver,
};
use translie_core::lab::{check_one_third_derivation_where_defined, Sampling};
use translie_core::linalg::{nullspace, project_solution};
use translie_core::{Ansatz, BracketDef, FiniteFunctional, LinearOperator, UnknownId, Window};

fn win(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).unwrap()
}

#[test]
fn graded_solutions_are_multiples_of_shifts() {
    for g in -3..=3 {
        let ansatz = Ansatz::graded(g, win(-10, 10));
        let v = solve_and_classify(&BracketDef::AOmegaDelta, &ansatz, win(-10, 10), win(-5, 5)).unwrap();
        assert!(v.matches, "degree {g}: {:?}", v.offending_vectors);
        assert_eq!(v.core_dimension, 1);
        let a0 = v.core_space.value(0, &UnknownId::new("a", &[0])).unwrap();
        assert!(a0.is_one());
    }
}

#[test]
fn shifts_pass_forward_check() {
    for k in [-3, 0, 4] {
        let r = forward_check_family(&BracketDef::AOmegaDelta, &LinearOperator::DCapK(k), win(-4, 4)).unwrap();
        assert!(r.passed(), "D_{k}");
    }
}

#[test]
fn full_window_shape() {
    let f = FiniteFunctional::from_ints(&[(0, 1), (1, 2)]);
    let b = BracketDef::afk(1, f.clone()).unwrap();
    let ansatz = Ansatz::full_window(win(-4, 4), win(-4, 4));
    let v = solve_and_classify(&b, &ansatz, win(-4, 4), win(-2, 2)).unwrap();
    assert!(v.offending_vectors.is_empty(), "{:?}", v.offending_vectors);
    assert_eq!(v.core_dimension, v.expected_dimension);
    assert!(v.matches);

    let sys = assemble_system(&b, &ansatz, win(-4, 4)).unwrap();
    for member in random_family_members(&f, win(-4, 4), win(-4, 4), 5, 11) {
        let coords = ansatz.coordinates_of(&sys, &member).unwrap();
        assert!(sys.is_satisfied_by(&coords));
        assert!(forward_check_family(&b, &member, win(-3, 3)).unwrap().passed());
    }
}

#[test]
fn core_solutions_are_one_third_derivations() {
    let f = FiniteFunctional::from_ints(&[(0, 1)]);
    let b = BracketDef::afk(0, f).unwrap();
    let ansatz = Ansatz::full_window(win(-3, 3), win(-3, 3));
    let v = solve_and_classify(&b, &ansatz, win(-3, 3), win(-1, 1)).unwrap();
    assert!(v.matches, "{v:?}");
    for vec in &v.core_space.basis {
        let op = ansatz.materialize(&v.core_space, vec).unwrap();
        let r = check_one_third_derivation_where_defined(&b, &op, win(-1, 1), Sampling::exhaustive()).unwrap();
        assert!(r.passed());
    }
}

#[test]
fn larger_equation_window_never_adds_solutions() {
    let ansatz = Ansatz::graded(1, win(-6, 6));
    let core = ansatz.unknowns_over(win(-2, 2));
    let mut last = usize::MAX;
    for h in [2, 4, 6] {
        let sys = assemble_system(&BracketDef::AOmegaDelta, &ansatz, win(-h, h)).unwrap();
        let dim = project_solution(&nullspace(&sys), &core).unwrap().dim();
        assert!(dim <= last);
        last = dim;
    }
    assert_eq!(last, 1);
}

#[test]
fn only_zero_product_on_square_windows() {
    for r in 0..=5 {
        assert_eq!(tp_triviality_solver(Window::symmetric(r), Window::symmetric(r)).unwrap().dim(), 0);
    }
}
