use csx_core::lower::{ConstraintModel, FlatExpr, Sort};
use csx_core::solver::{
    all_solutions, check_sat, evaluate, optimize, Assignment, Budget, DomainBox, Scalar, Status,
};
use csx_core::syntax::{BinaryOp, Sense, UnaryOp};

fn v(n: &str) -> FlatExpr {
    FlatExpr::var(n)
}

fn i(x: i64) -> FlatExpr {
    FlatExpr::Int(x)
}

fn bin(op: BinaryOp, l: FlatExpr, r: FlatExpr) -> FlatExpr {
    FlatExpr::binary(op, l, r)
}

fn model(vars: &[(&str, Sort)], constraints: Vec<FlatExpr>) -> ConstraintModel {
    let mut m = ConstraintModel::default();
    for (n, s) in vars {
        m.declare(n.to_string(), *s);
    }
    m.constraints = constraints;
    m
}

fn int(a: &Assignment, n: &str) -> i64 {
    match a[n] {
        Scalar::Int(x) => x,
        Scalar::Bool(_) => panic!("{n} is boolean"),
    }
}

fn tiny_trim() -> ConstraintModel {
    use BinaryOp::*;
    model(
        &[
            ("a_w", Sort::Int),
            ("a_h", Sort::Int),
            ("b_w", Sort::Int),
            ("b_h", Sort::Int),
            ("c_t", Sort::Int),
        ],
        vec![
            bin(Gt, v("a_w"), i(0)),
            bin(Gt, v("a_h"), i(0)),
            bin(Gt, v("b_w"), i(0)),
            bin(Gt, v("b_h"), i(0)),
            bin(Ge, v("c_t"), i(0)),
            bin(Eq, v("b_w"), bin(Sub, v("a_w"), v("c_t"))),
            bin(Eq, v("b_h"), v("a_h")),
        ],
    )
}

#[test]
fn only_feasible_value_is_found() {
    let m = model(&[("x", Sort::Int)], vec![bin(BinaryOp::Gt, v("x"), i(2))]);
    let r = check_sat(&m, &DomainBox::uniform(0, 3), Budget::default()).unwrap();
    assert_eq!(r.status, Status::Sat);
    assert_eq!(int(r.assignment.as_ref().unwrap(), "x"), 3);
}

#[test]
fn infeasible_bound_is_unsat() {
    let m = model(&[("x", Sort::Int)], vec![bin(BinaryOp::Gt, v("x"), i(5))]);
    let r = check_sat(&m, &DomainBox::uniform(0, 3), Budget::default()).unwrap();
    assert_eq!(r.status, Status::Unsat);
    assert!(r.assignment.is_none());
}

#[test]
fn self_disequality_is_unsat_without_search() {
    let m = model(
        &[("inhab_i", Sort::Int)],
        vec![bin(BinaryOp::Ne, v("inhab_i"), v("inhab_i"))],
    );
    for dbox in [
        DomainBox::default(),
        DomainBox::uniform(-5, 5),
        DomainBox::uniform(i64::MIN, i64::MAX),
    ] {
        let r = check_sat(&m, &dbox, Budget::default()).unwrap();
        assert_eq!(r.status, Status::Unsat);
        assert!(r.stats.nodes <= 1);
    }
}

#[test]
fn maximize_unconstrained_variable() {
    let mut m = model(&[("x", Sort::Int)], vec![]);
    m.objective = Some((Sense::Maximize, v("x")));
    let r = optimize(&m, &DomainBox::uniform(0, 3), Budget::default()).unwrap();
    assert_eq!(r.status, Status::Optimal);
    assert_eq!(r.objective, Some(3));
    assert_eq!(int(r.assignment.as_ref().unwrap(), "x"), 3);
}

#[test]
fn minimize_trim_input_width() {
    let mut m = tiny_trim();
    m.objective = Some((Sense::Minimize, v("a_w")));
    let r = optimize(
        &m,
        &DomainBox::uniform(1, 5).with_var("c_t", 0, 5),
        Budget::default(),
    )
    .unwrap();
    assert_eq!(r.status, Status::Optimal);
    let a = r.assignment.unwrap();
    assert_eq!(int(&a, "a_w"), 1);
    assert_eq!(int(&a, "b_w"), 1);
    assert_eq!(int(&a, "c_t"), 0);
}

#[test]
fn minimize_with_lower_bound_from_other_variable() {
    let mut m = model(
        &[("x", Sort::Int), ("y", Sort::Int)],
        vec![bin(BinaryOp::Ge, v("x"), bin(BinaryOp::Add, v("y"), i(1)))],
    );
    m.objective = Some((Sense::Minimize, v("x")));
    let dbox = DomainBox::uniform(0, 10).with_var("y", 2, 4);
    let r = optimize(&m, &dbox, Budget::default()).unwrap();
    let a = r.assignment.unwrap();
    assert_eq!((int(&a, "x"), int(&a, "y")), (3, 2));
    assert_eq!(r.objective, Some(3));
}

#[test]
fn evaluate_trim_assignments() {
    let m = tiny_trim();
    let mut a: Assignment = [
        ("a_w", 10),
        ("a_h", 20),
        ("b_w", 8),
        ("b_h", 20),
        ("c_t", 2),
    ]
    .into_iter()
    .map(|(n, x)| (n.to_string(), Scalar::Int(x)))
    .collect();
    assert_eq!(evaluate(&m, &a), Ok(true));
    a.insert("c_t".into(), Scalar::Int(3));
    assert_eq!(evaluate(&m, &a), Ok(false));
    assert_eq!(
        evaluate(&ConstraintModel::default(), &Assignment::new()),
        Ok(true)
    );
}

#[test]
fn undeclared_variable_is_malformed() {
    let m = model(&[("x", Sort::Int)], vec![bin(BinaryOp::Gt, v("y"), i(0))]);
    assert!(check_sat(&m, &DomainBox::default(), Budget::default()).is_err());
}

#[test]
fn empty_box_is_unsat() {
    let m = model(&[("x", Sort::Int)], vec![]);
    let r = check_sat(&m, &DomainBox::uniform(3, 2), Budget::default()).unwrap();
    assert_eq!(r.status, Status::Unsat);
}

#[test]
fn boolean_structure() {
    use BinaryOp::*;
    let m = model(
        &[("p", Sort::Bool), ("q", Sort::Bool), ("x", Sort::Int)],
        vec![
            bin(Implies, v("p"), bin(Gt, v("x"), i(5))),
            bin(Or, v("p"), v("q")),
            FlatExpr::Unary(UnaryOp::Not, Box::new(v("q"))),
            bin(Ne, v("p"), v("q")),
        ],
    );
    let r = check_sat(&m, &DomainBox::uniform(0, 10), Budget::default()).unwrap();
    let a = r.assignment.unwrap();
    assert_eq!(a["p"], Scalar::Bool(true));
    assert_eq!(a["q"], Scalar::Bool(false));
    assert_eq!(int(&a, "x"), 6);
}

#[test]
fn witness_is_lexicographically_smallest() {
    use BinaryOp::*;
    let m = model(
        &[("x", Sort::Int), ("y", Sort::Int)],
        vec![
            bin(Eq, bin(Add, v("x"), v("y")), i(7)),
            bin(Ne, v("x"), i(0)),
        ],
    );
    let dbox = DomainBox::uniform(0, 9);
    let r = check_sat(&m, &dbox, Budget::default()).unwrap();
    let a = r.assignment.unwrap();
    assert_eq!((int(&a, "x"), int(&a, "y")), (1, 6));
    let all = all_solutions(&m, &dbox, Budget::default(), usize::MAX).unwrap();
    assert!(all.complete);
    let xs: Vec<i64> = all.solutions.iter().map(|a| int(a, "x")).collect();
    assert_eq!(xs, vec![1, 2, 3, 4, 5, 6, 7]);
}

#[test]
fn node_budget_gives_exhausted() {
    use BinaryOp::*;
    let m = model(
        &[("x", Sort::Int), ("y", Sort::Int)],
        vec![
            bin(
                Eq,
                bin(Mul, v("x"), v("x")),
                bin(Add, bin(Mul, i(2), bin(Mul, v("y"), v("y"))), i(1)),
            ),
            bin(Gt, v("y"), i(1000)),
        ],
    );
    let r = check_sat(&m, &DomainBox::default(), Budget::nodes(50)).unwrap();
    assert_eq!(r.status, Status::Exhausted);
}

#[test]
fn deterministic_results() {
    let mut m = tiny_trim();
    m.objective = Some((Sense::Maximize, bin(BinaryOp::Mul, v("b_w"), v("b_h"))));
    let dbox = DomainBox::uniform(1, 40);
    let r1 = optimize(&m, &dbox, Budget::default()).unwrap();
    let r2 = optimize(&m, &dbox, Budget::default()).unwrap();
    assert_eq!(r1.assignment, r2.assignment);
    // c_t >= 1 in this box, so b_w <= 39
    assert_eq!(r1.objective, Some(1560));
}

#[test]
fn minimize_trim_input_width_in_literal_box() {
    let mut m = tiny_trim();
    m.objective = Some((Sense::Minimize, v("a_w")));
    let r = optimize(&m, &DomainBox::uniform(1, 5), Budget::default()).unwrap();
    assert_eq!(r.objective, Some(2));
    let a = r.assignment.unwrap();
    assert_eq!((int(&a, "b_w"), int(&a, "c_t")), (1, 1));
}
