use inverseopt::harness::brute::vertex_enumeration;
use inverseopt::lp::{lp_solve_in, solve_strict, ExactLp, StrictOutcome};
use inverseopt::{lp_solve, Bounds, LinearConstraint, LpStatus, Origin, Sense};
use num_rational::BigRational;
use proptest::prelude::*;

fn ge(normal: Vec<f64>, rhs: f64) -> LinearConstraint {
    LinearConstraint::new(normal, rhs, Sense::Ge, Origin::Label(0))
}

/// Small-integer systems in the unit box, so vertex enumeration is exact
/// enough to serve as a reference.
fn system() -> impl Strategy<Value = (Vec<LinearConstraint>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|k| {
        let row = (prop::collection::vec(-4i32..=4, k), -3i32..=2)
            .prop_map(|(a, b)| ge(a.into_iter().map(f64::from).collect(), f64::from(b)));
        (prop::collection::vec(row, 0..=50), prop::collection::vec(-3i32..=3, k))
            .prop_map(|(rows, obj)| (rows, obj.into_iter().map(f64::from).collect()))
    })
}

fn as_rows(cs: &[LinearConstraint]) -> Vec<(Vec<f64>, f64)> {
    cs.iter().map(|c| (c.normal.clone(), c.rhs)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agrees_with_vertex_enumeration((cs, obj) in system(), seed in any::<u64>()) {
        let k = obj.len();
        let got = lp_solve(&cs, &obj, &Bounds::unit(k), seed).unwrap();
        let want = vertex_enumeration(&as_rows(&cs), &obj, &vec![-1.0; k], &vec![1.0; k]);
        match want {
            None => prop_assert_eq!(got.status, LpStatus::Infeasible),
            Some((value, _)) => {
                prop_assert_eq!(got.status, LpStatus::Optimal);
                prop_assert!((got.objective_value.unwrap() - value).abs() < 1e-6);
                let x = got.point.unwrap();
                for c in &cs {
                    prop_assert!(c.value_at(&x) >= c.rhs - 1e-9);
                }
            }
        }
    }

    #[test]
    fn basis_alone_reproduces_the_answer((cs, obj) in system(), seed in any::<u64>()) {
        let k = obj.len();
        let full = lp_solve(&cs, &obj, &Bounds::unit(k), seed).unwrap();
        let sub: Vec<LinearConstraint> = full.basis.iter().map(|&i| cs[i].clone()).collect();
        let part = lp_solve(&sub, &obj, &Bounds::unit(k), seed).unwrap();
        prop_assert_eq!(part.status, full.status);
        match full.status {
            LpStatus::Optimal => {
                prop_assert!(full.basis.len() <= k);
                prop_assert!((part.objective_value.unwrap() - full.objective_value.unwrap()).abs() < 1e-9);
            }
            LpStatus::Infeasible => {
                prop_assert!(full.basis.len() <= k + 1);
                // minimal: dropping any member restores feasibility
                for drop in 0..sub.len() {
                    let mut rest = sub.clone();
                    rest.remove(drop);
                    let r = lp_solve(&rest, &obj, &Bounds::unit(k), seed).unwrap();
                    prop_assert_eq!(r.status, LpStatus::Optimal);
                }
            }
            LpStatus::Unbounded => prop_assert!(false, "closed box cannot be unbounded"),
        }
    }

    #[test]
    fn deterministic_and_seed_independent((cs, obj) in system(), a in any::<u64>(), b in any::<u64>()) {
        let k = obj.len();
        let x = lp_solve(&cs, &obj, &Bounds::unit(k), a).unwrap();
        prop_assert_eq!(&x, &lp_solve(&cs, &obj, &Bounds::unit(k), a).unwrap());
        let y = lp_solve(&cs, &obj, &Bounds::unit(k), b).unwrap();
        prop_assert_eq!(x.status, y.status);
        if let (Some(p), Some(q)) = (&x.point, &y.point) {
            // the lexicographic tie rule pins the optimum point itself
            for (u, v) in p.iter().zip(q) {
                prop_assert!((u - v).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn rational_engine_matches_float((cs, obj) in system(), seed in any::<u64>()) {
        let k = obj.len();
        let q = |x: f64| BigRational::from_integer((x as i64).into());
        let rows: Vec<(Vec<BigRational>, BigRational)> =
            cs.iter().map(|c| (c.normal.iter().map(|&a| q(a)).collect(), q(c.rhs))).collect();
        let objq: Vec<BigRational> = obj.iter().map(|&a| q(a)).collect();
        let exact = lp_solve_in(&rows, &objq, &vec![q(-1.0); k], &vec![q(1.0); k], seed);
        let float = lp_solve(&cs, &obj, &Bounds::unit(k), seed).unwrap();
        match exact {
            ExactLp::Infeasible { .. } => prop_assert_eq!(float.status, LpStatus::Infeasible),
            ExactLp::Optimal { point, .. } => {
                use num_traits::ToPrimitive;
                let value: f64 = point.iter().zip(&obj).map(|(x, c)| x.to_f64().unwrap() * c).sum();
                prop_assert!((float.objective_value.unwrap() - value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn strict_margin_matches_enumeration((cs, _) in system(), seed in any::<u64>()) {
        let k = cs.first().map_or(1, |c| c.normal.len());
        let strict: Vec<LinearConstraint> = cs
            .iter()
            .map(|c| LinearConstraint::new(c.normal.clone(), c.rhs, Sense::Gt, Origin::Label(0)))
            .collect();
        let cap = 10.0;
        let out = solve_strict(&strict, k, cap, seed).unwrap();
        let mut rows = Vec::new();
        for c in &strict {
            let mut a = c.normal.clone();
            a.push(-1.0);
            rows.push((a, c.rhs));
        }
        let mut obj = vec![0.0; k + 1];
        obj[k] = 1.0;
        let mut lo = vec![-1.0; k + 1];
        let mut hi = vec![1.0; k + 1];
        lo[k] = -cap;
        hi[k] = cap;
        let best = vertex_enumeration(&rows, &obj, &lo, &hi).map(|(v, _)| v);
        match out {
            StrictOutcome::Feasible { delta, .. } => prop_assert!((delta - best.unwrap()).abs() < 1e-6),
            StrictOutcome::Infeasible { basis, .. } => {
                prop_assert!(best.map_or(true, |v| v < 1e-6));
                prop_assert!(basis.len() <= k + 1);
            }
        }
    }
}

#[test]
fn empty_system_takes_the_lexicographic_corner() {
    let r = lp_solve(&[], &[1.0, 0.0], &Bounds::unit(2), 0).unwrap();
    assert_eq!(r.point.unwrap(), vec![1.0, -1.0]);
}
