use proptest::prelude::*;

use sperner1d::plmap::{theorem_roundtrip, PlMap};
use sperner1d::scalar::rat;
use sperner1d::solver::{
    archimedean_n, residual, solve, CertifiedBracket, FixPointResult, Mode, RefineStep, Refinement,
    SolverConfig,
};
use sperner1d::sperner::{label_by_sign, Grid, Label, LabelBySignError, Labeling, SignLabeling};
use sperner1d::{Expr, Rational};

/// `f(x) = c + s x` on `[0, 1]` with `c, c + s` in `[0, 1]` and `|s| < 1`.
fn affine_self_map() -> impl Strategy<Value = (Rational, Rational)> {
    (-9i64..=9, 0i64..=20).prop_filter_map("stay inside [0, 1]", |(s10, c20)| {
        let s = rat(s10, 10);
        let c = rat(c20, 20);
        let end = &c + &s;
        (end >= Rational::zero() && end <= Rational::one()).then_some((s, c))
    })
}

fn affine(s: &Rational, c: &Rational) -> Expr {
    Expr::add(
        Expr::Const(c.clone()),
        Expr::mul(Expr::Const(s.clone()), Expr::Var),
    )
}

fn declared_lipschitz(s: &Rational) -> Rational {
    if s.is_zero() {
        rat(1, 10)
    } else {
        s.abs()
    }
}

fn bracket_of(result: &FixPointResult) -> Option<&CertifiedBracket> {
    match result {
        FixPointResult::Bracket(b) => Some(b),
        FixPointResult::ExactVertex(_) => None,
    }
}

fn arb_grid(max_edges: usize) -> impl Strategy<Value = Grid> {
    (
        -20i64..20,
        prop::collection::vec((1i64..30, 1i64..7), 1..=max_edges),
    )
        .prop_map(|(start, gaps)| {
            let mut v = vec![rat(start, 3)];
            for (n, d) in gaps {
                let next = v.last().unwrap() + &rat(n, d);
                v.push(next);
            }
            Grid::new(v).unwrap()
        })
}

fn arb_labeling_for(grid: Grid) -> impl Strategy<Value = (Grid, Labeling)> {
    let inner = grid.edges() - 1;
    prop::collection::vec(any::<bool>(), inner).prop_map(move |bits| {
        let mut labels = vec![Label::Zero];
        labels.extend(bits.into_iter().map(Label::from_bit));
        labels.push(Label::One);
        (grid.clone(), Labeling::new(labels).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn self_maps_always_label_cleanly((s, c) in affine_self_map(), n in 1usize..12) {
        let f = affine(&s, &c);
        let grid = Grid::uniform(&rat(0, 1), &rat(1, 1), n).unwrap();
        match label_by_sign(&grid, &f) {
            Ok(SignLabeling::Labeled(l)) => {
                prop_assert_eq!(l.labels()[0], Label::Zero);
                prop_assert_eq!(l.labels()[n], Label::One);
            }
            Ok(SignLabeling::ExactFixedPoint { vertex, .. }) => {
                prop_assert!(residual(&f, &vertex).unwrap().is_zero());
            }
            Err(LabelBySignError::NotSelfMap { .. }) => prop_assert!(false, "self-map rejected"),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn affine_brackets_are_sound((s, c) in affine_self_map(), eps_exp in 2u32..12) {
        let f = affine(&s, &c);
        let l = declared_lipschitz(&s);
        let config = SolverConfig {
            epsilon: rat(1, 1 << eps_exp),
            lipschitz: Some(l.clone()),
            ..SolverConfig::default()
        };
        let sol = solve(&f, &rat(0, 1), &rat(1, 1), &config).unwrap();
        prop_assert!(sol.converged);
        // unique fixed point c / (1 - s)
        let fixed = c.checked_div(&(Rational::one() - &s)).unwrap();
        match &sol.result {
            FixPointResult::ExactVertex(x) => prop_assert_eq!(x, &fixed),
            FixPointResult::Bracket(b) => {
                prop_assert!(b.verify(&f).unwrap());
                prop_assert!(b.lo < fixed && fixed < b.hi);
                let mid_residual = residual(&f, &b.midpoint()).unwrap().abs();
                prop_assert!(mid_residual <= b.residual_bound(&l));
            }
        }
    }

    #[test]
    fn single_grid_agrees_with_refine((s, c) in affine_self_map(), eps_den in 4i64..200) {
        let f = affine(&s, &c);
        let base = SolverConfig {
            epsilon: rat(1, eps_den),
            lipschitz: Some(declared_lipschitz(&s)),
            ..SolverConfig::default()
        };
        let refine = solve(&f, &rat(0, 1), &rat(1, 1), &base).unwrap();
        let single = solve(
            &f,
            &rat(0, 1),
            &rat(1, 1),
            &SolverConfig { mode: Mode::SingleGrid, ..base },
        )
        .unwrap();
        prop_assert!(single.converged);
        let interval = |r: &FixPointResult| match r {
            FixPointResult::ExactVertex(x) => (x.clone(), x.clone()),
            FixPointResult::Bracket(b) => (b.lo.clone(), b.hi.clone()),
        };
        let (lo1, hi1) = interval(&refine.result);
        let (lo2, hi2) = interval(&single.result);
        let lo = lo1.max(lo2);
        let hi = hi1.min(hi2);
        // interiors meet, or an exact vertex lies in the other bracket
        let exact = bracket_of(&refine.result).is_none() || bracket_of(&single.result).is_none();
        let meets = if exact { lo <= hi } else { lo < hi };
        prop_assert!(meets);
    }

    #[test]
    fn refine_width_law(branching in 2usize..6, rounds in 1usize..12) {
        let f = Expr::parse("(x*x + 2)/4").unwrap();
        let mut refinement = Refinement::new(&f, &rat(0, 1), &rat(1, 1), branching).unwrap();
        let mut width = Rational::one();
        let b = Rational::from(branching as i64);
        for round in 1..=rounds {
            width = width.checked_div(&b).unwrap();
            match refinement.next().unwrap().unwrap() {
                RefineStep::Narrowed(br) => {
                    prop_assert_eq!(br.width(), width.clone());
                    prop_assert_eq!(br.rounds_used, round);
                    prop_assert!(br.verify(&f).unwrap());
                }
                RefineStep::ExactVertex { x, .. } => {
                    // only possible on a rational fixed point, and 2 - sqrt2 is not one
                    prop_assert!(false, "exact vertex {x}");
                }
            }
        }
    }

    #[test]
    fn archimedean_is_minimal(dn in 1i64..500, dd in 1i64..500, a in -50i64..50, w in 1i64..500) {
        let delta = rat(dn, dd);
        let a = rat(a, 7);
        let b = &a + &rat(w, 11);
        let n = Rational::from(archimedean_n(&delta, &a, &b));
        let span = &b - &a;
        prop_assert!(span < &n * &delta);
        prop_assert!(span >= (&n - &Rational::one()) * delta);
        prop_assert!(n >= Rational::one());
    }

    #[test]
    fn pl_roundtrip_on_random_grids((grid, labeling) in arb_grid(10).prop_flat_map(arb_labeling_for)) {
        let report = theorem_roundtrip(&grid, &labeling).unwrap();
        let hetero: Vec<usize> = (1..=grid.edges()).filter(|&k| labeling.is_hetero(k)).collect();
        prop_assert_eq!(&report.hetero_edges, &hetero);
        prop_assert_eq!(report.fixed_points.len(), hetero.len());
    }

    #[test]
    fn monochromatic_edges_repel((grid, labeling) in arb_grid(10).prop_flat_map(arb_labeling_for)) {
        let map = PlMap::from_labeling(&grid, &labeling).unwrap();
        for k in 1..=grid.edges() {
            let (left, right) = grid.edge(k);
            let r_left = map.evaluate(left).unwrap() - left;
            let r_right = map.evaluate(right).unwrap() - right;
            match (labeling.labels()[k - 1], labeling.labels()[k]) {
                (Label::Zero, Label::Zero) => prop_assert!(r_left.is_positive() && r_right.is_positive()),
                (Label::One, Label::One) => prop_assert!(r_left.is_negative() && r_right.is_negative()),
                _ => prop_assert!(r_left.signum() * r_right.signum() < 0),
            }
        }
    }

    #[test]
    fn pl_values_stay_in_range(
        (grid, labeling) in arb_grid(8).prop_flat_map(arb_labeling_for),
        t in 0i64..=1000,
    ) {
        let map = PlMap::from_labeling(&grid, &labeling).unwrap();
        let x = grid.first() + &(&(grid.last() - grid.first()) * &rat(t, 1000));
        let y = map.evaluate(&x).unwrap();
        prop_assert!(grid.first() <= &y && &y <= grid.last());
    }

    #[test]
    fn solver_finds_a_pl_fixed_point((grid, labeling) in arb_grid(8).prop_flat_map(arb_labeling_for)) {
        let map = PlMap::from_labeling(&grid, &labeling).unwrap();
        let exact = map.fixed_points();
        let sol = solve(
            &map,
            grid.first(),
            grid.last(),
            &SolverConfig { epsilon: rat(1, 1_000_000), ..SolverConfig::default() },
        )
        .unwrap();
        match &sol.result {
            FixPointResult::ExactVertex(x) => prop_assert!(exact.contains(x)),
            FixPointResult::Bracket(b) => prop_assert!(exact.iter().any(|x| b.contains(x))),
        }
    }
}

#[test]
fn uniform_grids_put_fixed_points_at_midpoints() {
    for n in 1..=8usize {
        let grid = Grid::uniform(&rat(0, 1), &Rational::from(n as i64), n).unwrap();
        for mask in 0u32..1 << (n - 1) {
            let mut labels = vec![Label::Zero];
            labels.extend((0..n - 1).map(|b| Label::from_bit(mask >> b & 1 == 1)));
            labels.push(Label::One);
            let labeling = Labeling::new(labels).unwrap();
            for w in theorem_roundtrip(&grid, &labeling).unwrap().fixed_points {
                let (lo, hi) = grid.edge(w.edge);
                assert_eq!(w.x, lo.midpoint(hi));
            }
        }
    }
}
