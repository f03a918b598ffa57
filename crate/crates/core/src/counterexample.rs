//! The step map on `[1, 2] ∩ Q` that sends everything below √2 to 2 and
//! everything above √2 to 1.
//!
//! Over the rationals it is continuous and has no fixed point. Bisecting it
//! still produces a valid Sperner transition at every depth, and the bracket
//! closes in on √2, but the residual at the midpoint never drops below 2/5.

use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::scalar::{Rational, Sqrt2Side};
use crate::solver::{residual, CertifiedBracket, RefineStep, Refinement, SolveError};
use crate::sperner::{label_by_sign, Grid, SignLabeling};

/// Default and maximum recommended demo depth.
pub const DEFAULT_DEPTH: usize = 60;

/// Lower bound on `|g(m)|`. 2/5 < √2 - 1 because (7/5)² = 49/25 < 2.
pub fn residual_floor() -> Rational {
    Rational::new(2, 5).unwrap()
}

pub fn counterexample_expr() -> Expr {
    let two = || Expr::Const(Rational::from(2));
    Expr::if_neg(
        Expr::sub(Expr::mul(Expr::Var, Expr::Var), two()),
        two(),
        Expr::Const(Rational::one()),
    )
}

fn domain() -> (Rational, Rational) {
    (Rational::one(), Rational::from(2))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexampleError {
    #[error("{0} lies outside [1, 2]")]
    OutOfDomain(Rational),
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("round {round} hit an exact vertex fixed point at {x}")]
    UnexpectedFixedPoint { x: Rational, round: usize },
    #[error("round {round} produced no Sperner transition")]
    MissingTransition { round: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotFixed {
    pub x: Rational,
    pub image: Rational,
}

/// Checks `f(x) != x` exactly for a point of the domain.
pub fn assert_no_fixed_point(x: &Rational) -> Result<NotFixed, CounterexampleError> {
    let (lo, hi) = domain();
    if x < &lo || x > &hi {
        return Err(CounterexampleError::OutOfDomain(x.clone()));
    }
    let image = counterexample_expr()
        .eval(x)
        .expect("no division in the step map");
    // image is 1 or 2; only x = 1 or x = 2 could match, and those swap.
    assert!(image == lo || image == hi);
    assert_ne!(&image, x, "step map has a fixed point at {x}");
    Ok(NotFixed {
        x: x.clone(),
        image,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub depth: usize,
    pub bracket: CertifiedBracket,
    pub midpoint: Rational,
    pub midpoint_residual: Rational,
    /// `|midpoint_residual| >= 2/5`.
    pub residual_floor_check: bool,
    /// `lo² < 2 < hi²`.
    pub contains_sqrt2: bool,
}

impl CounterexampleReport {
    pub fn holds(&self) -> bool {
        self.residual_floor_check && self.contains_sqrt2
    }
}

fn straddles_sqrt2(bracket: &CertifiedBracket) -> bool {
    bracket.lo.cmp_sqrt2() == Ok(Sqrt2Side::Below) && bracket.hi.cmp_sqrt2() == Ok(Sqrt2Side::Above)
}

/// Bisects the step map on `[1, 2]` for `depth` rounds and reports each one.
pub fn run_demo(depth: usize) -> Result<Vec<CounterexampleReport>, CounterexampleError> {
    if depth == 0 {
        return Err(CounterexampleError::ZeroDepth);
    }
    let f = counterexample_expr();
    let (a, b) = domain();
    let floor = residual_floor();
    let mut reports = Vec::with_capacity(depth);
    let mut previous = (a.clone(), b.clone());
    for step in Refinement::new(&f, &a, &b, 2)?.take(depth) {
        let bracket = match step? {
            RefineStep::Narrowed(bracket) => bracket,
            RefineStep::ExactVertex { x, round } => {
                return Err(CounterexampleError::UnexpectedFixedPoint { x, round })
            }
        };
        let round = bracket.rounds_used;
        // The grid this round labeled is rational and must carry a transition.
        let grid = Grid::uniform(&previous.0, &previous.1, 2).expect("non-empty bracket");
        match label_by_sign(&grid, &f).map_err(SolveError::from)? {
            SignLabeling::Labeled(labeling)
                if labeling.labels().windows(2).any(|w| w[0] != w[1]) => {}
            SignLabeling::Labeled(_) => {
                return Err(CounterexampleError::MissingTransition { round })
            }
            SignLabeling::ExactFixedPoint { vertex, .. } => {
                return Err(CounterexampleError::UnexpectedFixedPoint { x: vertex, round })
            }
        }
        let midpoint = bracket.midpoint();
        let midpoint_residual = residual(&f, &midpoint).expect("no division in the step map");
        reports.push(CounterexampleReport {
            depth: round,
            residual_floor_check: midpoint_residual.abs() >= floor,
            contains_sqrt2: straddles_sqrt2(&bracket),
            midpoint,
            midpoint_residual,
            bracket: bracket.clone(),
        });
        previous = (bracket.lo, bracket.hi);
    }
    Ok(reports)
}
