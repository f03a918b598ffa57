//! Certified fixed-point bracketing.
//!
//! The search labels a grid by the sign of `g(x) = f(x) - x`, picks an edge
//! whose left end has `g > 0` and right end `g < 0`, and zooms into it. Every
//! bracket carries the exact residuals that witness the sign change, so a
//! result can be re-checked without trusting the search.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, RationalMap};
use crate::scalar::Rational;
use crate::sperner::{label_by_sign, Grid, LabelBySignError, SignLabeling};

/// Largest grid the single-grid mode is willing to build.
pub const MAX_SINGLE_GRID_EDGES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("empty interval: {a} >= {b}")]
    EmptyInterval { a: Rational, b: Rational },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("single-grid mode needs a Lipschitz bound")]
    MissingLipschitz,
    #[error("map does not self-map the interval [{lo}, {hi}]")]
    NotSelfMap { lo: Rational, hi: Rational },
    #[error("single grid would need {0} edges")]
    GridTooLarge(BigInt),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<LabelBySignError> for SolveError {
    fn from(err: LabelBySignError) -> Self {
        match err {
            LabelBySignError::NotSelfMap { lo, hi } => SolveError::NotSelfMap { lo, hi },
            LabelBySignError::Eval(e) => SolveError::Eval(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Repeatedly split the current bracket into `branching` pieces.
    #[default]
    Refine,
    /// One uniform grid fine enough for the declared Lipschitz bound.
    SingleGrid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub epsilon: Rational,
    pub lipschitz: Option<Rational>,
    pub branching: usize,
    pub max_rounds: usize,
    pub mode: Mode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: Rational::new(1, 1_000_000).unwrap(),
            lipschitz: None,
            branching: 2,
            max_rounds: 100,
            mode: Mode::Refine,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !self.epsilon.is_positive() {
            return Err(SolveError::InvalidConfig("epsilon must be positive"));
        }
        if self.branching < 2 {
            return Err(SolveError::InvalidConfig("branching must be at least 2"));
        }
        if self.max_rounds == 0 {
            return Err(SolveError::InvalidConfig("max_rounds must be positive"));
        }
        if self.lipschitz.as_ref().is_some_and(|l| !l.is_positive()) {
            return Err(SolveError::InvalidConfig(
                "lipschitz bound must be positive",
            ));
        }
        Ok(())
    }

    /// Whether a bracket is narrow enough to stop refining.
    pub fn accepts(&self, bracket: &CertifiedBracket) -> bool {
        match &self.lipschitz {
            Some(l) => bracket.residual_bound(l) <= self.epsilon,
            None => bracket.width() <= self.epsilon,
        }
    }
}

/// `[lo, hi]` with exact evidence `g(lo) > 0 > g(hi)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedBracket {
    pub lo: Rational,
    pub hi: Rational,
    pub g_lo: Rational,
    pub g_hi: Rational,
    pub rounds_used: usize,
}

impl CertifiedBracket {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        self.lo.midpoint(&self.hi)
    }

    /// `(L + 1) (hi - lo) / 2`: a bound on `|g(midpoint)|` that holds when
    /// `f` really is `L`-Lipschitz on the interval.
    pub fn residual_bound(&self, lipschitz: &Rational) -> Rational {
        assert!(lipschitz.is_positive(), "Lipschitz bound must be positive");
        (lipschitz + &Rational::one()) * self.width() * Rational::new(1, 2).unwrap()
    }

    /// Recomputes both residuals from scratch and checks the invariants.
    pub fn verify<F: RationalMap + ?Sized>(&self, f: &F) -> Result<bool, EvalError> {
        let g_lo = residual(f, &self.lo)?;
        let g_hi = residual(f, &self.hi)?;
        Ok(self.lo < self.hi
            && g_lo == self.g_lo
            && g_hi == self.g_hi
            && g_lo.is_positive()
            && g_hi.is_negative())
    }

    /// Whether `x` lies in the closed bracket.
    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixPointResult {
    ExactVertex(Rational),
    Bracket(CertifiedBracket),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub mode: Mode,
    pub result: FixPointResult,
    pub rounds_used: usize,
    /// False when `max_rounds` ran out first; the bracket is still sound.
    pub converged: bool,
}

/// `g(x) = f(x) - x`.
pub fn residual<F: RationalMap + ?Sized>(f: &F, x: &Rational) -> Result<Rational, EvalError> {
    Ok(f.apply(x)? - x)
}

/// Smallest positive integer `n` with `b - a < n * delta`.
pub fn archimedean_n(delta: &Rational, a: &Rational, b: &Rational) -> BigInt {
    assert!(delta.is_positive(), "delta must be positive");
    assert!(a < b, "interval must be non-empty");
    // b - a < n delta  <=>  n > (b - a) / delta
    let ratio = (b - a).checked_div(delta).expect("delta > 0");
    ratio.floor() + 1
}

/// One step of the refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefineStep {
    Narrowed(CertifiedBracket),
    ExactVertex { x: Rational, round: usize },
}

enum State {
    Active(CertifiedBracket),
    PendingExact(Rational),
    Done,
}

/// The refine-mode search as an iterator over rounds.
///
/// Each item is the outcome of one round; the iterator ends after an exact
/// vertex or an error and otherwise never ends.
pub struct Refinement<'f, F: ?Sized> {
    f: &'f F,
    branching: usize,
    state: State,
}

impl<'f, F: RationalMap + ?Sized> Refinement<'f, F> {
    pub fn new(f: &'f F, a: &Rational, b: &Rational, branching: usize) -> Result<Self, SolveError> {
        if a >= b {
            return Err(SolveError::EmptyInterval {
                a: a.clone(),
                b: b.clone(),
            });
        }
        if branching < 2 {
            return Err(SolveError::InvalidConfig("branching must be at least 2"));
        }
        let g_a = residual(f, a)?;
        let g_b = residual(f, b)?;
        if g_a.is_negative() || g_b.is_positive() {
            return Err(SolveError::NotSelfMap {
                lo: a.clone(),
                hi: b.clone(),
            });
        }
        let state = if g_a.is_zero() {
            State::PendingExact(a.clone())
        } else if g_b.is_zero() {
            State::PendingExact(b.clone())
        } else {
            State::Active(CertifiedBracket {
                lo: a.clone(),
                hi: b.clone(),
                g_lo: g_a,
                g_hi: g_b,
                rounds_used: 0,
            })
        };
        Ok(Refinement {
            f,
            branching,
            state,
        })
    }

    /// The current bracket, if the search is still narrowing one.
    pub fn bracket(&self) -> Option<&CertifiedBracket> {
        match &self.state {
            State::Active(b) => Some(b),
            _ => None,
        }
    }

    fn round(&self, current: &CertifiedBracket) -> Result<RefineStep, SolveError> {
        let round = current.rounds_used + 1;
        let grid =
            Grid::uniform(&current.lo, &current.hi, self.branching).expect("bracket is non-empty");
        match label_by_sign(&grid, self.f)? {
            SignLabeling::ExactFixedPoint { vertex, .. } => {
                Ok(RefineStep::ExactVertex { x: vertex, round })
            }
            SignLabeling::Labeled(labeling) => {
                let i = labeling.find_transition_bisect();
                let (lo, hi) = grid.edge(i);
                Ok(RefineStep::Narrowed(CertifiedBracket {
                    g_lo: residual(self.f, lo)?,
                    g_hi: residual(self.f, hi)?,
                    lo: lo.clone(),
                    hi: hi.clone(),
                    rounds_used: round,
                }))
            }
        }
    }
}

impl<F: RationalMap + ?Sized> Iterator for Refinement<'_, F> {
    type Item = Result<RefineStep, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        match std::mem::replace(&mut self.state, State::Done) {
            State::Done => None,
            State::PendingExact(x) => Some(Ok(RefineStep::ExactVertex { x, round: 0 })),
            State::Active(current) => {
                let step = self.round(&current);
                if let Ok(RefineStep::Narrowed(next)) = &step {
                    self.state = State::Active(next.clone());
                }
                Some(step)
            }
        }
    }
}

/// Locates a fixed point of `f` on `[a, b]`.
pub fn solve<F: RationalMap + ?Sized>(
    f: &F,
    a: &Rational,
    b: &Rational,
    config: &SolverConfig,
) -> Result<Solution, SolveError> {
    config.validate()?;
    match config.mode {
        Mode::Refine => solve_refine(f, a, b, config),
        Mode::SingleGrid => solve_single_grid(f, a, b, config),
    }
}

fn exact(mode: Mode, x: Rational, rounds_used: usize) -> Solution {
    Solution {
        mode,
        result: FixPointResult::ExactVertex(x),
        rounds_used,
        converged: true,
    }
}

fn solve_refine<F: RationalMap + ?Sized>(
    f: &F,
    a: &Rational,
    b: &Rational,
    config: &SolverConfig,
) -> Result<Solution, SolveError> {
    let mut refinement = Refinement::new(f, a, b, config.branching)?;
    loop {
        if let Some(bracket) = refinement.bracket() {
            let converged = config.accepts(bracket);
            if converged || bracket.rounds_used >= config.max_rounds {
                return Ok(Solution {
                    mode: Mode::Refine,
                    rounds_used: bracket.rounds_used,
                    result: FixPointResult::Bracket(bracket.clone()),
                    converged,
                });
            }
        }
        match refinement
            .next()
            .expect("active refinement always yields")?
        {
            RefineStep::ExactVertex { x, round } => return Ok(exact(Mode::Refine, x, round)),
            RefineStep::Narrowed(_) => {}
        }
    }
}

/// Grid spacing for the single-grid construction: `epsilon / L`, capped
/// strictly below `epsilon` at `epsilon (1 - 1/branching)`.
pub fn single_grid_delta(config: &SolverConfig, lipschitz: &Rational) -> Rational {
    let by_modulus = config.epsilon.checked_div(lipschitz).expect("L > 0");
    let branching = Rational::from(config.branching as i64);
    let cap = &config.epsilon * &(Rational::one() - branching.recip().expect("branching >= 2"));
    by_modulus.min(cap)
}

fn solve_single_grid<F: RationalMap + ?Sized>(
    f: &F,
    a: &Rational,
    b: &Rational,
    config: &SolverConfig,
) -> Result<Solution, SolveError> {
    let lipschitz = config
        .lipschitz
        .as_ref()
        .ok_or(SolveError::MissingLipschitz)?;
    if a >= b {
        return Err(SolveError::EmptyInterval {
            a: a.clone(),
            b: b.clone(),
        });
    }
    let delta = single_grid_delta(config, lipschitz);
    let n = archimedean_n(&delta, a, b);
    let edges = n
        .to_usize()
        .filter(|&n| n <= MAX_SINGLE_GRID_EDGES)
        .ok_or_else(|| SolveError::GridTooLarge(n.clone()))?;
    let grid = Grid::uniform(a, b, edges).expect("a < b and n >= 1");
    match label_by_sign(&grid, f)? {
        SignLabeling::ExactFixedPoint { vertex, .. } => Ok(exact(Mode::SingleGrid, vertex, 1)),
        SignLabeling::Labeled(labeling) => {
            let i = labeling.find_transition_scan();
            let (lo, hi) = grid.edge(i);
            let bracket = CertifiedBracket {
                g_lo: residual(f, lo)?,
                g_hi: residual(f, hi)?,
                lo: lo.clone(),
                hi: hi.clone(),
                rounds_used: 1,
            };
            Ok(Solution {
                mode: Mode::SingleGrid,
                converged: config.accepts(&bracket),
                rounds_used: 1,
                result: FixPointResult::Bracket(bracket),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultKind {
    ExactVertex,
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalView {
    pub lo: String,
    pub hi: String,
    pub g_lo: String,
    pub g_hi: String,
}

/// Flat, serializable view of a [`Solution`]. An exact vertex `x` is
/// reported as `lo = hi = x` with zero residuals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: Mode,
    pub kind: ResultKind,
    pub converged: bool,
    pub rounds_used: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub g_lo: Rational,
    pub g_hi: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_bound: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<DecimalView>,
}

impl SolveReport {
    pub fn new(solution: &Solution, lipschitz: Option<&Rational>) -> SolveReport {
        let (kind, lo, hi, g_lo, g_hi, bound) = match &solution.result {
            FixPointResult::ExactVertex(x) => (
                ResultKind::ExactVertex,
                x.clone(),
                x.clone(),
                Rational::zero(),
                Rational::zero(),
                None,
            ),
            FixPointResult::Bracket(b) => (
                ResultKind::Bracket,
                b.lo.clone(),
                b.hi.clone(),
                b.g_lo.clone(),
                b.g_hi.clone(),
                lipschitz.map(|l| b.residual_bound(l)),
            ),
        };
        SolveReport {
            mode: solution.mode,
            kind,
            converged: solution.converged,
            rounds_used: solution.rounds_used,
            lo,
            hi,
            g_lo,
            g_hi,
            residual_bound: bound,
            decimal: None,
        }
    }

    pub fn with_decimals(mut self, digits: usize) -> SolveReport {
        self.decimal = Some(DecimalView {
            lo: self.lo.to_decimal(digits),
            hi: self.hi.to_decimal(digits),
            g_lo: self.g_lo.to_decimal(digits),
            g_hi: self.g_hi.to_decimal(digits),
        });
        self
    }
}
