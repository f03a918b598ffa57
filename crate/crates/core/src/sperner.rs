//! Grids, two-colorings and the one-dimensional Sperner search.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expr::{EvalError, RationalMap};
use crate::scalar::{Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("a grid needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertices must be strictly increasing (position {index})")]
    NotIncreasing { index: usize },
    #[error("empty interval: {a} >= {b}")]
    EmptyInterval { a: Rational, b: Rational },
    #[error("grid needs at least one subdivision")]
    ZeroSubdivisions,
    #[error(transparent)]
    Literal(#[from] RationalError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelingError {
    #[error("boundary condition violated: first label must be 0 and last label 1")]
    BoundaryViolation,
    #[error("a labeling needs at least two labels, got {0}")]
    TooShort(usize),
    #[error("{labels} labels for a grid of {vertices} vertices")]
    LengthMismatch { labels: usize, vertices: usize },
    #[error("malformed label {0:?}; expected 0 or 1")]
    MalformedLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelBySignError {
    #[error("map does not self-map the interval [{lo}, {hi}]")]
    NotSelfMap { lo: Rational, hi: Rational },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Strictly increasing vertices `v_0 < v_1 < ... < v_n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    vertices: Vec<Rational>,
}

impl Grid {
    pub fn new(vertices: Vec<Rational>) -> Result<Grid, GridError> {
        if vertices.len() < 2 {
            return Err(GridError::TooFewVertices(vertices.len()));
        }
        if let Some(index) = vertices.windows(2).position(|w| w[0] >= w[1]) {
            return Err(GridError::NotIncreasing { index: index + 1 });
        }
        Ok(Grid { vertices })
    }

    /// `v_i = a + i (b - a) / n` for `i = 0..=n`.
    pub fn uniform(a: &Rational, b: &Rational, n: usize) -> Result<Grid, GridError> {
        if a >= b {
            return Err(GridError::EmptyInterval {
                a: a.clone(),
                b: b.clone(),
            });
        }
        if n == 0 {
            return Err(GridError::ZeroSubdivisions);
        }
        let step = (b - a)
            .checked_div(&Rational::from(n as i64))
            .expect("n > 0");
        let vertices = (0..=n)
            .map(|i| a + &(&step * &Rational::from(i as i64)))
            .collect();
        Ok(Grid { vertices })
    }

    /// Parses a comma-separated list of rational literals.
    pub fn parse_csv(text: &str) -> Result<Grid, GridError> {
        let vertices = text
            .trim()
            .split(',')
            .map(|field| field.trim().parse::<Rational>())
            .collect::<Result<Vec<_>, _>>()?;
        Grid::new(vertices)
    }

    pub fn to_csv(&self) -> String {
        join(&self.vertices)
    }

    pub fn vertices(&self) -> &[Rational] {
        &self.vertices
    }

    pub fn vertex(&self, index: usize) -> &Rational {
        &self.vertices[index]
    }

    /// Number of edges `n`.
    pub fn edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn first(&self) -> &Rational {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Rational {
        &self.vertices[self.vertices.len() - 1]
    }

    pub fn edge(&self, i: usize) -> (&Rational, &Rational) {
        (&self.vertices[i - 1], &self.vertices[i])
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Zero,
    One,
}

impl Label {
    pub fn from_bit(bit: bool) -> Label {
        if bit {
            Label::One
        } else {
            Label::Zero
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Zero => "0",
            Label::One => "1",
        })
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Label {
    type Err = LabelingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => Ok(Label::Zero),
            "1" => Ok(Label::One),
            other => Err(LabelingError::MalformedLabel(other.to_string())),
        }
    }
}

/// Parses `0,0,1,1` into raw labels without checking the boundary condition.
pub fn parse_labels(text: &str) -> Result<Vec<Label>, LabelingError> {
    text.trim().split(',').map(str::parse).collect()
}

/// A two-coloring with `labels[0] = 0` and `labels[n] = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<Label>,
}

impl Labeling {
    pub fn new(labels: Vec<Label>) -> Result<Labeling, LabelingError> {
        if labels.len() < 2 {
            return Err(LabelingError::TooShort(labels.len()));
        }
        if labels[0] != Label::Zero || labels[labels.len() - 1] != Label::One {
            return Err(LabelingError::BoundaryViolation);
        }
        Ok(Labeling { labels })
    }

    /// Checks that the labeling fits `grid` vertex for vertex.
    pub fn for_grid(labels: Vec<Label>, grid: &Grid) -> Result<Labeling, LabelingError> {
        if labels.len() != grid.vertices().len() {
            return Err(LabelingError::LengthMismatch {
                labels: labels.len(),
                vertices: grid.vertices().len(),
            });
        }
        Labeling::new(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn is_hetero(&self, edge: usize) -> bool {
        self.labels[edge - 1] != self.labels[edge]
    }

    /// Smallest `i` with `labels[i-1] != labels[i]`.
    ///
    /// Because `labels[0] = 0`, the first change is always oriented 0 -> 1.
    pub fn find_transition_scan(&self) -> usize {
        (1..self.labels.len())
            .find(|&i| self.is_hetero(i))
            .expect("a boundary-respecting labeling always changes label")
    }

    /// Some `i` with `labels[i-1] = 0` and `labels[i] = 1`, found by halving.
    pub fn find_transition_bisect(&self) -> usize {
        self.find_transition_bisect_counted().0
    }

    /// Like [`Self::find_transition_bisect`], also returning how many
    /// interior labels were read. The endpoints are known from the invariant
    /// and are not counted.
    pub fn find_transition_bisect_counted(&self) -> (usize, usize) {
        let (mut lo, mut hi) = (0, self.labels.len() - 1);
        let mut queries = 0;
        // labels[lo] = 0, labels[hi] = 1
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            queries += 1;
            match self.labels[mid] {
                Label::Zero => lo = mid,
                Label::One => hi = mid,
            }
        }
        (hi, queries)
    }

    pub fn zero_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices_of(Label::Zero)
    }

    pub fn one_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices_of(Label::One)
    }

    fn indices_of(&self, label: Label) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(|(i, _)| i)
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.labels))
    }
}

impl FromStr for Labeling {
    type Err = LabelingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Labeling::new(parse_labels(s)?)
    }
}

/// Checks an arbitrary label vector: `Ok(true)` when it has a transition
/// edge, an error when it does not satisfy the boundary condition at all.
pub fn verify_sperner(labels: &[Label]) -> Result<bool, LabelingError> {
    if labels.len() < 2 {
        return Err(LabelingError::TooShort(labels.len()));
    }
    if labels[0] != Label::Zero || labels[labels.len() - 1] != Label::One {
        return Err(LabelingError::BoundaryViolation);
    }
    Ok(labels.windows(2).any(|w| w[0] != w[1]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignLabeling {
    Labeled(Labeling),
    /// A vertex with `f(v) = v` exactly.
    ExactFixedPoint {
        index: usize,
        vertex: Rational,
    },
}

/// Labels each vertex by the sign of `g(v) = f(v) - v`: 0 when positive,
/// 1 when negative. A vertex with `g(v) = 0` is returned instead.
pub fn label_by_sign<F>(grid: &Grid, f: &F) -> Result<SignLabeling, LabelBySignError>
where
    F: RationalMap + ?Sized,
{
    let residual = |v: &Rational| f.apply(v).map(|fv| fv - v);
    let n = grid.edges();
    let g_first = residual(grid.first())?;
    let g_last = residual(grid.last())?;
    if g_first.is_negative() || g_last.is_positive() {
        return Err(LabelBySignError::NotSelfMap {
            lo: grid.first().clone(),
            hi: grid.last().clone(),
        });
    }
    let mut labels = Vec::with_capacity(n + 1);
    for (index, vertex) in grid.vertices().iter().enumerate() {
        let g = match index {
            0 => g_first.clone(),
            i if i == n => g_last.clone(),
            _ => residual(vertex)?,
        };
        if g.is_zero() {
            return Ok(SignLabeling::ExactFixedPoint {
                index,
                vertex: vertex.clone(),
            });
        }
        labels.push(Label::from_bit(g.is_negative()));
    }
    Ok(SignLabeling::Labeled(
        Labeling::new(labels).expect("endpoint signs checked above"),
    ))
}
