//! Vertex maps built from a labeling and their piecewise-linear extension.
//!
//! A vertex labeled 0 is sent one step right and a vertex labeled 1 one step
//! left. The boundary condition keeps every target on the grid, and the
//! interpolated map can only cross the diagonal on edges whose endpoint
//! labels differ. Fixed points are found here by solving each edge's linear
//! equation directly, with no help from [`crate::solver`].

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, RationalMap};
use crate::scalar::Rational;
use crate::sperner::{Grid, Label, Labeling, LabelingError};

/// `target[j] = j + 1` on label 0, `j - 1` on label 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMap {
    grid: Grid,
    targets: Vec<usize>,
}

impl DiscreteMap {
    pub fn from_labeling(grid: &Grid, labeling: &Labeling) -> Result<DiscreteMap, LabelingError> {
        let labeling = Labeling::for_grid(labeling.labels().to_vec(), grid)?;
        let targets = labeling
            .labels()
            .iter()
            .enumerate()
            .map(|(j, label)| match label {
                Label::Zero => j + 1,
                // labels[0] = 0, so j >= 1 here
                Label::One => j - 1,
            })
            .collect::<Vec<_>>();
        debug_assert!(targets.iter().all(|&t| t <= grid.edges()));
        Ok(DiscreteMap {
            grid: grid.clone(),
            targets,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn image(&self, j: usize) -> &Rational {
        self.grid.vertex(self.targets[j])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlMap {
    grid: Grid,
    values: Vec<Rational>,
}

impl From<&DiscreteMap> for PlMap {
    fn from(map: &DiscreteMap) -> PlMap {
        PlMap {
            grid: map.grid.clone(),
            values: (0..map.targets.len())
                .map(|j| map.image(j).clone())
                .collect(),
        }
    }
}

impl PlMap {
    pub fn from_labeling(grid: &Grid, labeling: &Labeling) -> Result<PlMap, LabelingError> {
        Ok(PlMap::from(&DiscreteMap::from_labeling(grid, labeling)?))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Index `k` of the edge `[v_{k-1}, v_k]` holding `x`, preferring the
    /// smaller `k` at a shared vertex.
    pub fn locate(&self, x: &Rational) -> Result<usize, EvalError> {
        let v = self.grid.vertices();
        if x < self.grid.first() || x > self.grid.last() {
            return Err(EvalError::OutOfDomain {
                x: x.clone(),
                lo: self.grid.first().clone(),
                hi: self.grid.last().clone(),
            });
        }
        Ok(1 + v[1..].partition_point(|vk| vk < x))
    }

    /// `lambda f(v_{k-1}) + (1 - lambda) f(v_k)` where
    /// `x = lambda v_{k-1} + (1 - lambda) v_k`.
    pub fn evaluate(&self, x: &Rational) -> Result<Rational, EvalError> {
        let k = self.locate(x)?;
        let (left, right) = self.grid.edge(k);
        let lambda = (right - x)
            .checked_div(&(right - left))
            .expect("grid is strictly increasing");
        let complement = Rational::one() - &lambda;
        Ok(&lambda * &self.values[k - 1] + &complement * &self.values[k])
    }

    /// All solutions of `f(x) = x`, sorted and without duplicates.
    pub fn fixed_points(&self) -> Vec<Rational> {
        let mut points: Vec<Rational> = Vec::new();
        for k in 1..=self.grid.edges() {
            let (left, right) = self.grid.edge(k);
            let r_left = &self.values[k - 1] - left;
            let r_right = &self.values[k] - right;
            assert!(
                !(r_left.is_zero() && r_right.is_zero()),
                "edge {k} is fixed pointwise"
            );
            if r_left.is_zero() {
                points.push(left.clone());
            }
            if r_right.is_zero() {
                points.push(right.clone());
            }
            if r_left.signum() * r_right.signum() < 0 {
                // the residual is linear along the edge
                let t = r_left
                    .checked_div(&(&r_left - &r_right))
                    .expect("signs differ");
                points.push(left + &(&t * &(right - left)));
            }
        }
        points.sort();
        points.dedup();
        points
    }

    /// `resolution + 1` evenly spaced samples `(x, f(x))` as CSV.
    pub fn trace_csv(&self, resolution: usize) -> String {
        let resolution = resolution.max(1);
        let samples = Grid::uniform(self.grid.first(), self.grid.last(), resolution)
            .expect("grid spans a non-empty interval");
        let mut out = String::from("x,fx\n");
        for x in samples.vertices() {
            let fx = self.evaluate(x).expect("sample lies in the domain");
            writeln!(out, "{x},{fx}").unwrap();
        }
        out
    }
}

impl RationalMap for PlMap {
    fn apply(&self, x: &Rational) -> Result<Rational, EvalError> {
        self.evaluate(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedPointWitness {
    pub x: Rational,
    pub edge: usize,
    pub left_label: Label,
    pub right_label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub fixed_points: Vec<FixedPointWitness>,
    pub hetero_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundtripError {
    #[error(transparent)]
    Labeling(#[from] LabelingError),
    #[error("fixed point {x} sits on vertex {index}")]
    FixedPointAtVertex { x: Rational, index: usize },
    #[error("fixed point {x} lies on monochromatic edge {edge}")]
    MonochromaticFixedPoint { x: Rational, edge: usize },
    #[error("hetero edge {edge} holds {count} fixed points")]
    HeteroEdgeCount { edge: usize, count: usize },
    #[error("no fixed point found")]
    NoFixedPoint,
}

/// Builds the extension for `labeling`, finds every fixed point and checks
/// that each one sits strictly inside an edge whose labels differ, with
/// exactly one per such edge.
pub fn theorem_roundtrip(
    grid: &Grid,
    labeling: &Labeling,
) -> Result<RoundtripReport, RoundtripError> {
    let map = PlMap::from_labeling(grid, labeling)?;
    let labels = labeling.labels();
    let points = map.fixed_points();
    if points.is_empty() {
        return Err(RoundtripError::NoFixedPoint);
    }
    let hetero_edges: Vec<usize> = (1..=grid.edges())
        .filter(|&k| labeling.is_hetero(k))
        .collect();
    let mut per_edge = vec![0usize; grid.edges() + 1];
    let mut fixed_points = Vec::with_capacity(points.len());
    for x in points {
        if let Some(index) = grid.vertices().iter().position(|v| *v == x) {
            return Err(RoundtripError::FixedPointAtVertex { x, index });
        }
        let edge = map.locate(&x).expect("fixed points lie in the domain");
        if !labeling.is_hetero(edge) {
            return Err(RoundtripError::MonochromaticFixedPoint { x, edge });
        }
        per_edge[edge] += 1;
        fixed_points.push(FixedPointWitness {
            x,
            edge,
            left_label: labels[edge - 1],
            right_label: labels[edge],
        });
    }
    if let Some(&edge) = hetero_edges.iter().find(|&&k| per_edge[k] != 1) {
        return Err(RoundtripError::HeteroEdgeCount {
            edge,
            count: per_edge[edge],
        });
    }
    Ok(RoundtripReport {
        fixed_points,
        hetero_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn grid(ints: &[i64]) -> Grid {
        Grid::new(ints.iter().map(|&i| Rational::from(i)).collect()).unwrap()
    }

    fn labeling(text: &str) -> Labeling {
        text.parse().unwrap()
    }

    #[test]
    fn discrete_examples() {
        let m = DiscreteMap::from_labeling(&grid(&[0, 1, 2]), &labeling("0,0,1")).unwrap();
        assert_eq!(m.targets(), &[1, 2, 1]);
        let m = DiscreteMap::from_labeling(&grid(&[0, 1]), &labeling("0,1")).unwrap();
        assert_eq!(m.targets(), &[1, 0]);
        let m = DiscreteMap::from_labeling(&grid(&[0, 1, 2, 3]), &labeling("0,1,0,1")).unwrap();
        assert_eq!(m.targets(), &[1, 0, 3, 2]);
        assert!(matches!(
            DiscreteMap::from_labeling(&grid(&[0, 1, 2]), &labeling("0,1")),
            Err(LabelingError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let m = PlMap::from_labeling(&grid(&[0, 1, 2]), &labeling("0,0,1")).unwrap();
        assert_eq!(m.evaluate(&rat(1, 2)).unwrap(), rat(3, 2));
        for (j, v) in m.grid().vertices().iter().enumerate() {
            assert_eq!(&m.evaluate(v).unwrap(), &m.values()[j]);
        }
        let swap = PlMap::from_labeling(&grid(&[0, 1]), &labeling("0,1")).unwrap();
        assert_eq!(swap.evaluate(&rat(1, 4)).unwrap(), rat(3, 4));
        assert!(matches!(
            swap.evaluate(&rat(5, 4)),
            Err(EvalError::OutOfDomain { .. })
        ));
        assert!(swap.evaluate(&rat(-1, 4)).is_err());
    }

    #[test]
    fn locate_prefers_left_edge_at_shared_vertex() {
        let m = PlMap::from_labeling(&grid(&[0, 1, 2]), &labeling("0,0,1")).unwrap();
        assert_eq!(m.locate(&rat(0, 1)).unwrap(), 1);
        assert_eq!(m.locate(&rat(1, 1)).unwrap(), 1);
        assert_eq!(m.locate(&rat(3, 2)).unwrap(), 2);
        assert_eq!(m.locate(&rat(2, 1)).unwrap(), 2);
    }

    #[test]
    fn fixed_point_examples() {
        let m = PlMap::from_labeling(&grid(&[0, 1, 2]), &labeling("0,0,1")).unwrap();
        assert_eq!(m.fixed_points(), vec![rat(3, 2)]);
        let m = PlMap::from_labeling(&grid(&[0, 1]), &labeling("0,1")).unwrap();
        assert_eq!(m.fixed_points(), vec![rat(1, 2)]);
        let m = PlMap::from_labeling(&grid(&[0, 1, 2, 3]), &labeling("0,1,0,1")).unwrap();
        assert_eq!(m.fixed_points(), vec![rat(1, 2), rat(3, 2), rat(5, 2)]);
    }

    #[test]
    fn non_uniform_fixed_point_solves_edge_equation() {
        // edge [1, 4] maps 1 -> 4 and 4 -> 1: the swap crosses at 5/2
        let g = Grid::new(vec![rat(0, 1), rat(1, 1), rat(4, 1), rat(9, 2)]).unwrap();
        let m = PlMap::from_labeling(&g, &labeling("0,0,1,1")).unwrap();
        let fps = m.fixed_points();
        assert_eq!(fps, vec![rat(5, 2)]);
        assert_eq!(m.evaluate(&fps[0]).unwrap(), fps[0]);
    }

    #[test]
    fn roundtrip_example() {
        let report = theorem_roundtrip(&grid(&[0, 1, 2]), &labeling("0,0,1")).unwrap();
        assert_eq!(
            report.fixed_points,
            vec![FixedPointWitness {
                x: rat(3, 2),
                edge: 2,
                left_label: Label::Zero,
                right_label: Label::One
            }]
        );
        assert_eq!(report.hetero_edges, vec![2]);
    }

    #[test]
    fn trace_has_header_and_samples() {
        let m = PlMap::from_labeling(&grid(&[0, 1]), &labeling("0,1")).unwrap();
        assert_eq!(
            m.trace_csv(4),
            "x,fx\n0,1\n1/4,3/4\n1/2,1/2\n3/4,1/4\n1,0\n"
        );
    }
}
