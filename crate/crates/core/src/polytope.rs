//! Exact rational linear algebra and vertex enumeration for polytopes
//! `{p ≥ 0 : Mp = b}`.
//!
//! Everything here is over arbitrary-precision rationals. Vertices are found
//! as basic feasible solutions: every `rank`-subset of columns is tried, the
//! square subsystem solved exactly, and nonnegative solutions kept.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::dist::{Distribution, Rational, StateSpace};
use crate::error::{Error, Result};
use crate::family::{margin_statistics_matrix, MarginFamily};
use crate::ops::{self, Op};

/// Default cap on the number of columns handed to vertex enumeration.
pub const DEFAULT_COLUMN_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                left: r.len(),
                right: cols,
            });
        }
        Ok(RationalMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers<T: Copy + Into<i64>>(rows: &[Vec<T>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into().into())).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Submatrix keeping the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> RationalMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)].clone();
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut RationalMatrix, col_limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..col_limit {
        if row == m.rows {
            break;
        }
        let Some(pivot_row) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        if pivot_row != row {
            for c in 0..m.cols {
                m.data.swap(pivot_row * m.cols + c, row * m.cols + c);
            }
        }
        let inv = m[(row, col)].recip();
        for c in col..m.cols {
            let v = &m[(row, c)] * &inv;
            m[(row, c)] = v;
        }
        for r in 0..m.rows {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for c in col..m.cols {
                if m[(row, c)].is_zero() {
                    continue;
                }
                let v = &m[(r, c)] - &factor * &m[(row, c)];
                m[(r, c)] = v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernel {
    pub rank: usize,
    /// One basis vector per free column, with a 1 in that column.
    pub kernel: Vec<Vec<Rational>>,
    pub pivot_columns: Vec<usize>,
}

pub fn rational_rank_and_kernel(m: &RationalMatrix) -> Result<RankKernel> {
    ops::record(Op::RationalRankAndKernel);
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::InvalidArgument("matrix is empty".into()));
    }
    let mut work = m.clone();
    let pivots = rref(&mut work, m.cols);
    let mut is_pivot = vec![None; m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let kernel = (0..m.cols)
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = vec![Rational::zero(); m.cols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -work[(r, free)].clone();
            }
            v
        })
        .collect();
    Ok(RankKernel {
        rank: pivots.len(),
        kernel,
        pivot_columns: pivots,
    })
}

pub fn rank(m: &RationalMatrix) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let mut work = m.clone();
    rref(&mut work, m.cols).len()
}

/// `Mp = b` over the joint states named in `column_labels`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub matrix: RationalMatrix,
    pub rhs: Vec<Rational>,
    pub column_labels: Vec<usize>,
}

impl ConstraintSystem {
    pub fn new(matrix: RationalMatrix, rhs: Vec<Rational>, column_labels: Vec<usize>) -> Result<Self> {
        if rhs.len() != matrix.rows {
            return Err(Error::LengthMismatch {
                left: rhs.len(),
                right: matrix.rows,
            });
        }
        if column_labels.len() != matrix.cols {
            return Err(Error::LengthMismatch {
                left: column_labels.len(),
                right: matrix.cols,
            });
        }
        Ok(ConstraintSystem {
            matrix,
            rhs,
            column_labels,
        })
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.matrix.cols && self.matrix.mul_vec(x) == self.rhs
    }

    /// Independent rows equivalent to the system, or `None` if inconsistent.
    fn reduced(&self) -> Option<(RationalMatrix, Vec<Rational>)> {
        let (rows, cols) = (self.matrix.rows, self.matrix.cols);
        let mut aug = RationalMatrix::zeros(rows, cols + 1);
        for r in 0..rows {
            for c in 0..cols {
                aug[(r, c)] = self.matrix[(r, c)].clone();
            }
            aug[(r, cols)] = self.rhs[r].clone();
        }
        let pivots = rref(&mut aug, cols);
        let rank = pivots.len();
        if (rank..rows).any(|r| !aug[(r, cols)].is_zero()) {
            return None;
        }
        let mut m = RationalMatrix::zeros(rank, cols);
        let mut b = Vec::with_capacity(rank);
        for r in 0..rank {
            for c in 0..cols {
                m[(r, c)] = aug[(r, c)].clone();
            }
            b.push(aug[(r, cols)].clone());
        }
        Some((m, b))
    }
}

/// Solves the square system `a x = b`; `None` if `a` is singular.
fn solve_square(a: &RationalMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.rows;
    let mut aug = RationalMatrix::zeros(n, n + 1);
    for r in 0..n {
        for c in 0..n {
            aug[(r, c)] = a[(r, c)].clone();
        }
        aug[(r, n)] = b[r].clone();
    }
    if rref(&mut aug, n).len() < n {
        return None;
    }
    Some((0..n).map(|r| aug[(r, n)].clone()).collect())
}

pub fn enumerate_vertices(sys: &ConstraintSystem) -> Result<Vec<Vec<Rational>>> {
    enumerate_vertices_capped(sys, DEFAULT_COLUMN_CAP)
}

/// Exact vertex set of `{x ≥ 0 : Mx = b}`, sorted lexicographically by the
/// position of the first nonzero entry (descending weight order within ties is
/// not used; vectors are compared entry-wise after that).
pub fn enumerate_vertices_capped(sys: &ConstraintSystem, column_cap: usize) -> Result<Vec<Vec<Rational>>> {
    ops::record(Op::EnumerateVertices);
    let cols = sys.matrix.cols;
    if cols > column_cap {
        return Err(Error::CapExceeded {
            what: "vertex enumeration columns",
            cap: column_cap as u128,
            required: cols as u128,
        });
    }
    let Some((m, b)) = sys.reduced() else {
        return Ok(Vec::new());
    };
    let r = m.rows;
    if r == 0 {
        let origin = vec![Rational::zero(); cols];
        return Ok(if cols == 0 { Vec::new() } else { vec![origin] });
    }

    let found: BTreeSet<Vec<Rational>> = (0..cols)
        .combinations(r)
        .par_bridge()
        .filter_map(|basis| {
            let square = m.select_columns(&basis);
            let xb = solve_square(&square, &b)?;
            if xb.iter().any(Signed::is_negative) {
                return None;
            }
            let mut x = vec![Rational::zero(); cols];
            for (&c, v) in basis.iter().zip(xb) {
                x[c] = v;
            }
            Some(x)
        })
        .collect();

    let mut vertices: Vec<Vec<Rational>> = found.into_iter().collect();
    vertices.sort_by(|a, b| vertex_order_key(a).cmp(&vertex_order_key(b)).then_with(|| a.cmp(b)));
    Ok(vertices)
}

/// Support positions in increasing order; vertices compare by these first.
fn vertex_order_key(v: &[Rational]) -> Vec<usize> {
    (0..v.len()).filter(|&i| !v[i].is_zero()).collect()
}

/// True when the columns on the support of `x` are linearly independent,
/// i.e. `x` is not the midpoint of two distinct feasible points.
pub fn is_basic(sys: &ConstraintSystem, x: &[Rational]) -> bool {
    let support: Vec<usize> = (0..x.len()).filter(|&i| !x[i].is_zero()).collect();
    if support.is_empty() {
        return true;
    }
    rank(&sys.matrix.select_columns(&support)) == support.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeReport {
    pub rank: usize,
    /// Column count minus rank (before inequality cuts).
    pub affine_dimension: usize,
    pub kernel_basis: Vec<Vec<Rational>>,
    pub vertices: Vec<Vec<Rational>>,
    pub is_empty: bool,
    pub is_point: bool,
    pub column_labels: Vec<usize>,
}

impl PolytopeReport {
    /// Dimension of the affine hull of the vertices.
    pub fn vertex_span_dimension(&self) -> usize {
        affine_span_dimension(&self.vertices)
    }
}

pub fn affine_span_dimension(points: &[Vec<Rational>]) -> usize {
    let Some((first, rest)) = points.split_first() else {
        return 0;
    };
    if rest.is_empty() {
        return 0;
    }
    let diffs: Vec<Vec<Rational>> = rest
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    rank(&RationalMatrix::from_rows(diffs).expect("equal lengths"))
}

/// Rank, kernel, and vertices of a constraint system.
pub fn analyze(sys: &ConstraintSystem, column_cap: usize) -> Result<PolytopeReport> {
    let cols = sys.matrix.cols;
    let (rank, kernel_basis) = if sys.matrix.rows == 0 || cols == 0 {
        (0, Vec::new())
    } else {
        let rk = rational_rank_and_kernel(&sys.matrix)?;
        (rk.rank, rk.kernel)
    };
    let vertices = if cols == 0 {
        Vec::new()
    } else {
        enumerate_vertices_capped(sys, column_cap)?
    };
    Ok(PolytopeReport {
        rank,
        affine_dimension: cols - rank,
        kernel_basis,
        is_empty: vertices.is_empty(),
        is_point: vertices.len() == 1,
        vertices,
        column_labels: sys.column_labels.clone(),
    })
}

/// Distribution on `space` putting `values[i]` on state `labels[i]`.
pub fn vertex_distribution(space: &StateSpace, labels: &[usize], values: &[Rational]) -> Result<Distribution> {
    let mut weights = vec![Rational::zero(); space.total()];
    for (&l, v) in labels.iter().zip(values) {
        weights[l] = v.clone();
    }
    Distribution::from_exact(space.clone(), weights)
}

/// The margin-specification system for `fam` with the given exact margins,
/// after eliminating joint states whose restriction has margin probability 0.
pub fn margin_specified_system(
    space: &StateSpace,
    fam: &MarginFamily,
    margins: &[Distribution],
) -> Result<ConstraintSystem> {
    if margins.len() != fam.len() {
        return Err(Error::LengthMismatch {
            left: margins.len(),
            right: fam.len(),
        });
    }
    let mut margin_weights = Vec::with_capacity(margins.len());
    for (set, margin) in fam.sets().iter().zip(margins) {
        let expected = space.subspace(set)?;
        if margin.space() != &expected {
            return Err(Error::SpaceMismatch(format!(
                "margin for {set:?} has cardinalities {:?}, expected {:?}",
                margin.space().cardinalities(),
                expected.cardinalities()
            )));
        }
        margin_weights.push(
            margin
                .exact_weights()
                .ok_or(Error::ExactRequired("margin specification"))?,
        );
    }

    let stats = margin_statistics_matrix(fam, space)?;
    let projections: Vec<Vec<usize>> = fam.sets().iter().map(|s| space.projection(s)).collect::<Result<_>>()?;
    let surviving: Vec<usize> = (0..space.total())
        .filter(|&x| {
            projections
                .iter()
                .zip(&margin_weights)
                .all(|(proj, w)| !w[proj[x]].is_zero())
        })
        .collect();

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut offset = 0;
    for w in &margin_weights {
        for (m, value) in w.iter().enumerate() {
            if !value.is_zero() {
                let row = &stats.rows[offset + m];
                rows.push(
                    surviving
                        .iter()
                        .map(|&x| Rational::from_integer(row[x].into()))
                        .collect::<Vec<_>>(),
                );
                rhs.push(value.clone());
            }
        }
        offset += w.len();
    }
    let matrix = if rows.is_empty() {
        RationalMatrix::zeros(0, surviving.len())
    } else {
        RationalMatrix::from_rows(rows)?
    };
    ConstraintSystem::new(matrix, rhs, surviving)
}

/// Solves the margin-specification problem exactly.
pub fn margin_specified_polytope(
    space: &StateSpace,
    fam: &MarginFamily,
    margins: &[Distribution],
) -> Result<PolytopeReport> {
    ops::record(Op::MarginSpecifiedPolytope);
    let sys = margin_specified_system(space, fam, margins)?;
    analyze(&sys, DEFAULT_COLUMN_CAP)
}
