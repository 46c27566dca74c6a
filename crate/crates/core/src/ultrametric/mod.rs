//! Ultrametric matrices, their verification, and the ideal/filter constructions.

mod construct;
pub mod fixtures;
mod generate;
pub mod io;
mod padic;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extended::Extended;
use crate::filters::FilterError;
use crate::scalar::Scalar;
use crate::subset::Subset;

pub use construct::{
    ball_ideal_base, deinfinitate, filter_to_ultrametric, ideal_to_ultrametric, roundtrip_check, ultradiameter,
    BallIdealBase, ConstructionOptions, DiameterFunction, Monotonicity, RoundtripReport,
};
pub use generate::{random_tree_ultrametric, TreeShape};
pub use padic::{is_prime, padic_norm, padic_sample, padic_valuation, MAX_VALUATION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UltrametricError {
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("negative distance between points {0} and {1}")]
    NegativeDistance(usize, usize),
    #[error("unknown point index {0}")]
    UnknownPoint(usize),
    #[error("not an ultrametric: triple ({0}, {1}, {2}) violates the triangle inequality")]
    NotUltrametric(usize, usize, usize),
    #[error("family is not an ideal")]
    NotAnIdeal,
    #[error("family is not a filter")]
    NotAFilter,
    #[error("ideal does not cover the ground set; missing {0:?}")]
    CoverageError(Vec<usize>),
    #[error("diameter function is not {expected:?} between {smaller:?} and {larger:?}")]
    MonotonicityError { expected: Monotonicity, smaller: Vec<usize>, larger: Vec<usize> },
    #[error("degenerate distance 0 between distinct points {0} and {1}")]
    DegenerateDistance(usize, usize),
    #[error("diameter value on {0:?} is not strictly positive")]
    NonPositiveDiameter(Vec<usize>),
    #[error("diameter function has no value on {0:?}")]
    MissingDiameter(Vec<usize>),
    #[error("deinfinitation needs a strictly positive input")]
    NonPositiveInput,
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("exact arithmetic capacity exceeded: {0}")]
    CapacityError(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Which tropical sum the triangle inequality uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Form {
    /// `d(x,y) <= max{d(x,z), d(z,y)}`.
    MaxForm,
    /// `min{d(x,z), d(z,y)} <= d(x,y)`.
    MinForm,
}

/// A symmetric matrix of extended distances over labelled points.
#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricMatrix<T> {
    points: Vec<String>,
    d: Vec<Vec<Extended<T>>>,
    form: Form,
}

impl<T: Scalar> UltrametricMatrix<T> {
    /// Checks only that the matrix is square and matches the labels.
    pub fn new(points: Vec<String>, d: Vec<Vec<Extended<T>>>, form: Form) -> Result<Self, UltrametricError> {
        let n = points.len();
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(UltrametricError::ShapeError(format!("expected a {n}x{n} matrix")));
        }
        Ok(UltrametricMatrix { points, d, form })
    }

    /// Builds a symmetric matrix from the upper triangle; labels are `1..=n`.
    pub fn from_fn(n: usize, form: Form, mut f: impl FnMut(usize, usize) -> Extended<T>) -> Self {
        let mut d = vec![vec![Extended::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[j][i] = v.clone();
                d[i][j] = v;
            }
        }
        UltrametricMatrix { points: default_labels(n), d, form }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn with_form(mut self, form: Form) -> Self {
        self.form = form;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &Extended<T> {
        &self.d[i][j]
    }

    pub fn rows(&self) -> &[Vec<Extended<T>>] {
        &self.d
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> UltrametricMatrix<U> {
        let d = self
            .d
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| match v {
                        Extended::NegInf => Extended::NegInf,
                        Extended::Finite(x) => Extended::Finite(f(x)),
                        Extended::PosInf => Extended::PosInf,
                    })
                    .collect()
            })
            .collect();
        UltrametricMatrix { points: self.points.clone(), d, form: self.form }
    }

    pub fn to_f64(&self) -> UltrametricMatrix<f64> {
        self.map(|x| x.to_f64())
    }

    /// Largest off-diagonal entry (0 for fewer than two points).
    pub fn max_distance(&self) -> Extended<T> {
        let mut best = Extended::zero();
        for (i, row) in self.d.iter().enumerate() {
            for v in &row[i + 1..] {
                if *v > best {
                    best = v.clone();
                }
            }
        }
        best
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// A triple `(x, y, z)` breaking the triangle inequality by `excess`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub excess: Extended<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<T> {
    /// The form's triangle inequality holds on every triple.
    pub valid: bool,
    /// `d(x,z) ⊕ d(z,y) ⊕ d(x,y) = d(x,z) ⊕ d(x,y)` on every ordered triple.
    pub algebraic_valid: bool,
    pub forms_agree: bool,
    /// Every off-diagonal distance is strictly positive.
    pub positive: bool,
    /// Largest violation; ties go to the lexicographically smallest triple.
    pub worst: Option<Violation<T>>,
}

fn excess<T: Scalar>(lhs: &Extended<T>, rhs: &Extended<T>) -> Extended<T> {
    match (lhs, rhs) {
        (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.clone() - b.clone()),
        _ if lhs > rhs => Extended::PosInf,
        _ => Extended::zero(),
    }
}

fn ext_max<T: Scalar>(a: &Extended<T>, b: &Extended<T>) -> Extended<T> {
    if b > a {
        b.clone()
    } else {
        a.clone()
    }
}

fn ext_min<T: Scalar>(a: &Extended<T>, b: &Extended<T>) -> Extended<T> {
    if b < a {
        b.clone()
    } else {
        a.clone()
    }
}

fn tropical_sum<T: Scalar>(form: Form, a: &Extended<T>, b: &Extended<T>) -> Extended<T> {
    match form {
        Form::MaxForm => ext_max(a, b),
        Form::MinForm => ext_min(a, b),
    }
}

/// Checks the matrix's own form on all triples of distinct points, plus the
/// form-free algebraic reduction.
///
/// Triples with a repeated point are skipped: the min form cannot hold on them.
/// `tol` is ignored for exact scalars.
pub fn verify_ultrametric<T: Scalar>(
    m: &UltrametricMatrix<T>,
    tol: f64,
) -> Result<VerifyReport<T>, UltrametricError> {
    let n = m.len();
    let zero = Extended::<T>::zero();
    let mut positive = true;
    for i in 0..n {
        if !m.d[i][i].ties(&zero, tol) {
            return Err(UltrametricError::ShapeError(format!("nonzero diagonal at point {}", i + 1)));
        }
        for j in 0..n {
            if m.d[i][j] < zero && !m.d[i][j].ties(&zero, tol) {
                return Err(UltrametricError::NegativeDistance(i, j));
            }
            if !m.d[i][j].ties(&m.d[j][i], tol) {
                return Err(UltrametricError::ShapeError(format!("asymmetric at ({}, {})", i + 1, j + 1)));
            }
            if i != j && m.d[i][j].ties(&zero, tol) {
                positive = false;
            }
        }
    }

    let form = m.form;
    let per_x: Vec<(Option<Violation<T>>, bool)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut worst: Option<Violation<T>> = None;
            let mut algebraic = true;
            for y in (0..n).filter(|&y| y != x) {
                for z in (0..n).filter(|&z| z != x && z != y) {
                    let (dxz, dzy, dxy) = (&m.d[x][z], &m.d[z][y], &m.d[x][y]);
                    let (lhs, rhs) = match form {
                        Form::MaxForm => (dxy.clone(), ext_max(dxz, dzy)),
                        Form::MinForm => (ext_min(dxz, dzy), dxy.clone()),
                    };
                    if lhs > rhs && !lhs.ties(&rhs, tol) {
                        let e = excess(&lhs, &rhs);
                        if worst.as_ref().map_or(true, |w| e > w.excess) {
                            worst = Some(Violation { x, y, z, excess: e });
                        }
                    }
                    let three = tropical_sum(form, &tropical_sum(form, dxz, dzy), dxy);
                    if !three.ties(&tropical_sum(form, dxz, dxy), tol) {
                        algebraic = false;
                    }
                }
            }
            (worst, algebraic)
        })
        .collect();

    let mut worst: Option<Violation<T>> = None;
    let mut algebraic_valid = true;
    for (w, alg) in per_x {
        algebraic_valid &= alg;
        if let Some(w) = w {
            if worst.as_ref().map_or(true, |b| w.excess > b.excess) {
                worst = Some(w);
            }
        }
    }
    let valid = worst.is_none();
    Ok(VerifyReport { valid, algebraic_valid, forms_agree: valid == algebraic_valid, positive, worst })
}

/// Closed ball `{x : d(x, center) <= radius}`.
pub fn ball<T: Scalar>(
    m: &UltrametricMatrix<T>,
    center: usize,
    radius: &Extended<T>,
) -> Result<Subset, UltrametricError> {
    if center >= m.len() {
        return Err(UltrametricError::UnknownPoint(center));
    }
    Ok((0..m.len()).filter(|&x| m.d[center][x] <= *radius).collect())
}
