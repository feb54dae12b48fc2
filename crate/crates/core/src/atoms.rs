//! Atom weights over a finite node set.
//!
//! For distinct nodes `x_1..x_n` the weights `A(x_i) = 1 / prod_{j != i}(x_i - x_j)`
//! satisfy the moment conditions `sum x_i^s A(x_i) = 0` for `s <= n-2` and
//! `sum x_i^(n-1) A(x_i) = 1`. The weights are also the leading coefficients
//! of the Lagrange basis polynomials, which gives an independent oracle.
//!
//! Nodes may be complex: the algebra is field-generic and real Cauchy-Euler
//! operators can have complex characteristic roots.

use num::complex::Complex64;
use num::rational::BigRational;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Scalar};

/// Nodes closer than `SEPARATION_REL_TOL * (1 + max|x_i|)` are rejected.
pub const SEPARATION_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<S> {
    nodes: Vec<S>,
}

impl<S: Scalar> NodeSet<S> {
    pub fn new(nodes: Vec<S>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyNodeSet);
        }
        let values: Vec<Complex64> = nodes.iter().map(|x| x.to_complex()).collect();
        check_separation(&values)?;
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if nodes[i] == nodes[j] {
                    return Err(Error::DegenerateNodes { i, j, gap: 0.0 });
                }
            }
        }
        Ok(NodeSet { nodes })
    }

    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl NodeSet<BigRational> {
    /// Parses a JSON array whose entries are numbers or `"p/q"` strings.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let items = value.as_array().ok_or_else(|| Error::InvalidInput("node set must be a JSON array".into()))?;
        let nodes = items.iter().map(json_rational).collect::<Result<Vec<_>>>()?;
        NodeSet::new(nodes)
    }
}

/// Reads a JSON number or numeric string as an exact rational.
pub(crate) fn json_rational(v: &Value) -> Result<BigRational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Error::InvalidInput(format!("expected a number, got {}", other))),
    };
    parse_rational(&text).ok_or_else(|| Error::InvalidInput(format!("malformed number `{}`", text)))
}

/// Fails with the closest offending pair when two values are within the
/// separation tolerance.
pub fn check_separation(values: &[Complex64]) -> Result<()> {
    let max_abs = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = SEPARATION_REL_TOL * (1.0 + max_abs);
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            let gap = (values[i] - values[j]).norm();
            if gap < tol && worst.is_none_or(|(_, _, g)| gap < g) {
                worst = Some((i, j, gap));
            }
        }
    }
    match worst {
        Some((i, j, gap)) => Err(Error::DegenerateNodes { i, j, gap }),
        None => Ok(()),
    }
}

/// Weights aligned with the node order of the set they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomWeights<S> {
    weights: Vec<S>,
}

impl<S: Scalar> AtomWeights<S> {
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AtomWeights<T> {
        AtomWeights { weights: self.weights.iter().map(f).collect() }
    }
}

/// `A(x_i) = 1 / prod_{j != i}(x_i - x_j)`, O(n^2).
///
/// Real doubles form the differences and product in double-double. Float
/// scalars switch to log-magnitude accumulation when a partial product leaves
/// `[1e-300, 1e300]`.
pub fn compute_atoms<S: Scalar>(x: &NodeSet<S>) -> AtomWeights<S> {
    let nodes = x.nodes();
    let mut others = Vec::with_capacity(nodes.len());
    let weights = nodes
        .iter()
        .enumerate()
        .map(|(i, xi)| {
            others.clear();
            others.extend(nodes.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, xj)| xj.clone()));
            S::inv_product_of_differences(xi, &others)
        })
        .collect();
    AtomWeights { weights }
}

/// `M(A, s) = sum x_i^s A(x_i)`.
///
/// Real doubles accumulate in double-double, leaving the rounding of the
/// weights themselves as the dominant error.
pub fn moment<S: Scalar>(a: &AtomWeights<S>, x: &NodeSet<S>, s: u32) -> S {
    assert_eq!(a.len(), x.len(), "weights must be aligned with the node set");
    S::power_dot(x.nodes(), a.weights(), s)
}

/// Largest `|x_i^s A(x_i)|`, the scale against which cancellation in
/// [`moment`] is judged.
pub fn moment_scale<S: Scalar>(a: &AtomWeights<S>, x: &NodeSet<S>, s: u32) -> f64 {
    summands(a, x, s).map(|v| v.magnitude()).fold(0.0, f64::max)
}

fn summands<'a, S: Scalar>(a: &'a AtomWeights<S>, x: &'a NodeSet<S>, s: u32) -> impl Iterator<Item = S> + 'a {
    assert_eq!(a.len(), x.len(), "weights must be aligned with the node set");
    x.nodes().iter().zip(a.weights()).map(move |(xi, ai)| pow(xi, s) * ai.clone())
}

fn pow<S: Scalar>(x: &S, s: u32) -> S {
    (0..s).fold(S::one(), |acc, _| acc * x.clone())
}

/// Leading coefficient of each Lagrange basis polynomial, by expanding
/// `prod_{j != i} (x - x_j)/(x_i - x_j)` coefficient by coefficient.
pub fn lagrange_leading_coefficients<S: Scalar>(x: &NodeSet<S>) -> Vec<S> {
    let nodes = x.nodes();
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let mut poly = vec![S::one()];
            for (j, xj) in nodes.iter().enumerate() {
                if j == i {
                    continue;
                }
                let denom = nodes[i].clone() - xj.clone();
                let mut next = vec![S::zero(); poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] = next[k + 1].clone() + c.clone() / denom.clone();
                    next[k] = next[k].clone() - c.clone() * xj.clone() / denom.clone();
                }
                poly = next;
            }
            poly[n - 1].clone()
        })
        .collect()
}
