//! Solver for diagonal rescalings: find nonzero `d_k` with
//! `lhs · d[dst] = rhs · d[src]` for every constraint.
//!
//! Shared by module intertwiners (where `d` is the map on weight vectors)
//! and by table gauge fitting (where `d` is the basis rescaling).

use std::collections::{BTreeMap, VecDeque};

use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint<K> {
    pub src: K,
    pub dst: K,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl<K: Clone> Constraint<K> {
    pub fn new(src: K, dst: K, lhs: Scalar, rhs: Scalar) -> Self {
        Constraint { src, dst, lhs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagonalFailure<K> {
    /// Exactly one side vanishes, forcing some `d_k = 0`.
    Singular(Constraint<K>),
    /// Propagated values violate a constraint; `via` is the constraint that
    /// fixed the value at the violating end, when there was one.
    Inconsistent {
        violated: Constraint<K>,
        via: Option<Constraint<K>>,
    },
}

/// Solves on `keys`, starting each connected component at `d = 1`.
/// Constraints mentioning keys outside `keys` are ignored.
pub fn solve_diagonal<K: Ord + Clone>(
    field: &Field,
    keys: &[K],
    constraints: &[Constraint<K>],
) -> Result<BTreeMap<K, Scalar>, DiagonalFailure<K>> {
    let index: BTreeMap<&K, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); keys.len()];
    let mut active = Vec::new();
    for (ci, c) in constraints.iter().enumerate() {
        let (Some(&s), Some(&d)) = (index.get(&c.src), index.get(&c.dst)) else {
            continue;
        };
        if c.lhs.is_zero() != c.rhs.is_zero() {
            return Err(DiagonalFailure::Singular(c.clone()));
        }
        active.push(ci);
        if !c.lhs.is_zero() && s != d {
            adj[s].push(ci);
            adj[d].push(ci);
        }
    }

    let mut value: Vec<Option<Scalar>> = vec![None; keys.len()];
    let mut parent: Vec<Option<usize>> = vec![None; keys.len()];
    for root in 0..keys.len() {
        if value[root].is_some() {
            continue;
        }
        value[root] = Some(field.one());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let du = value[u].clone().expect("visited");
            for &ci in &adj[u] {
                let c = &constraints[ci];
                let (s, d) = (index[&c.src], index[&c.dst]);
                let (next, val) = if s == u && value[d].is_none() {
                    (d, &(&c.rhs * &du) * &c.lhs.inv().expect("nonzero"))
                } else if d == u && value[s].is_none() {
                    (s, &(&c.lhs * &du) * &c.rhs.inv().expect("nonzero"))
                } else {
                    continue;
                };
                value[next] = Some(val);
                parent[next] = Some(ci);
                queue.push_back(next);
            }
        }
    }

    let mut out = BTreeMap::new();
    for (k, v) in keys.iter().zip(&value) {
        if let Some(v) = v {
            out.insert(k.clone(), v.clone());
        }
    }
    for ci in active {
        let c = &constraints[ci];
        let ds = &out[&c.src];
        let dd = &out[&c.dst];
        if &c.lhs * dd != &c.rhs * ds {
            let via = parent[index[&c.dst]]
                .or(parent[index[&c.src]])
                .map(|p| constraints[p].clone());
            return Err(DiagonalFailure::Inconsistent {
                violated: c.clone(),
                via,
            });
        }
    }
    Ok(out)
}
