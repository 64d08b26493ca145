//! Incremental exact row reduction over sparse vectors.

use std::collections::BTreeMap;

use crate::scalar::{Field, Scalar};

pub type SparseVec<K> = BTreeMap<K, Scalar>;

struct Row<K> {
    pivot: K,
    vec: SparseVec<K>,
    /// Expression of `vec` in terms of the inserted inputs.
    combo: Vec<Scalar>,
}

/// Maintains an echelon basis of the span of the vectors inserted so far,
/// remembering how each basis row is built from the inputs.
pub struct SpanSolver<K: Ord + Clone> {
    field: Field,
    rows: Vec<Row<K>>,
    inputs: usize,
}

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Scalar, x: &SparseVec<K>) {
    for (k, v) in x {
        let add = a * v;
        match y.get_mut(k) {
            Some(e) => {
                *e = &*e + &add;
                if e.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !add.is_zero() {
                    y.insert(k.clone(), add);
                }
            }
        }
    }
}

impl<K: Ord + Clone> SpanSolver<K> {
    pub fn new(field: &Field) -> Self {
        SpanSolver {
            field: field.clone(),
            rows: Vec::new(),
            inputs: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows. Returns the remainder and the
    /// coefficients `c` (over inputs) with `v = remainder + Σ c_k input_k`.
    fn reduce(&self, mut v: SparseVec<K>) -> (SparseVec<K>, Vec<Scalar>) {
        let mut coeffs = vec![self.field.zero(); self.inputs];
        for row in &self.rows {
            let Some(a) = v.get(&row.pivot).cloned() else {
                continue;
            };
            axpy(&mut v, &-&a, &row.vec);
            for (c, r) in coeffs.iter_mut().zip(&row.combo) {
                *c = &*c + &(&a * r);
            }
        }
        (v, coeffs)
    }

    /// Inserts an input vector; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let (rem, coeffs) = self.reduce(v);
        let idx = self.inputs;
        self.inputs += 1;
        for row in &mut self.rows {
            row.combo.push(self.field.zero());
        }
        let Some((pivot, lead)) = rem.iter().next().map(|(k, a)| (k.clone(), a.clone())) else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        // rem = input_idx - Σ coeffs_k input_k, normalized by the pivot.
        let mut combo: Vec<Scalar> = coeffs.iter().map(|c| -&(c * &inv)).collect();
        combo.push(inv.clone());
        debug_assert_eq!(combo.len(), idx + 1);
        let vec = rem.into_iter().map(|(k, a)| (k, &a * &inv)).collect();
        self.rows.push(Row { pivot, vec, combo });
        true
    }

    /// Coefficients over the inserted inputs expressing `v`, if in the span.
    pub fn solve(&self, v: SparseVec<K>) -> Option<Vec<Scalar>> {
        let (rem, coeffs) = self.reduce(v);
        rem.is_empty().then_some(coeffs)
    }
}
