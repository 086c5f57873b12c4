use std::cmp::Reverse;
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Highest polynomial degree supported for both the geometry and the
/// finite element spaces.
pub const MAX_DEGREE: usize = 4;

/// Principal lattice of degree `k` on the `d`-simplex.
///
/// Nodes are multi-indices `α` over the `d + 1` vertices with `|α| = k`,
/// ordered vertices first, then edge nodes (edges in lexicographic vertex
/// order, running from the lower to the higher vertex), then face nodes, then
/// interior nodes.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub dim: usize,
    pub degree: usize,
    pub indices: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl Lattice {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDegree { dim, degree, reason: "dimension must be 1, 2 or 3" });
        }
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::UnsupportedDegree { dim, degree, reason: "degree must lie in 1..=4" });
        }
        let mut indices = Vec::new();
        let mut current = vec![0; dim + 1];
        enumerate(&mut indices, &mut current, 0, degree);
        indices.sort_by_key(|a| {
            let support: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0).collect();
            (support.len(), support, Reverse(a.clone()))
        });
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Ok(Lattice { dim, degree, indices, lookup })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_of(&self, alpha: &[usize]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn barycentric(&self, i: usize) -> Vec<f64> {
        self.indices[i].iter().map(|&a| a as f64 / self.degree as f64).collect()
    }

    /// Nodes lying on the facet opposite local vertex `face`.
    pub fn facet_nodes(&self, face: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.indices[i][face] == 0).collect()
    }
}

fn enumerate(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for a in 0..=remaining {
        current[pos] = a;
        enumerate(out, current, pos + 1, remaining - a);
    }
    current[pos] = 0;
}

/// Barycentric coordinates of the equispaced principal lattice nodes.
pub fn lagrange_nodes(d: usize, k: usize) -> Result<Vec<Vec<f64>>> {
    let lattice = Lattice::new(d, k)?;
    Ok((0..lattice.len()).map(|i| lattice.barycentric(i)).collect())
}
