//! Simplicial cells: formed simplices whose interior no other hyperplane crosses.

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{self, binomial, Combinations};
use crate::error::{Error, Result};
use crate::geometry::{simplex_of_hyperplanes, simplex_of_subset, Arrangement, Hyperplane, Point};
use crate::scalar::Scalar;

const CHUNK: u64 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub n: usize,
    pub dim: usize,
    pub count: usize,
    /// Sorted label subsets, in lexicographic order.
    pub cells: Vec<Vec<u32>>,
}

/// A hyperplane crosses the simplex when two vertices lie strictly on
/// opposite sides of it.
fn crosses<S: Scalar>(h: &Hyperplane<S>, vertices: &[Point<S>]) -> bool {
    let mut seen = 0i8;
    for v in vertices {
        let s = h.side(v);
        if s != 0 {
            if seen == -s {
                return true;
            }
            seen = s;
        }
    }
    false
}

pub fn is_simplicial_cell<S: Scalar>(a: &Arrangement<S>, labels: &[u32]) -> Result<bool> {
    let simplex = match simplex_of_subset(a, labels) {
        Ok(s) => s,
        Err(Error::Degenerate) => {
            let mut sorted = labels.to_vec();
            sorted.sort_unstable();
            return Err(Error::DegenerateSubset(sorted));
        }
        Err(e) => return Err(e),
    };
    Ok(a
        .hyperplanes()
        .iter()
        .enumerate()
        .filter(|(i, _)| !simplex.defining.contains(&a.label_at(*i)))
        .all(|(_, h)| !crosses(h, &simplex.vertices)))
}

fn cell_at<S: Scalar>(a: &Arrangement<S>, idx: &[usize]) -> Option<Vec<u32>> {
    let hs: Vec<_> = idx.iter().map(|&i| &a.hyperplanes()[i]).collect();
    let (vertices, _) = simplex_of_hyperplanes(&hs)?;
    let uncrossed = a
        .hyperplanes()
        .iter()
        .enumerate()
        .filter(|(i, _)| !idx.contains(i))
        .all(|(_, h)| !crosses(h, &vertices));
    uncrossed.then(|| {
        let mut labels: Vec<u32> = idx.iter().map(|&i| a.label_at(i)).collect();
        labels.sort_unstable();
        labels
    })
}

pub fn count_simplicial_cells<S: Scalar>(a: &Arrangement<S>) -> CellReport {
    let n = a.len();
    let k = a.dim() + 1;
    let total = binomial(n as u64, k as u64);
    let mut cells: Vec<Vec<u32>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let start = c * CHUNK;
            let first = combinatorics::unrank(start, n, k);
            Combinations::starting_at(n, first)
                .take(CHUNK.min(total - start) as usize)
                .filter_map(|idx| cell_at(a, &idx))
                .collect::<Vec<_>>()
        })
        .collect();
    cells.sort();
    CellReport {
        n,
        dim: a.dim(),
        count: cells.len(),
        cells,
    }
}
