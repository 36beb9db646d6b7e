use std::collections::HashMap;

use super::{SolveError, Solver};
use crate::model::InteractionGraph;
use crate::transfer::{proportional, TransferMatrix};

/// A cycle whose matrix, based at `base`, is not a multiple of the identity.
#[derive(Clone, Debug)]
pub struct CycleFound {
    pub base: usize,
    pub matrix: TransferMatrix,
}

fn adjugate(m: &TransferMatrix) -> TransferMatrix {
    let [a, b, c, d] = &m.t;
    TransferMatrix {
        t: [d.clone(), -b, -c, a.clone()],
    }
}

impl Solver<'_> {
    /// Depth-first search over the component of `start` keeping the walk
    /// operator from `start` to each visited qubit. Every half-edge is
    /// examined at most once; a non-tree edge whose two walk operators
    /// disagree closes a discretizing cycle.
    pub fn find_discretizing_cycle(
        &mut self,
        start: usize,
    ) -> Result<Option<CycleFound>, SolveError> {
        let mut paths: HashMap<usize, TransferMatrix> = HashMap::new();
        paths.insert(start, TransferMatrix::identity(self.inst.base_level()));
        let mut stack = vec![(start, self.graph.first(start))];
        while let Some(top) = stack.last_mut() {
            let Some(h) = top.1 else {
                stack.pop();
                continue;
            };
            top.1 = self.graph.next_half(h);
            let q = top.0;
            self.traversals += 1;
            let c = InteractionGraph::constraint(h);
            if self.products[c].is_some() {
                return Err(SolveError::Internal(format!(
                    "product constraint {c} reached the cycle search"
                )));
            }
            let t = &self.transfers[c][usize::from(!InteractionGraph::forward(h))];
            let w = self.graph.to(h);
            let image = t.mul(&paths[&q]);
            match paths.get(&w) {
                Some(pw) => {
                    if !proportional(&pw.t, &image.t) {
                        // based at q: step to w, walk back to start, walk out to q
                        let matrix = paths[&q].mul(&adjugate(pw)).mul(t);
                        return Ok(Some(CycleFound { base: q, matrix }));
                    }
                }
                None => {
                    paths.insert(w, image);
                    stack.push((w, self.graph.first(w)));
                }
            }
        }
        Ok(None)
    }
}
