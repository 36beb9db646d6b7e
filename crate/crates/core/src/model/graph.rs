use super::Instance;

const NIL: usize = usize::MAX;

/// Interaction multigraph with intrusive doubly linked adjacency lists.
///
/// Each constraint `c` owns two half-edges: `2c` leaves `u` towards `v` and
/// `2c + 1` leaves `v` towards `u`. Removing a constraint unlinks both in
/// constant time, removing a qubit costs its current degree.
#[derive(Clone, Debug)]
pub struct InteractionGraph {
    ends: Vec<[usize; 2]>,
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    live_q: Vec<bool>,
    live_c: Vec<bool>,
    degree: Vec<usize>,
    nq: usize,
    nc: usize,
}

impl InteractionGraph {
    pub fn new(n: usize, ends: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = InteractionGraph {
            ends: Vec::new(),
            head: vec![NIL; n],
            next: Vec::new(),
            prev: Vec::new(),
            live_q: vec![true; n],
            live_c: Vec::new(),
            degree: vec![0; n],
            nq: n,
            nc: 0,
        };
        for (u, v) in ends {
            assert!(u < n && v < n && u != v, "bad constraint ends");
            let c = g.ends.len();
            g.ends.push([u, v]);
            g.live_c.push(true);
            g.next.extend([NIL, NIL]);
            g.prev.extend([NIL, NIL]);
            g.link(2 * c, u);
            g.link(2 * c + 1, v);
            g.nc += 1;
        }
        g
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Self::new(inst.n(), inst.constraints().iter().map(|c| (c.u, c.v)))
    }

    fn link(&mut self, h: usize, q: usize) {
        let first = self.head[q];
        self.next[h] = first;
        self.prev[h] = NIL;
        if first != NIL {
            self.prev[first] = h;
        }
        self.head[q] = h;
        self.degree[q] += 1;
    }

    fn unlink(&mut self, h: usize) {
        let q = self.from(h);
        let (p, n) = (self.prev[h], self.next[h]);
        if p == NIL {
            self.head[q] = n;
        } else {
            self.next[p] = n;
        }
        if n != NIL {
            self.prev[n] = p;
        }
        self.next[h] = NIL;
        self.prev[h] = NIL;
        self.degree[q] -= 1;
    }

    pub fn n(&self) -> usize {
        self.head.len()
    }

    pub fn m(&self) -> usize {
        self.ends.len()
    }

    pub fn first(&self, q: usize) -> Option<usize> {
        let h = self.head[q];
        (h != NIL).then_some(h)
    }

    pub fn next_half(&self, h: usize) -> Option<usize> {
        let n = self.next[h];
        (n != NIL).then_some(n)
    }

    /// Constraint owning half-edge `h`.
    pub fn constraint(h: usize) -> usize {
        h >> 1
    }

    /// Whether `h` runs from the constraint's `u` to its `v`.
    pub fn forward(h: usize) -> bool {
        h & 1 == 0
    }

    pub fn from(&self, h: usize) -> usize {
        self.ends[h >> 1][h & 1]
    }

    pub fn to(&self, h: usize) -> usize {
        self.ends[h >> 1][1 - (h & 1)]
    }

    pub fn ends(&self, c: usize) -> (usize, usize) {
        (self.ends[c][0], self.ends[c][1])
    }

    pub fn half_edges(&self, q: usize) -> HalfEdges<'_> {
        HalfEdges {
            g: self,
            cur: self.head[q],
        }
    }

    pub fn degree(&self, q: usize) -> usize {
        self.degree[q]
    }

    pub fn is_live_qubit(&self, q: usize) -> bool {
        self.live_q[q]
    }

    pub fn is_live_constraint(&self, c: usize) -> bool {
        self.live_c[c]
    }

    pub fn live_qubits(&self) -> usize {
        self.nq
    }

    pub fn live_constraints(&self) -> usize {
        self.nc
    }

    pub fn remove_constraint(&mut self, c: usize) {
        if !self.live_c[c] {
            return;
        }
        self.unlink(2 * c);
        self.unlink(2 * c + 1);
        self.live_c[c] = false;
        self.nc -= 1;
    }

    /// Removes `q` with all its incident constraints.
    pub fn remove_qubit(&mut self, q: usize) {
        if !self.live_q[q] {
            return;
        }
        while self.head[q] != NIL {
            let h = self.head[q];
            self.remove_constraint(h >> 1);
        }
        self.live_q[q] = false;
        self.nq -= 1;
    }

    pub fn remove_assigned(&mut self, qs: &[usize]) {
        for &q in qs {
            self.remove_qubit(q);
        }
    }
}

pub struct HalfEdges<'a> {
    g: &'a InteractionGraph,
    cur: usize,
}

impl Iterator for HalfEdges<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.cur == NIL {
            return None;
        }
        let h = self.cur;
        self.cur = self.g.next[h];
        Some(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removal_keeps_lists_consistent() {
        let mut g = InteractionGraph::new(4, [(0, 1), (1, 2), (2, 3), (1, 3), (0, 1)]);
        assert_eq!(g.degree(1), 4);
        g.remove_constraint(1);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.degree(2), 1);
        let mut cs: Vec<usize> = g.half_edges(1).map(InteractionGraph::constraint).collect();
        cs.sort();
        assert_eq!(cs, vec![0, 3, 4]);
        g.remove_assigned(&[3]);
        assert_eq!(g.live_constraints(), 2);
        assert_eq!(g.live_qubits(), 3);
        assert_eq!(g.degree(2), 0);
        for h in g.half_edges(0) {
            assert_eq!(g.from(h), 0);
            assert_eq!(g.to(h), 1);
        }
    }
}
