//! Unit-capacity max flow via BFS augmentation (Edmonds-Karp).
//!
//! Worst case O(V * E) on these lattices since every augmenting path adds
//! one unit and the crossing count is bounded by a rectangle side.

pub const UNSET: u32 = u32::MAX;

pub struct FlowGraph {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    residual: Vec<u32>,
    init: Vec<u32>,
}

impl FlowGraph {
    pub fn new(vertices: usize) -> Self {
        FlowGraph {
            adj: vec![Vec::new(); vertices],
            to: Vec::new(),
            residual: Vec::new(),
            init: Vec::new(),
        }
    }

    fn push_arc(&mut self, u: u32, v: u32, cap: u32) -> u32 {
        let id = self.to.len() as u32;
        self.adj[u as usize].push(id);
        self.to.push(v);
        self.residual.push(cap);
        self.init.push(cap);
        id
    }

    /// Undirected unit edge: an antiparallel arc pair where each arc is
    /// the other's reverse (ids differ in the low bit).
    pub fn add_undirected_unit(&mut self, u: u32, v: u32) -> u32 {
        let e = self.push_arc(u, v, 1);
        self.push_arc(v, u, 1);
        e
    }

    /// Directed arc with a zero-capacity reverse (for virtual terminals).
    pub fn add_directed(&mut self, u: u32, v: u32, cap: u32) -> u32 {
        let e = self.push_arc(u, v, cap);
        self.push_arc(v, u, 0);
        e
    }

    pub fn max_flow(&mut self, src: u32, sink: u32) -> u32 {
        let mut flow = 0;
        let mut parent: Vec<u32> = vec![UNSET; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        loop {
            parent.fill(UNSET);
            parent[src as usize] = src.wrapping_neg(); // any non-UNSET marker
            queue.clear();
            queue.push_back(src);
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u as usize] {
                    let v = self.to[e as usize];
                    if self.residual[e as usize] > 0 && parent[v as usize] == UNSET && v != src {
                        parent[v as usize] = e;
                        if v == sink {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if parent[sink as usize] == UNSET {
                break;
            }
            // Unit capacities: every augmentation carries exactly one unit.
            let mut v = sink;
            while v != src {
                let e = parent[v as usize] as usize;
                self.residual[e] -= 1;
                self.residual[e ^ 1] += 1;
                v = self.to[e ^ 1];
            }
            flow += 1;
        }
        flow
    }

    /// Net forward flow on the arc (0 or 1 for unit arcs).
    pub fn net_flow(&self, arc: u32) -> i64 {
        let fwd = self.init[arc as usize] as i64 - self.residual[arc as usize] as i64;
        let bwd = self.init[(arc ^ 1) as usize] as i64 - self.residual[(arc ^ 1) as usize] as i64;
        fwd - bwd
    }
}
