//! Primal network simplex for the uncapacitated transportation problem.
//!
//! Follows the classical spanning-tree formulation with an artificial root
//! (one artificial arc per node, initial tree strongly feasible) and block
//! search pricing. Ties in pricing go to the lowest arc index inside a block
//! and the leaving arc is chosen by the strongly-feasible rule, so the
//! returned vertex is a deterministic function of the input.

/// Supplies `supply[i] >= 0` on the left, demands `demand[j] >= 0` on the
/// right, dense cost `cost[i * n_right + j]`. Returns the dense flow.
pub(crate) struct Transportation<'a> {
    pub supply: &'a [f64],
    pub demand: &'a [f64],
    pub cost: &'a [f64],
}

const DIR_UP: i8 = 1;
const DIR_DOWN: i8 = -1;

pub(crate) struct Solution {
    pub flow: Vec<f64>,
    /// Flow left on artificial arcs (zero for a feasible balanced problem up
    /// to rounding).
    pub artificial_flow: f64,
    pub pivots: usize,
}

struct Tree {
    // arc data; real arcs first, then one artificial arc per node
    source: Vec<u32>,
    target: Vec<u32>,
    cost: Vec<f64>,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    // node data
    parent: Vec<u32>,
    pred: Vec<u32>,
    pred_dir: Vec<i8>,
    depth: Vec<u32>,
    pi: Vec<f64>,
    adj: Vec<Vec<u32>>,
}

const NONE: u32 = u32::MAX;

impl Transportation<'_> {
    pub fn solve(&self, reduced_cost_tol: f64) -> Solution {
        let n_left = self.supply.len();
        let n_right = self.demand.len();
        let n_real = n_left * n_right;
        let n_nodes = n_left + n_right;
        let root = n_nodes;
        let n_arcs = n_real + n_nodes;

        let max_cost = self.cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        let art_cost = (max_cost + 1.0) * n_nodes as f64;

        let mut t = Tree {
            source: Vec::with_capacity(n_arcs),
            target: Vec::with_capacity(n_arcs),
            cost: Vec::with_capacity(n_arcs),
            flow: vec![0.0; n_arcs],
            in_tree: vec![false; n_arcs],
            parent: vec![NONE; n_nodes + 1],
            pred: vec![NONE; n_nodes + 1],
            pred_dir: vec![0; n_nodes + 1],
            depth: vec![0; n_nodes + 1],
            pi: vec![0.0; n_nodes + 1],
            adj: vec![Vec::new(); n_nodes + 1],
        };
        for i in 0..n_left {
            for j in 0..n_right {
                t.source.push(i as u32);
                t.target.push((n_left + j) as u32);
                t.cost.push(self.cost[i * n_right + j]);
            }
        }
        for u in 0..n_nodes {
            let e = (n_real + u) as u32;
            let supply = if u < n_left { self.supply[u] } else { -self.demand[u - n_left] };
            t.in_tree[e as usize] = true;
            t.parent[u] = root as u32;
            t.pred[u] = e;
            t.depth[u] = 1;
            // zero-flow tree arcs point towards the root
            if supply >= 0.0 {
                t.pred_dir[u] = DIR_UP;
                t.source.push(u as u32);
                t.target.push(root as u32);
                t.cost.push(0.0);
                t.flow[e as usize] = supply;
                t.pi[u] = 0.0;
            } else {
                t.pred_dir[u] = DIR_DOWN;
                t.source.push(root as u32);
                t.target.push(u as u32);
                t.cost.push(art_cost);
                t.flow[e as usize] = -supply;
                t.pi[u] = art_cost;
            }
            t.adj[u].push(e);
            t.adj[root].push(e);
        }

        let block = ((n_real as f64).sqrt().ceil() as usize).max(10).min(n_real.max(1));
        let tol = reduced_cost_tol.max(64.0 * f64::EPSILON * n_nodes as f64) * (max_cost + 1.0);
        let mut next_arc = 0usize;
        let mut pivots = 0usize;

        while let Some(in_arc) = t.find_entering(n_real, block, &mut next_arc, tol) {
            t.pivot(in_arc as u32);
            pivots += 1;
        }

        let artificial_flow = t.flow[n_real..].iter().map(|f| f.abs()).sum();
        t.flow.truncate(n_real);
        Solution { flow: t.flow, artificial_flow, pivots }
    }
}

impl Tree {
    #[inline]
    fn reduced_cost(&self, e: usize) -> f64 {
        self.cost[e] + self.pi[self.source[e] as usize] - self.pi[self.target[e] as usize]
    }

    /// Block search over the real arcs, starting where the last search ended.
    fn find_entering(&self, n_real: usize, block: usize, next_arc: &mut usize, tol: f64) -> Option<usize> {
        if n_real == 0 {
            return None;
        }
        let mut best = None;
        let mut best_rc = -tol;
        let mut seen_in_block = 0;
        let start = *next_arc;
        for step in 0..n_real {
            let e = (start + step) % n_real;
            if !self.in_tree[e] {
                let rc = self.reduced_cost(e);
                if rc < best_rc {
                    best_rc = rc;
                    best = Some(e);
                }
            }
            seen_in_block += 1;
            if seen_in_block == block {
                if best.is_some() {
                    *next_arc = (e + 1) % n_real;
                    return best;
                }
                seen_in_block = 0;
            }
        }
        if best.is_some() {
            *next_arc = start;
        }
        best
    }

    fn pivot(&mut self, in_arc: u32) {
        let e_in = in_arc as usize;
        // Cycle orientation: along the entering arc from `first` to `second`.
        let first = self.source[e_in];
        let second = self.target[e_in];
        let join = self.join_node(first, second);

        // Leaving arc: strongly feasible rule (strict on the first path,
        // non-strict on the second).
        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut on_second = false;
        let mut u = first;
        while u != join {
            if self.pred_dir[u as usize] == DIR_UP {
                let d = self.flow[self.pred[u as usize] as usize];
                if d < delta {
                    delta = d;
                    u_out = u;
                    on_second = false;
                }
            }
            u = self.parent[u as usize];
        }
        let mut u = second;
        while u != join {
            if self.pred_dir[u as usize] == DIR_DOWN {
                let d = self.flow[self.pred[u as usize] as usize];
                if d <= delta {
                    delta = d;
                    u_out = u;
                    on_second = true;
                }
            }
            u = self.parent[u as usize];
        }
        debug_assert!(u_out != NONE, "uncapacitated cycle without blocking arc");

        // Augment.
        if delta > 0.0 {
            self.flow[e_in] += delta;
            let mut u = first;
            while u != join {
                let e = self.pred[u as usize] as usize;
                self.flow[e] -= self.pred_dir[u as usize] as f64 * delta;
                u = self.parent[u as usize];
            }
            let mut u = second;
            while u != join {
                let e = self.pred[u as usize] as usize;
                self.flow[e] += self.pred_dir[u as usize] as f64 * delta;
                u = self.parent[u as usize];
            }
        }
        let e_out = self.pred[u_out as usize] as usize;
        // the blocking arc carries exactly `delta`, so this is an exact zero
        self.flow[e_out] = 0.0;

        let (u_in, v_in) = if on_second { (second, first) } else { (first, second) };

        self.in_tree[e_out] = false;
        self.in_tree[e_in] = true;
        let (s, tt) = (self.source[e_out] as usize, self.target[e_out] as usize);
        remove_arc(&mut self.adj[s], e_out as u32);
        remove_arc(&mut self.adj[tt], e_out as u32);
        self.adj[first as usize].push(in_arc);
        self.adj[second as usize].push(in_arc);

        // Re-hang the subtree that was cut off (it contains u_in) under v_in.
        self.parent[u_in as usize] = v_in;
        self.pred[u_in as usize] = in_arc;
        self.pred_dir[u_in as usize] = if self.source[e_in] == u_in { DIR_UP } else { DIR_DOWN };
        self.relabel_subtree(u_in);
    }

    fn join_node(&self, mut a: u32, mut b: u32) -> u32 {
        while self.depth[a as usize] > self.depth[b as usize] {
            a = self.parent[a as usize];
        }
        while self.depth[b as usize] > self.depth[a as usize] {
            b = self.parent[b as usize];
        }
        while a != b {
            a = self.parent[a as usize];
            b = self.parent[b as usize];
        }
        a
    }

    /// Recomputes parent/pred/depth/potential below `top`, whose own pred
    /// arc is already set.
    fn relabel_subtree(&mut self, top: u32) {
        let mut stack = vec![top];
        while let Some(u) = stack.pop() {
            let ui = u as usize;
            let p = self.parent[ui] as usize;
            let e = self.pred[ui] as usize;
            self.depth[ui] = self.depth[p] + 1;
            // tree arcs have zero reduced cost
            self.pi[ui] = if self.source[e] as usize == ui {
                self.pi[p] - self.cost[e]
            } else {
                self.pi[p] + self.cost[e]
            };
            for k in 0..self.adj[ui].len() {
                let a = self.adj[ui][k];
                if a == self.pred[ui] {
                    continue;
                }
                let ai = a as usize;
                let v = if self.source[ai] == u { self.target[ai] } else { self.source[ai] };
                self.parent[v as usize] = u;
                self.pred[v as usize] = a;
                self.pred_dir[v as usize] = if self.source[ai] == v { DIR_UP } else { DIR_DOWN };
                stack.push(v);
            }
        }
    }
}

fn remove_arc(list: &mut Vec<u32>, arc: u32) {
    if let Some(pos) = list.iter().position(|&a| a == arc) {
        // order matters for determinism only, and `remove` keeps it stable
        list.remove(pos);
    }
}
