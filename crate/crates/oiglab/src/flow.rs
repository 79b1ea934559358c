//! Deterministic max-flow used by the bounded out-degree orienter.
//!
//! Plain Ford-Fulkerson with depth-first augmentation in insertion order.
//! The networks built here are tiny (one node per vertex and per edge of a
//! one-inclusion graph), so simplicity and a reproducible augmentation order
//! beat asymptotics.

pub const UNSET: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
}

/// A directed flow network with residual bookkeeping.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    // arcs[i] and arcs[i^1] are a forward/backward pair
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    visited: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            adj: vec![Vec::new(); nodes],
            visited: vec![false; nodes],
        }
    }

    /// Adds a directed arc and returns its id.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    /// Residual capacity currently left on an arc.
    pub fn residual(&self, arc: usize) -> u64 {
        self.arcs[arc].cap
    }

    fn dfs(&mut self, node: usize, sink: usize, limit: u64) -> u64 {
        if node == sink {
            return limit;
        }
        self.visited[node] = true;
        // adjacency in insertion order keeps augmentation deterministic
        for i in 0..self.adj[node].len() {
            let arc = self.adj[node][i];
            let (to, cap) = (self.arcs[arc].to, self.arcs[arc].cap);
            if cap == 0 || self.visited[to] {
                continue;
            }
            let pushed = self.dfs(to, sink, limit.min(cap));
            if pushed > 0 {
                self.arcs[arc].cap -= pushed;
                self.arcs[arc ^ 1].cap += pushed;
                return pushed;
            }
        }
        0
    }

    /// Runs to saturation and returns the max-flow value.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> u64 {
        assert_ne!(source, sink);
        let mut total = 0;
        loop {
            self.visited.fill(false);
            let pushed = self.dfs(source, sink, u64::MAX);
            if pushed == 0 {
                return total;
            }
            total += pushed;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_unit_network() {
        // source 0 -> {1,2} -> sink 3
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1);
        net.add_arc(0, 2, 1);
        net.add_arc(1, 3, 1);
        net.add_arc(2, 3, 1);
        assert_eq!(net.max_flow(0, 3), 2);
    }

    #[test]
    fn bottleneck_limits_flow() {
        // 0 -> 1 -> 2 with capacities 5 then 2
        let mut net = FlowNetwork::new(3);
        net.add_arc(0, 1, 5);
        net.add_arc(1, 2, 2);
        assert_eq!(net.max_flow(0, 2), 2);
    }

    #[test]
    fn augmentation_can_reroute() {
        // classic 4-node diamond needing a residual reversal
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 1);
        net.add_arc(0, 2, 1);
        net.add_arc(1, 2, 1);
        net.add_arc(1, 3, 1);
        net.add_arc(2, 3, 1);
        assert_eq!(net.max_flow(0, 3), 2);
    }
}
