//! One-inclusion graphs, orientations, and bounded out-degree orienters.
//!
//! Vertices are the hypotheses of a projected class in canonical order;
//! edges join hypotheses at Hamming distance exactly 1 and carry the unique
//! differing coordinate. An orientation assigns each edge a head endpoint;
//! prediction follows the head, and a vertex pays out-degree for every
//! incident edge pointing away from it.

use crate::bits::BitVector;
use crate::class::ProjectedClass;
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;

/// Index of a hypothesis within its class's canonical order.
pub type VertexId = usize;
/// Index of an edge within a graph's canonical order.
pub type EdgeId = usize;

/// An undirected one-inclusion edge: endpoints `u < v` differing exactly on
/// `coord`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub coord: usize,
}

impl Edge {
    pub fn other(&self, end: VertexId) -> VertexId {
        if end == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn contains(&self, end: VertexId) -> bool {
        end == self.u || end == self.v
    }
}

/// The one-inclusion graph of a projected class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneInclusionGraph {
    class: ProjectedClass,
    edges: Vec<Edge>,
    incident: Vec<Vec<EdgeId>>,
}

impl OneInclusionGraph {
    /// Connects every pair of hypotheses at Hamming distance 1.
    ///
    /// Neighbors are located by flipping one coordinate and binary-searching
    /// the canonical hypothesis order, so construction is
    /// O(|F| · m · log|F|).
    pub fn build(class: ProjectedClass) -> OneInclusionGraph {
        let mut edges = Vec::new();
        for (u, h) in class.hypotheses().iter().enumerate() {
            for coord in 0..class.domain_size() {
                let flipped = h.with_bit(coord, !h.get(coord));
                if let Some(v) = class.index_of(&flipped) {
                    if u < v {
                        edges.push(Edge { u, v, coord });
                    }
                }
            }
        }
        edges.sort_by_key(|e| (e.u, e.v));
        let mut incident = vec![Vec::new(); class.len()];
        for (id, e) in edges.iter().enumerate() {
            incident[e.u].push(id);
            incident[e.v].push(id);
        }
        OneInclusionGraph {
            class,
            edges,
            incident,
        }
    }

    pub fn class(&self) -> &ProjectedClass {
        &self.class
    }

    pub fn vertex_count(&self) -> usize {
        self.class.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge ids incident to a vertex, ascending.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v]
    }

    /// Looks up the edge joining two vertices, if present.
    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&(u, v), |e| (e.u, e.v))
            .ok()
    }

    pub fn max_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// A total head assignment for the edges of a one-inclusion graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    graph: OneInclusionGraph,
    heads: Vec<VertexId>,
}

impl Orientation {
    /// Builds an orientation from explicit heads; each head must be an
    /// endpoint of its edge.
    pub fn new(graph: OneInclusionGraph, heads: Vec<VertexId>) -> Result<Orientation> {
        if heads.len() != graph.edge_count() {
            return Err(Error::Internal(format!(
                "orientation covers {} of {} edges",
                heads.len(),
                graph.edge_count()
            )));
        }
        for (id, &h) in heads.iter().enumerate() {
            if !graph.edges[id].contains(h) {
                return Err(Error::Internal(format!(
                    "head of edge {id} is not one of its endpoints"
                )));
            }
        }
        Ok(Orientation { graph, heads })
    }

    pub fn graph(&self) -> &OneInclusionGraph {
        &self.graph
    }

    pub fn head(&self, e: EdgeId) -> VertexId {
        self.heads[e]
    }

    /// Number of incident edges whose head is not `v`.
    pub fn out_degree(&self, v: VertexId) -> Result<usize> {
        if v >= self.graph.vertex_count() {
            return Err(Error::Input(format!(
                "vertex {v} out of range 0..{}",
                self.graph.vertex_count()
            )));
        }
        Ok(self
            .graph
            .incident(v)
            .iter()
            .filter(|&&e| self.heads[e] != v)
            .count())
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.graph.vertex_count())
            .map(|v| self.out_degree(v).expect("vertex in range"))
            .max()
            .unwrap_or(0)
    }
}

/// Whether some orientation with maximum out-degree at most `target` exists;
/// on success returns the per-edge heads.
///
/// Feasibility is a bipartite flow: the source feeds each vertex `target`
/// units, a vertex can pay for each incident edge once, and each edge needs
/// one unit. Full flow means every edge found a tail within budget; the head
/// is the other endpoint.
fn try_orient(graph: &OneInclusionGraph, target: u64) -> Option<Vec<VertexId>> {
    let nv = graph.vertex_count();
    let ne = graph.edge_count();
    if ne == 0 {
        return Some(Vec::new());
    }
    // node layout: 0 = source, 1..=nv vertices, nv+1..=nv+ne edges, last = sink
    let source = 0;
    let sink = nv + ne + 1;
    let mut net = FlowNetwork::new(nv + ne + 2);
    for v in 0..nv {
        net.add_arc(source, 1 + v, target);
    }
    let mut tail_arcs: Vec<(usize, usize)> = Vec::with_capacity(ne);
    for (id, e) in graph.edges().iter().enumerate() {
        let u_arc = net.add_arc(1 + e.u, 1 + nv + id, 1);
        let v_arc = net.add_arc(1 + e.v, 1 + nv + id, 1);
        tail_arcs.push((u_arc, v_arc));
    }
    for id in 0..ne {
        net.add_arc(1 + nv + id, sink, 1);
    }
    if net.max_flow(source, sink) != ne as u64 {
        return None;
    }
    let heads = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(id, e)| {
            let (u_arc, v_arc) = tail_arcs[id];
            // the saturated arc identifies the tail; the head is the other end
            if net.residual(u_arc) == 0 {
                e.v
            } else {
                debug_assert_eq!(net.residual(v_arc), 0);
                e.u
            }
        })
        .collect();
    Some(heads)
}

/// Orients the graph with the minimum possible maximum out-degree.
///
/// The minimal feasible target is certified by infeasibility one step below;
/// the result is deterministic because vertices, edges and augmenting paths
/// are all processed in canonical order.
pub fn orient_min_max_outdegree(graph: &OneInclusionGraph) -> Orientation {
    let mut target = 0u64;
    loop {
        if let Some(heads) = try_orient(graph, target) {
            if target > 0 {
                debug_assert!(
                    try_orient(graph, target - 1).is_none(),
                    "minimality certificate failed at target {target}"
                );
            }
            return Orientation::new(graph.clone(), heads).expect("flow produces a valid head set");
        }
        target += 1;
        assert!(
            target <= graph.edge_count() as u64,
            "orientation must be feasible once every edge fits the budget"
        );
    }
}

/// Orients every center-incident edge toward `center` and the remaining
/// edges by the minimum max out-degree orienter on the residual graph.
pub fn closure_orientation(graph: &OneInclusionGraph, center: &BitVector) -> Result<Orientation> {
    let center_id = graph
        .class()
        .index_of(center)
        .ok_or_else(|| Error::Input(format!("center {center} is not a vertex")))?;

    // Orient the residual (non-center) edges via flow on a reduced graph
    // over the same hypothesis set.
    let residual_ids: Vec<EdgeId> = (0..graph.edge_count())
        .filter(|&id| !graph.edges()[id].contains(center_id))
        .collect();
    let mut residual = graph.clone();
    residual.edges = residual_ids.iter().map(|&id| graph.edges()[id]).collect();
    residual.incident = vec![Vec::new(); graph.vertex_count()];
    for (rid, e) in residual.edges.iter().enumerate() {
        residual.incident[e.u].push(rid);
        residual.incident[e.v].push(rid);
    }
    let residual_orientation = orient_min_max_outdegree(&residual);

    // center-incident edges default to the center
    let mut heads = vec![center_id; graph.edge_count()];
    for (rid, &id) in residual_ids.iter().enumerate() {
        heads[id] = residual_orientation.head(rid);
    }
    Orientation::new(graph.clone(), heads)
}
