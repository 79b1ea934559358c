//! Orientation rules and the one-inclusion prediction algorithm.
//!
//! An orientation rule deterministically maps a domain subset to an
//! orientation of the one-inclusion graph of the class projected onto that
//! subset. Prediction on a fresh point follows the head of the edge between
//! the two sample-consistent hypotheses. The training labels throughout this
//! crate are those of the all-zeros target.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_rational::Ratio;

use crate::bits::BitVector;
use crate::class::ProjectedClass;
use crate::error::{Error, Result};
use crate::graph::{closure_orientation, orient_min_max_outdegree, OneInclusionGraph, Orientation};
use crate::mix::{tag, SplitMix};

/// Count of predictions that fell back to label 0 because the consistent
/// restrictions did not form an edge. Unreachable for the star construction;
/// tracked so ad-hoc classes can be diagnosed.
static DEGENERATE_PREDICTIONS: AtomicU64 = AtomicU64::new(0);

pub fn degenerate_prediction_count() -> u64 {
    DEGENERATE_PREDICTIONS.load(AtomicOrdering::Relaxed)
}

/// A deterministic, pure mapping from a domain subset to an orientation of
/// the projected one-inclusion graph.
///
/// Implementations must be pure in `(rule state, class, subset)`: repeated
/// calls yield identical orientations, so orientations can be cached or
/// recomputed freely and concurrent evaluation is safe.
pub trait OrientationRule: Send + Sync {
    fn name(&self) -> &'static str;

    /// Orients the one-inclusion graph of `class` projected onto `subset`.
    fn orient(&self, class: &ProjectedClass, subset: &BitVector) -> Result<Orientation>;

    /// Evaluates the predictor on every domain point for the given training
    /// set (labels all zeros). The default walks the full prediction
    /// algorithm; implementations may shortcut when the outcome is provably
    /// identical.
    fn realize(&self, class: &ProjectedClass, train_set: &BitVector) -> Result<BitVector> {
        realize_generic(self, class, train_set)
    }
}

/// One-inclusion prediction with all-zeros training labels.
///
/// If every sample-consistent hypothesis agrees on `x`, that label wins.
/// Otherwise the rule orients the projection onto `train_set + x` and the
/// head of the edge between the two consistent restrictions decides.
pub fn predict<R: OrientationRule + ?Sized>(
    rule: &R,
    class: &ProjectedClass,
    train_set: &BitVector,
    x: usize,
) -> Result<u8> {
    let m = class.domain_size();
    if train_set.len() != m {
        return Err(Error::Input(format!(
            "training set length {} does not match domain size {m}",
            train_set.len()
        )));
    }
    if x >= m {
        return Err(Error::Input(format!("domain point {x} out of range 0..{m}")));
    }

    let consistent: Vec<&BitVector> = class
        .hypotheses()
        .iter()
        .filter(|h| train_set.iter_ones().all(|p| !h.get(p)))
        .collect();
    if consistent.is_empty() {
        return Err(Error::Realizability(
            "no hypothesis is consistent with the all-zeros labels on the training set".into(),
        ));
    }

    // Step 1: unique consistent label.
    let first = consistent[0].get(x);
    if consistent.iter().all(|h| h.get(x) == first) {
        return Ok(u8::from(first));
    }

    // Step 2: locate the edge between the two consistent restrictions in the
    // projection onto train_set + x.
    let s_prime = train_set.with_bit(x, true);
    let positions: Vec<usize> = s_prime.iter_ones().collect();
    let x_pos = positions
        .iter()
        .position(|&p| p == x)
        .expect("x is a member of the extended subset");
    let mut restrictions: Vec<BitVector> = consistent
        .iter()
        .map(|h| {
            let mut r = BitVector::zeros(positions.len());
            for (dst, &src) in positions.iter().enumerate() {
                if h.get(src) {
                    r.set(dst, true);
                }
            }
            r
        })
        .collect();
    restrictions.sort();
    restrictions.dedup();

    let is_edge = restrictions.len() == 2
        && restrictions[0].hamming_distance(&restrictions[1])? == 1;
    if !is_edge {
        // The consistent restrictions do not form an edge; predict 0 and
        // record the degenerate case rather than leaving it undefined.
        DEGENERATE_PREDICTIONS.fetch_add(1, AtomicOrdering::Relaxed);
        return Ok(0);
    }

    // Step 3: follow the head assigned by the rule's orientation.
    let orientation = rule.orient(class, &s_prime)?;
    let projected = orientation.graph().class();
    let find = |r: &BitVector| {
        projected.index_of(r).ok_or_else(|| {
            Error::Internal(format!(
                "rule {} oriented a different projection: {r} missing",
                rule.name()
            ))
        })
    };
    let a = find(&restrictions[0])?;
    let b = find(&restrictions[1])?;
    let edge = orientation.graph().find_edge(a, b).ok_or_else(|| {
        Error::Internal("consistent restrictions at distance 1 must share an edge".into())
    })?;
    let head = &projected.hypotheses()[orientation.head(edge)];
    Ok(u8::from(head.get(x_pos)))
}

/// Prediction on every domain point; the hypothesis the rule realizes.
pub fn realize_generic<R: OrientationRule + ?Sized>(
    rule: &R,
    class: &ProjectedClass,
    train_set: &BitVector,
) -> Result<BitVector> {
    let m = class.domain_size();
    let mut h = BitVector::zeros(m);
    for x in 0..m {
        if predict(rule, class, train_set, x)? == 1 {
            h.set(x, true);
        }
    }
    Ok(h)
}

/// Exact misclassification rate of `h` against `target` under the uniform
/// distribution on the domain.
pub fn exact_error(h: &BitVector, target: &BitVector) -> Result<Ratio<u64>> {
    let dist = h.hamming_distance(target)? as u64;
    Ok(Ratio::new(dist, h.len() as u64))
}

/// Orients every center-incident edge toward the all-zeros hypothesis;
/// residual edges take the minimum max out-degree orientation.
#[derive(Debug, Clone, Default)]
pub struct ClosureRule;

impl OrientationRule for ClosureRule {
    fn name(&self) -> &'static str {
        "closure"
    }

    fn orient(&self, class: &ProjectedClass, subset: &BitVector) -> Result<Orientation> {
        let projected = class.project(subset)?;
        let center = BitVector::zeros(projected.domain_size());
        let graph = OneInclusionGraph::build(projected);
        closure_orientation(&graph, &center)
    }

    fn realize(&self, class: &ProjectedClass, train_set: &BitVector) -> Result<BitVector> {
        let m = class.domain_size();
        // With the all-zeros hypothesis in the class, every queried edge is
        // center-incident and heads at the center, so the realized
        // hypothesis is exactly the zero function.
        if train_set.len() == m && class.contains(&BitVector::zeros(m)) {
            return Ok(BitVector::zeros(m));
        }
        realize_generic(self, class, train_set)
    }
}

/// The plain minimum max out-degree orientation from the flow orienter.
#[derive(Debug, Clone, Default)]
pub struct FlowRule;

impl OrientationRule for FlowRule {
    fn name(&self) -> &'static str {
        "flow"
    }

    fn orient(&self, class: &ProjectedClass, subset: &BitVector) -> Result<Orientation> {
        let projected = class.project(subset)?;
        let graph = OneInclusionGraph::build(projected);
        Ok(orient_min_max_outdegree(&graph))
    }
}

/// The uncoordinated baseline: on each projection of the indicator class,
/// exactly one center-incident edge, chosen by keyed mixing of the subset,
/// is flipped outward.
#[derive(Debug, Clone)]
pub struct RandomFlipRule {
    seed: u64,
}

impl RandomFlipRule {
    pub fn new(seed: u64) -> Self {
        RandomFlipRule { seed }
    }

    /// The flipped coordinate (as an index into the subset's positions),
    /// deterministic in `(seed, subset)`.
    fn flip_rank(&self, subset: &BitVector) -> usize {
        let k = subset.ones_count();
        let mut stream = SplitMix::keyed(
            self.seed,
            tag::FLIP,
            subset.words().iter().copied(),
        );
        stream.uniform(k as u64) as usize
    }

    fn require_indicator(&self, class: &ProjectedClass) -> Result<()> {
        if !class.is_indicator_class() {
            return Err(Error::Construction(
                "the random-flip rule is defined on the single-point indicator class".into(),
            ));
        }
        Ok(())
    }
}

impl OrientationRule for RandomFlipRule {
    fn name(&self) -> &'static str {
        "random_flip"
    }

    fn orient(&self, class: &ProjectedClass, subset: &BitVector) -> Result<Orientation> {
        self.require_indicator(class)?;
        let projected = class.project(subset)?;
        let center = BitVector::zeros(projected.domain_size());
        let graph = OneInclusionGraph::build(projected);
        let center_id = graph
            .class()
            .index_of(&center)
            .expect("indicator projections contain the zero function");
        let flip_coord = self.flip_rank(subset);
        let heads = graph
            .edges()
            .iter()
            .map(|e| {
                if e.coord == flip_coord {
                    e.other(center_id)
                } else {
                    center_id
                }
            })
            .collect();
        Orientation::new(graph, heads)
    }

    fn realize(&self, class: &ProjectedClass, train_set: &BitVector) -> Result<BitVector> {
        let m = class.domain_size();
        if !class.is_indicator_class() || train_set.len() != m || train_set.ones_count() == 0 {
            return realize_generic(self, class, train_set);
        }
        // Error exactly on the unseen points whose extension flips their own
        // petal.
        let mut h = BitVector::zeros(m);
        for x in train_set.iter_zeros() {
            let s_prime = train_set.with_bit(x, true);
            let rank = self.flip_rank(&s_prime);
            let flipped_position = s_prime
                .iter_ones()
                .nth(rank)
                .expect("rank is within the subset");
            if flipped_position == x {
                h.set(x, true);
            }
        }
        Ok(h)
    }
}
