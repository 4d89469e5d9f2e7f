//! Vantage-point tree over distributions with exact k-NN and range search.
//!
//! Each node stores a vantage point `v` and the lower median `μ` of the
//! distances from `v` to the rest of its subtree. Points with `d(v, x) ≤ μ` go
//! to the inner child, the rest to the outer child. Each child also records
//! the interval `[lo, hi]` of its distances to `v`, so a query at distance `d`
//! from `v` is at least `max(lo - d, d - hi)` from everything in that child.
//! That bound is the triangle inequality, so results are exact only when the
//! distance is a metric. k-NN search expands nodes best-first by bound.
//!
//! Results are ordered by `(distance, id)`, which makes the tree output
//! identical to [`brute_force_knn`], ties included.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{DivergenceError, Result};
use crate::metric::{DistributionDistance, MetricSpec};

/// Relative slack on pruning bounds, absorbing rounding in the distances.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedPoint<I> {
    pub id: I,
    pub dist: Distribution,
}

impl<I> IndexedPoint<I> {
    pub fn new(id: I, dist: Distribution) -> Self {
        Self { id, dist }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor<I> {
    pub id: I,
    pub distance: f64,
}

/// Query output plus the number of distance evaluations spent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult<I> {
    pub neighbors: Vec<Neighbor<I>>,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Node {
    vantage: usize,
    radius: f64,
    inner: Option<usize>,
    outer: Option<usize>,
    /// `[min, max]` of `d(v, x)` over the inner and outer subtrees.
    inner_range: [f64; 2],
    outer_range: [f64; 2],
}

impl Node {
    /// Lower bound on `d(q, x)` for `x` in a child whose distances to `v`
    /// lie in `range`, given `d = d(q, v)`.
    fn child_bound(d: f64, range: [f64; 2]) -> f64 {
        let slack = PRUNE_SLACK * (d + range[1]);
        (range[0] - d).max(d - range[1]) - slack
    }
}

/// Immutable VP-tree. `M` is the distance; [`MetricSpec`] by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VpTree<I, M = MetricSpec> {
    metric: M,
    seed: u64,
    dim: usize,
    points: Vec<IndexedPoint<I>>,
    nodes: Vec<Node>,
    root: usize,
}

fn check_dims<I>(points: &[IndexedPoint<I>]) -> Result<usize> {
    let first = points.first().ok_or(DivergenceError::EmptyInput)?;
    let dim = first.dist.len();
    if let Some(bad) = points.iter().find(|p| p.dist.len() != dim) {
        return Err(DivergenceError::LengthMismatch {
            left: dim,
            right: bad.dist.len(),
        });
    }
    Ok(dim)
}

fn by_distance_then_id<I: Ord>(a: &Neighbor<I>, b: &Neighbor<I>) -> Ordering {
    a.distance
        .total_cmp(&b.distance)
        .then_with(|| a.id.cmp(&b.id))
}

/// Max-heap entry for the running k best.
struct Candidate<I>(Neighbor<I>);

impl<I: Ord> PartialEq for Candidate<I> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<I: Ord> Eq for Candidate<I> {}
impl<I: Ord> PartialOrd for Candidate<I> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<I: Ord> Ord for Candidate<I> {
    fn cmp(&self, other: &Self) -> Ordering {
        by_distance_then_id(&self.0, &other.0)
    }
}

impl<I: Ord + Clone, M: DistributionDistance> VpTree<I, M> {
    /// Builds the tree. Vantage points are drawn uniformly from each node's
    /// point set with a ChaCha8 generator seeded by `seed`.
    pub fn build(points: Vec<IndexedPoint<I>>, metric: M, seed: u64) -> Result<Self> {
        let dim = check_dims(&points)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes: Vec<Node> = Vec::with_capacity(points.len());
        // (slot in the parent to patch, member indices)
        type Job = (Option<(usize, bool)>, Vec<usize>);
        let mut work: Vec<Job> = vec![(None, (0..points.len()).collect())];

        while let Some((parent, mut members)) = work.pop() {
            let pick = rng.random_range(0..members.len());
            let vantage = members.swap_remove(pick);
            let mut scored: Vec<(f64, usize)> = members
                .iter()
                .map(|&i| (metric.distance(&points[vantage].dist, &points[i].dist), i))
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let radius = if scored.is_empty() {
                0.0
            } else {
                scored[(scored.len() - 1) / 2].0
            };

            let split = scored.partition_point(|&(d, _)| d <= radius);
            let range = |part: &[(f64, usize)]| match (part.first(), part.last()) {
                (Some(a), Some(b)) => [a.0, b.0],
                _ => [0.0, 0.0],
            };
            let id = nodes.len();
            nodes.push(Node {
                vantage,
                radius,
                inner: None,
                outer: None,
                inner_range: range(&scored[..split]),
                outer_range: range(&scored[split..]),
            });
            if let Some((p, is_inner)) = parent {
                if is_inner {
                    nodes[p].inner = Some(id);
                } else {
                    nodes[p].outer = Some(id);
                }
            }

            let outer: Vec<usize> = scored[split..].iter().map(|&(_, i)| i).collect();
            let inner: Vec<usize> = scored[..split].iter().map(|&(_, i)| i).collect();
            if !outer.is_empty() {
                work.push((Some((id, false)), outer));
            }
            if !inner.is_empty() {
                work.push((Some((id, true)), inner));
            }
        }

        Ok(Self {
            metric,
            seed,
            dim,
            points,
            nodes,
            root: 0,
        })
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[IndexedPoint<I>] {
        &self.points
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 1)];
        while let Some((n, d)) = stack.pop() {
            best = best.max(d);
            for c in [self.nodes[n].inner, self.nodes[n].outer]
                .into_iter()
                .flatten()
            {
                stack.push((c, d + 1));
            }
        }
        best
    }

    /// Re-checks every node's split by recomputing distances, and that each
    /// input point appears exactly once. Returns a description of the first
    /// problem found.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut seen = vec![0usize; self.points.len()];
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            seen[node.vantage] += 1;
            let v = &self.points[node.vantage].dist;
            for (child, inside) in [(node.inner, true), (node.outer, false)] {
                let Some(c) = child else { continue };
                stack.push(c);
                let mut sub = vec![c];
                while let Some(m) = sub.pop() {
                    let d = self
                        .metric
                        .distance(v, &self.points[self.nodes[m].vantage].dist);
                    if inside != (d <= node.radius) {
                        return Err(format!(
                            "node {n}: point {} at distance {d} on the wrong side of radius {}",
                            self.nodes[m].vantage, node.radius
                        ));
                    }
                    sub.extend(
                        [self.nodes[m].inner, self.nodes[m].outer]
                            .into_iter()
                            .flatten(),
                    );
                }
            }
        }
        match seen.iter().position(|&c| c != 1) {
            Some(i) => Err(format!("point {i} stored {} times", seen[i])),
            None => Ok(()),
        }
    }

    fn check_query(&self, query: &Distribution) -> Result<()> {
        if query.len() != self.dim {
            return Err(DivergenceError::LengthMismatch {
                left: self.dim,
                right: query.len(),
            });
        }
        Ok(())
    }

    /// The `k` nearest points, ascending by `(distance, id)`.
    ///
    /// Nodes are visited best-first by their lower bound; a node is skipped
    /// once its bound exceeds the current `k`-th distance.
    pub fn knn_query(&self, query: &Distribution, k: usize) -> Result<QueryResult<I>> {
        self.check_query(query)?;
        if k == 0 {
            return Err(DivergenceError::InvalidParameter(
                "k must be at least 1".into(),
            ));
        }
        let mut best: BinaryHeap<Candidate<I>> = BinaryHeap::with_capacity(k + 1);
        let mut frontier: BinaryHeap<Pending> = BinaryHeap::new();
        frontier.push(Pending {
            bound: 0.0,
            node: self.root,
        });
        let mut evaluations = 0u64;

        while let Some(Pending { bound, node: n }) = frontier.pop() {
            if best.len() == k && best.peek().is_some_and(|c| bound > c.0.distance) {
                break;
            }
            let node = &self.nodes[n];
            let point = &self.points[node.vantage];
            let d = self.metric.distance(query, &point.dist);
            evaluations += 1;

            let cand = Candidate(Neighbor {
                id: point.id.clone(),
                distance: d,
            });
            if best.len() < k {
                best.push(cand);
            } else if best.peek().is_some_and(|top| cand < *top) {
                best.pop();
                best.push(cand);
            }

            for (child, range) in [
                (node.inner, node.inner_range),
                (node.outer, node.outer_range),
            ] {
                if let Some(c) = child {
                    let b = bound.max(Node::child_bound(d, range));
                    frontier.push(Pending { bound: b, node: c });
                }
            }
        }

        let mut neighbors: Vec<Neighbor<I>> = best.into_iter().map(|c| c.0).collect();
        neighbors.sort_by(by_distance_then_id);
        Ok(QueryResult {
            neighbors,
            evaluations,
        })
    }

    /// Every point with `distance <= radius`, ascending by `(distance, id)`.
    pub fn range_query(&self, query: &Distribution, radius: f64) -> Result<QueryResult<I>> {
        self.check_query(query)?;
        if radius.is_nan() || radius < 0.0 {
            return Err(DivergenceError::InvalidParameter(format!(
                "radius must be nonnegative, got {radius}"
            )));
        }
        let mut out = Vec::new();
        let mut evaluations = 0u64;
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            let point = &self.points[node.vantage];
            let d = self.metric.distance(query, &point.dist);
            evaluations += 1;
            if d <= radius {
                out.push(Neighbor {
                    id: point.id.clone(),
                    distance: d,
                });
            }
            for (child, range) in [
                (node.inner, node.inner_range),
                (node.outer, node.outer_range),
            ] {
                if let Some(c) = child {
                    if Node::child_bound(d, range) <= radius {
                        stack.push(c);
                    }
                }
            }
        }
        out.sort_by(by_distance_then_id);
        Ok(QueryResult {
            neighbors: out,
            evaluations,
        })
    }
}

/// Frontier entry, popped smallest bound first (ties by node index).
#[derive(PartialEq)]
struct Pending {
    bound: f64,
    node: usize,
}

impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Linear scan: the `k` nearest points by `(distance, id)`.
pub fn brute_force_knn<I: Ord + Clone, M: DistributionDistance>(
    points: &[IndexedPoint<I>],
    query: &Distribution,
    k: usize,
    metric: &M,
) -> Result<QueryResult<I>> {
    let dim = check_dims(points)?;
    if query.len() != dim {
        return Err(DivergenceError::LengthMismatch {
            left: dim,
            right: query.len(),
        });
    }
    if k == 0 {
        return Err(DivergenceError::InvalidParameter(
            "k must be at least 1".into(),
        ));
    }
    let mut all: Vec<Neighbor<I>> = points
        .iter()
        .map(|p| Neighbor {
            id: p.id.clone(),
            distance: metric.distance(query, &p.dist),
        })
        .collect();
    all.sort_by(by_distance_then_id);
    all.truncate(k);
    Ok(QueryResult {
        neighbors: all,
        evaluations: points.len() as u64,
    })
}

/// Linear scan: every point within `radius`.
pub fn brute_force_range<I: Ord + Clone, M: DistributionDistance>(
    points: &[IndexedPoint<I>],
    query: &Distribution,
    radius: f64,
    metric: &M,
) -> Result<QueryResult<I>> {
    let dim = check_dims(points)?;
    if query.len() != dim {
        return Err(DivergenceError::LengthMismatch {
            left: dim,
            right: query.len(),
        });
    }
    let mut all: Vec<Neighbor<I>> = points
        .iter()
        .map(|p| Neighbor {
            id: p.id.clone(),
            distance: metric.distance(query, &p.dist),
        })
        .filter(|n| n.distance <= radius)
        .collect();
    all.sort_by(by_distance_then_id);
    Ok(QueryResult {
        neighbors: all,
        evaluations: points.len() as u64,
    })
}
