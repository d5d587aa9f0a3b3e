//! Binary CART trees shared by the decision tree and gradient boosting.
//!
//! Splits are `x[feature] <= threshold` with thresholds at midpoints of
//! consecutive distinct values. The scan visits features in index order and
//! thresholds in ascending order and only replaces the incumbent on a strictly
//! lower cost, so ties resolve to the lower feature index.

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    /// Number of split levels on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Structural check for trees read from outside: children must come
    /// after their parent and features must lie below `dim`.
    pub(crate) fn check(&self, dim: usize) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("tree has no nodes".into());
        }
        for (at, node) in self.nodes.iter().enumerate() {
            if let Node::Split {
                feature,
                left,
                right,
                ..
            } = *node
            {
                if feature >= dim {
                    return Err(format!("node {at} splits on feature {feature} of {dim}"));
                }
                if left <= at || right <= at || left >= self.nodes.len() || right >= self.nodes.len() {
                    return Err(format!("node {at} has invalid children"));
                }
            }
        }
        Ok(())
    }
}

/// Per-node sufficient statistics: sample count and two target sums.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Stats {
    pub count: f64,
    pub a: f64,
    pub b: f64,
}

impl Stats {
    fn add(&mut self, t: (f64, f64)) {
        self.count += 1.0;
        self.a += t.0;
        self.b += t.1;
    }

    fn minus(&self, o: &Stats) -> Stats {
        Stats {
            count: self.count - o.count,
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

pub(crate) trait Criterion {
    /// Cost of a node; the split minimising the children's summed cost wins.
    fn cost(&self, s: &Stats) -> f64;
    fn leaf_value(&self, s: &Stats) -> f64;
    fn is_pure(&self, s: &Stats) -> bool;
}

/// Gini impurity over 0/1 labels; `a` counts positives.
pub(crate) struct Gini;

impl Criterion for Gini {
    fn cost(&self, s: &Stats) -> f64 {
        // count * (1 - p^2 - (1-p)^2)
        if s.count == 0.0 {
            0.0
        } else {
            2.0 * s.a * (s.count - s.a) / s.count
        }
    }

    fn leaf_value(&self, s: &Stats) -> f64 {
        s.a / s.count
    }

    fn is_pure(&self, s: &Stats) -> bool {
        s.a == 0.0 || s.a == s.count
    }
}

/// Least squares on residuals `a`, leaf value by a Newton step `sum a / sum b`.
pub(crate) struct NewtonResidual;

impl Criterion for NewtonResidual {
    fn cost(&self, s: &Stats) -> f64 {
        if s.count == 0.0 {
            0.0
        } else {
            -(s.a * s.a) / s.count
        }
    }

    fn leaf_value(&self, s: &Stats) -> f64 {
        s.a / s.b.max(1e-12)
    }

    fn is_pure(&self, _s: &Stats) -> bool {
        false
    }
}

/// Gini impurity `1 - sum p_c^2` of a label multiset.
pub fn gini_impurity(labels: &[u8]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let p = labels.iter().filter(|&&l| l == 1).count() as f64 / labels.len() as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

/// Column-wise row orderings, computed once per training matrix.
pub(crate) struct Presorted {
    order: Vec<Vec<usize>>,
}

impl Presorted {
    pub fn new(x: &Matrix) -> Self {
        let order = (0..x.cols())
            .map(|j| {
                let mut idx: Vec<usize> = (0..x.rows()).collect();
                idx.sort_by(|&a, &b| x.get(a, j).total_cmp(&x.get(b, j)).then(a.cmp(&b)));
                idx
            })
            .collect();
        Self { order }
    }
}

pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

struct Builder<'a, C: Criterion> {
    x: &'a Matrix,
    targets: &'a [(f64, f64)],
    presorted: &'a Presorted,
    criterion: &'a C,
    params: &'a TreeParams,
    node_of: Vec<usize>,
    nodes: Vec<Node>,
}

const NO_NODE: usize = usize::MAX;

impl<C: Criterion> Builder<'_, C> {
    fn stats(&self, rows: &[usize]) -> Stats {
        let mut s = Stats::default();
        for &r in rows {
            s.add(self.targets[r]);
        }
        s
    }

    /// Best `(feature, threshold)` for the rows currently tagged `id`.
    fn best_split(&self, id: usize, total: &Stats) -> Option<(usize, f64)> {
        let min_leaf = self.params.min_leaf.max(1) as f64;
        let mut best: Option<(usize, f64, f64)> = None;
        for (j, order) in self.presorted.order.iter().enumerate() {
            let mut left = Stats::default();
            let mut prev: Option<f64> = None;
            for &r in order {
                if self.node_of[r] != id {
                    continue;
                }
                let v = self.x.get(r, j);
                if let Some(p) = prev {
                    if v > p && left.count >= min_leaf && total.count - left.count >= min_leaf {
                        let right = total.minus(&left);
                        let cost = self.criterion.cost(&left) + self.criterion.cost(&right);
                        if best.is_none_or(|(_, _, c)| cost < c) {
                            let mut threshold = p + (v - p) / 2.0;
                            if threshold >= v {
                                threshold = p;
                            }
                            best = Some((j, threshold, cost));
                        }
                    }
                }
                left.add(self.targets[r]);
                prev = Some(v);
            }
        }
        best.map(|(j, t, _)| (j, t))
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let stats = self.stats(&rows);
        self.nodes.push(Node::Leaf {
            value: self.criterion.leaf_value(&stats),
        });
        let depth_ok = self.params.max_depth.is_none_or(|m| depth < m);
        let size_ok = rows.len() >= 2 * self.params.min_leaf.max(1);
        if !depth_ok || !size_ok || self.criterion.is_pure(&stats) {
            return id;
        }
        for &r in &rows {
            self.node_of[r] = id;
        }
        let split = self.best_split(id, &stats);
        for &r in &rows {
            self.node_of[r] = NO_NODE;
        }
        let Some((feature, threshold)) = split else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.x.get(i, feature) <= threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

pub(crate) fn grow<C: Criterion>(
    x: &Matrix,
    targets: &[(f64, f64)],
    presorted: &Presorted,
    criterion: &C,
    params: &TreeParams,
) -> Tree {
    let mut b = Builder {
        x,
        targets,
        presorted,
        criterion,
        params,
        node_of: vec![NO_NODE; x.rows()],
        nodes: Vec::new(),
    };
    b.build((0..x.rows()).collect(), 0);
    Tree { nodes: b.nodes }
}
