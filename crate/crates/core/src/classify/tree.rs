use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// Fraction of preterm training samples reaching the leaf.
        preterm: f64,
        n: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        /// `x[feature] <= threshold`
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Binary CART tree with Gini impurity.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub root: Node,
    pub max_depth: usize,
    pub min_leaf: usize,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Best {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

impl Tree {
    pub fn fit(x: &[Vec<f64>], y: &[bool], max_depth: usize, min_leaf: usize) -> Result<Self> {
        super::check_xy(x, y)?;
        let min_leaf = min_leaf.max(1);
        let idx: Vec<usize> = (0..x.len()).collect();
        Ok(Self {
            root: grow(x, y, &idx, 0, max_depth, min_leaf),
            max_depth,
            min_leaf,
        })
    }

    pub fn predict(&self, q: &[f64]) -> (bool, f64) {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { preterm, .. } => return (*preterm > 0.5, *preterm),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if q[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn d(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + d(left).max(d(right)),
            }
        }
        d(&self.root)
    }
}

fn grow(
    x: &[Vec<f64>],
    y: &[bool],
    idx: &[usize],
    depth: usize,
    max_depth: usize,
    min_leaf: usize,
) -> Node {
    let n = idx.len();
    let pos = idx.iter().filter(|&&i| y[i]).count();
    let leaf = Node::Leaf {
        preterm: pos as f64 / n as f64,
        n,
    };
    if depth >= max_depth || pos == 0 || pos == n || n < 2 * min_leaf {
        return leaf;
    }
    let parent = gini(pos, n);
    let mut best: Option<Best> = None;
    for f in 0..x[0].len() {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left_pos = 0;
        for cut in 1..n {
            left_pos += y[order[cut - 1]] as usize;
            let (lo, hi) = (x[order[cut - 1]][f], x[order[cut]][f]);
            if lo == hi || cut < min_leaf || n - cut < min_leaf {
                continue;
            }
            let impurity = (cut as f64 * gini(left_pos, cut)
                + (n - cut) as f64 * gini(pos - left_pos, n - cut))
                / n as f64;
            // accept equal impurity too: XOR-like data needs a neutral first cut
            if impurity <= parent + 1e-12
                && best.as_ref().is_none_or(|b| impurity < b.impurity - 1e-12)
            {
                best = Some(Best {
                    feature: f,
                    threshold: 0.5 * (lo + hi),
                    impurity,
                });
            }
        }
    }
    let Some(b) = best else { return leaf };
    let (l, r): (Vec<usize>, Vec<usize>) =
        idx.iter().partition(|&&i| x[i][b.feature] <= b.threshold);
    Node::Split {
        feature: b.feature,
        threshold: b.threshold,
        left: Box::new(grow(x, y, &l, depth + 1, max_depth, min_leaf)),
        right: Box::new(grow(x, y, &r, depth + 1, max_depth, min_leaf)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc(t: &Tree, x: &[Vec<f64>], y: &[bool]) -> f64 {
        x.iter()
            .zip(y)
            .filter(|(r, &l)| t.predict(r).0 == l)
            .count() as f64
            / y.len() as f64
    }

    #[test]
    fn one_clean_split() {
        let v = [1.0, 2.0, 3.0, 4.0, 6.0, 7.0, 8.0, 9.0];
        let x: Vec<Vec<f64>> = v.iter().map(|&a| vec![a]).collect();
        let y: Vec<bool> = v.iter().map(|&a| a > 5.0).collect();
        let t = Tree::fit(&x, &y, 4, 1).unwrap();
        match &t.root {
            Node::Split { threshold, .. } => assert!(*threshold > 4.0 && *threshold < 6.0),
            _ => panic!("expected a split"),
        }
        assert_eq!(acc(&t, &x, &y), 1.0);
    }

    #[test]
    fn pure_set_is_a_leaf() {
        let x = vec![vec![1.0], vec![2.0], vec![3.0]];
        let t = Tree::fit(&x, &[true; 3], 4, 1).unwrap();
        assert_eq!(t.depth(), 0);
        assert!(t.predict(&[-50.0]).0);
    }

    #[test]
    fn xor_at_depth_two() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            for _ in 0..3 {
                x.push(vec![a, b]);
                y.push((a > 0.5) != (b > 0.5));
            }
        }
        let t = Tree::fit(&x, &y, 2, 1).unwrap();
        assert!(t.depth() <= 2);
        assert_eq!(acc(&t, &x, &y), 1.0);
    }

    #[test]
    fn even_leaf_goes_to_control() {
        let x = vec![vec![1.0], vec![1.0]];
        let t = Tree::fit(&x, &[true, false], 4, 1).unwrap();
        assert_eq!(t.predict(&[1.0]), (false, 0.5));
    }
}
