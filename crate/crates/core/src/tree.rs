//! Chirotope trees: chirotopes glued along pairs of extreme proxy elements.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::bowtie::{bowtie, factorize};
use crate::chirotope::Chirotope;
use crate::error::{Error, Result, TreeViolationKind};
use crate::label::Label;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An edge joins proxy `u_proxy` of node `u` to proxy `v_proxy` of node `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub u_proxy: Label,
    pub v: NodeId,
    pub v_proxy: Label,
}

impl Edge {
    pub fn new(u: NodeId, u_proxy: impl Into<Label>, v: NodeId, v_proxy: impl Into<Label>) -> Self {
        Edge { u, u_proxy: u_proxy.into(), v, v_proxy: v_proxy.into() }
    }

    /// The proxy this edge selects in node `n`.
    pub fn proxy_at(&self, n: NodeId) -> Option<&Label> {
        if n == self.u {
            Some(&self.u_proxy)
        } else if n == self.v {
            Some(&self.v_proxy)
        } else {
            None
        }
    }

    /// The node across the edge from `n`.
    pub fn other(&self, n: NodeId) -> Option<NodeId> {
        if n == self.u {
            Some(self.v)
        } else if n == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

fn violation(kind: TreeViolationKind, location: impl Into<String>) -> Error {
    Error::TreeViolation { kind, location: location.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChirotopeTree {
    nodes: BTreeMap<NodeId, Chirotope>,
    edges: Vec<Edge>,
}

impl ChirotopeTree {
    pub fn new(nodes: impl IntoIterator<Item = (NodeId, Chirotope)>, edges: Vec<Edge>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, chi) in nodes {
            if map.insert(id, chi).is_some() {
                return Err(violation(TreeViolationKind::UnknownNode, format!("node {id} given twice")));
            }
        }
        let tree = ChirotopeTree { nodes: map, edges };
        tree.validate()?;
        Ok(tree)
    }

    /// A tree with one node and no edges.
    pub fn single(chi: Chirotope) -> Self {
        ChirotopeTree { nodes: [(NodeId(0), chi)].into(), edges: Vec::new() }
    }

    /// Checks ground sizes, disjointness, proxy usage and tree shape.
    pub fn validate(&self) -> Result<()> {
        use TreeViolationKind::*;
        let mut owner: BTreeMap<&Label, NodeId> = BTreeMap::new();
        for (&id, chi) in &self.nodes {
            if chi.len() < 3 {
                return Err(violation(GroundTooSmall, format!("node {id}")));
            }
            for l in chi.labels() {
                if let Some(prev) = owner.insert(l, id) {
                    return Err(violation(OverlappingGrounds, format!("`{l}` in nodes {prev} and {id}")));
                }
            }
        }
        let mut used: BTreeSet<(NodeId, &Label)> = BTreeSet::new();
        let mut parent: BTreeMap<NodeId, NodeId> = self.nodes.keys().map(|&k| (k, k)).collect();
        fn find(parent: &mut BTreeMap<NodeId, NodeId>, mut x: NodeId) -> NodeId {
            while parent[&x] != x {
                let up = parent[&parent[&x]];
                parent.insert(x, up);
                x = up;
            }
            x
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.u == e.v {
                return Err(violation(SelfLoop, format!("edge {i}")));
            }
            for (n, p) in [(e.u, &e.u_proxy), (e.v, &e.v_proxy)] {
                let chi = self.nodes.get(&n).ok_or_else(|| violation(UnknownNode, format!("edge {i}, node {n}")))?;
                if !chi.contains(p) {
                    return Err(violation(UnknownProxy, format!("edge {i}, `{p}` in node {n}")));
                }
                if !chi.is_extreme(p)? {
                    return Err(violation(ProxyNotExtreme, format!("edge {i}, `{p}` in node {n}")));
                }
                if !used.insert((n, p)) {
                    return Err(violation(ProxyReused, format!("edge {i}, `{p}` in node {n}")));
                }
            }
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a == b {
                return Err(violation(Cycle, format!("edge {i}")));
            }
            parent.insert(a, b);
        }
        if self.nodes.is_empty() || self.edges.len() + 1 != self.nodes.len() {
            return Err(violation(Disconnected, format!("{} nodes, {} edges", self.nodes.len(), self.edges.len())));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Chirotope)> {
        self.nodes.iter().map(|(&k, v)| (k, v))
    }

    pub fn node(&self, id: NodeId) -> Result<&Chirotope> {
        self.nodes.get(&id).ok_or(Error::UnknownNode(id.0))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Result<&Edge> {
        self.edges.get(e).ok_or(Error::UnknownEdge(e))
    }

    /// Indices of the edges at node `id`.
    pub fn incident(&self, id: NodeId) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].u == id || self.edges[i].v == id).collect()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.incident(id).len()
    }

    /// Proxies of node `id`, sorted.
    pub fn proxies(&self, id: NodeId) -> Vec<Label> {
        let mut p: Vec<Label> = self.edges.iter().filter_map(|e| e.proxy_at(id).cloned()).collect();
        p.sort();
        p
    }

    /// Elements of node `id` that are not proxies, sorted.
    pub fn own_labels(&self, id: NodeId) -> Result<Vec<Label>> {
        let proxies = self.proxies(id);
        Ok(self.node(id)?.labels().iter().filter(|l| !proxies.contains(l)).cloned().collect())
    }

    /// All non-proxy labels, which form the ground set of the expansion.
    pub fn labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = self.nodes.keys().flat_map(|&id| self.own_labels(id).unwrap()).collect();
        out.sort();
        out
    }

    /// Sum of the node ground-set sizes.
    pub fn total_element_count(&self) -> usize {
        self.nodes.values().map(|c| c.len()).sum()
    }

    /// Node holding the non-proxy label `x`.
    pub fn node_of(&self, x: &Label) -> Option<NodeId> {
        self.nodes.keys().copied().find(|&id| self.own_labels(id).unwrap().contains(x))
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.degree(id) == 1
    }

    /// Precomputes routing tables for repeated sign queries.
    pub fn evaluator(&self) -> TreeEvaluator<'_> {
        TreeEvaluator::new(self)
    }

    /// `x` itself if it lives in `v`, else the proxy of `v` on the first edge
    /// toward the node of `x`.
    pub fn representative(&self, x: &Label, v: NodeId) -> Result<Label> {
        self.evaluator().representative(x, v)
    }

    /// The node where the paths between the nodes of `x`, `y`, `z` meet.
    pub fn median_node(&self, x: &Label, y: &Label, z: &Label) -> Result<NodeId> {
        self.evaluator().median_node(x, y, z)
    }

    /// Sign of a triple in the chirotope the tree represents.
    pub fn eval(&self, x: &Label, y: &Label, z: &Label) -> Result<i8> {
        self.evaluator().sign(x, y, z)
    }

    /// The represented chirotope, built by contracting every edge.
    pub fn expand(&self) -> Chirotope {
        let mut t = self.clone();
        while let Some(e) = t.leaf_edge() {
            t.contract_in_place(e).expect("edges of a valid tree contract");
        }
        t.nodes.into_values().next().expect("tree has a node")
    }

    /// An edge at the smallest leaf, if any edge remains.
    fn leaf_edge(&self) -> Option<usize> {
        let leaf = self.nodes.keys().copied().find(|&id| self.is_leaf(id))?;
        self.incident(leaf).first().copied()
    }

    /// Merges the two ends of edge `e` into one node decorated by their
    /// bowtie product; the merged node keeps the smaller id.
    pub fn contract_edge(&self, e: usize) -> Result<ChirotopeTree> {
        let mut t = self.clone();
        t.contract_in_place(e)?;
        Ok(t)
    }

    pub(crate) fn contract_in_place(&mut self, e: usize) -> Result<NodeId> {
        let edge = self.edge(e)?.clone();
        let merged = bowtie(self.node(edge.u)?, &edge.u_proxy, self.node(edge.v)?, &edge.v_proxy)?;
        let (keep, gone) = if edge.u < edge.v { (edge.u, edge.v) } else { (edge.v, edge.u) };
        self.edges.remove(e);
        self.nodes.remove(&gone);
        self.nodes.insert(keep, merged);
        for ed in &mut self.edges {
            if ed.u == gone {
                ed.u = keep;
            }
            if ed.v == gone {
                ed.v = keep;
            }
        }
        Ok(keep)
    }

    /// Splits node `v` along a nontrivial module of its decoration. The
    /// module side keeps id `v`; the other side gets a fresh id. Existing
    /// edges follow whichever side holds their proxy.
    pub fn split_node(&self, v: NodeId, module: &[Label]) -> Result<ChirotopeTree> {
        let mut t = self.clone();
        t.split_in_place(v, module)?;
        Ok(t)
    }

    pub(crate) fn split_in_place(&mut self, v: NodeId, module: &[Label]) -> Result<NodeId> {
        let fresh = self.fresh_labels(2);
        let f = factorize(self.node(v)?, module, &fresh[0], &fresh[1])?;
        let new_id = NodeId(self.nodes.keys().last().map_or(0, |n| n.0 + 1));
        for ed in &mut self.edges {
            if ed.u == v && f.xi.contains(&ed.u_proxy) {
                ed.u = new_id;
            }
            if ed.v == v && f.xi.contains(&ed.v_proxy) {
                ed.v = new_id;
            }
        }
        self.edges.push(Edge { u: v, u_proxy: f.x_star, v: new_id, v_proxy: f.y_star });
        self.nodes.insert(v, f.chi);
        self.nodes.insert(new_id, f.xi);
        Ok(new_id)
    }

    /// Removes edge `e` and returns the two subtrees with the former proxies,
    /// which become ordinary elements. The first part contains `e.u`.
    pub fn split_at_edge(&self, e: usize) -> Result<(ChirotopeTree, Label, ChirotopeTree, Label)> {
        let edge = self.edge(e)?.clone();
        let mut rest: Vec<Edge> = self.edges.clone();
        rest.remove(e);
        let side = component(self.nodes.keys().copied(), &rest, edge.u);
        let part = |inside: bool| ChirotopeTree {
            nodes: self.nodes.iter().filter(|(k, _)| side.contains(k) == inside).map(|(&k, c)| (k, c.clone())).collect(),
            edges: rest.iter().filter(|ed| side.contains(&ed.u) == inside).cloned().collect(),
        };
        Ok((part(true), edge.u_proxy, part(false), edge.v_proxy))
    }

    /// The first `count` labels of the form `p#k` unused anywhere in the tree.
    pub fn fresh_labels(&self, count: usize) -> Vec<Label> {
        let used: BTreeSet<&Label> = self.nodes.values().flat_map(|c| c.labels()).collect();
        (0..).map(|k| Label::new(format!("p#{k}"))).filter(|l| !used.contains(l)).take(count).collect()
    }

    /// Names each proxy by the non-proxy labels lying beyond its edge.
    fn proxy_names(&self) -> BTreeMap<Label, String> {
        let mut names = BTreeMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let mut rest = self.edges.clone();
            rest.remove(e);
            for (near, proxy, far) in [(edge.u, &edge.u_proxy, edge.v), (edge.v, &edge.v_proxy, edge.u)] {
                debug_assert_ne!(near, far);
                let side = component(self.nodes.keys().copied(), &rest, far);
                let mut beyond: Vec<Label> = side.iter().flat_map(|&n| self.own_labels(n).unwrap()).collect();
                beyond.sort();
                let joined: Vec<&str> = beyond.iter().map(Label::as_str).collect();
                names.insert(proxy.clone(), format!("P{}", joined.join("\u{1f}")));
            }
        }
        names
    }

    /// The renamed, sorted ground set of a node and its sign table in that
    /// order.
    fn node_encoding(chi: &Chirotope, names: &BTreeMap<Label, String>) -> String {
        let mut order: Vec<(String, usize)> = chi
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| (names.get(l).cloned().unwrap_or_else(|| format!("L{l}")), i))
            .collect();
        order.sort();
        let n = order.len();
        let mut signs = String::with_capacity(n * n * n / 6);
        for k in 2..n {
            for j in 1..k {
                for i in 0..j {
                    let s = chi.sign_idx(order[i].1, order[j].1, order[k].1);
                    signs.push(if s > 0 { '+' } else { '-' });
                }
            }
        }
        let names: Vec<String> = order.into_iter().map(|(s, _)| s).collect();
        format!("{}\u{1e}{}", names.join("\u{1e}"), signs)
    }

    /// Canonical encoding, equal for two trees exactly when they are the same
    /// up to renaming nodes and proxies.
    ///
    /// Each proxy is named by the non-proxy labels lying beyond its edge;
    /// each node is encoded by its renamed, sorted ground set and its sign
    /// table in that order; the node encodings are then sorted.
    pub fn fingerprint(&self) -> TreeFingerprint {
        let names = self.proxy_names();
        let mut encodings: Vec<String> = self.nodes.values().map(|chi| Self::node_encoding(chi, &names)).collect();
        encodings.sort();
        TreeFingerprint(encodings.join("\n"))
    }

    /// The same tree with nodes numbered in fingerprint order and proxies
    /// renamed `p#0, p#1, ...` in the same order, so that isomorphic trees
    /// normalize to identical values.
    pub fn normalized(&self) -> ChirotopeTree {
        let names = self.proxy_names();
        let mut order: Vec<(String, NodeId)> =
            self.nodes.iter().map(|(&id, chi)| (Self::node_encoding(chi, &names), id)).collect();
        order.sort();
        let new_id: BTreeMap<NodeId, NodeId> = order.iter().enumerate().map(|(i, &(_, id))| (id, NodeId(i as u32))).collect();
        let mut proxies: Vec<(&String, &Label)> = names.iter().map(|(l, n)| (n, l)).collect();
        proxies.sort();
        let ordinary: BTreeSet<Label> = self.nodes.keys().flat_map(|&id| self.own_labels(id).unwrap()).collect();
        let fresh = (0..).map(|k| Label::new(format!("p#{k}"))).filter(|l| !ordinary.contains(l));
        let rename: BTreeMap<Label, Label> = proxies.into_iter().map(|(_, l)| l.clone()).zip(fresh).collect();
        let nodes = self
            .nodes
            .iter()
            .map(|(id, chi)| {
                let map: BTreeMap<Label, Label> =
                    chi.labels().iter().map(|l| (l.clone(), rename.get(l).unwrap_or(l).clone())).collect();
                (new_id[id], chi.relabel(&map).expect("renaming is injective"))
            })
            .collect();
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                let (u, v) = (new_id[&e.u], new_id[&e.v]);
                if u < v {
                    Edge::new(u, rename[&e.u_proxy].clone(), v, rename[&e.v_proxy].clone())
                } else {
                    Edge::new(v, rename[&e.v_proxy].clone(), u, rename[&e.u_proxy].clone())
                }
            })
            .collect();
        edges.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
        ChirotopeTree { nodes, edges }
    }
}

/// Nodes reachable from `start` over `edges`.
fn component(nodes: impl Iterator<Item = NodeId>, edges: &[Edge], start: NodeId) -> BTreeSet<NodeId> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = nodes.map(|n| (n, Vec::new())).collect();
    for e in edges {
        adj.get_mut(&e.u).unwrap().push(e.v);
        adj.get_mut(&e.v).unwrap().push(e.u);
    }
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for &m in &adj[&n] {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    seen
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeFingerprint(String);

impl TreeFingerprint {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Hex SHA-256 of the encoding, for display.
    pub fn digest(&self) -> String {
        Sha256::digest(self.0.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for TreeFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeFingerprint({})", &self.digest()[..16])
    }
}

pub fn trees_isomorphic(a: &ChirotopeTree, b: &ChirotopeTree) -> bool {
    a.fingerprint() == b.fingerprint()
}

/// Routing tables for evaluating the represented chirotope triple by triple.
pub struct TreeEvaluator<'a> {
    tree: &'a ChirotopeTree,
    home: BTreeMap<Label, NodeId>,
    /// `next[(from, to)]` is the proxy of `from` on the first edge toward `to`.
    next: BTreeMap<(NodeId, NodeId), (Label, NodeId)>,
}

impl<'a> TreeEvaluator<'a> {
    fn new(tree: &'a ChirotopeTree) -> Self {
        let mut home = BTreeMap::new();
        for id in tree.node_ids() {
            for l in tree.own_labels(id).unwrap() {
                home.insert(l, id);
            }
        }
        let mut next = BTreeMap::new();
        for src in tree.node_ids() {
            // Breadth-first search from `src`, remembering the first hop.
            let mut queue = VecDeque::new();
            for &e in &tree.incident(src) {
                let edge = &tree.edges[e];
                let n = edge.other(src).unwrap();
                let hop = (edge.proxy_at(src).unwrap().clone(), n);
                next.insert((src, n), hop.clone());
                queue.push_back((n, hop));
            }
            while let Some((n, hop)) = queue.pop_front() {
                for &e in &tree.incident(n) {
                    let m = tree.edges[e].other(n).unwrap();
                    if m != src && !next.contains_key(&(src, m)) {
                        next.insert((src, m), hop.clone());
                        queue.push_back((m, hop.clone()));
                    }
                }
            }
        }
        TreeEvaluator { tree, home, next }
    }

    fn home(&self, x: &Label) -> Result<NodeId> {
        self.home.get(x).copied().ok_or_else(|| Error::UnknownLabel(x.clone()))
    }

    pub fn representative(&self, x: &Label, v: NodeId) -> Result<Label> {
        self.tree.node(v)?;
        let h = self.home(x)?;
        Ok(if h == v { x.clone() } else { self.next[&(v, h)].0.clone() })
    }

    fn path(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        let mut p = vec![a];
        let mut cur = a;
        while cur != b {
            cur = self.next[&(cur, b)].1;
            p.push(cur);
        }
        p
    }

    pub fn median_node(&self, x: &Label, y: &Label, z: &Label) -> Result<NodeId> {
        let (a, b, c) = (self.home(x)?, self.home(y)?, self.home(z)?);
        if a == b || a == c {
            return Ok(a);
        }
        if b == c {
            return Ok(b);
        }
        let ab = self.path(a, b);
        let bc = self.path(b, c);
        let ac = self.path(a, c);
        Ok(*ab.iter().find(|n| bc.contains(n) && ac.contains(n)).expect("paths in a tree meet"))
    }

    pub fn sign(&self, x: &Label, y: &Label, z: &Label) -> Result<i8> {
        if x == y || x == z {
            return Err(Error::RepeatedLabel(x.clone()));
        }
        if y == z {
            return Err(Error::RepeatedLabel(y.clone()));
        }
        let v = self.median_node(x, y, z)?;
        let chi = self.tree.node(v)?;
        chi.sign(&self.representative(x, v)?, &self.representative(y, v)?, &self.representative(z, v)?)
    }
}
