//! Rooted forests, lower sets, admissible subforests and layerings.
//!
//! A forest stores its vertices as dense ids `0..len()`. Vertex sets are
//! bitmasks over these ids, so forests are limited to 64 vertices.

use std::collections::{BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::ops::{BitAnd, BitOr, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_VERTICES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavour {
    Labelled,
    Planar,
    Plain,
}

impl Flavour {
    pub const ALL: [Flavour; 3] = [Flavour::Labelled, Flavour::Planar, Flavour::Plain];

    pub fn as_str(self) -> &'static str {
        match self {
            Flavour::Labelled => "labelled",
            Flavour::Planar => "planar",
            Flavour::Plain => "plain",
        }
    }

    pub fn is_labelled(self) -> bool {
        self == Flavour::Labelled
    }
}

impl fmt::Display for Flavour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Flavour {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "labelled" | "labeled" => Ok(Flavour::Labelled),
            "planar" => Ok(Flavour::Planar),
            "plain" => Ok(Flavour::Plain),
            other => Err(format!("unknown flavour `{other}` (expected labelled, planar or plain)")),
        }
    }
}

/// A set of vertex ids below 64, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }
}

impl BitOr for VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: VertexSet) -> VertexSet {
        VertexSet(self.0 | rhs.0)
    }
}

impl BitAnd for VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: VertexSet) -> VertexSet {
        VertexSet(self.0 & rhs.0)
    }
}

impl Sub for VertexSet {
    type Output = VertexSet;
    fn sub(self, rhs: VertexSet) -> VertexSet {
        VertexSet(self.0 & !rhs.0)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Canonical isomorphism code of a (layered) forest within a flavour.
///
/// Codes are ASCII. Each vertex contributes `(` layer [`:` label] children `)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One admissible cut applied to the current forest: `lower` is a lower set
/// of it, and `keep` says which side survives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cut {
    pub lower: VertexSet,
    pub keep: Keep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Keep {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedForest {
    flavour: Flavour,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    labels: Option<Vec<String>>,
    pos: Vec<usize>,
}

impl RootedForest {
    pub fn empty(flavour: Flavour) -> Self {
        RootedForest {
            flavour,
            parent: Vec::new(),
            children: Vec::new(),
            roots: Vec::new(),
            labels: if flavour.is_labelled() { Some(Vec::new()) } else { None },
            pos: Vec::new(),
        }
    }

    /// Builds a forest from a parent map. Children and roots are ordered by id.
    pub fn from_parents(parent: Vec<Option<usize>>, labels: Option<Vec<String>>, flavour: Flavour) -> Result<Self> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for (v, p) in parent.iter().enumerate() {
            match *p {
                Some(p) if p < n => children[p].push(v),
                Some(p) => return Err(Error::Invalid(format!("parent {p} of vertex {v} does not exist"))),
                None => roots.push(v),
            }
        }
        Self::from_parts(parent, children, roots, labels, flavour)
    }

    /// Builds a forest from explicit child and root orders.
    pub fn from_parts(
        parent: Vec<Option<usize>>,
        children: Vec<Vec<usize>>,
        roots: Vec<usize>,
        labels: Option<Vec<String>>,
        flavour: Flavour,
    ) -> Result<Self> {
        let n = parent.len();
        if n > MAX_VERTICES {
            return Err(Error::TooLarge(n));
        }
        if children.len() != n {
            return Err(Error::Invalid("children table has the wrong length".into()));
        }
        for (v, kids) in children.iter().enumerate() {
            for &c in kids {
                if c >= n || parent[c] != Some(v) {
                    return Err(Error::Invalid(format!("vertex {c} is listed as a child of {v}")));
                }
            }
        }
        let listed: usize = children.iter().map(Vec::len).sum();
        let mut seen_roots = VertexSet::EMPTY;
        for &r in &roots {
            if r >= n || parent[r].is_some() || seen_roots.contains(r) {
                return Err(Error::Invalid(format!("bad root {r}")));
            }
            seen_roots.insert(r);
        }
        if listed + roots.len() != n {
            return Err(Error::Invalid("child lists and roots do not cover the vertices".into()));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::Invalid("label table has the wrong length".into()));
            }
            let mut seen = HashSet::new();
            for l in labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        } else if flavour.is_labelled() {
            return Err(Error::Unlabelled);
        }
        let mut forest = RootedForest { flavour, parent, children, roots, labels, pos: vec![usize::MAX; n] };
        let mut next = 0;
        let mut stack: Vec<usize> = forest.roots.iter().rev().copied().collect();
        while let Some(v) = stack.pop() {
            forest.pos[v] = next;
            next += 1;
            stack.extend(forest.children[v].iter().rev());
        }
        if next != n {
            return Err(Error::Invalid("parent map has a cycle".into()));
        }
        Ok(forest)
    }

    pub fn parse(text: &str, flavour: Flavour) -> Result<Self> {
        Parser::new(text, flavour).forest()
    }

    /// The same forest read in another flavour. Labels are kept as surface
    /// names but only the labelled flavour looks at them.
    pub fn with_flavour(&self, flavour: Flavour) -> Result<Self> {
        if flavour.is_labelled() && self.labels.is_none() {
            return Err(Error::Unlabelled);
        }
        let mut f = self.clone();
        f.flavour = flavour;
        Ok(f)
    }

    /// Attaches labels `v0, v1, ..` by id.
    pub fn with_generated_labels(&self) -> Self {
        let mut f = self.clone();
        f.labels = Some((0..self.len()).map(|v| format!("v{v}")).collect());
        f
    }

    pub fn flavour(&self) -> Flavour {
        self.flavour
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    /// Position of `v` in the depth-first, child-order-respecting traversal.
    pub fn preorder_position(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).filter_map(|v| self.parent[v].map(|p| (p, v))).collect()
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// The vertex set named by `labels`.
    pub fn set_of(&self, labels: &[&str]) -> Result<VertexSet> {
        labels
            .iter()
            .map(|l| self.vertex(l).ok_or_else(|| Error::Invalid(format!("no vertex labelled `{l}`"))))
            .collect()
    }

    /// Name used in messages: the label if any, otherwise `#id`.
    pub fn name(&self, v: usize) -> String {
        match self.label(v) {
            Some(l) => l.to_string(),
            None => format!("#{v}"),
        }
    }

    pub fn is_tree(&self) -> bool {
        self.roots.len() == 1
    }

    /// Roots of the subforest spanned by `h`, in host preorder.
    pub fn roots_of(&self, h: VertexSet) -> Vec<usize> {
        let mut r: Vec<usize> = h.iter().filter(|&v| self.parent[v].map_or(true, |p| !h.contains(p))).collect();
        r.sort_by_key(|&v| self.pos[v]);
        r
    }

    pub fn is_connected(&self, s: VertexSet) -> bool {
        self.roots_of(s).len() == 1
    }

    /// Whether `s` is downward closed inside the forest spanned by `h`.
    pub fn is_lower_in(&self, s: VertexSet, h: VertexSet) -> bool {
        s.is_subset(h) && s.iter().all(|v| self.parent[v].map_or(true, |p| !h.contains(p) || s.contains(p)))
    }

    pub fn is_lower(&self, s: VertexSet) -> bool {
        self.is_lower_in(s, self.vertices())
    }

    /// `s` together with all its ancestors.
    pub fn down_closure(&self, s: VertexSet) -> VertexSet {
        let mut out = s;
        for v in s.iter() {
            let mut u = v;
            while let Some(p) = self.parent[u] {
                if out.contains(p) {
                    break;
                }
                out.insert(p);
                u = p;
            }
        }
        out
    }

    /// Whether `s` is a difference of nested lower sets.
    pub fn is_admissible(&self, s: VertexSet) -> bool {
        s.is_subset(self.vertices()) && self.is_lower(self.down_closure(s) - s)
    }

    pub fn lower_sets(&self) -> Vec<VertexSet> {
        self.lower_sets_of(self.vertices())
    }

    /// All lower sets of the forest spanned by `h`, sorted.
    pub fn lower_sets_of(&self, h: VertexSet) -> Vec<VertexSet> {
        let mut acc = vec![VertexSet::EMPTY];
        for r in self.roots_of(h) {
            let sub = self.rooted_lower_sets(r, h);
            acc = acc.iter().flat_map(|&a| sub.iter().map(move |&b| a | b)).collect();
        }
        acc.sort();
        acc
    }

    fn rooted_lower_sets(&self, v: usize, h: VertexSet) -> Vec<VertexSet> {
        let mut with_v = vec![VertexSet::singleton(v)];
        for &c in &self.children[v] {
            if h.contains(c) {
                let sub = self.rooted_lower_sets(c, h);
                with_v = with_v.iter().flat_map(|&a| sub.iter().map(move |&b| a | b)).collect();
            }
        }
        with_v.push(VertexSet::EMPTY);
        with_v
    }

    /// All admissible subforests, including the empty set and `V`, sorted by
    /// size and then by bitmask.
    pub fn admissible_subforests(&self) -> Vec<VertexSet> {
        let lower = self.lower_sets();
        let mut out = BTreeSet::new();
        for &li in &lower {
            for &lj in &lower {
                if lj.is_subset(li) {
                    out.insert(li - lj);
                }
            }
        }
        let mut v: Vec<VertexSet> = out.into_iter().collect();
        v.sort_by_key(|s| (s.len(), s.bits()));
        v
    }

    /// The subforest spanned by `s`, with ids renumbered in host preorder.
    /// Components and children keep the host order.
    pub fn restrict(&self, s: VertexSet) -> Result<RootedForest> {
        if !s.is_subset(self.vertices()) {
            return Err(Error::NotASubset);
        }
        let mut keep: Vec<usize> = s.iter().collect();
        keep.sort_by_key(|&v| self.pos[v]);
        let mut new_id = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let parent = keep.iter().map(|&v| self.parent[v].filter(|&p| s.contains(p)).map(|p| new_id[p])).collect();
        let children = keep
            .iter()
            .map(|&v| self.children[v].iter().filter(|&&c| s.contains(c)).map(|&c| new_id[c]).collect())
            .collect();
        let roots = self.roots_of(s).into_iter().map(|r| new_id[r]).collect();
        let labels = self.labels.as_ref().map(|l| keep.iter().map(|&v| l[v].clone()).collect());
        RootedForest::from_parts(parent, children, roots, labels, self.flavour)
    }

    /// Code of the whole forest, every vertex in layer 1.
    pub fn code(&self) -> CanonicalCode {
        self.layered_code(self.vertices(), |_| 1)
    }

    /// Code of the subforest spanned by `h` with vertex layers `layer`.
    pub fn layered_code(&self, h: VertexSet, layer: impl Fn(usize) -> u32) -> CanonicalCode {
        let mut parts: Vec<String> = self.roots_of(h).into_iter().map(|r| self.subtree_code(r, h, &layer)).collect();
        if self.flavour != Flavour::Planar {
            parts.sort();
        }
        CanonicalCode(parts.concat())
    }

    pub fn layering_code(&self, x: &Layering) -> CanonicalCode {
        self.layered_code(x.host(), |v| x.layer_of(v))
    }

    fn subtree_code(&self, v: usize, h: VertexSet, layer: &dyn Fn(usize) -> u32) -> String {
        let mut kids: Vec<String> =
            self.children[v].iter().filter(|&&c| h.contains(c)).map(|&c| self.subtree_code(c, h, layer)).collect();
        if self.flavour != Flavour::Planar {
            kids.sort();
        }
        let mut s = String::with_capacity(8 + kids.iter().map(String::len).sum::<usize>());
        s.push('(');
        let _ = write!(s, "{}", layer(v));
        if self.flavour.is_labelled() {
            s.push(':');
            s.push_str(self.label(v).unwrap_or(""));
        }
        for k in kids {
            s.push_str(&k);
        }
        s.push(')');
        s
    }

    /// Vertices of `h` in the depth-first order that the code describes.
    /// Two layered forests with equal codes are isomorphic by matching these
    /// orders position by position.
    pub fn canonical_order(&self, h: VertexSet, layer: impl Fn(usize) -> u32) -> Vec<usize> {
        let mut parts: Vec<(String, Vec<usize>)> =
            self.roots_of(h).into_iter().map(|r| self.annotated(r, h, &layer)).collect();
        if self.flavour != Flavour::Planar {
            parts.sort_by(|a, b| a.0.cmp(&b.0));
        }
        parts.into_iter().flat_map(|(_, o)| o).collect()
    }

    fn annotated(&self, v: usize, h: VertexSet, layer: &dyn Fn(usize) -> u32) -> (String, Vec<usize>) {
        let mut kids: Vec<(String, Vec<usize>)> =
            self.children[v].iter().filter(|&&c| h.contains(c)).map(|&c| self.annotated(c, h, layer)).collect();
        if self.flavour != Flavour::Planar {
            kids.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut code = format!("({}", layer(v));
        if self.flavour.is_labelled() {
            code.push(':');
            code.push_str(self.label(v).unwrap_or(""));
        }
        let mut order = vec![v];
        for (c, o) in kids {
            code.push_str(&c);
            order.extend(o);
        }
        code.push(')');
        (code, order)
    }

    /// A cut sequence that carves the connected set `s` out of the forest.
    ///
    /// With `w` the top vertex of `s`, the first cut keeps everything above
    /// and including `w` as the upper part; `s` is then a lower set of that
    /// subtree and the second cut keeps it.
    pub fn subtree_reachable(&self, s: VertexSet) -> Result<Vec<Cut>> {
        if !s.is_subset(self.vertices()) {
            return Err(Error::NotASubset);
        }
        let tops = self.roots_of(s);
        if tops.len() != 1 {
            return Err(Error::NotConnected);
        }
        let w = tops[0];
        let mut cuts = Vec::new();
        let mut current = self.vertices();
        let above = self.descendants(w);
        if above != current {
            cuts.push(Cut { lower: current - above, keep: Keep::Upper });
            current = above;
        }
        if s != current {
            cuts.push(Cut { lower: s, keep: Keep::Lower });
        }
        Ok(cuts)
    }

    /// Replays a cut sequence from the whole forest, checking that every cut
    /// uses a lower set of the current forest.
    pub fn replay_cuts(&self, cuts: &[Cut]) -> Option<VertexSet> {
        let mut current = self.vertices();
        for cut in cuts {
            if !self.is_lower_in(cut.lower, current) {
                return None;
            }
            current = match cut.keep {
                Keep::Lower => cut.lower,
                Keep::Upper => current - cut.lower,
            };
        }
        Some(current)
    }

    /// `v` and everything above it.
    pub fn descendants(&self, v: usize) -> VertexSet {
        let mut out = VertexSet::singleton(v);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &c in &self.children[u] {
                out.insert(c);
                stack.push(c);
            }
        }
        out
    }

    /// Forest expression in the input grammar, children in planar order.
    pub fn to_expression(&self) -> String {
        let mut s = String::new();
        for (i, &r) in self.roots.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            self.write_node(r, &mut s);
        }
        s
    }

    fn write_node(&self, v: usize, s: &mut String) {
        match (self.flavour, self.label(v)) {
            (Flavour::Labelled, Some(l)) => s.push_str(l),
            _ => s.push('*'),
        }
        if !self.children[v].is_empty() {
            s.push('(');
            for (i, &c) in self.children[v].iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                self.write_node(c, s);
            }
            s.push(')');
        }
    }
}

impl fmt::Display for RootedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expression())
    }
}

/// An element of the tree construction in dimension `n`: a chain
/// `L0 ⊇ L1 ⊇ .. ⊇ Ln = ∅` of vertex sets of the host tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layering {
    chain: Vec<VertexSet>,
}

impl Layering {
    /// Wraps a chain without checking it; see [`Layering::is_valid`].
    pub fn new(chain: Vec<VertexSet>) -> Self {
        assert!(!chain.is_empty(), "a layering has at least one set");
        Layering { chain }
    }

    /// The unique element of dimension 0.
    pub fn empty() -> Self {
        Layering { chain: vec![VertexSet::EMPTY] }
    }

    pub fn dim(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn chain(&self) -> &[VertexSet] {
        &self.chain
    }

    pub fn host(&self) -> VertexSet {
        self.chain[0]
    }

    /// The `i`-th layer `L(i-1) \ L(i)`, counted from 1 at the top.
    pub fn layer(&self, i: usize) -> VertexSet {
        self.chain[i - 1] - self.chain[i]
    }

    pub fn layers(&self) -> Vec<VertexSet> {
        (1..=self.dim()).map(|i| self.layer(i)).collect()
    }

    /// Layer index of `v`, or 0 when `v` is outside the host.
    pub fn layer_of(&self, v: usize) -> u32 {
        self.chain[..self.dim()].iter().filter(|l| l.contains(v)).count() as u32
    }

    /// All layers nonempty.
    pub fn is_strict(&self) -> bool {
        self.chain.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_valid(&self, forest: &RootedForest) -> bool {
        let h = self.host();
        let last = *self.chain.last().unwrap();
        last.is_empty()
            && forest.is_admissible(h)
            && self.chain.windows(2).all(|w| w[1].is_subset(w[0]))
            && self.chain.iter().all(|&l| forest.is_lower_in(l, h))
    }

    /// Face map `d_i`. `d_0` forgets the top layer, `d_n` forgets the bottom
    /// layer, and an inner face merges layers `i` and `i+1`.
    pub fn face(&self, i: usize) -> Layering {
        let n = self.dim();
        assert!(n >= 1 && i <= n, "face d_{i} undefined in dimension {n}");
        let chain = if i == 0 {
            self.chain[1..].to_vec()
        } else if i == n {
            let bottom = self.chain[n - 1];
            self.chain[..n].iter().map(|&l| l - bottom).collect()
        } else {
            let mut c = self.chain.clone();
            c.remove(i);
            c
        };
        Layering { chain }
    }

    /// Degeneracy `s_i`: repeats `L_i`, inserting an empty layer.
    pub fn degeneracy(&self, i: usize) -> Layering {
        assert!(i <= self.dim(), "degeneracy s_{i} undefined in dimension {}", self.dim());
        let mut c = self.chain.clone();
        c.insert(i, self.chain[i]);
        Layering { chain: c }
    }
}

/// All layerings of `forest` in dimension `n` whose host is `h`.
pub fn layerings_of(forest: &RootedForest, h: VertexSet, n: usize) -> Vec<Layering> {
    if n == 0 {
        return if h.is_empty() { vec![Layering::empty()] } else { Vec::new() };
    }
    let lower = forest.lower_sets_of(h);
    let mut out = Vec::new();
    let mut chain = vec![h];
    extend_chains(&lower, n, &mut chain, &mut out);
    out
}

fn extend_chains(lower: &[VertexSet], n: usize, chain: &mut Vec<VertexSet>, out: &mut Vec<Layering>) {
    if chain.len() == n {
        chain.push(VertexSet::EMPTY);
        out.push(Layering { chain: chain.clone() });
        chain.pop();
        return;
    }
    let top = *chain.last().unwrap();
    for &l in lower {
        if l.is_subset(top) {
            chain.push(l);
            extend_chains(lower, n, chain, out);
            chain.pop();
        }
    }
}

/// All layerings of dimension `n` over every admissible subforest.
pub fn enumerate_layerings(forest: &RootedForest, n: usize) -> Vec<Layering> {
    if n == 0 {
        return vec![Layering::empty()];
    }
    forest.admissible_subforests().into_iter().flat_map(|h| layerings_of(forest, h, n)).collect()
}

/// Rooted trees with `n` vertices: every planar shape for the planar
/// flavour, one per isomorphism class otherwise. Labelled trees get labels
/// `v0, v1, ..` in preorder.
pub fn all_trees(n: usize, flavour: Flavour) -> Vec<RootedForest> {
    if n == 0 {
        let f = RootedForest::empty(Flavour::Planar);
        return vec![f.with_generated_labels().with_flavour(flavour).expect("labels attached")];
    }
    let exprs = planar_tree_exprs(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in exprs {
        let t = RootedForest::parse(&e, Flavour::Planar).expect("generated expression parses");
        if flavour != Flavour::Planar {
            let plain = t.with_flavour(Flavour::Plain).expect("unlabelled");
            if !seen.insert(plain.code()) {
                continue;
            }
        }
        out.push(t.with_generated_labels().with_flavour(flavour).expect("labels attached"));
    }
    out
}

fn planar_tree_exprs(n: usize) -> Vec<String> {
    if n == 1 {
        return vec!["*".to_string()];
    }
    planar_forest_exprs(n - 1).into_iter().map(|f| format!("*({f})")).collect()
}

fn planar_forest_exprs(m: usize) -> Vec<String> {
    let mut out = Vec::new();
    for k in 1..=m {
        for t in planar_tree_exprs(k) {
            if k == m {
                out.push(t.clone());
            } else {
                for rest in planar_forest_exprs(m - k) {
                    out.push(format!("{t},{rest}"));
                }
            }
        }
    }
    out
}

struct Parser<'a> {
    text: &'a [u8],
    at: usize,
    flavour: Flavour,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    labels: Vec<String>,
    seen: HashSet<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, flavour: Flavour) -> Self {
        Parser {
            text: text.as_bytes(),
            at: 0,
            flavour,
            parent: Vec::new(),
            children: Vec::new(),
            roots: Vec::new(),
            labels: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.text.len() && self.text[self.at].is_ascii_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.at).copied()
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.at, msg: msg.into() })
    }

    fn forest(mut self) -> Result<RootedForest> {
        if self.peek().is_none() {
            return Ok(RootedForest::empty(self.flavour));
        }
        loop {
            let r = self.tree(None)?;
            self.roots.push(r);
            match self.peek() {
                Some(b';') => self.at += 1,
                None => break,
                Some(b')') => return self.error("unbalanced parenthesis"),
                Some(c) => return self.error(format!("unexpected `{}`", c as char)),
            }
        }
        let labels = if self.flavour.is_labelled() { Some(self.labels) } else { None };
        RootedForest::from_parts(self.parent, self.children, self.roots, labels, self.flavour)
    }

    fn tree(&mut self, parent: Option<usize>) -> Result<usize> {
        let id = self.node()?;
        self.parent.push(parent);
        self.children.push(Vec::new());
        if let Some(p) = parent {
            self.children[p].push(id);
        }
        if self.peek() == Some(b'(') {
            self.at += 1;
            loop {
                if self.peek() == Some(b')') {
                    return self.error("empty child list");
                }
                self.tree(Some(id))?;
                match self.peek() {
                    Some(b',') => self.at += 1,
                    Some(b')') => {
                        self.at += 1;
                        break;
                    }
                    None => return self.error("unbalanced parenthesis"),
                    Some(c) => return self.error(format!("unexpected `{}`", c as char)),
                }
            }
        }
        Ok(id)
    }

    fn node(&mut self) -> Result<usize> {
        let id = self.parent.len();
        if id >= MAX_VERTICES {
            return Err(Error::TooLarge(id + 1));
        }
        let start = match self.peek() {
            Some(_) => self.at,
            None => return self.error("expected a node"),
        };
        if self.text[start] == b'*' {
            self.at += 1;
            if self.flavour.is_labelled() {
                return Err(Error::MissingLabel { pos: start });
            }
            return Ok(id);
        }
        while self.at < self.text.len() && (self.text[self.at].is_ascii_alphanumeric() || self.text[self.at] == b'_') {
            self.at += 1;
        }
        if self.at == start {
            return self.error(format!("expected a node, found `{}`", self.text[start] as char));
        }
        let label = String::from_utf8_lossy(&self.text[start..self.at]).into_owned();
        if !self.flavour.is_labelled() {
            return Err(Error::UnexpectedLabel { pos: start, label });
        }
        if !self.seen.insert(label.clone()) {
            return Err(Error::DuplicateLabel(label));
        }
        self.labels.push(label);
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(s: &str) -> RootedForest {
        RootedForest::parse(s, Flavour::Labelled).unwrap()
    }

    #[test]
    fn parses_example_tree() {
        let t = lab("a(b(c),d(e))");
        assert_eq!(t.len(), 5);
        assert_eq!(t.roots(), &[0]);
        assert_eq!(t.label(0), Some("a"));
        assert_eq!(t.children(0), &[1, 3]);
        assert_eq!(t.to_expression(), "a(b(c),d(e))");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(RootedForest::parse("a(b(c),d(e)", Flavour::Labelled), Err(Error::Syntax { .. })));
        assert!(matches!(RootedForest::parse("a(b,a)", Flavour::Labelled), Err(Error::DuplicateLabel(_))));
        assert!(matches!(RootedForest::parse("a", Flavour::Plain), Err(Error::UnexpectedLabel { .. })));
        assert!(matches!(RootedForest::parse("*", Flavour::Labelled), Err(Error::MissingLabel { .. })));
        assert!(matches!(RootedForest::parse("a()", Flavour::Labelled), Err(Error::Syntax { .. })));
        assert!(matches!(RootedForest::parse("a)b", Flavour::Labelled), Err(Error::Syntax { .. })));
    }

    #[test]
    fn whitespace_and_forests() {
        let f = RootedForest::parse(" * ( * , * ) ; * ", Flavour::Plain).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.roots().len(), 2);
        assert!(RootedForest::parse("", Flavour::Plain).unwrap().is_empty());
        assert_eq!(RootedForest::parse("*", Flavour::Plain).unwrap().len(), 1);
    }

    #[test]
    fn single_vertex_sets() {
        let t = lab("v");
        assert_eq!(t.lower_sets(), vec![VertexSet::EMPTY, VertexSet::singleton(0)]);
        assert_eq!(t.admissible_subforests(), vec![VertexSet::EMPTY, VertexSet::singleton(0)]);
    }

    #[test]
    fn lower_sets_of_example() {
        let t = lab("a(b(c),d(e))");
        let ls = t.lower_sets();
        assert_eq!(ls.len(), 10);
        assert!(ls.iter().all(|&l| t.is_lower(l)));
        let brute = (0u64..32).filter(|&m| t.is_lower(VertexSet(m))).count();
        assert_eq!(brute, 10);
    }

    #[test]
    fn admissible_of_small_trees() {
        let chain = lab("a(b(c))");
        assert_eq!(chain.admissible_subforests().len(), 7);
        let cherry = lab("b(a,c)");
        let adm = cherry.admissible_subforests();
        assert_eq!(adm.len(), 8);
        assert!(adm.contains(&cherry.set_of(&["a", "c"]).unwrap()));
        for m in 0u64..8 {
            let s = VertexSet(m);
            assert_eq!(cherry.is_admissible(s), adm.contains(&s));
        }
    }

    #[test]
    fn restrict_examples() {
        let t = lab("a(b(c),d(e))");
        let s = t.set_of(&["d", "e"]).unwrap();
        assert_eq!(t.restrict(s).unwrap().to_expression(), "d(e)");
        assert_eq!(t.restrict(t.vertices()).unwrap(), t);
        let u = lab("a(b,c)");
        let r = u.restrict(u.set_of(&["b", "c"]).unwrap()).unwrap();
        assert_eq!(r.roots().len(), 2);
        assert_eq!(r.to_expression(), "b;c");
        assert_eq!(t.restrict(VertexSet(1 << 9)), Err(Error::NotASubset));
    }

    #[test]
    fn layering_counts() {
        let t = lab("a(b(c))");
        assert_eq!(enumerate_layerings(&t, 0).len(), 1);
        assert_eq!(enumerate_layerings(&t, 1).len(), 7);
        let strict = enumerate_layerings(&t, 2).into_iter().filter(|x| x.is_strict()).count();
        assert_eq!(strict, 4);
    }

    #[test]
    fn codes_separate_flavours() {
        let t = lab("a(b(c),d(e))");
        let planar = t.with_flavour(Flavour::Planar).unwrap();
        let plain = t.with_flavour(Flavour::Plain).unwrap();
        let t1 = t.set_of(&["a", "b", "d", "e"]).unwrap();
        let t2 = t.set_of(&["a", "d", "e"]).unwrap();
        let t3 = t.set_of(&["a", "b", "c", "d"]).unwrap();
        let t4 = t.set_of(&["a", "b", "c"]).unwrap();
        let code = |f: &RootedForest, s| f.layered_code(s, |_| 1);
        assert_eq!(code(&planar, t2), code(&planar, t4));
        assert_eq!(code(&plain, t1), code(&plain, t3));
        assert_ne!(code(&planar, t1), code(&planar, t3));
        assert_ne!(code(&t, t1), code(&t, t3));
    }

    #[test]
    fn canonical_order_gives_isomorphism() {
        let a = RootedForest::parse("*(*(*),*)", Flavour::Plain).unwrap();
        let b = RootedForest::parse("*(*,*(*))", Flavour::Plain).unwrap();
        assert_eq!(a.code(), b.code());
        let oa = a.canonical_order(a.vertices(), |_| 1);
        let ob = b.canonical_order(b.vertices(), |_| 1);
        for (&x, &y) in oa.iter().zip(&ob) {
            assert_eq!(a.children(x).len(), b.children(y).len());
        }
    }

    #[test]
    fn reachability_witnesses() {
        let k13 = RootedForest::parse("*(*,*,*)", Flavour::Plain).unwrap();
        let leaf = VertexSet::singleton(2);
        let cuts = k13.subtree_reachable(leaf).unwrap();
        assert!(!cuts.is_empty());
        assert_eq!(k13.replay_cuts(&cuts), Some(leaf));
        assert!(k13.subtree_reachable(k13.vertices()).unwrap().is_empty());
        assert_eq!(k13.subtree_reachable(VertexSet(0b0110)), Err(Error::NotConnected));
    }

    #[test]
    fn tree_enumeration_counts() {
        let planar: Vec<usize> = (1..=6).map(|n| all_trees(n, Flavour::Planar).len()).collect();
        assert_eq!(planar, vec![1, 1, 2, 5, 14, 42]);
        let plain: Vec<usize> = (1..=6).map(|n| all_trees(n, Flavour::Plain).len()).collect();
        assert_eq!(plain, vec![1, 1, 2, 4, 9, 20]);
    }

    #[test]
    fn faces_of_layerings() {
        let t = lab("h(g(e(a,d(b,c)),f))");
        let l1 = t.set_of(&["e", "d", "f", "g", "h"]).unwrap();
        let l2 = t.set_of(&["h"]).unwrap();
        let x = Layering::new(vec![t.vertices(), l1, l2, VertexSet::EMPTY]);
        assert!(x.is_valid(&t));
        let y = x.face(0);
        assert_eq!(y.chain(), &[l1, l2, VertexSet::EMPTY]);
        assert_eq!(t.restrict(y.host()).unwrap().to_expression(), "h(g(e(d),f))");
        assert_eq!(x.degeneracy(0).face(0), x);
        assert_eq!(x.layer_of(t.vertex("b").unwrap()), 1);
        assert_eq!(x.layer_of(t.vertex("h").unwrap()), 3);
    }
}
