//! Finite graphs, their subgraphs, and the simplicial set of partitioned
//! subgraphs.
//!
//! An `n`-simplex is a subgraph `H` together with an ordered partition
//! `S1, .., Sn` of its vertices into possibly empty parts. The unlabelled
//! variant identifies partitioned subgraphs that are isomorphic by a
//! part-preserving bijection of vertices.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{RootedForest, VertexSet};
use crate::simplicial::{nondegenerate, LevelwiseSimplicialSet};

/// A finite undirected multigraph. Loops are only accepted when enabled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
    allow_loops: bool,
    incident: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, labels: Option<Vec<String>>, allow_loops: bool) -> Result<Self> {
        if n > 64 || edges.len() > 64 {
            return Err(Error::TooLarge(n.max(edges.len())));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::Invalid(format!("{} labels for {} vertices", l.len(), n)));
            }
            let mut seen = std::collections::HashSet::new();
            for s in l {
                if !seen.insert(s) {
                    return Err(Error::DuplicateLabel(s.clone()));
                }
            }
        }
        let mut incident = vec![0u64; n];
        let mut norm = Vec::with_capacity(edges.len());
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge {k} has an endpoint outside the graph")));
            }
            if u == v && !allow_loops {
                return Err(Error::Invalid(format!("edge {k} is a loop and loops are disabled")));
            }
            incident[u] |= 1 << k;
            incident[v] |= 1 << k;
            norm.push((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: norm, labels, allow_loops, incident })
    }

    /// Parses one edge `u-v` per token (whitespace or comma separated) and an
    /// optional `vertices:` line listing isolated vertices. `#` starts a
    /// comment. Vertices are numbered by first appearance.
    pub fn parse(text: &str, allow_loops: bool) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut id = |s: &str, names: &mut Vec<String>| -> usize {
            *index.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        };
        let valid = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let mut edges = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix("vertices:") {
                for v in rest.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                    if !valid(v) {
                        return Err(Error::Syntax { pos: start, msg: format!("bad vertex name `{v}`") });
                    }
                    id(v, &mut names);
                }
                continue;
            }
            for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                let (a, b) = tok
                    .split_once('-')
                    .ok_or_else(|| Error::Syntax { pos: start, msg: format!("expected `u-v`, found `{tok}`") })?;
                if !valid(a) || !valid(b) {
                    return Err(Error::Syntax { pos: start, msg: format!("bad edge `{tok}`") });
                }
                let (u, v) = (id(a, &mut names), id(b, &mut names));
                edges.push((u, v));
            }
        }
        let n = names.len();
        Graph::new(n, edges, Some(names), allow_loops)
    }

    /// The underlying graph of a forest: one edge per parent pair, in the
    /// order of [`RootedForest::edges`].
    pub fn from_forest(t: &RootedForest) -> Self {
        let labels = t.labels().map(|l| l.to_vec());
        Graph::new(t.len(), t.edges(), labels, false).expect("forest sizes are bounded")
    }

    pub fn without_labels(&self) -> Self {
        Graph { labels: None, ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn all_edges(&self) -> u64 {
        mask(self.edges.len())
    }

    pub fn allows_loops(&self) -> bool {
        self.allow_loops
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn set_of(&self, labels: &[&str]) -> Result<VertexSet> {
        labels.iter().map(|l| self.vertex(l).ok_or_else(|| Error::Invalid(format!("no vertex `{l}`")))).collect()
    }

    pub fn name(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Edges with both endpoints in `s`.
    pub fn edges_within(&self, s: VertexSet) -> u64 {
        self.all_edges() & !self.edges_touching(self.vertices() - s)
    }

    /// Edges with at least one endpoint in `s`.
    pub fn edges_touching(&self, s: VertexSet) -> u64 {
        s.iter().fold(0, |m, v| m | self.incident[v])
    }

    /// Loops at vertices of `s`; empty unless loops are enabled.
    pub fn loops_within(&self, s: VertexSet) -> u64 {
        let mut m = 0;
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            if u == v && s.contains(u) {
                m |= 1 << k;
            }
        }
        m
    }

    /// Edge ids joining `u` and `v`.
    pub fn edges_between(&self, u: usize, v: usize) -> u64 {
        let (a, b) = (u.min(v), u.max(v));
        let mut m = 0;
        for (k, &e) in self.edges.iter().enumerate() {
            if e == (a, b) {
                m |= 1 << k;
            }
        }
        m
    }

    /// Whether `(s, e)` is a subgraph: selected edges lie within `s` and
    /// every loop at a vertex of `s` is selected.
    pub fn is_subgraph(&self, s: VertexSet, e: u64) -> bool {
        s.is_subset(self.vertices()) && e & !self.edges_within(s) == 0 && self.loops_within(s) & !e == 0
    }

    /// All subgraphs: any vertex subset with any selection of the non-loop
    /// edges among its vertices.
    pub fn subgraphs(&self) -> Vec<(VertexSet, u64)> {
        let mut out = Vec::new();
        for bits in 0..(1u64 << self.n) {
            let s = VertexSet(bits);
            let loops = self.loops_within(s);
            let free = self.edges_within(s) & !loops;
            let mut sub = free;
            loop {
                out.push((s, sub | loops));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        }
        out
    }

    /// Isomorphism-invariant code of the whole graph.
    pub fn canonical_code(&self) -> String {
        let all = self.vertices();
        let x = PartitionedSubgraph { vertices: all, edges: self.all_edges(), parts: vec![all] };
        x.unlabelled_code(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let isolated: Vec<String> = (0..self.n).filter(|&v| self.incident[v] == 0).map(|v| self.name(v)).collect();
        if !isolated.is_empty() {
            let _ = writeln!(out, "vertices: {}", isolated.join(" "));
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{}-{}", self.name(u), self.name(v));
        }
        out
    }

    pub fn star(leaves: usize) -> Self {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v)).collect(), None, false).expect("small star")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v)).collect(), None, false).expect("small path")
    }
}

fn mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// A subgraph with an ordered partition of its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartitionedSubgraph {
    pub vertices: VertexSet,
    pub edges: u64,
    pub parts: Vec<VertexSet>,
}

impl PartitionedSubgraph {
    pub fn empty() -> Self {
        PartitionedSubgraph { vertices: VertexSet::EMPTY, edges: 0, parts: Vec::new() }
    }

    pub fn subgraph(vertices: VertexSet, edges: u64) -> Self {
        PartitionedSubgraph { vertices, edges, parts: vec![vertices] }
    }

    pub fn dim(&self) -> usize {
        self.parts.len()
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        let mut seen = VertexSet::EMPTY;
        for &p in &self.parts {
            if !p.is_disjoint(seen) {
                return false;
            }
            seen = seen | p;
        }
        seen == self.vertices && g.is_subgraph(self.vertices, self.edges)
    }

    /// All parts nonempty.
    pub fn is_strict(&self) -> bool {
        self.parts.iter().all(|p| !p.is_empty())
    }

    /// `d_0` and `d_n` delete the first or last part together with the
    /// edges touching it; inner faces merge neighbouring parts.
    pub fn face(&self, g: &Graph, i: usize) -> Self {
        let n = self.dim();
        assert!(n >= 1 && i <= n, "face d_{i} on dimension {n}");
        let mut parts = self.parts.clone();
        if i == 0 || i == n {
            let s = parts.remove(if i == 0 { 0 } else { n - 1 });
            let vertices = self.vertices - s;
            PartitionedSubgraph { vertices, edges: self.edges & !g.edges_touching(s), parts }
        } else {
            let merged = parts[i - 1] | parts[i];
            parts[i - 1] = merged;
            parts.remove(i);
            PartitionedSubgraph { vertices: self.vertices, edges: self.edges, parts }
        }
    }

    /// `s_i` inserts an empty part after the first `i` parts.
    pub fn degeneracy(&self, i: usize) -> Self {
        let mut parts = self.parts.clone();
        parts.insert(i, VertexSet::EMPTY);
        PartitionedSubgraph { vertices: self.vertices, edges: self.edges, parts }
    }

    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(v))
    }

    /// Parts joined by `/`, vertices by `.`, then `;` and the edge ids.
    pub fn labelled_code(&self) -> String {
        let parts = self.parts.iter().map(|p| p.iter().map(|v| v.to_string()).join(".")).join("/");
        let edges = (0..64).filter(|k| self.edges >> k & 1 == 1).join(".");
        format!("{parts};{edges}")
    }

    /// Minimum code over the part-preserving vertex orders.
    pub fn unlabelled_code(&self, g: &Graph) -> String {
        render_canonical(&self.canonical_form(g))
    }

    /// Packs the part of each vertex into a nibble and the edges above them.
    /// Needs at most 16 vertices and 15 parts.
    fn labelled_key(&self) -> u128 {
        let mut parts = 0u64;
        for (p, s) in self.parts.iter().enumerate() {
            for v in s.iter() {
                parts |= ((p + 1) as u64) << (4 * v);
            }
        }
        (self.edges as u128) << 64 | parts as u128
    }

    /// Byte form of the unlabelled code: the dimension, the part of each
    /// position, then the lower triangle of the multiplicity matrix read
    /// column by column, minimized over orders that respect a refined
    /// vertex invariant.
    fn canonical_form(&self, g: &Graph) -> Vec<u8> {
        let verts: Vec<usize> = self.vertices.iter().collect();
        let k = verts.len();
        let mut pos = [usize::MAX; 64];
        for (a, &v) in verts.iter().enumerate() {
            pos[v] = a;
        }
        let mut m = vec![0u8; k * k];
        let mut e = self.edges;
        while e != 0 {
            let id = e.trailing_zeros() as usize;
            e &= e - 1;
            let (u, v) = g.edges[id];
            let (a, b) = (pos[u], pos[v]);
            m[a * k + b] = m[a * k + b].saturating_add(1);
            if a != b {
                m[b * k + a] = m[b * k + a].saturating_add(1);
            }
        }
        let mut part = vec![0u8; k];
        for (p, s) in self.parts.iter().enumerate() {
            for v in s.iter() {
                part[pos[v]] = p as u8;
            }
        }
        let base: Vec<(u8, u32, u8)> = (0..k)
            .map(|a| (part[a], (0..k).filter(|&b| b != a).map(|b| m[a * k + b] as u32).sum(), m[a * k + a]))
            .collect();
        // One round of colour refinement keeps the search small.
        let key: Vec<((u8, u32, u8), Vec<((u8, u32, u8), u8)>)> = (0..k)
            .map(|a| {
                let mut nb: Vec<_> =
                    (0..k).filter(|&b| b != a && m[a * k + b] > 0).map(|b| (base[b], m[a * k + b])).collect();
                nb.sort_unstable();
                (base[a], nb)
            })
            .collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| key[a].cmp(&key[b]));
        // block[a]: first position of the block containing position a
        let mut block = vec![0usize; k];
        for a in 1..k {
            block[a] = if key[order[a]] == key[order[a - 1]] { block[a - 1] } else { a };
        }
        let mut block_end = vec![k; k];
        for a in (0..k.saturating_sub(1)).rev() {
            block_end[a] = if block[a + 1] == block[a] { block_end[a + 1] } else { a + 1 };
        }
        let mut search = Search { k, m: &m, order: &order, block: &block, block_end: &block_end, best: None };
        let mut chosen = Vec::with_capacity(k);
        let mut used = vec![false; k];
        let mut cur = Vec::with_capacity(k * (k + 1) / 2);
        search.run(&mut chosen, &mut used, &mut cur);
        let mut out = Vec::with_capacity(1 + k + k * (k + 1) / 2);
        out.push(self.dim() as u8);
        out.extend(order.iter().map(|&a| part[a]));
        out.extend(search.best.unwrap_or_default());
        out
    }

    pub fn describe(&self, g: &Graph) -> String {
        let parts = self.parts.iter().map(|p| format!("{{{}}}", p.iter().map(|v| g.name(v)).join(","))).join(" ");
        let edges = (0..g.edge_count())
            .filter(|k| self.edges >> k & 1 == 1)
            .map(|k| format!("{}{}", g.name(g.edges()[k].0), g.name(g.edges()[k].1)))
            .join(",");
        format!("({parts}; [{edges}])")
    }
}

struct Search<'a> {
    k: usize,
    m: &'a [u8],
    order: &'a [usize],
    block: &'a [usize],
    block_end: &'a [usize],
    best: Option<Vec<u8>>,
}

impl Search<'_> {
    fn run(&mut self, chosen: &mut Vec<usize>, used: &mut [bool], cur: &mut Vec<u8>) {
        let a = chosen.len();
        if a == self.k {
            if self.best.as_ref().map_or(true, |b| cur[..] < b[..]) {
                self.best = Some(cur.clone());
            }
            return;
        }
        for slot in self.block[a]..self.block_end[a] {
            if used[slot] {
                continue;
            }
            let v = self.order[slot];
            let mark = cur.len();
            for &u in chosen.iter() {
                cur.push(self.m[u * self.k + v]);
            }
            cur.push(self.m[v * self.k + v]);
            if self.best.as_ref().is_some_and(|b| cur[..] > b[..cur.len()]) {
                cur.truncate(mark);
                continue;
            }
            used[slot] = true;
            chosen.push(v);
            self.run(chosen, used, cur);
            chosen.pop();
            used[slot] = false;
            cur.truncate(mark);
        }
    }
}

fn render_canonical(form: &[u8]) -> String {
    let dim = form.first().copied().unwrap_or(0) as usize;
    let rest = &form[1.min(form.len())..];
    // k positions followed by k(k+1)/2 matrix entries
    let mut k = 0;
    while k + k * (k + 1) / 2 < rest.len() {
        k += 1;
    }
    let parts = rest[..k].iter().join(",");
    let matrix = rest[k..].iter().join(".");
    format!("{dim}|{parts}|{matrix}")
}

#[derive(Clone, Debug)]
pub struct GraphSegalSet {
    graph: Graph,
    labelled: bool,
    set: LevelwiseSimplicialSet,
    reps: Reps,
}

/// Labelled elements are kept as packed keys (see `labelled_key`), sorted
/// within each level; unlabelled classes keep a representative.
#[derive(Clone, Debug)]
enum Reps {
    Labelled(Vec<Vec<u128>>),
    Unlabelled(Vec<Vec<PartitionedSubgraph>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphCensus {
    pub labelled: bool,
    pub truncation: usize,
    pub level_sizes: Vec<usize>,
    pub nondegenerate: Vec<usize>,
    /// Elements with every part nonempty.
    pub strict: Vec<usize>,
}

pub fn default_truncation(g: &Graph) -> usize {
    g.len() + 2
}

pub fn code_of(g: &Graph, labelled: bool, x: &PartitionedSubgraph) -> String {
    if labelled {
        x.labelled_code()
    } else {
        x.unlabelled_code(g)
    }
}

fn packed_parts(key: u128) -> u64 {
    key as u64
}

fn packed_edges(key: u128) -> u64 {
    (key >> 64) as u64
}

fn pack(edges: u64, parts: u64) -> u128 {
    (edges as u128) << 64 | parts as u128
}

/// Vertices whose nibble equals `value`.
fn nibble_set(parts: u64, value: u64) -> VertexSet {
    let mut s = VertexSet::EMPTY;
    for v in 0..16 {
        if parts >> (4 * v) & 0xf == value {
            s.insert(v);
        }
    }
    s
}

/// Adds `delta` to every nibble greater than `above`.
fn shift_nibbles(parts: u64, above: u64, delta: i64) -> u64 {
    let mut out = 0;
    for v in 0..16 {
        let x = parts >> (4 * v) & 0xf;
        let y = if x > above { (x as i64 + delta) as u64 } else { x };
        out |= y << (4 * v);
    }
    out
}

fn labelled_face(g: &Graph, key: u128, n: usize, i: usize) -> u128 {
    let (parts, edges) = (packed_parts(key), packed_edges(key));
    let n = n as u64;
    let i = i as u64;
    if i == 0 || i == n {
        let gone = if i == 0 { 1 } else { n };
        let s = nibble_set(parts, gone);
        let mut kept = parts;
        for v in s.iter() {
            kept &= !(0xf << (4 * v));
        }
        let kept = if i == 0 { shift_nibbles(kept, 1, -1) } else { kept };
        pack(edges & !g.edges_touching(s), kept)
    } else {
        pack(edges, shift_nibbles(parts, i, -1))
    }
}

fn labelled_degeneracy(key: u128, i: usize) -> u128 {
    pack(packed_edges(key), shift_nibbles(packed_parts(key), i as u64, 1))
}

fn decode(key: u128, n: usize) -> PartitionedSubgraph {
    let parts: Vec<VertexSet> = (1..=n as u64).map(|p| nibble_set(packed_parts(key), p)).collect();
    let vertices = parts.iter().fold(VertexSet::EMPTY, |a, &b| a | b);
    PartitionedSubgraph { vertices, edges: packed_edges(key), parts }
}

fn render_labelled(key: u128, n: usize) -> String {
    let parts = packed_parts(key);
    let mut out = String::new();
    for p in 1..=n as u64 {
        if p > 1 {
            out.push('/');
        }
        let mut first = true;
        for v in nibble_set(parts, p).iter() {
            if !first {
                out.push('.');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
    }
    out.push(';');
    let mut e = packed_edges(key);
    let mut first = true;
    while e != 0 {
        if !first {
            out.push('.');
        }
        first = false;
        let _ = write!(out, "{}", e.trailing_zeros());
        e &= e - 1;
    }
    out
}

pub fn build_xg(g: &Graph, labelled: bool, truncation: usize) -> Result<GraphSegalSet> {
    if truncation == 0 {
        return Err(Error::Truncation { have: 0, need: 1 });
    }
    if labelled {
        build_labelled(g, truncation)
    } else {
        build_unlabelled(g, truncation)
    }
}

fn build_labelled(g: &Graph, truncation: usize) -> Result<GraphSegalSet> {
    if g.len() > 16 || truncation > 15 {
        return Err(Error::Precondition("labelled graphs are limited to 16 vertices and truncation 15".into()));
    }
    let mut keys: Vec<Vec<u128>> = vec![vec![0]];
    let hosts = g.subgraphs();
    for n in 1..=truncation {
        let mut level = Vec::new();
        for &(s, e) in &hosts {
            let verts: Vec<usize> = s.iter().collect();
            let mut digits = vec![1u64; verts.len()];
            loop {
                let parts = verts.iter().zip(&digits).fold(0u64, |a, (&v, &d)| a | d << (4 * v));
                level.push(pack(e, parts));
                let mut k = 0;
                while k < digits.len() && digits[k] == n as u64 {
                    digits[k] = 1;
                    k += 1;
                }
                if k == digits.len() {
                    break;
                }
                digits[k] += 1;
            }
        }
        level.sort_unstable();
        keys.push(level);
    }
    let codes: Vec<Vec<String>> =
        keys.iter().enumerate().map(|(n, l)| l.iter().map(|&k| render_labelled(k, n)).collect()).collect();
    let set = LevelwiseSimplicialSet::from_key_maps(
        codes,
        keys.clone(),
        |n, i, x| labelled_face(g, keys[n][x], n, i),
        |n, i, x| labelled_degeneracy(keys[n][x], i),
    )?;
    Ok(GraphSegalSet { graph: g.clone(), labelled: true, set, reps: Reps::Labelled(keys) })
}

fn build_unlabelled(g: &Graph, truncation: usize) -> Result<GraphSegalSet> {
    let key = |x: &PartitionedSubgraph| x.canonical_form(g);
    let empty = PartitionedSubgraph::empty();
    let mut codes = vec![vec![empty.unlabelled_code(g)]];
    let mut keys = vec![vec![key(&empty)]];
    let mut reps = vec![vec![empty]];
    let mut hosts: Vec<(VertexSet, u64)> = Vec::new();
    for n in 1..=truncation {
        let mut classes: HashMap<Vec<u8>, PartitionedSubgraph> = HashMap::new();
        if n == 1 {
            for (s, e) in g.subgraphs() {
                let x = PartitionedSubgraph::subgraph(s, e);
                classes.entry(key(&x)).or_insert(x);
            }
        } else {
            for &(s, e) in &hosts {
                for x in partitions(s, n) {
                    let x = PartitionedSubgraph { vertices: s, edges: e, parts: x };
                    classes.entry(key(&x)).or_insert(x);
                }
            }
        }
        let mut level: Vec<(String, Vec<u8>, PartitionedSubgraph)> =
            classes.into_iter().map(|(k, x)| (render_canonical(&k), k, x)).collect();
        level.sort_by(|a, b| a.0.cmp(&b.0));
        if n == 1 {
            hosts = level.iter().map(|(_, _, x)| (x.vertices, x.edges)).collect();
        }
        let mut c = Vec::with_capacity(level.len());
        let mut k = Vec::with_capacity(level.len());
        let mut r = Vec::with_capacity(level.len());
        for (a, b, x) in level {
            c.push(a);
            k.push(b);
            r.push(x);
        }
        codes.push(c);
        keys.push(k);
        reps.push(r);
    }
    let set = LevelwiseSimplicialSet::from_key_maps(
        codes,
        keys,
        |n, i, x| key(&reps[n][x].face(g, i)),
        |n, i, x| key(&reps[n][x].degeneracy(i)),
    )?;
    Ok(GraphSegalSet { graph: g.clone(), labelled: false, set, reps: Reps::Unlabelled(reps) })
}

/// Ordered partitions of `s` into `n` possibly empty parts.
pub fn partitions(s: VertexSet, n: usize) -> Vec<Vec<VertexSet>> {
    let verts: Vec<usize> = s.iter().collect();
    let total = n.checked_pow(verts.len() as u32).expect("partition count overflows");
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut parts = vec![VertexSet::EMPTY; n];
        for &v in &verts {
            parts[code % n].insert(v);
            code /= n;
        }
        out.push(parts);
    }
    out
}

impl GraphSegalSet {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_labelled(&self) -> bool {
        self.labelled
    }

    pub fn set(&self) -> &LevelwiseSimplicialSet {
        &self.set
    }

    pub fn into_set(self) -> LevelwiseSimplicialSet {
        self.set
    }

    pub fn rep(&self, n: usize, x: u32) -> PartitionedSubgraph {
        match &self.reps {
            Reps::Labelled(k) => decode(k[n][x as usize], n),
            Reps::Unlabelled(r) => r[n][x as usize].clone(),
        }
    }

    pub fn id_of(&self, x: &PartitionedSubgraph) -> Option<u32> {
        match &self.reps {
            Reps::Labelled(k) => {
                if !x.is_valid(&self.graph) || x.dim() >= k.len() {
                    return None;
                }
                k[x.dim()].binary_search(&x.labelled_key()).ok().map(|i| i as u32)
            }
            Reps::Unlabelled(_) => self.set.id(x.dim(), &x.unlabelled_code(&self.graph)),
        }
    }

    pub fn subgraph_id(&self, vertices: VertexSet, edges: u64) -> Option<u32> {
        self.id_of(&PartitionedSubgraph::subgraph(vertices, edges))
    }

    pub fn strict(&self, n: usize) -> Vec<u32> {
        (0..self.set.len(n) as u32).filter(|&x| self.rep(n, x).is_strict()).collect()
    }

    pub fn census(&self) -> GraphCensus {
        let top = self.set.truncation();
        GraphCensus {
            labelled: self.labelled,
            truncation: top,
            level_sizes: (0..=top).map(|n| self.set.len(n)).collect(),
            nondegenerate: (0..=top).map(|n| nondegenerate(&self.set, n).len()).collect(),
            strict: (0..=top).map(|n| self.strict(n).len()).collect(),
        }
    }
}

/// Graphs on `n` vertices up to isomorphism, with at most `max_edges` edges
/// and at most `max_multiplicity` parallel edges between two vertices.
pub fn all_graphs(n: usize, max_edges: usize, max_multiplicity: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut seen: BTreeMap<String, Graph> = BTreeMap::new();
    let mut mult = vec![0usize; pairs.len()];
    loop {
        if mult.iter().sum::<usize>() <= max_edges {
            let edges: Vec<(usize, usize)> =
                pairs.iter().zip(&mult).flat_map(|(&p, &k)| std::iter::repeat(p).take(k)).collect();
            let g = Graph::new(n, edges, None, false).expect("bounded");
            seen.entry(g.canonical_code()).or_insert(g);
        }
        let mut k = 0;
        loop {
            if k == mult.len() {
                return seen.into_values().collect();
            }
            mult[k] += 1;
            if mult[k] <= max_multiplicity {
                break;
            }
            mult[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{check_2segal_pullbacks, check_identities};

    fn path_abc() -> Graph {
        Graph::parse("a-b\nb-c\n", false).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let g = Graph::parse("# star\nvertices: z\nc-a, c-b\n", false).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.to_text(), "vertices: z\nz-c\nz-a\n".replace("z-c\nz-a", "c-a\nc-b"));
        assert!(Graph::parse("a-a", false).is_err());
        assert!(Graph::parse("a-a", true).is_ok());
        assert!(Graph::parse("a b", false).is_err());
    }

    #[test]
    fn path_counts() {
        let x = build_xg(&path_abc(), true, 4).unwrap();
        let c = x.census();
        assert_eq!(c.level_sizes[1], 13);
        assert_eq!(c.nondegenerate[2], 34);
        assert_eq!(c.nondegenerate[3], 24);
        assert!(check_identities(x.set()).is_empty());
    }

    #[test]
    fn star_counts() {
        let x = build_xg(&Graph::star(3), false, 5).unwrap();
        let c = x.census();
        assert_eq!(c.level_sizes[1], 11);
        assert_eq!(c.strict[2], 38);
        // Independent brute force over part-preserving isomorphisms.
        assert_eq!(c.nondegenerate[3], 52);
        assert_eq!(c.nondegenerate[4], 23);
        assert_eq!(c.nondegenerate, c.strict);
    }

    #[test]
    fn parallel_edges_give_all_subsets() {
        let g = Graph::new(2, vec![(0, 1); 3], None, false).unwrap();
        let x = build_xg(&g, true, 3).unwrap();
        // ∅, two points, the pair with 8 edge selections
        assert_eq!(x.set().len(1), 1 + 2 + 8);
    }

    #[test]
    fn loops_follow_their_vertex() {
        let g = Graph::parse("a-a\na-b", true).unwrap();
        let subs = g.subgraphs();
        assert!(subs.iter().all(|&(s, e)| !s.contains(0) || e & 1 == 1));
        assert_eq!(subs.len(), 1 + 2 + 2);
        let x = build_xg(&g, true, 3).unwrap();
        assert!(check_identities(x.set()).is_empty());
    }

    #[test]
    fn small_graph_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| all_graphs(n, 10, 1).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
    }

    #[test]
    fn labelled_path_is_two_segal() {
        let x = build_xg(&path_abc(), true, 5).unwrap();
        assert!(check_2segal_pullbacks(x.set(), 5).holds);
    }

    #[test]
    fn unlabelled_quotient_glues_ambiguously() {
        // ({a},{c},{b}; bc) and ({c},{a},{b}; bc) share d_3 and d_1.
        let g = path_abc();
        let x = build_xg(&g, false, 4).unwrap();
        let s = |v: &[&str]| g.set_of(v).unwrap();
        let bc = g.edges_between(1, 2);
        let mk = |p: Vec<VertexSet>| PartitionedSubgraph { vertices: g.vertices(), edges: bc, parts: p };
        let p = x.id_of(&mk(vec![s(&["a"]), s(&["c"]), s(&["b"])])).unwrap();
        let q = x.id_of(&mk(vec![s(&["c"]), s(&["a"]), s(&["b"])])).unwrap();
        assert_ne!(p, q);
        for i in [1, 3] {
            assert_eq!(x.set().face(3, i, p), x.set().face(3, i, q));
        }
        assert!(!check_2segal_pullbacks(x.set(), 4).holds);
    }
}
