//! Hall algebras of reduced 2-Segal sets, with integer coefficients.
//!
//! The basis is level 1 and `1_b * 1_b' = sum c(b, b', b'') 1_b''`, where
//! `c` counts the 2-simplices `x` with `d0 x = b`, `d2 x = b'` and
//! `d1 x = b''`. For trees `d0` is the lower layer and `d2` the upper one.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_segal::{GraphSegalSet, PartitionedSubgraph};
use crate::simplicial::{check_culf, check_relatively_segal, LevelwiseSimplicialSet, SimplicialMap};

/// A sparse integer combination of basis vectors.
pub type Vector = BTreeMap<u32, i64>;

#[derive(Clone, Debug)]
pub struct HallTable {
    codes: Vec<String>,
    unit: u32,
    products: HashMap<(u32, u32), Vector>,
}

pub fn build_hall(x: &LevelwiseSimplicialSet) -> Result<HallTable> {
    if !x.is_reduced() {
        return Err(Error::NotReduced(x.len(0)));
    }
    if x.truncation() < 2 {
        return Err(Error::Truncation { have: x.truncation(), need: 2 });
    }
    let mut products: HashMap<(u32, u32), Vector> = HashMap::new();
    for c in 0..x.len(2) as u32 {
        let key = (x.face(2, 0, c), x.face(2, 2, c));
        *products.entry(key).or_default().entry(x.face(2, 1, c)).or_insert(0) += 1;
    }
    Ok(HallTable { codes: x.level(1).to_vec(), unit: x.basepoint()?, products })
}

impl HallTable {
    pub fn dim(&self) -> usize {
        self.codes.len()
    }

    pub fn unit(&self) -> u32 {
        self.unit
    }

    pub fn code(&self, b: u32) -> &str {
        &self.codes[b as usize]
    }

    pub fn basis(&self) -> &[String] {
        &self.codes
    }

    pub fn constant(&self, b: u32, b1: u32, b2: u32) -> i64 {
        self.products.get(&(b, b1)).and_then(|v| v.get(&b2)).copied().unwrap_or(0)
    }

    /// `1_a * 1_b`.
    pub fn product(&self, a: u32, b: u32) -> Vector {
        self.products.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn basis_vector(&self, b: u32) -> Vector {
        Vector::from([(b, 1)])
    }

    pub fn multiply(&self, a: &Vector, b: &Vector) -> Vector {
        let mut out = Vector::new();
        for (&x, &p) in a {
            for (&y, &q) in b {
                if let Some(v) = self.products.get(&(x, y)) {
                    add_scaled(&mut out, v, p * q);
                }
            }
        }
        out
    }

    /// Nonzero products as `(left, right, result)` sorted by basis ids.
    pub fn entries(&self) -> Vec<(u32, u32, &Vector)> {
        let mut out: Vec<_> = self.products.iter().map(|(&(a, b), v)| (a, b, v)).collect();
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    /// All nonzero structure constants.
    pub fn constants(&self) -> impl Iterator<Item = i64> + '_ {
        self.products.values().flat_map(|v| v.values().copied())
    }

    /// A copy with one structure constant changed, for testing the checks.
    pub fn with_constant(&self, b: u32, b1: u32, b2: u32, value: i64) -> Self {
        let mut t = self.clone();
        let v = t.products.entry((b, b1)).or_default();
        if value == 0 {
            v.remove(&b2);
        } else {
            v.insert(b2, value);
        }
        if v.is_empty() {
            t.products.remove(&(b, b1));
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right,result,coefficient\n");
        for (a, b, v) in self.entries() {
            for (&z, &c) in v {
                let _ = writeln!(
                    out,
                    "{},{},{},{c}",
                    csv_field(self.code(a)),
                    csv_field(self.code(b)),
                    csv_field(self.code(z))
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Term<'a> {
            element: &'a str,
            coefficient: i64,
        }
        #[derive(Serialize)]
        struct Product<'a> {
            left: &'a str,
            right: &'a str,
            terms: Vec<Term<'a>>,
        }
        #[derive(Serialize)]
        struct Table<'a> {
            basis: &'a [String],
            unit: &'a str,
            products: Vec<Product<'a>>,
        }
        let products = self
            .entries()
            .into_iter()
            .map(|(a, b, v)| Product {
                left: self.code(a),
                right: self.code(b),
                terms: v.iter().map(|(&z, &c)| Term { element: self.code(z), coefficient: c }).collect(),
            })
            .collect();
        let t = Table { basis: &self.codes, unit: self.code(self.unit), products };
        serde_json::to_string_pretty(&t).expect("plain data serializes")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn add_scaled(out: &mut Vector, v: &Vector, k: i64) {
    for (&z, &c) in v {
        let e = out.entry(z).or_insert(0);
        *e += c * k;
        if *e == 0 {
            out.remove(&z);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutativityVerdict {
    pub commutative: bool,
    /// The noncommuting pair that is smallest by canonical codes.
    pub witness: Option<(u32, u32)>,
}

pub fn is_commutative(h: &HallTable) -> CommutativityVerdict {
    let mut witness: Option<(u32, u32)> = None;
    for &(a, b) in h.products.keys() {
        if h.product(a, b) == h.product(b, a) {
            continue;
        }
        let pair = if h.code(a) <= h.code(b) { (a, b) } else { (b, a) };
        let better = witness.map_or(true, |w| (h.code(pair.0), h.code(pair.1)) < (h.code(w.0), h.code(w.1)));
        if better {
            witness = Some(pair);
        }
    }
    CommutativityVerdict { commutative: witness.is_none(), witness }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LawViolation {
    Associativity { a: u32, b: u32, c: u32, left: Vector, right: Vector },
    LeftUnit { b: u32 },
    RightUnit { b: u32 },
}

/// Associativity over all basis triples and the two unit laws. Only triples
/// where one side is nonzero are visited, which covers every triple since
/// constants are nonnegative.
pub fn check_algebra_laws(h: &HallTable) -> Vec<LawViolation> {
    let mut by_left: HashMap<u32, Vec<(u32, &Vector)>> = HashMap::new();
    let mut by_right: HashMap<u32, Vec<(u32, &Vector)>> = HashMap::new();
    for (&(a, b), v) in &h.products {
        by_left.entry(a).or_default().push((b, v));
        by_right.entry(b).or_default().push((a, v));
    }
    // (1_a 1_b) 1_c
    let mut left: HashMap<(u32, u32, u32), Vector> = HashMap::new();
    for (&(a, b), ab) in &h.products {
        for (&z, &k) in ab {
            for &(c, zc) in by_left.get(&z).map_or(&[][..], |v| v.as_slice()) {
                add_scaled(left.entry((a, b, c)).or_default(), zc, k);
            }
        }
    }
    // 1_a (1_b 1_c)
    let mut right: HashMap<(u32, u32, u32), Vector> = HashMap::new();
    for (&(b, c), bc) in &h.products {
        for (&z, &k) in bc {
            for &(a, az) in by_right.get(&z).map_or(&[][..], |v| v.as_slice()) {
                add_scaled(right.entry((a, b, c)).or_default(), az, k);
            }
        }
    }
    left.retain(|_, v| !v.is_empty());
    right.retain(|_, v| !v.is_empty());
    let mut out = Vec::new();
    let mut keys: Vec<_> = left.keys().chain(right.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for k in keys {
        let l = left.get(&k).cloned().unwrap_or_default();
        let r = right.get(&k).cloned().unwrap_or_default();
        if l != r {
            out.push(LawViolation::Associativity { a: k.0, b: k.1, c: k.2, left: l, right: r });
        }
    }
    for b in 0..h.dim() as u32 {
        if h.product(h.unit, b) != h.basis_vector(b) {
            out.push(LawViolation::LeftUnit { b });
        }
        if h.product(b, h.unit) != h.basis_vector(b) {
            out.push(LawViolation::RightUnit { b });
        }
    }
    out
}

/// Pairs `(a, b)` with `1_a * 1_b != 0`, excluding the unit.
pub fn multiplication_digraph(h: &HallTable) -> Vec<(u32, u32)> {
    let mut out: Vec<_> = h.products.keys().copied().filter(|&(a, b)| a != h.unit && b != h.unit).collect();
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GraphRulesReport {
    pub holds: bool,
    /// Failures as `(rule, description)`.
    pub failures: Vec<(u8, String)>,
    /// For each pair of distinct vertices: edges between them and summands
    /// in `1_a * 1_b`.
    pub vertex_pairs: Vec<(usize, usize, usize, usize)>,
}

/// Checks the explicit description of the Hall algebra of a labelled graph:
/// unit, vanishing on overlaps, the vertex products, the general disjoint
/// product, and commutativity.
pub fn graph_hall_rules(x: &GraphSegalSet) -> Result<GraphRulesReport> {
    if !x.is_labelled() {
        return Err(Error::VariantMismatch("the rules describe labelled graphs".into()));
    }
    let g = x.graph();
    let h = build_hall(x.set())?;
    let mut report = GraphRulesReport::default();
    let mut failures = Vec::new();
    let id = |v, e| x.subgraph_id(v, e).expect("every subgraph is a 1-simplex");
    let subs = g.subgraphs();
    let empty = id(Default::default(), 0);
    if h.unit() != empty {
        failures.push((1, "the unit is not the empty subgraph".into()));
    }
    for &(v, e) in &subs {
        let b = id(v, e);
        if h.product(empty, b) != h.basis_vector(b) || h.product(b, empty) != h.basis_vector(b) {
            failures.push((1, format!("unit law fails on {}", describe(x, b))));
        }
    }
    for &(hv, he) in &subs {
        for &(kv, ke) in &subs {
            let (a, b) = (id(hv, he), id(kv, ke));
            let p = h.product(a, b);
            if p != h.product(b, a) {
                failures.push((5, format!("{} and {} do not commute", describe(x, a), describe(x, b))));
            }
            if !hv.is_disjoint(kv) {
                if !p.is_empty() {
                    failures.push((2, format!("{} * {} is not zero", describe(x, a), describe(x, b))));
                }
                continue;
            }
            if hv.is_empty() || kv.is_empty() {
                continue;
            }
            let between = g.edges_touching(hv) & g.edges_touching(kv) & !g.edges_within(hv) & !g.edges_within(kv);
            let mut expected = Vector::new();
            let mut s = between;
            loop {
                expected.insert(id(hv | kv, he | ke | s), 1);
                if s == 0 {
                    break;
                }
                s = (s - 1) & between;
            }
            if p != expected {
                let rule = if hv.len() == 1 && kv.len() == 1 { 3 } else { 4 };
                failures.push((rule, format!("{} * {} has the wrong summands", describe(x, a), describe(x, b))));
            }
            if hv.len() == 1 && kv.len() == 1 && he == 0 && ke == 0 {
                let (u, w) = (hv.iter().next().unwrap(), kv.iter().next().unwrap());
                if u < w {
                    let n = g.edges_between(u, w).count_ones() as usize;
                    report.vertex_pairs.push((u, w, n, p.len()));
                    if p.len() != 1 << n {
                        failures.push((
                            3,
                            format!("1_{} * 1_{} has {} summands, not 2^{n}", g.name(u), g.name(w), p.len()),
                        ));
                    }
                }
            }
        }
    }
    report.holds = failures.is_empty();
    report.failures = failures;
    Ok(report)
}

fn describe(x: &GraphSegalSet, b: u32) -> String {
    x.rep(1, b).describe(x.graph())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomDirection {
    /// `F^*(1_y) = sum over F(x) = y of 1_x`, along CULF maps.
    Pullback,
    /// `F_*(1_x) = 1_F(x)`, along relatively Segal maps.
    Pushforward,
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedHom {
    pub direction: HomDirection,
    /// Image of each basis vector of the domain.
    pub images: Vec<Vector>,
    pub unital: bool,
    /// Basis pairs of the domain on which multiplicativity fails.
    pub failures: Vec<(u32, u32)>,
}

impl InducedHom {
    pub fn is_homomorphism(&self) -> bool {
        self.unital && self.failures.is_empty()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let mut out = Vector::new();
        for (&b, &k) in v {
            add_scaled(&mut out, &self.images[b as usize], k);
        }
        out
    }
}

/// The linear map induced by `f`, after checking that `f` is CULF (for the
/// pullback) or relatively Segal (for the pushforward) up to its truncation.
pub fn induced_hom(f: &SimplicialMap<'_>, direction: HomDirection) -> Result<InducedHom> {
    let n = f.source.truncation().min(f.target.truncation());
    match direction {
        HomDirection::Pullback if !check_culf(f, n).holds => {
            Err(Error::Precondition("the map is not CULF, so it induces no pullback".into()))
        }
        HomDirection::Pushforward if !check_relatively_segal(f, n).holds => {
            Err(Error::Precondition("the map is not relatively Segal, so it induces no pushforward".into()))
        }
        _ => induced_hom_unchecked(f, direction),
    }
}

/// The induced linear map without the precondition, with its
/// multiplicativity and unit checked on all basis pairs.
pub fn induced_hom_unchecked(f: &SimplicialMap<'_>, direction: HomDirection) -> Result<InducedHom> {
    let hs = build_hall(f.source)?;
    let ht = build_hall(f.target)?;
    let (domain, codomain) = match direction {
        HomDirection::Pullback => (&ht, &hs),
        HomDirection::Pushforward => (&hs, &ht),
    };
    let mut images = vec![Vector::new(); domain.dim()];
    for x in 0..hs.dim() as u32 {
        let y = f.apply(1, x);
        match direction {
            HomDirection::Pullback => images[y as usize].insert(x, 1),
            HomDirection::Pushforward => images[x as usize].insert(y, 1),
        };
    }
    let mut hom = InducedHom { direction, images, unital: false, failures: Vec::new() };
    hom.unital = hom.apply(&domain.basis_vector(domain.unit())) == codomain.basis_vector(codomain.unit());
    for a in 0..domain.dim() as u32 {
        for b in 0..domain.dim() as u32 {
            let lhs = hom.apply(&domain.product(a, b));
            let rhs = codomain.multiply(&hom.images[a as usize], &hom.images[b as usize]);
            if lhs != rhs {
                hom.failures.push((a, b));
            }
        }
    }
    Ok(hom)
}

/// Subgraph on `vertices` with the edges in `edges`, as a Hall basis id.
pub fn graph_basis(x: &GraphSegalSet, vertices: &[&str], edges: &[(&str, &str)]) -> Result<u32> {
    let g = x.graph();
    let v = g.set_of(vertices)?;
    let mut e = 0u64;
    for &(a, b) in edges {
        let (a, b) = (g.set_of(&[a])?, g.set_of(&[b])?);
        let (a, b) = (a.iter().next().unwrap(), b.iter().next().unwrap());
        e |= g.edges_between(a, b);
    }
    let y = PartitionedSubgraph::subgraph(v, e);
    x.id_of(&y).ok_or_else(|| Error::Invalid(format!("{} is not a subgraph", y.describe(g))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Flavour, RootedForest};
    use crate::graph_segal::{build_xg, Graph};
    use crate::tree_segal::build_xt;

    fn tree_hall(s: &str, f: Flavour) -> (crate::tree_segal::TreeSegalSet, HallTable) {
        let t = RootedForest::parse(s, Flavour::Labelled).unwrap();
        let x = build_xt(&t, f, 3).unwrap();
        let h = build_hall(x.set()).unwrap();
        (x, h)
    }

    #[test]
    fn edge_tree_products() {
        let (x, h) = tree_hall("a(b)", Flavour::Labelled);
        let t = x.forest();
        let id = |s: &[&str]| x.subforest_id(t.set_of(s).unwrap()).unwrap();
        let (a, b, full) = (id(&["a"]), id(&["b"]), id(&["a", "b"]));
        // d0 is the lower layer, so the root comes first.
        assert_eq!(h.product(a, b), h.basis_vector(full));
        assert!(h.product(b, a).is_empty());
        let w = is_commutative(&h).witness.unwrap();
        assert!(w == (a, b) || w == (b, a));
        assert!(check_algebra_laws(&h).is_empty());
    }

    #[test]
    fn paths_multiply_by_length() {
        let (x, h) = tree_hall("a(b(c(d)))", Flavour::Plain);
        let t = x.forest();
        let names = ["a", "b", "c", "d"];
        let p = |k: usize| x.subforest_id(t.set_of(&names[..k]).unwrap()).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                let expected = if i + j <= 4 { h.basis_vector(p(i + j)) } else { Vector::new() };
                assert_eq!(h.product(p(i), p(j)), expected, "{i} * {j}");
            }
        }
        assert!(is_commutative(&h).commutative);
    }

    #[test]
    fn broken_table_is_caught() {
        let (_, h) = tree_hall("a(b(c))", Flavour::Plain);
        let (a, b) = (1..h.dim() as u32)
            .flat_map(|a| (1..h.dim() as u32).map(move |b| (a, b)))
            .find(|&(a, b)| !h.product(a, b).is_empty())
            .unwrap();
        let z = *h.product(a, b).keys().next().unwrap();
        let bad = h.with_constant(a, b, z, 2);
        assert!(matches!(check_algebra_laws(&bad).first(), Some(LawViolation::Associativity { .. })));
        assert!(!check_algebra_laws(&h.with_constant(h.unit(), 1, 1, 0)).is_empty());
    }

    #[test]
    fn path_graph_products() {
        let x = build_xg(&Graph::parse("a-b b-c", false).unwrap(), true, 3).unwrap();
        let h = build_hall(x.set()).unwrap();
        let s = |v: &[&str], e: &[(&str, &str)]| graph_basis(&x, v, e).unwrap();
        let sum = |xs: &[u32]| xs.iter().map(|&b| (b, 1)).collect::<Vector>();
        assert_eq!(
            h.product(s(&["a"], &[]), s(&["b"], &[])),
            sum(&[s(&["a", "b"], &[]), s(&["a", "b"], &[("a", "b")])])
        );
        assert_eq!(h.product(s(&["a"], &[]), s(&["c"], &[])), sum(&[s(&["a", "c"], &[])]));
        let r = graph_hall_rules(&x).unwrap();
        assert!(r.holds, "{:?}", r.failures);
    }

    #[test]
    fn parallel_edges_double_the_summands() {
        for n in 0..=3 {
            let text = format!("vertices: a b\n{}", "a-b ".repeat(n));
            let x = build_xg(&Graph::parse(&text, false).unwrap(), true, 3).unwrap();
            let r = graph_hall_rules(&x).unwrap();
            assert!(r.holds);
            assert_eq!(r.vertex_pairs, vec![(0, 1, n, 1 << n)]);
        }
    }

    #[test]
    fn identity_map_induces_identity() {
        let t = RootedForest::parse("a(b,c)", Flavour::Labelled).unwrap();
        let x = build_xt(&t, Flavour::Plain, 3).unwrap();
        let id = SimplicialMap::identity(x.set());
        for dir in [HomDirection::Pullback, HomDirection::Pushforward] {
            let f = induced_hom(&id, dir).unwrap();
            assert!(f.is_homomorphism());
            assert!(f.images.iter().enumerate().all(|(b, v)| *v == Vector::from([(b as u32, 1)])));
        }
    }

    #[test]
    fn csv_quotes_commas() {
        let (_, h) = tree_hall("a(b)", Flavour::Labelled);
        let csv = h.to_csv();
        assert!(csv.starts_with("left,right,result,coefficient\n"));
        let json: serde_json::Value = serde_json::from_str(&h.to_json()).unwrap();
        assert_eq!(json["basis"].as_array().unwrap().len(), h.dim());
    }
}
