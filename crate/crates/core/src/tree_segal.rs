//! The simplicial set of layered admissible subforests of a rooted tree.
//!
//! Level `n` holds the layerings `H = L0 ⊇ L1 ⊇ .. ⊇ Ln = ∅` of admissible
//! subforests `H`, up to isomorphism in the unlabelled flavours. Every
//! class keeps one concrete layering as representative; faces and
//! degeneracies act on representatives and are read back through codes.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{layerings_of, Flavour, Layering, RootedForest, VertexSet};
use crate::simplicial::{nondegenerate, LevelwiseSimplicialSet};

#[derive(Clone, Debug)]
pub struct TreeSegalSet {
    forest: RootedForest,
    set: LevelwiseSimplicialSet,
    reps: Vec<Vec<Layering>>,
}

/// Default truncation: two more than the number of vertices.
pub fn default_truncation(t: &RootedForest) -> usize {
    t.len() + 2
}

pub fn build_xt(t: &RootedForest, flavour: Flavour, truncation: usize) -> Result<TreeSegalSet> {
    if truncation == 0 {
        return Err(Error::Truncation { have: 0, need: 1 });
    }
    let forest = t.with_flavour(flavour)?;
    let mut reps: Vec<Vec<Layering>> = vec![vec![Layering::empty()]];
    let mut codes: Vec<Vec<String>> = vec![vec![forest.layering_code(&Layering::empty()).into_string()]];
    let mut hosts: Vec<VertexSet> = Vec::new();
    for n in 1..=truncation {
        let mut classes: HashMap<String, Layering> = HashMap::new();
        let candidates: Vec<VertexSet> = if n == 1 { forest.admissible_subforests() } else { hosts.clone() };
        for h in candidates {
            for x in layerings_of(&forest, h, n) {
                classes.entry(forest.layering_code(&x).into_string()).or_insert(x);
            }
        }
        let mut level: Vec<(String, Layering)> = classes.into_iter().collect();
        level.sort_by(|a, b| a.0.cmp(&b.0));
        if n == 1 {
            hosts = level.iter().map(|(_, x)| x.host()).collect();
        }
        let (c, r): (Vec<String>, Vec<Layering>) = level.into_iter().unzip();
        codes.push(c);
        reps.push(r);
    }
    let set = LevelwiseSimplicialSet::from_code_maps(
        codes,
        |n, i, x| forest.layering_code(&reps[n][x].face(i)).into_string(),
        |n, i, x| forest.layering_code(&reps[n][x].degeneracy(i)).into_string(),
    )?;
    Ok(TreeSegalSet { forest, set, reps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HostFilter {
    Any,
    /// Host is a nonempty subtree.
    Connected,
    /// Host is a nonempty lower set of the tree.
    Rooted,
    /// Host is the whole tree.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeCensus {
    pub flavour: Flavour,
    pub truncation: usize,
    pub level_sizes: Vec<usize>,
    pub nondegenerate: Vec<usize>,
    pub strict: Vec<usize>,
}

impl TreeSegalSet {
    pub fn forest(&self) -> &RootedForest {
        &self.forest
    }

    pub fn flavour(&self) -> Flavour {
        self.forest.flavour()
    }

    pub fn set(&self) -> &LevelwiseSimplicialSet {
        &self.set
    }

    pub fn into_set(self) -> LevelwiseSimplicialSet {
        self.set
    }

    pub fn rep(&self, n: usize, x: u32) -> &Layering {
        &self.reps[n][x as usize]
    }

    /// Id of the class of a concrete layering.
    pub fn id_of(&self, x: &Layering) -> Option<u32> {
        self.set.id(x.dim(), self.forest.layering_code(x).as_str())
    }

    /// Id in level 1 of the subforest spanned by `h`.
    pub fn subforest_id(&self, h: VertexSet) -> Option<u32> {
        self.id_of(&Layering::new(vec![h, VertexSet::EMPTY]))
    }

    pub fn host_matches(&self, h: VertexSet, filter: HostFilter) -> bool {
        let t = &self.forest;
        match filter {
            HostFilter::Any => true,
            HostFilter::Connected => t.is_connected(h),
            HostFilter::Rooted => !h.is_empty() && t.is_lower(h),
            HostFilter::Full => h == t.vertices(),
        }
    }

    /// Elements of level `n` with every layer nonempty and host passing `filter`.
    pub fn strict(&self, n: usize, filter: HostFilter) -> Vec<u32> {
        (0..self.set.len(n) as u32)
            .filter(|&x| {
                let r = self.rep(n, x);
                r.is_strict() && self.host_matches(r.host(), filter)
            })
            .collect()
    }

    pub fn census(&self) -> TreeCensus {
        let top = self.set.truncation();
        TreeCensus {
            flavour: self.flavour(),
            truncation: top,
            level_sizes: (0..=top).map(|n| self.set.len(n)).collect(),
            nondegenerate: (0..=top).map(|n| nondegenerate(&self.set, n).len()).collect(),
            strict: (0..=top).map(|n| self.strict(n, HostFilter::Any).len()).collect(),
        }
    }
}

/// `d_0` on a concrete layering: the top layer is dropped and the host
/// shrinks to `L1`. Returns the face together with its host forest.
pub fn face_d0_restricts(t: &RootedForest, x: &Layering) -> Result<(Layering, RootedForest)> {
    if x.dim() == 0 {
        return Err(Error::Invalid("d_0 needs a layering of dimension at least 1".into()));
    }
    let y = x.face(0);
    let host = t.restrict(y.host())?;
    Ok((y, host))
}

/// Number of distinct codes among the lower subtrees (lower sets) of `t`.
pub fn lower_subtree_classes(t: &RootedForest, flavour: Flavour) -> Result<usize> {
    let f = t.with_flavour(flavour)?;
    let mut codes: Vec<String> = f.lower_sets().into_iter().map(|l| f.layered_code(l, |_| 1).into_string()).collect();
    codes.sort();
    codes.dedup();
    Ok(codes.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{check_2segal_pullbacks, check_identities, segal_map};

    fn lab(s: &str) -> RootedForest {
        RootedForest::parse(s, Flavour::Labelled).unwrap()
    }

    #[test]
    fn three_vertex_counts() {
        let chain = build_xt(&lab("a(b(c))"), Flavour::Labelled, 4).unwrap();
        let c = chain.census();
        assert_eq!(c.nondegenerate[1], 6);
        assert_eq!(c.strict[2], 4);
        let cherry = build_xt(&lab("b(a,c)"), Flavour::Labelled, 4).unwrap();
        let c = cherry.census();
        assert_eq!(c.nondegenerate[1], 7);
        assert_eq!(c.strict[2], 7);
    }

    #[test]
    fn empty_tree_is_a_point() {
        let x = build_xt(&RootedForest::empty(Flavour::Plain), Flavour::Plain, 4).unwrap();
        assert!((0..=4).all(|n| x.set().len(n) == 1));
    }

    #[test]
    fn example_tree_is_two_segal_when_rigid() {
        let t = lab("a(b(c),d(e))");
        for f in [Flavour::Labelled, Flavour::Planar] {
            let x = build_xt(&t, f, 7).unwrap();
            assert!(check_identities(x.set()).is_empty());
            assert!(check_2segal_pullbacks(x.set(), 7).holds);
        }
    }

    #[test]
    fn plain_quotient_glues_ambiguously() {
        // On the host b(c) + d, the layerings (d | c | b) and (c | d | b) have
        // the same faces d_3 and d_1: the two points of the upper forest can
        // be swapped, but the swap does not extend to the host.
        let t = lab("a(b(c),d(e))");
        let x = build_xt(&t, Flavour::Plain, 4).unwrap();
        assert!(check_identities(x.set()).is_empty());
        let s = |v: &[&str]| t.set_of(v).unwrap();
        let host = s(&["b", "c", "d"]);
        let first = Layering::new(vec![host, s(&["b", "c"]), s(&["b"]), VertexSet::EMPTY]);
        let second = Layering::new(vec![host, s(&["b", "d"]), s(&["b"]), VertexSet::EMPTY]);
        let (p, q) = (x.id_of(&first).unwrap(), x.id_of(&second).unwrap());
        assert_ne!(p, q);
        for i in [1, 3] {
            assert_eq!(x.set().face(3, i, p), x.set().face(3, i, q));
        }
        assert!(!check_2segal_pullbacks(x.set(), 4).holds);
    }

    #[test]
    fn lower_subtree_census() {
        let t = lab("a(b(c),d(e))");
        assert_eq!(lower_subtree_classes(&t, Flavour::Labelled).unwrap(), 10);
        assert_eq!(lower_subtree_classes(&t, Flavour::Planar).unwrap(), 8);
        assert_eq!(lower_subtree_classes(&t, Flavour::Plain).unwrap(), 7);
    }

    #[test]
    fn segal_map_misses_full_pair() {
        let t = lab("a(b(c),d(e))");
        let x = build_xt(&t, Flavour::Labelled, 3).unwrap();
        let full = x.subforest_id(t.vertices()).unwrap();
        let r = segal_map(x.set(), 2);
        assert!(r.injective);
        assert!(!r.surjective);
        assert!(!r.images.iter().any(|im| im == &vec![full, full]));
    }

    #[test]
    fn d0_restricts_host() {
        let t = lab("h(g(e(a,d(b,c)),f))");
        let l1 = t.set_of(&["e", "d", "f", "g", "h"]).unwrap();
        let l2 = t.set_of(&["h"]).unwrap();
        let x = Layering::new(vec![t.vertices(), l1, l2, VertexSet::EMPTY]);
        let (y, host) = face_d0_restricts(&t, &x).unwrap();
        assert_eq!(y.chain(), &[l1, l2, VertexSet::EMPTY]);
        assert_eq!(host.to_expression(), "h(g(e(d),f))");
        let (z, _) = face_d0_restricts(&t, &Layering::new(vec![t.vertices(), VertexSet::EMPTY])).unwrap();
        assert_eq!(z, Layering::empty());
    }
}
