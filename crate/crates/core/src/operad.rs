//! The coloured cooperad of a simplicial set.
//!
//! Colours are 1-simplices. The operations of arity `n` are the
//! `n`-simplices; the inputs of `x` are its edges `{i-1, i}` and the output
//! is its long edge `{0, n}`. Cocomposition along a shape `(k1, .., kn)`
//! splits a simplex of dimension `k1 + .. + kn` into its outer face on the
//! block endpoints and its inner faces on the blocks. Composition is the
//! inverse, defined when the set is 2-Segal.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{layerings_of, Layering, VertexSet};
use crate::graph_segal::{code_of, partitions, GraphSegalSet, PartitionedSubgraph};
use crate::simplicial::LevelwiseSimplicialSet;
use crate::tree_segal::TreeSegalSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Profile {
    pub inputs: Vec<u32>,
    pub output: u32,
}

#[derive(Clone, Debug)]
pub struct ColouredOperadData {
    set: LevelwiseSimplicialSet,
    max_arity: usize,
    /// `profiles[n][x]` for `1 <= n <= max_arity`.
    profiles: Vec<Vec<Profile>>,
    ops: HashMap<Profile, Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionInstance {
    pub outer: u32,
    pub inners: Vec<u32>,
    pub result: u32,
}

/// Operation sets of all arities up to `max_arity`, which defaults to the
/// truncation minus one.
pub fn build_operad(x: &LevelwiseSimplicialSet, max_arity: Option<usize>) -> Result<ColouredOperadData> {
    let max_arity = max_arity.unwrap_or(x.truncation().saturating_sub(1));
    if max_arity == 0 || max_arity > x.truncation() {
        return Err(Error::Truncation { have: x.truncation(), need: max_arity.max(1) });
    }
    let mut profiles = vec![Vec::new()];
    let mut ops: HashMap<Profile, Vec<u32>> = HashMap::new();
    for n in 1..=max_arity {
        let level: Vec<Profile> = (0..x.len(n) as u32)
            .map(|e| Profile {
                inputs: (1..=n).map(|i| vertex_face(x, n, &[i - 1, i], e)).collect(),
                output: vertex_face(x, n, &[0, n], e),
            })
            .collect();
        for (e, p) in level.iter().enumerate() {
            ops.entry(p.clone()).or_default().push(e as u32);
        }
        profiles.push(level);
    }
    Ok(ColouredOperadData { set: x.clone(), max_arity, profiles, ops })
}

/// The face of `e` in level `n` spanned by the sorted vertices `keep`.
fn vertex_face(x: &LevelwiseSimplicialSet, n: usize, keep: &[usize], mut e: u32) -> u32 {
    let mut dim = n;
    for j in (0..=n).rev() {
        if !keep.contains(&j) {
            e = x.face(dim, j, e);
            dim -= 1;
        }
    }
    e
}

/// Block endpoints `0, k1, k1 + k2, ..`.
fn endpoints(shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for &k in shape {
        out.push(out.last().unwrap() + k);
    }
    out
}

/// All shapes `(k1, .., kn)` with positive parts and total `k`.
pub fn shapes(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=k {
        for mut rest in shapes(k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl ColouredOperadData {
    pub fn set(&self) -> &LevelwiseSimplicialSet {
        &self.set
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn profile(&self, n: usize, x: u32) -> &Profile {
        &self.profiles[n][x as usize]
    }

    /// `Q(c1, .., cn | c0)`; empty when uninhabited.
    pub fn operations(&self, p: &Profile) -> &[u32] {
        self.ops.get(p).map_or(&[], |v| v.as_slice())
    }

    /// Inhabited profiles with their operation sets, sorted.
    pub fn inhabited(&self) -> Vec<(&Profile, &[u32])> {
        let mut out: Vec<_> = self.ops.iter().map(|(p, v)| (p, v.as_slice())).collect();
        out.sort();
        out
    }

    pub fn largest_operation_set(&self) -> usize {
        self.ops.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Splits `x` along `shape` into its outer face and its block faces.
    pub fn cocompose(&self, x: u32, shape: &[usize]) -> Result<(u32, Vec<u32>)> {
        let k: usize = shape.iter().sum();
        if shape.is_empty() || shape.contains(&0) || k > self.max_arity || x as usize >= self.set.len(k) {
            return Err(Error::Invalid(format!("shape {shape:?} does not fit element {x}")));
        }
        let ends = endpoints(shape);
        let outer = vertex_face(&self.set, k, &ends, x);
        let inners =
            ends.windows(2).map(|w| vertex_face(&self.set, k, &(w[0]..=w[1]).collect::<Vec<_>>(), x)).collect();
        Ok((outer, inners))
    }

    /// The unique operation whose cocomposition along the arities of
    /// `inners` is `(outer, inners)`.
    pub fn compose(&self, outer: u32, inners: &[u32], shape: &[usize]) -> Result<CompositionInstance> {
        let n = inners.len();
        if shape.len() != n || n == 0 || n > self.max_arity {
            return Err(Error::Invalid("one inner operation per input is needed".into()));
        }
        let k: usize = shape.iter().sum();
        if k > self.max_arity || shape.contains(&0) {
            return Err(Error::Truncation { have: self.max_arity, need: k });
        }
        let p = self.profile(n, outer);
        for (i, (&y, &ki)) in inners.iter().zip(shape).enumerate() {
            if self.profile(ki, y).output != p.inputs[i] {
                return Err(Error::ColourMismatch(i + 1));
            }
        }
        let found: Vec<u32> = (0..self.set.len(k) as u32)
            .filter(|&w| self.cocompose(w, shape).is_ok_and(|(o, ys)| o == outer && ys == inners))
            .collect();
        match found.as_slice() {
            [w] => Ok(CompositionInstance { outer, inners: inners.to_vec(), result: *w }),
            other => Err(Error::NotUnique { level: k, count: other.len() }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvertibilityFailure {
    pub shape: Vec<usize>,
    /// Two operations with the same cocomposition.
    pub collision: Option<(u32, u32)>,
    /// Compatible families without a composite.
    pub missing: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvertibilityReport {
    pub holds: bool,
    pub shapes_checked: usize,
    pub units_ok: bool,
    pub failures: Vec<InvertibilityFailure>,
}

/// Checks that every cocomposition map up to the maximal arity is a
/// bijection onto the colour-compatible families, and that each
/// `Q(c | c)` is a singleton.
pub fn check_invertible(o: &ColouredOperadData) -> InvertibilityReport {
    let x = &o.set;
    let units_ok = (0..x.len(1) as u32).all(|c| o.operations(&Profile { inputs: vec![c], output: c }) == [c])
        && o.profiles[1].iter().all(|p| p.inputs[0] == p.output);
    // Operations of each arity grouped by output colour.
    let by_output: Vec<HashMap<u32, usize>> = o
        .profiles
        .iter()
        .map(|level| {
            let mut m = HashMap::new();
            for p in level {
                *m.entry(p.output).or_insert(0) += 1;
            }
            m
        })
        .collect();
    let mut failures = Vec::new();
    let mut shapes_checked = 0;
    for k in 1..=o.max_arity {
        for shape in shapes(k) {
            shapes_checked += 1;
            let n = shape.len();
            let mut seen: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
            let mut collision = None;
            for w in 0..x.len(k) as u32 {
                let key = o.cocompose(w, &shape).expect("shape fits");
                if let Some(&v) = seen.get(&key) {
                    collision.get_or_insert((v, w));
                } else {
                    seen.insert(key, w);
                }
            }
            let families: usize = o.profiles[n]
                .iter()
                .map(|p| {
                    p.inputs
                        .iter()
                        .zip(&shape)
                        .map(|(c, &ki)| by_output[ki].get(c).copied().unwrap_or(0))
                        .product::<usize>()
                })
                .sum();
            let missing = families - seen.len();
            if collision.is_some() || missing > 0 {
                failures.push(InvertibilityFailure { shape, collision, missing });
            }
        }
    }
    InvertibilityReport { holds: units_ok && failures.is_empty(), shapes_checked, units_ok, failures }
}

/// Composition in the tree construction: the `i`-th inner layering is
/// carried onto the `i`-th layer of the outer one and the layers are
/// concatenated from the top.
pub fn compose_tree(xt: &TreeSegalSet, outer: u32, inners: &[u32], shape: &[usize]) -> Result<u32> {
    let t = xt.forest();
    let o = xt.rep(inners.len(), outer);
    let mut layers: Vec<VertexSet> = Vec::new();
    for (i, (&y, &k)) in inners.iter().zip(shape).enumerate() {
        let code = xt.set().code(k, y);
        let lift = layerings_of(t, o.layer(i + 1), k)
            .into_iter()
            .find(|z| t.layering_code(z).as_str() == code)
            .ok_or(Error::ColourMismatch(i + 1))?;
        layers.extend(lift.layers());
    }
    let mut chain = vec![VertexSet::EMPTY];
    for &l in layers.iter().rev() {
        chain.push(*chain.last().unwrap() | l);
    }
    chain.reverse();
    let z = Layering::new(chain);
    xt.id_of(&z).ok_or_else(|| Error::UnknownCode(t.layering_code(&z).into_string(), z.dim()))
}

/// Composition in the graph construction: the inner partitions are carried
/// onto the parts of the outer one and concatenated.
pub fn compose_graph(xg: &GraphSegalSet, outer: u32, inners: &[u32], shape: &[usize]) -> Result<u32> {
    let g = xg.graph();
    let o = xg.rep(inners.len(), outer);
    let mut parts = Vec::new();
    for (i, (&y, &k)) in inners.iter().zip(shape).enumerate() {
        let s = o.parts[i];
        let edges = o.edges & g.edges_within(s);
        if xg.is_labelled() {
            // Labelled classes are singletons, so the representative is the lift.
            let r = xg.rep(k, y);
            if r.vertices != s || r.edges != edges {
                return Err(Error::ColourMismatch(i + 1));
            }
            parts.extend(r.parts);
            continue;
        }
        let lift = partitions(s, k)
            .into_iter()
            .map(|p| PartitionedSubgraph { vertices: s, edges, parts: p })
            .find(|z| xg.set().id(k, &code_of(g, xg.is_labelled(), z)) == Some(y))
            .ok_or(Error::ColourMismatch(i + 1))?;
        parts.extend(lift.parts);
    }
    let z = PartitionedSubgraph { vertices: o.vertices, edges: o.edges, parts };
    xg.id_of(&z).ok_or_else(|| Error::UnknownCode(z.describe(g), z.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Flavour, RootedForest};
    use crate::graph_segal::{build_xg, Graph};
    use crate::tree_segal::build_xt;

    fn tree(s: &str, f: Flavour, n: usize) -> TreeSegalSet {
        build_xt(&RootedForest::parse(s, Flavour::Labelled).unwrap(), f, n).unwrap()
    }

    #[test]
    fn shapes_are_compositions() {
        assert_eq!(shapes(3), vec![vec![1, 1, 1], vec![1, 2], vec![2, 1], vec![3]]);
        assert_eq!((1..=5).map(|k| shapes(k).len()).collect::<Vec<_>>(), [1, 2, 4, 8, 16]);
    }

    #[test]
    fn profiles_partition_levels() {
        let x = tree("a(b,c(d))", Flavour::Planar, 4);
        let o = build_operad(x.set(), None).unwrap();
        assert_eq!(o.max_arity(), 3);
        for n in 1..=3 {
            let total: usize = o.inhabited().iter().filter(|(p, _)| p.inputs.len() == n).map(|(_, v)| v.len()).sum();
            assert_eq!(total, x.set().len(n));
        }
    }

    #[test]
    fn labelled_tree_is_invertible_with_thin_sets() {
        let x = tree("a(b,c(d))", Flavour::Labelled, 5);
        let o = build_operad(x.set(), Some(4)).unwrap();
        let r = check_invertible(&o);
        assert!(r.holds, "{:?}", r.failures);
        assert_eq!(r.shapes_checked, 15);
        assert_eq!(o.largest_operation_set(), 1);
    }

    #[test]
    fn planar_two_ary_tree_has_a_double_operation() {
        let x = tree("r(a(g),b)", Flavour::Planar, 3);
        let o = build_operad(x.set(), Some(2)).unwrap();
        assert!(o.inhabited().iter().any(|(p, v)| p.inputs.len() == 2 && v.len() == 2));
    }

    #[test]
    fn explicit_formulas_agree_with_cocomposition() {
        let x = tree("a(b,c(d))", Flavour::Labelled, 4);
        let o = build_operad(x.set(), Some(4)).unwrap();
        for shape in shapes(4).into_iter().chain(shapes(3)) {
            let k: usize = shape.iter().sum();
            for w in 0..x.set().len(k) as u32 {
                let (outer, inners) = o.cocompose(w, &shape).unwrap();
                assert_eq!(o.compose(outer, &inners, &shape).unwrap().result, w);
                assert_eq!(compose_tree(&x, outer, &inners, &shape).unwrap(), w);
            }
        }
        let g = build_xg(&Graph::parse("a-b b-c c-a", false).unwrap(), true, 3).unwrap();
        let o = build_operad(g.set(), Some(3)).unwrap();
        for shape in shapes(3) {
            for w in 0..g.set().len(3) as u32 {
                let (outer, inners) = o.cocompose(w, &shape).unwrap();
                assert_eq!(compose_graph(&g, outer, &inners, &shape).unwrap(), w);
            }
        }
    }

    #[test]
    fn glued_triangles_are_not_invertible() {
        let x = LevelwiseSimplicialSet::simplex_subcomplex(3, &[vec![0, 1, 2], vec![0, 2, 3]], 3);
        let r = check_invertible(&build_operad(&x, Some(3)).unwrap());
        assert!(!r.holds);
        assert!(r.failures.iter().any(|f| f.missing > 0));
    }

    #[test]
    fn colour_mismatch_is_reported() {
        let x = tree("a(b)", Flavour::Labelled, 3);
        let o = build_operad(x.set(), None).unwrap();
        let full = x.subforest_id(x.forest().vertices()).unwrap();
        let single = x.subforest_id(x.forest().set_of(&["a"]).unwrap()).unwrap();
        assert_eq!(o.compose(full, &[single], &[1]), Err(Error::ColourMismatch(1)));
    }
}
