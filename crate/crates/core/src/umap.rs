//! The map from layered subforests of a tree to partitioned subgraphs of
//! its underlying graph, and its CULF and relative Segal properties.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{Flavour, Layering, RootedForest};
use crate::graph_segal::{build_xg, Graph, GraphSegalSet, PartitionedSubgraph};
use crate::simplicial::{
    check_culf as culf_of_map, check_relatively_segal as rel_segal_of_map, CulfReport, RelSegalDefect, RelSegalReport,
    SimplicialMap,
};
use crate::tree_segal::{build_xt, TreeSegalSet};

#[derive(Clone, Debug)]
pub struct UMap {
    tree: TreeSegalSet,
    graph: Arc<GraphSegalSet>,
    components: Vec<Vec<u32>>,
}

/// Unlabelled graph constructions shared between trees with isomorphic
/// underlying graphs.
#[derive(Default)]
pub struct GraphCache {
    built: HashMap<(String, usize), Arc<GraphSegalSet>>,
}

impl GraphCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, g: &Graph, labelled: bool, truncation: usize) -> Result<Arc<GraphSegalSet>> {
        if labelled {
            return Ok(Arc::new(build_xg(g, true, truncation)?));
        }
        let key = (g.canonical_code(), truncation);
        if let Some(x) = self.built.get(&key) {
            return Ok(x.clone());
        }
        let x = Arc::new(build_xg(g, false, truncation)?);
        self.built.insert(key, x.clone());
        Ok(x)
    }
}

/// `U(H; L0 ⊇ .. ⊇ Ln) = (U(H); S1, .., Sn)` with `Si = L(i-1) \ Li`.
pub fn image_of(g: &Graph, x: &Layering) -> PartitionedSubgraph {
    let h = x.host();
    PartitionedSubgraph { vertices: h, edges: g.edges_within(h), parts: x.layers() }
}

/// Builds both simplicial sets with truncation `|V| + 1` and the map between
/// them. The labelled flavour maps to labelled graphs, the others to
/// unlabelled graphs.
pub fn build_u(t: &RootedForest, flavour: Flavour) -> Result<UMap> {
    build_u_truncated(t, flavour, t.len() + 1)
}

pub fn build_u_truncated(t: &RootedForest, flavour: Flavour, truncation: usize) -> Result<UMap> {
    build_u_cached(t, flavour, truncation, &mut GraphCache::new())
}

pub fn build_u_cached(t: &RootedForest, flavour: Flavour, truncation: usize, cache: &mut GraphCache) -> Result<UMap> {
    let tree = build_xt(t, flavour, truncation)?;
    let graph = cache.get(&Graph::from_forest(tree.forest()), flavour.is_labelled(), truncation)?;
    UMap::new(tree, graph)
}

impl UMap {
    /// For unlabelled trees `graph` may be built on any graph isomorphic to
    /// the underlying graph of the tree.
    pub fn new(tree: TreeSegalSet, graph: Arc<GraphSegalSet>) -> Result<Self> {
        if tree.flavour().is_labelled() != graph.is_labelled() {
            return Err(Error::VariantMismatch(format!(
                "{} trees map to {} graphs",
                tree.flavour(),
                if graph.is_labelled() { "labelled" } else { "unlabelled" }
            )));
        }
        let top = tree.set().truncation();
        if graph.set().truncation() < top {
            return Err(Error::Truncation { have: graph.set().truncation(), need: top });
        }
        let own = Graph::from_forest(tree.forest());
        let same = if graph.is_labelled() {
            own.edges() == graph.graph().edges() && own.len() == graph.graph().len()
        } else {
            own.canonical_code() == graph.graph().canonical_code()
        };
        if !same {
            return Err(Error::VariantMismatch("the graph is not the underlying graph of the tree".into()));
        }
        let mut components = Vec::with_capacity(top + 1);
        for n in 0..=top {
            let level = (0..tree.set().len(n) as u32)
                .map(|x| {
                    let y = image_of(&own, tree.rep(n, x));
                    let id =
                        if graph.is_labelled() { graph.id_of(&y) } else { graph.set().id(n, &y.unlabelled_code(&own)) };
                    id.ok_or_else(|| Error::UnknownCode(y.describe(&own), n))
                })
                .collect::<Result<Vec<_>>>()?;
            components.push(level);
        }
        Ok(UMap { tree, graph, components })
    }

    pub fn tree(&self) -> &TreeSegalSet {
        &self.tree
    }

    pub fn graph(&self) -> &GraphSegalSet {
        &self.graph
    }

    pub fn map(&self) -> SimplicialMap<'_> {
        SimplicialMap::new(self.tree.set(), self.graph.set(), self.components.clone())
            .expect("components were built level by level")
    }

    pub fn apply(&self, n: usize, x: u32) -> u32 {
        self.components[n][x as usize]
    }

    pub fn truncation(&self) -> usize {
        self.tree.set().truncation()
    }

    fn describe_tree(&self, n: usize, x: u32) -> String {
        let t = self.tree.forest();
        let r = self.tree.rep(n, x);
        let layers: Vec<String> = r
            .layers()
            .iter()
            .map(|s| format!("{{{}}}", s.iter().map(|v| t.name(v)).collect::<Vec<_>>().join(",")))
            .collect();
        format!("{} [{}]", t.restrict(r.host()).map(|f| f.to_expression()).unwrap_or_default(), layers.join(" "))
    }

    fn describe_graph(&self, n: usize, y: u32) -> String {
        self.graph.rep(n, y).describe(self.graph.graph())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CulfVerdict {
    pub holds: bool,
    pub report: CulfReport,
    /// The first failure in words.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelSegalVerdict {
    pub holds: bool,
    pub report: RelSegalReport,
    pub witness: Option<String>,
}

pub fn check_culf(u: &UMap, n_max: usize) -> CulfVerdict {
    let report = culf_of_map(&u.map(), n_max);
    let witness = report.failures.first().map(|f| {
        let mut s = format!(
            "n = {}: over {} the fibres have {} and {} elements",
            f.n,
            u.describe_tree(1, f.base),
            f.source_fibre,
            f.target_fibre
        );
        if let Some(y) = f.unmatched {
            s.push_str(&format!("; {} is not in the image", u.describe_graph(f.n, y)));
        }
        if let Some((a, b)) = f.collision {
            s.push_str(&format!("; {} and {} collide", u.describe_tree(f.n, a), u.describe_tree(f.n, b)));
        }
        s
    });
    CulfVerdict { holds: report.holds, report, witness }
}

pub fn check_relatively_segal(u: &UMap, n_max: usize) -> RelSegalVerdict {
    let report = rel_segal_of_map(&u.map(), n_max);
    let witness = report.failures.first().map(|f| match &f.defect {
        RelSegalDefect::NotInjective { first, second } => format!(
            "n = {}: {} and {} have the same image and edges",
            f.n,
            u.describe_tree(f.n, *first),
            u.describe_tree(f.n, *second)
        ),
        RelSegalDefect::Missing { target, edges } => format!(
            "n = {}: {} with edges {} has no lift",
            f.n,
            u.describe_graph(f.n, *target),
            edges.iter().map(|&e| u.describe_tree(1, e)).collect::<Vec<_>>().join(", ")
        ),
    });
    RelSegalVerdict { holds: report.holds, report, witness }
}

#[derive(Clone, Debug, Serialize)]
pub struct UmapVerdict {
    pub tree: String,
    pub flavour: Flavour,
    pub truncation: usize,
    pub simplicial_map: bool,
    pub culf: CulfVerdict,
    pub relatively_segal: RelSegalVerdict,
}

/// All three checks at truncation `|V| + 1`.
pub fn verdict(t: &RootedForest, flavour: Flavour) -> Result<UmapVerdict> {
    verdict_cached(t, flavour, &mut GraphCache::new())
}

pub fn verdict_cached(t: &RootedForest, flavour: Flavour, cache: &mut GraphCache) -> Result<UmapVerdict> {
    let u = build_u_cached(t, flavour, t.len() + 1, cache)?;
    let n = u.truncation();
    Ok(UmapVerdict {
        tree: t.to_expression(),
        flavour,
        truncation: n,
        simplicial_map: u.map().validate().is_empty(),
        culf: check_culf(&u, n),
        relatively_segal: check_relatively_segal(&u, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(s: &str) -> RootedForest {
        RootedForest::parse(s, Flavour::Labelled).unwrap()
    }

    #[test]
    fn single_vertex_has_both_properties() {
        for f in Flavour::ALL {
            let v = verdict(&lab("a"), f).unwrap();
            assert!(v.simplicial_map && v.culf.holds && v.relatively_segal.holds);
        }
    }

    #[test]
    fn edge_fibres_are_three_and_four() {
        let u = build_u(&lab("a(b)"), Flavour::Labelled).unwrap();
        let v = check_culf(&u, 3);
        assert!(!v.holds);
        let full = u.tree().subforest_id(u.tree().forest().vertices()).unwrap();
        let f = v.report.failures.iter().find(|f| f.n == 2 && f.base == full).unwrap();
        assert_eq!((f.source_fibre, f.target_fibre), (3, 4));
    }

    #[test]
    fn unlabelled_edge_is_culf_but_not_relatively_segal() {
        for f in [Flavour::Plain, Flavour::Planar] {
            let v = verdict(&lab("a(b)"), f).unwrap();
            assert!(v.culf.holds);
            assert!(!v.relatively_segal.holds);
        }
    }

    #[test]
    fn crossing_partition_is_missed() {
        let t = lab("b(a,c(d))");
        let u = build_u(&t, Flavour::Labelled).unwrap();
        let g = u.graph().graph();
        let s = |v: &[&str]| g.set_of(v).unwrap();
        let y = PartitionedSubgraph {
            vertices: g.vertices(),
            edges: g.all_edges(),
            parts: vec![s(&["a", "c"]), s(&["b", "d"])],
        };
        let y = u.graph().id_of(&y).unwrap();
        assert!(!u.components[2].contains(&y));
        assert!(!check_culf(&u, 3).holds);
    }
}
