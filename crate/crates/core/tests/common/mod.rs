//! Strategies and properties shared by the proptest suite and the
//! acceptance harness.

#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError};

use segal_core::forest::enumerate_layerings;
use segal_core::graph_segal::{build_xg, code_of, partitions};
use segal_core::simplicial::check_identities;
use segal_core::tree_segal::build_xt;
use segal_core::{Flavour, Graph, PartitionedSubgraph, RootedForest};

pub const CASES: u32 = 200;
pub const SEED: u64 = 0x5e9a_1c0d;

pub fn config() -> Config {
    Config { cases: CASES, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

pub fn flavour() -> impl Strategy<Value = Flavour> {
    prop::sample::select(Flavour::ALL.to_vec())
}

/// Random recursive trees on 1..=max vertices, labelled `v0, v1, ..`.
pub fn tree(max: usize) -> impl Strategy<Value = RootedForest> {
    prop::collection::vec(any::<usize>(), 0..max).prop_map(|picks| {
        let n = picks.len() + 1;
        let mut parent = vec![None];
        parent.extend(picks.iter().enumerate().map(|(v, &p)| Some(p % (v + 1))));
        let labels = (0..n).map(|v| format!("v{v}")).collect();
        RootedForest::from_parents(parent, Some(labels), Flavour::Labelled).expect("recursive tree")
    })
}

/// Simple graphs on 1..=max vertices with labels `g0, g1, ..`.
pub fn graph(max: usize) -> impl Strategy<Value = Graph> {
    (1..=max).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(any::<bool>(), pairs).prop_map(move |keep| {
            let all = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            let edges = all.zip(keep).filter(|e| e.1).map(|e| e.0).collect();
            let labels = (0..n).map(|v| format!("g{v}")).collect();
            Graph::new(n, edges, Some(labels), false).expect("simple graph")
        })
    })
}

pub fn permuted_tree() -> impl Strategy<Value = (RootedForest, Vec<usize>)> {
    tree(6).prop_flat_map(|t| {
        let n = t.len();
        (Just(t), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub fn permuted_graph() -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graph(5).prop_flat_map(|g| {
        let n = g.len();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

/// Moves vertex `v` to `perm[v]`; labels and child order travel along.
pub fn relabel_tree(t: &RootedForest, perm: &[usize]) -> RootedForest {
    let n = t.len();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut labels = vec![String::new(); n];
    for v in 0..n {
        parent[perm[v]] = t.parent(v).map(|p| perm[p]);
        children[perm[v]] = t.children(v).iter().map(|&c| perm[c]).collect();
        labels[perm[v]] = t.label(v).unwrap_or_default().to_string();
    }
    let roots = t.roots().iter().map(|&r| perm[r]).collect();
    let labels = t.labels().map(|_| labels);
    RootedForest::from_parts(parent, children, roots, labels, t.flavour()).expect("permuted tree")
}

pub fn relabel_graph(g: &Graph, perm: &[usize]) -> Graph {
    let edges = g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    let labels = g.labels().map(|ls| {
        let mut out = vec![String::new(); ls.len()];
        for (v, l) in ls.iter().enumerate() {
            out[perm[v]] = l.clone();
        }
        out
    });
    Graph::new(g.len(), edges, labels, g.allows_loops()).expect("permuted graph")
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

pub fn identities_hold(t: &RootedForest, f: Flavour, g: &Graph, labelled: bool) -> Result<(), TestCaseError> {
    let x = build_xt(&t.with_flavour(f).unwrap(), f, 4).map_err(|e| fail(e.to_string()))?;
    let v = check_identities(x.set());
    prop_assert!(v.is_empty(), "{} {f}: {:?}", t.to_expression(), v.first());
    let y = build_xg(g, labelled, 3).map_err(|e| fail(e.to_string()))?;
    let v = check_identities(y.set());
    prop_assert!(v.is_empty(), "{}: {:?}", g.to_text(), v.first());
    Ok(())
}

/// Faces and degeneracies computed on concrete representatives land in the
/// class the stored tables name, whichever representative is chosen.
pub fn codes_well_defined(t: &RootedForest, f: Flavour, g: &Graph, labelled: bool) -> Result<(), TestCaseError> {
    let t = t.with_flavour(f).unwrap();
    let x = build_xt(&t, f, 3).map_err(|e| fail(e.to_string()))?;
    let s = x.set();
    for n in 0..=3 {
        for z in enumerate_layerings(&t, n) {
            let id = s.id(n, t.layering_code(&z).as_str()).ok_or_else(|| fail("unknown layering".into()))?;
            for i in 0..=n {
                if n > 0 {
                    let want = s.id(n - 1, t.layering_code(&z.face(i)).as_str());
                    prop_assert_eq!(Some(s.face(n, i, id)), want, "d{} on {:?}", i, z);
                }
                if n < 3 {
                    let want = s.id(n + 1, t.layering_code(&z.degeneracy(i)).as_str());
                    prop_assert_eq!(Some(s.degeneracy(n, i, id)), want, "s{} on {:?}", i, z);
                }
            }
        }
    }
    let y = build_xg(g, labelled, 2).map_err(|e| fail(e.to_string()))?;
    let s = y.set();
    for n in 1..=2 {
        for (vs, es) in g.subgraphs() {
            for parts in partitions(vs, n) {
                let z = PartitionedSubgraph { vertices: vs, edges: es, parts };
                let id = s.id(n, &code_of(g, labelled, &z)).ok_or_else(|| fail("unknown partition".into()))?;
                for i in 0..=n {
                    let want = s.id(n - 1, &code_of(g, labelled, &z.face(g, i)));
                    prop_assert_eq!(Some(s.face(n, i, id)), want, "d{} on {}", i, z.describe(g));
                }
            }
        }
    }
    Ok(())
}

pub fn flavours_monotone(t: &RootedForest) -> Result<(), TestCaseError> {
    let mut sizes = HashMap::new();
    for f in Flavour::ALL {
        let x = build_xt(&t.with_flavour(f).unwrap(), f, 3).map_err(|e| fail(e.to_string()))?;
        sizes.insert(f, (0..=3).map(|n| x.set().len(n)).collect::<Vec<_>>());
    }
    for n in 0..=3 {
        let (p, q, l) = (sizes[&Flavour::Plain][n], sizes[&Flavour::Planar][n], sizes[&Flavour::Labelled][n]);
        prop_assert!(p <= q && q <= l, "{} level {n}: {p} {q} {l}", t.to_expression());
    }
    Ok(())
}

pub fn codes_invariant(t: &RootedForest, perm: &[usize]) -> Result<(), TestCaseError> {
    for f in Flavour::ALL {
        let a = t.with_flavour(f).unwrap();
        let b = relabel_tree(&a, perm);
        prop_assert_eq!(a.code(), b.code(), "{} under {:?}", t.to_expression(), perm);
        let (xa, xb) = (build_xt(&a, f, 2).unwrap(), build_xt(&b, f, 2).unwrap());
        for n in 0..=2 {
            let mut la = xa.set().level(n).to_vec();
            let mut lb = xb.set().level(n).to_vec();
            la.sort();
            lb.sort();
            prop_assert_eq!(la, lb, "{} level {}", f, n);
        }
    }
    Ok(())
}

pub fn graph_codes_invariant(g: &Graph, perm: &[usize]) -> Result<(), TestCaseError> {
    let h = relabel_graph(g, perm);
    prop_assert_eq!(g.canonical_code(), h.canonical_code());
    prop_assert_eq!(g.without_labels().canonical_code(), h.without_labels().canonical_code());
    Ok(())
}
