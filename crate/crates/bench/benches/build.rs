use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use segal_bench::example_tree;
use segal_core::double_cat::extract;
use segal_core::graph_segal::build_xg;
use segal_core::hall::{build_hall, check_algebra_laws};
use segal_core::operad::{build_operad, check_invertible};
use segal_core::simplicial::{check_2segal_pullbacks, check_2segal_triangulations};
use segal_core::tree_segal::build_xt;
use segal_core::umap::verdict;
use segal_core::{Flavour, Graph};

fn trees(c: &mut Criterion) {
    let t = example_tree();
    let mut g = c.benchmark_group("tree");
    for f in Flavour::ALL {
        g.bench_with_input(BenchmarkId::new("build", f), &f, |b, &f| b.iter(|| build_xt(black_box(&t), f, 5).unwrap()));
        let x = build_xt(&t, f, 5).unwrap();
        g.bench_with_input(BenchmarkId::new("pullbacks", f), &x, |b, x| b.iter(|| check_2segal_pullbacks(x.set(), 5)));
        g.bench_with_input(BenchmarkId::new("triangulations", f), &x, |b, x| {
            b.iter(|| check_2segal_triangulations(x.set(), 5))
        });
    }
    g.finish();
}

fn graphs(c: &mut Criterion) {
    let k4 = Graph::parse("a-b a-c a-d b-c b-d c-d", false).unwrap();
    let mut g = c.benchmark_group("graph");
    for labelled in [true, false] {
        let name = if labelled { "labelled" } else { "unlabelled" };
        g.bench_function(BenchmarkId::new("build K4", name), |b| {
            b.iter(|| build_xg(black_box(&k4), labelled, 4).unwrap())
        });
    }
    g.finish();
}

fn algebra(c: &mut Criterion) {
    let x = build_xt(&example_tree(), Flavour::Labelled, 4).unwrap();
    c.bench_function("hall table and laws", |b| b.iter(|| check_algebra_laws(&build_hall(x.set()).unwrap())));
    c.bench_function("double category", |b| b.iter(|| extract(x.set()).unwrap()));
    c.bench_function("operad invertibility", |b| b.iter(|| check_invertible(&build_operad(x.set(), Some(3)).unwrap())));
    c.bench_function("tree-to-graph map verdict", |b| b.iter(|| verdict(&example_tree(), Flavour::Plain).unwrap()));
}

criterion_group!(benches, trees, graphs, algebra);
criterion_main!(benches);
