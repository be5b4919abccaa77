//! Reference counts recomputed from scratch, one row per quantity.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use segal_core::double_cat::{census_double, check_pointed, check_stable, extract};
use segal_core::forest::all_trees;
use segal_core::graph_segal::build_xg;
use segal_core::hall::{build_hall, graph_basis, is_commutative, HallTable};
use segal_core::operad::build_operad;
use segal_core::simplicial::check_culf;
use segal_core::tree_segal::{build_xt, lower_subtree_classes, TreeSegalSet};
use segal_core::umap::{build_u, verdict_cached, GraphCache};
use segal_core::{Flavour, Graph, Result, RootedForest};

pub struct Row {
    pub item: String,
    pub expected: String,
    pub computed: String,
}

impl Row {
    fn new(item: impl Into<String>, expected: impl ToString, computed: impl ToString) -> Self {
        Row { item: item.into(), expected: expected.to_string(), computed: computed.to_string() }
    }

    pub fn matches(&self) -> bool {
        self.expected == self.computed
    }
}

pub fn render(rows: &[Row]) -> String {
    let w = rows.iter().map(|r| r.item.chars().count()).max().unwrap_or(0);
    let e = rows.iter().map(|r| r.expected.chars().count()).max().unwrap_or(0).max(8);
    let c = rows.iter().map(|r| r.computed.chars().count()).max().unwrap_or(0).max(8);
    let mut out = format!("{:w$}  {:e$}  {:c$}  status\n", "quantity", "expected", "computed");
    for r in rows {
        let status = if r.matches() { "ok" } else { "differs" };
        let _ = writeln!(out, "{:w$}  {:e$}  {:c$}  {status}", r.item, r.expected, r.computed);
    }
    let differing = rows.iter().filter(|r| !r.matches()).count();
    let _ = writeln!(out, "{} rows, {differing} differ", rows.len());
    out
}

fn lab(s: &str) -> RootedForest {
    RootedForest::parse(s, Flavour::Labelled).expect("fixed expression")
}

fn path(n: usize) -> RootedForest {
    let mut s = String::from("v0");
    for i in 1..n {
        s.push_str(&format!("(v{i}"));
    }
    s.push_str(&")".repeat(n - 1));
    lab(&s)
}

fn star(n: usize) -> RootedForest {
    let leaves: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    lab(&format!("r({})", leaves.join(",")))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn product_text(h: &HallTable, a: u32, b: u32, name: impl Fn(u32) -> String) -> String {
    let p = h.product(a, b);
    if p.is_empty() {
        return "0".into();
    }
    p.iter().map(|(&z, &k)| if k == 1 { name(z) } else { format!("{k} {}", name(z)) }).collect::<Vec<_>>().join(" + ")
}

fn subforest(x: &TreeSegalSet, labels: &[&str]) -> u32 {
    x.subforest_id(x.forest().set_of(labels).expect("fixed labels")).expect("admissible")
}

pub fn rows(all: bool, seed: u64) -> Result<Vec<Row>> {
    let mut rows = Vec::new();

    let t = lab("a(b(c),d(e))");
    let lower: Vec<String> =
        Flavour::ALL.iter().map(|&f| lower_subtree_classes(&t, f).map(|n| n.to_string())).collect::<Result<_>>()?;
    rows.push(Row::new("lower subtrees of a(b(c),d(e)), labelled/planar/plain", "10/8/7", lower.join("/")));
    let chain = build_xt(&lab("a(b(c))"), Flavour::Labelled, 2)?.census().nondegenerate[1];
    let cherry = build_xt(&lab("b(a,c)"), Flavour::Labelled, 2)?.census().nondegenerate[1];
    rows.push(Row::new("nonempty subforests of a(b(c)) and b(a,c)", "6/7", format!("{chain}/{cherry}")));

    // Double categories.
    let y3 = lab("r(a(b,c))");
    let dc = |t: &RootedForest, f: Flavour| -> Result<_> { extract(build_xt(t, f, 4)?.set()) };
    let plain = census_double(&dc(&y3, Flavour::Plain)?, true);
    let planar = census_double(&dc(&y3, Flavour::Planar)?, true);
    let labelled = census_double(&dc(&y3, Flavour::Labelled)?, true);
    rows.push(Row::new("Y3 plain: objects", 7, plain.objects));
    rows.push(Row::new("Y3 plain: strict squares", 3, plain.squares));
    rows.push(Row::new("Y3 planar: objects", 8, planar.objects));
    rows.push(Row::new("Y3 planar: strict morphisms", 12, planar.nondegenerate_morphisms));
    rows.push(Row::new("Y3 planar: strict squares", 4, planar.squares));
    rows.push(Row::new("Y3 labelled: objects", 13, labelled.objects));
    rows.push(Row::new("Y3 labelled: strict morphisms", 14, labelled.nondegenerate_morphisms));
    rows.push(Row::new("Y3 labelled: strict squares", 7, labelled.squares));
    let top = if all { 8 } else { 5 };
    for n in 3..=top {
        let c = census_double(&dc(&path(n), Flavour::Plain)?, true);
        rows.push(Row::new(
            format!("P{n} plain: objects/strict squares"),
            format!("{}/{}", n + 1, binomial(n, 3)),
            format!("{}/{}", c.objects, c.squares),
        ));
    }
    for n in 2..=if all { 5 } else { 4 } {
        let c = census_double(&dc(&star(n), Flavour::Plain)?, false);
        rows.push(Row::new(
            format!("K1,{n} plain: nonempty objects/nonidentity morphisms between them"),
            format!("{}/{}", 2 * n, 2 * binomial(n + 1, 2) + 2 * n),
            format!("{}/{}", c.nonempty_objects, c.hor_nonidentity_nonempty + c.ver_nonidentity_nonempty),
        ));
    }
    let k13 = census_double(&dc(&star(3), Flavour::Plain)?, false);
    rows.push(Row::new(
        "K1,3 plain: nonidentity morphisms among nonempty objects",
        15,
        k13.hor_nonidentity_nonempty + k13.ver_nonidentity_nonempty,
    ));
    rows.push(Row::new("K1,3 plain: level 1", 7, k13.objects));
    let centre = build_xt(&star(3), Flavour::Plain, 3)?.census().strict[3];
    let leaf = build_xt(&y3, Flavour::Plain, 3)?.census().strict[3];
    rows.push(Row::new("K1,3 plain: strict level 3, centre/leaf root", "3 or 4", format!("{centre}/{leaf}")));

    // Graphs.
    let p3 = build_xg(&Graph::parse("a-b b-c", false)?, true, 3)?.census();
    rows.push(Row::new(
        "path a-b-c labelled: level 1/nondegenerate 2/nondegenerate 3",
        "13/34/24",
        format!("{}/{}/{}", p3.level_sizes[1], p3.nondegenerate[2], p3.nondegenerate[3]),
    ));
    let s3 = build_xg(&Graph::star(3), false, 4)?.census();
    rows.push(Row::new(
        "K1,3 unlabelled: level 1/strict 2/nondegenerate 3/nondegenerate 4",
        "11/38/55/4",
        format!("{}/{}/{}/{}", s3.level_sizes[1], s3.strict[2], s3.nondegenerate[3], s3.nondegenerate[4]),
    ));

    // The tree-to-graph map.
    let u = build_u(&lab("a(b)"), Flavour::Labelled)?;
    let full = u.tree().subforest_id(u.tree().forest().vertices()).expect("whole tree");
    let r = check_culf(&u.map(), 2);
    let fibres = r
        .failures
        .iter()
        .find(|f| f.n == 2 && f.base == full)
        .map_or("none".to_string(), |f| format!("{}/{}", f.source_fibre, f.target_fibre));
    rows.push(Row::new("edge a(b) labelled: fibres over the whole tree", "3/4", fibres));
    if all {
        let mut cache = GraphCache::new();
        let (mut agree, mut total) = (0, 0);
        for n in 1..=5 {
            for f in Flavour::ALL {
                for t in all_trees(n, f) {
                    let v = verdict_cached(&t, f, &mut cache)?;
                    let culf = if f.is_labelled() { n == 1 } else { n <= 2 };
                    total += 1;
                    agree +=
                        usize::from(v.simplicial_map && v.culf.holds == culf && v.relatively_segal.holds == (n == 1));
                }
            }
        }
        rows.push(Row::new("trees up to 5 vertices: map, CULF and relative Segal as characterized", total, agree));
        let (mut good, mut total) = (0, 0);
        for n in 1..=5 {
            for f in Flavour::ALL {
                for t in all_trees(n, f) {
                    let d = extract(build_xt(&t, f, 3)?.set())?;
                    total += 1;
                    good += usize::from(check_stable(&d).holds && check_pointed(&d).holds);
                }
            }
        }
        rows.push(Row::new("trees up to 5 vertices: stable and pointed", total, good));
    }

    // Hall algebras.
    let x = build_xt(&lab("a(b)"), Flavour::Labelled, 2)?;
    let h = build_hall(x.set())?;
    let name = |z: u32| if z == subforest(&x, &["a", "b"]) { "T".to_string() } else { x.set().code(1, z).to_string() };
    let (a, b) = (subforest(&x, &["a"]), subforest(&x, &["b"]));
    rows.push(Row::new(
        "edge a(b) labelled: 1_b * 1_a / 1_a * 1_b",
        "T/0",
        format!("{}/{}", product_text(&h, b, a, name), product_text(&h, a, b, name)),
    ));
    let x = build_xt(&path(5), Flavour::Plain, 2)?;
    let h = build_hall(x.set())?;
    let names = ["v0", "v1", "v2", "v3", "v4"];
    let p = |k: usize| subforest(&x, &names[..k]);
    let good = (1..=5)
        .flat_map(|i| (1..=5).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            h.product(p(i), p(j)) == if i + j <= 5 { h.basis_vector(p(i + j)) } else { Default::default() }
        })
        .count();
    rows.push(Row::new("P5 plain: products 1_i * 1_j as predicted", 25, good));
    for f in [Flavour::Plain, Flavour::Planar] {
        let x = build_xt(&y3, f, 2)?;
        let h = build_hall(x.set())?;
        let (f1, p2, p31, p32) = (
            subforest(&x, &["b"]),
            subforest(&x, &["r", "a"]),
            subforest(&x, &["r", "a", "b"]),
            subforest(&x, &["a", "b", "c"]),
        );
        let name = |z: u32| {
            [(f1, "F1"), (p2, "P2"), (p31, "P3^1"), (p32, "P3^2")]
                .iter()
                .find(|e| e.0 == z)
                .map_or("?".into(), |e| e.1.to_string())
        };
        rows.push(Row::new(
            format!("Y3 {f}: 1_P2 * 1_F1 / 1_F1 * 1_P2"),
            "P3^1 + P3^2/P3^1",
            format!("{}/{}", sorted_sum(&product_text(&h, p2, f1, name)), product_text(&h, f1, p2, name)),
        ));
    }
    let g = build_xg(&Graph::parse("a-b b-c", false)?, true, 2)?;
    let h = build_hall(g.set())?;
    let mut pairs = 0;
    for i in 0..h.dim() as u32 {
        for j in i + 1..h.dim() as u32 {
            if i != h.unit() && j != h.unit() && !h.product(i, j).is_empty() {
                pairs += 1;
            }
        }
    }
    rows.push(Row::new("path a-b-c labelled: nonzero products of nonempty pairs", 8, pairs));
    let (mut agree, mut total) = (0, 0);
    for n in 1..=6 {
        for t in all_trees(n, Flavour::Plain) {
            let h = build_hall(build_xt(&t, Flavour::Plain, 2)?.set())?;
            let is_path = t.is_tree() && (0..t.len()).all(|v| t.children(v).len() <= 1);
            total += 1;
            agree += usize::from(is_commutative(&h).commutative == is_path);
        }
    }
    rows.push(Row::new("plain trees up to 6 vertices: commutative iff path from a leaf", total, agree));
    let (mut thin, mut total) = (0, 0);
    for n in 1..=5 {
        for t in all_trees(n, Flavour::Labelled) {
            let h = build_hall(build_xt(&t, Flavour::Labelled, 2)?.set())?;
            total += 1;
            thin += usize::from(h.constants().all(|c| c <= 1));
        }
    }
    rows.push(Row::new("labelled trees up to 5 vertices: constants in {0,1}", total, thin));
    let t = lab("b(a,c(d))");
    let xt = build_xt(&t, Flavour::Labelled, 2)?;
    let ht = build_hall(xt.set())?;
    let in_t = ht.product(subforest(&xt, &["b"]), subforest(&xt, &["d"]));
    let xg = build_xg(&Graph::from_forest(&t), true, 2)?;
    let hg = build_hall(xg.set())?;
    let in_g = hg.product(graph_basis(&xg, &["b"], &[])?, graph_basis(&xg, &["d"], &[])?);
    let bd = graph_basis(&xg, &["b", "d"], &[])?;
    rows.push(Row::new(
        "b(a,c(d)): 1_b * 1_d in trees/graphs",
        "0/1_{b,d}",
        format!(
            "{}/{}",
            if in_t.is_empty() { "0" } else { "nonzero" },
            if in_g == hg.basis_vector(bd) { "1_{b,d}" } else { "other" }
        ),
    ));

    // Operads.
    let o = build_operad(build_xt(&lab("r(a(g),b)"), Flavour::Planar, 3)?.set(), Some(2))?;
    let binary = o.inhabited().iter().filter(|(p, _)| p.inputs.len() == 2).map(|(_, v)| v.len()).max().unwrap_or(0);
    rows.push(Row::new("r(a(g),b) planar: largest binary operation set", 2, binary));

    // Seeded relabellings.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = 50;
    let mut same = 0;
    for _ in 0..trials {
        let base = all_trees(5, Flavour::Planar).choose(&mut rng).expect("nonempty").clone();
        let ok = Flavour::ALL.iter().all(|&f| {
            let t = base.with_flavour(f).expect("labelled");
            relabel(&t, &mut rng).code() == t.code()
        });
        same += usize::from(ok);
    }
    rows.push(Row::new(format!("codes kept by {trials} random relabellings (seed {seed})"), trials, same));
    Ok(rows)
}

fn sorted_sum(s: &str) -> String {
    let mut parts: Vec<&str> = s.split(" + ").collect();
    parts.sort_unstable();
    parts.join(" + ")
}

/// The same tree with vertex ids permuted; labels and child order travel
/// with their vertices.
fn relabel(t: &RootedForest, rng: &mut ChaCha8Rng) -> RootedForest {
    let n = t.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
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
