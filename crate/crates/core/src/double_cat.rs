//! The double category of a reduced 2-Segal set.
//!
//! Objects are 1-simplices. A 2-simplex `x` is a horizontal morphism
//! `d2 x -> d1 x` and a vertical morphism `d1 x -> d0 x`. A 3-simplex is a
//! square with sides `(s_h, s_v, t_h, t_v) = (d3, d1, d2, d0)`: `s_h` and
//! `t_h` are vertical, `s_v` and `t_v` horizontal.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplicial::{fibre_product_defect, nondegenerate, LevelwiseSimplicialSet, PullbackDefect};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub source: u32,
    pub target: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Square {
    /// Left vertical side.
    pub s_h: u32,
    /// Top horizontal side.
    pub s_v: u32,
    /// Right vertical side.
    pub t_h: u32,
    /// Bottom horizontal side.
    pub t_v: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug)]
pub struct DoubleCategoryData {
    objects: Vec<String>,
    basepoint: u32,
    /// Faces `[d0, d1, d2]` of each 2-simplex.
    morphisms: Vec<[u32; 3]>,
    /// Degeneracies `[s0, s1]` of each object.
    object_degeneracies: Vec<[u32; 2]>,
    /// Faces `[d0, d1, d2, d3]` of each 3-simplex.
    cells: Vec<[u32; 4]>,
    /// Degeneracies `[s0, s1, s2]` of each 2-simplex, when level 3 exists.
    morphism_degeneracies: Vec<[u32; 3]>,
    /// Faces `[d0, .., d4]` of each 4-simplex, when level 4 exists.
    pastings: Vec<[u32; 5]>,
    nondegenerate_morphisms: Vec<bool>,
    nondegenerate_squares: Vec<bool>,
    by_d3_d1: HashMap<(u32, u32), Vec<u32>>,
    by_d2_d0: HashMap<(u32, u32), Vec<u32>>,
    by_d4_d2: HashMap<(u32, u32), Vec<u32>>,
    by_d2_d0_4: HashMap<(u32, u32), Vec<u32>>,
}

fn index2<const K: usize>(cells: &[[u32; K]], a: usize, b: usize) -> HashMap<(u32, u32), Vec<u32>> {
    let mut m: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (w, c) in cells.iter().enumerate() {
        m.entry((c[a], c[b])).or_default().push(w as u32);
    }
    m
}

/// Reads off the double category. Needs a reduced set truncated at 3 or
/// more; square pasting also needs level 4.
pub fn extract(x: &LevelwiseSimplicialSet) -> Result<DoubleCategoryData> {
    if !x.is_reduced() {
        return Err(Error::NotReduced(x.len(0)));
    }
    if x.truncation() < 3 {
        return Err(Error::Truncation { have: x.truncation(), need: 3 });
    }
    let faces = |n: usize, e: u32| -> Vec<u32> { (0..=n).map(|i| x.face(n, i, e)).collect() };
    let degs = |n: usize, e: u32| -> Vec<u32> { (0..=n).map(|i| x.degeneracy(n, i, e)).collect() };
    let morphisms = (0..x.len(2) as u32).map(|e| faces(2, e).try_into().unwrap()).collect();
    let object_degeneracies = (0..x.len(1) as u32).map(|e| degs(1, e).try_into().unwrap()).collect();
    let cells = (0..x.len(3) as u32).map(|e| faces(3, e).try_into().unwrap()).collect();
    let morphism_degeneracies = (0..x.len(2) as u32).map(|e| degs(2, e).try_into().unwrap()).collect();
    let pastings = if x.truncation() >= 4 {
        (0..x.len(4) as u32).map(|e| faces(4, e).try_into().unwrap()).collect()
    } else {
        Vec::new()
    };
    let mut nondegenerate_morphisms = vec![false; x.len(2)];
    for e in nondegenerate(x, 2) {
        nondegenerate_morphisms[e as usize] = true;
    }
    let mut nondegenerate_squares = vec![false; x.len(3)];
    for e in nondegenerate(x, 3) {
        nondegenerate_squares[e as usize] = true;
    }
    Ok(DoubleCategoryData::from_parts(
        x.level(1).to_vec(),
        x.basepoint()?,
        morphisms,
        object_degeneracies,
        cells,
        morphism_degeneracies,
        pastings,
        nondegenerate_morphisms,
        nondegenerate_squares,
    ))
}

impl DoubleCategoryData {
    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        objects: Vec<String>,
        basepoint: u32,
        morphisms: Vec<[u32; 3]>,
        object_degeneracies: Vec<[u32; 2]>,
        cells: Vec<[u32; 4]>,
        morphism_degeneracies: Vec<[u32; 3]>,
        pastings: Vec<[u32; 5]>,
        nondegenerate_morphisms: Vec<bool>,
        nondegenerate_squares: Vec<bool>,
    ) -> Self {
        let by_d3_d1 = index2(&cells, 3, 1);
        let by_d2_d0 = index2(&cells, 2, 0);
        let by_d4_d2 = index2(&pastings, 4, 2);
        let by_d2_d0_4 = index2(&pastings, 2, 0);
        DoubleCategoryData {
            objects,
            basepoint,
            morphisms,
            object_degeneracies,
            cells,
            morphism_degeneracies,
            pastings,
            nondegenerate_morphisms,
            nondegenerate_squares,
            by_d3_d1,
            by_d2_d0,
            by_d4_d2,
            by_d2_d0_4,
        }
    }

    /// A copy with square `x` listed twice, as a fault for the stability check.
    pub fn with_duplicated_square(&self, x: u32) -> Self {
        let mut cells = self.cells.clone();
        cells.push(cells[x as usize]);
        let mut nd = self.nondegenerate_squares.clone();
        nd.push(nd[x as usize]);
        DoubleCategoryData::from_parts(
            self.objects.clone(),
            self.basepoint,
            self.morphisms.clone(),
            self.object_degeneracies.clone(),
            cells,
            self.morphism_degeneracies.clone(),
            self.pastings.clone(),
            self.nondegenerate_morphisms.clone(),
            nd,
        )
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn square_count(&self) -> usize {
        self.cells.len()
    }

    pub fn basepoint(&self) -> u32 {
        self.basepoint
    }

    pub fn hor(&self, f: u32) -> Arrow {
        let m = self.morphisms[f as usize];
        Arrow { source: m[2], target: m[1] }
    }

    pub fn ver(&self, u: u32) -> Arrow {
        let m = self.morphisms[u as usize];
        Arrow { source: m[1], target: m[0] }
    }

    pub fn arrow(&self, dir: Direction, f: u32) -> Arrow {
        match dir {
            Direction::Horizontal => self.hor(f),
            Direction::Vertical => self.ver(f),
        }
    }

    pub fn square(&self, w: u32) -> Square {
        let c = self.cells[w as usize];
        Square { s_h: c[3], s_v: c[1], t_h: c[2], t_v: c[0] }
    }

    pub fn hor_identity(&self, a: u32) -> u32 {
        self.object_degeneracies[a as usize][1]
    }

    pub fn ver_identity(&self, a: u32) -> u32 {
        self.object_degeneracies[a as usize][0]
    }

    pub fn identity(&self, dir: Direction, a: u32) -> u32 {
        match dir {
            Direction::Horizontal => self.hor_identity(a),
            Direction::Vertical => self.ver_identity(a),
        }
    }

    pub fn is_identity(&self, dir: Direction, f: u32) -> bool {
        let a = self.arrow(dir, f).source;
        self.identity(dir, a) == f
    }

    /// `s2 u`: the square with both vertical sides `u` and identity
    /// horizontal sides.
    pub fn hor_identity_square(&self, u: u32) -> Option<u32> {
        self.morphism_degeneracies.get(u as usize).map(|d| d[2])
    }

    /// `s0 f`: the square with both horizontal sides `f` and identity
    /// vertical sides.
    pub fn ver_identity_square(&self, f: u32) -> Option<u32> {
        self.morphism_degeneracies.get(f as usize).map(|d| d[0])
    }

    fn unique(found: Option<&Vec<u32>>, level: usize) -> Result<u32> {
        match found.map_or(&[][..], |v| v.as_slice()) {
            [w] => Ok(*w),
            other => Err(Error::NotUnique { level, count: other.len() }),
        }
    }

    /// `g ∘ f` for `f: A -> B`, `g: B -> C`: `d2 w` for the unique square `w`
    /// with `d3 w = f` and `d1 w = g`.
    pub fn hor_compose(&self, f: u32, g: u32) -> Result<u32> {
        if self.hor(f).target != self.hor(g).source {
            return Err(Error::NotComposable);
        }
        let w = Self::unique(self.by_d3_d1.get(&(f, g)), 3)?;
        Ok(self.cells[w as usize][2])
    }

    /// `v ∘ u` for vertical `u: A -> B`, `v: B -> C`: `d1 w` for the unique
    /// square `w` with `d2 w = u` and `d0 w = v`.
    pub fn ver_compose(&self, u: u32, v: u32) -> Result<u32> {
        if self.ver(u).target != self.ver(v).source {
            return Err(Error::NotComposable);
        }
        let w = Self::unique(self.by_d2_d0.get(&(u, v)), 3)?;
        Ok(self.cells[w as usize][1])
    }

    pub fn compose(&self, dir: Direction, f: u32, g: u32) -> Result<u32> {
        match dir {
            Direction::Horizontal => self.hor_compose(f, g),
            Direction::Vertical => self.ver_compose(f, g),
        }
    }

    /// Places `tau` to the right of `sigma`.
    pub fn hor_paste(&self, sigma: u32, tau: u32) -> Result<u32> {
        if self.pastings.is_empty() {
            return Err(Error::Truncation { have: 3, need: 4 });
        }
        if self.square(sigma).t_h != self.square(tau).s_h {
            return Err(Error::NotComposable);
        }
        let w = Self::unique(self.by_d4_d2.get(&(sigma, tau)), 4)?;
        Ok(self.pastings[w as usize][3])
    }

    /// Places `tau` below `sigma`.
    pub fn ver_paste(&self, sigma: u32, tau: u32) -> Result<u32> {
        if self.pastings.is_empty() {
            return Err(Error::Truncation { have: 3, need: 4 });
        }
        if self.square(sigma).t_v != self.square(tau).s_v {
            return Err(Error::NotComposable);
        }
        let w = Self::unique(self.by_d2_d0_4.get(&(sigma, tau)), 4)?;
        Ok(self.pastings[w as usize][1])
    }

    /// Squares whose four sides violate a corner condition.
    pub fn corner_violations(&self) -> Vec<u32> {
        (0..self.cells.len() as u32)
            .filter(|&w| {
                let s = self.square(w);
                let (sh, sv, th, tv) = (self.ver(s.s_h), self.hor(s.s_v), self.ver(s.t_h), self.hor(s.t_v));
                !(sh.source == sv.source && th.target == tv.target && sv.target == th.source && sh.target == tv.source)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub holds: bool,
    /// Defect of squares -> (s_h, s_v) over their shared corner.
    pub source: Option<PullbackDefect>,
    /// Defect of squares -> (t_h, t_v) over their shared corner.
    pub target: Option<PullbackDefect>,
}

/// Each square is determined by its source span and, independently, by its
/// target cospan, and every compatible span or cospan occurs.
pub fn check_stable(d: &DoubleCategoryData) -> StabilityReport {
    let side = |k: usize| -> Vec<u32> { d.cells.iter().map(|c| c[k]).collect() };
    let face = |k: usize| -> Vec<u32> { d.morphisms.iter().map(|m| m[k]).collect() };
    // s_h = d3 and s_v = d1 share d1 s_h = d2 s_v; t_h = d2 and t_v = d0 share d0 t_h = d1 t_v.
    let source = fibre_product_defect(&side(3), &side(1), &face(1), &face(2));
    let target = fibre_product_defect(&side(2), &side(0), &face(0), &face(1));
    StabilityReport { holds: source.is_none() && target.is_none(), source, target }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointedReport {
    pub holds: bool,
    /// Objects with other than one horizontal morphism from the basepoint.
    pub not_initial: Vec<(u32, usize)>,
    /// Objects with other than one vertical morphism to the basepoint.
    pub not_terminal: Vec<(u32, usize)>,
}

pub fn check_pointed(d: &DoubleCategoryData) -> PointedReport {
    let r = augmentation_report(d, &[d.basepoint]);
    PointedReport { holds: r.0.is_empty() && r.1.is_empty(), not_initial: r.0, not_terminal: r.1 }
}

/// Every object has exactly one horizontal morphism from, and exactly one
/// vertical morphism to, the objects of `a`.
pub fn check_augmented(d: &DoubleCategoryData, a: &[u32]) -> bool {
    let r = augmentation_report(d, a);
    r.0.is_empty() && r.1.is_empty()
}

type CountFailures = Vec<(u32, usize)>;

fn augmentation_report(d: &DoubleCategoryData, a: &[u32]) -> (CountFailures, CountFailures) {
    let mut from = vec![0usize; d.object_count()];
    let mut to = vec![0usize; d.object_count()];
    for f in 0..d.morphism_count() as u32 {
        let h = d.hor(f);
        if a.contains(&h.source) {
            from[h.target as usize] += 1;
        }
        let v = d.ver(f);
        if a.contains(&v.target) {
            to[v.source as usize] += 1;
        }
    }
    let bad = |c: Vec<usize>| c.into_iter().enumerate().filter(|&(_, k)| k != 1).map(|(o, k)| (o as u32, k)).collect();
    (bad(from), bad(to))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawFailure {
    pub direction: Direction,
    pub law: &'static str,
    pub morphisms: Vec<u32>,
    pub detail: String,
}

/// Identity and associativity laws for horizontal and vertical composition,
/// on all composable pairs and triples.
pub fn check_category_laws(d: &DoubleCategoryData) -> Vec<LawFailure> {
    let mut out = Vec::new();
    for dir in [Direction::Horizontal, Direction::Vertical] {
        let mut outgoing: Vec<Vec<u32>> = vec![Vec::new(); d.object_count()];
        for f in 0..d.morphism_count() as u32 {
            outgoing[d.arrow(dir, f).source as usize].push(f);
        }
        let fail =
            |law: &'static str, m: Vec<u32>, detail: String| LawFailure { direction: dir, law, morphisms: m, detail };
        for f in 0..d.morphism_count() as u32 {
            let a = d.arrow(dir, f);
            match d.compose(dir, d.identity(dir, a.source), f) {
                Ok(r) if r == f => {}
                other => out.push(fail("left identity", vec![f], format!("{other:?}"))),
            }
            match d.compose(dir, f, d.identity(dir, a.target)) {
                Ok(r) if r == f => {}
                other => out.push(fail("right identity", vec![f], format!("{other:?}"))),
            }
            for &g in &outgoing[a.target as usize] {
                let fg = match d.compose(dir, f, g) {
                    Ok(x) => x,
                    Err(e) => {
                        out.push(fail("composition", vec![f, g], e.to_string()));
                        continue;
                    }
                };
                for &h in &outgoing[d.arrow(dir, g).target as usize] {
                    let left = d.compose(dir, fg, h);
                    let right = d.compose(dir, g, h).and_then(|gh| d.compose(dir, f, gh));
                    if left.is_err() || left != right {
                        out.push(fail("associativity", vec![f, g, h], format!("{left:?} vs {right:?}")));
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCensus {
    pub objects: usize,
    /// Objects other than the basepoint.
    pub nonempty_objects: usize,
    pub hor_nonidentity: usize,
    pub ver_nonidentity: usize,
    /// Nonidentity morphisms with neither end at the basepoint.
    pub hor_nonidentity_nonempty: usize,
    pub ver_nonidentity_nonempty: usize,
    /// Nondegenerate morphisms (strict two-step cuts).
    pub nondegenerate_morphisms: usize,
    /// All squares, or only nondegenerate ones when requested.
    pub squares: usize,
}

pub fn census_double(d: &DoubleCategoryData, strict_only: bool) -> DoubleCensus {
    let b = d.basepoint;
    let count = |dir: Direction, nonempty: bool| {
        (0..d.morphism_count() as u32)
            .filter(|&f| !d.is_identity(dir, f))
            .filter(|&f| !nonempty || (d.arrow(dir, f).source != b && d.arrow(dir, f).target != b))
            .count()
    };
    DoubleCensus {
        objects: d.object_count(),
        nonempty_objects: d.object_count() - 1,
        hor_nonidentity: count(Direction::Horizontal, false),
        ver_nonidentity: count(Direction::Vertical, false),
        hor_nonidentity_nonempty: count(Direction::Horizontal, true),
        ver_nonidentity_nonempty: count(Direction::Vertical, true),
        nondegenerate_morphisms: d.nondegenerate_morphisms.iter().filter(|&&x| x).count(),
        squares: if strict_only { d.nondegenerate_squares.iter().filter(|&&x| x).count() } else { d.square_count() },
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Objects as nodes, morphisms as edges with ids `h<x>` and `v<x>`.
/// Identities are left out unless asked for.
pub fn to_dot(d: &DoubleCategoryData, names: &[String], include_identities: bool) -> String {
    let mut out = String::from("digraph double {\n");
    for (o, name) in names.iter().enumerate() {
        let _ = writeln!(out, "  o{o} [label=\"{}\"];", dot_escape(name));
    }
    for f in 0..d.morphism_count() as u32 {
        if include_identities || !d.is_identity(Direction::Horizontal, f) {
            let a = d.hor(f);
            let _ = writeln!(out, "  o{} -> o{} [id=\"h{f}\", kind=hor, arrowhead=vee];", a.source, a.target);
        }
        if include_identities || !d.is_identity(Direction::Vertical, f) {
            let a = d.ver(f);
            let _ = writeln!(out, "  o{} -> o{} [id=\"v{f}\", kind=ver, style=dashed];", a.source, a.target);
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SquareRecord {
    pub square: u32,
    /// Edge ids in the order `s_h, s_v, t_h, t_v`.
    pub edges: [String; 4],
    pub nondegenerate: bool,
}

pub fn squares_json(d: &DoubleCategoryData, strict_only: bool) -> String {
    let records: Vec<SquareRecord> = (0..d.square_count() as u32)
        .filter(|&w| !strict_only || d.nondegenerate_squares[w as usize])
        .map(|w| {
            let s = d.square(w);
            SquareRecord {
                square: w,
                edges: [format!("v{}", s.s_h), format!("h{}", s.s_v), format!("v{}", s.t_h), format!("h{}", s.t_v)],
                nondegenerate: d.nondegenerate_squares[w as usize],
            }
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Flavour, RootedForest};
    use crate::tree_segal::build_xt;

    fn pc(s: &str, f: Flavour, n: usize) -> DoubleCategoryData {
        let t = RootedForest::parse(s, Flavour::Labelled).unwrap();
        extract(build_xt(&t, f, n).unwrap().set()).unwrap()
    }

    #[test]
    fn cherry_is_pointed_stable_category() {
        for f in Flavour::ALL {
            let d = pc("a(b,c)", f, 4);
            assert!(check_stable(&d).holds, "{f}");
            assert!(check_pointed(&d).holds, "{f}");
            assert!(check_augmented(&d, &[d.basepoint()]));
            assert!(d.corner_violations().is_empty());
            assert!(check_category_laws(&d).is_empty(), "{f}");
        }
    }

    #[test]
    fn duplicated_square_breaks_stability() {
        let d = pc("a(b)", Flavour::Labelled, 4).with_duplicated_square(0);
        let r = check_stable(&d);
        assert!(!r.holds);
        assert!(matches!(r.source, Some(PullbackDefect::NotInjective { .. })));
    }

    #[test]
    fn path_inclusions_compose() {
        let t = RootedForest::parse("a(b(c(d)))", Flavour::Labelled).unwrap();
        let x = build_xt(&t, Flavour::Labelled, 5).unwrap();
        let d = extract(x.set()).unwrap();
        let p = |k: usize| {
            let names = ["a", "b", "c", "d"];
            x.subforest_id(t.set_of(&names[4 - k..]).unwrap()).unwrap()
        };
        let inclusion = |i: usize, j: usize| {
            (0..d.morphism_count() as u32).find(|&f| d.hor(f) == Arrow { source: p(i), target: p(j) }).unwrap()
        };
        let f = inclusion(1, 2);
        let g = inclusion(2, 4);
        assert_eq!(d.hor_compose(f, g).unwrap(), inclusion(1, 4));
        let a = p(3);
        assert_eq!(d.ver_compose(d.ver_identity(a), d.ver_identity(a)).unwrap(), d.ver_identity(a));
        assert_eq!(d.hor_compose(f, d.hor_identity(p(2))).unwrap(), f);
    }

    #[test]
    fn identity_squares_paste_to_identity_squares() {
        let d = pc("a(b,c)", Flavour::Labelled, 5);
        for a in 0..d.object_count() as u32 {
            let u = d.ver_identity(a);
            let f = d.hor_identity(a);
            let su = d.hor_identity_square(u).unwrap();
            let sf = d.ver_identity_square(f).unwrap();
            assert_eq!(d.hor_paste(su, su).unwrap(), su);
            assert_eq!(d.ver_paste(sf, sf).unwrap(), sf);
        }
    }

    #[test]
    fn dot_marks_directions() {
        let d = pc("a(b)", Flavour::Labelled, 3);
        let dot = to_dot(&d, d.objects(), false);
        assert!(dot.contains("kind=hor, arrowhead=vee"));
        assert!(dot.contains("kind=ver"));
        let json: serde_json::Value = serde_json::from_str(&squares_json(&d, true)).unwrap();
        assert!(json.as_array().unwrap().iter().all(|s| s["edges"].as_array().unwrap().len() == 4));
    }
}
