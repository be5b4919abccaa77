//! Truncated simplicial sets with finite levels, and checkers for the
//! simplicial identities, Segal maps, the 2-Segal condition and properties of
//! simplicial maps.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite simplicial set truncated at dimension `N`.
///
/// Elements of level `n` are ids `0..len(n)` and carry a code that is unique
/// within the level. `faces[n][i][x]` is `d_i x` for `1 <= n <= N`, and
/// `degeneracies[n][i][x]` is `s_i x` for `n < N`.
#[derive(Clone, Debug)]
pub struct LevelwiseSimplicialSet {
    levels: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<u32>>>,
    degeneracies: Vec<Vec<Vec<u32>>>,
    index: OnceLock<Vec<HashMap<String, u32>>>,
}

impl PartialEq for LevelwiseSimplicialSet {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels && self.faces == other.faces && self.degeneracies == other.degeneracies
    }
}

#[derive(Serialize, Deserialize)]
struct SimplicialJson {
    truncation: usize,
    levels: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<u32>>>,
    degeneracies: Vec<Vec<Vec<u32>>>,
}

impl LevelwiseSimplicialSet {
    pub fn from_tables(
        levels: Vec<Vec<String>>,
        faces: Vec<Vec<Vec<u32>>>,
        degeneracies: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Invalid("no levels".into()));
        }
        let top = levels.len() - 1;
        if faces.len() != top + 1 || degeneracies.len() != top {
            return Err(Error::Invalid("face or degeneracy tables do not match the truncation".into()));
        }
        for (n, level) in levels.iter().enumerate() {
            let mut seen = HashSet::with_capacity(level.len());
            for code in level {
                if !seen.insert(code.as_str()) {
                    return Err(Error::Invalid(format!("code `{code}` repeated in level {n}")));
                }
            }
        }
        for n in 0..=top {
            let expect = if n == 0 { 0 } else { n + 1 };
            if faces[n].len() != expect {
                return Err(Error::Invalid(format!("level {n} needs {expect} face tables")));
            }
            for table in &faces[n] {
                check_table(table, levels[n].len(), levels[n - 1].len(), n)?;
            }
            if n < top {
                if degeneracies[n].len() != n + 1 {
                    return Err(Error::Invalid(format!("level {n} needs {} degeneracy tables", n + 1)));
                }
                for table in &degeneracies[n] {
                    check_table(table, levels[n].len(), levels[n + 1].len(), n)?;
                }
            }
        }
        Ok(LevelwiseSimplicialSet { levels, faces, degeneracies, index: OnceLock::new() })
    }

    /// Builds the tables by looking up codes: `face(n, i, x)` is the code of
    /// `d_i x` in level `n - 1`, and `degeneracy(n, i, x)` the code of `s_i x`
    /// in level `n + 1`.
    pub fn from_code_maps(
        levels: Vec<Vec<String>>,
        face: impl Fn(usize, usize, usize) -> String,
        degeneracy: impl Fn(usize, usize, usize) -> String,
    ) -> Result<Self> {
        let keys = levels.clone();
        Self::from_key_maps(levels, keys, face, degeneracy)
    }

    /// Like [`from_code_maps`](Self::from_code_maps), with lookups through
    /// `keys[n][x]`, a cheaper stand-in for the code of element `x`.
    pub fn from_key_maps<K: Hash + Ord>(
        levels: Vec<Vec<String>>,
        keys: Vec<Vec<K>>,
        face: impl Fn(usize, usize, usize) -> K,
        degeneracy: impl Fn(usize, usize, usize) -> K,
    ) -> Result<Self> {
        let top = levels.len().checked_sub(1).ok_or_else(|| Error::Invalid("no levels".into()))?;
        if keys.len() != levels.len() || keys.iter().zip(&levels).any(|(k, l)| k.len() != l.len()) {
            return Err(Error::Invalid("keys do not match the levels".into()));
        }
        // Sorted levels are searched directly; others get a hash index.
        let sorted: Vec<bool> = keys.iter().map(|l| l.windows(2).all(|w| w[0] < w[1])).collect();
        let index: Vec<HashMap<&K, u32>> = keys
            .iter()
            .zip(&sorted)
            .map(|(l, &s)| if s { HashMap::new() } else { l.iter().enumerate().map(|(x, k)| (k, x as u32)).collect() })
            .collect();
        let lookup = |n: usize, key: K, what: char, i: usize, x: usize| -> Result<u32> {
            let found = if sorted[n] {
                keys[n].binary_search(&key).ok().map(|y| y as u32)
            } else {
                index[n].get(&key).copied()
            };
            found.ok_or_else(|| Error::Invalid(format!("{what}_{i} of element {x} lands outside level {n}")))
        };
        let mut faces = vec![Vec::new()];
        let mut degeneracies = Vec::new();
        for n in 1..=top {
            let mut per_i = Vec::with_capacity(n + 1);
            for i in 0..=n {
                per_i.push(
                    (0..levels[n].len())
                        .map(|x| lookup(n - 1, face(n, i, x), 'd', i, x))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            faces.push(per_i);
        }
        for n in 0..top {
            let mut per_i = Vec::with_capacity(n + 1);
            for i in 0..=n {
                per_i.push(
                    (0..levels[n].len())
                        .map(|x| lookup(n + 1, degeneracy(n, i, x), 's', i, x))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            degeneracies.push(per_i);
        }
        drop(index);
        Self::from_tables(levels, faces, degeneracies)
    }

    /// Builds a simplicial set whose `n`-simplices are vertex sequences, with
    /// faces deleting and degeneracies repeating an entry. Each level must be
    /// closed under these operations.
    pub fn from_sequences(levels: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let code = |s: &[usize]| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".");
        let codes: Vec<Vec<String>> = levels.iter().map(|l| l.iter().map(|s| code(s)).collect()).collect();
        Self::from_code_maps(
            codes,
            |n, i, x| {
                let mut s = levels[n][x].clone();
                s.remove(i);
                code(&s)
            },
            |n, i, x| {
                let mut s = levels[n][x].clone();
                s.insert(i, s[i]);
                code(&s)
            },
        )
    }

    /// Nerve of a finite poset on `0..objects`, truncated at `truncation`.
    pub fn nerve_of_poset(objects: usize, leq: impl Fn(usize, usize) -> bool, truncation: usize) -> Self {
        let mut levels: Vec<Vec<Vec<usize>>> = vec![(0..objects).map(|a| vec![a]).collect()];
        for n in 1..=truncation {
            let mut next = Vec::new();
            for s in &levels[n - 1] {
                let last = *s.last().unwrap();
                for b in (0..objects).filter(|&b| leq(last, b)) {
                    let mut t = s.clone();
                    t.push(b);
                    next.push(t);
                }
            }
            levels.push(next);
        }
        Self::from_sequences(levels).expect("nerve levels are closed under faces and degeneracies")
    }

    /// The simplicial subset of the standard `m`-simplex generated by the
    /// faces listed in `generators`: monotone sequences whose entries all lie
    /// in one generator.
    pub fn simplex_subcomplex(m: usize, generators: &[Vec<usize>], truncation: usize) -> Self {
        let nerve = Self::nerve_of_poset(m + 1, |a, b| a <= b, truncation);
        let inside = |code: &str| {
            let vs: Vec<usize> = code.split('.').map(|t| t.parse().unwrap()).collect();
            generators.iter().any(|g| vs.iter().all(|v| g.contains(v)))
        };
        let levels: Vec<Vec<Vec<usize>>> = (0..=truncation)
            .map(|n| {
                nerve.levels[n]
                    .iter()
                    .filter(|c| inside(c))
                    .map(|c| c.split('.').map(|t| t.parse().unwrap()).collect())
                    .collect()
            })
            .collect();
        Self::from_sequences(levels).expect("generated subsets are closed")
    }

    /// The terminal simplicial set: one element in every level.
    pub fn point(truncation: usize) -> Self {
        Self::nerve_of_poset(1, |_, _| true, truncation)
    }

    pub fn truncation(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn len(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    pub fn level(&self, n: usize) -> &[String] {
        &self.levels[n]
    }

    pub fn code(&self, n: usize, x: u32) -> &str {
        &self.levels[n][x as usize]
    }

    pub fn id(&self, n: usize, code: &str) -> Option<u32> {
        let index = self.index.get_or_init(|| {
            self.levels.iter().map(|l| l.iter().enumerate().map(|(x, c)| (c.clone(), x as u32)).collect()).collect()
        });
        index.get(n)?.get(code).copied()
    }

    pub fn face(&self, n: usize, i: usize, x: u32) -> u32 {
        self.faces[n][i][x as usize]
    }

    pub fn degeneracy(&self, n: usize, i: usize, x: u32) -> u32 {
        self.degeneracies[n][i][x as usize]
    }

    pub fn face_table(&self, n: usize, i: usize) -> &[u32] {
        &self.faces[n][i]
    }

    pub fn degeneracy_table(&self, n: usize, i: usize) -> &[u32] {
        &self.degeneracies[n][i]
    }

    pub fn is_reduced(&self) -> bool {
        self.levels[0].len() == 1
    }

    /// Overwrites one entry of a face table. Intended for building examples
    /// by hand, including deliberately broken ones.
    pub fn set_face(&mut self, n: usize, i: usize, x: u32, y: u32) {
        self.faces[n][i][x as usize] = y;
    }

    /// Overwrites one entry of a degeneracy table.
    pub fn set_degeneracy(&mut self, n: usize, i: usize, x: u32, y: u32) {
        self.degeneracies[n][i][x as usize] = y;
    }

    /// The same data cut down to dimension `truncation`.
    pub fn truncated(&self, truncation: usize) -> Self {
        let t = truncation.min(self.truncation());
        LevelwiseSimplicialSet {
            levels: self.levels[..=t].to_vec(),
            faces: self.faces[..=t].to_vec(),
            degeneracies: self.degeneracies[..t].to_vec(),
            index: OnceLock::new(),
        }
    }

    /// The basepoint `s_0` of the unique vertex of a reduced set.
    pub fn basepoint(&self) -> Result<u32> {
        if !self.is_reduced() {
            return Err(Error::NotReduced(self.levels[0].len()));
        }
        if self.truncation() == 0 {
            return Err(Error::Truncation { have: 0, need: 1 });
        }
        Ok(self.degeneracy(0, 0, 0))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SimplicialJson {
            truncation: self.truncation(),
            levels: self.levels.clone(),
            faces: self.faces.clone(),
            degeneracies: self.degeneracies.clone(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: SimplicialJson = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        if j.levels.len() != j.truncation + 1 {
            return Err(Error::Invalid("truncation does not match the number of levels".into()));
        }
        Self::from_tables(j.levels, j.faces, j.degeneracies)
    }
}

fn check_table(table: &[u32], from: usize, to: usize, n: usize) -> Result<()> {
    if table.len() != from {
        return Err(Error::Invalid(format!("table at level {n} has {} entries, expected {from}", table.len())));
    }
    if let Some(&bad) = table.iter().find(|&&y| y as usize >= to) {
        return Err(Error::Invalid(format!("table at level {n} points to missing element {bad}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `d_i d_j = d_{j-1} d_i` for `i < j`.
    FaceFace,
    /// `d_i s_j = s_{j-1} d_i` for `i < j`.
    FaceDegeneracyBelow,
    /// `d_j s_j = d_{j+1} s_j = id`.
    FaceDegeneracyEqual,
    /// `d_i s_j = s_j d_{i-1}` for `i > j + 1`.
    FaceDegeneracyAbove,
    /// `s_i s_j = s_{j+1} s_i` for `i <= j`.
    DegeneracyDegeneracy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityViolation {
    pub identity: Identity,
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub element: u32,
}

/// Every simplicial identity that fits inside the truncation.
pub fn check_identities(x: &LevelwiseSimplicialSet) -> Vec<IdentityViolation> {
    let top = x.truncation();
    let mut out = Vec::new();
    let mut report = |identity, n, i, j, element| out.push(IdentityViolation { identity, n, i, j, element });
    for n in 2..=top {
        for j in 1..=n {
            for i in 0..j {
                for e in 0..x.len(n) as u32 {
                    if x.face(n - 1, i, x.face(n, j, e)) != x.face(n - 1, j - 1, x.face(n, i, e)) {
                        report(Identity::FaceFace, n, i, j, e);
                    }
                }
            }
        }
    }
    for n in 0..top {
        for j in 0..=n {
            for i in 0..=n + 1 {
                for e in 0..x.len(n) as u32 {
                    let lhs = x.face(n + 1, i, x.degeneracy(n, j, e));
                    let (rhs, kind) = if i < j {
                        (x.degeneracy(n - 1, j - 1, x.face(n, i, e)), Identity::FaceDegeneracyBelow)
                    } else if i == j || i == j + 1 {
                        (e, Identity::FaceDegeneracyEqual)
                    } else {
                        (x.degeneracy(n - 1, j, x.face(n, i - 1, e)), Identity::FaceDegeneracyAbove)
                    };
                    if lhs != rhs {
                        report(kind, n, i, j, e);
                    }
                }
            }
        }
    }
    for n in 0..top.saturating_sub(1) {
        for j in 0..=n {
            for i in 0..=j {
                for e in 0..x.len(n) as u32 {
                    let lhs = x.degeneracy(n + 1, i, x.degeneracy(n, j, e));
                    let rhs = x.degeneracy(n + 1, j + 1, x.degeneracy(n, i, e));
                    if lhs != rhs {
                        report(Identity::DegeneracyDegeneracy, n, i, j, e);
                    }
                }
            }
        }
    }
    out
}

/// The generalized face `level_n -> level_{|S|-1}` keeping the vertices in
/// `s`; the complement is deleted from the largest index down.
pub fn face_composite(x: &LevelwiseSimplicialSet, n: usize, s: &[usize]) -> Vec<u32> {
    assert!(!s.is_empty(), "face_composite needs at least one vertex");
    let mut ids: Vec<u32> = (0..x.len(n) as u32).collect();
    let mut dim = n;
    for j in (0..=n).rev() {
        if !s.contains(&j) {
            let table = x.face_table(dim, j);
            for e in ids.iter_mut() {
                *e = table[*e as usize];
            }
            dim -= 1;
        }
    }
    ids
}

/// Nondegenerate elements of level `n`.
pub fn nondegenerate(x: &LevelwiseSimplicialSet, n: usize) -> Vec<u32> {
    if n == 0 {
        return (0..x.len(0) as u32).collect();
    }
    let mut degenerate = vec![false; x.len(n)];
    for j in 0..n {
        for &y in x.degeneracy_table(n - 1, j) {
            degenerate[y as usize] = true;
        }
    }
    (0..x.len(n) as u32).filter(|&e| !degenerate[e as usize]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SegalMapReport {
    pub n: usize,
    /// `images[x]` lists the edges `∂_{k-1,k} x` for `k = 1..n`.
    pub images: Vec<Vec<u32>>,
    pub injective: bool,
    pub surjective: bool,
    pub collision: Option<(u32, u32)>,
    pub missing: Option<Vec<u32>>,
}

/// The Segal map `x -> (∂_{01} x, .., ∂_{n-1,n} x)` into the iterated fibre
/// product of level 1 over level 0.
pub fn segal_map(x: &LevelwiseSimplicialSet, n: usize) -> SegalMapReport {
    let edges: Vec<Vec<u32>> = (1..=n).map(|k| face_composite(x, n, &[k - 1, k])).collect();
    let images: Vec<Vec<u32>> = (0..x.len(n)).map(|e| edges.iter().map(|m| m[e]).collect()).collect();
    let mut seen: HashMap<&[u32], u32> = HashMap::new();
    let mut collision = None;
    for (e, img) in images.iter().enumerate() {
        if let Some(&first) = seen.get(img.as_slice()) {
            collision.get_or_insert((first, e as u32));
        } else {
            seen.insert(img, e as u32);
        }
    }
    let total = composable_count(x, n);
    let surjective = seen.len() as u128 == total;
    let missing = if surjective { None } else { first_missing_tuple(x, n, &seen) };
    SegalMapReport { n, injective: collision.is_none(), surjective, collision, missing, images }
}

fn edge_ends(x: &LevelwiseSimplicialSet) -> (Vec<u32>, Vec<u32>) {
    (x.face_table(1, 1).to_vec(), x.face_table(1, 0).to_vec())
}

fn composable_count(x: &LevelwiseSimplicialSet, n: usize) -> u128 {
    let (src, tgt) = edge_ends(x);
    let mut ways = vec![1u128; x.len(0)];
    for _ in 0..n {
        let mut next = vec![0u128; x.len(0)];
        for e in 0..x.len(1) {
            next[tgt[e] as usize] += ways[src[e] as usize];
        }
        ways = next;
    }
    ways.iter().sum()
}

fn first_missing_tuple(x: &LevelwiseSimplicialSet, n: usize, seen: &HashMap<&[u32], u32>) -> Option<Vec<u32>> {
    let (src, tgt) = edge_ends(x);
    let mut stack: Vec<Vec<u32>> = (0..x.len(1) as u32).rev().map(|e| vec![e]).collect();
    while let Some(t) = stack.pop() {
        if t.len() == n {
            if !seen.contains_key(t.as_slice()) {
                return Some(t);
            }
            continue;
        }
        let end = tgt[*t.last().unwrap() as usize];
        for e in (0..x.len(1) as u32).rev() {
            if src[e as usize] == end {
                let mut u = t.clone();
                u.push(e);
                stack.push(u);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PullbackDefect {
    NotCommuting { element: u32 },
    NotInjective { first: u32, second: u32 },
    NotSurjective { left: u32, right: u32 },
}

/// Whether `x -> (a x, b x)` is a bijection onto the fibre product of
/// `p: A -> C` and `q: B -> C`.
pub fn fibre_product_defect(a: &[u32], b: &[u32], p: &[u32], q: &[u32]) -> Option<PullbackDefect> {
    for (e, (&l, &r)) in a.iter().zip(b).enumerate() {
        if p[l as usize] != q[r as usize] {
            return Some(PullbackDefect::NotCommuting { element: e as u32 });
        }
    }
    let mut image: HashMap<(u32, u32), u32> = HashMap::with_capacity(a.len());
    for (e, (&l, &r)) in a.iter().zip(b).enumerate() {
        if let Some(&first) = image.get(&(l, r)) {
            return Some(PullbackDefect::NotInjective { first, second: e as u32 });
        }
        image.insert((l, r), e as u32);
    }
    let mut over: HashMap<u32, Vec<u32>> = HashMap::new();
    for (beta, &c) in q.iter().enumerate() {
        over.entry(c).or_default().push(beta as u32);
    }
    let size: usize = p.iter().map(|c| over.get(c).map_or(0, Vec::len)).sum();
    if size == a.len() {
        return None;
    }
    for (alpha, c) in p.iter().enumerate() {
        for &beta in over.get(c).into_iter().flatten() {
            if !image.contains_key(&(alpha as u32, beta)) {
                return Some(PullbackDefect::NotSurjective { left: alpha as u32, right: beta });
            }
        }
    }
    unreachable!("size mismatch without a missing pair")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackFailure {
    pub n: usize,
    pub i: usize,
    /// 1 for the square through the diagonal `{0, i+1}`, 2 for the one
    /// through `{i, n}`.
    pub square: u8,
    pub defect: PullbackDefect,
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    pub holds: bool,
    pub failures: Vec<PullbackFailure>,
}

/// 2-Segal condition through the two square families: for `3 <= n <=
/// n_max` and `0 < i < n-1`,
/// `X_n -> X_{0..i+1} x_{X_{0,i+1}} X_{0,i+1..n}` and
/// `X_n -> X_{0..i,n} x_{X_{i,n}} X_{i..n}` are bijections.
pub fn check_2segal_pullbacks(x: &LevelwiseSimplicialSet, n_max: usize) -> PullbackReport {
    let mut failures = Vec::new();
    for n in 3..=n_max.min(x.truncation()) {
        for i in 1..n - 1 {
            let left: Vec<usize> = (0..=i + 1).collect();
            let right: Vec<usize> = std::iter::once(0).chain(i + 1..=n).collect();
            let a = face_composite(x, n, &left);
            let b = face_composite(x, n, &right);
            let p = face_composite(x, i + 1, &[0, i + 1]);
            let q = face_composite(x, n - i, &[0, 1]);
            if let Some(defect) = fibre_product_defect(&a, &b, &p, &q) {
                failures.push(PullbackFailure { n, i, square: 1, defect });
            }
            let left: Vec<usize> = (0..=i).chain(std::iter::once(n)).collect();
            let right: Vec<usize> = (i..=n).collect();
            let a = face_composite(x, n, &left);
            let b = face_composite(x, n, &right);
            let p = face_composite(x, i + 1, &[i, i + 1]);
            let q = face_composite(x, n - i, &[0, n - i]);
            if let Some(defect) = fibre_product_defect(&a, &b, &p, &q) {
                failures.push(PullbackFailure { n, i, square: 2, defect });
            }
        }
    }
    PullbackReport { holds: failures.is_empty(), failures }
}

/// A triangulation of the polygon with vertices `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Triangulation {
    pub n: usize,
    pub triangles: Vec<[usize; 3]>,
}

/// All triangulations of the `(n+1)`-gon, by splitting off the triangle on
/// the edge `(0, n)`.
pub fn triangulations(n: usize) -> Vec<Triangulation> {
    assert!(n >= 2, "a polygon needs at least three vertices");
    split(0, n)
        .into_iter()
        .map(|mut triangles| {
            triangles.sort();
            Triangulation { n, triangles }
        })
        .collect()
}

fn split(lo: usize, hi: usize) -> Vec<Vec<[usize; 3]>> {
    if hi - lo < 2 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in lo + 1..hi {
        for left in split(lo, k) {
            for right in split(k, hi) {
                let mut t = vec![[lo, k, hi]];
                t.extend(left.iter().copied());
                t.extend(right.iter().copied());
                out.push(t);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangulationFailure {
    pub n: usize,
    pub triangles: Vec<[usize; 3]>,
    pub level_size: usize,
    pub families: usize,
    pub injective: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TriangulationReport {
    pub holds: bool,
    pub failures: Vec<TriangulationFailure>,
}

/// Compatible families of 2-simplices on the triangles of `t`, glued along
/// shared edges. Each family lists one element of level 2 per triangle, in
/// the order of `t.triangles`.
pub fn triangulation_families(x: &LevelwiseSimplicialSet, t: &Triangulation) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    Gluer::new(x).glue(t, &mut |chosen| out.push(chosen.to_vec()));
    out
}

/// Level-2 elements indexed by each of their faces.
struct Gluer<'a> {
    x: &'a LevelwiseSimplicialSet,
    by_face: [HashMap<u32, Vec<u32>>; 3],
    all: Vec<u32>,
}

struct GlueState<'t> {
    t: &'t Triangulation,
    order: Vec<usize>,
    /// Edge `(a, b)` of the polygon sits at `a * (n + 1) + b`.
    edges: Vec<Option<u32>>,
    chosen: Vec<u32>,
}

impl<'a> Gluer<'a> {
    fn new(x: &'a LevelwiseSimplicialSet) -> Self {
        let mut by_face: [HashMap<u32, Vec<u32>>; 3] = Default::default();
        for y in 0..x.len(2) as u32 {
            for (k, map) in by_face.iter_mut().enumerate() {
                map.entry(x.face(2, k, y)).or_default().push(y);
            }
        }
        Gluer { x, by_face, all: (0..x.len(2) as u32).collect() }
    }

    fn glue(&self, t: &Triangulation, visit: &mut dyn FnMut(&[u32])) {
        // Process triangles so that each one after the first shares an edge
        // with an earlier one.
        let mut order = vec![0usize];
        let mut placed = vec![false; t.triangles.len()];
        placed[0] = true;
        while order.len() < t.triangles.len() {
            let next = (0..t.triangles.len())
                .find(|&c| !placed[c] && order.iter().any(|&o| shared_edge(&t.triangles[o], &t.triangles[c])))
                .expect("triangulations are connected through edges");
            placed[next] = true;
            order.push(next);
        }
        let mut state =
            GlueState { t, order, edges: vec![None; (t.n + 1) * (t.n + 1)], chosen: vec![0; t.triangles.len()] };
        self.step(&mut state, 0, visit);
    }

    fn step(&self, s: &mut GlueState<'_>, depth: usize, visit: &mut dyn FnMut(&[u32])) {
        if depth == s.order.len() {
            visit(&s.chosen);
            return;
        }
        let w = s.t.n + 1;
        let sides = triangle_edges(&s.t.triangles[s.order[depth]]).map(|((a, b), k)| (a * w + b, k));
        let candidates: &[u32] = match sides.iter().find_map(|&(e, k)| s.edges[e].map(|v| (v, k))) {
            Some((v, k)) => self.by_face[k].get(&v).map_or(&[], Vec::as_slice),
            None => &self.all,
        };
        for &y in candidates {
            if sides.iter().all(|&(e, k)| s.edges[e].map_or(true, |v| v == self.x.face(2, k, y))) {
                let mut added = [usize::MAX; 3];
                for (slot, &(e, k)) in added.iter_mut().zip(&sides) {
                    if s.edges[e].is_none() {
                        s.edges[e] = Some(self.x.face(2, k, y));
                        *slot = e;
                    }
                }
                s.chosen[s.order[depth]] = y;
                self.step(s, depth + 1, visit);
                for e in added.into_iter().filter(|&e| e != usize::MAX) {
                    s.edges[e] = None;
                }
            }
        }
    }
}

fn shared_edge(a: &[usize; 3], b: &[usize; 3]) -> bool {
    a.iter().filter(|v| b.contains(v)).count() == 2
}

/// Edges of triangle `(a, b, c)` paired with the face index that yields them.
fn triangle_edges(t: &[usize; 3]) -> [((usize, usize), usize); 3] {
    let [a, b, c] = *t;
    [((b, c), 0), ((a, c), 1), ((a, b), 2)]
}

/// 2-Segal condition through every triangulation of every polygon with
/// `n + 1` vertices, `3 <= n <= n_max`.
pub fn check_2segal_triangulations(x: &LevelwiseSimplicialSet, n_max: usize) -> TriangulationReport {
    let mut failures = Vec::new();
    let gluer = Gluer::new(x);
    for n in 3..=n_max.min(x.truncation()) {
        for t in triangulations(n) {
            let mut families = 0usize;
            gluer.glue(&t, &mut |_| families += 1);
            let restrictions: Vec<Vec<u32>> = t.triangles.iter().map(|tri| face_composite(x, n, tri)).collect();
            let distinct: HashSet<Vec<u32>> =
                (0..x.len(n)).map(|e| restrictions.iter().map(|r| r[e]).collect()).collect();
            let injective = distinct.len() == x.len(n);
            if !injective || families != x.len(n) {
                failures.push(TriangulationFailure {
                    n,
                    triangles: t.triangles.clone(),
                    level_size: x.len(n),
                    families,
                    injective,
                });
            }
        }
    }
    TriangulationReport { holds: failures.is_empty(), failures }
}

/// A map of truncated simplicial sets, given level by level.
#[derive(Clone, Debug)]
pub struct SimplicialMap<'a> {
    pub source: &'a LevelwiseSimplicialSet,
    pub target: &'a LevelwiseSimplicialSet,
    pub components: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapViolation {
    pub n: usize,
    pub i: usize,
    pub face: bool,
    pub element: u32,
}

impl<'a> SimplicialMap<'a> {
    pub fn new(
        source: &'a LevelwiseSimplicialSet,
        target: &'a LevelwiseSimplicialSet,
        components: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if target.truncation() < source.truncation() || components.len() != source.truncation() + 1 {
            return Err(Error::Truncation { have: target.truncation(), need: source.truncation() });
        }
        for (n, c) in components.iter().enumerate() {
            check_table(c, source.len(n), target.len(n), n)?;
        }
        Ok(SimplicialMap { source, target, components })
    }

    pub fn identity(x: &'a LevelwiseSimplicialSet) -> Self {
        let components = (0..=x.truncation()).map(|n| (0..x.len(n) as u32).collect()).collect();
        SimplicialMap { source: x, target: x, components }
    }

    pub fn apply(&self, n: usize, x: u32) -> u32 {
        self.components[n][x as usize]
    }

    /// Squares with faces and degeneracies that fail to commute.
    pub fn validate(&self) -> Vec<MapViolation> {
        let (s, t) = (self.source, self.target);
        let mut out = Vec::new();
        for n in 0..=s.truncation() {
            for e in 0..s.len(n) as u32 {
                let fe = self.apply(n, e);
                if n > 0 {
                    for i in 0..=n {
                        if self.apply(n - 1, s.face(n, i, e)) != t.face(n, i, fe) {
                            out.push(MapViolation { n, i, face: true, element: e });
                        }
                    }
                }
                if n < s.truncation() {
                    for i in 0..=n {
                        if self.apply(n + 1, s.degeneracy(n, i, e)) != t.degeneracy(n, i, fe) {
                            out.push(MapViolation { n, i, face: false, element: e });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CulfFailure {
    pub n: usize,
    /// Element `H` of level 1 in the source.
    pub base: u32,
    pub source_fibre: usize,
    pub target_fibre: usize,
    /// An element of the target fibre outside the image.
    pub unmatched: Option<u32>,
    /// Two source elements of the fibre with the same image.
    pub collision: Option<(u32, u32)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CulfReport {
    pub holds: bool,
    pub failures: Vec<CulfFailure>,
}

/// `λ_n: X_n -> X_1`, with `λ_0 = s_0` and `λ_n` forgetting inner vertices.
fn long_edge(x: &LevelwiseSimplicialSet, n: usize) -> Vec<u32> {
    match n {
        0 => x.degeneracy_table(0, 0).to_vec(),
        _ => face_composite(x, n, &[0, n]),
    }
}

/// Reduced CULF criterion: for every `n <= n_max` (other than 1) and every
/// `H` in level 1, `F_n` restricts to a bijection `λ_n⁻¹(H) -> λ_n⁻¹(F H)`.
pub fn check_culf(f: &SimplicialMap<'_>, n_max: usize) -> CulfReport {
    let (s, t) = (f.source, f.target);
    let mut failures = Vec::new();
    for n in (0..=n_max.min(s.truncation())).filter(|&n| n != 1) {
        let ls = long_edge(s, n);
        let lt = long_edge(t, n);
        let mut src_fibres: Vec<Vec<u32>> = vec![Vec::new(); s.len(1)];
        for (e, &h) in ls.iter().enumerate() {
            src_fibres[h as usize].push(e as u32);
        }
        let mut tgt_fibres: Vec<Vec<u32>> = vec![Vec::new(); t.len(1)];
        for (e, &h) in lt.iter().enumerate() {
            tgt_fibres[h as usize].push(e as u32);
        }
        for h in 0..s.len(1) as u32 {
            let fh = f.apply(1, h);
            let src = &src_fibres[h as usize];
            let tgt = &tgt_fibres[fh as usize];
            let mut image: HashMap<u32, u32> = HashMap::new();
            let mut collision = None;
            for &e in src {
                if let Some(&first) = image.get(&f.apply(n, e)) {
                    collision.get_or_insert((first, e));
                }
                image.insert(f.apply(n, e), e);
            }
            let outside = image.keys().any(|y| lt[*y as usize] != fh);
            if collision.is_some() || outside || src.len() != tgt.len() {
                failures.push(CulfFailure {
                    n,
                    base: h,
                    source_fibre: src.len(),
                    target_fibre: tgt.len(),
                    unmatched: tgt.iter().copied().find(|y| !image.contains_key(y)),
                    collision,
                });
            }
        }
    }
    CulfReport { holds: failures.is_empty(), failures }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RelSegalDefect {
    /// Two source simplices with the same image and the same edges.
    NotInjective { first: u32, second: u32 },
    /// A target simplex together with source edges over its edges that no
    /// source simplex realizes.
    Missing { target: u32, edges: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelSegalFailure {
    pub n: usize,
    pub defect: RelSegalDefect,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelSegalReport {
    pub holds: bool,
    pub failures: Vec<RelSegalFailure>,
}

/// Whether the squares formed by `F` and the Segal maps are pullbacks for
/// `2 <= n <= n_max`.
pub fn check_relatively_segal(f: &SimplicialMap<'_>, n_max: usize) -> RelSegalReport {
    let (s, t) = (f.source, f.target);
    let mut failures = Vec::new();
    let (src_of, tgt_of) = edge_ends(s);
    let mut preimage: Vec<Vec<u32>> = vec![Vec::new(); t.len(1)];
    for e in 0..s.len(1) as u32 {
        preimage[f.apply(1, e) as usize].push(e);
    }
    for n in 2..=n_max.min(s.truncation()) {
        let sx = segal_map(s, n).images;
        let ty = segal_map(t, n).images;
        let mut image: HashMap<(u32, &[u32]), u32> = HashMap::new();
        let mut defect = None;
        for (e, edges) in sx.iter().enumerate() {
            if let Some(&first) = image.get(&(f.apply(n, e as u32), edges.as_slice())) {
                defect = Some(RelSegalDefect::NotInjective { first, second: e as u32 });
                break;
            }
            image.insert((f.apply(n, e as u32), edges.as_slice()), e as u32);
        }
        if defect.is_none() {
            let mut size = 0u128;
            for over in &ty {
                size += lifts(over, &preimage, &src_of, &tgt_of, s.len(0));
            }
            if size != s.len(n) as u128 {
                defect = (0..t.len(n) as u32).find_map(|y| {
                    first_unrealized(&ty[y as usize], &preimage, &src_of, &tgt_of, |edges| {
                        image.contains_key(&(y, edges))
                    })
                    .map(|edges| RelSegalDefect::Missing { target: y, edges })
                });
            }
        }
        if let Some(defect) = defect {
            failures.push(RelSegalFailure { n, defect });
        }
    }
    RelSegalReport { holds: failures.is_empty(), failures }
}

/// Number of composable source edge strings lying over `over`.
fn lifts(over: &[u32], preimage: &[Vec<u32>], src: &[u32], tgt: &[u32], vertices: usize) -> u128 {
    let mut ways: Option<Vec<u128>> = None;
    for &y in over {
        let mut next = vec![0u128; vertices];
        for &e in &preimage[y as usize] {
            let w = match &ways {
                None => 1,
                Some(ws) => ws[src[e as usize] as usize],
            };
            next[tgt[e as usize] as usize] += w;
        }
        ways = Some(next);
    }
    ways.map_or(1, |w| w.iter().sum())
}

fn first_unrealized(
    over: &[u32],
    preimage: &[Vec<u32>],
    src: &[u32],
    tgt: &[u32],
    realized: impl Fn(&[u32]) -> bool,
) -> Option<Vec<u32>> {
    let mut stack: Vec<Vec<u32>> = vec![Vec::new()];
    while let Some(t) = stack.pop() {
        if t.len() == over.len() {
            if !realized(&t) {
                return Some(t);
            }
            continue;
        }
        for &e in &preimage[over[t.len()] as usize] {
            if t.last().map_or(true, |&l| tgt[l as usize] == src[e as usize]) {
                let mut u = t.clone();
                u.push(e);
                stack.push(u);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_poset(k: usize, n: usize) -> LevelwiseSimplicialSet {
        LevelwiseSimplicialSet::nerve_of_poset(k, |a, b| a <= b, n)
    }

    #[test]
    fn point_has_no_violations() {
        let p = LevelwiseSimplicialSet::point(5);
        assert!(check_identities(&p).is_empty());
        assert!((0..=5).all(|n| p.len(n) == 1));
        assert!(check_2segal_pullbacks(&p, 5).holds);
    }

    #[test]
    fn corrupted_face_is_reported() {
        let mut x = chain_poset(3, 3);
        assert!(check_identities(&x).is_empty());
        let wrong = (x.face(2, 0, 0) + 1) % x.len(1) as u32;
        x.set_face(2, 0, 0, wrong);
        let v = check_identities(&x);
        assert!(!v.is_empty());
        assert!(v.iter().any(|w| w.n >= 2));
    }

    #[test]
    fn face_composite_basics() {
        let x = chain_poset(3, 4);
        let id: Vec<u32> = (0..x.len(3) as u32).collect();
        assert_eq!(face_composite(&x, 3, &[0, 1, 2, 3]), id);
        assert_eq!(face_composite(&x, 2, &[0, 2]), x.face_table(2, 1).to_vec());
        let d2d3: Vec<u32> = (0..x.len(3) as u32).map(|e| x.face(2, 2, x.face(3, 3, e))).collect();
        assert_eq!(face_composite(&x, 3, &[0, 1]), d2d3);
    }

    #[test]
    fn nerve_is_segal() {
        let x = LevelwiseSimplicialSet::nerve_of_poset(3, |a, b| a == b || (a == 0 && b > 0), 5);
        for n in 2..=5 {
            let r = segal_map(&x, n);
            assert!(r.injective && r.surjective);
        }
        assert!(check_2segal_pullbacks(&x, 5).holds);
        assert!(check_2segal_triangulations(&x, 5).holds);
    }

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (2..=6).map(|n| triangulations(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42]);
        let square = triangulations(3);
        assert_eq!(square[0].triangles, vec![[0, 1, 3], [1, 2, 3]]);
        assert_eq!(square[1].triangles, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn two_triangles_are_not_two_segal() {
        let x = LevelwiseSimplicialSet::simplex_subcomplex(3, &[vec![0, 1, 2], vec![0, 2, 3]], 4);
        assert!(check_identities(&x).is_empty());
        let p = check_2segal_pullbacks(&x, 4);
        let t = check_2segal_triangulations(&x, 4);
        assert!(!p.holds);
        assert!(!t.holds);
    }

    #[test]
    fn json_round_trip() {
        let x = chain_poset(2, 3);
        let y = LevelwiseSimplicialSet::from_json(&x.to_json()).unwrap();
        assert_eq!(x, y);
        assert!(x.to_json().starts_with("{\"truncation\":3,\"levels\":"));
    }

    #[test]
    fn identity_map_is_culf_and_relatively_segal() {
        let x = chain_poset(3, 4);
        let id = SimplicialMap::identity(&x);
        assert!(id.validate().is_empty());
        assert!(check_culf(&id, 4).holds);
        assert!(check_relatively_segal(&id, 4).holds);
    }

    #[test]
    fn nondegenerate_of_nerve() {
        let x = chain_poset(3, 4);
        assert_eq!(nondegenerate(&x, 0).len(), 3);
        assert_eq!(nondegenerate(&x, 1).len(), 3);
        assert_eq!(nondegenerate(&x, 2).len(), 1);
        assert_eq!(nondegenerate(&x, 3).len(), 0);
    }
}
