//! Whitehead moves on Gauss-graphs and the degeneration poset they generate.
//!
//! A move is a ghost morphism followed by a contraction. Only contracting
//! moves are generated; expanding moves are the reversed poset edges.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{CanonicalCode, EdgeColor, GaussGraph, HalfEdgeId, Port, VertexKind};

pub const DEFAULT_POSET_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Case1,
    Case2,
    Case3,
}

impl MoveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::Case1 => "case1",
            MoveKind::Case2 => "case2",
            MoveKind::Case3 => "case3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "case1" => Ok(MoveKind::Case1),
            "case2" => Ok(MoveKind::Case2),
            "case3" => Ok(MoveKind::Case3),
            _ => Err(Error::Parse(format!("unknown move kind {s:?}"))),
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A contracting move on a specific graph (vertex ids refer to that graph).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MoveDescriptor {
    /// Pinch `k >= 2` same-colored edges bounding `face` into one critical
    /// vertex. Edges are `(u, w)` with the face on the left, in walk order.
    Case1 {
        face: usize,
        edges: Vec<(usize, usize)>,
        color: EdgeColor,
    },
    /// Contract the edge between two critical vertices of one color.
    Case2 { edge: (usize, usize) },
    /// Merge roots. Roots of one tree are absorbed along the subtree spanning
    /// them (which may contain only critical vertices); the resulting vertices
    /// of distinct trees are merged across `face`, which all of them bound.
    Case3 { face: Option<usize>, roots: Vec<usize> },
}

impl MoveDescriptor {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveDescriptor::Case1 { .. } => MoveKind::Case1,
            MoveDescriptor::Case2 { .. } => MoveKind::Case2,
            MoveDescriptor::Case3 { .. } => MoveKind::Case3,
        }
    }
}

/// Mutable rotation system with tombstones.
struct Surgery {
    n: usize,
    kinds: Vec<Option<VertexKind>>,
    rot: Vec<Vec<Port>>,
    /// Vertex each removed vertex was merged into.
    fate: Vec<usize>,
}

impl Surgery {
    fn new(g: &GaussGraph) -> Self {
        Surgery {
            n: g.n(),
            kinds: g.kinds().iter().copied().map(Some).collect(),
            rot: g.rotations().to_vec(),
            fate: (0..g.vertex_count()).collect(),
        }
    }

    fn push(&mut self, kind: VertexKind, rot: Vec<Port>) -> usize {
        let id = self.kinds.len();
        self.kinds.push(Some(kind));
        self.rot.push(rot);
        self.fate.push(id);
        id
    }

    fn repoint(&mut self, at: usize, from: usize, to: usize) {
        for p in &mut self.rot[at] {
            if p.to == from {
                p.to = to;
            }
        }
    }

    /// Contracts edge `u - v` into `u`.
    fn contract(&mut self, u: usize, v: usize) {
        let ru = &self.rot[u];
        let rv = &self.rot[v];
        let iu = ru.iter().position(|p| p.to == v).unwrap();
        let iv = rv.iter().position(|p| p.to == u).unwrap();
        let mut merged: Vec<Port> = Vec::with_capacity(ru.len() + rv.len() - 2);
        merged.extend((1..ru.len()).map(|k| ru[(iu + k) % ru.len()]));
        merged.extend((1..rv.len()).map(|k| rv[(iv + k) % rv.len()]));
        for p in &merged {
            if p.to != u && p.to != v {
                let w = p.to;
                self.repoint(w, v, u);
            }
        }
        self.rot[u] = merged;
        self.rot[v].clear();
        self.kinds[v] = None;
        self.fate[v] = u;
    }

    /// Adds a vertex whose rotation is the concatenation of `segments`; each
    /// `(vertex, position)` contributes that vertex's rotation starting just
    /// after `position` and ending at it. The listed vertices are removed.
    fn ghost_merge(&mut self, segments: &[(usize, usize)], kind: VertexKind) -> usize {
        let id = self.kinds.len();
        let mut merged = Vec::new();
        for &(v, a) in segments {
            let r = &self.rot[v];
            merged.extend((1..=r.len()).map(|k| r[(a + k) % r.len()]));
        }
        let group: Vec<usize> = segments.iter().map(|s| s.0).collect();
        for p in &merged {
            for &v in &group {
                self.repoint(p.to, v, id);
            }
        }
        for &v in &group {
            self.rot[v].clear();
            self.kinds[v] = None;
            self.fate[v] = id;
        }
        self.push(kind, merged)
    }

    /// The new graph and, for every original vertex, the vertex it ended up in.
    fn finish(self) -> Result<(GaussGraph, Vec<usize>)> {
        let mut new_id = vec![usize::MAX; self.kinds.len()];
        let mut kinds = Vec::new();
        for (v, k) in self.kinds.iter().enumerate() {
            if let Some(k) = k {
                new_id[v] = kinds.len();
                kinds.push(*k);
            }
        }
        let rot = self
            .rot
            .into_iter()
            .zip(&self.kinds)
            .filter(|(_, k)| k.is_some())
            .map(|(r, _)| {
                r.into_iter()
                    .map(|p| Port {
                        to: new_id[p.to],
                        color: p.color,
                    })
                    .collect()
            })
            .collect();
        let trace: Vec<usize> = (0..self.fate.len())
            .map(|mut v| {
                while self.fate[v] != v {
                    v = self.fate[v];
                }
                new_id[v]
            })
            .collect();
        Ok((GaussGraph::from_parts(self.n, kinds, rot)?, trace))
    }
}

fn with_faces(g: &GaussGraph) -> Result<GaussGraph> {
    if g.faces().is_some() {
        Ok(g.clone())
    } else {
        g.clone().with_faces()
    }
}

fn is_leaf(g: &GaussGraph, v: usize) -> bool {
    matches!(g.kind(v), VertexKind::Leaf { .. })
}

/// Every applicable contracting move of `g`.
pub fn enumerate_moves(g: &GaussGraph) -> Vec<MoveDescriptor> {
    let Ok(g) = with_faces(g) else {
        return Vec::new();
    };
    let candidates = candidate_moves(&g);
    let mut seen = BTreeSet::new();
    candidates
        .into_iter()
        .filter(|d| apply_contract(&g, d).is_ok())
        .filter(|d| seen.insert(format!("{d:?}")))
        .collect()
}

fn candidate_moves(g: &GaussGraph) -> Vec<MoveDescriptor> {
    let table = g.faces().expect("faces computed");
    let he = g.half_edges();
    let (tree, _) = g.components();
    let mut out = Vec::new();

    for (fid, face) in table.faces.iter().enumerate() {
        for color in [EdgeColor::Red, EdgeColor::Blue] {
            let edges: Vec<HalfEdgeId> = face
                .walk
                .iter()
                .copied()
                .filter(|&h| he.color[h] == color)
                .collect();
            for subset in subsets_min2(edges.len()) {
                let chosen: Vec<HalfEdgeId> = subset.iter().map(|&i| edges[i]).collect();
                let trees: BTreeSet<usize> = chosen.iter().map(|&h| tree[he.origin[h]]).collect();
                if trees.len() != chosen.len() || 2 * chosen.len() > 2 * g.n() {
                    continue;
                }
                out.push(MoveDescriptor::Case1 {
                    face: fid,
                    edges: chosen.iter().map(|&h| (he.origin[h], he.target[h])).collect(),
                    color,
                });
            }
        }

    }

    let roots: Vec<usize> = g.roots().map(|(v, _)| v).collect();
    for subset in subsets_min2(roots.len()) {
        let chosen: Vec<usize> = subset.iter().map(|&i| roots[i]).collect();
        let trees: BTreeSet<usize> = chosen.iter().map(|&r| tree[r]).collect();
        if trees.len() == 1 {
            out.push(MoveDescriptor::Case3 { face: None, roots: chosen });
            continue;
        }
        let Ok(span) = spanning_subtrees(g, &chosen) else {
            continue;
        };
        for (fid, face) in table.faces.iter().enumerate() {
            let touching: BTreeSet<usize> = face
                .walk
                .iter()
                .map(|&h| he.origin[h])
                .filter(|v| span.contains(v))
                .map(|v| tree[v])
                .collect();
            if touching == trees {
                out.push(MoveDescriptor::Case3 {
                    face: Some(fid),
                    roots: chosen.clone(),
                });
            }
        }
    }

    for h in 0..he.len() {
        let (u, v) = (he.origin[h], he.target[h]);
        if u < v
            && matches!(g.kind(u), VertexKind::Crit)
            && matches!(g.kind(v), VertexKind::Crit)
            && g.crit_color(u) == g.crit_color(v)
        {
            out.push(MoveDescriptor::Case2 { edge: (u, v) });
        }
    }
    out
}

/// Index subsets of size at least two, in lexicographic order.
fn subsets_min2(len: usize) -> Vec<Vec<usize>> {
    if len >= usize::BITS as usize - 1 {
        return Vec::new();
    }
    (0u64..(1 << len))
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..len).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Applies a contracting move; the result is validated.
pub fn apply_contract(g: &GaussGraph, d: &MoveDescriptor) -> Result<GaussGraph> {
    apply_contract_traced(g, d).map(|(g, _)| g)
}

/// As [`apply_contract`], also mapping each vertex of `g` to the vertex of
/// the result it was merged into.
pub fn apply_contract_traced(g: &GaussGraph, d: &MoveDescriptor) -> Result<(GaussGraph, Vec<usize>)> {
    let g = with_faces(g)?;
    let (raw, trace) = match d {
        MoveDescriptor::Case1 { face, edges, color } => case1(&g, *face, edges, *color)?,
        MoveDescriptor::Case2 { edge } => case2(&g, *edge)?,
        MoveDescriptor::Case3 { face, roots } => case3(&g, *face, roots)?,
    };
    let result = raw
        .with_faces()
        .map_err(|e| Error::RefusedMove(format!("result has no consistent coloring: {e}")))?;
    let report = result.validate();
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::RefusedMove(list.join("; ")));
    }
    if result.codim() <= g.codim() && d.kind() != MoveKind::Case2 {
        return Err(Error::RefusedMove("move does not increase codimension".into()));
    }
    Ok((result, trace))
}

fn face_walk(g: &GaussGraph, face: usize) -> Result<&[HalfEdgeId]> {
    g.faces()
        .and_then(|t| t.faces.get(face))
        .map(|f| f.walk.as_slice())
        .ok_or_else(|| Error::RefusedMove(format!("no face {face}")))
}

fn case1(g: &GaussGraph, face: usize, edges: &[(usize, usize)], color: EdgeColor) -> Result<(GaussGraph, Vec<usize>)> {
    if edges.len() < 2 {
        return Err(Error::RefusedMove("case1 needs at least two edges".into()));
    }
    let walk = face_walk(g, face)?;
    let he = g.half_edges();
    // walk order of the chosen edges
    let mut located: Vec<(usize, (usize, usize))> = Vec::new();
    for &(u, w) in edges {
        let pos = walk
            .iter()
            .position(|&h| he.origin[h] == u && he.target[h] == w)
            .ok_or_else(|| Error::RefusedMove(format!("edge {u}-{w} does not bound face {face}")))?;
        if he.color[walk[pos]] != color {
            return Err(Error::RefusedMove(format!("edge {u}-{w} is not {color:?}")));
        }
        located.push((pos, (u, w)));
    }
    located.sort_unstable();
    let (tree, _) = g.components();
    let trees: BTreeSet<usize> = located.iter().map(|(_, (u, _))| tree[*u]).collect();
    if trees.len() != located.len() {
        return Err(Error::RefusedMove("case1 edges must come from distinct trees".into()));
    }
    if edges.len() > g.n() {
        return Err(Error::RefusedMove(format!(
            "critical valency {} exceeds 2n = {}",
            2 * edges.len(),
            2 * g.n()
        )));
    }
    let mut s = Surgery::new(g);
    let x = s.kinds.len();
    let mut rot = Vec::new();
    for &(_, (u, w)) in &located {
        rot.push(Port { to: u, color });
        rot.push(Port { to: w, color });
        s.repoint(u, w, x);
        s.repoint(w, u, x);
    }
    s.push(VertexKind::Crit, rot);
    s.finish()
}

fn case2(g: &GaussGraph, (u, v): (usize, usize)) -> Result<(GaussGraph, Vec<usize>)> {
    let same = matches!(g.kind(u), VertexKind::Crit)
        && matches!(g.kind(v), VertexKind::Crit)
        && g.crit_color(u) == g.crit_color(v)
        && g.rotation(u).iter().any(|p| p.to == v);
    if !same {
        return Err(Error::RefusedMove(format!("{u}-{v} is not an edge between like critical vertices")));
    }
    let merged = g.valency(u) + g.valency(v) - 2;
    if merged > 2 * g.n() {
        return Err(Error::RefusedMove(format!(
            "critical valency {merged} exceeds 2n = {}",
            2 * g.n()
        )));
    }
    let mut s = Surgery::new(g);
    s.contract(u, v);
    s.finish()
}

/// Vertices of the subtrees spanning the given roots within their trees.
/// Fails when such a subtree passes through a root that was not chosen.
fn spanning_subtrees(g: &GaussGraph, roots: &[usize]) -> Result<BTreeSet<usize>> {
    let (tree, _) = g.components();
    let mut span: BTreeSet<usize> = roots.iter().copied().collect();
    for (i, &r) in roots.iter().enumerate() {
        // BFS parents from r, then walk back from later roots of the same tree
        let mut parent = vec![usize::MAX; g.vertex_count()];
        parent[r] = r;
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            for p in g.rotation(v) {
                if parent[p.to] == usize::MAX {
                    parent[p.to] = v;
                    queue.push_back(p.to);
                }
            }
        }
        for &q in &roots[i + 1..] {
            if tree[q] != tree[r] {
                continue;
            }
            let mut v = parent[q];
            while v != r {
                match g.kind(v) {
                    VertexKind::Crit => {}
                    VertexKind::Root { .. } if roots.contains(&v) => {}
                    _ => {
                        return Err(Error::RefusedMove(format!(
                            "vertex {v} lies between roots {r} and {q}"
                        )))
                    }
                }
                span.insert(v);
                v = parent[v];
            }
        }
    }
    Ok(span)
}

fn case3(g: &GaussGraph, face: Option<usize>, roots: &[usize]) -> Result<(GaussGraph, Vec<usize>)> {
    if roots.len() < 2 {
        return Err(Error::RefusedMove("case3 needs at least two roots".into()));
    }
    let distinct: BTreeSet<usize> = roots.iter().copied().collect();
    if distinct.len() != roots.len() {
        return Err(Error::RefusedMove("repeated root".into()));
    }
    let mut mult = 0;
    for &r in roots {
        match g.kind(r) {
            VertexKind::Root { mult: m } => mult += m,
            _ => return Err(Error::RefusedMove(format!("vertex {r} is not a root"))),
        }
    }
    let span = spanning_subtrees(g, roots)?;
    let (tree, _) = g.components();
    let trees: BTreeSet<usize> = roots.iter().map(|&r| tree[r]).collect();

    // a leaf half-edge of the merge face survives every contraction
    let he = g.half_edges();
    let marker_leaf = match (trees.len(), face) {
        (1, _) => None,
        (_, None) => return Err(Error::RefusedMove("roots of distinct trees need a face".into())),
        (_, Some(f)) => {
            let walk = face_walk(g, f)?;
            let touching: BTreeSet<usize> = walk
                .iter()
                .map(|&h| he.origin[h])
                .filter(|v| span.contains(v))
                .map(|v| tree[v])
                .collect();
            if touching != trees {
                return Err(Error::RefusedMove(format!("roots do not all bound face {f}")));
            }
            walk.iter().map(|&h| he.origin[h]).find(|&v| is_leaf(g, v))
        }
    };

    let mut s = Surgery::new(g);
    let mut rep: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(rep: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while rep[r] != r {
            r = rep[r];
        }
        rep[v] = r;
        r
    }
    for &u in &span {
        for p in g.rotation(u) {
            let v = p.to;
            if u < v && span.contains(&v) {
                let (ru, rv) = (find(&mut rep, u), find(&mut rep, v));
                s.contract(ru, rv);
                rep[rv] = ru;
            }
        }
    }
    let mut groups: Vec<usize> = roots.iter().map(|&r| find(&mut rep, r)).collect();
    groups.sort_unstable();
    groups.dedup();
    for &r in &groups {
        s.kinds[r] = Some(VertexKind::Root { mult });
    }
    let (mut contracted, first) = s.finish()?;
    let Some(marker_leaf) = marker_leaf else {
        return Ok((contracted, first));
    };
    // ids shift on compaction
    let alive: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| find(&mut rep, v) == v)
        .collect();
    let compact = |v: usize| alive.binary_search(&v).unwrap();
    let groups: Vec<usize> = groups.into_iter().map(compact).collect();
    let marker = compact(marker_leaf);
    contracted
        .compute_faces()
        .map_err(|e| Error::RefusedMove(e.to_string()))?;
    let he2 = contracted.half_edges();
    let table = contracted.faces().unwrap();
    let f2 = table.face_of[he2.at(marker, 0)];
    let segs: Vec<(usize, usize)> = table.faces[f2]
        .walk
        .iter()
        .filter(|&&h| groups.contains(&he2.origin[h]))
        .map(|&h| (he2.origin[h], he2.position(h)))
        .collect();
    if segs.len() != groups.len() {
        return Err(Error::RefusedMove("roots do not share a face after absorption".into()));
    }
    let mut s2 = Surgery::new(&contracted);
    s2.ghost_merge(&segs, VertexKind::Root { mult });
    let (g2, second) = s2.finish()?;
    Ok((g2, first.into_iter().map(|v| second[v]).collect()))
}

/// Graph with `4n` leaves and one root of multiplicity `n`.
pub fn star(n: usize) -> GaussGraph {
    let mut kinds = vec![VertexKind::Root { mult: n }];
    let mut rot = vec![Vec::new()];
    for slot in 0..4 * n {
        let color = EdgeColor::of_slot(slot);
        kinds.push(VertexKind::Leaf { slot });
        rot.push(vec![Port { to: 0, color }]);
        rot[0].push(Port { to: slot + 1, color });
    }
    GaussGraph::from_parts(n, kinds, rot).expect("star is well formed")
}

pub fn maximal_element(n: usize) -> CanonicalCode {
    star(n).canonical_code()
}

/// Non-crossing perfect matchings of `points` (in cyclic order).
pub fn noncrossing_matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let first = points[0];
    let mut out = Vec::new();
    // partner at odd offset keeps both sides even
    for k in (1..points.len()).step_by(2) {
        let inner = &points[1..k];
        let outer = &points[k + 1..];
        for a in noncrossing_matchings(inner) {
            for b in noncrossing_matchings(outer) {
                let mut m = vec![(first, points[k])];
                m.extend(a.iter().copied());
                m.extend(b.iter().copied());
                out.push(m);
            }
        }
    }
    out
}

/// Chords `(a, b)` and `(c, d)` cross when exactly one of `c, d` lies strictly between `a` and `b`.
pub fn chords_interleave((a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let (lo, hi) = (a.min(b), a.max(b));
    let inside = |x: usize| lo < x && x < hi;
    inside(c) != inside(d)
}

/// Forest of X-trees from interleaved red/blue chord pairs.
pub fn generic_graph(n: usize, pairs: &[((usize, usize), (usize, usize))]) -> Result<GaussGraph> {
    let mut kinds = Vec::new();
    let mut rot = Vec::new();
    for _ in pairs {
        kinds.push(VertexKind::Root { mult: 1 });
        rot.push(Vec::new());
    }
    let leaf0 = kinds.len();
    for slot in 0..4 * n {
        kinds.push(VertexKind::Leaf { slot });
        rot.push(Vec::new());
    }
    for (r, &((a, b), (c, d))) in pairs.iter().enumerate() {
        let mut slots = [a, b, c, d];
        slots.sort_unstable();
        for s in slots {
            let color = EdgeColor::of_slot(s);
            rot[r].push(Port { to: leaf0 + s, color });
            rot[leaf0 + s].push(Port { to: r, color });
        }
    }
    GaussGraph::from_parts(n, kinds, rot)?.with_faces()
}

/// Codes of all generic strata: forests of `n` X-trees.
pub fn enumerate_generic(n: usize) -> BTreeSet<CanonicalCode> {
    let blue: Vec<usize> = (0..2 * n).map(|i| 2 * i + 1).collect();
    let red: Vec<usize> = (0..2 * n).map(|i| 2 * i).collect();
    let blue_m = noncrossing_matchings(&blue);
    let red_m = noncrossing_matchings(&red);
    let mut out = BTreeSet::new();
    for rm in &red_m {
        for bm in &blue_m {
            let mut pairs = Vec::new();
            let bijective = rm.iter().all(|&rc| {
                let hits: Vec<_> = bm.iter().filter(|&&bc| chords_interleave(rc, bc)).collect();
                if hits.len() == 1 {
                    pairs.push((rc, *hits[0]));
                    true
                } else {
                    false
                }
            }) && bm
                .iter()
                .all(|&bc| rm.iter().filter(|&&rc| chords_interleave(rc, bc)).count() == 1);
            if !bijective {
                continue;
            }
            if let Ok(g) = generic_graph(n, &pairs) {
                if g.validate().is_valid() {
                    out.insert(g.canonical_code());
                }
            }
        }
    }
    out
}

/// A move edge `child ≺ parent` with the move that realizes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub child: CanonicalCode,
    pub parent: CanonicalCode,
    pub kind: MoveKind,
    pub witness: MoveDescriptor,
}

#[derive(Clone, Debug)]
pub struct Poset {
    pub n: usize,
    pub nodes: BTreeSet<CanonicalCode>,
    pub covers: Vec<Cover>,
    pub maximal: CanonicalCode,
    parents: BTreeMap<CanonicalCode, BTreeMap<CanonicalCode, BTreeSet<MoveKind>>>,
}

impl Poset {
    /// More degenerate neighbors with the move kinds leading there.
    pub fn parents(&self, code: &CanonicalCode) -> Vec<(CanonicalCode, Vec<MoveKind>)> {
        self.parents
            .get(code)
            .map(|m| {
                m.iter()
                    .map(|(p, k)| (p.clone(), k.iter().copied().collect()))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Less degenerate neighbors.
    pub fn children(&self, code: &CanonicalCode) -> Vec<(CanonicalCode, Vec<MoveKind>)> {
        let mut out: BTreeMap<CanonicalCode, BTreeSet<MoveKind>> = BTreeMap::new();
        for c in &self.covers {
            if &c.parent == code {
                out.entry(c.child.clone()).or_default().insert(c.kind);
            }
        }
        out.into_iter().map(|(c, k)| (c, k.into_iter().collect())).collect()
    }

    /// `a ≼ b`: `b` is reachable from `a` by contracting moves.
    pub fn leq(&self, a: &CanonicalCode, b: &CanonicalCode) -> bool {
        if a == b {
            return self.nodes.contains(a);
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([a.clone()]);
        while let Some(c) = queue.pop_front() {
            for (p, _) in self.parents(&c) {
                if &p == b {
                    return true;
                }
                if seen.insert(p.clone()) {
                    queue.push_back(p);
                }
            }
        }
        false
    }

    /// Nodes without parents.
    pub fn maximal_nodes(&self) -> Vec<CanonicalCode> {
        self.nodes
            .iter()
            .filter(|c| self.parents.get(*c).is_none_or(|m| m.is_empty()))
            .cloned()
            .collect()
    }

    pub fn minimal_nodes(&self) -> Vec<CanonicalCode> {
        let with_children: BTreeSet<&CanonicalCode> = self.covers.iter().map(|c| &c.parent).collect();
        self.nodes
            .iter()
            .filter(|c| !with_children.contains(c))
            .cloned()
            .collect()
    }

    /// Catalog text: `code TAB parents TAB kinds` per node, sorted by code.
    /// Parents are comma separated; kinds align with parents, `+` joining
    /// several kinds for one parent.
    pub fn catalog(&self) -> String {
        let mut out = String::new();
        for code in &self.nodes {
            let ps = self.parents(code);
            let parents: Vec<&str> = ps.iter().map(|(p, _)| p.as_str()).collect();
            let kinds: Vec<String> = ps
                .iter()
                .map(|(_, k)| k.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("+"))
                .collect();
            out.push_str(&format!("{}\t{}\t{}\n", code, parents.join(","), kinds.join(",")));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub code: CanonicalCode,
    pub parents: Vec<(CanonicalCode, Vec<MoveKind>)>,
}

pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("catalog line needs 3 columns: {line:?}")));
            }
            let split = |s: &str| -> Vec<String> {
                if s.is_empty() {
                    Vec::new()
                } else {
                    s.split(',').map(str::to_owned).collect()
                }
            };
            let parents = split(cols[1]);
            let kinds = split(cols[2]);
            if parents.len() != kinds.len() {
                return Err(Error::Parse(format!("parents and kinds differ in {line:?}")));
            }
            let parents = parents
                .into_iter()
                .zip(kinds)
                .map(|(p, k)| {
                    let ks = k.split('+').map(MoveKind::parse).collect::<Result<Vec<_>>>()?;
                    Ok((CanonicalCode(p), ks))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(CatalogEntry {
                code: CanonicalCode(cols[0].to_owned()),
                parents,
            })
        })
        .collect()
}

/// Upper estimate of the number of generic strata: `Catalan(n)^2`.
pub fn generic_estimate(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c.saturating_mul(2 * (2 * k + 1)) / (k + 2);
    }
    c.saturating_mul(c)
}

pub fn build_poset(n: usize) -> Result<Poset> {
    build_poset_with_cap(n, DEFAULT_POSET_CAP)
}

/// Closure of the generic strata under contracting moves.
pub fn build_poset_with_cap(n: usize, cap: usize) -> Result<Poset> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            n,
            cap,
            estimate: generic_estimate(n),
        });
    }
    let mut graphs: HashMap<CanonicalCode, GaussGraph> = HashMap::new();
    let mut frontier = Vec::new();
    for code in enumerate_generic(n) {
        let g = code.decode()?;
        graphs.insert(code.clone(), g.clone());
        frontier.push((code, g));
    }
    let mut covers = Vec::new();
    while !frontier.is_empty() {
        let expanded: Vec<Vec<(Cover, GaussGraph)>> = frontier
            .par_iter()
            .map(|(code, g)| {
                enumerate_moves(g)
                    .into_iter()
                    .filter_map(|d| {
                        let h = apply_contract(g, &d).ok()?;
                        Some((
                            Cover {
                                child: code.clone(),
                                parent: h.canonical_code(),
                                kind: d.kind(),
                                witness: d,
                            },
                            h,
                        ))
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (cover, h) in expanded.into_iter().flatten() {
            if !graphs.contains_key(&cover.parent) {
                graphs.insert(cover.parent.clone(), h.clone());
                next.push((cover.parent.clone(), h));
            }
            covers.push(cover);
        }
        frontier = next;
    }
    let mut parents: BTreeMap<CanonicalCode, BTreeMap<CanonicalCode, BTreeSet<MoveKind>>> =
        BTreeMap::new();
    for c in &covers {
        parents
            .entry(c.child.clone())
            .or_default()
            .entry(c.parent.clone())
            .or_default()
            .insert(c.kind);
    }
    covers.sort_by(|a, b| {
        (&a.child, &a.parent, a.kind).cmp(&(&b.child, &b.parent, b.kind))
    });
    covers.dedup_by(|a, b| a.child == b.child && a.parent == b.parent && a.kind == b.kind);
    let nodes: BTreeSet<CanonicalCode> = graphs.into_keys().collect();
    let mut poset = Poset {
        n,
        nodes,
        covers,
        maximal: maximal_element(n),
        parents,
    };
    let tops = poset.maximal_nodes();
    if tops.len() != 1 || tops[0] != poset.maximal {
        return Err(Error::Structural(format!(
            "expected the {}-star as unique maximal element, found {tops:?}",
            4 * n
        )));
    }
    poset.maximal = tops[0].clone();
    Ok(poset)
}
