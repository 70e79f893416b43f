//! Gauss-graphs: decorated planar forests with `4n` leaves at fixed
//! asymptotic slots, red/blue edges and A/B/C/D-colored faces.
//!
//! The embedding is a rotation system: every vertex stores its incident
//! edges in counterclockwise order. Leaves are not glued at infinity; the
//! face traversal passes from leaf `k` to the next leaf counterclockwise.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeColor {
    /// `Im P = 0`
    Red,
    /// `Re P = 0`
    Blue,
}

impl EdgeColor {
    pub fn other(self) -> Self {
        match self {
            EdgeColor::Red => EdgeColor::Blue,
            EdgeColor::Blue => EdgeColor::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            EdgeColor::Red => 'R',
            EdgeColor::Blue => 'B',
        }
    }

    /// Color of the leaf at asymptotic slot `slot`.
    pub fn of_slot(slot: usize) -> Self {
        if slot.is_multiple_of(2) {
            EdgeColor::Red
        } else {
            EdgeColor::Blue
        }
    }
}

/// Face color: the quadrant of the target plane a face maps to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceColor {
    A,
    B,
    C,
    D,
}

impl FaceColor {
    pub const ALL: [FaceColor; 4] = [FaceColor::A, FaceColor::B, FaceColor::C, FaceColor::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    /// Color on the other side of an edge of color `edge`.
    pub fn across(self, edge: EdgeColor) -> Self {
        let i = self.index();
        match edge {
            // A<->B, C<->D
            EdgeColor::Blue => Self::from_index(i ^ 1),
            // A<->D, B<->C
            EdgeColor::Red => Self::from_index(3 - i),
        }
    }
}

impl fmt::Display for FaceColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Root { mult: usize },
    Crit,
    Leaf { slot: usize },
}

/// One entry of a rotation: the neighbor and the color of the connecting edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Port {
    pub to: usize,
    pub color: EdgeColor,
}

/// Half-edge index into [`HalfEdges`].
pub type HalfEdgeId = usize;

/// Flattened half-edge view of a rotation system.
#[derive(Clone, Debug)]
pub struct HalfEdges {
    offsets: Vec<usize>,
    pub origin: Vec<usize>,
    pub target: Vec<usize>,
    pub color: Vec<EdgeColor>,
    pub twin: Vec<HalfEdgeId>,
}

impl HalfEdges {
    pub fn len(&self) -> usize {
        self.origin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origin.is_empty()
    }

    /// Half-edge leaving `v` at rotation position `i`.
    pub fn at(&self, v: usize, i: usize) -> HalfEdgeId {
        self.offsets[v] + i
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn position(&self, h: HalfEdgeId) -> usize {
        h - self.offsets[self.origin[h]]
    }

    /// Counterclockwise successor around the origin.
    pub fn rot_next(&self, h: HalfEdgeId) -> HalfEdgeId {
        let v = self.origin[h];
        let d = self.degree(v);
        self.offsets[v] + (self.position(h) + 1) % d
    }

    /// Clockwise successor around the origin.
    pub fn rot_prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        let v = self.origin[h];
        let d = self.degree(v);
        self.offsets[v] + (self.position(h) + d - 1) % d
    }

    /// Undirected edge id: the smaller of the two half-edges.
    pub fn edge_id(&self, h: HalfEdgeId) -> usize {
        h.min(self.twin[h])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub color: FaceColor,
    /// Boundary walk; the face lies to the left of every half-edge.
    pub walk: Vec<HalfEdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceTable {
    pub faces: Vec<Face>,
    /// Face to the left of each half-edge.
    pub face_of: Vec<usize>,
}

/// Decorated planar forest.
#[derive(Clone, Debug)]
pub struct GaussGraph {
    n: usize,
    kinds: Vec<VertexKind>,
    rotation: Vec<Vec<Port>>,
    faces: Option<FaceTable>,
    /// Identification point of all leaves; carries no rotation data.
    pub infinity_marker: bool,
}

impl GaussGraph {
    /// Assembles a graph and checks structural well-formedness: every port
    /// has a twin of the same color, no loops, no parallel edges.
    pub fn from_parts(n: usize, kinds: Vec<VertexKind>, rotation: Vec<Vec<Port>>) -> Result<Self> {
        if kinds.len() != rotation.len() {
            return Err(Error::Structural("kinds and rotations differ in length".into()));
        }
        for (v, rot) in rotation.iter().enumerate() {
            for (i, p) in rot.iter().enumerate() {
                if p.to >= kinds.len() {
                    return Err(Error::Structural(format!("vertex {v}: dangling port {i}")));
                }
                if p.to == v {
                    return Err(Error::Structural(format!("vertex {v}: loop")));
                }
                if rot[..i].iter().any(|q| q.to == p.to) {
                    return Err(Error::Structural(format!(
                        "vertices {v} and {}: parallel edges",
                        p.to
                    )));
                }
                let back: Vec<&Port> = rotation[p.to].iter().filter(|q| q.to == v).collect();
                if back.len() != 1 || back[0].color != p.color {
                    return Err(Error::Structural(format!(
                        "edge {v}-{}: unpaired half-edge",
                        p.to
                    )));
                }
            }
        }
        Ok(GaussGraph {
            n,
            kinds,
            rotation,
            faces: None,
            infinity_marker: true,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn kind(&self, v: usize) -> VertexKind {
        self.kinds[v]
    }

    pub fn rotation(&self, v: usize) -> &[Port] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<Port>] {
        &self.rotation
    }

    pub fn vertex_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn valency(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.kinds.iter().enumerate().filter_map(|(v, k)| match k {
            VertexKind::Leaf { slot } => Some((v, *slot)),
            _ => None,
        })
    }

    pub fn roots(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.kinds.iter().enumerate().filter_map(|(v, k)| match k {
            VertexKind::Root { mult } => Some((v, *mult)),
            _ => None,
        })
    }

    pub fn crits(&self) -> impl Iterator<Item = usize> + '_ {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| matches!(k, VertexKind::Crit))
            .map(|(v, _)| v)
    }

    pub fn internal_vertex_count(&self) -> usize {
        self.kinds
            .iter()
            .filter(|k| !matches!(k, VertexKind::Leaf { .. }))
            .count()
    }

    /// Color of a critical vertex (the color of its first edge).
    pub fn crit_color(&self, v: usize) -> Option<EdgeColor> {
        match self.kinds[v] {
            VertexKind::Crit => self.rotation[v].first().map(|p| p.color),
            _ => None,
        }
    }

    /// `Σ_crit (val/2 - 1) + 2 Σ_root (mult - 1)`: a monotone rank for moves.
    pub fn codim(&self) -> usize {
        let crit: usize = self.crits().map(|v| self.valency(v) / 2 - 1).sum();
        let roots: usize = self.roots().map(|(_, m)| 2 * (m - 1)).sum();
        crit + roots
    }

    pub fn is_generic(&self) -> bool {
        self.crits().next().is_none() && self.roots().all(|(_, m)| m == 1)
    }

    pub fn half_edges(&self) -> HalfEdges {
        let mut offsets = Vec::with_capacity(self.rotation.len() + 1);
        offsets.push(0);
        for rot in &self.rotation {
            offsets.push(offsets.last().unwrap() + rot.len());
        }
        let total = *offsets.last().unwrap();
        let mut origin = Vec::with_capacity(total);
        let mut target = Vec::with_capacity(total);
        let mut color = Vec::with_capacity(total);
        for (v, rot) in self.rotation.iter().enumerate() {
            for p in rot {
                origin.push(v);
                target.push(p.to);
                color.push(p.color);
            }
        }
        let twin = (0..total)
            .map(|h| {
                let w = target[h];
                let v = origin[h];
                let i = self.rotation[w].iter().position(|p| p.to == v).unwrap();
                offsets[w] + i
            })
            .collect();
        HalfEdges {
            offsets,
            origin,
            target,
            color,
            twin,
        }
    }

    /// Connected component index per vertex, and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.kinds.len()];
        let mut count = 0;
        for s in 0..self.kinds.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(v) = stack.pop() {
                for p in &self.rotation[v] {
                    if comp[p.to] == usize::MAX {
                        comp[p.to] = count;
                        stack.push(p.to);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// True when the underlying graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let (_, comps) = self.components();
        self.edge_count() + comps == self.kinds.len()
    }

    pub fn faces(&self) -> Option<&FaceTable> {
        self.faces.as_ref()
    }

    /// Computes (or recomputes) the face table and face colors.
    pub fn compute_faces(&mut self) -> Result<&FaceTable> {
        let table = self.face_table()?;
        self.faces = Some(table);
        Ok(self.faces.as_ref().unwrap())
    }

    /// Graph with its face table filled in.
    pub fn with_faces(mut self) -> Result<Self> {
        self.compute_faces()?;
        Ok(self)
    }

    fn face_table(&self) -> Result<FaceTable> {
        let he = self.half_edges();
        // leaves by slot, counterclockwise
        let mut leaves: Vec<(usize, usize)> = self.leaves().map(|(v, s)| (s, v)).collect();
        leaves.sort_unstable();
        if leaves.is_empty() {
            return Err(Error::Structural("graph has no leaves".into()));
        }
        for (s, v) in &leaves {
            if self.valency(*v) != 1 {
                return Err(Error::Structural(format!("leaf at slot {s} has valency != 1")));
            }
        }
        let mut next_leaf = BTreeMap::new();
        for (i, &(_, v)) in leaves.iter().enumerate() {
            let (_, w) = leaves[(i + 1) % leaves.len()];
            next_leaf.insert(v, he.at(w, 0));
        }
        let next = |h: HalfEdgeId| -> HalfEdgeId {
            let t = he.twin[h];
            let w = he.origin[t];
            match self.kinds[w] {
                VertexKind::Leaf { .. } => next_leaf[&w],
                _ => he.rot_prev(t),
            }
        };
        let mut face_of = vec![usize::MAX; he.len()];
        let mut walks: Vec<Vec<HalfEdgeId>> = Vec::new();
        for start in 0..he.len() {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = walks.len();
            let mut walk = Vec::new();
            let mut h = start;
            loop {
                if face_of[h] != usize::MAX {
                    if h == start {
                        break;
                    }
                    return Err(Error::Structural("face traversal is not a permutation".into()));
                }
                face_of[h] = id;
                walk.push(h);
                h = next(h);
            }
            walks.push(walk);
        }
        // propagate colors from the sector between the first two slots
        let (_, first_leaf) = leaves[0];
        let first_slot = leaves[0].0;
        let seed_face = face_of[he.twin[he.at(first_leaf, 0)]];
        let mut colors: Vec<Option<FaceColor>> = vec![None; walks.len()];
        colors[seed_face] = Some(FaceColor::from_index(first_slot));
        let mut stack = vec![seed_face];
        while let Some(f) = stack.pop() {
            let cf = colors[f].unwrap();
            for &h in &walks[f] {
                let g = face_of[he.twin[h]];
                let expected = cf.across(he.color[h]);
                match colors[g] {
                    None => {
                        colors[g] = Some(expected);
                        stack.push(g);
                    }
                    Some(c) if c != expected => {
                        return Err(Error::ColoringContradiction(format!(
                            "faces {f} and {g} across edge {}-{}",
                            he.origin[h], he.target[h]
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        let faces = walks
            .into_iter()
            .zip(colors)
            .map(|(walk, color)| {
                color
                    .map(|color| Face { color, walk })
                    .ok_or_else(|| Error::Structural("face unreachable from the outer sector".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        // leaf gaps must carry their asymptotic quadrant
        for &(s, v) in &leaves {
            let f = face_of[he.twin[he.at(v, 0)]];
            if faces[f].color != FaceColor::from_index(s) {
                return Err(Error::ColoringContradiction(format!(
                    "sector after slot {s} has color {}",
                    faces[f].color
                )));
            }
        }
        Ok(FaceTable { faces, face_of })
    }

    /// Vertices incident to face `f` (boundary map on vertices).
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        let (Some(table), he) = (self.faces.as_ref(), self.half_edges()) else {
            return Vec::new();
        };
        let mut vs: Vec<usize> = table.faces[f].walk.iter().map(|&h| he.origin[h]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Edges (as vertex pairs) incident to face `f` (boundary map on edges).
    pub fn face_edges(&self, f: usize) -> Vec<(usize, usize)> {
        let (Some(table), he) = (self.faces.as_ref(), self.half_edges()) else {
            return Vec::new();
        };
        let mut es: Vec<(usize, usize)> = table.faces[f]
            .walk
            .iter()
            .map(|&h| {
                let (a, b) = (he.origin[h], he.target[h]);
                (a.min(b), a.max(b))
            })
            .collect();
        es.sort_unstable();
        es.dedup();
        es
    }

    /// Checks every Gauss-graph rule and lists the violations.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.n;
        let mut push = |rule: &'static str, location: String| {
            report.violations.push(Violation { rule, location });
        };

        if !self.is_forest() {
            push("forest", "underlying graph has a cycle".into());
        }

        let leaves: Vec<(usize, usize)> = self.leaves().collect();
        if leaves.len() != 4 * n {
            push("leaf-count", format!("leaf count {} != 4n = {}", leaves.len(), 4 * n));
        }
        let mut seen = vec![false; 4 * n];
        for &(v, slot) in &leaves {
            if slot >= 4 * n || seen[slot] {
                push("leaf-slot", format!("leaf {v}: slot {slot} out of range or repeated"));
            } else {
                seen[slot] = true;
            }
            if self.valency(v) != 1 {
                push("leaf-valency", format!("leaf {v}: valency {}", self.valency(v)));
            } else if self.rotation[v][0].color != EdgeColor::of_slot(slot) {
                push("leaf-color", format!("leaf at slot {slot} has the wrong color"));
            }
        }

        let mut mass = 0;
        let mut budget = 0;
        let mut crit_count = 0;
        for (v, kind) in self.kinds.iter().enumerate() {
            let rot = &self.rotation[v];
            match *kind {
                VertexKind::Root { mult } => {
                    mass += mult;
                    budget += mult.saturating_sub(1);
                    if mult == 0 || rot.len() != 4 * mult {
                        push("root-valency", format!("root {v}: valency {} != 4*{mult}", rot.len()));
                    }
                    let alternating = rot
                        .iter()
                        .zip(rot.iter().cycle().skip(1))
                        .all(|(a, b)| a.color != b.color);
                    if !alternating {
                        push("root-alternation", format!("root {v}: colors do not alternate"));
                    }
                }
                VertexKind::Crit => {
                    crit_count += 1;
                    let val = rot.len();
                    if val % 2 == 1 {
                        push("crit-valency", format!("crit {v}: odd monochromatic valency {val}"));
                    } else if val < 4 || val > 2 * n {
                        push("crit-valency", format!("crit {v}: valency {val} outside [4, 2n]"));
                    }
                    budget += (val / 2).saturating_sub(1);
                    if rot.iter().any(|p| p.color != rot[0].color) {
                        push("crit-monochrome", format!("crit {v}: mixed edge colors"));
                    }
                }
                VertexKind::Leaf { .. } => {}
            }
        }
        if mass != n {
            push("root-mass", format!("root multiplicities sum to {mass}, expected {n}"));
        }
        if crit_count + 1 > n.max(1) {
            push("crit-count", format!("{crit_count} critical vertices exceed n - 1"));
        }
        if budget + 1 > n.max(1) {
            push(
                "critical-budget",
                format!("critical multiplicity {budget} exceeds deg P' = n - 1"),
            );
        }

        match self.face_table() {
            Err(e) => push("face-coloring", e.to_string()),
            Ok(table) => {
                let he = self.half_edges();
                for h in 0..he.len() {
                    if h > he.twin[h] {
                        continue;
                    }
                    let a = table.faces[table.face_of[h]].color;
                    let b = table.faces[table.face_of[he.twin[h]]].color;
                    let ok = match he.color[h] {
                        EdgeColor::Red => matches!(
                            (a.min(b), a.max(b)),
                            (FaceColor::A, FaceColor::D) | (FaceColor::B, FaceColor::C)
                        ),
                        EdgeColor::Blue => matches!(
                            (a.min(b), a.max(b)),
                            (FaceColor::A, FaceColor::B) | (FaceColor::C, FaceColor::D)
                        ),
                    };
                    if !ok {
                        push(
                            "edge-faces",
                            format!("edge {}-{}: faces {a},{b}", he.origin[h], he.target[h]),
                        );
                    }
                }
                for (v, kind) in self.kinds.iter().enumerate() {
                    let d = self.valency(v);
                    let corners: Vec<FaceColor> = (0..d)
                        .map(|i| table.faces[table.face_of[he.at(v, i)]].color)
                        .collect();
                    match kind {
                        VertexKind::Root { .. } => {
                            let ccw = (0..d).all(|i| {
                                corners[(i + 1) % d].index() == (corners[i].index() + 1) % 4
                            });
                            if !ccw {
                                push("root-corners", format!("root {v}: corners not A,B,C,D ccw"));
                            }
                        }
                        VertexKind::Crit => {
                            let alt = (0..d).all(|i| corners[(i + 2) % d] == corners[i])
                                && (d < 2 || corners[0] != corners[1]);
                            if !alt {
                                push("crit-corners", format!("crit {v}: corners do not alternate"));
                            }
                        }
                        VertexKind::Leaf { .. } => {}
                    }
                }
            }
        }
        report
    }

    /// Canonical text code; equal codes iff slot-preserving isomorphic.
    pub fn canonical_code(&self) -> CanonicalCode {
        let (comp, count) = self.components();
        let mut min_leaf: Vec<Option<(usize, usize)>> = vec![None; count];
        for (v, slot) in self.leaves() {
            let c = comp[v];
            if min_leaf[c].is_none_or(|(s, _)| slot < s) {
                min_leaf[c] = Some((slot, v));
            }
        }
        let mut starts: Vec<(usize, usize)> = min_leaf.into_iter().flatten().collect();
        starts.sort_unstable();
        let mut text = format!("n{}", self.n);
        for (slot, leaf) in starts {
            let mut tokens = vec![format!("L{slot}")];
            if let Some(first) = self.rotation[leaf].first() {
                self.walk_tokens(first.to, leaf, first.color, &mut tokens);
            }
            while tokens.last().is_some_and(|t| t == "^") {
                tokens.pop();
            }
            text.push_str("|T[");
            text.push_str(&tokens.join(" "));
            text.push(']');
        }
        CanonicalCode(text)
    }

    fn walk_tokens(&self, v: usize, parent: usize, color: EdgeColor, out: &mut Vec<String>) {
        // explicit stack: (vertex, parent position, next child offset)
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        let emit = |v: usize, color: EdgeColor, parent: usize, out: &mut Vec<String>| -> Option<(usize, usize, usize)> {
            match self.kinds[v] {
                VertexKind::Leaf { slot } => {
                    out.push(format!("L{slot}"));
                    None
                }
                VertexKind::Root { .. } | VertexKind::Crit => {
                    let tag = if matches!(self.kinds[v], VertexKind::Root { .. }) { 'r' } else { 'c' };
                    out.push(format!("{tag}:{}{}", color.letter(), self.valency(v)));
                    let pos = self.rotation[v].iter().position(|p| p.to == parent).unwrap_or(0);
                    Some((v, pos, 1))
                }
            }
        };
        if let Some(frame) = emit(v, color, parent, out) {
            stack.push(frame);
        }
        while let Some(top) = stack.last_mut() {
            let (v, pos, k) = *top;
            let d = self.valency(v);
            if k >= d {
                out.push("^".into());
                stack.pop();
                continue;
            }
            top.2 += 1;
            let port = self.rotation[v][(pos + k) % d];
            if let Some(frame) = emit(port.to, port.color, v, out) {
                stack.push(frame);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub location: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.location)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// Stratum identifier.
///
/// Grammar: `n<k>` followed by `|T[walk]` per tree, trees ordered by their
/// smallest leaf slot. A walk is a depth-first traversal from the smallest
/// leaf following counterclockwise rotation order, with tokens `L<slot>`,
/// `r:<R|B><val>` (root; color of the edge it was entered by),
/// `c:<R|B><val>` (critical vertex) and `^` (backtrack, trailing ones dropped).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(pub String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn n(&self) -> Result<usize> {
        let head = self.0.split('|').next().unwrap_or("");
        head.strip_prefix('n')
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad code header in {:?}", self.0)))
    }

    /// Rebuilds a graph (with faces) from the code.
    pub fn decode(&self) -> Result<GaussGraph> {
        let n = self.n()?;
        let mut kinds = Vec::new();
        let mut rotation: Vec<Vec<Port>> = Vec::new();
        for tree in self.0.split('|').skip(1) {
            let body = tree
                .strip_prefix("T[")
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("bad tree {tree:?}")))?;
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let mut cursor = 0;
            decode_tree(&tokens, &mut cursor, &mut kinds, &mut rotation)?;
            if cursor != tokens.len() {
                return Err(Error::Parse(format!("trailing tokens in {tree:?}")));
            }
        }
        GaussGraph::from_parts(n, kinds, rotation)?.with_faces()
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

enum Token {
    Leaf(usize),
    Inner { root: bool, color: EdgeColor, val: usize },
}

fn parse_token(t: &str) -> Result<Token> {
    let bad = || Error::Parse(format!("bad token {t:?}"));
    if let Some(slot) = t.strip_prefix('L') {
        return slot.parse().map(Token::Leaf).map_err(|_| bad());
    }
    let (tag, rest) = t.split_once(':').ok_or_else(bad)?;
    let root = match tag {
        "r" => true,
        "c" => false,
        _ => return Err(bad()),
    };
    let mut chars = rest.chars();
    let color = match chars.next() {
        Some('R') => EdgeColor::Red,
        Some('B') => EdgeColor::Blue,
        _ => return Err(bad()),
    };
    let val: usize = chars.as_str().parse().map_err(|_| bad())?;
    if val < 2 || (root && !val.is_multiple_of(4)) {
        return Err(bad());
    }
    Ok(Token::Inner { root, color, val })
}

fn decode_tree(
    tokens: &[&str],
    cursor: &mut usize,
    kinds: &mut Vec<VertexKind>,
    rotation: &mut Vec<Vec<Port>>,
) -> Result<()> {
    let first = tokens
        .first()
        .ok_or_else(|| Error::Parse("empty tree".into()))?;
    let Token::Leaf(slot) = parse_token(first)? else {
        return Err(Error::Parse("tree must start at a leaf".into()));
    };
    *cursor = 1;
    let leaf = kinds.len();
    kinds.push(VertexKind::Leaf { slot });
    rotation.push(Vec::new());
    let color = EdgeColor::of_slot(slot);
    if *cursor < tokens.len() {
        let child = decode_vertex(tokens, cursor, kinds, rotation, leaf, color)?;
        rotation[leaf].push(Port { to: child, color });
    }
    Ok(())
}

fn decode_vertex(
    tokens: &[&str],
    cursor: &mut usize,
    kinds: &mut Vec<VertexKind>,
    rotation: &mut Vec<Vec<Port>>,
    parent: usize,
    color: EdgeColor,
) -> Result<usize> {
    let t = tokens
        .get(*cursor)
        .ok_or_else(|| Error::Parse("code ends early".into()))?;
    *cursor += 1;
    let id = kinds.len();
    match parse_token(t)? {
        Token::Leaf(slot) => {
            if EdgeColor::of_slot(slot) != color {
                return Err(Error::Parse(format!("leaf {slot} reached by a {color:?} edge")));
            }
            kinds.push(VertexKind::Leaf { slot });
            rotation.push(vec![Port { to: parent, color }]);
        }
        Token::Inner { root, color: entry, val } => {
            if entry != color {
                return Err(Error::Parse(format!("token {t:?} disagrees with its edge color")));
            }
            kinds.push(if root {
                VertexKind::Root { mult: val / 4 }
            } else {
                VertexKind::Crit
            });
            rotation.push(vec![Port { to: parent, color }]);
            for k in 1..val {
                let c = if root && k % 2 == 1 { color.other() } else { color };
                let child = decode_vertex(tokens, cursor, kinds, rotation, id, c)?;
                rotation[id].push(Port { to: child, color: c });
            }
            if tokens.get(*cursor) == Some(&"^") {
                *cursor += 1;
            }
        }
    }
    Ok(id)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn identity_graph_faces_are_quadrants() {
        let g = identity().with_faces().unwrap();
        let t = g.faces().unwrap();
        assert_eq!(t.faces.len(), 4);
        let he = g.half_edges();
        for s in 0..4 {
            let f = t.face_of[he.at(0, s)];
            assert_eq!(t.faces[f].color, FaceColor::from_index(s));
        }
        assert!(g.validate().is_valid());
        assert_eq!(g.canonical_code().as_str(), "n1|T[L0 r:R4 L1 L2 L3]");
    }

    #[test]
    fn z2_minus_1_is_valid_with_eight_faces() {
        let g = z2_minus_1(0).with_faces().unwrap();
        assert!(g.validate().is_valid(), "{:?}", g.validate());
        let t = g.faces().unwrap();
        assert_eq!(t.faces.len(), 8);
        assert_eq!(t.faces.len(), g.edge_count() - g.internal_vertex_count() + 1);
        assert_eq!(g.codim(), 1);
    }

    #[test]
    fn code_is_independent_of_vertex_ids() {
        let a = z2_minus_1(0).canonical_code();
        let b = z2_minus_1(1).canonical_code();
        let c = z2_minus_1(2).canonical_code();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.as_str(), "n2|T[L0 r:R4 L1 c:R4 L2 r:R4 L3 L4 L5 ^ L6 ^ L7]");
    }

    #[test]
    fn decode_round_trip() {
        for g in [identity(), z2_minus_1(0)] {
            let code = g.canonical_code();
            let back = code.decode().unwrap();
            assert_eq!(back.canonical_code(), code);
            assert!(back.validate().is_valid());
        }
        assert!(CanonicalCode("n1|T[L1 r:R4 L2 L3 L0]".into()).decode().is_err());
        assert!(CanonicalCode("x|T[L0]".into()).decode().is_err());
    }

    #[test]
    fn missing_leaf_is_reported() {
        let g = identity();
        let mut kinds = g.kinds().to_vec();
        let mut rot = g.rotations().to_vec();
        // drop leaf 4 (slot 3)
        kinds.pop();
        rot.pop();
        rot[0].retain(|p| p.to != 4);
        let g = GaussGraph::from_parts(1, kinds, rot).unwrap();
        let report = g.validate();
        assert!(report.has_rule("leaf-count"));
        assert!(report
            .violations
            .iter()
            .any(|v| v.location.contains("leaf count 3 != 4n = 4")));
    }

    #[test]
    fn odd_crit_valency_is_reported() {
        let g = z2_minus_1(0);
        let mut kinds = g.kinds().to_vec();
        let mut rot = g.rotations().to_vec();
        // detach the leaf at slot 6 from the critical vertex and turn it into an isolated leaf
        let leaf6 = 3 + 6;
        rot[0].retain(|p| p.to != leaf6);
        rot[leaf6].clear();
        kinds[leaf6] = VertexKind::Leaf { slot: 6 };
        let g = GaussGraph::from_parts(2, kinds, rot).unwrap();
        let report = g.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.rule == "crit-valency" && v.location.contains("odd monochromatic valency")));
    }

    #[test]
    fn miscolored_edge_contradicts() {
        let g = identity();
        let mut rot = g.rotations().to_vec();
        // paint the slot-0 leaf edge blue on both sides
        rot[0][0].color = EdgeColor::Blue;
        rot[1][0].color = EdgeColor::Blue;
        let mut g = GaussGraph::from_parts(1, g.kinds().to_vec(), rot).unwrap();
        assert!(matches!(g.compute_faces(), Err(Error::ColoringContradiction(_))));
    }

    #[test]
    fn structural_errors() {
        let kinds = vec![VertexKind::Crit, VertexKind::Crit];
        let rot = vec![vec![Port { to: 1, color: EdgeColor::Red }], vec![]];
        assert!(matches!(
            GaussGraph::from_parts(1, kinds, rot),
            Err(Error::Structural(_))
        ));
    }
}
