//! Stallings folding of the wedge of image words, with enough bookkeeping to
//! recover an explicit kernel element at the first rank-dropping fold.

use std::collections::HashMap;

use super::{reduce, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldResult {
    /// Vertices of the folded graph.
    pub vertices: usize,
    /// Edges of the folded graph.
    pub edges: usize,
    /// Folds that identified two edges already sharing both endpoints.
    pub closed_folds: usize,
    /// A nontrivial word mapped to the identity, found at the first closed fold.
    pub kernel_witness: Option<Word>,
}

impl FoldResult {
    /// Rank of the subgroup generated by the images.
    pub fn rank(&self) -> usize {
        self.edges + 1 - self.vertices
    }

    /// True when the folded graph is the rose on `rank` petals.
    pub fn is_rose(&self, rank: usize) -> bool {
        self.vertices == 1 && self.edges == rank
    }
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    src: usize,
    dst: usize,
    label: usize,
    /// letter is a generator (src is the earlier circle position)
    positive: bool,
    circle: usize,
    closing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum End {
    Src,
    Dst,
}

/// Record of a vertex identification: `x` (an endpoint of `ex`) was merged
/// with `y` (an endpoint of `ey`) because the far ends were already merged.
#[derive(Clone, Copy, Debug)]
struct Link {
    x: usize,
    ex: usize,
    x_end: End,
    y: usize,
    ey: usize,
    y_end: End,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb] = ra;
        }
    }

    fn classes(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Walk step: W-edge id and whether it is crossed along its circle.
type Step = (usize, bool);

const PATH_BUDGET: usize = 1 << 20;

struct Folder {
    edges: Vec<Edge>,
    /// circle position of each non-base vertex, for tree paths
    vertex_pos: Vec<(usize, usize)>,
    circle_edges: Vec<Vec<usize>>,
    links: Vec<Link>,
    adjacency: Vec<Vec<usize>>,
    memo: HashMap<usize, Vec<Step>>,
    spent: usize,
}

impl Folder {
    fn step_from(&self, e: usize, from: End) -> Step {
        let edge = &self.edges[e];
        // along the circle means tail -> head; for a positive letter tail is src
        (e, (from == End::Src) == edge.positive)
    }

    fn other_end(&self, e: usize, end: End) -> usize {
        match end {
            End::Src => self.edges[e].dst,
            End::Dst => self.edges[e].src,
        }
    }

    /// Path in the merge forest from `a` to `b`: link ids with direction.
    fn forest_path(&self, a: usize, b: usize) -> Option<Vec<(usize, bool)>> {
        if a == b {
            return Some(Vec::new());
        }
        let mut prev: HashMap<usize, (usize, usize, bool)> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([a]);
        prev.insert(a, (a, usize::MAX, true));
        while let Some(v) = queue.pop_front() {
            if v == b {
                break;
            }
            for &li in &self.adjacency[v] {
                let l = self.links[li];
                let (nxt, fwd) = if l.x == v { (l.y, true) } else { (l.x, false) };
                if let std::collections::hash_map::Entry::Vacant(slot) = prev.entry(nxt) {
                    slot.insert((v, li, fwd));
                    queue.push_back(nxt);
                }
            }
        }
        prev.get(&b)?;
        let mut out = Vec::new();
        let mut cur = b;
        while cur != a {
            let (p, li, fwd) = prev[&cur];
            out.push((li, fwd));
            cur = p;
        }
        out.reverse();
        Some(out)
    }

    fn link_walk(&mut self, li: usize) -> Option<Vec<Step>> {
        if let Some(w) = self.memo.get(&li) {
            return Some(w.clone());
        }
        let l = self.links[li];
        let px = self.other_end(l.ex, l.x_end);
        let py = self.other_end(l.ey, l.y_end);
        let mut walk = vec![self.step_from(l.ex, l.x_end)];
        walk.extend(self.walk(px, py)?);
        let far = if l.y_end == End::Src { End::Dst } else { End::Src };
        walk.push(self.step_from(l.ey, far));
        self.spent += walk.len();
        if self.spent > PATH_BUDGET {
            return None;
        }
        self.memo.insert(li, walk.clone());
        Some(walk)
    }

    /// A walk in the wedge from `a` to `b` whose label reduces to the identity.
    fn walk(&mut self, a: usize, b: usize) -> Option<Vec<Step>> {
        let mut out = Vec::new();
        for (li, fwd) in self.forest_path(a, b)? {
            let w = self.link_walk(li)?;
            if fwd {
                out.extend(w);
            } else {
                out.extend(w.into_iter().rev().map(|(e, along)| (e, !along)));
            }
        }
        Some(out)
    }

    /// Walk from the base vertex to `v` through non-closing edges.
    fn tree_walk(&self, v: usize) -> Vec<Step> {
        if v == 0 {
            return Vec::new();
        }
        let (circle, pos) = self.vertex_pos[v];
        self.circle_edges[circle][..pos]
            .iter()
            .map(|&e| (e, true))
            .collect()
    }

    fn walk_to_word(&self, walk: &[Step]) -> Word {
        reduce(walk.iter().filter_map(|&(e, along)| {
            let edge = &self.edges[e];
            edge.closing
                .then(|| Letter::new(edge.circle + 1, !along))
        }))
    }

    fn kernel_loop(&mut self, e1: usize, e2: usize) -> Option<Word> {
        let (a1, b1) = (self.edges[e1].src, self.edges[e1].dst);
        let (a2, b2) = (self.edges[e2].src, self.edges[e2].dst);
        let mut walk = self.tree_walk(a1);
        walk.push(self.step_from(e1, End::Src));
        walk.extend(self.walk(b1, b2)?);
        walk.push(self.step_from(e2, End::Dst));
        walk.extend(self.walk(a2, a1)?);
        walk.extend(
            self.tree_walk(a1)
                .into_iter()
                .rev()
                .map(|(e, along)| (e, !along)),
        );
        let w = self.walk_to_word(&walk);
        (!w.is_empty()).then_some(w)
    }
}

/// Folds the wedge of circles labelled by `images`. Every image must be
/// nonempty.
pub fn fold_images(images: &[Word]) -> FoldResult {
    assert!(images.iter().all(|w| !w.is_empty()), "empty image in fold");
    let mut edges = Vec::new();
    let mut vertex_pos = vec![(usize::MAX, 0)];
    let mut circle_edges = Vec::new();
    for (j, img) in images.iter().enumerate() {
        let len = img.len();
        let base = vertex_pos.len();
        for p in 1..len {
            vertex_pos.push((j, p));
        }
        let vertex = |p: usize| if p == 0 || p == len { 0 } else { base + p - 1 };
        let mut ids = Vec::with_capacity(len);
        for (p, l) in img.letters().iter().enumerate() {
            let (tail, head) = (vertex(p), vertex(p + 1));
            let positive = !l.is_inverse();
            let (src, dst) = if positive { (tail, head) } else { (head, tail) };
            ids.push(edges.len());
            edges.push(Edge {
                src,
                dst,
                label: l.gen(),
                positive,
                circle: j,
                closing: p + 1 == len,
            });
        }
        circle_edges.push(ids);
    }
    let nv = vertex_pos.len();
    let ne = edges.len();
    let mut folder = Folder {
        edges,
        vertex_pos,
        circle_edges,
        links: Vec::new(),
        adjacency: vec![Vec::new(); nv],
        memo: HashMap::new(),
        spent: 0,
    };
    let mut vuf = UnionFind::new(nv);
    let mut euf = UnionFind::new(ne);
    let mut closed = 0;
    let mut witness = None;

    loop {
        let mut seen: HashMap<(usize, usize, End), usize> = HashMap::new();
        let mut conflict = None;
        'scan: for e in 0..ne {
            if euf.find(e) != e {
                continue;
            }
            let edge = folder.edges[e];
            for (end, v) in [(End::Src, edge.src), (End::Dst, edge.dst)] {
                let key = (vuf.find(v), edge.label, end);
                if let Some(&prev) = seen.get(&key) {
                    conflict = Some((prev, e, end));
                    break 'scan;
                }
                seen.insert(key, e);
            }
        }
        let Some((e1, e2, shared)) = conflict else { break };
        let far_end = if shared == End::Src { End::Dst } else { End::Src };
        let f1 = folder.other_end(e1, shared);
        let f2 = folder.other_end(e2, shared);
        if vuf.find(f1) != vuf.find(f2) {
            let li = folder.links.len();
            folder.links.push(Link {
                x: f1,
                ex: e1,
                x_end: far_end,
                y: f2,
                ey: e2,
                y_end: far_end,
            });
            folder.adjacency[f1].push(li);
            folder.adjacency[f2].push(li);
            vuf.union(f1, f2);
        } else {
            if closed == 0 {
                witness = folder.kernel_loop(e1, e2);
            }
            closed += 1;
        }
        euf.union(e1, e2);
    }

    FoldResult {
        vertices: vuf.classes(),
        edges: euf.classes(),
        closed_folds: closed,
        kernel_witness: witness,
    }
}
