//! Trees of loops with exact rational geometry.
//!
//! A loop is a circle of rational circumference. Every non-root loop is
//! glued at its offset-0 point (its *origin*) to a point of its parent.
//! Offsets grow along each loop's fixed orientation starting at the origin.
//!
//! Points are stored in canonical form: the offset is reduced into
//! `[0, c)`, and a point shared by several loops is always named on the
//! most ancestral loop that contains it.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Index of a loop inside its [`CactusGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LoopId(pub usize);

/// A point of the graph: a loop and an offset along it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointRef {
    pub loop_id: LoopId,
    pub offset: Rational,
}

impl PointRef {
    pub fn new(loop_id: LoopId, offset: Rational) -> Self {
        PointRef { loop_id, offset }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LoopData {
    name: String,
    circumference: Rational,
    parent: Option<(LoopId, Rational)>,
}

#[derive(Debug, Clone)]
pub struct CactusGraph {
    loops: Vec<LoopData>,
    root: LoopId,
    base_point: PointRef,
    children: Vec<Vec<LoopId>>,
    origins: Vec<Option<PointRef>>,
    depth: Vec<usize>,
    by_name: HashMap<String, LoopId>,
}

impl PartialEq for CactusGraph {
    fn eq(&self, other: &Self) -> bool {
        self.loops == other.loops && self.base_point == other.base_point
    }
}

impl Eq for CactusGraph {}

/// Structural summary of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub genus: usize,
    pub longest_loop_path: usize,
    /// Tree distance between every ordered pair of loops, by loop name.
    pub loop_distances: BTreeMap<(String, String), usize>,
    /// Valence (number of arc directions) at each wedge point.
    pub wedge_valences: BTreeMap<String, usize>,
}

#[derive(Debug, Clone)]
struct Entry<T> {
    line: usize,
    value: T,
}

/// Incremental construction of a [`CactusGraph`]; validation happens in
/// [`GraphBuilder::build`]. Entries may carry the source line they came
/// from so errors can point back at the input.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    loops: Vec<Entry<(String, Rational)>>,
    attachments: Vec<Entry<(String, String, Rational)>>,
    base: Option<Entry<(String, Rational)>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_loop(self, name: &str, circumference: Rational) -> Self {
        self.add_loop_at(0, name, circumference)
    }

    pub fn attach(self, child: &str, parent: &str, offset: Rational) -> Self {
        self.attach_at(0, child, parent, offset)
    }

    pub fn base_point(self, loop_name: &str, offset: Rational) -> Self {
        self.base_point_at(0, loop_name, offset)
    }

    fn add_loop_at(mut self, line: usize, name: &str, circumference: Rational) -> Self {
        self.loops.push(Entry {
            line,
            value: (name.to_string(), circumference),
        });
        self
    }

    fn attach_at(mut self, line: usize, child: &str, parent: &str, offset: Rational) -> Self {
        self.attachments.push(Entry {
            line,
            value: (child.to_string(), parent.to_string(), offset),
        });
        self
    }

    fn base_point_at(mut self, line: usize, loop_name: &str, offset: Rational) -> Self {
        self.base = Some(Entry {
            line,
            value: (loop_name.to_string(), offset),
        });
        self
    }

    pub fn build(self) -> Result<CactusGraph> {
        let mut loops: Vec<LoopData> = Vec::new();
        let mut by_name = HashMap::new();
        for Entry {
            line,
            value: (name, c),
        } in &self.loops
        {
            if by_name.contains_key(name) {
                return Err(Error::parse(*line, format!("duplicate loop id `{name}`")));
            }
            if !c.is_positive() {
                return Err(Error::parse(
                    *line,
                    format!("loop `{name}` needs a positive circumference"),
                ));
            }
            by_name.insert(name.clone(), LoopId(loops.len()));
            loops.push(LoopData {
                name: name.clone(),
                circumference: c.clone(),
                parent: None,
            });
        }
        if loops.is_empty() {
            return Err(Error::parse(0, "graph has no loops"));
        }
        let lookup = |line: usize, name: &str| {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("unknown loop `{name}`")))
        };
        let mut attach_line = vec![0usize; loops.len()];
        for Entry {
            line,
            value: (child, parent, off),
        } in &self.attachments
        {
            let c = lookup(*line, child)?;
            let p = lookup(*line, parent)?;
            if c == p {
                return Err(Error::parse(
                    *line,
                    format!("attachment cycle: `{child}` attached to itself"),
                ));
            }
            if loops[c.0].parent.is_some() {
                return Err(Error::parse(
                    *line,
                    format!("loop `{child}` is attached twice"),
                ));
            }
            let cp = &loops[p.0].circumference;
            if off.is_negative() || off >= cp {
                return Err(Error::parse(
                    *line,
                    format!("offset {off} out of range [0, {cp}) on loop `{parent}`"),
                ));
            }
            loops[c.0].parent = Some((p, off.clone()));
            attach_line[c.0] = *line;
        }
        // Every loop must reach the root by following parents.
        for start in 0..loops.len() {
            let mut seen = vec![false; loops.len()];
            let mut cur = start;
            while let Some((p, _)) = &loops[cur].parent {
                if seen[cur] {
                    return Err(Error::parse(
                        attach_line[cur],
                        format!("attachment cycle through loop `{}`", loops[cur].name),
                    ));
                }
                seen[cur] = true;
                cur = p.0;
            }
        }
        let roots: Vec<usize> = (0..loops.len())
            .filter(|&i| loops[i].parent.is_none())
            .collect();
        if roots.len() != 1 {
            let names: Vec<&str> = roots.iter().map(|&i| loops[i].name.as_str()).collect();
            return Err(Error::parse(
                0,
                format!("expected exactly one root loop, found {}", names.join(", ")),
            ));
        }
        let root = LoopId(roots[0]);
        let mut g = CactusGraph {
            children: vec![Vec::new(); loops.len()],
            origins: vec![None; loops.len()],
            depth: vec![0; loops.len()],
            loops,
            root,
            base_point: PointRef::new(root, Rational::zero()),
            by_name: by_name.clone(),
        };
        g.index_tree();
        if let Some(Entry {
            line,
            value: (name, off),
        }) = &self.base
        {
            let id = lookup(*line, name)?;
            let c = g.circumference(id);
            if off.is_negative() || off >= c {
                return Err(Error::parse(
                    *line,
                    format!("base point offset {off} out of range [0, {c})"),
                ));
            }
            g.base_point = g.canonical_point(id, off);
        }
        Ok(g)
    }
}

impl CactusGraph {
    fn index_tree(&mut self) {
        let n = self.loops.len();
        self.children = vec![Vec::new(); n];
        for i in 0..n {
            if let Some((p, _)) = &self.loops[i].parent {
                self.children[p.0].push(LoopId(i));
            }
        }
        // BFS from the root so parents are placed before children.
        let mut order = VecDeque::from([self.root]);
        self.depth = vec![0; n];
        self.origins = vec![None; n];
        while let Some(l) = order.pop_front() {
            for &c in &self.children[l.0].clone() {
                self.depth[c.0] = self.depth[l.0] + 1;
                let (p, off) = self.loops[c.0].parent.clone().expect("child has a parent");
                self.origins[c.0] = Some(self.canonical_point(p, &off));
                order.push_back(c);
            }
        }
    }

    /// Parses the line-oriented graph format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tok: Vec<&str> = content.split_whitespace().collect();
            let rat = |s: &str| -> Result<Rational> {
                s.parse::<Rational>()
                    .map_err(|_| Error::parse(line, format!("malformed rational `{s}`")))
            };
            b = match tok.as_slice() {
                ["loop", name, c] => b.add_loop_at(line, name, rat(c)?),
                ["attach", child, parent, off] => b.attach_at(line, child, parent, rat(off)?),
                ["basepoint", name, off] => b.base_point_at(line, name, rat(off)?),
                _ => {
                    return Err(Error::parse(
                        line,
                        format!("unrecognized directive `{content}`"),
                    ))
                }
            };
        }
        b.build()
    }

    /// Serializes back into the graph file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.loops {
            out.push_str(&format!("loop {} {}\n", l.name, l.circumference));
        }
        for l in &self.loops {
            if let Some((p, off)) = &l.parent {
                out.push_str(&format!("attach {} {} {}\n", l.name, self.name(*p), off));
            }
        }
        let bp = &self.base_point;
        out.push_str(&format!(
            "basepoint {} {}\n",
            self.name(bp.loop_id),
            bp.offset
        ));
        out
    }

    pub fn genus(&self) -> usize {
        self.loops.len()
    }

    pub fn loop_ids(&self) -> impl Iterator<Item = LoopId> + '_ {
        (0..self.loops.len()).map(LoopId)
    }

    pub fn root(&self) -> LoopId {
        self.root
    }

    pub fn base_point(&self) -> &PointRef {
        &self.base_point
    }

    /// Copy of the graph with a different base point.
    pub fn with_base_point(&self, p: &PointRef) -> CactusGraph {
        let mut g = self.clone();
        g.base_point = self.canonical_point(p.loop_id, &p.offset);
        g
    }

    pub fn name(&self, id: LoopId) -> &str {
        &self.loops[id.0].name
    }

    pub fn loop_id(&self, name: &str) -> Result<LoopId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLoop(name.to_string()))
    }

    pub fn circumference(&self, id: LoopId) -> &Rational {
        &self.loops[id.0].circumference
    }

    pub fn parent(&self, id: LoopId) -> Option<LoopId> {
        self.loops[id.0].parent.as_ref().map(|(p, _)| *p)
    }

    /// Offset on the parent loop where `id` is glued.
    pub fn attach_offset(&self, id: LoopId) -> Option<&Rational> {
        self.loops[id.0].parent.as_ref().map(|(_, o)| o)
    }

    pub fn children(&self, id: LoopId) -> &[LoopId] {
        &self.children[id.0]
    }

    pub fn depth(&self, id: LoopId) -> usize {
        self.depth[id.0]
    }

    /// Canonical point of a non-root loop's offset 0.
    pub fn origin(&self, id: LoopId) -> Option<&PointRef> {
        self.origins[id.0].as_ref()
    }

    /// Canonical form of `(loop, offset)`.
    pub fn canonical_point(&self, id: LoopId, offset: &Rational) -> PointRef {
        let mut id = id;
        let mut off = offset.rem_euclid(self.circumference(id));
        while off.is_zero() {
            match &self.loops[id.0].parent {
                Some((p, o)) => {
                    id = *p;
                    off = o.clone();
                }
                None => break,
            }
        }
        PointRef::new(id, off)
    }

    pub fn canonical_point_named(&self, name: &str, offset: &Rational) -> Result<PointRef> {
        Ok(self.canonical_point(self.loop_id(name)?, offset))
    }

    /// Offset of `p` along loop `id` when `p` lies on that loop.
    pub fn offset_on(&self, p: &PointRef, id: LoopId) -> Option<Rational> {
        if p.loop_id == id {
            Some(p.offset.clone())
        } else if self.origin(id) == Some(p) {
            Some(Rational::zero())
        } else {
            None
        }
    }

    /// Loops that contain the point `p`.
    pub fn loops_through(&self, p: &PointRef) -> Vec<LoopId> {
        let mut out = vec![p.loop_id];
        let mut stack = vec![p.loop_id];
        while let Some(l) = stack.pop() {
            for &c in self.children(l) {
                if self.origin(c) == Some(p) {
                    out.push(c);
                    stack.push(c);
                }
            }
        }
        out.sort();
        out
    }

    /// Distinct wedge points (points shared by two or more loops).
    pub fn wedge_points(&self) -> Vec<PointRef> {
        let mut pts: Vec<PointRef> = self.origins.iter().flatten().cloned().collect();
        pts.sort();
        pts.dedup();
        pts
    }

    /// Is `anc` an ancestor of (or equal to) `desc` in the loop tree?
    pub fn is_ancestor(&self, anc: LoopId, desc: LoopId) -> bool {
        let mut cur = desc;
        loop {
            if cur == anc {
                return true;
            }
            match self.parent(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Child of `anc` on the tree path down to `desc`, if `desc` lies strictly below `anc`.
    pub fn child_toward(&self, anc: LoopId, desc: LoopId) -> Option<LoopId> {
        let mut cur = desc;
        while let Some(p) = self.parent(cur) {
            if p == anc {
                return Some(cur);
            }
            cur = p;
        }
        None
    }

    /// Offset on `target` of the point nearest to `p`: `p` itself when it
    /// lies on `target`, otherwise the wedge point through which the tree
    /// path from `target` reaches `p`.
    pub fn retract_point(&self, p: &PointRef, target: LoopId) -> Rational {
        if p.loop_id == target {
            return p.offset.clone();
        }
        match self.child_toward(target, p.loop_id) {
            Some(c) => self
                .attach_offset(c)
                .expect("child has an attachment")
                .clone(),
            None => Rational::zero(),
        }
    }

    /// Shorter arc length between two offsets on loop `id`.
    pub fn arc_distance(&self, id: LoopId, a: &Rational, b: &Rational) -> Rational {
        let c = self.circumference(id);
        let d = (a - b).rem_euclid(c);
        let e = c - &d;
        if d < e {
            d
        } else {
            e
        }
    }

    /// Metric distance between two points. The geodesic crosses each loop
    /// between the retractions of its endpoints, so summing those arcs over
    /// all loops gives the length (loops off the path contribute zero).
    pub fn distance(&self, a: &PointRef, b: &PointRef) -> Rational {
        let mut total = Rational::zero();
        for l in self.loop_ids() {
            let ra = self.retract_point(a, l);
            let rb = self.retract_point(b, l);
            if ra != rb {
                total += &self.arc_distance(l, &ra, &rb);
            }
        }
        total
    }

    /// Tree distances from `from` to every loop.
    pub fn distances_from(&self, from: LoopId) -> Vec<usize> {
        let n = self.genus();
        let mut dist = vec![usize::MAX; n];
        dist[from.0] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(l) = queue.pop_front() {
            let mut nbrs: Vec<LoopId> = self.children(l).to_vec();
            nbrs.extend(self.parent(l));
            for m in nbrs {
                if dist[m.0] == usize::MAX {
                    dist[m.0] = dist[l.0] + 1;
                    queue.push_back(m);
                }
            }
        }
        dist
    }

    /// Maximum number of loops on a simple path in the loop tree.
    pub fn longest_loop_path(&self) -> usize {
        self.longest_path().len()
    }

    /// One longest simple path of loops, from end to end.
    pub fn longest_path(&self) -> Vec<LoopId> {
        let far = |from: LoopId| {
            let d = self.distances_from(from);
            let best = (0..d.len())
                .max_by_key(|&i| (d[i], std::cmp::Reverse(i)))
                .unwrap();
            (LoopId(best), d)
        };
        let (a, _) = far(self.root);
        let (b, da) = far(a);
        // Walk back from b to a along decreasing distance.
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            let mut nbrs: Vec<LoopId> = self.children(cur).to_vec();
            nbrs.extend(self.parent(cur));
            cur = nbrs
                .into_iter()
                .filter(|m| da[m.0] + 1 == da[cur.0])
                .min()
                .expect("tree path exists");
            path.push(cur);
        }
        path.reverse();
        path
    }

    pub fn is_path_of_loops(&self) -> bool {
        self.longest_loop_path() == self.genus()
    }

    pub fn graph_stats(&self) -> GraphStats {
        let mut loop_distances = BTreeMap::new();
        for a in self.loop_ids() {
            let d = self.distances_from(a);
            for b in self.loop_ids() {
                loop_distances.insert((self.name(a).to_string(), self.name(b).to_string()), d[b.0]);
            }
        }
        let wedge_valences = self
            .wedge_points()
            .into_iter()
            .map(|w| (self.fmt_point(&w), 2 * self.loops_through(&w).len()))
            .collect();
        GraphStats {
            genus: self.genus(),
            longest_loop_path: self.longest_loop_path(),
            loop_distances,
            wedge_valences,
        }
    }

    /// Glues a new loop of the given circumference at `at`. Existing loop
    /// ids and points remain valid on the result.
    pub fn wedge_with_loop(&self, at: &PointRef, circumference: Rational) -> Result<CactusGraph> {
        self.wedge_with_named_loop(at, circumference, None)
    }

    pub fn wedge_with_named_loop(
        &self,
        at: &PointRef,
        circumference: Rational,
        name: Option<&str>,
    ) -> Result<CactusGraph> {
        if !circumference.is_positive() {
            return Err(Error::InvalidArgument(
                "circumference must be positive".into(),
            ));
        }
        if at.loop_id.0 >= self.genus() {
            return Err(Error::InvalidArgument(
                "attachment loop does not exist".into(),
            ));
        }
        if at.offset.is_negative() || &at.offset >= self.circumference(at.loop_id) {
            return Err(Error::InvalidArgument(
                "attachment offset out of range".into(),
            ));
        }
        let at = self.canonical_point(at.loop_id, &at.offset);
        let name = match name {
            Some(n) if !self.by_name.contains_key(n) => n.to_string(),
            Some(n) => {
                return Err(Error::InvalidArgument(format!(
                    "loop id `{n}` already used"
                )))
            }
            None => {
                let mut k = self.genus() + 1;
                while self.by_name.contains_key(&format!("L{k}")) {
                    k += 1;
                }
                format!("L{k}")
            }
        };
        let mut g = self.clone();
        let id = LoopId(g.loops.len());
        g.loops.push(LoopData {
            name: name.clone(),
            circumference,
            parent: Some((at.loop_id, at.offset)),
        });
        g.by_name.insert(name, id);
        g.index_tree();
        Ok(g)
    }

    /// `name:offset` rendering of a point.
    pub fn fmt_point(&self, p: &PointRef) -> String {
        format!("{}:{}", self.name(p.loop_id), p.offset)
    }

    /// Parses `name:offset`.
    pub fn parse_point(&self, s: &str) -> Result<PointRef> {
        let (name, off) = s.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!("expected <loop>:<offset>, got `{s}`"))
        })?;
        let off: Rational = off
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("malformed rational `{off}`")))?;
        self.canonical_point_named(name, &off)
    }
}

impl fmt::Display for CactusGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    const CHAIN: &str = "loop L1 1\nloop L2 1\nattach L2 L1 1/2\n";
    const STAR: &str = "\
# central loop with three loops at A, B, C
loop O 1
loop R 7/5
loop W 5/4
loop S 9/7
attach R O 0
attach W O 1/2
attach S O 3/4
basepoint O 1/8
";

    #[test]
    fn parses_chain() {
        let g = CactusGraph::parse(CHAIN).unwrap();
        assert_eq!(g.genus(), 2);
        let l1 = g.loop_id("L1").unwrap();
        assert_eq!(g.wedge_points(), vec![PointRef::new(l1, q("1/2"))]);
        assert_eq!(g.base_point(), &PointRef::new(l1, Rational::zero()));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cyc = "loop L1 1\nloop L2 1\nloop L3 1\nattach L2 L3 0\nattach L3 L2 0\n";
        match CactusGraph::parse(cyc) {
            Err(Error::Parse { reason, line }) => {
                assert!(reason.contains("cycle"), "{reason}");
                assert!(line == 4 || line == 5);
            }
            other => panic!("expected cycle error, got {other:?}"),
        }
        let dup = "loop L1 1\nloop L1 2\n";
        assert!(matches!(
            CactusGraph::parse(dup),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad = "loop L1 1\nloop L2 x/3\n";
        assert!(matches!(
            CactusGraph::parse(bad),
            Err(Error::Parse { line: 2, .. })
        ));
        let range = "loop L1 1\nloop L2 1\nattach L2 L1 1\n";
        assert!(matches!(
            CactusGraph::parse(range),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn canonical_points() {
        let g = CactusGraph::parse(CHAIN).unwrap();
        let (l1, l2) = (g.loop_id("L1").unwrap(), g.loop_id("L2").unwrap());
        assert_eq!(g.canonical_point(l2, &q("0")), PointRef::new(l1, q("1/2")));
        assert_eq!(
            g.canonical_point(l1, &q("5/4")),
            PointRef::new(l1, q("1/4"))
        );
        assert_eq!(
            g.canonical_point(l1, &q("1/2")),
            PointRef::new(l1, q("1/2"))
        );
        let p = g.canonical_point(l2, &q("7/3"));
        assert_eq!(g.canonical_point(p.loop_id, &p.offset), p);
    }

    #[test]
    fn nested_origin_chains_climb_to_the_ancestor() {
        let g = CactusGraph::parse("loop A 2\nloop B 1\nloop C 1\nattach B A 1/3\nattach C B 0\n")
            .unwrap();
        let (a, c) = (g.loop_id("A").unwrap(), g.loop_id("C").unwrap());
        assert_eq!(g.canonical_point(c, &q("3")), PointRef::new(a, q("1/3")));
        assert_eq!(g.wedge_points().len(), 1);
        let w = g.wedge_points()[0].clone();
        assert_eq!(g.loops_through(&w).len(), 3);
    }

    #[test]
    fn retraction() {
        let g = CactusGraph::parse(CHAIN).unwrap();
        let (l1, l2) = (g.loop_id("L1").unwrap(), g.loop_id("L2").unwrap());
        assert_eq!(g.retract_point(&PointRef::new(l2, q("1/4")), l1), q("1/2"));
        assert_eq!(g.retract_point(&PointRef::new(l1, q("1/4")), l1), q("1/4"));
        assert_eq!(g.retract_point(&PointRef::new(l1, q("1/4")), l2), q("0"));

        let s = CactusGraph::parse(STAR).unwrap();
        let (r, w) = (s.loop_id("R").unwrap(), s.loop_id("W").unwrap());
        // From the right loop the path to the left loop passes A then B;
        // on the left loop it arrives through the left loop's origin B.
        assert_eq!(s.retract_point(&PointRef::new(r, q("1/3")), w), q("0"));
        let o = s.loop_id("O").unwrap();
        assert_eq!(s.retract_point(&PointRef::new(r, q("1/3")), o), q("0"));
        assert_eq!(s.retract_point(&PointRef::new(w, q("1/3")), o), q("1/2"));
    }

    #[test]
    fn distances() {
        let s = CactusGraph::parse(STAR).unwrap();
        let (o, r, w) = (
            s.loop_id("O").unwrap(),
            s.loop_id("R").unwrap(),
            s.loop_id("W").unwrap(),
        );
        // R at 1/2 is 1/2 from A; A to B is 1/2; B to W at 1 is 1/4 the short way.
        let d = s.distance(&PointRef::new(r, q("1/2")), &PointRef::new(w, q("1")));
        assert_eq!(d, q("5/4"));
        assert_eq!(
            s.distance(&PointRef::new(o, q("1/8")), &PointRef::new(o, q("7/8"))),
            q("1/4")
        );
        let p = PointRef::new(r, q("3/5"));
        assert_eq!(s.distance(&p, &p), q("0"));
    }

    #[test]
    fn stats() {
        let s = CactusGraph::parse(STAR).unwrap();
        let st = s.graph_stats();
        assert_eq!((st.genus, st.longest_loop_path), (4, 3));
        assert_eq!(st.wedge_valences.len(), 3);
        assert!(st.wedge_valences.values().all(|&v| v == 4));
        assert!(!s.is_path_of_loops());

        let path = CactusGraph::parse(
            "loop A 1\nloop B 1\nloop C 1\nloop D 1\nattach B A 1/2\nattach C B 1/3\nattach D C 1/5\n",
        )
        .unwrap();
        assert_eq!(path.longest_loop_path(), 4);
        assert!(path.is_path_of_loops());
        let st = path.graph_stats();
        assert_eq!(st.loop_distances[&("A".to_string(), "D".to_string())], 3);
    }

    #[test]
    fn six_loop_tree_has_longest_path_four() {
        let g = CactusGraph::parse(
            "loop L1 1\nloop L2 1\nloop L3 1\nloop L4 1\nloop L5 1\nloop L6 1\n\
             attach L2 L1 1/2\nattach L3 L2 1/2\nattach L4 L3 1/2\nattach L5 L2 1/4\nattach L6 L3 1/4\n",
        )
        .unwrap();
        assert_eq!(g.longest_loop_path(), 4);
        assert_eq!(g.longest_path().len(), 4);
    }

    #[test]
    fn wedging_adds_one_loop() {
        let g = CactusGraph::parse("loop L1 1\n").unwrap();
        let l1 = g.loop_id("L1").unwrap();
        let h = g
            .wedge_with_loop(&PointRef::new(l1, q("0")), q("1"))
            .unwrap();
        assert_eq!(h.genus(), 2);
        assert_eq!(h.longest_loop_path(), 2);
        assert!(h
            .wedge_with_loop(&PointRef::new(l1, q("0")), q("0"))
            .is_err());

        let chain =
            CactusGraph::parse("loop A 1\nloop B 1\nloop C 1\nattach B A 1/2\nattach C B 1/2\n")
                .unwrap();
        let w = chain.origin(chain.loop_id("C").unwrap()).unwrap().clone();
        let h = chain.wedge_with_loop(&w, q("2")).unwrap();
        assert_eq!(h.graph_stats().wedge_valences[&h.fmt_point(&w)], 6);
        let before = chain.graph_stats().loop_distances;
        let after = h.graph_stats().loop_distances;
        for (k, v) in before {
            assert_eq!(after[&k], v);
        }
    }

    #[test]
    fn text_round_trip() {
        let s = CactusGraph::parse(STAR).unwrap();
        assert_eq!(CactusGraph::parse(&s.to_text()).unwrap(), s);
    }
}
