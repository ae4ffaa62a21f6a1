//! Mixed graphs with per-endpoint edge marks.
//!
//! One type houses ADMGs, MAGs and PAGs; [`GraphClass`] names the role a
//! graph is being used in. Marks are stored densely, `marks[u * p + v]`
//! holding the mark at `v` on the edge `u *-* v`, and every setter keeps both
//! halves of an edge in sync.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::vars::{VarSet, MAX_VARS};

/// An edge endpoint mark.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Mark {
    Circle,
    Tail,
    Arrow,
}

/// The role a [`MixedGraph`] is used in.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphClass {
    Admg,
    Mag,
    Pag,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("graph has {0} vertices, at most 64 are supported")]
    TooManyVertices(usize),
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge {0} *-* {1} is undirected, selection bias is not supported")]
    Undirected(usize, usize),
    #[error("graph is not a valid {0:?}: {1}")]
    ClassMismatch(GraphClass, &'static str),
    #[error("vertices {0} and {1} are adjacent")]
    Adjacent(usize, usize),
    #[error("circle component is not chordal")]
    NotChordal,
    #[error("completed graph is not a maximal ancestral graph")]
    NoValidMag,
    #[error("malformed query: {0}")]
    BadQuery(&'static str),
    #[error("no separator for non-adjacent pair ({0}, {1})")]
    NotMaximal(usize, usize),
}

/// A graph over vertices `0..p` whose edges carry a mark at each endpoint.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MixedGraph {
    p: usize,
    marks: Vec<Option<Mark>>,
}

impl MixedGraph {
    /// Edgeless graph on `p` vertices.
    pub fn new(p: usize) -> Self {
        assert!(p <= MAX_VARS, "at most {MAX_VARS} vertices");
        MixedGraph {
            p,
            marks: vec![None; p * p],
        }
    }

    /// Complete graph with `mark` at every endpoint.
    pub fn complete(p: usize, mark: Mark) -> Self {
        let mut g = Self::new(p);
        for u in 0..p {
            for v in u + 1..p {
                g.set_edge(u, v, mark, mark);
            }
        }
        g
    }

    pub fn n_vertices(&self) -> usize {
        self.p
    }

    pub fn vertices(&self) -> VarSet {
        VarSet::full(self.p)
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.p {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.marks[u * self.p + v].is_some()
    }

    /// Mark at `v` on the edge `u *-* v`, or `None` if not adjacent.
    #[inline]
    pub fn mark(&self, u: usize, v: usize) -> Option<Mark> {
        self.marks[u * self.p + v]
    }

    /// `u *-* v` with `at_u` at `u` and `at_v` at `v`. Replaces any
    /// existing edge.
    pub fn set_edge(&mut self, u: usize, v: usize, at_u: Mark, at_v: Mark) {
        assert!(u != v, "self loop");
        self.marks[v * self.p + u] = Some(at_u);
        self.marks[u * self.p + v] = Some(at_v);
    }

    /// Changes the mark at `v` on an existing edge `u *-* v`.
    pub fn set_mark(&mut self, u: usize, v: usize, m: Mark) {
        debug_assert!(self.adjacent(u, v));
        self.marks[u * self.p + v] = Some(m);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.marks[u * self.p + v] = None;
        self.marks[v * self.p + u] = None;
    }

    /// `u -> v`
    pub fn add_directed(&mut self, u: usize, v: usize) {
        self.set_edge(u, v, Mark::Tail, Mark::Arrow);
    }

    /// `u <-> v`
    pub fn add_bidirected(&mut self, u: usize, v: usize) {
        self.set_edge(u, v, Mark::Arrow, Mark::Arrow);
    }

    /// `u -> v`: tail at `u`, arrowhead at `v`.
    #[inline]
    pub fn is_directed(&self, u: usize, v: usize) -> bool {
        self.mark(v, u) == Some(Mark::Tail) && self.mark(u, v) == Some(Mark::Arrow)
    }

    #[inline]
    pub fn is_bidirected(&self, u: usize, v: usize) -> bool {
        self.mark(v, u) == Some(Mark::Arrow) && self.mark(u, v) == Some(Mark::Arrow)
    }

    pub fn neighbors(&self, v: usize) -> VarSet {
        let row = &self.marks[v * self.p..(v + 1) * self.p];
        row.iter()
            .enumerate()
            .filter(|(_, m)| m.is_some())
            .map(|(u, _)| u)
            .collect()
    }

    /// Vertices `u` with `u -> v`.
    pub fn parents(&self, v: usize) -> VarSet {
        self.neighbors(v)
            .iter()
            .filter(|&u| self.is_directed(u, v))
            .collect()
    }

    /// Edges as `(u, v, mark at u, mark at v)` with `u < v`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Mark, Mark)> + '_ {
        (0..self.p).flat_map(move |u| {
            (u + 1..self.p).filter_map(move |v| {
                let at_v = self.mark(u, v)?;
                let at_u = self.mark(v, u)?;
                Some((u, v, at_u, at_v))
            })
        })
    }

    pub fn n_edges(&self) -> usize {
        self.marks.iter().filter(|m| m.is_some()).count() / 2
    }

    pub fn has_circles(&self) -> bool {
        self.marks.contains(&Some(Mark::Circle))
    }

    /// Same adjacencies with every endpoint set to a circle.
    pub fn circle_skeleton(&self) -> MixedGraph {
        let mut g = MixedGraph::new(self.p);
        for (u, v, _, _) in self.edges() {
            g.set_edge(u, v, Mark::Circle, Mark::Circle);
        }
        g
    }

    /// Unordered adjacent pairs `(u, v)` with `u < v`.
    pub fn skeleton_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges().map(|(u, v, _, _)| (u, v))
    }

    /// Vertices with a directed path into some member of `set`, including
    /// `set` itself. Only fully directed edges (`->`) count.
    pub fn ancestors_of(&self, set: VarSet) -> VarSet {
        let mut anc = set;
        let mut stack: Vec<usize> = set.iter().collect();
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !anc.contains(u) && self.is_directed(u, v) {
                    anc.insert(u);
                    stack.push(u);
                }
            }
        }
        anc
    }

    /// Checks the mark pattern against a class: no tail-tail edges anywhere,
    /// and no circles for MAGs and ADMGs.
    pub fn conforms(&self, class: GraphClass) -> Result<(), GraphError> {
        for (u, v, mu, mv) in self.edges() {
            if mu == Mark::Tail && mv == Mark::Tail {
                return Err(GraphError::Undirected(u, v));
            }
            if class != GraphClass::Pag && (mu == Mark::Circle || mv == Mark::Circle) {
                return Err(GraphError::ClassMismatch(class, "circle mark present"));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MixedGraph({}; ", self.p)?;
        let mut first = true;
        for (u, v, mu, mv) in self.edges() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{u} {}-{} {v}", near_char(mu), far_char(mv))?;
        }
        f.write_str(")")
    }
}

/// Text symbol for a mark at the near (left) endpoint.
pub fn near_char(m: Mark) -> char {
    match m {
        Mark::Circle => 'o',
        Mark::Tail => '-',
        Mark::Arrow => '<',
    }
}

/// Text symbol for a mark at the far (right) endpoint.
pub fn far_char(m: Mark) -> char {
    match m {
        Mark::Circle => 'o',
        Mark::Tail => '-',
        Mark::Arrow => '>',
    }
}

pub fn parse_near(c: char) -> Option<Mark> {
    match c {
        'o' => Some(Mark::Circle),
        '-' => Some(Mark::Tail),
        '<' => Some(Mark::Arrow),
        _ => None,
    }
}

pub fn parse_far(c: char) -> Option<Mark> {
    match c {
        'o' => Some(Mark::Circle),
        '-' => Some(Mark::Tail),
        '>' => Some(Mark::Arrow),
        _ => None,
    }
}
