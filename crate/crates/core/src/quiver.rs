//! Bound quiver algebras with monomial relations.
//!
//! Vertices are 0-based internally and 1-based in every user-facing string.
//! A path is stored in application order: `arrows[0]` is applied first.

use std::collections::{HashSet, VecDeque};
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::is_prime;

pub const DEFAULT_PATH_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertex_count: usize,
    arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertex_count: usize, arrows: Vec<Arrow>) -> Result<Self> {
        let mut names = HashSet::new();
        for a in &arrows {
            if !names.insert(a.name.as_str()) {
                return Err(Error::Schema(format!("duplicate arrow name `{}`", a.name)));
            }
            if a.source >= vertex_count || a.target >= vertex_count {
                return Err(Error::Schema(format!(
                    "arrow `{}` has an endpoint outside 1..={vertex_count}",
                    a.name
                )));
            }
        }
        Ok(Quiver { vertex_count, arrows })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Arrows ending at `v`.
    pub fn incoming(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.target == v).map(|(i, _)| i)
    }

    pub fn outgoing(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows.iter().enumerate().filter(move |(_, a)| a.source == v).map(|(i, _)| i)
    }
}

/// A path of the quiver; `arrows` is in application order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPath {
    pub start: usize,
    pub end: usize,
    pub arrows: Vec<usize>,
}

impl QPath {
    pub fn trivial(v: usize) -> Self {
        QPath { start: v, end: v, arrows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    fn contains_subpath(&self, sub: &[usize]) -> bool {
        !sub.is_empty() && self.arrows.windows(sub.len()).any(|w| w == sub)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundQuiverAlgebra {
    name: String,
    quiver: Quiver,
    /// Monomial relations, each in application order.
    relations: Vec<Vec<usize>>,
    p: u32,
    path_basis: Vec<QPath>,
}

impl BoundQuiverAlgebra {
    /// Validates relations and enumerates the path basis breadth-first.
    pub fn build(name: &str, quiver: Quiver, relations: Vec<Vec<usize>>, p: u32) -> Result<Self> {
        Self::build_with_cap(name, quiver, relations, p, DEFAULT_PATH_CAP)
    }

    pub fn build_with_cap(
        name: &str,
        quiver: Quiver,
        relations: Vec<Vec<usize>>,
        p: u32,
        cap: usize,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Schema(format!("field size {p} is not prime")));
        }
        for rel in &relations {
            if rel.len() < 2 {
                return Err(Error::Schema(
                    "relations must be paths of length at least 2".to_string(),
                ));
            }
            for w in rel.windows(2) {
                let (first, second) = (&quiver.arrows[w[0]], &quiver.arrows[w[1]]);
                if first.target != second.source {
                    return Err(Error::Schema(format!(
                        "relation is not composable: `{}` ends at {} but `{}` starts at {} \
                         (relation arrays list arrow names as a composition, rightmost applied first)",
                        first.name,
                        first.target + 1,
                        second.name,
                        second.source + 1
                    )));
                }
            }
        }

        let mut basis = Vec::new();
        let mut queue: VecDeque<QPath> = (0..quiver.vertex_count).map(QPath::trivial).collect();
        while let Some(path) = queue.pop_front() {
            if basis.len() >= cap {
                return Err(Error::UnsupportedAlgebra(format!(
                    "path basis exceeds {cap} paths; the algebra is infinite-dimensional or too large"
                )));
            }
            for a in quiver.outgoing(path.end) {
                let mut arrows = path.arrows.clone();
                arrows.push(a);
                let ext = QPath { start: path.start, end: quiver.arrows[a].target, arrows };
                // prefixes already avoid every relation, so only suffixes need checking
                let killed = relations.iter().any(|r| ext.arrows.ends_with(r));
                if !killed {
                    queue.push_back(ext);
                }
            }
            basis.push(path);
        }
        basis.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(BoundQuiverAlgebra { name: name.to_string(), quiver, relations, p, path_basis: basis })
    }

    /// `lineA:n` (linear quiver 1 <- 2 <- ... <- n) or `paperNakayama`
    /// (lineA:3 modulo the composite 3 -> 2 -> 1).
    pub fn builtin(name: &str) -> Result<Self> {
        if let Some(n) = name.strip_prefix("lineA:") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Usage(format!("bad vertex count in `{name}`")))?;
            if n == 0 {
                return Err(Error::Usage("lineA needs at least one vertex".into()));
            }
            return Self::build(name, linear_quiver(n), Vec::new(), 2);
        }
        if name == "paperNakayama" {
            let q = linear_quiver(3);
            // a1 : 2 -> 1 after a2 : 3 -> 2
            let rel = vec![q.arrow_index("a2").unwrap(), q.arrow_index("a1").unwrap()];
            return Self::build(name, q, vec![rel], 2);
        }
        Err(Error::Usage(format!(
            "unknown builtin algebra `{name}` (expected lineA:<n> or paperNakayama)"
        )))
    }

    /// Loads a builtin name or a JSON algebra file.
    pub fn load(source: &str) -> Result<Self> {
        if source.starts_with("lineA:") || source == "paperNakayama" {
            return Self::builtin(source);
        }
        let path = FsPath::new(source);
        if !path.exists() {
            return Err(Error::Usage(format!(
                "`{source}` is neither a builtin algebra nor an existing file"
            )));
        }
        let text = std::fs::read_to_string(path)?;
        let file: AlgebraFile = serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{source}: {e}")))?;
        file.into_algebra(source)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn relations(&self) -> &[Vec<usize>] {
        &self.relations
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn path_basis(&self) -> &[QPath] {
        &self.path_basis
    }

    pub fn dim(&self) -> usize {
        self.path_basis.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.quiver.vertex_count
    }

    pub fn is_hereditary(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn contains_path(&self, path: &QPath) -> bool {
        self.path_basis.binary_search_by(|q| q.len().cmp(&path.len()).then_with(|| q.cmp(path))).is_ok()
    }

    /// Every prefix and suffix of a basis path is again a basis path.
    pub fn basis_is_truncation_closed(&self) -> bool {
        self.path_basis.iter().all(|path| {
            (0..=path.len()).all(|k| {
                let prefix = self.subpath(path, 0, k);
                let suffix = self.subpath(path, k, path.len());
                self.contains_path(&prefix) && self.contains_path(&suffix)
            })
        })
    }

    pub fn basis_avoids_relations(&self) -> bool {
        self.path_basis
            .iter()
            .all(|p| self.relations.iter().all(|r| !p.contains_subpath(r)))
    }

    fn subpath(&self, path: &QPath, from: usize, to: usize) -> QPath {
        let arrows = path.arrows[from..to].to_vec();
        let start = if from == 0 { path.start } else { self.quiver.arrows[path.arrows[from - 1]].target };
        let end = if to == 0 { path.start } else { self.quiver.arrows[path.arrows[to - 1]].target };
        QPath { start, end, arrows }
    }

    /// Human-readable path name, written as a composition (rightmost first).
    pub fn path_name(&self, path: &QPath) -> String {
        if path.is_empty() {
            return format!("e{}", path.start + 1);
        }
        path.arrows
            .iter()
            .rev()
            .map(|&a| self.quiver.arrows[a].name.as_str())
            .collect::<Vec<_>>()
            .join("*")
    }

    /// If the quiver is a single directed path through every vertex, the vertex
    /// sequence along it.
    pub fn linear_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        if self.quiver.arrows.len() + 1 != n {
            return None;
        }
        let mut indeg = vec![0; n];
        let mut next = vec![None; n];
        for a in &self.quiver.arrows {
            indeg[a.target] += 1;
            if next[a.source].replace(a.target).is_some() {
                return None;
            }
        }
        if indeg.iter().any(|&d| d > 1) {
            return None;
        }
        let mut v = (0..n).find(|&v| indeg[v] == 0)?;
        let mut order = vec![v];
        while let Some(w) = next[v] {
            order.push(w);
            v = w;
        }
        (order.len() == n).then_some(order)
    }

    /// Arrow index from `u` to `v`, if any.
    pub fn arrow_between(&self, u: usize, v: usize) -> Option<usize> {
        self.quiver.arrows.iter().position(|a| a.source == u && a.target == v)
    }
}

fn linear_quiver(n: usize) -> Quiver {
    let arrows = (1..n)
        .map(|i| Arrow { name: format!("a{i}"), source: i, target: i - 1 })
        .collect();
    Quiver::new(n, arrows).expect("linear quiver is well formed")
}

/// On-disk algebra description. Vertices are 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub vertices: usize,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
    #[serde(default = "default_field")]
    pub field: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

fn default_field() -> u32 {
    2
}

impl AlgebraFile {
    pub fn into_algebra(self, name: &str) -> Result<BoundQuiverAlgebra> {
        let mut arrows = Vec::with_capacity(self.arrows.len());
        for a in &self.arrows {
            if a.from == 0 || a.to == 0 {
                return Err(Error::Schema(format!("arrow `{}`: vertices are numbered from 1", a.name)));
            }
            arrows.push(Arrow { name: a.name.clone(), source: a.from - 1, target: a.to - 1 });
        }
        let quiver = Quiver::new(self.vertices, arrows)?;
        let mut relations = Vec::new();
        for rel in &self.relations {
            let mut idx = Vec::with_capacity(rel.len());
            // written as a composition: the rightmost arrow is applied first
            for name in rel.iter().rev() {
                idx.push(quiver.arrow_index(name).ok_or_else(|| {
                    Error::Schema(format!("relation mentions unknown arrow `{name}`"))
                })?);
            }
            relations.push(idx);
        }
        BoundQuiverAlgebra::build(name, quiver, relations, self.field)
    }
}
