//! Representations of bound quivers and the morphisms between them.
//!
//! An arrow `a: s -> t` acts by a `dim(t) x dim(s)` matrix. Morphisms carry one
//! matrix per vertex. Subspaces of a vertex space are passed around as
//! row-basis matrices in reduced row echelon form, which makes them canonical
//! and hashable.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{all_vectors, FMatrix};
use crate::quiver::{BoundQuiverAlgebra, QPath};

#[derive(Clone, Debug)]
pub struct Representation {
    alg: Arc<BoundQuiverAlgebra>,
    dims: Vec<usize>,
    maps: Vec<FMatrix>,
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.alg, &other.alg) && self.dims == other.dims && self.maps == other.maps
    }
}

impl Eq for Representation {}

pub(crate) fn same_algebra(a: &Arc<BoundQuiverAlgebra>, b: &Arc<BoundQuiverAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Representation {
    /// Checks matrix shapes and that every relation acts by zero.
    pub fn new(alg: Arc<BoundQuiverAlgebra>, dims: Vec<usize>, maps: Vec<FMatrix>) -> Result<Self> {
        let q = alg.quiver();
        if dims.len() != q.vertex_count() || maps.len() != q.arrows().len() {
            return Err(Error::Contract("representation data does not match the quiver".into()));
        }
        for (a, m) in q.arrows().iter().zip(&maps) {
            if m.rows() != dims[a.target] || m.cols() != dims[a.source] || m.modulus() != alg.modulus() {
                return Err(Error::Contract(format!("matrix for arrow `{}` has the wrong shape", a.name)));
            }
        }
        let rep = Representation { alg, dims, maps };
        for rel in rep.alg.relations() {
            let path = QPath {
                start: rep.alg.quiver().arrows()[rel[0]].source,
                end: rep.alg.quiver().arrows()[*rel.last().unwrap()].target,
                arrows: rel.clone(),
            };
            if !rep.path_matrix(&path).is_zero() {
                return Err(Error::Contract("representation does not satisfy the relations".into()));
            }
        }
        Ok(rep)
    }

    pub fn zero(alg: &Arc<BoundQuiverAlgebra>) -> Self {
        let p = alg.modulus();
        let maps = alg.quiver().arrows().iter().map(|_| FMatrix::zero(0, 0, p)).collect();
        Representation { alg: alg.clone(), dims: vec![0; alg.vertex_count()], maps }
    }

    pub fn simple(alg: &Arc<BoundQuiverAlgebra>, v: usize) -> Self {
        let mut dims = vec![0; alg.vertex_count()];
        dims[v] = 1;
        Self::with_zero_maps(alg, dims)
    }

    fn with_zero_maps(alg: &Arc<BoundQuiverAlgebra>, dims: Vec<usize>) -> Self {
        let p = alg.modulus();
        let maps = alg
            .quiver()
            .arrows()
            .iter()
            .map(|a| FMatrix::zero(dims[a.target], dims[a.source], p))
            .collect();
        Representation { alg: alg.clone(), dims, maps }
    }

    /// Indecomposable projective at `v`: basis the paths starting at `v`.
    pub fn projective(alg: &Arc<BoundQuiverAlgebra>, v: usize) -> Self {
        let n = alg.vertex_count();
        let mut at: Vec<Vec<&QPath>> = vec![Vec::new(); n];
        for path in alg.path_basis().iter().filter(|q| q.start == v) {
            at[path.end].push(path);
        }
        let dims: Vec<usize> = at.iter().map(Vec::len).collect();
        let mut rep = Self::with_zero_maps(alg, dims);
        for (ai, arrow) in alg.quiver().arrows().iter().enumerate() {
            for (col, path) in at[arrow.source].iter().enumerate() {
                let mut arrows = path.arrows.clone();
                arrows.push(ai);
                let ext = QPath { start: v, end: arrow.target, arrows };
                if let Some(row) = at[arrow.target].iter().position(|q| **q == ext) {
                    rep.maps[ai].set(row, col, 1);
                }
            }
        }
        rep
    }

    pub fn algebra(&self) -> &Arc<BoundQuiverAlgebra> {
        &self.alg
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn map(&self, arrow: usize) -> &FMatrix {
        &self.maps[arrow]
    }

    pub fn maps(&self) -> &[FMatrix] {
        &self.maps
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn modulus(&self) -> u32 {
        self.alg.modulus()
    }

    /// The linear map a path acts by, from `dims[start]` to `dims[end]`.
    pub fn path_matrix(&self, path: &QPath) -> FMatrix {
        let mut m = FMatrix::identity(self.dims[path.start], self.modulus());
        for &a in &path.arrows {
            m = self.maps[a].mul_unchecked(&m);
        }
        m
    }

    pub(crate) fn check_same_algebra(&self, other: &Representation) -> Result<()> {
        if same_algebra(&self.alg, &other.alg) {
            Ok(())
        } else {
            Err(Error::Contract("representations belong to different algebras".into()))
        }
    }

    /// Radical at each vertex: span of the images of incoming arrows.
    pub fn radical_spans(&self) -> Vec<FMatrix> {
        let p = self.modulus();
        (0..self.dims.len())
            .map(|v| {
                let mut rows = FMatrix::zero(0, self.dims[v], p);
                for a in self.alg.quiver().incoming(v) {
                    rows = rows.vstack(&self.maps[a].transpose()).unwrap();
                }
                rows.row_space()
            })
            .collect()
    }

    /// Dimension vector of the top `M / rad M`.
    pub fn top_dims(&self) -> Vec<usize> {
        self.radical_spans().iter().zip(&self.dims).map(|(r, d)| d - r.rows()).collect()
    }

    /// Dimension vector of the socle (common kernel of outgoing arrows).
    pub fn socle_dims(&self) -> Vec<usize> {
        let p = self.modulus();
        (0..self.dims.len())
            .map(|v| {
                let mut stacked = FMatrix::zero(0, self.dims[v], p);
                for a in self.alg.quiver().outgoing(v) {
                    stacked = stacked.vstack(&self.maps[a]).unwrap();
                }
                self.dims[v] - stacked.rank()
            })
            .collect()
    }
}

/// A direct sum together with its structural maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub sum: Representation,
    pub inclusions: Vec<RepMorphism>,
    pub projections: Vec<RepMorphism>,
}

pub fn direct_sum(alg: &Arc<BoundQuiverAlgebra>, parts: &[Representation]) -> Result<DirectSum> {
    for part in parts {
        if !same_algebra(alg, &part.alg) {
            return Err(Error::Contract("direct sum of representations over different algebras".into()));
        }
    }
    let p = alg.modulus();
    let n = alg.vertex_count();
    let dims: Vec<usize> = (0..n).map(|v| parts.iter().map(|r| r.dims[v]).sum()).collect();
    let mut sum = Representation::with_zero_maps(alg, dims.clone());
    let mut offsets = vec![0usize; n];
    let mut inclusions = Vec::with_capacity(parts.len());
    let mut projections = Vec::with_capacity(parts.len());
    for part in parts {
        for (ai, arrow) in alg.quiver().arrows().iter().enumerate() {
            sum.maps[ai].put_block(offsets[arrow.target], offsets[arrow.source], &part.maps[ai]);
        }
        let mut inc = Vec::with_capacity(n);
        let mut proj = Vec::with_capacity(n);
        for v in 0..n {
            let mut i = FMatrix::zero(dims[v], part.dims[v], p);
            i.put_block(offsets[v], 0, &FMatrix::identity(part.dims[v], p));
            proj.push(i.transpose());
            inc.push(i);
            offsets[v] += part.dims[v];
        }
        inclusions.push((part.clone(), inc));
        projections.push((part.clone(), proj));
    }
    let inclusions = inclusions
        .into_iter()
        .map(|(part, maps)| RepMorphism { source: part, target: sum.clone(), maps })
        .collect();
    let projections = projections
        .into_iter()
        .map(|(part, maps)| RepMorphism { source: sum.clone(), target: part, maps })
        .collect();
    Ok(DirectSum { sum, inclusions, projections })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMorphism {
    source: Representation,
    target: Representation,
    maps: Vec<FMatrix>,
}

impl RepMorphism {
    /// Checks shapes and the intertwining relation for every arrow.
    pub fn new(source: Representation, target: Representation, maps: Vec<FMatrix>) -> Result<Self> {
        source.check_same_algebra(&target)?;
        if maps.len() != source.dims.len() {
            return Err(Error::Contract("morphism needs one matrix per vertex".into()));
        }
        for (v, m) in maps.iter().enumerate() {
            if m.rows() != target.dims[v] || m.cols() != source.dims[v] {
                return Err(Error::Contract(format!("vertex map at {} has the wrong shape", v + 1)));
            }
        }
        let f = RepMorphism { source, target, maps };
        if !f.intertwines() {
            return Err(Error::Contract("vertex maps do not commute with the arrows".into()));
        }
        Ok(f)
    }

    pub fn intertwines(&self) -> bool {
        self.source.alg.quiver().arrows().iter().enumerate().all(|(ai, a)| {
            let lhs = self.target.maps[ai].mul_unchecked(&self.maps[a.source]);
            let rhs = self.maps[a.target].mul_unchecked(&self.source.maps[ai]);
            lhs == rhs
        })
    }

    pub fn identity(m: &Representation) -> Self {
        let p = m.modulus();
        let maps = m.dims.iter().map(|&d| FMatrix::identity(d, p)).collect();
        RepMorphism { source: m.clone(), target: m.clone(), maps }
    }

    pub fn zero(source: &Representation, target: &Representation) -> Self {
        let p = source.modulus();
        let maps = source.dims.iter().zip(&target.dims).map(|(&s, &t)| FMatrix::zero(t, s, p)).collect();
        RepMorphism { source: source.clone(), target: target.clone(), maps }
    }

    pub fn source(&self) -> &Representation {
        &self.source
    }

    pub fn target(&self) -> &Representation {
        &self.target
    }

    pub fn vertex_map(&self, v: usize) -> &FMatrix {
        &self.maps[v]
    }

    pub fn vertex_maps(&self) -> &[FMatrix] {
        &self.maps
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &RepMorphism) -> Result<RepMorphism> {
        if self.target != other.source {
            return Err(Error::Contract("composing morphisms with mismatched ends".into()));
        }
        let maps = self.maps.iter().zip(&other.maps).map(|(f, g)| g.mul_unchecked(f)).collect();
        Ok(RepMorphism { source: self.source.clone(), target: other.target.clone(), maps })
    }

    pub fn add(&self, other: &RepMorphism) -> Result<RepMorphism> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Contract("adding morphisms between different objects".into()));
        }
        let maps = self.maps.iter().zip(&other.maps).map(|(f, g)| f.add(g)).collect::<Result<_>>()?;
        Ok(RepMorphism { source: self.source.clone(), target: self.target.clone(), maps })
    }

    pub fn scale(&self, s: u32) -> RepMorphism {
        RepMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            maps: self.maps.iter().map(|m| m.scale(s)).collect(),
        }
    }

    pub fn neg(&self) -> RepMorphism {
        self.scale(self.source.modulus() - 1)
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(FMatrix::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.source.dims == self.target.dims && self.maps.iter().all(FMatrix::is_invertible)
    }

    pub fn is_mono(&self) -> bool {
        self.maps.iter().all(|m| m.rank() == m.cols())
    }

    pub fn is_epi(&self) -> bool {
        self.maps.iter().all(|m| m.rank() == m.rows())
    }

    /// Vertexwise inverse of an isomorphism.
    pub fn inverse(&self) -> Option<RepMorphism> {
        let maps = self.maps.iter().map(FMatrix::inverse).collect::<Option<Vec<_>>>()?;
        Some(RepMorphism { source: self.target.clone(), target: self.source.clone(), maps })
    }

    /// Concatenated row-major entries of all vertex maps.
    pub fn flatten(&self) -> Vec<u32> {
        self.maps.iter().flat_map(|m| m.entries().iter().copied()).collect()
    }

    /// Linear combination of morphisms with common ends.
    pub fn combination(source: &Representation, target: &Representation, terms: &[(u32, &RepMorphism)]) -> RepMorphism {
        let mut acc = RepMorphism::zero(source, target);
        for (c, f) in terms {
            if *c % source.modulus() != 0 {
                acc = acc.add(&f.scale(*c)).expect("terms share their ends");
            }
        }
        acc
    }
}

/// Morphism out of a direct sum given its components `f_i: S_i -> T`.
pub fn from_sum(sum: &DirectSum, parts: &[RepMorphism], target: &Representation) -> Result<RepMorphism> {
    let mut acc = RepMorphism::zero(&sum.sum, target);
    for (proj, f) in sum.projections.iter().zip(parts) {
        acc = acc.add(&proj.then(f)?)?;
    }
    Ok(acc)
}

/// Morphism into a direct sum given its components `f_i: S -> T_i`.
pub fn into_sum(source: &Representation, parts: &[RepMorphism], sum: &DirectSum) -> Result<RepMorphism> {
    let mut acc = RepMorphism::zero(source, &sum.sum);
    for (inc, f) in sum.inclusions.iter().zip(parts) {
        acc = acc.add(&f.then(inc)?)?;
    }
    Ok(acc)
}

/// Basis of the space of intertwiners `M -> N`.
pub fn hom_basis(m: &Representation, n: &Representation) -> Result<Vec<RepMorphism>> {
    m.check_same_algebra(n)?;
    let p = m.modulus();
    let nv = m.dims.len();
    let mut offset = vec![0usize; nv + 1];
    for v in 0..nv {
        offset[v + 1] = offset[v] + n.dims[v] * m.dims[v];
    }
    let vars = offset[nv];
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (ai, a) in m.alg.quiver().arrows().iter().enumerate() {
        let (s, t) = (a.source, a.target);
        let (ma, na) = (&m.maps[ai], &n.maps[ai]);
        // (N_a F_s - F_t M_a)[r][c] = 0
        for r in 0..n.dims[t] {
            for c in 0..m.dims[s] {
                let mut row = vec![0u32; vars];
                for i in 0..n.dims[s] {
                    let idx = offset[s] + i * m.dims[s] + c;
                    row[idx] = (row[idx] + na.get(r, i)) % p;
                }
                for j in 0..m.dims[t] {
                    let idx = offset[t] + r * m.dims[t] + j;
                    row[idx] = (row[idx] + p - ma.get(j, c)) % p;
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        FMatrix::identity(vars, p)
    } else {
        FMatrix::from_rows(&rows, vars, p)?.kernel_basis()
    };
    Ok((0..kernel.rows())
        .map(|k| {
            let x = kernel.row(k);
            let maps = (0..nv)
                .map(|v| {
                    FMatrix::from_vec(n.dims[v], m.dims[v], p, x[offset[v]..offset[v + 1]].to_vec())
                        .expect("slice length matches")
                })
                .collect();
            RepMorphism { source: m.clone(), target: n.clone(), maps }
        })
        .collect())
}

pub fn hom_dim(m: &Representation, n: &Representation) -> Result<usize> {
    Ok(hom_basis(m, n)?.len())
}

/// A basis of `Hom(M, N)` with coordinate lookup.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub source: Representation,
    pub target: Representation,
    pub basis: Vec<RepMorphism>,
    columns: FMatrix,
}

impl HomSpace {
    pub fn new(m: &Representation, n: &Representation) -> Result<Self> {
        let basis = hom_basis(m, n)?;
        let len = m.dims.iter().zip(&n.dims).map(|(a, b)| a * b).sum();
        let rows: Vec<Vec<u32>> = basis.iter().map(RepMorphism::flatten).collect();
        let columns = FMatrix::from_rows(&rows, len, m.modulus())?.transpose();
        Ok(HomSpace { source: m.clone(), target: n.clone(), basis, columns })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `f` in the basis.
    pub fn coords(&self, f: &RepMorphism) -> Result<Vec<u32>> {
        self.columns
            .solve(&f.flatten())?
            .ok_or_else(|| Error::Contract("morphism is not in this Hom space".into()))
    }

    pub fn element(&self, coeffs: &[u32]) -> RepMorphism {
        let terms: Vec<(u32, &RepMorphism)> = coeffs.iter().copied().zip(&self.basis).collect();
        RepMorphism::combination(&self.source, &self.target, &terms)
    }

    /// Every element of the space (`p^dim` of them).
    pub fn elements(&self) -> impl Iterator<Item = RepMorphism> + '_ {
        all_vectors(self.dim(), self.source.modulus()).map(move |c| self.element(&c))
    }
}

/// Subrepresentation spanned at each vertex by the rows of `spans[v]`.
#[derive(Clone, Debug)]
pub struct SubRep {
    pub rep: Representation,
    pub inclusion: RepMorphism,
    /// Canonical row bases of the subspaces.
    pub spans: Vec<FMatrix>,
}

/// Finds `X` with `A X = Y`, if one exists.
pub(crate) fn solve_columns(a: &FMatrix, y: &FMatrix) -> Option<FMatrix> {
    let mut x = FMatrix::zero(a.cols(), y.cols(), a.modulus());
    for c in 0..y.cols() {
        let col: Vec<u32> = (0..y.rows()).map(|r| y.get(r, c)).collect();
        let sol = a.solve(&col).ok()??;
        for (r, v) in sol.into_iter().enumerate() {
            x.set(r, c, v);
        }
    }
    Some(x)
}

pub fn subrep(m: &Representation, spans: Vec<FMatrix>) -> Result<SubRep> {
    let spans: Vec<FMatrix> = spans.iter().map(FMatrix::row_space).collect();
    let p = m.modulus();
    let dims: Vec<usize> = spans.iter().map(FMatrix::rows).collect();
    let cols: Vec<FMatrix> = spans.iter().map(FMatrix::transpose).collect();
    let mut maps = Vec::with_capacity(m.maps.len());
    for (ai, a) in m.alg.quiver().arrows().iter().enumerate() {
        let image = m.maps[ai].mul_unchecked(&cols[a.source]);
        let x = solve_columns(&cols[a.target], &image)
            .ok_or_else(|| Error::Contract("subspaces are not stable under the arrows".into()))?;
        maps.push(x);
    }
    let rep = Representation { alg: m.alg.clone(), dims, maps };
    let inclusion = RepMorphism { source: rep.clone(), target: m.clone(), maps: cols };
    debug_assert!(inclusion.intertwines());
    let _ = p;
    Ok(SubRep { rep, inclusion, spans })
}

/// Quotient of a representation by stable subspaces, with a chosen section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub rep: Representation,
    pub projection: RepMorphism,
    /// Per vertex, a linear (not module) section of the projection.
    pub sections: Vec<FMatrix>,
}

impl Quotient {
    /// The morphism `Q -> T` induced by `g: M -> T` that vanishes on the subobject.
    pub fn induced(&self, g: &RepMorphism) -> Result<RepMorphism> {
        if g.source != *self.projection.source() {
            return Err(Error::Contract("induced map needs a morphism out of the ambient object".into()));
        }
        let maps = g.maps.iter().zip(&self.sections).map(|(gv, s)| gv.mul_unchecked(s)).collect();
        let h = RepMorphism { source: self.rep.clone(), target: g.target.clone(), maps };
        if self.projection.then(&h)? != *g {
            return Err(Error::Contract("morphism does not vanish on the subobject".into()));
        }
        Ok(h)
    }
}

pub fn quotient(m: &Representation, spans: &[FMatrix]) -> Result<Quotient> {
    let p = m.modulus();
    let mut projs = Vec::with_capacity(spans.len());
    let mut sections = Vec::with_capacity(spans.len());
    for (v, span) in spans.iter().enumerate() {
        let d = m.dims[v];
        let (basis, pivots) = span.rref_with_pivots();
        let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
        let mut q = FMatrix::zero(free.len(), d, p);
        let mut s = FMatrix::zero(d, free.len(), p);
        for (row, &j) in free.iter().enumerate() {
            q.set(row, j, 1);
            s.set(j, row, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                q.set(row, pc, (p - basis.get(i, j)) % p);
            }
        }
        projs.push(q);
        sections.push(s);
    }
    let dims: Vec<usize> = projs.iter().map(FMatrix::rows).collect();
    let maps: Vec<FMatrix> = m
        .alg
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| projs[a.target].mul_unchecked(&m.maps[ai]).mul_unchecked(&sections[a.source]))
        .collect();
    let rep = Representation { alg: m.alg.clone(), dims, maps };
    let projection = RepMorphism { source: m.clone(), target: rep.clone(), maps: projs };
    if !projection.intertwines() {
        return Err(Error::Contract("quotient by subspaces that are not a subrepresentation".into()));
    }
    Ok(Quotient { rep, projection, sections })
}

/// Kernel with its inclusion.
pub fn kernel_of(f: &RepMorphism) -> Result<SubRep> {
    let spans = f.maps.iter().map(FMatrix::kernel_basis).collect();
    subrep(&f.source, spans)
}

/// Image with the factorisation `f = mono ∘ epi`.
pub struct Image {
    pub sub: SubRep,
    pub epi: RepMorphism,
}

pub fn image_of(f: &RepMorphism) -> Result<Image> {
    let spans = f.maps.iter().map(FMatrix::transpose).collect();
    let sub = subrep(&f.target, spans)?;
    let maps = f
        .maps
        .iter()
        .zip(&sub.inclusion.maps)
        .map(|(fv, iv)| solve_columns(iv, fv).expect("image contains the columns of f"))
        .collect();
    let epi = RepMorphism { source: f.source.clone(), target: sub.rep.clone(), maps };
    Ok(Image { sub, epi })
}

pub fn cokernel_of(f: &RepMorphism) -> Result<Quotient> {
    let spans: Vec<FMatrix> = f.maps.iter().map(|m| m.transpose().row_space()).collect();
    quotient(&f.target, &spans)
}

/// Sum of the images of all morphisms from members of `sources` into `x`.
pub fn trace(sources: &[Representation], x: &Representation) -> Result<SubRep> {
    let p = x.modulus();
    let mut spans: Vec<FMatrix> = x.dims.iter().map(|&d| FMatrix::zero(0, d, p)).collect();
    for s in sources {
        for h in hom_basis(s, x)? {
            for (v, span) in spans.iter_mut().enumerate() {
                *span = span.vstack(&h.maps[v].transpose())?;
            }
        }
    }
    subrep(x, spans)
}

/// Whether `x` embeds into a finite direct sum of members of `targets`.
pub fn embeds_in_add(x: &Representation, targets: &[Representation]) -> Result<bool> {
    let p = x.modulus();
    let mut stacked: Vec<FMatrix> = x.dims.iter().map(|&d| FMatrix::zero(0, d, p)).collect();
    for t in targets {
        for h in hom_basis(x, t)? {
            for (v, st) in stacked.iter_mut().enumerate() {
                *st = st.vstack(&h.maps[v])?;
            }
        }
    }
    Ok(stacked.iter().zip(&x.dims).all(|(m, &d)| m.rank() == d))
}

/// Projective cover built from a basis of the top.
pub fn projective_cover(m: &Representation) -> Result<RepMorphism> {
    let alg = m.alg.clone();
    let mut parts = Vec::new();
    let mut comps = Vec::new();
    for (v, rad) in m.radical_spans().iter().enumerate() {
        let (_, pivots) = rad.rref_with_pivots();
        let pv = Representation::projective(&alg, v);
        let paths: Vec<&QPath> = alg.path_basis().iter().filter(|q| q.start == v).collect();
        for j in (0..m.dims[v]).filter(|c| !pivots.contains(c)) {
            // generator e_v of P(v) goes to the j-th standard vector of M_v
            let mut maps: Vec<FMatrix> = (0..m.dims.len())
                .map(|w| FMatrix::zero(m.dims[w], pv.dims[w], m.modulus()))
                .collect();
            let mut idx_at = vec![0usize; m.dims.len()];
            for path in &paths {
                let image = m.path_matrix(path);
                let col = idx_at[path.end];
                for r in 0..m.dims[path.end] {
                    maps[path.end].set(r, col, image.get(r, j));
                }
                idx_at[path.end] += 1;
            }
            parts.push(pv.clone());
            comps.push(RepMorphism { source: pv.clone(), target: m.clone(), maps });
        }
    }
    let sum = direct_sum(&alg, &parts)?;
    let cover = from_sum(&sum, &comps, m)?;
    if !cover.intertwines() || !cover.is_epi() {
        return Err(Error::Falsification("projective cover is not an epimorphism".into()));
    }
    Ok(cover)
}

/// `Ext^1(B, A)` computed from a projective presentation of `B`.
#[derive(Clone, Debug)]
pub struct Ext1 {
    pub b: Representation,
    pub a: Representation,
    /// `P0 -> B`.
    pub cover: RepMorphism,
    /// `ΩB -> P0`.
    pub syzygy: RepMorphism,
    /// Morphisms `ΩB -> A` whose classes form a basis of Ext^1.
    pub class_reps: Vec<RepMorphism>,
    hom: HomSpace,
    /// Row basis (RREF) of the image of `Hom(P0, A)` in coordinates of `hom`.
    inner: FMatrix,
}

impl Ext1 {
    pub fn compute(b: &Representation, a: &Representation) -> Result<Self> {
        b.check_same_algebra(a)?;
        let cover = projective_cover(b)?;
        let syz = kernel_of(&cover)?;
        let syzygy = syz.inclusion.clone();
        let hom = HomSpace::new(&syz.rep, a)?;
        let p = a.modulus();
        let mut rows = Vec::new();
        for g in hom_basis(cover.source(), a)? {
            rows.push(hom.coords(&syzygy.then(&g)?)?);
        }
        let inner = FMatrix::from_rows(&rows, hom.dim(), p)?.row_space();
        let (_, pivots) = inner.rref_with_pivots();
        let class_reps = (0..hom.dim())
            .filter(|j| !pivots.contains(j))
            .map(|j| hom.basis[j].clone())
            .collect();
        Ok(Ext1 { b: b.clone(), a: a.clone(), cover, syzygy, class_reps, hom, inner })
    }

    pub fn dim(&self) -> usize {
        self.class_reps.len()
    }

    /// Morphism `ΩB -> A` representing the class with the given coordinates.
    pub fn realize(&self, class: &[u32]) -> RepMorphism {
        let terms: Vec<(u32, &RepMorphism)> = class.iter().copied().zip(&self.class_reps).collect();
        RepMorphism::combination(self.syzygy.source(), &self.a, &terms)
    }

    /// Coordinates of the class of `h: ΩB -> A`.
    pub fn class_of(&self, h: &RepMorphism) -> Result<Vec<u32>> {
        let p = self.a.modulus();
        let mut x = self.hom.coords(h)?;
        let (_, pivots) = self.inner.rref_with_pivots();
        for (i, &pc) in pivots.iter().enumerate() {
            let c = x[pc] as u64;
            if c == 0 {
                continue;
            }
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = ((*xj as u64 + (p as u64 - c) * self.inner.get(i, j) as u64) % p as u64) as u32;
            }
        }
        Ok((0..x.len()).filter(|j| !pivots.contains(j)).map(|j| x[j]).collect())
    }

    /// Every class vector of the group.
    pub fn classes(&self) -> impl Iterator<Item = Vec<u32>> {
        all_vectors(self.dim(), self.a.modulus())
    }

    /// Middle term of the extension `0 -> A -> E -> B -> 0` with the given class.
    pub fn middle_term(&self, class: &[u32]) -> Result<Extension> {
        let alg = self.a.alg.clone();
        let h = self.realize(class);
        let p0 = self.cover.source().clone();
        let sum = direct_sum(&alg, &[p0.clone(), self.a.clone()])?;
        let omega = self.syzygy.source();
        let phi = into_sum(omega, &[self.syzygy.clone(), h.neg()], &sum)?;
        let q = cokernel_of(&phi)?;
        let mono = sum.inclusions[1].then(&q.projection)?;
        let to_b = from_sum(&sum, &[self.cover.clone(), RepMorphism::zero(&self.a, &self.b)], &self.b)?;
        let epi = q.induced(&to_b)?;
        let ext = Extension { middle: q.rep, mono, epi };
        ext.verify()?;
        Ok(ext)
    }
}

/// A short exact sequence `0 -> A -> E -> B -> 0`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub middle: Representation,
    pub mono: RepMorphism,
    pub epi: RepMorphism,
}

impl Extension {
    pub fn verify(&self) -> Result<()> {
        let ok = self.mono.is_mono()
            && self.epi.is_epi()
            && self.mono.then(&self.epi)?.is_zero()
            && self.mono.source().total_dim() + self.epi.target().total_dim() == self.middle.total_dim();
        if ok {
            Ok(())
        } else {
            Err(Error::Falsification("middle term does not fit in a short exact sequence".into()))
        }
    }
}

/// Exhaustive search for an invertible intertwiner.
pub fn is_isomorphic(m: &Representation, n: &Representation) -> Result<bool> {
    m.check_same_algebra(n)?;
    if m.dims != n.dims {
        return Ok(false);
    }
    if m.is_zero() {
        return Ok(true);
    }
    let space = HomSpace::new(m, n)?;
    let size = (m.modulus() as f64).powi(space.dim() as i32);
    if size > (1u64 << 22) as f64 {
        return Err(Error::CapExceeded(format!(
            "isomorphism search over a Hom space of dimension {}",
            space.dim()
        )));
    }
    let found = space.elements().any(|f| f.is_iso());
    Ok(found)
}
