//! Bounded complexes of representations, chain maps, mapping cones and
//! morphisms up to homotopy.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::catalog::IndCatalog;
use crate::error::{Error, Result};
use crate::linalg::{all_vectors, FMatrix};
use crate::quiver::BoundQuiverAlgebra;
use crate::rep::{
    direct_sum, kernel_of, projective_cover, quotient, same_algebra, solve_columns, HomSpace, RepMorphism,
    Representation,
};

/// A bounded complex `X^lo -> ... -> X^hi`; `diffs[i]` goes from `terms[i]`
/// to `terms[i + 1]` and every term outside the stored range is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    alg: Arc<BoundQuiverAlgebra>,
    lo: i32,
    terms: Vec<Representation>,
    diffs: Vec<RepMorphism>,
    zero: Representation,
}

impl Complex {
    /// Checks the ends of every differential and `d ∘ d = 0`.
    pub fn new(
        alg: &Arc<BoundQuiverAlgebra>,
        lo: i32,
        terms: Vec<Representation>,
        diffs: Vec<RepMorphism>,
    ) -> Result<Self> {
        if diffs.len() != terms.len().saturating_sub(1) {
            return Err(Error::Contract("a complex needs one differential between each pair of terms".into()));
        }
        if terms.iter().any(|t| !same_algebra(alg, t.algebra())) {
            return Err(Error::Contract("complex with terms over a different algebra".into()));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.source() != &terms[i] || d.target() != &terms[i + 1] {
                return Err(Error::Contract(format!("differential in degree {} has the wrong ends", lo + i as i32)));
            }
        }
        for i in 1..diffs.len() {
            if !diffs[i - 1].then(&diffs[i])?.is_zero() {
                return Err(Error::Contract(format!("d∘d is not zero at degree {}", lo + i as i32 - 1)));
            }
        }
        Ok(Complex { alg: alg.clone(), lo, terms, diffs, zero: Representation::zero(alg) })
    }

    pub fn zero(alg: &Arc<BoundQuiverAlgebra>) -> Self {
        Complex { alg: alg.clone(), lo: 0, terms: Vec::new(), diffs: Vec::new(), zero: Representation::zero(alg) }
    }

    /// `m` concentrated in `degree`.
    pub fn stalk(m: &Representation, degree: i32) -> Self {
        let alg = m.algebra();
        Complex { alg: alg.clone(), lo: degree, terms: vec![m.clone()], diffs: Vec::new(), zero: Representation::zero(alg) }
    }

    pub fn algebra(&self) -> &Arc<BoundQuiverAlgebra> {
        &self.alg
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Last stored degree; `lo - 1` for an empty complex.
    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32 - 1
    }

    pub fn terms(&self) -> &[Representation] {
        &self.terms
    }

    pub fn term(&self, k: i32) -> &Representation {
        if k < self.lo || k > self.hi() {
            &self.zero
        } else {
            &self.terms[(k - self.lo) as usize]
        }
    }

    /// `d^k: X^k -> X^{k+1}`.
    pub fn diff(&self, k: i32) -> RepMorphism {
        if k < self.lo || k >= self.hi() {
            RepMorphism::zero(self.term(k), self.term(k + 1))
        } else {
            self.diffs[(k - self.lo) as usize].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(Representation::is_zero)
    }

    /// `X[s]`: `X[s]^k = X^{k+s}` with the differential multiplied by `(-1)^s`.
    pub fn shift(&self, s: i32) -> Complex {
        let diffs = if s % 2 == 0 { self.diffs.clone() } else { self.diffs.iter().map(RepMorphism::neg).collect() };
        Complex { lo: self.lo - s, diffs, ..self.clone() }
    }

    /// Alternating sum of the dimension vectors of the terms.
    pub fn euler(&self) -> Vec<i64> {
        let mut chi = vec![0i64; self.alg.vertex_count()];
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if (self.lo + i as i32).rem_euclid(2) == 0 { 1 } else { -1 };
            for (c, &d) in chi.iter_mut().zip(t.dims()) {
                *c += sign * d as i64;
            }
        }
        chi
    }

    /// `ker d^k / im d^{k-1}`.
    pub fn cohomology(&self, k: i32) -> Result<Representation> {
        let cycles = kernel_of(&self.diff(k))?;
        let incoming = self.diff(k - 1);
        let spans = (0..self.alg.vertex_count())
            .map(|v| {
                solve_columns(cycles.inclusion.vertex_map(v), incoming.vertex_map(v))
                    .map(|x| x.transpose())
                    .ok_or_else(|| Error::Contract(format!("image of d^{} is not inside ker d^{k}", k - 1)))
            })
            .collect::<Result<Vec<FMatrix>>>()?;
        Ok(quotient(&cycles.rep, &spans)?.rep)
    }

    /// Catalog multiplicities of each nonzero cohomology. Over a hereditary
    /// algebra this determines the complex up to isomorphism in the derived
    /// category.
    pub fn cohomology_decomposition(&self, cat: &IndCatalog) -> Result<BTreeMap<i32, Vec<usize>>> {
        if !self.alg.is_hereditary() {
            return Err(Error::UnsupportedAlgebra(format!(
                "{} has relations; complexes are only modelled by their cohomology over hereditary algebras",
                self.alg.name()
            )));
        }
        let mut out = BTreeMap::new();
        for k in self.lo..=self.hi() {
            let h = self.cohomology(k)?;
            if !h.is_zero() {
                out.insert(k, cat.decompose(&h)?);
            }
        }
        Ok(out)
    }

    /// Indecomposable stalk summands `(member, degree)`, repeated by
    /// multiplicity and sorted.
    pub fn stalks(&self, cat: &IndCatalog) -> Result<Vec<(usize, i32)>> {
        let mut out = Vec::new();
        for (k, mult) in self.cohomology_decomposition(cat)? {
            for (i, &m) in mult.iter().enumerate() {
                out.extend(std::iter::repeat((i, k)).take(m));
            }
        }
        out.sort_by_key(|&(i, k)| (k, i));
        Ok(out)
    }

    pub fn is_acyclic(&self) -> Result<bool> {
        for k in self.lo..=self.hi() {
            if !self.cohomology(k)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Minimal projective resolution `ΩM -> P0` of `m`, with `P0` in `degree`.
pub fn resolved_stalk(m: &Representation, degree: i32) -> Result<Complex> {
    let cover = projective_cover(m)?;
    let syzygy = kernel_of(&cover)?;
    Complex::new(m.algebra(), degree - 1, vec![syzygy.rep, cover.source().clone()], vec![syzygy.inclusion])
}

/// A morphism of complexes, stored over the union of the two degree ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: Complex,
    target: Complex,
    lo: i32,
    maps: Vec<RepMorphism>,
}

fn union_range(x: &Complex, y: &Complex) -> (i32, i32) {
    match (x.terms.is_empty(), y.terms.is_empty()) {
        (true, true) => (0, -1),
        (true, false) => (y.lo, y.hi()),
        (false, true) => (x.lo, x.hi()),
        (false, false) => (x.lo.min(y.lo), x.hi().max(y.hi())),
    }
}

impl ChainMap {
    /// `components(k)` gives `f^k`; it is only called on degrees where both
    /// complexes may be nonzero. Checks ends and commutation with the
    /// differentials.
    pub fn new<F>(source: &Complex, target: &Complex, mut components: F) -> Result<Self>
    where
        F: FnMut(i32) -> Result<RepMorphism>,
    {
        if !same_algebra(&source.alg, &target.alg) {
            return Err(Error::Contract("chain map between complexes over different algebras".into()));
        }
        let (lo, hi) = union_range(source, target);
        let mut maps = Vec::new();
        for k in lo..=hi {
            let f = if source.term(k).is_zero() || target.term(k).is_zero() {
                RepMorphism::zero(source.term(k), target.term(k))
            } else {
                components(k)?
            };
            if f.source() != source.term(k) || f.target() != target.term(k) {
                return Err(Error::Contract(format!("chain map component in degree {k} has the wrong ends")));
            }
            maps.push(f);
        }
        let f = ChainMap { source: source.clone(), target: target.clone(), lo, maps };
        f.check_commutes()?;
        Ok(f)
    }

    fn check_commutes(&self) -> Result<()> {
        let (lo, hi) = union_range(&self.source, &self.target);
        for k in lo - 1..=hi {
            let left = self.component(k).then(&self.target.diff(k))?;
            let right = self.source.diff(k).then(&self.component(k + 1))?;
            if left != right {
                return Err(Error::Contract(format!("chain map does not commute with the differentials at degree {k}")));
            }
        }
        Ok(())
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        let (lo, hi) = union_range(source, target);
        let maps = (lo..=hi).map(|k| RepMorphism::zero(source.term(k), target.term(k))).collect();
        ChainMap { source: source.clone(), target: target.clone(), lo, maps }
    }

    pub fn identity(x: &Complex) -> Self {
        let maps = x.terms.iter().map(RepMorphism::identity).collect();
        ChainMap { source: x.clone(), target: x.clone(), lo: x.lo, maps }
    }

    /// A chain map between stalk complexes in the same degree.
    pub fn stalk(f: &RepMorphism, degree: i32) -> Self {
        ChainMap {
            source: Complex::stalk(f.source(), degree),
            target: Complex::stalk(f.target(), degree),
            lo: degree,
            maps: vec![f.clone()],
        }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn component(&self, k: i32) -> RepMorphism {
        let i = k - self.lo;
        if i < 0 || i >= self.maps.len() as i32 {
            RepMorphism::zero(self.source.term(k), self.target.term(k))
        } else {
            self.maps[i as usize].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(RepMorphism::is_zero)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.target != other.source {
            return Err(Error::Contract("composing chain maps with mismatched ends".into()));
        }
        let (lo, hi) = union_range(&self.source, &other.target);
        let maps = (lo..=hi).map(|k| self.component(k).then(&other.component(k))).collect::<Result<_>>()?;
        Ok(ChainMap { source: self.source.clone(), target: other.target.clone(), lo, maps })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Contract("adding chain maps with different ends".into()));
        }
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(ChainMap { maps, ..self.clone() })
    }

    pub fn scale(&self, s: u32) -> ChainMap {
        ChainMap { maps: self.maps.iter().map(|f| f.scale(s)).collect(), ..self.clone() }
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap { maps: self.maps.iter().map(RepMorphism::neg).collect(), ..self.clone() }
    }

    /// `f[s]`, a map `X[s] -> Y[s]`.
    pub fn shift(&self, s: i32) -> ChainMap {
        ChainMap { source: self.source.shift(s), target: self.target.shift(s), lo: self.lo - s, maps: self.maps.clone() }
    }
}

/// `cone(f)^k = X^{k+1} ⊕ Y^k` with differential
/// `[[-d_X^{k+1}, 0], [f^{k+1}, d_Y^k]]`. Verifies `d ∘ d = 0` and
/// `χ(cone) = χ(Y) - χ(X)`.
pub fn mapping_cone(f: &ChainMap) -> Result<Complex> {
    let (x, y) = (&f.source, &f.target);
    let alg = x.alg.clone();
    let (lo, hi) = match (x.terms.is_empty(), y.terms.is_empty()) {
        (true, true) => return Ok(Complex::zero(&alg)),
        (true, false) => (y.lo, y.hi()),
        (false, true) => (x.lo - 1, x.hi() - 1),
        (false, false) => ((x.lo - 1).min(y.lo), (x.hi() - 1).max(y.hi())),
    };
    let sums = (lo..=hi + 1)
        .map(|k| direct_sum(&alg, &[x.term(k + 1).clone(), y.term(k).clone()]))
        .collect::<Result<Vec<_>>>()?;
    let mut diffs = Vec::new();
    for k in lo..hi {
        let (here, next) = (&sums[(k - lo) as usize], &sums[(k - lo + 1) as usize]);
        let (px, py) = (&here.projections[0], &here.projections[1]);
        let (ix, iy) = (&next.inclusions[0], &next.inclusions[1]);
        let d = px
            .then(&x.diff(k + 1).neg())?
            .then(ix)?
            .add(&px.then(&f.component(k + 1))?.then(iy)?)?
            .add(&py.then(&y.diff(k))?.then(iy)?)?;
        diffs.push(d);
    }
    let terms = sums.into_iter().take((hi - lo + 1) as usize).map(|s| s.sum).collect();
    let cone = Complex::new(&alg, lo, terms, diffs)?;
    let expected: Vec<i64> = y.euler().iter().zip(x.euler()).map(|(a, b)| a - b).collect();
    if cone.euler() != expected {
        return Err(Error::Falsification("Euler characteristic of the cone is not χ(Y) - χ(X)".into()));
    }
    Ok(cone)
}

/// A direct sum of complexes with its structural chain maps.
#[derive(Clone, Debug)]
pub struct ComplexSum {
    pub sum: Complex,
    pub inclusions: Vec<ChainMap>,
    pub projections: Vec<ChainMap>,
}

impl ComplexSum {
    /// The map out of the sum with components `parts`.
    pub fn from_parts(&self, parts: &[ChainMap], target: &Complex) -> Result<ChainMap> {
        let mut acc = ChainMap::zero(&self.sum, target);
        for (p, f) in self.projections.iter().zip(parts) {
            acc = acc.add(&p.then(f)?)?;
        }
        Ok(acc)
    }
}

pub fn complex_sum(alg: &Arc<BoundQuiverAlgebra>, parts: &[Complex]) -> Result<ComplexSum> {
    let nonempty: Vec<&Complex> = parts.iter().filter(|c| !c.terms.is_empty()).collect();
    if nonempty.is_empty() {
        let sum = Complex::zero(alg);
        let inclusions = parts.iter().map(|c| ChainMap::zero(c, &sum)).collect();
        let projections = parts.iter().map(|c| ChainMap::zero(&sum, c)).collect();
        return Ok(ComplexSum { sum, inclusions, projections });
    }
    let lo = nonempty.iter().map(|c| c.lo).min().unwrap();
    let hi = nonempty.iter().map(|c| c.hi()).max().unwrap();
    let sums = (lo..=hi)
        .map(|k| direct_sum(alg, &parts.iter().map(|c| c.term(k).clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let mut diffs = Vec::new();
    for k in lo..hi {
        let (here, next) = (&sums[(k - lo) as usize], &sums[(k - lo + 1) as usize]);
        let mut d = RepMorphism::zero(&here.sum, &next.sum);
        for (i, c) in parts.iter().enumerate() {
            d = d.add(&here.projections[i].then(&c.diff(k))?.then(&next.inclusions[i])?)?;
        }
        diffs.push(d);
    }
    let sum = Complex::new(alg, lo, sums.iter().map(|s| s.sum.clone()).collect(), diffs)?;
    let mut inclusions = Vec::new();
    let mut projections = Vec::new();
    for (i, c) in parts.iter().enumerate() {
        let (clo, chi) = union_range(c, &sum);
        let inc = (clo..=chi)
            .map(|k| if k < lo || k > hi { RepMorphism::zero(c.term(k), sum.term(k)) } else { sums[(k - lo) as usize].inclusions[i].clone() })
            .collect();
        let proj = (clo..=chi)
            .map(|k| if k < lo || k > hi { RepMorphism::zero(sum.term(k), c.term(k)) } else { sums[(k - lo) as usize].projections[i].clone() })
            .collect();
        inclusions.push(ChainMap { source: c.clone(), target: sum.clone(), lo: clo, maps: inc });
        projections.push(ChainMap { source: sum.clone(), target: c.clone(), lo: clo, maps: proj });
    }
    Ok(ComplexSum { sum, inclusions, projections })
}

/// Chain maps `X -> Y` modulo null-homotopic ones, with a fixed set of
/// representatives. When `X` is a bounded complex of projectives this is
/// `Hom(X, Y)` in the derived category.
#[derive(Clone, Debug)]
pub struct ChainHomSpace {
    source: Complex,
    target: Complex,
    lo: i32,
    spaces: Vec<HomSpace>,
    offsets: Vec<usize>,
    reps: Vec<Vec<u32>>,
    /// Columns: the representatives, then a basis of the boundaries.
    solver: FMatrix,
}

impl ChainHomSpace {
    pub fn new(x: &Complex, y: &Complex) -> Result<Self> {
        if !same_algebra(&x.alg, &y.alg) {
            return Err(Error::Contract("chain maps between complexes over different algebras".into()));
        }
        let p = x.alg.modulus();
        let lo = x.lo.max(y.lo);
        let hi = x.hi().min(y.hi());
        let spaces = (lo..=hi).map(|k| HomSpace::new(x.term(k), y.term(k))).collect::<Result<Vec<_>>>()?;
        let mut offsets = vec![0usize];
        for s in &spaces {
            offsets.push(offsets.last().unwrap() + s.dim());
        }
        let vars = *offsets.last().unwrap();
        let empty = |vars| ChainHomSpace {
            source: x.clone(),
            target: y.clone(),
            lo,
            spaces: spaces.clone(),
            offsets: offsets.clone(),
            reps: Vec::new(),
            solver: FMatrix::zero(vars, 0, p),
        };
        if vars == 0 {
            return Ok(empty(0));
        }

        // cycle condition d_Y^k f^k - f^{k+1} d_X^k = 0, one block per k in [lo-1, hi]
        let block_len = |k: i32| -> usize {
            x.term(k).dims().iter().zip(y.term(k + 1).dims()).map(|(a, b)| a * b).sum()
        };
        let mut block_at = vec![0usize];
        for k in lo - 1..=hi {
            block_at.push(block_at.last().unwrap() + block_len(k));
        }
        let rows = *block_at.last().unwrap();
        let mut columns: Vec<Vec<u32>> = Vec::with_capacity(vars);
        for (i, space) in spaces.iter().enumerate() {
            let k = lo + i as i32;
            for b in &space.basis {
                let mut col = vec![0u32; rows];
                let forward = b.then(&y.diff(k))?.flatten();
                let at = block_at[(k - lo + 1) as usize];
                col[at..at + forward.len()].copy_from_slice(&forward);
                let backward = x.diff(k - 1).then(b)?.flatten();
                let at = block_at[(k - lo) as usize];
                for (c, v) in col[at..at + backward.len()].iter_mut().zip(backward) {
                    *c = (*c + p - v) % p;
                }
                columns.push(col);
            }
        }
        let cycles = if rows == 0 {
            FMatrix::identity(vars, p)
        } else {
            FMatrix::from_rows(&columns, rows, p)?.transpose().kernel_basis()
        };

        // null-homotopic maps d_Y s + s d_X, for s: X^k -> Y^{k-1}
        let mut boundary_rows: Vec<Vec<u32>> = Vec::new();
        for k in lo..=hi + 1 {
            let (xk, yk1) = (x.term(k), y.term(k - 1));
            if xk.is_zero() || yk1.is_zero() {
                continue;
            }
            for s in HomSpace::new(xk, yk1)?.basis {
                let mut row = vec![0u32; vars];
                if k <= hi {
                    let c = spaces[(k - lo) as usize].coords(&s.then(&y.diff(k - 1))?)?;
                    row[offsets[(k - lo) as usize]..offsets[(k - lo + 1) as usize]].copy_from_slice(&c);
                }
                if k > lo {
                    let c = spaces[(k - 1 - lo) as usize].coords(&x.diff(k - 1).then(&s)?)?;
                    let at = offsets[(k - 1 - lo) as usize];
                    for (r, v) in row[at..at + c.len()].iter_mut().zip(c) {
                        *r = (*r + v) % p;
                    }
                }
                boundary_rows.push(row);
            }
        }
        let boundaries = if boundary_rows.is_empty() {
            FMatrix::zero(0, vars, p)
        } else {
            FMatrix::from_rows(&boundary_rows, vars, p)?.row_space()
        };

        let mut acc = boundaries.clone();
        let mut rank = acc.rank();
        let mut reps = Vec::new();
        for z in cycles.row_vecs() {
            let trial = FMatrix::from_rows(std::slice::from_ref(&z), vars, p)?.vstack(&acc)?;
            let r = trial.rank();
            if r > rank {
                rank = r;
                acc = trial;
                reps.push(z);
            }
        }
        if rank != cycles.rank() {
            return Err(Error::Falsification("null-homotopic maps are not chain maps".into()));
        }
        let mut all_rows = reps.clone();
        all_rows.extend(boundaries.row_vecs());
        let solver = if all_rows.is_empty() {
            FMatrix::zero(vars, 0, p)
        } else {
            FMatrix::from_rows(&all_rows, vars, p)?.transpose()
        };
        Ok(ChainHomSpace { reps, solver, ..empty(vars) })
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    fn vector(&self, f: &ChainMap) -> Result<Vec<u32>> {
        if f.source != self.source || f.target != self.target {
            return Err(Error::Contract("chain map does not belong to this Hom space".into()));
        }
        let mut out = Vec::with_capacity(*self.offsets.last().unwrap());
        for (i, space) in self.spaces.iter().enumerate() {
            out.extend(space.coords(&f.component(self.lo + i as i32))?);
        }
        Ok(out)
    }

    /// Coordinates of the homotopy class of `f` in the chosen representatives.
    pub fn class_of(&self, f: &ChainMap) -> Result<Vec<u32>> {
        let v = self.vector(f)?;
        if self.solver.cols() == 0 {
            return if v.iter().all(|&c| c == 0) {
                Ok(Vec::new())
            } else {
                Err(Error::Contract("morphism is not a chain map".into()))
            };
        }
        let sol = self.solver.solve(&v)?.ok_or_else(|| Error::Contract("morphism is not a chain map".into()))?;
        Ok(sol[..self.reps.len()].to_vec())
    }

    /// The representative `Σ coeffs[i] · rep_i`.
    pub fn element(&self, coeffs: &[u32]) -> ChainMap {
        let p = self.source.alg.modulus();
        let mut v = vec![0u32; *self.offsets.last().unwrap()];
        for (c, r) in coeffs.iter().zip(&self.reps) {
            for (a, b) in v.iter_mut().zip(r) {
                *a = (*a + c * b) % p;
            }
        }
        let (lo, hi) = union_range(&self.source, &self.target);
        let maps = (lo..=hi)
            .map(|k| {
                let i = k - self.lo;
                if i < 0 || i >= self.spaces.len() as i32 {
                    RepMorphism::zero(self.source.term(k), self.target.term(k))
                } else {
                    let i = i as usize;
                    self.spaces[i].element(&v[self.offsets[i]..self.offsets[i + 1]])
                }
            })
            .collect();
        let f = ChainMap { source: self.source.clone(), target: self.target.clone(), lo, maps };
        debug_assert!(f.check_commutes().is_ok());
        f
    }

    pub fn basis(&self) -> Vec<ChainMap> {
        (0..self.dim())
            .map(|i| {
                let mut e = vec![0u32; self.dim()];
                e[i] = 1;
                self.element(&e)
            })
            .collect()
    }

    /// One representative of every class (`p^dim` of them).
    pub fn classes(&self) -> impl Iterator<Item = ChainMap> + '_ {
        all_vectors(self.dim(), self.source.alg.modulus()).map(move |c| self.element(&c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::{hom_basis, Ext1};

    fn cat(name: &str) -> IndCatalog {
        IndCatalog::build(Arc::new(BoundQuiverAlgebra::builtin(name).unwrap())).unwrap()
    }

    fn socle_inclusion(c: &IndCatalog) -> RepMorphism {
        let (one, two_one) = (c.member(c.index_of("1").unwrap()), c.member(c.index_of("21").unwrap()));
        hom_basis(one, two_one).unwrap().remove(0)
    }

    fn single(c: &IndCatalog, label: &str, k: i32) -> BTreeMap<i32, Vec<usize>> {
        let mut mult = vec![0; c.len()];
        mult[c.index_of(label).unwrap()] = 1;
        BTreeMap::from([(k, mult)])
    }

    #[test]
    fn stalk_cohomology() {
        let c = cat("lineA:3");
        let x = Complex::stalk(c.member(c.index_of("32").unwrap()), 2);
        assert_eq!(x.cohomology_decomposition(&c).unwrap(), single(&c, "32", 2));
        assert_eq!(x.shift(3).cohomology_decomposition(&c).unwrap(), single(&c, "32", -1));
    }

    #[test]
    fn two_term_complex_has_cokernel_cohomology() {
        let c = cat("lineA:3");
        let f = socle_inclusion(&c);
        let x = Complex::new(c.algebra(), -1, vec![f.source().clone(), f.target().clone()], vec![f]).unwrap();
        assert_eq!(x.cohomology_decomposition(&c).unwrap(), single(&c, "2", 0));
    }

    #[test]
    fn cones() {
        let c = cat("lineA:3");
        let f = socle_inclusion(&c);
        let cone = mapping_cone(&ChainMap::stalk(&f, 0)).unwrap();
        assert_eq!(cone.cohomology_decomposition(&c).unwrap(), single(&c, "2", 0));

        let x = resolved_stalk(c.member(c.index_of("32").unwrap()), 1).unwrap();
        assert!(mapping_cone(&ChainMap::identity(&x)).unwrap().is_acyclic().unwrap());

        let y = Complex::stalk(c.member(c.index_of("3").unwrap()), 0);
        let zero = mapping_cone(&ChainMap::zero(&x, &y)).unwrap();
        let mut expected = single(&c, "3", 0);
        expected.get_mut(&0).unwrap()[c.index_of("32").unwrap()] += 1;
        assert_eq!(zero.cohomology_decomposition(&c).unwrap(), expected);
    }

    #[test]
    fn non_chain_maps_are_rejected() {
        let c = cat("lineA:3");
        let f = socle_inclusion(&c);
        let x = Complex::new(c.algebra(), -1, vec![f.source().clone(), f.target().clone()], vec![f.clone()]).unwrap();
        let y = Complex::stalk(f.source(), -1);
        let id = RepMorphism::identity(f.source());
        assert!(ChainMap::new(&x, &y, |_| Ok(id.clone())).is_ok());
        assert!(matches!(ChainMap::new(&y, &x, |_| Ok(id.clone())), Err(Error::Contract(_))));
    }

    #[test]
    fn resolutions_are_quasi_isomorphic_to_stalks() {
        let c = cat("lineA:3");
        for (i, m) in c.members().iter().enumerate() {
            let r = resolved_stalk(m, 3).unwrap();
            assert_eq!(r.stalks(&c).unwrap(), vec![(i, 3)]);
        }
    }

    #[test]
    fn homotopy_classes_compute_hom_and_ext() {
        let c = cat("lineA:3");
        for (i, m) in c.members().iter().enumerate() {
            let r = resolved_stalk(m, 0).unwrap();
            for (j, n) in c.members().iter().enumerate() {
                let hom = ChainHomSpace::new(&r, &Complex::stalk(n, 0)).unwrap().dim();
                let ext = ChainHomSpace::new(&r, &Complex::stalk(n, -1)).unwrap().dim();
                let above = ChainHomSpace::new(&r, &Complex::stalk(n, 1)).unwrap().dim();
                assert_eq!(hom, c.hom(i, j));
                assert_eq!(ext, Ext1::compute(m, n).unwrap().dim());
                assert_eq!(above, 0);
            }
        }
    }

    #[test]
    fn class_of_recovers_coefficients() {
        let c = cat("lineA:3");
        let r = resolved_stalk(c.member(c.index_of("2").unwrap()), 0).unwrap();
        let y = Complex::stalk(c.member(c.index_of("1").unwrap()), -1);
        let space = ChainHomSpace::new(&r, &y).unwrap();
        assert_eq!(space.dim(), 1);
        assert_eq!(space.class_of(&space.element(&[1])).unwrap(), vec![1]);
        assert_eq!(space.class_of(&ChainMap::zero(&r, &y)).unwrap(), vec![0]);
    }

    #[test]
    fn sums_split() {
        let c = cat("lineA:3");
        let a = resolved_stalk(c.member(c.index_of("2").unwrap()), 0).unwrap();
        let b = Complex::stalk(c.member(c.index_of("1").unwrap()), 2);
        let s = complex_sum(c.algebra(), &[a.clone(), b.clone()]).unwrap();
        let mut stalks = s.sum.stalks(&c).unwrap();
        stalks.sort();
        assert_eq!(stalks, vec![(c.index_of("1").unwrap(), 2), (c.index_of("2").unwrap(), 0)]);
        let back = s.inclusions[0].then(&s.projections[0]).unwrap();
        assert_eq!(back, ChainMap::identity(&a));
        assert!(s.inclusions[1].then(&s.projections[0]).unwrap().is_zero());
    }
}
