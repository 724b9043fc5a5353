//! The catalog of indecomposable representations, with Hom and Ext tables and
//! greedy decomposition of arbitrary representations into catalog members.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{all_vectors, FMatrix};
use crate::quiver::BoundQuiverAlgebra;
use crate::rep::{direct_sum, into_sum, quotient, cokernel_of, Ext1, HomSpace, RepMorphism, Representation};

/// Default total-dimension cap for brute-force enumeration.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 6;

/// Number of arrow-matrix tuples the brute-force enumerator will visit per
/// dimension vector before giving up.
const BRUTE_FORCE_TUPLE_CAP: u64 = 1 << 20;

#[derive(Debug)]
pub struct IndCatalog {
    alg: Arc<BoundQuiverAlgebra>,
    members: Vec<Representation>,
    labels: Vec<String>,
    hom: Vec<Vec<HomSpace>>,
    ext: Vec<Vec<Ext1>>,
    complete: bool,
}

impl IndCatalog {
    /// Closed-form catalog for Nakayama algebras (every vertex has at most one
    /// incoming and one outgoing arrow), which covers `lineA:n` and
    /// `paperNakayama`. The indecomposables are the quotients `P(v)/rad^k P(v)`.
    pub fn build(alg: Arc<BoundQuiverAlgebra>) -> Result<Self> {
        if !is_nakayama(&alg) {
            return Err(Error::UnsupportedAlgebra(format!(
                "`{}` is not a Nakayama algebra; use the brute-force catalog",
                alg.name()
            )));
        }
        let mut found = Vec::new();
        for v in 0..alg.vertex_count() {
            let paths: Vec<_> = alg.path_basis().iter().filter(|q| q.start == v).collect();
            let p = Representation::projective(&alg, v);
            for k in 1..=paths.len() {
                // basis of P(v) at each vertex is ordered like the filtered path list
                let spans: Vec<FMatrix> = (0..alg.vertex_count())
                    .map(|w| {
                        let at_w: Vec<_> = paths.iter().filter(|q| q.end == w).collect();
                        let rows: Vec<Vec<u32>> = at_w
                            .iter()
                            .enumerate()
                            .filter(|(_, q)| q.len() >= k)
                            .map(|(i, _)| {
                                let mut row = vec![0; at_w.len()];
                                row[i] = 1;
                                row
                            })
                            .collect();
                        FMatrix::from_rows(&rows, at_w.len(), alg.modulus()).expect("unit rows")
                    })
                    .collect();
                let module = quotient(&p, &spans)?.rep;
                let spine = paths.iter().find(|q| q.len() == k - 1).expect("uniserial projective");
                let mut verts = vec![spine.start];
                verts.extend(spine.arrows.iter().map(|&a| alg.quiver().arrows()[a].target));
                found.push((vertex_label(&verts, alg.vertex_count()), module));
            }
        }
        Self::from_members(alg, found, true)
    }

    /// Exhaustive enumeration of representations up to the given total
    /// dimension. The completeness flag stays unset.
    pub fn brute_force(alg: Arc<BoundQuiverAlgebra>, cap: usize) -> Result<Self> {
        let mut found: Vec<Representation> = Vec::new();
        for dims in dim_vectors(alg.vertex_count(), cap) {
            for rep in all_representations(&alg, &dims)? {
                if !is_brick_like_local(&rep)? {
                    continue;
                }
                let mut new = true;
                for known in &found {
                    if crate::rep::is_isomorphic(known, &rep)? {
                        new = false;
                        break;
                    }
                }
                if new {
                    found.push(rep);
                }
            }
        }
        let labelled = found
            .into_iter()
            .map(|m| {
                let dv: Vec<String> = m.dims().iter().map(usize::to_string).collect();
                (format!("({})", dv.join(",")), m)
            })
            .collect::<Vec<_>>();
        // several indecomposables may share a dimension vector
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let labelled = labelled
            .into_iter()
            .map(|(l, m)| {
                let k = seen.entry(l.clone()).or_insert(0);
                *k += 1;
                (if *k == 1 { l } else { format!("{l}#{k}") }, m)
            })
            .collect();
        Self::from_members(alg, labelled, false)
    }

    fn from_members(alg: Arc<BoundQuiverAlgebra>, mut found: Vec<(String, Representation)>, complete: bool) -> Result<Self> {
        found.sort_by(|a, b| a.0.cmp(&b.0));
        let (labels, members): (Vec<String>, Vec<Representation>) = found.into_iter().unzip();
        let n = members.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let computed: Vec<(HomSpace, Ext1)> = pairs
            .par_iter()
            .map(|&(i, j)| Ok((HomSpace::new(&members[i], &members[j])?, Ext1::compute(&members[i], &members[j])?)))
            .collect::<Result<_>>()?;
        let mut hom: Vec<Vec<HomSpace>> = Vec::with_capacity(n);
        let mut ext: Vec<Vec<Ext1>> = Vec::with_capacity(n);
        let mut iter = computed.into_iter();
        for _ in 0..n {
            let (h, e): (Vec<_>, Vec<_>) = iter.by_ref().take(n).unzip();
            hom.push(h);
            ext.push(e);
        }
        Ok(IndCatalog { alg, members, labels, hom, ext, complete })
    }

    pub fn algebra(&self) -> &Arc<BoundQuiverAlgebra> {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Representation] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Representation {
        &self.members[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.complete {
            Ok(())
        } else {
            Err(Error::IncompleteCatalog(format!(
                "catalog of `{}` is not known to contain every indecomposable",
                self.alg.name()
            )))
        }
    }

    /// `dim Hom(M_i, M_j)`.
    pub fn hom(&self, i: usize, j: usize) -> usize {
        self.hom[i][j].dim()
    }

    pub fn hom_space(&self, i: usize, j: usize) -> &HomSpace {
        &self.hom[i][j]
    }

    /// `dim Ext^1(M_i, M_j)`.
    pub fn ext(&self, i: usize, j: usize) -> usize {
        self.ext[i][j].dim()
    }

    pub fn ext_space(&self, i: usize, j: usize) -> &Ext1 {
        &self.ext[i][j]
    }

    pub fn hom_table(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| (0..self.len()).map(|j| self.hom(i, j)).collect()).collect()
    }

    pub fn ext_table(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| (0..self.len()).map(|j| self.ext(i, j)).collect()).collect()
    }

    pub fn max_total_dim(&self) -> usize {
        self.members.iter().map(Representation::total_dim).max().unwrap_or(0)
    }

    pub fn is_projective(&self, i: usize) -> bool {
        (0..self.len()).all(|j| self.ext(i, j) == 0)
    }

    pub fn is_injective(&self, i: usize) -> bool {
        (0..self.len()).all(|j| self.ext(j, i) == 0)
    }

    /// Multiplicity of each catalog member in `x`.
    pub fn decompose(&self, x: &Representation) -> Result<Vec<usize>> {
        Ok(self.decompose_with_certificate(x)?.0)
    }

    /// Multiplicities together with an isomorphism from `x` onto the direct
    /// sum of the listed members (in catalog order, repeated by multiplicity).
    pub fn decompose_with_certificate(&self, x: &Representation) -> Result<(Vec<usize>, RepMorphism)> {
        if !crate::rep::same_algebra(x.algebra(), &self.alg) {
            return Err(Error::Contract("decomposing a representation of a different algebra".into()));
        }
        let mut mult = vec![0usize; self.len()];
        // components X -> M_i, each the split retraction composed with the
        // quotient maps accumulated so far
        let mut comps: Vec<(usize, RepMorphism)> = Vec::new();
        let mut rest = x.clone();
        let mut to_rest = RepMorphism::identity(x);
        'outer: while !rest.is_zero() {
            for (i, m) in self.members.iter().enumerate() {
                if m.dims().iter().zip(rest.dims()).any(|(a, b)| a > b) {
                    continue;
                }
                if let Some((f, g)) = split_pair(m, &rest)? {
                    let q = cokernel_of(&f)?;
                    comps.push((i, to_rest.then(&g)?));
                    to_rest = to_rest.then(&q.projection)?;
                    rest = q.rep;
                    mult[i] += 1;
                    continue 'outer;
                }
            }
            return Err(Error::IncompleteCatalog(format!(
                "no catalog member splits off a summand of dimension vector {:?}",
                rest.dims()
            )));
        }
        comps.sort_by_key(|(i, _)| *i);
        let parts: Vec<Representation> = comps.iter().map(|(i, _)| self.members[*i].clone()).collect();
        let sum = direct_sum(&self.alg, &parts)?;
        let maps: Vec<RepMorphism> = comps.into_iter().map(|(_, g)| g).collect();
        let iso = into_sum(x, &maps, &sum)?;
        if !iso.is_iso() {
            return Err(Error::Falsification("decomposition certificate is not an isomorphism".into()));
        }
        Ok((mult, iso))
    }

    /// Catalog index of an indecomposable `x`, or `None` if `x` decomposes.
    pub fn identify(&self, x: &Representation) -> Result<Option<usize>> {
        let mult = self.decompose(x)?;
        let total: usize = mult.iter().sum();
        Ok(if total == 1 { mult.iter().position(|&m| m == 1) } else { None })
    }

    /// Direct sum of catalog members with the given multiplicities.
    pub fn assemble(&self, mult: &[usize]) -> Result<Representation> {
        let parts: Vec<Representation> = mult
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat(self.members[i].clone()).take(k))
            .collect();
        Ok(direct_sum(&self.alg, &parts)?.sum)
    }
}

/// A pair `f: M -> X`, `g: X -> M` with `g ∘ f` invertible, if `M` is a
/// summand of `X`. `M` must have a local endomorphism ring: then such a pair
/// exists iff some pair of basis elements works, since `(f, g) ↦ g ∘ f` is
/// bilinear and the non-units of `End(M)` form an ideal.
fn split_pair(m: &Representation, x: &Representation) -> Result<Option<(RepMorphism, RepMorphism)>> {
    let fs = crate::rep::hom_basis(m, x)?;
    if fs.is_empty() {
        return Ok(None);
    }
    let gs = crate::rep::hom_basis(x, m)?;
    for f in &fs {
        for g in &gs {
            if f.then(g)?.is_iso() {
                return Ok(Some((f.clone(), g.clone())));
            }
        }
    }
    Ok(None)
}

fn is_nakayama(alg: &BoundQuiverAlgebra) -> bool {
    let q = alg.quiver();
    (0..q.vertex_count()).all(|v| q.incoming(v).count() <= 1 && q.outgoing(v).count() <= 1)
}

/// Vertex numbers (1-based) from top to socle; digits run together when
/// every vertex number is a single digit.
fn vertex_label(verts: &[usize], vertex_count: usize) -> String {
    let names: Vec<String> = verts.iter().map(|v| (v + 1).to_string()).collect();
    if vertex_count < 10 {
        names.concat()
    } else {
        names.join(".")
    }
}

fn dim_vectors(n: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(v: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == cur.len() {
            if cur.iter().any(|&d| d > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for d in 0..=left {
            cur[v] = d;
            rec(v + 1, left - d, cur, out);
        }
        cur[v] = 0;
    }
    rec(0, cap, &mut cur, &mut out);
    out.sort_by_key(|d| (d.iter().sum::<usize>(), d.clone()));
    out
}

fn all_representations(alg: &Arc<BoundQuiverAlgebra>, dims: &[usize]) -> Result<Vec<Representation>> {
    let p = alg.modulus();
    let shapes: Vec<(usize, usize)> = alg.quiver().arrows().iter().map(|a| (dims[a.target], dims[a.source])).collect();
    let entries: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let count = (p as u64).checked_pow(entries as u32).unwrap_or(u64::MAX);
    if count > BRUTE_FORCE_TUPLE_CAP {
        return Err(Error::CapExceeded(format!(
            "brute-force catalog would visit {count} representations of dimension vector {dims:?}"
        )));
    }
    let mut out = Vec::new();
    for v in all_vectors(entries, p) {
        let mut at = 0;
        let maps: Vec<FMatrix> = shapes
            .iter()
            .map(|&(r, c)| {
                let m = FMatrix::from_vec(r, c, p, v[at..at + r * c].to_vec()).expect("sized slice");
                at += r * c;
                m
            })
            .collect();
        if let Ok(rep) = Representation::new(alg.clone(), dims.to_vec(), maps) {
            out.push(rep);
        }
    }
    Ok(out)
}

/// A representation is indecomposable iff its endomorphism ring is local,
/// i.e. every endomorphism is invertible or nilpotent.
fn is_brick_like_local(m: &Representation) -> Result<bool> {
    let space = HomSpace::new(m, m)?;
    let n = m.total_dim().max(1);
    for f in space.elements() {
        if f.is_iso() {
            continue;
        }
        let mut pow = f.clone();
        for _ in 1..n {
            pow = pow.then(&f)?;
        }
        if !pow.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(name: &str) -> IndCatalog {
        IndCatalog::build(Arc::new(BoundQuiverAlgebra::builtin(name).unwrap())).unwrap()
    }

    #[test]
    fn line3_labels() {
        let c = cat("lineA:3");
        assert_eq!(c.labels(), &["1", "2", "21", "3", "32", "321"]);
        assert!(c.is_complete());
        let m321 = c.member(c.index_of("321").unwrap());
        assert_eq!(m321.top_dims(), vec![0, 0, 1]);
        assert_eq!(m321.socle_dims(), vec![1, 0, 0]);
    }

    #[test]
    fn nakayama_labels() {
        assert_eq!(cat("paperNakayama").labels(), &["1", "2", "21", "3", "32"]);
        assert_eq!(cat("lineA:1").len(), 1);
    }

    #[test]
    fn tables() {
        let c = cat("lineA:3");
        for i in 0..c.len() {
            assert!(c.hom(i, i) >= 1);
        }
        let i = |l: &str| c.index_of(l).unwrap();
        assert_eq!(c.hom(i("1"), i("21")), 1);
        assert_eq!(c.ext(i("2"), i("1")), 1);
        assert_eq!(c.ext(i("3"), i("21")), 1);
        assert!(c.is_projective(i("321")) && c.is_projective(i("21")) && c.is_projective(i("1")));
        assert!(!c.is_projective(i("2")));
        assert!(c.is_injective(i("321")) && c.is_injective(i("32")) && c.is_injective(i("3")));
    }

    #[test]
    fn decompose_sums_and_extensions() {
        let c = cat("lineA:3");
        let i = |l: &str| c.index_of(l).unwrap();
        let m = c.member(i("32")).clone();
        let double = direct_sum(c.algebra(), &[m.clone(), m]).unwrap().sum;
        let mult = c.decompose(&double).unwrap();
        assert_eq!(mult[i("32")], 2);
        assert_eq!(mult.iter().sum::<usize>(), 2);

        let e = c.ext_space(i("2"), i("1")).middle_term(&[1]).unwrap();
        assert_eq!(c.identify(&e.middle).unwrap(), Some(i("21")));

        let mixed = c.assemble(&[1, 0, 2, 0, 1, 1]).unwrap();
        assert_eq!(c.decompose(&mixed).unwrap(), vec![1, 0, 2, 0, 1, 1]);
    }

    #[test]
    fn brute_force_matches_closed_form() {
        let alg = Arc::new(BoundQuiverAlgebra::builtin("paperNakayama").unwrap());
        let brute = IndCatalog::brute_force(alg.clone(), 3).unwrap();
        assert!(!brute.is_complete());
        assert_eq!(brute.len(), 5);
        let closed = IndCatalog::build(alg).unwrap();
        for m in brute.members() {
            assert!(closed.identify(m).unwrap().is_some());
        }
    }

    #[test]
    fn unsupported_shape() {
        let q = crate::quiver::Quiver::new(
            3,
            vec![
                crate::quiver::Arrow { name: "a".into(), source: 1, target: 0 },
                crate::quiver::Arrow { name: "b".into(), source: 2, target: 0 },
            ],
        )
        .unwrap();
        let alg = Arc::new(BoundQuiverAlgebra::build("V", q, vec![], 2).unwrap());
        assert!(matches!(IndCatalog::build(alg.clone()), Err(Error::UnsupportedAlgebra(_))));
        let brute = IndCatalog::brute_force(alg, 3).unwrap();
        // A3 with one sink: 1, 2, 3, 21, 31, 231
        assert_eq!(brute.len(), 6);
    }
}
