//! Subcategories of a module category, stored as bit sets over the catalog of
//! indecomposables, and the closure predicates on them.
//!
//! Every predicate quantifying over morphisms between direct sums reduces to a
//! finite check on sums with bounded multiplicities: if some map out of (into)
//! a sum `B` of members witnesses a failure through an indecomposable `E`,
//! base change on each isotypic block of `B` leaves at most `dim Hom(D, E)`
//! (`dim Hom(E, D)`) copies of each member `D` that see `E`, and the remaining
//! copies split off without affecting `E`. The bounds below are those numbers.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use crate::catalog::IndCatalog;
use crate::error::{Error, Result};
use crate::linalg::FMatrix;
use crate::rep::{direct_sum, quotient, subrep, trace, Ext1, HomSpace, Representation};

/// A full additive subcategory closed under summands: the set of catalog
/// members it contains.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subcat(u64);

impl Subcat {
    pub const EMPTY: Subcat = Subcat(0);

    pub fn from_bits(bits: u64) -> Self {
        Subcat(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= 64, "subcategories are limited to 64 indecomposables");
        if n == 64 {
            Subcat(u64::MAX)
        } else {
            Subcat((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        Subcat(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Subcat(it.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        Subcat(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        Subcat(self.0 & !(1 << i))
    }

    pub fn union(self, other: Subcat) -> Self {
        Subcat(self.0 | other.0)
    }

    pub fn intersection(self, other: Subcat) -> Self {
        Subcat(self.0 & other.0)
    }

    pub fn difference(self, other: Subcat) -> Self {
        Subcat(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subcat) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Member labels in catalog (lexicographic) order.
    pub fn labels(self, cat: &IndCatalog) -> Vec<String> {
        self.iter().map(|i| cat.label(i).to_string()).collect()
    }

    /// Parses a comma-separated label list such as `2,21,32`.
    pub fn parse(cat: &IndCatalog, text: &str) -> Result<Self> {
        let text = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut s = Subcat::EMPTY;
        for label in text.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            let i = cat
                .index_of(label)
                .ok_or_else(|| Error::Usage(format!("`{label}` is not an indecomposable of `{}`", cat.algebra().name())))?;
            s = s.with(i);
        }
        Ok(s)
    }

    pub fn display(self, cat: &IndCatalog) -> String {
        format!("{{{}}}", self.labels(cat).join(","))
    }

    /// Support of a multiplicity vector.
    pub fn support(mult: &[usize]) -> Self {
        Subcat::from_indices(mult.iter().enumerate().filter(|(_, &m)| m > 0).map(|(i, _)| i))
    }
}

impl fmt::Debug for Subcat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subcat{:?}", self.iter().collect::<Vec<_>>())
    }
}

struct Memo<K, V>(RwLock<HashMap<K, V>>);

impl<K: Eq + Hash + Copy, V: Copy> Memo<K, V> {
    fn new() -> Self {
        Memo(RwLock::new(HashMap::new()))
    }

    fn get_or(&self, key: K, f: impl FnOnce() -> Result<V>) -> Result<V> {
        if let Some(v) = self.0.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        self.0.write().unwrap().insert(key, v);
        Ok(v)
    }
}

/// Subcategory calculus over a complete catalog. Results of the expensive
/// morphism scans are memoised; the calculator is safe to share across threads.
pub struct SubcatCalc {
    cat: Arc<IndCatalog>,
    /// `image_rows[x][c][v]`: rows spanning the images of all maps `M_c -> M_x` at `v`.
    image_rows: Vec<Vec<Vec<FMatrix>>>,
    /// `coimage_rows[x][c][v]`: the vertex maps of a basis of `Hom(M_x, M_c)`, stacked.
    coimage_rows: Vec<Vec<Vec<FMatrix>>>,
    ext_partners: Vec<Subcat>,
    ext_memo: Memo<(usize, Subcat), Subcat>,
    coker_memo: Memo<(Subcat, Subcat), bool>,
    ker_memo: Memo<(Subcat, Subcat), bool>,
    alpha_memo: Memo<Subcat, Subcat>,
}

impl SubcatCalc {
    pub fn new(cat: Arc<IndCatalog>) -> Result<Self> {
        cat.require_complete()?;
        if cat.len() > 64 {
            return Err(Error::CapExceeded(format!("catalog has {} members; the limit is 64", cat.len())));
        }
        let n = cat.len();
        let p = cat.algebra().modulus();
        let stack = |maps: &mut dyn Iterator<Item = FMatrix>, width: usize| {
            maps.fold(FMatrix::zero(0, width, p), |acc, m| acc.vstack(&m).expect("equal widths"))
        };
        let mut image_rows = Vec::with_capacity(n);
        let mut coimage_rows = Vec::with_capacity(n);
        for x in 0..n {
            let dims = cat.member(x).dims().to_vec();
            let mut im = Vec::with_capacity(n);
            let mut co = Vec::with_capacity(n);
            for c in 0..n {
                let into = &cat.hom_space(c, x).basis;
                let out = &cat.hom_space(x, c).basis;
                im.push(
                    (0..dims.len())
                        .map(|v| stack(&mut into.iter().map(|f| f.vertex_map(v).transpose()), dims[v]))
                        .collect(),
                );
                co.push(
                    (0..dims.len())
                        .map(|v| stack(&mut out.iter().map(|f| f.vertex_map(v).clone()), dims[v]))
                        .collect(),
                );
            }
            image_rows.push(im);
            coimage_rows.push(co);
        }
        let ext_partners = (0..n).map(|i| Subcat::from_indices((0..n).filter(|&j| cat.ext(i, j) > 0))).collect();
        Ok(SubcatCalc {
            cat,
            image_rows,
            coimage_rows,
            ext_partners,
            ext_memo: Memo::new(),
            coker_memo: Memo::new(),
            ker_memo: Memo::new(),
            alpha_memo: Memo::new(),
        })
    }

    pub fn catalog(&self) -> &Arc<IndCatalog> {
        &self.cat
    }

    pub fn full(&self) -> Subcat {
        Subcat::full(self.cat.len())
    }

    fn all(&self) -> impl Iterator<Item = usize> {
        0..self.cat.len()
    }

    /// `M_x` is a quotient of an object of `add S`: its `S`-trace is everything.
    pub fn is_quotient_of(&self, s: Subcat, x: usize) -> bool {
        let dims = self.cat.member(x).dims();
        (0..dims.len()).all(|v| {
            let p = self.cat.algebra().modulus();
            let rows = s
                .iter()
                .fold(FMatrix::zero(0, dims[v], p), |acc, c| acc.vstack(&self.image_rows[x][c][v]).unwrap());
            rows.rank() == dims[v]
        })
    }

    /// `M_x` embeds into an object of `add S`.
    pub fn is_sub_of(&self, s: Subcat, x: usize) -> bool {
        let dims = self.cat.member(x).dims();
        (0..dims.len()).all(|v| {
            let p = self.cat.algebra().modulus();
            let rows = s
                .iter()
                .fold(FMatrix::zero(0, dims[v], p), |acc, c| acc.vstack(&self.coimage_rows[x][c][v]).unwrap());
            rows.rank() == dims[v]
        })
    }

    pub fn fac_closure(&self, s: Subcat) -> Subcat {
        Subcat::from_indices(self.all().filter(|&x| self.is_quotient_of(s, x)))
    }

    pub fn sub_closure(&self, s: Subcat) -> Subcat {
        Subcat::from_indices(self.all().filter(|&x| self.is_sub_of(s, x)))
    }

    pub fn is_quotient_closed(&self, s: Subcat) -> bool {
        self.fac_closure(s).is_subset_of(s)
    }

    pub fn is_submodule_closed(&self, s: Subcat) -> bool {
        self.sub_closure(s).is_subset_of(s)
    }

    /// Indecomposable summands of all middle terms `0 -> L -> E -> M_n -> 0`
    /// with `L` a sum of members of `partners`, each with multiplicity
    /// `dim Ext^1(M_n, -)`.
    fn ext_summands(&self, n: usize, partners: Subcat) -> Result<Subcat> {
        self.ext_memo.get_or((n, partners), || {
            let parts: Vec<Representation> = partners
                .iter()
                .flat_map(|j| std::iter::repeat(self.cat.member(j).clone()).take(self.cat.ext(n, j)))
                .collect();
            if parts.is_empty() {
                return Ok(Subcat::EMPTY);
            }
            let l = direct_sum(self.cat.algebra(), &parts)?.sum;
            let ext = Ext1::compute(self.cat.member(n), &l)?;
            let mut found = Subcat::EMPTY;
            for class in ext.classes() {
                let e = ext.middle_term(&class)?;
                found = found.union(Subcat::support(&self.cat.decompose(&e.middle)?));
            }
            Ok(found)
        })
    }

    pub fn is_ext_closed(&self, s: Subcat) -> Result<bool> {
        for n in s.iter() {
            if !self.ext_summands(n, s.intersection(self.ext_partners[n]))?.is_subset_of(s) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn ext_closure(&self, s: Subcat) -> Result<Subcat> {
        let mut cur = s;
        loop {
            let mut next = cur;
            for n in cur.iter() {
                next = next.union(self.ext_summands(n, cur.intersection(self.ext_partners[n]))?);
            }
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    pub fn is_torsion_class(&self, s: Subcat) -> Result<bool> {
        Ok(self.is_quotient_closed(s) && self.is_ext_closed(s)?)
    }

    pub fn is_torsionfree_class(&self, s: Subcat) -> Result<bool> {
        Ok(self.is_submodule_closed(s) && self.is_ext_closed(s)?)
    }

    /// Smallest torsion class containing `s`.
    pub fn torsion_closure(&self, s: Subcat) -> Result<Subcat> {
        let mut cur = s;
        loop {
            let next = self.ext_closure(self.fac_closure(cur))?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    pub fn is_image_closed(&self, s: Subcat) -> bool {
        self.fac_closure(s).intersection(self.sub_closure(s)).is_subset_of(s)
    }

    /// Every cokernel of a map from an object of `add src` to an object of
    /// `add tgt` lies in `add tgt`.
    pub fn cokernels_within(&self, src: Subcat, tgt: Subcat) -> Result<bool> {
        self.coker_memo.get_or((src, tgt), || self.scan_cokernels(src, tgt))
    }

    fn scan_cokernels(&self, src: Subcat, tgt: Subcat) -> Result<bool> {
        let outside = self.full().difference(tgt);
        if outside.is_empty() || src.is_empty() || tgt.is_empty() {
            return Ok(true);
        }
        let mut parts = Vec::new();
        for d in tgt.iter() {
            let k = outside.iter().map(|e| self.cat.hom(d, e)).max().unwrap_or(0);
            parts.extend(std::iter::repeat(self.cat.member(d).clone()).take(k));
        }
        if parts.is_empty() {
            return Ok(true);
        }
        let b = direct_sum(self.cat.algebra(), &parts)?.sum;
        let p = b.modulus();
        let mut gens: HashSet<Vec<FMatrix>> = HashSet::new();
        for c in src.iter() {
            let space = HomSpace::new(self.cat.member(c), &b)?;
            for f in space.elements().filter(|f| !f.is_zero()) {
                gens.insert(f.vertex_maps().iter().map(|m| m.transpose().row_space()).collect());
            }
        }
        let zero: Vec<FMatrix> = b.dims().iter().map(|&d| FMatrix::zero(0, d, p)).collect();
        let subs = bfs(zero, &gens);
        for u in subs {
            let q = quotient(&b, &u)?;
            if !Subcat::support(&self.cat.decompose(&q.rep)?).is_subset_of(tgt) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every kernel of a map from an object of `add src` to an object of
    /// `add tgt` lies in `add src`.
    pub fn kernels_within(&self, src: Subcat, tgt: Subcat) -> Result<bool> {
        self.ker_memo.get_or((src, tgt), || self.scan_kernels(src, tgt))
    }

    fn scan_kernels(&self, src: Subcat, tgt: Subcat) -> Result<bool> {
        let outside = self.full().difference(src);
        if outside.is_empty() || src.is_empty() || tgt.is_empty() {
            return Ok(true);
        }
        let mut parts = Vec::new();
        for c in src.iter() {
            let k = outside.iter().map(|e| self.cat.hom(e, c)).max().unwrap_or(0);
            parts.extend(std::iter::repeat(self.cat.member(c).clone()).take(k));
        }
        if parts.is_empty() {
            return Ok(true);
        }
        let a = direct_sum(self.cat.algebra(), &parts)?.sum;
        let p = a.modulus();
        // a kernel is stored through its annihilator: the row space of the
        // stacked component maps it is the common kernel of
        let mut gens: HashSet<Vec<FMatrix>> = HashSet::new();
        for d in tgt.iter() {
            let space = HomSpace::new(&a, self.cat.member(d))?;
            for f in space.elements().filter(|f| !f.is_zero()) {
                gens.insert(f.vertex_maps().iter().map(FMatrix::row_space).collect());
            }
        }
        let none: Vec<FMatrix> = a.dims().iter().map(|&d| FMatrix::zero(0, d, p)).collect();
        let equations = bfs(none, &gens);
        for eq in equations {
            let spans = eq.iter().map(FMatrix::kernel_basis).collect();
            let k = subrep(&a, spans)?;
            if !Subcat::support(&self.cat.decompose(&k.rep)?).is_subset_of(src) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_cokernel_closed(&self, s: Subcat) -> Result<bool> {
        self.cokernels_within(s, s)
    }

    pub fn is_kernel_closed(&self, s: Subcat) -> Result<bool> {
        self.kernels_within(s, s)
    }

    pub fn is_ice_closed(&self, s: Subcat) -> Result<bool> {
        Ok(self.is_image_closed(s) && self.is_ext_closed(s)? && self.is_cokernel_closed(s)?)
    }

    pub fn is_wide(&self, s: Subcat) -> Result<bool> {
        Ok(self.is_ext_closed(s)? && self.is_kernel_closed(s)? && self.is_cokernel_closed(s)?)
    }

    /// Members `A` of `s` such that every map from an object of `add s` to `A`
    /// has its kernel in `add s`.
    pub fn alpha(&self, s: Subcat) -> Result<Subcat> {
        if !self.is_ice_closed(s)? {
            return Err(Error::Precondition(format!("{} is not ICE-closed", s.display(&self.cat))));
        }
        self.alpha_unchecked(s)
    }

    pub(crate) fn alpha_unchecked(&self, s: Subcat) -> Result<Subcat> {
        self.alpha_memo.get_or(s, || {
            let mut out = Subcat::EMPTY;
            for a in s.iter() {
                if self.kernels_within(s, Subcat::singleton(a))? {
                    out = out.with(a);
                }
            }
            Ok(out)
        })
    }

    /// `{X : Hom(C, X) = 0 for all C in s}`.
    pub fn perp_right(&self, s: Subcat) -> Subcat {
        Subcat::from_indices(self.all().filter(|&x| s.iter().all(|c| self.cat.hom(c, x) == 0)))
    }

    /// `{X : Hom(X, C) = 0 for all C in s}`.
    pub fn perp_left(&self, s: Subcat) -> Subcat {
        Subcat::from_indices(self.all().filter(|&x| s.iter().all(|c| self.cat.hom(x, c) == 0)))
    }

    /// Heart `T ∩ U^⊥` of the interval `[U, T]`.
    pub fn heart(&self, lower: Subcat, upper: Subcat) -> Subcat {
        upper.intersection(self.perp_right(lower))
    }

    /// `s` is a torsion class of the abelian category `add w` (`w` wide).
    pub fn torsion_in_wide(&self, s: Subcat, w: Subcat) -> Result<bool> {
        if !self.is_wide(w)? {
            return Err(Error::Precondition(format!("{} is not wide", w.display(&self.cat))));
        }
        self.torsion_in_wide_unchecked(s, w)
    }

    pub(crate) fn torsion_in_wide_unchecked(&self, s: Subcat, w: Subcat) -> Result<bool> {
        Ok(s.is_subset_of(w) && self.fac_closure(s).intersection(w).is_subset_of(s) && self.is_ext_closed(s)?)
    }

    /// `U * D`: objects `X` whose quotient by the `U`-trace lies in `add D`.
    pub fn star(&self, u: Subcat, d: Subcat) -> Result<Subcat> {
        let u_members: Vec<Representation> = u.iter().map(|i| self.cat.member(i).clone()).collect();
        let mut out = Subcat::EMPTY;
        for x in self.all() {
            let m = self.cat.member(x);
            let t = trace(&u_members, m)?;
            let q = quotient(m, &t.spans)?;
            if Subcat::support(&self.cat.decompose(&q.rep)?).is_subset_of(d) {
                out = out.with(x);
            }
        }
        Ok(out)
    }
}

/// All per-vertex subspace tuples reachable from `start` by repeatedly merging
/// in generators; every merge is a row-space sum.
fn bfs(start: Vec<FMatrix>, gens: &HashSet<Vec<FMatrix>>) -> Vec<Vec<FMatrix>> {
    let mut seen: HashSet<Vec<FMatrix>> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next: Vec<FMatrix> = cur.iter().zip(g).map(|(u, h)| u.vstack(h).unwrap().row_space()).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
        order.push(cur);
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::BoundQuiverAlgebra;

    fn calc(name: &str) -> SubcatCalc {
        let alg = Arc::new(BoundQuiverAlgebra::builtin(name).unwrap());
        SubcatCalc::new(Arc::new(IndCatalog::build(alg).unwrap())).unwrap()
    }

    fn s(c: &SubcatCalc, labels: &str) -> Subcat {
        Subcat::parse(c.catalog(), labels).unwrap()
    }

    #[test]
    fn quotient_closures() {
        let c = calc("lineA:3");
        assert_eq!(c.fac_closure(s(&c, "21")), s(&c, "21,2"));
        assert_eq!(c.fac_closure(s(&c, "2,21,321")), s(&c, "2,21,32,3,321"));
        assert_eq!(c.fac_closure(Subcat::EMPTY), Subcat::EMPTY);
    }

    #[test]
    fn extension_closures() {
        let c = calc("lineA:3");
        assert_eq!(c.ext_closure(s(&c, "1,2")).unwrap(), s(&c, "1,2,21"));
        assert_eq!(c.ext_closure(c.full()).unwrap(), c.full());
        let n = calc("paperNakayama");
        assert_eq!(n.ext_closure(s(&n, "1,3")).unwrap(), s(&n, "1,3"));
    }

    #[test]
    fn torsion_classes() {
        let c = calc("lineA:3");
        assert!(c.is_torsion_class(s(&c, "2,21,32,3,321")).unwrap());
        assert!(!c.is_torsion_class(s(&c, "21")).unwrap());
        assert!(c.is_torsion_class(Subcat::EMPTY).unwrap());
        assert!(c.is_torsion_class(c.full()).unwrap());
    }

    #[test]
    fn image_kernel_cokernel() {
        let c = calc("lineA:3");
        let x = s(&c, "3,321");
        assert!(c.is_image_closed(x) && c.is_cokernel_closed(x).unwrap());
        let y = s(&c, "1,2");
        assert!(c.is_image_closed(y) && !c.is_ext_closed(y).unwrap());
        let f = c.full();
        assert!(c.is_image_closed(f) && c.is_kernel_closed(f).unwrap() && c.is_cokernel_closed(f).unwrap());
    }

    #[test]
    fn ice_closed_examples() {
        let c = calc("lineA:3");
        assert!(c.is_ice_closed(s(&c, "3,321")).unwrap());
        // a brick without self-extensions generates an ICE-closed subcategory
        assert!(c.is_ice_closed(s(&c, "32")).unwrap());
        assert!(!c.is_ice_closed(s(&c, "1,2")).unwrap());
        assert!(!c.is_ice_closed(s(&c, "21,1")).unwrap());
        let n = calc("paperNakayama");
        assert!(n.is_ice_closed(s(&n, "3")).unwrap());
    }

    #[test]
    fn alpha_examples() {
        let c = calc("lineA:3");
        assert_eq!(c.alpha(s(&c, "2,21,32,3,321")).unwrap(), s(&c, "21,3,321"));
        assert_eq!(c.alpha(c.full()).unwrap(), c.full());
        let n = calc("paperNakayama");
        assert_eq!(n.alpha(s(&n, "2,21,32,3")).unwrap(), s(&n, "21,3"));
        assert_eq!(c.alpha(s(&c, "32")).unwrap(), s(&c, "32"));
        assert!(matches!(c.alpha(s(&c, "1,2")), Err(Error::Precondition(_))));
    }

    #[test]
    fn wide_examples() {
        let c = calc("lineA:3");
        assert!(c.is_wide(s(&c, "21,3,321")).unwrap());
        assert!(!c.is_wide(s(&c, "2,21")).unwrap());
        assert!(c.is_wide(Subcat::EMPTY).unwrap());
    }

    #[test]
    fn perps() {
        let c = calc("lineA:3");
        assert_eq!(c.perp_right(s(&c, "2")), s(&c, "1,21,3,321"));
        assert_eq!(c.perp_right(Subcat::EMPTY), c.full());
        let n = calc("paperNakayama");
        assert_eq!(n.perp_right(s(&n, "2")), s(&n, "1,21,3"));
    }

    #[test]
    fn torsion_in_wide_examples() {
        let c = calc("lineA:3");
        let w = s(&c, "21,3,321");
        assert!(c.torsion_in_wide(s(&c, "3,321"), w).unwrap());
        assert!(c.torsion_in_wide(w, w).unwrap());
        assert!(!c.torsion_in_wide(s(&c, "321"), w).unwrap());
        assert!(matches!(c.torsion_in_wide(w, s(&c, "2,21")), Err(Error::Precondition(_))));
    }

    #[test]
    fn star_examples() {
        let c = calc("lineA:3");
        let u = c.fac_closure(s(&c, "2"));
        assert_eq!(c.star(u, Subcat::EMPTY).unwrap(), u);
        let t = s(&c, "2,32,3,321");
        assert_eq!(c.star(Subcat::EMPTY, t).unwrap(), t);
        assert_eq!(c.star(u, s(&c, "3,321")).unwrap(), c.fac_closure(s(&c, "2,32,321")));
    }

    #[test]
    fn parse_and_display() {
        let c = calc("lineA:3");
        let x = s(&c, "321, 2");
        assert_eq!(x.display(c.catalog()), "{2,321}");
        assert!(Subcat::parse(c.catalog(), "4").is_err());
        assert_eq!(s(&c, ""), Subcat::EMPTY);
    }
}
