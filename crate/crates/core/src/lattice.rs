//! Lattices of torsion classes, intervals and hearts, maximal meet intervals
//! and the interval-to-heart isomorphism.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subcat::{Subcat, SubcatCalc};

/// Largest catalog (or heart) the enumerator accepts.
pub const TORS_MEMBER_CAP: usize = 24;

/// Up to this many members the enumerator scans every subset.
const SUBSET_SCAN_LIMIT: usize = 20;

/// Torsion classes of the abelian category `add ambient` for a wide
/// `ambient`; the whole module category when `ambient` is the full catalog.
pub struct TorsLattice {
    calc: Arc<SubcatCalc>,
    ambient: Subcat,
    elements: Vec<Subcat>,
    /// `(i, j)`: element `j` is a lower cover of element `i`.
    covers: Vec<(usize, usize)>,
    index: HashMap<Subcat, usize>,
    heart_lattices: Mutex<HashMap<Subcat, Arc<TorsLattice>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lower: Subcat,
    pub upper: Subcat,
    pub heart: Subcat,
}

#[derive(Serialize)]
struct LatticeJson {
    elements: Vec<Vec<String>>,
    covers: Vec<[usize; 2]>,
}

impl TorsLattice {
    pub fn build(calc: Arc<SubcatCalc>) -> Result<Self> {
        let full = calc.full();
        Self::build_in(calc, full)
    }

    /// Torsion classes of the wide subcategory `ambient`.
    pub fn build_in(calc: Arc<SubcatCalc>, ambient: Subcat) -> Result<Self> {
        if ambient.len() > TORS_MEMBER_CAP {
            return Err(Error::CapExceeded(format!(
                "torsion enumeration over {} indecomposables (limit {TORS_MEMBER_CAP})",
                ambient.len()
            )));
        }
        if ambient != calc.full() && !calc.is_wide(ambient)? {
            return Err(Error::Precondition(format!("{} is not wide", ambient.display(calc.catalog()))));
        }
        let mut elements = if ambient.len() <= SUBSET_SCAN_LIMIT {
            subset_scan(&calc, ambient)?
        } else {
            frontier_scan(&calc, ambient)?
        };
        elements.sort_by_key(|s| (s.len(), s.bits()));
        let index: HashMap<Subcat, usize> = elements.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let covers = transitive_reduction(&elements);
        Ok(TorsLattice { calc, ambient, elements, covers, index, heart_lattices: Mutex::new(HashMap::new()) })
    }

    /// Torsion lattice of the wide subcategory `w`, built once and cached.
    pub fn heart_lattice(&self, w: Subcat) -> Result<Arc<TorsLattice>> {
        if let Some(l) = self.heart_lattices.lock().unwrap().get(&w) {
            return Ok(l.clone());
        }
        let built = Arc::new(TorsLattice::build_in(self.calc.clone(), w)?);
        self.heart_lattices.lock().unwrap().insert(w, built.clone());
        Ok(built)
    }

    pub fn calc(&self) -> &Arc<SubcatCalc> {
        &self.calc
    }

    pub fn ambient(&self) -> Subcat {
        self.ambient
    }

    pub fn elements(&self) -> &[Subcat] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn index_of(&self, t: Subcat) -> Option<usize> {
        self.index.get(&t).copied()
    }

    pub fn contains(&self, t: Subcat) -> bool {
        self.index.contains_key(&t)
    }

    fn require(&self, t: Subcat) -> Result<usize> {
        self.index_of(t).ok_or_else(|| {
            Error::Precondition(format!("{} is not in the lattice", t.display(self.calc.catalog())))
        })
    }

    pub fn lower_covers(&self, t: Subcat) -> Result<Vec<Subcat>> {
        let i = self.require(t)?;
        Ok(self.covers.iter().filter(|(a, _)| *a == i).map(|(_, b)| self.elements[*b]).collect())
    }

    pub fn upper_covers(&self, t: Subcat) -> Result<Vec<Subcat>> {
        let i = self.require(t)?;
        Ok(self.covers.iter().filter(|(_, b)| *b == i).map(|(a, _)| self.elements[*a]).collect())
    }

    /// Intersection of `t` with its lower covers, cross-checked against
    /// `t ∩ ⊥α(t)`.
    pub fn t_minus(&self, t: Subcat) -> Result<Subcat> {
        let via_covers = self.lower_covers(t)?.into_iter().fold(t, Subcat::intersection);
        let alpha = self.calc.alpha_unchecked(t)?;
        let via_alpha = t.intersection(self.calc.perp_left(alpha));
        if via_covers != via_alpha {
            return Err(Error::Falsification(format!(
                "T- of {} is {} by covers but {} by the perpendicular formula",
                t.display(self.calc.catalog()),
                via_covers.display(self.calc.catalog()),
                via_alpha.display(self.calc.catalog())
            )));
        }
        Ok(via_covers)
    }

    pub fn interval(&self, lower: Subcat, upper: Subcat) -> Result<Interval> {
        self.require(lower)?;
        self.require(upper)?;
        if !lower.is_subset_of(upper) {
            return Err(Error::Precondition("interval with lower end above upper end".into()));
        }
        Ok(Interval { lower, upper, heart: self.calc.heart(lower, upper) })
    }

    /// The whole lattice as an interval.
    pub fn top_interval(&self) -> Interval {
        let top = *self.elements.last().expect("lattice has a top");
        Interval { lower: Subcat::EMPTY, upper: top, heart: self.calc.heart(Subcat::EMPTY, top) }
    }

    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        for &l in &self.elements {
            for &u in &self.elements {
                if l.is_subset_of(u) {
                    out.push(Interval { lower: l, upper: u, heart: self.calc.heart(l, u) });
                }
            }
        }
        out
    }

    /// Lattice elements lying in the interval.
    pub fn members_of(&self, w: &Interval) -> Vec<Subcat> {
        self.elements.iter().copied().filter(|t| w.lower.is_subset_of(*t) && t.is_subset_of(w.upper)).collect()
    }

    pub fn is_wide_interval(&self, i: &Interval) -> Result<bool> {
        self.calc.is_wide(i.heart)
    }

    /// The lower end is the meet of the upper end with its lower covers
    /// inside the interval.
    pub fn is_meet_interval(&self, i: &Interval) -> Result<bool> {
        let meet = self
            .lower_covers(i.upper)?
            .into_iter()
            .filter(|c| i.lower.is_subset_of(*c))
            .fold(i.upper, Subcat::intersection);
        Ok(meet == i.lower)
    }

    /// The unique maximal meet interval of `w` with upper end `t`.
    pub fn maximal_meet_below(&self, t: Subcat, w: &Interval) -> Result<Interval> {
        let lower = self
            .lower_covers(t)?
            .into_iter()
            .filter(|c| w.lower.is_subset_of(*c))
            .fold(t, Subcat::intersection);
        self.interval(lower, t)
    }

    pub fn is_maximal_meet_interval_in(&self, i: &Interval, w: &Interval) -> Result<bool> {
        if !self.is_wide_interval(w)? {
            return Err(Error::Precondition("ambient interval is not wide".into()));
        }
        if !(w.lower.is_subset_of(i.lower) && i.upper.is_subset_of(w.upper)) {
            return Ok(false);
        }
        Ok(self.maximal_meet_below(i.upper, w)?.lower == i.lower)
    }

    /// Maximal meet intervals in `w`, one per element of `w`.
    pub fn maximal_meet_intervals_in(&self, w: &Interval) -> Result<Vec<Interval>> {
        let mut out = Vec::new();
        for t in self.members_of(w) {
            let i = self.maximal_meet_below(t, w)?;
            if !self.is_wide_interval(&i)? {
                return Err(Error::Falsification(format!(
                    "maximal meet interval [{}, {}] is not wide",
                    i.lower.display(self.calc.catalog()),
                    i.upper.display(self.calc.catalog())
                )));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// All decreasing sequences of maximal meet intervals of length `n`,
    /// starting inside the whole lattice.
    pub fn enumerate_mmi_sequences(&self, n: usize) -> Result<Vec<Vec<Interval>>> {
        if n == 0 {
            return Err(Error::Usage("sequence length must be at least 1".into()));
        }
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.extend_mmi(self.top_interval(), n, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn extend_mmi(&self, w: Interval, left: usize, prefix: &mut Vec<Interval>, out: &mut Vec<Vec<Interval>>) -> Result<()> {
        if left == 0 {
            out.push(prefix.clone());
            return Ok(());
        }
        for i in self.maximal_meet_intervals_in(&w)? {
            prefix.push(i);
            self.extend_mmi(i, left - 1, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }

    /// Checks that `C ↦ C ∩ U^⊥` and `D ↦ U * D` are mutually inverse,
    /// order-preserving and heart-preserving between the wide interval
    /// `w = [U, T]` and the torsion classes of its heart.
    pub fn interval_tors_iso_check(&self, w: &Interval) -> Result<IsoReport> {
        if !self.is_wide_interval(w)? {
            return Err(Error::Precondition("interval is not wide".into()));
        }
        let cat = self.calc.catalog();
        let fail = |msg: String| Err(Error::Falsification(msg));
        let side_a = self.members_of(w);
        let heart_lattice = self.heart_lattice(w.heart)?;
        let side_b = heart_lattice.elements().to_vec();
        let perp = self.calc.perp_right(w.lower);
        let phi = |c: Subcat| c.intersection(perp);
        let mut psi_cache = HashMap::new();
        for &d in &side_b {
            psi_cache.insert(d, self.calc.star(w.lower, d)?);
        }
        for &c in &side_a {
            let d = phi(c);
            if !heart_lattice.contains(d) {
                return fail(format!("{} ∩ U^⊥ is not a torsion class of the heart", c.display(cat)));
            }
            if psi_cache[&d] != c {
                return fail(format!("U * (C ∩ U^⊥) differs from C = {}", c.display(cat)));
            }
        }
        for &d in &side_b {
            let c = psi_cache[&d];
            if !side_a.contains(&c) {
                return fail(format!("U * {} is not in the interval", d.display(cat)));
            }
            if phi(c) != d {
                return fail(format!("(U * D) ∩ U^⊥ differs from D = {}", d.display(cat)));
            }
        }
        for &c1 in &side_a {
            for &c2 in &side_a {
                let (d1, d2) = (phi(c1), phi(c2));
                if c1.is_subset_of(c2) != d1.is_subset_of(d2) {
                    return fail(format!("order not preserved at {} ⊆ {}", c1.display(cat), c2.display(cat)));
                }
                if c1.is_subset_of(c2) && self.calc.heart(c1, c2) != self.calc.heart(d1, d2) {
                    return fail(format!("heart not preserved on [{}, {}]", c1.display(cat), c2.display(cat)));
                }
            }
        }
        Ok(IsoReport { interval_size: side_a.len(), heart_tors_size: side_b.len() })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cat = self.calc.catalog();
        let json = LatticeJson {
            elements: self.elements.iter().map(|s| s.labels(cat)).collect(),
            covers: self.covers.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_value(json).expect("plain data serialises")
    }

    /// DOT digraph of the Hasse quiver; arrows point from an element to its
    /// lower covers. Nodes are listed in lexicographic order of their label lists.
    pub fn hasse_dot(&self) -> String {
        let cat = self.calc.catalog();
        let names: Vec<String> = self.elements.iter().map(|s| s.display(cat)).collect();
        let keys: Vec<Vec<String>> = self.elements.iter().map(|s| s.labels(cat)).collect();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut out = String::from("digraph tors {\n");
        for &i in &order {
            writeln!(out, "  n{i} [label=\"{}\"];", names[i]).unwrap();
        }
        let mut edges = self.covers.clone();
        edges.sort_by(|x, y| (&keys[x.0], &keys[x.1]).cmp(&(&keys[y.0], &keys[y.1])));
        for (a, b) in edges {
            writeln!(out, "  n{a} -> n{b};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub interval_size: usize,
    pub heart_tors_size: usize,
}

fn subset_scan(calc: &SubcatCalc, ambient: Subcat) -> Result<Vec<Subcat>> {
    let members: Vec<usize> = ambient.iter().collect();
    let total = 1u64 << members.len();
    let found: Vec<Option<Subcat>> = (0..total)
        .into_par_iter()
        .map(|mask| {
            let s = Subcat::from_indices((0..members.len()).filter(|b| mask >> b & 1 == 1).map(|b| members[b]));
            Ok(calc.torsion_in_wide_unchecked(s, ambient)?.then_some(s))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Every torsion class is reached from the bottom by adding one member at a
/// time and closing.
fn frontier_scan(calc: &SubcatCalc, ambient: Subcat) -> Result<Vec<Subcat>> {
    let close = |mut s: Subcat| -> Result<Subcat> {
        loop {
            let next = calc.ext_closure(calc.fac_closure(s).intersection(ambient))?;
            if next == s {
                return Ok(s);
            }
            s = next;
        }
    };
    let mut seen = vec![Subcat::EMPTY];
    let mut frontier = vec![Subcat::EMPTY];
    while let Some(t) = frontier.pop() {
        for x in ambient.difference(t).iter() {
            let next = close(t.with(x))?;
            if !seen.contains(&next) {
                seen.push(next);
                frontier.push(next);
            }
        }
    }
    Ok(seen)
}

/// Cover relations of a family of sets ordered by inclusion.
pub fn transitive_reduction(elements: &[Subcat]) -> Vec<(usize, usize)> {
    let mut covers = Vec::new();
    for (i, &a) in elements.iter().enumerate() {
        for (j, &b) in elements.iter().enumerate() {
            if i == j || !b.is_subset_of(a) {
                continue;
            }
            let between = elements
                .iter()
                .any(|&c| c != a && c != b && b.is_subset_of(c) && c.is_subset_of(a));
            if !between {
                covers.push((i, j));
            }
        }
    }
    covers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::IndCatalog;
    use crate::quiver::BoundQuiverAlgebra;

    fn lattice(name: &str) -> TorsLattice {
        let alg = Arc::new(BoundQuiverAlgebra::builtin(name).unwrap());
        let calc = SubcatCalc::new(Arc::new(IndCatalog::build(alg).unwrap())).unwrap();
        TorsLattice::build(Arc::new(calc)).unwrap()
    }

    fn s(l: &TorsLattice, labels: &str) -> Subcat {
        Subcat::parse(l.calc().catalog(), labels).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(lattice("lineA:3").len(), 14);
        assert_eq!(lattice("paperNakayama").len(), 12);
        let one = lattice("lineA:1");
        assert_eq!(one.len(), 2);
        assert_eq!(one.covers(), &[(1, 0)]);
    }

    #[test]
    fn dot_for_a_point() {
        let one = lattice("lineA:1");
        assert_eq!(one.hasse_dot(), "digraph tors {\n  n0 [label=\"{}\"];\n  n1 [label=\"{1}\"];\n  n1 -> n0;\n}\n");
    }

    #[test]
    fn t_minus_examples() {
        let l = lattice("lineA:3");
        assert_eq!(l.t_minus(Subcat::EMPTY).unwrap(), Subcat::EMPTY);
        let t = s(&l, "2,21,32,3,321");
        let tm = l.t_minus(t).unwrap();
        assert_eq!(l.calc().heart(tm, t), s(&l, "21,3,321"));
        let full = l.calc().full();
        let coatoms = l.lower_covers(full).unwrap();
        assert_eq!(coatoms.len(), 3);
        assert_eq!(l.t_minus(full).unwrap(), coatoms.into_iter().fold(full, Subcat::intersection));
    }

    #[test]
    fn wide_iff_meet() {
        for name in ["lineA:3", "paperNakayama"] {
            let l = lattice(name);
            for i in l.intervals() {
                assert_eq!(l.is_wide_interval(&i).unwrap(), l.is_meet_interval(&i).unwrap());
            }
        }
    }

    #[test]
    fn maximal_meet_on_line_a3() {
        let l = lattice("lineA:3");
        let c = l.calc().clone();
        let fac = |x: &str| c.fac_closure(s(&l, x));
        let w = l.interval(fac("2"), fac("2,21,321")).unwrap();
        let i = l.interval(fac("2,32"), fac("2,32,321")).unwrap();
        assert!(l.is_maximal_meet_interval_in(&i, &w).unwrap());
        let t = fac("2,21,321");
        let point = l.interval(t, t).unwrap();
        assert!(l.is_maximal_meet_interval_in(&point, &point).unwrap());
        let top = l.top_interval();
        for &t in l.elements() {
            let i = l.interval(l.t_minus(t).unwrap(), t).unwrap();
            assert!(l.is_maximal_meet_interval_in(&i, &top).unwrap());
        }
    }

    #[test]
    fn mmi_sequences_of_length_one() {
        let l = lattice("paperNakayama");
        let seqs = l.enumerate_mmi_sequences(1).unwrap();
        assert_eq!(seqs.len(), l.len());
        for seq in seqs {
            assert_eq!(seq[0].lower, l.t_minus(seq[0].upper).unwrap());
        }
    }

    #[test]
    fn iso_check_on_examples() {
        let l = lattice("lineA:3");
        let c = l.calc().clone();
        let w = l.interval(c.fac_closure(s(&l, "2")), c.fac_closure(s(&l, "2,21,321"))).unwrap();
        assert_eq!(w.heart, s(&l, "21,3,321"));
        let r = l.interval_tors_iso_check(&w).unwrap();
        assert_eq!(r.interval_size, r.heart_tors_size);
        let top = l.top_interval();
        assert_eq!(l.interval_tors_iso_check(&top).unwrap().interval_size, 14);
    }

    #[test]
    fn frontier_agrees_with_scan() {
        let l = lattice("lineA:3");
        let mut a = frontier_scan(l.calc(), l.calc().full()).unwrap();
        a.sort_by_key(|s| (s.len(), s.bits()));
        assert_eq!(a, l.elements());
    }
}
