//! Integer-indexed decreasing sequences of subcategories: the narrow and ICE
//! conditions and the bijection with decreasing sequences of maximal meet
//! intervals.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::IndCatalog;
use crate::error::{Error, Result};
use crate::lattice::{Interval, TorsLattice};
use crate::subcat::{Subcat, SubcatCalc};

/// Value of the sequence below its stored range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Below {
    Full,
    Constant,
}

/// Value of the sequence above its stored range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Above {
    Empty,
    Constant,
}

/// A sequence `{C(k)}` stored on `[lo, lo + entries.len() - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IceSequence {
    lo: i32,
    entries: Vec<Subcat>,
    below: Below,
    above: Above,
    full: Subcat,
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    lo: i32,
    hi: i32,
    entries: Vec<Vec<String>>,
    below: Below,
    above: Above,
}

impl IceSequence {
    pub fn new(cat: &IndCatalog, lo: i32, entries: Vec<Subcat>, below: Below, above: Above) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Usage("a sequence needs at least one stored entry".into()));
        }
        Ok(IceSequence { lo, entries, below, above, full: Subcat::full(cat.len()) })
    }

    /// The usual convention: full below `lo`, empty above the stored range.
    pub fn full_sequence(cat: &IndCatalog, lo: i32, entries: Vec<Subcat>) -> Result<Self> {
        Self::new(cat, lo, entries, Below::Full, Above::Empty)
    }

    /// The constant sequence at `s`.
    pub fn constant(cat: &IndCatalog, s: Subcat) -> Self {
        IceSequence { lo: 0, entries: vec![s], below: Below::Constant, above: Above::Constant, full: Subcat::full(cat.len()) }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.entries.len() as i32 - 1
    }

    pub fn entries(&self) -> &[Subcat] {
        &self.entries
    }

    pub fn below(&self) -> Below {
        self.below
    }

    pub fn above(&self) -> Above {
        self.above
    }

    pub fn entry(&self, k: i32) -> Subcat {
        if k < self.lo {
            match self.below {
                Below::Full => self.full,
                Below::Constant => self.entries[0],
            }
        } else if k > self.hi() {
            match self.above {
                Above::Empty => Subcat::EMPTY,
                Above::Constant => *self.entries.last().unwrap(),
            }
        } else {
            self.entries[(k - self.lo) as usize]
        }
    }

    pub fn is_full(&self) -> bool {
        self.below == Below::Full && self.above == Above::Empty
    }

    /// Consecutive pairs `(C(k), C(k+1))` covering every distinct pair of the
    /// infinite sequence, boundaries included.
    fn pairs(&self) -> Vec<(Subcat, Subcat)> {
        (self.lo - 2..=self.hi() + 1).map(|k| (self.entry(k), self.entry(k + 1))).collect()
    }

    pub fn is_decreasing(&self) -> bool {
        self.pairs().iter().all(|(a, b)| b.is_subset_of(*a))
    }

    /// Length `n`: `C(1) = 0` and `C(-n+1)` is everything.
    pub fn has_length(&self, n: i32) -> bool {
        self.entry(1).is_empty() && self.entry(1 - n) == self.full
    }

    /// View with `entry(k)` read at `k + offset` of the underlying sequence.
    pub fn shifted(&self, offset: i32) -> Shifted<'_> {
        Shifted { seq: self, offset }
    }

    /// Owned copy of a shift, for storage.
    pub fn reindexed(&self, offset: i32) -> IceSequence {
        IceSequence { lo: self.lo - offset, ..self.clone() }
    }

    pub fn to_json(&self, cat: &IndCatalog) -> serde_json::Value {
        let json = SequenceJson {
            lo: self.lo,
            hi: self.hi(),
            entries: self.entries.iter().map(|s| s.labels(cat)).collect(),
            below: self.below,
            above: self.above,
        };
        serde_json::to_value(json).expect("plain data serialises")
    }

    pub fn from_json(cat: &IndCatalog, value: &serde_json::Value) -> Result<Self> {
        let json: SequenceJson = serde_json::from_value(value.clone())?;
        if json.hi - json.lo + 1 != json.entries.len() as i32 {
            return Err(Error::Schema("`hi - lo + 1` must equal the number of entries".into()));
        }
        let entries = json
            .entries
            .iter()
            .map(|labels| Subcat::parse(cat, &labels.join(",")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cat, json.lo, entries, json.below, json.above)
    }

    pub fn display(&self, cat: &IndCatalog) -> String {
        let body: Vec<String> = (self.lo..=self.hi())
            .map(|k| format!("C({k})={}", self.entry(k).display(cat)))
            .collect();
        let below = match self.below {
            Below::Full => "full",
            Below::Constant => "constant",
        };
        let above = match self.above {
            Above::Empty => "empty",
            Above::Constant => "constant",
        };
        format!("[{below}] {} [{above}]", body.join(" "))
    }
}

/// A reindexing of a sequence that borrows rather than copies it.
#[derive(Clone, Copy)]
pub struct Shifted<'a> {
    seq: &'a IceSequence,
    offset: i32,
}

impl Shifted<'_> {
    pub fn entry(&self, k: i32) -> Subcat {
        self.seq.entry(k + self.offset)
    }

    pub fn lo(&self) -> i32 {
        self.seq.lo - self.offset
    }

    pub fn hi(&self) -> i32 {
        self.seq.hi() - self.offset
    }

    pub fn offset(&self) -> i32 {
        self.offset
    }

    pub fn underlying(&self) -> &IceSequence {
        self.seq
    }
}

/// Narrow: monotone, each entry extension-closed, and for every map
/// `f: X -> Y` with `X` in `C(k)` and `Y` in `C(k+1)`, `ker f` lies in `C(k)`
/// and `coker f` in `C(k+1)`.
pub fn is_narrow(calc: &SubcatCalc, seq: &IceSequence) -> Result<bool> {
    if !seq.is_decreasing() {
        return Ok(false);
    }
    for (a, b) in seq.pairs() {
        if !calc.is_ext_closed(a)? || !calc.kernels_within(a, b)? || !calc.cokernels_within(a, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// ICE: every entry ICE-closed and `C(k+1)` a torsion class of `α(C(k))`.
pub fn is_ice(calc: &SubcatCalc, seq: &IceSequence) -> Result<bool> {
    if !seq.is_decreasing() {
        return Ok(false);
    }
    for (a, b) in seq.pairs() {
        if !calc.is_ice_closed(a)? {
            return Ok(false);
        }
        let w = calc.alpha_unchecked(a)?;
        if !calc.torsion_in_wide_unchecked(b, w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NarrowIceReport {
    pub window: usize,
    pub tuples: usize,
    pub decreasing: usize,
    pub narrow: usize,
    pub ice: usize,
    /// Valid sequences whose lowest window entry is everything, i.e. those
    /// lying between the standard aisle shifted by `window - 1` and the
    /// standard aisle.
    pub full_at_lo: usize,
    pub disagreements: Vec<IceSequence>,
}

/// Largest `members * window` the exhaustive scans accept.
pub const SCAN_BIT_CAP: usize = 24;

/// Evaluates both predicates on every tuple over the window `[1 - window, 0]`
/// (full below, empty above).
pub fn narrow_iff_ice_scan(calc: &SubcatCalc, window: usize) -> Result<NarrowIceReport> {
    let n = calc.catalog().len();
    if window == 0 {
        return Err(Error::Usage("window must be at least 1".into()));
    }
    if n * window > SCAN_BIT_CAP {
        return Err(Error::CapExceeded(format!("{n} members over a window of {window} exceeds {SCAN_BIT_CAP} bits")));
    }
    let lo = 1 - window as i32;
    let total = 1u64 << (n * window);
    let mask = (1u64 << n) - 1;
    let cat = calc.catalog();
    let full = calc.full();
    let results: Vec<(bool, bool, bool, bool, IceSequence)> = (0..total)
        .into_par_iter()
        .map(|bits| {
            let entries = (0..window).map(|k| Subcat::from_bits(bits >> (k * n) & mask)).collect();
            let seq = IceSequence::full_sequence(cat, lo, entries)?;
            let dec = seq.is_decreasing();
            let narrow = is_narrow(calc, &seq)?;
            let ice = is_ice(calc, &seq)?;
            let lowest = seq.entry(lo) == full;
            Ok((dec, narrow, ice, lowest, seq))
        })
        .collect::<Result<_>>()?;
    let mut report = NarrowIceReport { window, tuples: results.len(), ..Default::default() };
    for (dec, narrow, ice, lowest, seq) in results {
        report.decreasing += dec as usize;
        report.narrow += narrow as usize;
        report.ice += ice as usize;
        report.full_at_lo += (ice && lowest) as usize;
        if narrow != ice {
            report.disagreements.push(seq);
        }
    }
    Ok(report)
}

/// All full ICE sequences with `C(0)` everything and `C(n+1) = 0`, stored
/// on `[1, n]`, found by brute force over decreasing tuples.
pub fn enumerate_full_sequences(calc: &SubcatCalc, n: usize) -> Result<Vec<IceSequence>> {
    if n == 0 {
        return Err(Error::Usage("sequence length must be at least 1".into()));
    }
    let mut chains: Vec<Vec<Subcat>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for chain in &chains {
            let top = chain.last().copied().unwrap_or(calc.full());
            let members: Vec<usize> = top.iter().collect();
            for mask in 0..(1u64 << members.len()) {
                let s = Subcat::from_indices((0..members.len()).filter(|b| mask >> b & 1 == 1).map(|b| members[b]));
                let mut c = chain.clone();
                c.push(s);
                next.push(c);
            }
        }
        chains = next;
    }
    let cat = calc.catalog();
    let found: Vec<Option<IceSequence>> = chains
        .into_par_iter()
        .map(|entries| {
            let seq = IceSequence::full_sequence(cat, 1, entries)?;
            Ok(is_ice(calc, &seq)?.then_some(seq))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<IceSequence> = found.into_iter().flatten().collect();
    out.sort_by_key(|s| s.entries().iter().map(|e| (e.len(), e.bits())).collect::<Vec<_>>());
    Ok(out)
}

/// Checks that `chain` is a decreasing sequence of maximal meet intervals
/// starting in the whole lattice.
pub fn is_mmi_chain(lattice: &TorsLattice, chain: &[Interval]) -> Result<bool> {
    let mut w = lattice.top_interval();
    for i in chain {
        if !lattice.contains(i.lower) || !lattice.contains(i.upper) || !lattice.is_maximal_meet_interval_in(i, &w)? {
            return Ok(false);
        }
        w = *i;
    }
    Ok(true)
}

/// `C(k) = T_k ∩ U_{k-1}^⊥` on `[1, n]` with `U_0 = 0`.
pub fn seq_from_mmi(lattice: &TorsLattice, chain: &[Interval]) -> Result<IceSequence> {
    let calc = lattice.calc();
    if chain.is_empty() || !is_mmi_chain(lattice, chain)? {
        return Err(Error::Precondition("not a decreasing sequence of maximal meet intervals".into()));
    }
    let mut prev_lower = Subcat::EMPTY;
    let mut entries = Vec::with_capacity(chain.len());
    for i in chain {
        entries.push(i.upper.intersection(calc.perp_right(prev_lower)));
        prev_lower = i.lower;
    }
    let seq = IceSequence::full_sequence(calc.catalog(), 1, entries)?;
    if !is_ice(calc, &seq)? {
        return Err(Error::Falsification(format!(
            "sequence {} built from a maximal meet chain is not ICE",
            seq.display(calc.catalog())
        )));
    }
    Ok(seq)
}

/// Inverse of [`seq_from_mmi`] on full sequences with `C(0)` everything and
/// `C(n+1) = 0`, where `n = hi`.
pub fn mmi_from_seq(lattice: &TorsLattice, seq: &IceSequence) -> Result<Vec<Interval>> {
    let calc = lattice.calc();
    let cat = calc.catalog();
    let n = seq.hi();
    if n < 1 || !seq.is_full() || (seq.lo()..=0).any(|k| seq.entry(k) != calc.full()) || !seq.entry(n + 1).is_empty() {
        return Err(Error::Precondition("expected a full sequence with C(0) everything and C(hi+1) empty".into()));
    }
    if !is_ice(calc, seq)? {
        return Err(Error::Precondition(format!("{} is not an ICE sequence", seq.display(cat))));
    }
    let t1 = seq.entry(1);
    let mut cur = lattice.interval(lattice.t_minus(t1)?, t1)?;
    let mut chain = vec![cur];
    for k in 2..=n {
        let c = seq.entry(k);
        let heart_lattice = lattice.heart_lattice(cur.heart)?;
        let upper = calc.star(cur.lower, c)?;
        let lower = calc.star(cur.lower, heart_lattice.t_minus(c)?)?;
        let next = lattice.interval(lower, upper)?;
        if !lattice.is_maximal_meet_interval_in(&next, &cur)? {
            return Err(Error::Falsification(format!(
                "step {k}: [{}, {}] is not maximal meet in its predecessor",
                lower.display(cat),
                upper.display(cat)
            )));
        }
        if upper.intersection(calc.perp_right(cur.lower)) != c {
            return Err(Error::Falsification(format!("step {k}: T ∩ U^⊥ does not recover C({k})")));
        }
        chain.push(next);
        cur = next;
    }
    for (k, i) in chain.iter().enumerate() {
        let expected = calc.alpha_unchecked(seq.entry(k as i32 + 1))?;
        if i.heart != expected {
            return Err(Error::Falsification(format!("heart of step {} is not alpha(C({}))", k + 1, k + 1)));
        }
    }
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThickReport {
    pub wide_by_scan: Vec<Subcat>,
    pub wide_as_hearts: Vec<Subcat>,
    pub constant_ice: Vec<Subcat>,
}

impl ThickReport {
    pub fn agrees(&self) -> bool {
        self.wide_by_scan == self.wide_as_hearts && self.wide_by_scan == self.constant_ice
    }
}

/// Wide subcategories three ways: predicate scan, hearts `H_[T⁻,T]`, and
/// constant ICE sequences.
pub fn thick_correspondence(lattice: &TorsLattice) -> Result<ThickReport> {
    let calc = lattice.calc();
    let n = calc.catalog().len();
    if n > SCAN_BIT_CAP {
        return Err(Error::CapExceeded(format!("subset scan over {n} members")));
    }
    let all: Vec<Subcat> = (0..1u64 << n).map(Subcat::from_bits).collect();
    let scan: Vec<(bool, bool)> = all
        .par_iter()
        .map(|&s| Ok((calc.is_wide(s)?, is_ice(calc, &IceSequence::constant(calc.catalog(), s))?)))
        .collect::<Result<_>>()?;
    let wide_by_scan: BTreeSet<Subcat> = all.iter().zip(&scan).filter(|(_, r)| r.0).map(|(s, _)| *s).collect();
    let constant_ice: BTreeSet<Subcat> = all.iter().zip(&scan).filter(|(_, r)| r.1).map(|(s, _)| *s).collect();
    let mut hearts = BTreeSet::new();
    for &t in lattice.elements() {
        hearts.insert(calc.heart(lattice.t_minus(t)?, t));
    }
    Ok(ThickReport {
        wide_by_scan: wide_by_scan.into_iter().collect(),
        wide_as_hearts: hearts.into_iter().collect(),
        constant_ice: constant_ice.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::BoundQuiverAlgebra;
    use std::sync::Arc;

    fn lattice(name: &str) -> TorsLattice {
        let alg = Arc::new(BoundQuiverAlgebra::builtin(name).unwrap());
        let calc = SubcatCalc::new(Arc::new(IndCatalog::build(alg).unwrap())).unwrap();
        TorsLattice::build(Arc::new(calc)).unwrap()
    }

    fn s(l: &TorsLattice, labels: &str) -> Subcat {
        Subcat::parse(l.calc().catalog(), labels).unwrap()
    }

    #[test]
    fn two_step_chain_on_line_a3() {
        let l = lattice("lineA:3");
        let c = l.calc();
        let seq = IceSequence::full_sequence(c.catalog(), -1, vec![s(&l, "2,21,32,3,321"), s(&l, "3,321")]).unwrap();
        assert!(is_ice(c, &seq).unwrap());
        assert!(is_narrow(c, &seq).unwrap());
        assert!(seq.has_length(3));
        assert_eq!(c.alpha(seq.entry(-1)).unwrap(), s(&l, "21,3,321"));
    }

    #[test]
    fn two_step_chain_on_nakayama() {
        let l = lattice("paperNakayama");
        let c = l.calc();
        let seq = IceSequence::full_sequence(c.catalog(), -1, vec![s(&l, "2,21,32,3"), s(&l, "3")]).unwrap();
        assert!(is_ice(c, &seq).unwrap());
        assert!(is_narrow(c, &seq).unwrap());
    }

    #[test]
    fn non_decreasing_is_neither() {
        let l = lattice("lineA:3");
        let c = l.calc();
        let seq = IceSequence::full_sequence(c.catalog(), 0, vec![s(&l, "1"), c.full()]).unwrap();
        assert!(!is_narrow(c, &seq).unwrap());
        assert!(!is_ice(c, &seq).unwrap());
    }

    #[test]
    fn constant_wide_sequence() {
        let l = lattice("lineA:3");
        let c = l.calc();
        let seq = IceSequence::constant(c.catalog(), s(&l, "21,3,321"));
        assert!(is_narrow(c, &seq).unwrap());
        assert!(is_ice(c, &seq).unwrap());
    }

    #[test]
    fn scan_on_line_a2() {
        let l = lattice("lineA:2");
        let one = narrow_iff_ice_scan(l.calc(), 1).unwrap();
        assert_eq!(one.ice, 5);
        assert!(one.disagreements.is_empty());
        let two = narrow_iff_ice_scan(l.calc(), 2).unwrap();
        assert_eq!(two.tuples, 64);
        assert_eq!(two.full_at_lo, 5);
        assert!(two.disagreements.is_empty());
    }

    #[test]
    fn example_chains_round_trip() {
        let l = lattice("lineA:3");
        let c = l.calc().clone();
        let fac = |x: &str| c.fac_closure(s(&l, x));
        let chain = vec![
            l.interval(fac("2"), fac("2,21,321")).unwrap(),
            l.interval(fac("2,32"), fac("2,32,321")).unwrap(),
        ];
        let seq = seq_from_mmi(&l, &chain).unwrap();
        assert_eq!(seq.entries(), &[s(&l, "2,21,32,3,321"), s(&l, "3,321")]);
        assert_eq!(mmi_from_seq(&l, &seq).unwrap(), chain);
        let view = seq.shifted(2);
        assert_eq!(view.entry(-1), s(&l, "2,21,32,3,321"));
        assert_eq!(view.entry(0), s(&l, "3,321"));
        assert_eq!(view.entry(1), Subcat::EMPTY);
        assert_eq!(seq.reindexed(2).entry(0), view.entry(0));
    }

    #[test]
    fn nakayama_chain_round_trip() {
        let l = lattice("paperNakayama");
        let c = l.calc().clone();
        let fac = |x: &str| c.fac_closure(s(&l, x));
        let seq = IceSequence::full_sequence(c.catalog(), 1, vec![s(&l, "2,21,32,3"), s(&l, "3")]).unwrap();
        let chain = mmi_from_seq(&l, &seq).unwrap();
        assert_eq!(chain[0].upper, fac("2,21,32"));
        assert_eq!(chain[0].lower, fac("2"));
        assert_eq!(chain[1].upper, fac("2,32"));
        assert_eq!(chain[1].lower, fac("2"));
    }

    #[test]
    fn length_one_chains() {
        let l = lattice("lineA:3");
        for &t in l.elements() {
            let chain = vec![l.interval(l.t_minus(t).unwrap(), t).unwrap()];
            let seq = seq_from_mmi(&l, &chain).unwrap();
            assert_eq!(seq.entries(), &[t]);
            assert!(seq.reindexed(1).has_length(2));
        }
    }

    #[test]
    fn thick() {
        for name in ["lineA:1", "lineA:2", "lineA:3"] {
            let r = thick_correspondence(&lattice(name)).unwrap();
            assert!(r.agrees(), "{name}");
        }
        assert_eq!(thick_correspondence(&lattice("lineA:1")).unwrap().wide_by_scan.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let l = lattice("lineA:3");
        let cat = l.calc().catalog();
        let seq = IceSequence::full_sequence(cat, -1, vec![s(&l, "2,21,32,3,321"), s(&l, "3,321")]).unwrap();
        let j = seq.to_json(cat);
        assert_eq!(j["below"], "full");
        assert_eq!(j["above"], "empty");
        assert_eq!(j["hi"], 0);
        assert_eq!(IceSequence::from_json(cat, &j).unwrap(), seq);
    }
}
