//! The bounded derived category of a hereditary algebra on a finite window of
//! degrees. Every object is a sum of stalks, so homology-determined aisles
//! are stored as one subcategory per degree; triangles are computed with
//! honest complexes and cones and then read back through cohomology.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::catalog::IndCatalog;
use crate::complex::{complex_sum, mapping_cone, resolved_stalk, ChainHomSpace, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::iceseq::{is_ice, Above, Below, IceSequence};
use crate::linalg::FMatrix;
use crate::rep::{direct_sum, from_sum, into_sum, HomSpace, RepMorphism, Representation};
use crate::subcat::{Subcat, SubcatCalc};

/// An indecomposable stalk `M[-degree]`: catalog member `M` placed in
/// cohomological degree `degree`.
pub type Stalk = (usize, i32);

/// `dim Hom(M[i], N[j])` in the derived category of a hereditary algebra.
pub fn derived_hom_dim(cat: &IndCatalog, m: usize, i: i32, n: usize, j: i32) -> usize {
    match j - i {
        0 => cat.hom(m, n),
        1 => cat.ext(m, n),
        _ => 0,
    }
}

/// `dim Hom` between two stalks given by degree.
pub fn stalk_hom_dim(cat: &IndCatalog, a: Stalk, b: Stalk) -> usize {
    derived_hom_dim(cat, a.0, -a.1, b.0, -b.1)
}

/// A homology-determined subcategory of sums of stalks: `S(k)` on
/// `[lo, hi]`, everything below `lo` and nothing above `hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowedAisle {
    lo: i32,
    hi: i32,
    layers: Vec<Subcat>,
    full: Subcat,
}

impl WindowedAisle {
    pub fn new(cat: &IndCatalog, lo: i32, layers: Vec<Subcat>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Usage("an aisle window needs at least one degree".into()));
        }
        let hi = lo + layers.len() as i32 - 1;
        Ok(WindowedAisle { lo, hi, layers, full: Subcat::full(cat.len()) })
    }

    /// Everything in degrees `<= 0`, stored on `[lo, 0]`.
    pub fn standard(cat: &IndCatalog, lo: i32) -> Result<Self> {
        if lo > 0 {
            return Err(Error::Usage("the standard aisle window must contain degree 0".into()));
        }
        let full = Subcat::full(cat.len());
        Self::new(cat, lo, vec![full; (1 - lo) as usize])
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.hi
    }

    pub fn layers(&self) -> &[Subcat] {
        &self.layers
    }

    pub fn layer(&self, k: i32) -> Subcat {
        if k < self.lo {
            self.full
        } else if k > self.hi {
            Subcat::EMPTY
        } else {
            self.layers[(k - self.lo) as usize]
        }
    }

    pub fn contains(&self, s: Stalk) -> bool {
        self.layer(s.1).contains(s.0)
    }

    /// `S(k+1) ⊆ S(k)` for every `k`.
    pub fn is_shift_closed(&self) -> bool {
        (self.lo - 1..=self.hi).all(|k| self.layer(k + 1).is_subset_of(self.layer(k)))
    }

    /// `U[s] = {X[s] : X ∈ U}`, so that `S'(k) = S(k + s)`.
    pub fn shifted(&self, s: i32) -> WindowedAisle {
        WindowedAisle { lo: self.lo - s, hi: self.hi - s, ..self.clone() }
    }

    /// Stalks `N[-d]` with no maps from the aisle: `Hom(S(d), N) = 0` and
    /// `Ext¹(S(d+1), N) = 0`.
    pub fn coaisle_layer(&self, cat: &IndCatalog, d: i32) -> Subcat {
        let (same, above) = (self.layer(d), self.layer(d + 1));
        Subcat::from_indices(
            (0..cat.len()).filter(|&n| same.iter().all(|m| cat.hom(m, n) == 0) && above.iter().all(|m| cat.ext(m, n) == 0)),
        )
    }

    /// Coaisle layers on the degrees `lo..=hi`.
    pub fn coaisle(&self, cat: &IndCatalog, lo: i32, hi: i32) -> Vec<Subcat> {
        (lo..=hi).map(|d| self.coaisle_layer(cat, d)).collect()
    }

    pub fn to_json(&self, cat: &IndCatalog) -> serde_json::Value {
        let layers: serde_json::Map<String, serde_json::Value> = (self.lo..=self.hi)
            .rev()
            .map(|k| (k.to_string(), serde_json::json!(self.layer(k).labels(cat))))
            .collect();
        serde_json::json!({ "window": [self.lo, self.hi], "layers": layers })
    }

    /// One cluster of nodes per degree of the window, aisle members in red.
    pub fn to_dot(&self, cat: &IndCatalog) -> String {
        let mut out = String::from("digraph aisle {\n  rankdir=LR;\n");
        for k in self.lo..=self.hi {
            let tag = if k < 0 { format!("m{}", -k) } else { k.to_string() };
            let _ = writeln!(out, "  subgraph cluster_{tag} {{\n    label=\"degree {k}\";");
            let mut members: Vec<usize> = (0..cat.len()).collect();
            members.sort_by(|a, b| cat.label(*a).cmp(cat.label(*b)));
            for m in members {
                let color = if self.layer(k).contains(m) { " color=red" } else { "" };
                let _ = writeln!(out, "    d{tag}_{m} [label=\"{}[{}]\"{color}];", cat.label(m), -k);
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

/// The aisle `{X : H^k X ∈ C(k)}` of a full sequence, stored on `[lo, 0]`.
/// The sequence must vanish above degree 0 and be everything below `lo`.
pub fn theta(cat: &IndCatalog, seq: &IceSequence, lo: i32) -> Result<WindowedAisle> {
    let full = Subcat::full(cat.len());
    if seq.below() != Below::Full || seq.above() != Above::Empty {
        return Err(Error::Precondition("only sequences that are full below and empty above define windowed aisles".into()));
    }
    if lo > 0 || !seq.entry(1).is_empty() || seq.entry(lo - 1) != full {
        return Err(Error::Precondition(format!("{} does not fit the window [{lo}, 0]", seq.display(cat))));
    }
    WindowedAisle::new(cat, lo, (lo..=0).map(|k| seq.entry(k)).collect())
}

/// `C(k) = H^k(U)`, which for a stalk aisle is the layer `S(k)`.
pub fn mu(cat: &IndCatalog, u: &WindowedAisle) -> Result<IceSequence> {
    IceSequence::full_sequence(cat, u.lo, u.layers.clone())
}

/// A triangle `u -> x -> v -> u[1]` with `u` in an aisle and `v` in its
/// coaisle, together with the stalk decompositions of `u` and `v`.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub u: Complex,
    pub map: ChainMap,
    pub v: Complex,
    pub u_stalks: Vec<Stalk>,
    pub v_stalks: Vec<Stalk>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TStructureReport {
    pub shift_closed: bool,
    /// Pairs `(aisle stalk, coaisle stalk)` with a nonzero morphism.
    pub orthogonality_failures: Vec<(Stalk, Stalk)>,
    pub approximations: usize,
    pub approximation_failures: Vec<(Stalk, String)>,
}

impl TStructureReport {
    pub fn passes(&self) -> bool {
        self.shift_closed && self.orthogonality_failures.is_empty() && self.approximation_failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PreaisleReport {
    pub lo: i32,
    /// Per-degree tuples over the free degrees `lo+1..=0`.
    pub tuples: usize,
    pub shift_closed: usize,
    /// Layers `S(lo), ..., S(0)` of every surviving preaisle.
    pub survivors: Vec<Vec<Subcat>>,
    /// Layers of `θ(C)` for every ICE sequence `C` on the same window.
    pub ice_images: Vec<Vec<Subcat>>,
}

impl PreaisleReport {
    pub fn agrees(&self) -> bool {
        self.survivors == self.ice_images
    }
}

type StalkApprox = (Vec<Stalk>, Vec<Stalk>);
type StalkMemo = Mutex<HashMap<(usize, [Subcat; 5]), Arc<StalkApprox>>>;

/// Derived-category computations over a hereditary algebra with a complete
/// catalog.
pub struct DerivedCalc {
    calc: Arc<SubcatCalc>,
    resolutions: Vec<Complex>,
    /// Approximations of `M[0]` keyed by the member and the layers
    /// `S(-2..=2)` that can influence them, stalk degrees relative to 0.
    stalk_memo: StalkMemo,
}

impl DerivedCalc {
    pub fn new(calc: Arc<SubcatCalc>) -> Result<Self> {
        let alg = calc.catalog().algebra().clone();
        if !alg.is_hereditary() {
            return Err(Error::UnsupportedAlgebra(format!(
                "{} has relations; the derived window model needs a hereditary algebra",
                alg.name()
            )));
        }
        let resolutions = calc.catalog().members().iter().map(|m| resolved_stalk(m, 0)).collect::<Result<_>>()?;
        Ok(DerivedCalc { calc, resolutions, stalk_memo: Mutex::new(HashMap::new()) })
    }

    pub fn calc(&self) -> &Arc<SubcatCalc> {
        &self.calc
    }

    pub fn catalog(&self) -> &Arc<IndCatalog> {
        self.calc.catalog()
    }

    pub fn stalk(&self, s: Stalk) -> Complex {
        Complex::stalk(self.catalog().member(s.0), s.1)
    }

    /// Projective resolution of the stalk, with `P0` in degree `s.1`.
    pub fn resolved(&self, s: Stalk) -> Complex {
        self.resolutions[s.0].shift(-s.1)
    }

    /// Minimal right approximation `u -> x` of `x` by sums of aisle stalks,
    /// with `v` its cone. Post-conditions: the stalks of `u` lie in the aisle
    /// and those of `v` in the coaisle.
    pub fn right_approximation(&self, x: &Complex, aisle: &WindowedAisle) -> Result<Triangle> {
        let cat = self.catalog();
        let alg = cat.algebra();
        let mut degrees: Vec<i32> = x.cohomology_decomposition(cat)?.keys().flat_map(|&k| [k, k + 1]).collect();
        degrees.sort_unstable();
        degrees.dedup();
        let mut gens: Vec<(Complex, ChainHomSpace)> = Vec::new();
        for e in degrees {
            for n in aisle.layer(e).iter() {
                let g = self.resolved((n, e));
                let space = ChainHomSpace::new(&g, x)?;
                if space.dim() > 0 {
                    gens.push((g, space));
                }
            }
        }
        // maps G_i -> x modulo those factoring through some other G_j
        let mut parts: Vec<Complex> = Vec::new();
        let mut comps: Vec<ChainMap> = Vec::new();
        let p = alg.modulus();
        for (i, (gi, hi)) in gens.iter().enumerate() {
            let mut radical: Vec<Vec<u32>> = Vec::new();
            for (j, (gj, hj)) in gens.iter().enumerate() {
                if i == j {
                    continue;
                }
                let between = ChainHomSpace::new(gi, gj)?;
                for phi in between.basis() {
                    for psi in hj.basis() {
                        radical.push(hi.class_of(&phi.then(&psi)?)?);
                    }
                }
            }
            let d = hi.dim();
            let mut acc = if radical.is_empty() { FMatrix::zero(0, d, p) } else { FMatrix::from_rows(&radical, d, p)? };
            let mut rank = acc.rank();
            for t in 0..d {
                let mut e = vec![0u32; d];
                e[t] = 1;
                let trial = acc.vstack(&FMatrix::from_rows(&[e.clone()], d, p)?)?;
                let r = trial.rank();
                if r > rank {
                    rank = r;
                    acc = trial;
                    parts.push(gi.clone());
                    comps.push(hi.element(&e));
                }
            }
        }
        let sum = complex_sum(alg, &parts)?;
        let map = sum.from_parts(&comps, x)?;
        let u = sum.sum;
        let v = mapping_cone(&map)?;
        let u_stalks = u.stalks(cat)?;
        let v_stalks = v.stalks(cat)?;
        if let Some(s) = u_stalks.iter().find(|s| !aisle.contains(**s)) {
            return Err(Error::Falsification(format!(
                "approximation source has the stalk {}[{}] outside the aisle",
                cat.label(s.0),
                -s.1
            )));
        }
        if let Some(s) = v_stalks.iter().find(|s| !aisle.coaisle_layer(cat, s.1).contains(s.0)) {
            return Err(Error::Falsification(format!(
                "approximation cone has the stalk {}[{}] outside the coaisle",
                cat.label(s.0),
                -s.1
            )));
        }
        Ok(Triangle { u, map, v, u_stalks, v_stalks })
    }

    /// Stalk data `(u, v)` of the approximation triangle of `s`, memoised
    /// up to shift.
    pub fn approximate_stalk(&self, s: Stalk, aisle: &WindowedAisle) -> Result<StalkApprox> {
        let key = (s.0, [-2, -1, 0, 1, 2].map(|o| aisle.layer(s.1 + o)));
        let cached = self.stalk_memo.lock().unwrap().get(&key).cloned();
        let rel = match cached {
            Some(r) => r,
            None => {
                let t = self.right_approximation(&self.stalk((s.0, 0)), &aisle.shifted(s.1))?;
                let r = Arc::new((t.u_stalks, t.v_stalks));
                self.stalk_memo.lock().unwrap().insert(key, r.clone());
                r
            }
        };
        let back = |v: &[Stalk]| v.iter().map(|&(m, d)| (m, d + s.1)).collect();
        Ok((back(&rel.0), back(&rel.1)))
    }

    /// Shift closure, orthogonality of aisle and coaisle stalks on
    /// `[lo-2, hi+2]`, and an approximation triangle for every stalk in
    /// degrees `[lo-1, hi+1]`.
    pub fn verify_t_structure(&self, aisle: &WindowedAisle) -> Result<TStructureReport> {
        let cat = self.catalog();
        let n = cat.len();
        let mut report = TStructureReport { shift_closed: aisle.is_shift_closed(), ..Default::default() };
        let range = aisle.lo - 2..=aisle.hi + 2;
        let ins: Vec<Stalk> = range.clone().flat_map(|e| aisle.layer(e).iter().map(move |m| (m, e))).collect();
        let outs: Vec<Stalk> =
            range.flat_map(|d| aisle.coaisle_layer(cat, d).iter().map(move |m| (m, d)).collect::<Vec<_>>()).collect();
        for &a in &ins {
            for &b in &outs {
                if stalk_hom_dim(cat, a, b) != 0 {
                    report.orthogonality_failures.push((a, b));
                }
            }
        }
        let stalks: Vec<Stalk> = (aisle.lo - 1..=aisle.hi + 1).flat_map(|d| (0..n).map(move |m| (m, d))).collect();
        let results: Vec<(Stalk, Result<StalkApprox>)> =
            stalks.par_iter().map(|&s| (s, self.approximate_stalk(s, aisle))).collect();
        for (s, r) in results {
            report.approximations += 1;
            match r {
                Ok(_) => {}
                Err(Error::Falsification(msg)) => report.approximation_failures.push((s, msg)),
                Err(e) => return Err(e),
            }
        }
        Ok(report)
    }

    /// `H^k` of `x` relative to the t-structure with aisle `aisle`, as stalks:
    /// the coaisle truncation of the aisle truncation of `x[k]`. Every stalk
    /// met along the way must lie in degrees `range`.
    pub fn heart_cohomology(
        &self,
        x: &Complex,
        aisle: &WindowedAisle,
        k: i32,
        range: (i32, i32),
    ) -> Result<Vec<Stalk>> {
        let cat = self.catalog();
        let inside = |stalks: &[Stalk], what: &str| -> Result<()> {
            match stalks.iter().find(|s| s.1 < range.0 || s.1 > range.1) {
                Some(s) => Err(Error::WindowTooSmall(format!(
                    "{what} has the stalk {}[{}] outside the degrees [{}, {}]",
                    cat.label(s.0),
                    -s.1,
                    range.0,
                    range.1
                ))),
                None => Ok(()),
            }
        };
        let xk = x.shift(k);
        inside(&xk.stalks(cat)?, "the shifted object")?;
        let below = self.right_approximation(&xk, aisle)?;
        inside(&below.u_stalks, "the aisle truncation")?;
        inside(&below.v_stalks, "the coaisle truncation")?;
        let heart = self.right_approximation(&below.u, &aisle.shifted(1))?;
        inside(&heart.u_stalks, "the second aisle truncation")?;
        inside(&heart.v_stalks, "the heart part")?;
        Ok(heart.v_stalks)
    }

    /// Extensions `L -> E -> N` inside degree 0 with `N`, `L` in `add s`,
    /// realised as cones of maps `N -> L[1]`.
    fn same_degree_closed(&self, s: Subcat) -> Result<bool> {
        let cat = self.catalog();
        for n in s.iter() {
            let partners: Vec<Representation> = s
                .iter()
                .flat_map(|l| std::iter::repeat(cat.member(l).clone()).take(cat.ext(n, l)))
                .collect();
            if partners.is_empty() {
                continue;
            }
            let l = direct_sum(cat.algebra(), &partners)?.sum;
            let space = ChainHomSpace::new(&self.resolved((n, 0)), &Complex::stalk(&l, -1))?;
            for f in space.classes() {
                if mapping_cone(&f)?.stalks(cat)?.iter().any(|&(m, _)| !s.contains(m)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether `E = cone(f)[-1]` for the module map `f: B -> A` has
    /// `H^{-1} E = ker f` in `src` and `H^0 E = coker f` in `tgt`.
    fn triangle_ok(&self, f: &RepMorphism, src: Subcat, tgt: Subcat) -> Result<bool> {
        let e = mapping_cone(&ChainMap::stalk(f, -1))?.shift(-1);
        Ok(e.stalks(self.catalog())?.iter().all(|&(m, d)| match d {
            -1 => src.contains(m),
            0 => tgt.contains(m),
            _ => false,
        }))
    }

    /// Triangles `A[0] -> E -> B[1] -> A[1]` with `B` in `add src` and `A`
    /// in `add tgt`, the connecting map being any `f: B -> A`.
    fn adjacent_closed(&self, src: Subcat, tgt: Subcat) -> Result<bool> {
        let cat = self.catalog();
        let alg = cat.algebra();
        let n = cat.len();
        let outside = |s: Subcat| -> Vec<usize> { (0..n).filter(|&e| !s.contains(e)).collect() };
        let key = |spans: &[FMatrix]| -> Vec<FMatrix> { spans.iter().map(FMatrix::row_space).collect() };

        // cokernels: images of maps from add src inside A
        let a_parts: Vec<Representation> = tgt
            .iter()
            .flat_map(|d| {
                let b = outside(tgt).iter().map(|&e| cat.hom(d, e)).max().unwrap_or(0);
                std::iter::repeat(cat.member(d).clone()).take(b)
            })
            .collect();
        if !a_parts.is_empty() {
            let a = direct_sum(alg, &a_parts)?.sum;
            let moves: Vec<(usize, RepMorphism)> = src
                .iter()
                .map(|c| Ok((c, HomSpace::new(cat.member(c), &a)?)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flat_map(|(c, h)| h.elements().filter(|f| !f.is_zero()).map(|f| (c, f)).collect::<Vec<_>>())
                .collect();
            let zero_spans: Vec<FMatrix> = a.dims().iter().map(|&d| FMatrix::zero(0, d, alg.modulus())).collect();
            let mut seen: HashSet<Vec<FMatrix>> = HashSet::from([zero_spans.clone()]);
            let mut queue: VecDeque<(Vec<FMatrix>, Vec<usize>)> = VecDeque::from([(zero_spans, Vec::new())]);
            if !self.triangle_ok(&RepMorphism::zero(&Representation::zero(alg), &a), src, tgt)? {
                return Ok(false);
            }
            while let Some((spans, chosen)) = queue.pop_front() {
                for (mi, (_, h)) in moves.iter().enumerate() {
                    let next: Vec<FMatrix> = spans
                        .iter()
                        .enumerate()
                        .map(|(v, s)| s.vstack(&h.vertex_map(v).transpose()))
                        .collect::<Result<_>>()?;
                    let next = key(&next);
                    if seen.insert(next.clone()) {
                        let mut chosen = chosen.clone();
                        chosen.push(mi);
                        let sources: Vec<Representation> = chosen.iter().map(|&i| moves[i].1.source().clone()).collect();
                        let comps: Vec<RepMorphism> = chosen.iter().map(|&i| moves[i].1.clone()).collect();
                        let f = from_sum(&direct_sum(alg, &sources)?, &comps, &a)?;
                        if !self.triangle_ok(&f, src, tgt)? {
                            return Ok(false);
                        }
                        queue.push_back((next, chosen));
                    }
                }
            }
        }

        // kernels: intersections of kernels of maps from B into members of tgt
        let b_parts: Vec<Representation> = src
            .iter()
            .flat_map(|c| {
                let b = outside(src).iter().map(|&e| cat.hom(e, c)).max().unwrap_or(0);
                std::iter::repeat(cat.member(c).clone()).take(b)
            })
            .collect();
        if !b_parts.is_empty() {
            let b = direct_sum(alg, &b_parts)?.sum;
            let moves: Vec<RepMorphism> = tgt
                .iter()
                .map(|d| HomSpace::new(&b, cat.member(d)))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .flat_map(|h| h.elements().filter(|f| !f.is_zero()).collect::<Vec<_>>())
                .collect();
            let full_kernel: Vec<FMatrix> = b.dims().iter().map(|&d| FMatrix::identity(d, alg.modulus())).collect();
            let mut seen: HashSet<Vec<FMatrix>> = HashSet::from([key(&full_kernel)]);
            let empty_rows: Vec<FMatrix> = b.dims().iter().map(|&d| FMatrix::zero(0, d, alg.modulus())).collect();
            let mut queue: VecDeque<(Vec<FMatrix>, Vec<usize>)> = VecDeque::from([(empty_rows, Vec::new())]);
            if !self.triangle_ok(&RepMorphism::zero(&b, &Representation::zero(alg)), src, tgt)? {
                return Ok(false);
            }
            while let Some((stacked, chosen)) = queue.pop_front() {
                for (mi, h) in moves.iter().enumerate() {
                    let next: Vec<FMatrix> = stacked
                        .iter()
                        .enumerate()
                        .map(|(v, s)| s.vstack(h.vertex_map(v)))
                        .collect::<Result<_>>()?;
                    let kernel: Vec<FMatrix> = next.iter().map(|m| m.kernel_basis().row_space()).collect();
                    if seen.insert(kernel) {
                        let mut chosen = chosen.clone();
                        chosen.push(mi);
                        let targets: Vec<Representation> = chosen.iter().map(|&i| moves[i].target().clone()).collect();
                        let comps: Vec<RepMorphism> = chosen.iter().map(|&i| moves[i].clone()).collect();
                        let f = into_sum(&b, &comps, &direct_sum(alg, &targets)?)?;
                        if !self.triangle_ok(&f, src, tgt)? {
                            return Ok(false);
                        }
                        queue.push_back((next, chosen));
                    }
                }
            }
        }
        Ok(true)
    }

    /// Every per-degree tuple on `[lo, 0]` with `S(lo)` everything, tested
    /// directly for closure under positive shift and extensions of stalks,
    /// compared with the images of ICE sequences.
    pub fn brute_preaisle_scan(&self, lo: i32) -> Result<PreaisleReport> {
        let cat = self.catalog();
        let n = cat.len();
        if lo >= 0 {
            return Err(Error::Usage("the scan window [lo, 0] needs lo < 0".into()));
        }
        let width = (1 - lo) as usize;
        if n * width > crate::iceseq::SCAN_BIT_CAP {
            return Err(Error::CapExceeded(format!(
                "{n} members over {width} degrees exceeds {} bits",
                crate::iceseq::SCAN_BIT_CAP
            )));
        }
        let full = Subcat::full(n);
        let free = (-lo) as usize;
        let all: Vec<Subcat> = (0..1u64 << n).map(Subcat::from_bits).collect();
        let same: HashMap<Subcat, bool> =
            all.par_iter().map(|&s| Ok((s, self.same_degree_closed(s)?))).collect::<Result<_>>()?;
        let pairs: Vec<(Subcat, Subcat)> =
            all.iter().flat_map(|&a| all.iter().filter(move |b| b.is_subset_of(a)).map(move |&b| (a, b))).collect();
        let adjacent: HashMap<(Subcat, Subcat), bool> =
            pairs.par_iter().map(|&(a, b)| Ok(((a, b), self.adjacent_closed(a, b)?))).collect::<Result<_>>()?;

        let mut chains: Vec<Vec<Subcat>> = vec![vec![full]];
        for _ in 0..free {
            chains = chains
                .into_iter()
                .flat_map(|c| {
                    let top = *c.last().unwrap();
                    all.iter()
                        .filter(move |s| s.is_subset_of(top))
                        .map(move |&s| {
                            let mut next = c.clone();
                            next.push(s);
                            next
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        let mut report = PreaisleReport { lo, tuples: 1usize << (n * free), shift_closed: chains.len(), ..Default::default() };
        let calc = &self.calc;
        let flags: Vec<(bool, bool)> = chains
            .par_iter()
            .map(|layers| {
                let closed = layers.iter().all(|s| same[s])
                    && layers.windows(2).all(|w| adjacent[&(w[0], w[1])])
                    && adjacent[&(*layers.last().unwrap(), Subcat::EMPTY)];
                let seq = IceSequence::full_sequence(cat, lo, layers.clone())?;
                Ok((closed, is_ice(calc, &seq)?))
            })
            .collect::<Result<_>>()?;
        for (layers, (closed, ice)) in chains.into_iter().zip(flags) {
            if closed {
                report.survivors.push(layers.clone());
            }
            if ice {
                report.ice_images.push(layers);
            }
        }
        Ok(report)
    }
}

/// The heart of a tilted t-structure inside `D^b(KQ)`, labelled by the
/// indecomposables of its endomorphism algebra.
#[derive(Clone, Debug)]
pub struct TiltedHeart {
    aisle: WindowedAisle,
    /// Summand of the tilting module at each vertex of the tilted algebra.
    tilting: Vec<usize>,
    /// Heart object for each member of the tilted algebra's catalog.
    objects: Vec<Stalk>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

impl TiltedHeart {
    /// The aisle `D^{<=-1} * (Fac T)[0]` of the tilting module `tilting`.
    /// Heart objects are matched to `lambda` by the dimension vectors
    /// `(dim Hom(T_v, E))_v`, the vertex order fixed by matching Cartan
    /// matrices.
    pub fn new(derived: &DerivedCalc, tilting: Subcat, lambda: &IndCatalog) -> Result<Self> {
        let cat = derived.catalog();
        let calc = derived.calc();
        let aisle = WindowedAisle::new(cat, -1, vec![calc.full(), calc.fac_closure(tilting)])?;
        let report = derived.verify_t_structure(&aisle)?;
        if !report.passes() {
            return Err(Error::Falsification("the tilted aisle does not define a t-structure".into()));
        }
        let upper = aisle.shifted(1);
        let objects_kq: Vec<Stalk> = (aisle.lo - 2..=aisle.hi + 1)
            .flat_map(|d| (0..cat.len()).map(move |m| (m, d)))
            .filter(|&s| aisle.contains(s) && upper.coaisle_layer(cat, s.1).contains(s.0))
            .collect();
        let summands: Vec<usize> = tilting.iter().collect();
        let nv = lambda.algebra().vertex_count();
        if summands.len() != nv {
            return Err(Error::Precondition(format!(
                "tilting module has {} summands but the algebra has {nv} vertices",
                summands.len()
            )));
        }
        let projective_dims: Vec<Vec<usize>> =
            (0..nv).map(|w| Representation::projective(lambda.algebra(), w).dims().to_vec()).collect();
        let matches: Vec<Vec<usize>> = permutations(nv)
            .into_iter()
            .map(|perm| perm.into_iter().map(|i| summands[i]).collect::<Vec<_>>())
            .filter(|t| {
                (0..nv).all(|v| (0..nv).all(|w| stalk_hom_dim(cat, (t[v], 0), (t[w], 0)) == projective_dims[w][v]))
            })
            .collect();
        let tilting = match matches.as_slice() {
            [only] => only.clone(),
            [] => return Err(Error::Falsification("no vertex order matches the Cartan matrices".into())),
            _ => return Err(Error::Precondition("Cartan matrices do not determine the vertex order".into())),
        };
        let mut objects = vec![None; lambda.len()];
        for &e in &objects_kq {
            let dims: Vec<usize> = tilting.iter().map(|&t| stalk_hom_dim(cat, (t, 0), e)).collect();
            let hits: Vec<usize> = (0..lambda.len()).filter(|&i| lambda.member(i).dims() == dims.as_slice()).collect();
            match hits.as_slice() {
                [i] if objects[*i].is_none() => objects[*i] = Some(e),
                _ => {
                    return Err(Error::Falsification(format!(
                        "heart object {}[{}] has no unique partner of dimension vector {dims:?}",
                        cat.label(e.0),
                        -e.1
                    )))
                }
            }
        }
        let objects = objects
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Falsification("some indecomposable of the tilted algebra has no heart object".into()))?;
        Ok(TiltedHeart { aisle, tilting, objects })
    }

    pub fn aisle(&self) -> &WindowedAisle {
        &self.aisle
    }

    pub fn tilting(&self) -> &[usize] {
        &self.tilting
    }

    pub fn object(&self, lambda_member: usize) -> Stalk {
        self.objects[lambda_member]
    }

    pub fn label_of(&self, s: Stalk) -> Option<usize> {
        self.objects.iter().position(|&o| o == s)
    }

    /// Whether `y` has no maps from `E[-k]` for every `E` in `C(k)` of the
    /// aisle `lambda_aisle`, which is given in the tilted algebra's terms.
    pub fn in_coaisle(&self, cat: &IndCatalog, lambda_aisle: &WindowedAisle, y: Stalk) -> bool {
        (y.1 - 2..=y.1 + 3).all(|k| {
            let layer = lambda_aisle.layer(k);
            layer.iter().all(|e| {
                let (m, d) = self.objects[e];
                stalk_hom_dim(cat, (m, d + k), y) == 0
            })
        })
    }
}

/// An object of the coaisle whose zeroth cohomology relative to the tilted
/// heart lies in the aisle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoaisleWitness {
    pub object: Stalk,
    pub h0: Vec<Stalk>,
    pub h0_member: usize,
}

/// Stalks `M[-d]` with `d` in `degrees` lying in the coaisle of
/// `lambda_aisle` whose `H^0` relative to the tilted heart is a single
/// indecomposable of the aisle's degree-0 layer.
pub fn coaisle_witness_search(
    derived: &DerivedCalc,
    heart: &TiltedHeart,
    lambda_aisle: &WindowedAisle,
    degrees: (i32, i32),
) -> Result<Vec<CoaisleWitness>> {
    let cat = derived.catalog();
    let range = (degrees.0 - 2, degrees.1 + 2);
    let mut out = Vec::new();
    for d in degrees.0..=degrees.1 {
        for m in 0..cat.len() {
            let y = (m, d);
            if !heart.in_coaisle(cat, lambda_aisle, y) {
                continue;
            }
            let h0 = derived.heart_cohomology(&derived.stalk(y), &heart.aisle, 0, range)?;
            if let [single] = h0.as_slice() {
                if let Some(label) = heart.label_of(*single) {
                    if lambda_aisle.layer(0).contains(label) {
                        out.push(CoaisleWitness { object: y, h0: h0.clone(), h0_member: label });
                    }
                }
            }
        }
    }
    Ok(out)
}
