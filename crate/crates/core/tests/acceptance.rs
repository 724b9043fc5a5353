use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use icelattice::derived::{coaisle_witness_search, theta, TiltedHeart};
use icelattice::iceseq::{enumerate_full_sequences, mmi_from_seq, narrow_iff_ice_scan, seq_from_mmi};
use icelattice::{BoundQuiverAlgebra, DerivedCalc, IndCatalog, Subcat, SubcatCalc, TorsLattice};

type Outcome = Result<String, String>;

const HASSE_LINE_A3: &[(&str, &str)] = &[
    ("121321", "121"),
    ("121321", "221321"),
    ("121321", "13321"),
    ("121", "221"),
    ("121", "1"),
    ("221321", "221"),
    ("221321", "232321"),
    ("13321", "332321"),
    ("13321", "13"),
    ("221", "2"),
    ("232321", "232"),
    ("232321", "332321"),
    ("232", "332"),
    ("232", "2"),
    ("332321", "332"),
    ("13", "1"),
    ("13", "3"),
    ("332", "3"),
    ("1", "0"),
    ("2", "0"),
    ("3", "0"),
];

const HASSE_NAKAYAMA: &[(&str, &str)] = &[
    ("12132", "22132"),
    ("12132", "1323"),
    ("12132", "121"),
    ("22132", "232"),
    ("22132", "221"),
    ("1323", "323"),
    ("1323", "13"),
    ("121", "221"),
    ("121", "1"),
    ("232", "323"),
    ("232", "2"),
    ("221", "2"),
    ("323", "3"),
    ("13", "1"),
    ("13", "3"),
    ("2", "0"),
    ("3", "0"),
    ("1", "0"),
];

fn calc(name: &str) -> Arc<SubcatCalc> {
    let alg = Arc::new(BoundQuiverAlgebra::builtin(name).expect("builtin algebra"));
    let cat = Arc::new(IndCatalog::build(alg).expect("catalog"));
    Arc::new(SubcatCalc::new(cat).expect("subcategory calculator"))
}

fn lattice(name: &str) -> TorsLattice {
    TorsLattice::build(calc(name)).expect("torsion lattice")
}

fn sub(calc: &SubcatCalc, labels: &str) -> Subcat {
    Subcat::parse(calc.catalog(), labels).expect("labels")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

/// Adjacency of a digraph given as an edge list over arbitrary node names.
fn digraph<T: Ord + Clone>(edges: &[(T, T)]) -> (usize, BTreeSet<(usize, usize)>) {
    let nodes: BTreeSet<T> = edges.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let index: BTreeMap<T, usize> = nodes.into_iter().enumerate().map(|(i, n)| (n, i)).collect();
    let arcs = edges.iter().map(|(a, b)| (index[a], index[b])).collect();
    (index.len(), arcs)
}

/// Backtracking search for a bijection carrying the arcs of `g` onto those of `h`.
fn isomorphic(g: &(usize, BTreeSet<(usize, usize)>), h: &(usize, BTreeSet<(usize, usize)>)) -> bool {
    if g.0 != h.0 || g.1.len() != h.1.len() {
        return false;
    }
    let n = g.0;
    let degrees = |arcs: &BTreeSet<(usize, usize)>| {
        let mut d = vec![(0usize, 0usize); n];
        for &(a, b) in arcs {
            d[a].0 += 1;
            d[b].1 += 1;
        }
        d
    };
    let (dg, dh) = (degrees(&g.1), degrees(&h.1));
    fn extend(
        v: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        g: &BTreeSet<(usize, usize)>,
        h: &BTreeSet<(usize, usize)>,
        dg: &[(usize, usize)],
        dh: &[(usize, usize)],
    ) -> bool {
        if v == dg.len() {
            return true;
        }
        for w in 0..dh.len() {
            if used[w] || dg[v] != dh[w] {
                continue;
            }
            let consistent = (0..v).all(|u| {
                g.contains(&(u, v)) == h.contains(&(map[u], w)) && g.contains(&(v, u)) == h.contains(&(w, map[u]))
            });
            if consistent {
                map.push(w);
                used[w] = true;
                if extend(v + 1, map, used, g, h, dg, dh) {
                    return true;
                }
                map.pop();
                used[w] = false;
            }
        }
        false
    }
    extend(0, &mut Vec::new(), &mut vec![false; n], &g.1, &h.1, &dg, &dh)
}

fn hasse_matches(name: &str, expected_count: usize, reference: &[(&str, &str)]) -> Result<(), String> {
    let lat = lattice(name);
    check(lat.len() == expected_count, || format!("{name}: {} torsion classes, expected {expected_count}", lat.len()))?;
    let ours = digraph(lat.covers());
    let theirs = digraph(reference);
    check(isomorphic(&ours, &theirs), || format!("{name}: Hasse quiver is not isomorphic to the reference quiver"))
}

fn torsion_counts() -> Outcome {
    let start = Instant::now();
    hasse_matches("lineA:3", 14, HASSE_LINE_A3)?;
    hasse_matches("paperNakayama", 12, HASSE_NAKAYAMA)?;
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("14 and 12 torsion classes, Hasse quivers match the reference quivers ({took:.2?})"))
}

/// Runs `seq_from_mmi` on the two-step chain `[U1, T1] ⊇ [U2, T2]` given by
/// Fac closures of the listed modules.
fn example_chain(name: &str, gens: [&str; 4], entries: [&str; 2], alpha: &str) -> Result<(TorsLattice, icelattice::IceSequence), String> {
    let lat = lattice(name);
    let c = lat.calc().clone();
    let fac = |labels: &str| c.fac_closure(sub(&c, labels));
    let i1 = lat.interval(fac(gens[1]), fac(gens[0])).map_err(err)?;
    let i2 = lat.interval(fac(gens[3]), fac(gens[2])).map_err(err)?;
    let seq = seq_from_mmi(&lat, &[i1, i2]).map_err(err)?;
    let got: Vec<Subcat> = seq.entries().to_vec();
    let want = vec![sub(&c, entries[0]), sub(&c, entries[1])];
    check(got == want, || {
        format!("entries {:?}, expected {entries:?}", got.iter().map(|s| s.display(c.catalog())).collect::<Vec<_>>())
    })?;
    let a = c.alpha(got[0]).map_err(err)?;
    check(a == sub(&c, alpha), || format!("alpha = {}, expected {{{alpha}}}", a.display(c.catalog())))?;
    Ok((lat, seq))
}

fn chain_on_line_a3() -> Outcome {
    let (lat, seq) = example_chain("lineA:3", ["2,21,321", "2", "2,32,321", "2,32"], ["2,21,32,3,321", "3,321"], "21,3,321")?;
    let c = lat.calc();
    let aisle = theta(c.catalog(), &seq.reindexed(2), -1).map_err(err)?;
    check(aisle.layer(0) == sub(c, "3,321"), || format!("S(0) = {}", aisle.layer(0).display(c.catalog())))?;
    check(aisle.layer(-1) == sub(c, "2,21,32,3,321"), || format!("S(-1) = {}", aisle.layer(-1).display(c.catalog())))?;
    check(aisle.layer(-2) == c.full(), || "S(-2) is not everything".into())?;
    Ok("entries {2,21,32,3,321}, {3,321}; alpha {21,3,321}; aisle S(0)={3,321}, S(-1)={2,21,32,3,321}".into())
}

fn chain_on_nakayama() -> Outcome {
    example_chain("paperNakayama", ["2,21,32", "2", "2,32", "2"], ["2,21,32,3", "3"], "21,3")?;
    Ok("entries {2,21,32,3}, {3}; alpha {21,3}".into())
}

fn narrow_iff_ice() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (name, window) in [("lineA:2", 2), ("lineA:2", 3), ("lineA:3", 2)] {
        let report = narrow_iff_ice_scan(&calc(name), window).map_err(err)?;
        check(report.disagreements.is_empty(), || {
            format!("{name} window {window}: {} disagreements", report.disagreements.len())
        })?;
        parts.push(format!("{name}/{window}: {} tuples, {} ICE", report.tuples, report.ice));
    }
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!("zero disagreements ({}; {took:.2?})", parts.join(", ")))
}

/// Counts ICE sequences on `[-2, 0]` with `C(-2)` everything by summing the
/// sizes of `tors(alpha T)` over torsion classes `T = C(-1)`.
fn double_enumeration(lat: &TorsLattice) -> Result<usize, String> {
    let c = lat.calc();
    let mut total = 0;
    for &t in lat.elements() {
        let a = c.alpha(t).map_err(err)?;
        total += lat.heart_lattice(a).map_err(err)?.len();
    }
    Ok(total)
}

fn preaisle_oracle() -> Outcome {
    let d3 = DerivedCalc::new(calc("lineA:3")).map_err(err)?;
    let r3 = d3.brute_preaisle_scan(-1).map_err(err)?;
    check(r3.agrees(), || "lineA:3 [-1,0]: survivors differ from ICE images".into())?;
    check(r3.survivors.len() == 14, || format!("lineA:3 [-1,0]: {} survivors", r3.survivors.len()))?;
    let c2 = calc("lineA:2");
    let expected = double_enumeration(&TorsLattice::build(c2.clone()).map_err(err)?)?;
    let d2 = DerivedCalc::new(c2).map_err(err)?;
    let r2 = d2.brute_preaisle_scan(-2).map_err(err)?;
    check(r2.agrees(), || "lineA:2 [-2,0]: survivors differ from ICE images".into())?;
    check(r2.survivors.len() == expected, || {
        format!("lineA:2 [-2,0]: {} survivors, double enumeration gives {expected}", r2.survivors.len())
    })?;
    Ok(format!("lineA:3 [-1,0]: 14 survivors; lineA:2 [-2,0]: {expected} survivors"))
}

fn lattice_iso() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in ["lineA:3", "paperNakayama"] {
        let lat = lattice(name);
        for w in lat.intervals() {
            if lat.is_wide_interval(&w).map_err(err)? {
                lat.interval_tors_iso_check(&w).map_err(|e| format!("{name}: {e}"))?;
                checked += 1;
            }
        }
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("{checked} wide intervals checked ({took:.2?})"))
}

fn mmi_round_trip() -> Outcome {
    let mut counts = Vec::new();
    for name in ["lineA:3", "paperNakayama"] {
        let lat = lattice(name);
        let c = lat.calc().clone();
        for n in 1..=3 {
            let chains = lat.enumerate_mmi_sequences(n).map_err(err)?;
            let mut images = BTreeSet::new();
            for chain in &chains {
                let seq = seq_from_mmi(&lat, chain).map_err(err)?;
                let back = mmi_from_seq(&lat, &seq).map_err(err)?;
                check(&back == chain, || format!("{name} n={n}: chain does not round trip"))?;
                images.insert(seq.entries().to_vec());
            }
            check(images.len() == chains.len(), || format!("{name} n={n}: seq_from_mmi is not injective"))?;
            let seqs = enumerate_full_sequences(&c, n).map_err(err)?;
            check(seqs.len() == chains.len(), || {
                format!("{name} n={n}: {} chains but {} sequences", chains.len(), seqs.len())
            })?;
            for seq in &seqs {
                let chain = mmi_from_seq(&lat, seq).map_err(err)?;
                let again = seq_from_mmi(&lat, &chain).map_err(err)?;
                check(again.entries() == seq.entries(), || format!("{name} n={n}: sequence does not round trip"))?;
            }
            counts.push(format!("{name}/{n}: {}", chains.len()));
        }
    }
    Ok(format!("bijective ({})", counts.join(", ")))
}

fn alpha_laws() -> Outcome {
    let mut totals = Vec::new();
    for name in ["lineA:3", "paperNakayama"] {
        let lat = lattice(name);
        let c = lat.calc();
        let n = c.catalog().len();
        let mut ice = 0;
        for bits in 0..1u64 << n {
            let s = Subcat::from_bits(bits);
            if !c.is_ice_closed(s).map_err(err)? {
                continue;
            }
            ice += 1;
            let a = c.alpha(s).map_err(err)?;
            check(c.is_wide(a).map_err(err)?, || format!("{name}: alpha({}) is not wide", s.display(c.catalog())))?;
            check(a.is_subset_of(s), || format!("{name}: alpha({}) is not inside it", s.display(c.catalog())))?;
            for m in a.iter() {
                for x in s.iter().filter(|&x| c.is_sub_of(Subcat::singleton(m), x)) {
                    check(a.contains(x), || {
                        format!("{name}: {} is a submodule of {} but not in alpha", c.catalog().label(x), c.catalog().label(m))
                    })?;
                }
            }
        }
        for &t in lat.elements() {
            let heart = c.heart(lat.t_minus(t).map_err(err)?, t);
            check(heart == c.alpha(t).map_err(err)?, || format!("{name}: heart differs from alpha at {}", t.display(c.catalog())))?;
        }
        totals.push(format!("{name}: {ice} ICE-closed, {} torsion", lat.len()));
    }
    Ok(totals.join("; "))
}

fn t_structures() -> Outcome {
    let start = Instant::now();
    let c = calc("lineA:3");
    let d = DerivedCalc::new(c.clone()).map_err(err)?;
    let seqs = enumerate_full_sequences(&c, 3).map_err(err)?;
    for seq in &seqs {
        let aisle = theta(c.catalog(), &seq.reindexed(3), -3).map_err(err)?;
        let report = d.verify_t_structure(&aisle).map_err(err)?;
        check(report.passes(), || format!("{} fails: {report:?}", seq.display(c.catalog())))?;
    }
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!("{} aisles verified ({took:.2?})", seqs.len()))
}

fn coaisle_witness() -> Outcome {
    let kq = calc("lineA:3");
    let d = DerivedCalc::new(kq.clone()).map_err(err)?;
    let (lam_lat, seq) = example_chain("paperNakayama", ["2,21,32", "2", "2,32", "2"], ["2,21,32,3", "3"], "21,3")?;
    let lam = lam_lat.calc().catalog().clone();
    let heart = TiltedHeart::new(&d, sub(&kq, "1,3,321"), &lam).map_err(err)?;
    let lam_aisle = theta(&lam, &seq.reindexed(2), -1).map_err(err)?;
    let simple3 = lam.index_of("3").ok_or("no simple 3")?;
    let witnesses = coaisle_witness_search(&d, &heart, &lam_aisle, (-3, 3)).map_err(err)?;
    let hit = witnesses.iter().find(|w| w.h0_member == simple3).ok_or("no coaisle object has H^0 = 3")?;
    let kq_cat = kq.catalog();
    let (m, deg) = hit.object;
    Ok(format!(
        "witnesses found: {}; {}[{}] lies in the coaisle with H^0 the simple 3 (as {}[{}] in D(KQ))",
        witnesses.len(),
        kq_cat.label(m),
        -deg,
        kq_cat.label(hit.h0[0].0),
        -hit.h0[0].1
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("torsion counts and Hasse quivers", torsion_counts),
        ("two-step chain over lineA:3", chain_on_line_a3),
        ("two-step chain over paperNakayama", chain_on_nakayama),
        ("narrow iff ICE", narrow_iff_ice),
        ("preaisle oracle", preaisle_oracle),
        ("interval lattice isomorphism", lattice_iso),
        ("MMI round trip", mmi_round_trip),
        ("alpha laws", alpha_laws),
        ("t-structure verification", t_structures),
        ("coaisle witness", coaisle_witness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
