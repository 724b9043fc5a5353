use std::sync::{Arc, OnceLock};

use icelattice::complex::{mapping_cone, ChainHomSpace, ChainMap, Complex};
use icelattice::derived::{mu, stalk_hom_dim, theta, Stalk};
use icelattice::iceseq::{enumerate_full_sequences, is_ice, is_narrow};
use icelattice::linalg::FMatrix;
use icelattice::rep::{cokernel_of, hom_basis, image_of, kernel_of, HomSpace, RepMorphism};
use icelattice::{BoundQuiverAlgebra, DerivedCalc, IndCatalog, Subcat, SubcatCalc, TorsLattice, WindowedAisle};
use proptest::prelude::*;

const BUILTINS: [&str; 2] = ["lineA:3", "paperNakayama"];

fn calc(name: &str) -> Arc<SubcatCalc> {
    static CACHE: OnceLock<[Arc<SubcatCalc>; 2]> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        BUILTINS.map(|n| {
            let alg = Arc::new(BoundQuiverAlgebra::builtin(n).unwrap());
            Arc::new(SubcatCalc::new(Arc::new(IndCatalog::build(alg).unwrap())).unwrap())
        })
    });
    all[BUILTINS.iter().position(|&n| n == name).unwrap()].clone()
}

fn lattice(name: &str) -> &'static TorsLattice {
    static CACHE: OnceLock<[TorsLattice; 2]> = OnceLock::new();
    let all = CACHE.get_or_init(|| BUILTINS.map(|n| TorsLattice::build(calc(n)).unwrap()));
    &all[BUILTINS.iter().position(|&n| n == name).unwrap()]
}

fn derived() -> &'static DerivedCalc {
    static CACHE: OnceLock<DerivedCalc> = OnceLock::new();
    CACHE.get_or_init(|| DerivedCalc::new(calc("lineA:3")).unwrap())
}

fn all_subsets(c: &SubcatCalc) -> impl Iterator<Item = Subcat> {
    (0..1u64 << c.catalog().len()).map(Subcat::from_bits)
}

fn morphism(space: &HomSpace, coeffs: &[u32]) -> RepMorphism {
    space.element(&coeffs[..space.dim()])
}

fn matrix(p: u32) -> impl Strategy<Value = FMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(move |(r, c)| {
        prop::collection::vec(0..p, r * c).prop_map(move |data| FMatrix::from_vec(r, c, p, data).unwrap())
    })
}

fn builtin() -> impl Strategy<Value = &'static str> {
    prop::sample::select(BUILTINS.to_vec())
}

proptest! {
    #[test]
    fn rank_nullity(m in prop::sample::select(vec![2u32, 3, 5]).prop_flat_map(matrix)) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.rows(), m.cols());
        for v in kernel.row_vecs() {
            prop_assert!(m.mul_vec(&v).iter().all(|&x| x == 0));
        }
        prop_assert_eq!(m.rref(), m.clone().rref());
    }

    #[test]
    fn solutions_are_exact(m in matrix(3), seed in prop::collection::vec(0u32..3, 6)) {
        let x = &seed[..m.cols()];
        let b = m.mul_vec(x);
        let y = m.solve(&b).unwrap().expect("b lies in the column space");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn morphisms_are_exact(name in builtin(), i in 0usize..6, j in 0usize..6, coeffs in prop::collection::vec(0u32..2, 8)) {
        let c = calc(name);
        let cat = c.catalog();
        let (i, j) = (i % cat.len(), j % cat.len());
        let f = morphism(cat.hom_space(i, j), &coeffs);
        let ker = kernel_of(&f).unwrap();
        let im = image_of(&f).unwrap();
        let coker = cokernel_of(&f).unwrap();
        for v in 0..cat.algebra().vertex_count() {
            prop_assert_eq!(ker.rep.dims()[v] + im.sub.rep.dims()[v], f.source().dims()[v]);
            prop_assert_eq!(im.sub.rep.dims()[v] + coker.rep.dims()[v], f.target().dims()[v]);
        }
    }

    #[test]
    fn decompose_partitions(name in builtin(), mult in prop::collection::vec(0usize..3, 6)) {
        let cat = calc(name).catalog().clone();
        let mult = &mult[..cat.len()];
        let x = cat.assemble(mult).unwrap();
        let (found, iso) = cat.decompose_with_certificate(&x).unwrap();
        prop_assert_eq!(&found, mult);
        prop_assert!(iso.is_iso());
        let parts: usize = found.iter().enumerate().map(|(i, &k)| k * cat.member(i).total_dim()).sum();
        prop_assert_eq!(parts, x.total_dim());
    }

    #[test]
    fn middle_terms(name in builtin(), i in 0usize..6, j in 0usize..6, class in prop::collection::vec(0u32..2, 4)) {
        let cat = calc(name).catalog().clone();
        let (b, a) = (i % cat.len(), j % cat.len());
        let ext = cat.ext_space(b, a);
        let class = &class[..ext.dim()];
        let e = ext.middle_term(class).unwrap();
        prop_assert!(e.mono.is_mono() && e.epi.is_epi());
        prop_assert!(e.mono.then(&e.epi).unwrap().is_zero());
        let mut split = vec![0; cat.len()];
        split[a] += 1;
        split[b] += 1;
        let is_split = cat.decompose(&e.middle).unwrap() == split;
        prop_assert_eq!(is_split, class.iter().all(|&x| x == 0));
    }

    #[test]
    fn closure_operators(name in builtin(), a in 0u64..64, b in 0u64..64) {
        let c = calc(name);
        let n = c.catalog().len();
        let mask = (1u64 << n) - 1;
        let s = Subcat::from_bits(a & mask);
        let t = Subcat::from_bits((a | b) & mask);
        let fac = |x| c.fac_closure(x);
        let ext = |x| c.ext_closure(x).unwrap();
        for close in [&fac as &dyn Fn(Subcat) -> Subcat, &ext] {
            prop_assert!(s.is_subset_of(close(s)));
            prop_assert!(close(s).is_subset_of(close(t)));
            prop_assert_eq!(close(close(s)), close(s));
        }
    }

    #[test]
    fn formality(
        a in (0usize..6, -1i32..2),
        b in (0usize..6, -1i32..2),
        y in (0usize..6, 0usize..6),
        f_coeffs in prop::collection::vec(0u32..2, 8),
        g_coeffs in prop::collection::vec(0u32..2, 8),
    ) {
        let d = derived();
        let cat = d.catalog();
        let (ra, rb) = (d.resolved(a), d.resolved(b));
        let between = ChainHomSpace::new(&ra, &rb).unwrap();
        let f = between.element(&f_coeffs[..between.dim()]);
        let x = mapping_cone(&f).unwrap();
        let g = morphism(cat.hom_space(y.0, y.1), &g_coeffs);
        let target = mapping_cone(&ChainMap::stalk(&g, 0)).unwrap();
        let expected: usize = x
            .stalks(cat)
            .unwrap()
            .iter()
            .flat_map(|&s| target.stalks(cat).unwrap().into_iter().map(move |t| (s, t)))
            .map(|(s, t)| stalk_hom_dim(cat, s, t))
            .sum();
        prop_assert_eq!(ChainHomSpace::new(&x, &target).unwrap().dim(), expected);
    }
}

#[test]
fn path_algebra_dimensions() {
    for n in 1..=6 {
        let alg = BoundQuiverAlgebra::builtin(&format!("lineA:{n}")).unwrap();
        assert_eq!(alg.dim(), n * (n + 1) / 2);
        assert_eq!(alg.dim(), alg.path_basis().len());
        assert!(alg.basis_is_truncation_closed());
    }
    assert!(BoundQuiverAlgebra::builtin("paperNakayama").unwrap().basis_is_truncation_closed());
}

#[test]
fn hom_and_ext_tables() {
    for name in BUILTINS {
        let cat = calc(name).catalog().clone();
        for i in 0..cat.len() {
            for j in 0..cat.len() {
                assert_eq!(hom_basis(cat.member(i), cat.member(j)).unwrap().len(), cat.hom(i, j));
                if cat.is_projective(i) {
                    assert_eq!(cat.ext(i, j), 0);
                }
            }
        }
        let table = cat.hom_table();
        for i in 0..cat.len() {
            for j in i + 1..cat.len() {
                assert!((0..cat.len()).any(|k| table[k][i] != table[k][j]), "{name}: members {i} and {j} share a fingerprint");
            }
        }
    }
}

#[test]
fn closure_property_hierarchy() {
    for name in BUILTINS {
        let c = calc(name);
        for s in all_subsets(&c) {
            let ice = c.is_ice_closed(s).unwrap();
            if c.is_torsion_class(s).unwrap() || c.is_wide(s).unwrap() {
                assert!(ice);
            }
            if ice {
                assert!(c.is_image_closed(s) && c.is_cokernel_closed(s).unwrap() && c.is_ext_closed(s).unwrap());
            }
        }
    }
}

#[test]
fn alpha_is_a_wide_subcategory_closed_under_subobjects() {
    for name in BUILTINS {
        let c = calc(name);
        for s in all_subsets(&c).filter(|&s| c.is_ice_closed(s).unwrap()) {
            let a = c.alpha(s).unwrap();
            assert!(a.is_subset_of(s));
            assert!(c.is_wide(a).unwrap());
            for m in a.iter() {
                for x in s.iter().filter(|&x| c.is_sub_of(Subcat::singleton(m), x)) {
                    assert!(a.contains(x), "{name}: submodule {x} of {m} escapes alpha");
                }
            }
        }
    }
}

#[test]
fn ice_closed_are_torsion_classes_of_hearts() {
    for name in BUILTINS {
        let c = calc(name);
        let lat = lattice(name);
        let scan: Vec<Subcat> = all_subsets(&c).filter(|&s| c.is_ice_closed(s).unwrap()).collect();
        let mut built = Vec::new();
        for w in lat.intervals() {
            if lat.is_wide_interval(&w).unwrap() {
                let perp = c.perp_right(w.lower);
                built.extend(lat.members_of(&w).into_iter().map(|t| t.intersection(perp)));
            }
        }
        built.sort();
        built.dedup();
        let mut scan = scan;
        scan.sort();
        assert_eq!(scan, built, "{name}");
    }
}

#[test]
fn meets_are_intersections() {
    for name in BUILTINS {
        let lat = lattice(name);
        for &a in lat.elements() {
            for &b in lat.elements() {
                let below: Vec<Subcat> =
                    lat.elements().iter().copied().filter(|t| t.is_subset_of(a) && t.is_subset_of(b)).collect();
                let meet = below.iter().copied().find(|m| below.iter().all(|t| t.is_subset_of(*m))).unwrap();
                assert_eq!(meet, a.intersection(b));
            }
        }
    }
}

#[test]
fn wide_intervals_are_meet_intervals() {
    for name in BUILTINS {
        let lat = lattice(name);
        for w in lat.intervals() {
            assert_eq!(lat.is_wide_interval(&w).unwrap(), lat.is_meet_interval(&w).unwrap());
        }
        let c = lat.calc();
        for &t in lat.elements() {
            assert_eq!(c.heart(lat.t_minus(t).unwrap(), t), c.alpha(t).unwrap());
        }
    }
}

#[test]
fn heart_torsion_classes_come_from_maximal_meet_intervals() {
    for name in BUILTINS {
        let lat = lattice(name);
        let c = lat.calc();
        for w in lat.intervals().into_iter().filter(|w| lat.is_wide_interval(w).unwrap()) {
            let perp = c.perp_right(w.lower);
            let mmis = lat.maximal_meet_intervals_in(&w).unwrap();
            let heart_lat = lat.heart_lattice(w.heart).unwrap();
            for &d in heart_lat.elements() {
                let hit = mmis.iter().find(|i| i.upper.intersection(perp) == d);
                let i = hit.unwrap_or_else(|| panic!("{name}: no maximal meet interval realises a heart torsion class"));
                assert_eq!(i.heart, heart_lat.calc().alpha(d).unwrap());
            }
        }
    }
}

#[test]
fn length_one_sequences_are_torsion_classes() {
    for name in BUILTINS {
        let c = calc(name);
        let seqs = enumerate_full_sequences(&c, 1).unwrap();
        assert_eq!(seqs.len(), lattice(name).len());
        for seq in &seqs {
            assert!(is_narrow(&c, seq).unwrap());
            assert!(c.is_torsion_class(seq.entry(1)).unwrap());
        }
    }
}

fn intermediate_aisles() -> Vec<WindowedAisle> {
    let c = calc("lineA:3");
    lattice("lineA:3")
        .elements()
        .iter()
        .map(|&t| WindowedAisle::new(c.catalog(), -1, vec![c.full(), t]).unwrap())
        .collect()
}

#[test]
fn intermediate_aisles_are_t_structures() {
    let d = derived();
    let cat = d.catalog();
    let aisles = intermediate_aisles();
    assert_eq!(aisles.len(), 14);
    for aisle in &aisles {
        assert!(d.verify_t_structure(aisle).unwrap().passes());
        let stalks = |lo: i32, hi: i32| (lo..=hi).flat_map(|k| (0..cat.len()).map(move |m| (m, k)));
        let left: Vec<Stalk> = stalks(-3, 2).filter(|&s| aisle.contains(s)).collect();
        let right: Vec<Stalk> = stalks(-3, 2).filter(|&s| aisle.coaisle_layer(cat, s.1).contains(s.0)).collect();
        for &u in &left {
            for &v in &right {
                assert_eq!(stalk_hom_dim(cat, u, v), 0);
            }
        }
    }
}

#[test]
fn theta_and_mu_are_inverse() {
    let c = calc("lineA:3");
    let cat = c.catalog();
    for n in 1..=3 {
        for seq in enumerate_full_sequences(&c, n).unwrap() {
            let shifted = seq.reindexed(n as i32);
            let aisle = theta(cat, &shifted, -(n as i32)).unwrap();
            let back = mu(cat, &aisle).unwrap();
            for k in -(n as i32) - 2..=2 {
                assert_eq!(back.entry(k), shifted.entry(k));
            }
            assert!(is_ice(&c, &back).unwrap());
            assert_eq!(mu(cat, &theta(cat, &back, aisle.lo()).unwrap()).unwrap().entries(), back.entries());
        }
    }
}

#[test]
fn complexes_of_projectives_compute_derived_hom() {
    let d = derived();
    let cat = d.catalog();
    for m in 0..cat.len() {
        for n in 0..cat.len() {
            for shift in -1..=2 {
                let x: Complex = d.resolved((m, 0));
                let y = d.stalk((n, shift));
                assert_eq!(ChainHomSpace::new(&x, &y).unwrap().dim(), stalk_hom_dim(cat, (m, 0), (n, shift)));
            }
        }
    }
}

#[test]
fn preaisle_scans_match_ice_sequences() {
    let d = derived();
    let lat = lattice("lineA:3");
    let expected: usize = lat
        .elements()
        .iter()
        .map(|&t| lat.heart_lattice(lat.calc().alpha(t).unwrap()).unwrap().len())
        .sum();
    let report = d.brute_preaisle_scan(-2).unwrap();
    assert!(report.agrees());
    assert_eq!(report.survivors.len(), expected);

    let alg = Arc::new(BoundQuiverAlgebra::builtin("lineA:2").unwrap());
    let c2 = Arc::new(SubcatCalc::new(Arc::new(IndCatalog::build(alg).unwrap())).unwrap());
    let d2 = DerivedCalc::new(c2).unwrap();
    for lo in [-1, -2, -3] {
        assert!(d2.brute_preaisle_scan(lo).unwrap().agrees(), "lineA:2 window [{lo}, 0]");
    }
    assert_eq!(d2.brute_preaisle_scan(-1).unwrap().survivors.len(), 5);
}
