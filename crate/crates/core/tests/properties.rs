use legrack::census::enumerate_racks;
use legrack::coloring::{
    count_colorings, count_colorings_brute_force, perm_fast_count, permutation_rack_cases,
};
use legrack::fourleg::{
    check_kimura_axioms, classify_structures, enumerate_structures, gl_center, FourLegRack,
};
use legrack::front::{
    builtin_fixtures, classical_invariants, fundamental_presentation, parse_fixture, Fixture,
    FrontCode, Sign, Vertical,
};
use legrack::perm::{centralizer, PermGroup, Permutation};
use legrack::rack::{
    automorphism_group, find_isomorphism, inner_group, make_family, rack_flags, Family, GroupTable,
    RackTable,
};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn sized_perm() -> impl Strategy<Value = Permutation> {
    (1usize..9).prop_flat_map(perm)
}

/// Direct check of both rack axioms, independent of the library validator.
fn is_rack(r: &RackTable) -> bool {
    let n = r.order();
    let cols_bijective = (0..n).all(|y| {
        let mut seen = vec![false; n];
        (0..n).all(|x| !std::mem::replace(&mut seen[r.op(x, y)], true))
    });
    cols_bijective
        && (0..n).all(|x| {
            (0..n).all(|y| (0..n).all(|z| r.op(r.op(x, y), z) == r.op(r.op(x, z), r.op(y, z))))
        })
}

// --- permutations -------------------------------------------------------------

proptest! {
    #[test]
    fn compose_is_associative((a, b, c) in (1usize..8).prop_flat_map(|n| (perm(n), perm(n), perm(n)))) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn inverse_and_powers(p in sized_perm(), i in -7i64..7, j in -7i64..7) {
        prop_assert!((&p * &p.inverse()).is_identity());
        prop_assert_eq!(p.pow(i + j), &p.pow(i) * &p.pow(j));
        prop_assert_eq!(p.pow(-i), p.pow(i).inverse());
    }

    #[test]
    fn conjugation_keeps_cycle_type((p, g) in (1usize..9).prop_flat_map(|n| (perm(n), perm(n)))) {
        let c = p.conjugate_by(&g);
        prop_assert_eq!(c.cycle_type(), p.cycle_type());
        prop_assert_eq!(&(&g * &p) * &g.inverse(), c);
    }

    #[test]
    fn cycle_notation_round_trip(p in sized_perm()) {
        let text = p.to_string();
        prop_assert_eq!(Permutation::parse_cycles(&text, p.degree()).unwrap(), p.clone());
        prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), p.degree());
    }

    #[test]
    fn centralizer_is_exactly_commuting_elements(p in (1usize..6).prop_flat_map(perm)) {
        let s = PermGroup::symmetric(p.degree());
        let c = centralizer(&s, std::slice::from_ref(&p)).unwrap();
        let brute = s.elements().iter().filter(|g| g.commutes_with(&p)).count();
        prop_assert_eq!(c.order(), brute);
        prop_assert!(c.is_subgroup_of(&s));
    }
}

// --- racks --------------------------------------------------------------------

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    (1..=max.min(n))
        .rev()
        .flat_map(|first| {
            partitions(n - first, first)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

fn cyclic_products(max: usize) -> Vec<GroupTable> {
    let mut out = Vec::new();
    for a in 1..=max {
        out.push(GroupTable::cyclic(a));
        for b in 2..=max / a {
            out.push(GroupTable::cyclic(a).product(&GroupTable::cyclic(b)));
        }
    }
    out
}

#[test]
fn family_constructors_satisfy_rack_axioms_up_to_12() {
    let mut built = 0;
    for n in 0..=12 {
        let mut fams = vec![Family::Trivial { n }, Family::Dihedral { n }];
        for t in 0..n.max(1) {
            if make_family(&Family::Alexander { n, t }).is_ok() {
                fams.push(Family::Alexander { n, t });
            }
            for s in 0..n.max(1) {
                if make_family(&Family::TsRack { n, t, s }).is_ok() {
                    fams.push(Family::TsRack { n, t, s });
                }
            }
        }
        for parts in partitions(n, n) {
            let mut cycles = Vec::new();
            let mut next = 0;
            for len in parts {
                cycles.push((next..next + len).collect::<Vec<_>>());
                next += len;
            }
            let sigma = Permutation::from_cycles(n, &cycles).unwrap();
            fams.push(Family::Permutation { sigma });
        }
        for f in fams {
            let r = make_family(&f).unwrap_or_else(|e| panic!("{f:?}: {e}"));
            assert_eq!(r.order(), n);
            assert!(is_rack(&r), "{f:?}");
            built += 1;
        }
    }
    let mut groups = cyclic_products(12);
    groups.push(GroupTable::from_perm_group(&PermGroup::symmetric(3)));
    let d4 = legrack::perm::subgroup_closure(
        4,
        &[
            Permutation::parse_cycles("(0 1 2 3)", 4).unwrap(),
            Permutation::parse_cycles("(0 2)", 4).unwrap(),
        ],
    )
    .unwrap();
    groups.push(GroupTable::from_perm_group(&d4));
    for g in &groups {
        for f in [
            Family::Conjugation { group: g.clone() },
            Family::Core { group: g.clone() },
            Family::Takasaki { group: g.clone() },
        ] {
            if matches!(f, Family::Takasaki { .. }) && !g.is_abelian() {
                assert!(make_family(&f).is_err());
                continue;
            }
            let r = make_family(&f).unwrap();
            assert!(is_rack(&r), "{f:?}");
            built += 1;
        }
    }
    assert!(built > 300);
}

#[test]
fn kink_is_central_and_inn_normal_on_census() {
    for n in 0..=5 {
        for r in enumerate_racks(n).unwrap() {
            let pi = r.kink();
            assert!(r.is_automorphism(&pi));
            let cols = r.columns();
            for (y, b) in cols.iter().enumerate() {
                assert!(pi.commutes_with(b));
                assert_eq!(cols[pi.apply(y)], *b);
            }
            let aut = automorphism_group(&r);
            let inn = inner_group(&r);
            assert!(inn.is_subgroup_of(&aut));
            for g in aut.elements() {
                for (y, b) in cols.iter().enumerate() {
                    let c = b.conjugate_by(g);
                    assert_eq!(c, cols[g.apply(y)]);
                    assert!(inn.contains(&c));
                }
            }
        }
    }
}

fn census_rack() -> impl Strategy<Value = RackTable> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let racks = enumerate_racks(n).unwrap();
            (Just(racks.clone()), 0..racks.len())
        })
        .prop_map(|(racks, i)| racks[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relabeling_preserves_everything(
        (r, phi) in census_rack().prop_flat_map(|r| { let n = r.order(); (Just(r), perm(n)) })
    ) {
        let s = r.relabel(&phi);
        prop_assert!(is_rack(&s));
        let iso = find_isomorphism(&r, &s).expect("relabeled rack is isomorphic");
        prop_assert_eq!(r.relabel(&iso), s.clone());
        let (fr, fs) = (rack_flags(&r), rack_flags(&s));
        prop_assert_eq!((fr.is_quandle, fr.is_involutory), (fs.is_quandle, fs.is_involutory));
        prop_assert_eq!(fr.kink.conjugate_by(&phi), fs.kink);
        prop_assert_eq!(automorphism_group(&r).order(), automorphism_group(&s).order());
        prop_assert_eq!(classify_structures(&r).count(), classify_structures(&s).count());
    }

    #[test]
    fn enumerated_structures_satisfy_all_axioms(r in census_rack()) {
        for s in enumerate_structures(&r) {
            let report = check_kimura_axioms(&r, &s);
            prop_assert!(report.passes(), "{:?}", report.first_failure());
        }
        let u = gl_center(&r);
        let orbit_total: usize = classify_structures(&r).classes.iter().map(|c| c.orbit_size).sum();
        prop_assert_eq!(orbit_total, u.order() * u.order());
    }
}

// --- fronts and colorings -------------------------------------------------------

#[derive(Debug, Clone)]
enum Move {
    Stab(bool, usize),
    Kink(usize),
    Reverse,
    Rotate(usize),
}

fn moves() -> impl Strategy<Value = Vec<Move>> {
    prop::collection::vec(
        prop_oneof![
            (any::<bool>(), 0usize..64).prop_map(|(s, p)| Move::Stab(s, p)),
            (0usize..64).prop_map(Move::Kink),
            Just(Move::Reverse),
            (0usize..64).prop_map(Move::Rotate),
        ],
        0..5,
    )
}

fn apply_moves(code: &FrontCode, ms: &[Move]) -> FrontCode {
    let mut c = code.clone();
    for m in ms {
        c = match *m {
            Move::Stab(pos, p) => c
                .stabilize(if pos { Sign::Pos } else { Sign::Neg }, p % (c.len() + 1))
                .unwrap(),
            Move::Kink(p) => c.add_kink(p % (c.len() + 1)).unwrap(),
            Move::Reverse => c.reversed(),
            Move::Rotate(k) => c.rotated(k),
        };
    }
    c
}

fn fixture_code() -> impl Strategy<Value = Fixture> {
    let fx = builtin_fixtures();
    (0..fx.len()).prop_map(move |i| fx[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stabilization_bookkeeping(f in fixture_code(), ops in prop::collection::vec((any::<bool>(), 0usize..64), 0..8)) {
        let start = classical_invariants(&f.code);
        let mut c = f.code.clone();
        let (mut plus, mut minus) = (0, 0);
        for (pos, p) in ops {
            let sign = if pos { plus += 1; Sign::Pos } else { minus += 1; Sign::Neg };
            c = c.stabilize(sign, p % (c.len() + 1)).unwrap();
        }
        let inv = classical_invariants(&c);
        prop_assert_eq!(inv.tb, start.tb - plus - minus);
        prop_assert_eq!(inv.rot, start.rot + plus - minus);
        prop_assert_eq!(inv.tb + inv.rot, inv.writhe - inv.up_cusps);
        prop_assert_eq!(inv.tb - inv.rot, inv.writhe - inv.down_cusps);
    }

    #[test]
    fn presentation_accounting(f in fixture_code(), ms in moves()) {
        let c = apply_moves(&f.code, &ms);
        let inv = classical_invariants(&c);
        let p = fundamental_presentation(&c);
        prop_assert_eq!(p.generators, c.crossing_count().max(1));
        prop_assert_eq!(p.relations.len(), c.crossing_count());
        let mut outputs: Vec<usize> = p.relations.iter().map(|r| r.outgoing).collect();
        outputs.sort_unstable();
        prop_assert_eq!(outputs, (0..p.relations.len()).collect::<Vec<_>>());
        let w = p.total_word();
        let ups = w.letters.iter().filter(|l| l.vertical() == Vertical::Up).count() as i64;
        prop_assert_eq!(ups, inv.up_cusps);
        prop_assert_eq!(w.len() as i64 - ups, inv.down_cusps);
        for r in &p.relations {
            prop_assert!(r.word.alternates());
        }
        prop_assert!(w.alternates());
    }

    #[test]
    fn front_text_round_trip(f in fixture_code(), ms in moves()) {
        let g = Fixture { code: apply_moves(&f.code, &ms), ..f };
        let text = g.to_text();
        let back = parse_fixture(&text).unwrap();
        prop_assert_eq!(back.to_text(), text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn moves_preserve_fast_count_agreement(f in fixture_code(), ms in moves(), case_ix in 0usize..7) {
        let cases = permutation_rack_cases(3);
        let case = &cases[case_ix % cases.len()];
        let c = apply_moves(&f.code, &ms);
        let inv = classical_invariants(&c);
        let p = fundamental_presentation(&c);
        let u = centralizer(&PermGroup::symmetric(case.sigma.degree()), std::slice::from_ref(&case.sigma)).unwrap();
        for ul in u.elements() {
            for ur in u.elements() {
                let x = FourLegRack::new(case.rack.clone(), ul.clone(), ur.clone()).unwrap();
                prop_assert_eq!(count_colorings(&p, &x), perm_fast_count(&x, &inv).unwrap());
            }
        }
    }
}

/// Racks with structures used for coloring checks beyond permutation racks.
fn coloring_racks() -> Vec<FourLegRack> {
    let mut out = Vec::new();
    for r in [
        make_family(&Family::Trivial { n: 3 }).unwrap(),
        make_family(&Family::Dihedral { n: 3 }).unwrap(),
        make_family(&Family::Alexander { n: 5, t: 2 }).unwrap(),
        make_family(&Family::TsRack { n: 4, t: 1, s: 2 }).unwrap(),
    ] {
        for s in enumerate_structures(&r).into_iter().take(16) {
            out.push(FourLegRack::new(r.clone(), s.ul, s.ur).unwrap());
        }
    }
    for case in permutation_rack_cases(3) {
        for s in enumerate_structures(&case.rack) {
            out.push(FourLegRack::new(case.rack.clone(), s.ul, s.ur).unwrap());
        }
    }
    out
}

#[test]
fn basepoint_invariance_on_all_fixtures() {
    let racks = coloring_racks();
    for f in builtin_fixtures() {
        let base: Vec<u64> = racks
            .iter()
            .map(|x| count_colorings(&fundamental_presentation(&f.code), x))
            .collect();
        for k in 1..f.code.len() {
            let p = fundamental_presentation(&f.code.rotated(k));
            for (x, &b) in racks.iter().zip(&base) {
                assert_eq!(count_colorings(&p, x), b, "{} rotated by {k}", f.name);
            }
        }
    }
}

#[test]
fn propagation_matches_brute_force() {
    let racks = coloring_racks();
    for f in builtin_fixtures() {
        let p = fundamental_presentation(&f.code);
        if p.generators > 5 {
            continue;
        }
        for x in &racks {
            assert_eq!(
                count_colorings(&p, x),
                count_colorings_brute_force(&p, x),
                "{}",
                f.name
            );
        }
    }
}

#[test]
fn trivial_quandle_colors_knots_constantly() {
    for k in 1..=3 {
        let x =
            FourLegRack::with_identity_structure(make_family(&Family::Trivial { n: k }).unwrap());
        for f in builtin_fixtures() {
            let p = fundamental_presentation(&f.code);
            assert_eq!(count_colorings(&p, &x), k as u64, "{}", f.name);
            if p.generators <= 5 {
                assert_eq!(count_colorings_brute_force(&p, &x), k as u64);
            }
        }
    }
}

// --- census and classification ---------------------------------------------------

#[test]
fn census_classes_are_distinct_and_cover_families() {
    for n in 0..=5 {
        let reps = enumerate_racks(n).unwrap();
        for (i, a) in reps.iter().enumerate() {
            assert!(is_rack(a));
            for b in &reps[i + 1..] {
                assert!(
                    find_isomorphism(a, b).is_none(),
                    "order {n}: duplicate class"
                );
            }
        }
        let mut fams = vec![Family::Trivial { n }, Family::Dihedral { n }];
        for t in 0..n.max(1) {
            fams.push(Family::Alexander { n, t });
            for s in 0..n.max(1) {
                fams.push(Family::TsRack { n, t, s });
            }
        }
        for case in permutation_rack_cases(n)
            .into_iter()
            .filter(|c| c.sigma.degree() == n)
        {
            fams.push(Family::Permutation { sigma: case.sigma });
        }
        for f in fams {
            let Ok(r) = make_family(&f) else { continue };
            let hits = reps
                .iter()
                .filter(|s| find_isomorphism(&r, s).is_some())
                .count();
            assert_eq!(hits, 1, "{f:?}");
        }
    }
}

#[test]
fn census_family_containment() {
    use legrack::census::{census_counts, RackFamily};
    for n in 0..=5 {
        let rows = census_counts(n).unwrap();
        let get = |f: RackFamily| rows.iter().find(|r| r.family == f).unwrap();
        let (r, i, q, k) = (
            get(RackFamily::Racks),
            get(RackFamily::Involutory),
            get(RackFamily::Quandles),
            get(RackFamily::Kei),
        );
        for (small, big) in [(k, q), (q, r), (k, i), (i, r)] {
            assert!(small.rack_count <= big.rack_count);
            assert!(small.structure_count <= big.structure_count);
        }
    }
}

#[test]
fn classification_agrees_with_burnside_and_abelian_case() {
    use legrack::fourleg::burnside_structure_count;
    for n in 0..=4 {
        for r in enumerate_racks(n).unwrap() {
            let c = classify_structures(&r);
            assert_eq!(c.count() as u64, burnside_structure_count(&r));
            let aut = automorphism_group(&r);
            if aut.is_abelian() && c.gl_order == aut.order() {
                assert_eq!(c.count(), aut.order() * aut.order());
            }
        }
    }
}

#[test]
fn structure_isomorphism_soundness_to_order_four() {
    use legrack::fourleg::find_structure_isomorphism;
    for n in 0..=4 {
        for r in enumerate_racks(n).unwrap() {
            let classes = classify_structures(&r).classes;
            for (i, a) in classes.iter().enumerate() {
                for b in &classes[i + 1..] {
                    assert!(
                        find_structure_isomorphism(&r, (&a.ul, &a.ur), (&b.ul, &b.ur)).is_none()
                    );
                }
            }
            let aut = automorphism_group(&r);
            for cls in &classes {
                for phi in aut.elements().iter().take(6) {
                    let (vl, vr) = (cls.ul.conjugate_by(phi), cls.ur.conjugate_by(phi));
                    let iso = find_structure_isomorphism(&r, (&cls.ul, &cls.ur), (&vl, &vr))
                        .expect("conjugate structures are isomorphic");
                    assert!(r.is_automorphism(&iso));
                }
            }
        }
    }
}
