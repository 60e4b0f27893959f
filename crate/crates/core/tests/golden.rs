mod common;

use std::collections::BTreeSet;

use resonance_lab::confstruct;
use resonance_lab::exactlin::{self, ratio, RationalVector};
use resonance_lab::resonance::{self, LimitCaseVerdict, ResonanceError};
use resonance_lab::rootsys::{self, RootSystemType};

fn ty(s: &str) -> RootSystemType {
    s.parse().unwrap()
}

fn complement_set(name: &str, j0: usize) -> BTreeSet<RationalVector> {
    let rs = rootsys::build(ty(name)).unwrap();
    rootsys::parabolic_complement(&rs, j0)
        .unwrap()
        .complement
        .into_iter()
        .collect()
}

#[test]
fn complements_match_reference_lists() {
    assert_eq!(complement_set("F4", 4), common::set(common::f4_j4_complement()));
    assert_eq!(complement_set("F4", 1), common::set(common::f4_j1_complement()));
    assert_eq!(complement_set("E8", 1), common::set(common::e8_j1_complement()));
    assert_eq!(complement_set("E7", 1), common::set(common::e7_j1_complement()));
}

#[test]
fn e7_roots_lie_in_the_hyperplane() {
    let rs = rootsys::build(ty("E7")).unwrap();
    let normal = RationalVector::from_ints(&[0, 0, 0, 0, 0, 0, 1, 1]);
    assert!(rs.roots().iter().all(|r| r.dot(&normal) == ratio(0, 1)));
    assert_eq!(rs.roots().len(), 126);
}

#[test]
fn centers_match_reference_centers() {
    let f4_4 = resonance::complement_rays(ty("F4"), 4).unwrap();
    let f4_1 = resonance::complement_rays(ty("F4"), 1).unwrap();
    let e8 = resonance::complement_rays(ty("E8"), 1).unwrap();
    let e7 = resonance::complement_rays(ty("E7"), 1).unwrap();
    let center = |rays: &resonance::RaySet| -> Vec<RationalVector> {
        resonance::find_centers(rays)
            .unwrap()
            .into_iter()
            .map(|i| rays.rays()[i].clone())
            .collect()
    };
    assert_eq!(center(&f4_4), vec![RationalVector::from_ints(&[-1, 0, 0, 0])]);
    assert_eq!(center(&f4_1), vec![RationalVector::from_ints(&[-1, -1, 0, 0])]);
    assert_eq!(center(&e8), vec![RationalVector::from_ints(&[0, 0, 0, 0, 0, 0, -1, -1])]);
    assert!(center(&e7).is_empty());
}

#[test]
fn span_dimensions() {
    for (name, j0, dim) in [("F4", 4, 4), ("F4", 1, 4), ("E8", 1, 8)] {
        let rays = resonance::complement_rays(ty(name), j0).unwrap();
        let c = resonance::find_centers(&rays).unwrap()[0];
        let conf = resonance::build_configuration(&rays, c).unwrap();
        assert_eq!(resonance::span_dimension(&conf), dim);
        // the same rank straight from the reference functionals
        let paper = match (name, j0) {
            ("F4", 4) => common::f4_j4_configuration(),
            ("F4", 1) => common::f4_j1_configuration(),
            _ => common::e8_j1_configuration(),
        };
        let mut listed: Vec<RationalVector> = paper.pairs.iter().flatten().cloned().collect();
        listed.push(paper.center.clone());
        assert_eq!(exactlin::rank_of(&listed).unwrap(), dim);
        assert_eq!(listed.len(), conf.r);
    }
}

#[test]
fn reference_functionals_take_value_minus_one() {
    for paper in [
        common::f4_j4_configuration(),
        common::f4_j1_configuration(),
        common::e8_j1_configuration(),
    ] {
        let x = &paper.direction;
        assert_eq!(paper.center.dot(x), ratio(-1, 1));
        for pair in &paper.pairs {
            let v: Vec<&RationalVector> = pair.iter().collect();
            assert_eq!(v[0].dot(x), ratio(-1, 1));
            assert_eq!(v[1].dot(x), ratio(-1, 1));
            assert_eq!(v[0] + v[1], paper.center.scale(&ratio(2, 1)));
        }
    }
}

#[test]
fn e7_build_configuration_has_no_center() {
    let rays = resonance::complement_rays(ty("E7"), 1).unwrap();
    for i in 0..rays.len() {
        assert_eq!(
            resonance::build_configuration(&rays, i).unwrap_err(),
            ResonanceError::NotACenter(i)
        );
    }
}

#[test]
fn g2_has_five_rays_and_bound_two() {
    let rs = rootsys::build(ty("G2")).unwrap();
    for j0 in 1..=2 {
        assert_eq!(rootsys::parabolic_complement(&rs, j0).unwrap().codim, 5);
    }
    let rep = resonance::limit_case_report(ty("G2")).unwrap();
    assert_eq!(rep.verdict, LimitCaseVerdict::Mixed);
    for case in &rep.j0_cases {
        assert!(case.admissible_configurations > 0);
        assert!(case.with_uniform_direction < case.admissible_configurations);
    }
    assert_eq!(resonance::optimal_index_bound(ty("G2")).unwrap().k_bound, 2);
}

#[test]
fn e6_is_not_analysed() {
    let rep = resonance::limit_case_report(ty("E6")).unwrap();
    assert_eq!(rep.verdict, LimitCaseVerdict::NotApplicable);
    assert_eq!(rep.k_bound, 8);
}

#[test]
fn imported_f4_spectrum_obligations() {
    let rays = resonance::complement_rays(ty("F4"), 4).unwrap();
    let c = resonance::find_centers(&rays).unwrap()[0];
    let conf = resonance::build_configuration(&rays, c).unwrap();
    let s = confstruct::spectrum_from_configuration(&conf, 7, 9).unwrap();
    assert!(confstruct::validate(&s).is_empty());
    assert_eq!(s.blocks()[7].multiplicity, 2);
    // chi is twice the center functional, and the weighted mean agrees
    assert_eq!(s.chi(), &RationalVector::from_ints(&[-2, 0, 0, 0]));
    assert_eq!(&confstruct::derive_chi(s.blocks()).unwrap(), s.chi());
    let obligations: BTreeSet<(usize, usize)> = confstruct::orthogonality_obligations(&s).into_iter().collect();
    let mut expected = BTreeSet::new();
    for i in 1..=15 {
        for j in i..=15 {
            if i + j != 16 {
                expected.insert((i, j));
            }
        }
    }
    assert_eq!(obligations, expected);
}

#[test]
fn g2_build_configuration_agrees_with_matching_count() {
    for j0 in 1..=2 {
        let rays = resonance::complement_rays(ty("G2"), j0).unwrap();
        for c in resonance::find_centers(&rays).unwrap() {
            let count = resonance::admissible_matchings(&rays, c, 1024).len();
            match resonance::build_configuration(&rays, c) {
                Ok(conf) => {
                    assert_eq!(count, 1);
                    assert!(conf.relations_hold());
                }
                Err(ResonanceError::AmbiguousMatching { count: reported }) => {
                    assert!(count > 1);
                    assert_eq!(reported, count);
                }
                Err(ResonanceError::NoPerfectMatching) => assert_eq!(count, 0),
                Err(e) => panic!("G2 j0={j0} center {c}: {e}"),
            }
            eprintln!("G2 j0={j0} center {c}: {count} matchings");
        }
    }
}
