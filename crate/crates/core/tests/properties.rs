use std::collections::BTreeSet;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use resonance_lab::confstruct::{self, Block, BlockSignature, ConformalSpectrum, Rule};
use resonance_lab::exactlin::{self, ratio, Rational, RationalMatrix, RationalVector};
use resonance_lab::lyapsim::{self, CocycleModel, MatrixSequence, SamplerSpec};
use resonance_lab::resonance::{self, RaySet};
use resonance_lab::rootsys::{self, RootSystemType};

fn int_matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r)
    })
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det_i128(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Largest `k` with a nonzero `k x k` minor.
fn rank_by_minors(a: &[Vec<i64>]) -> usize {
    let (r, c) = (a.len(), a[0].len());
    (1..=r.min(c))
        .rev()
        .find(|&k| {
            subsets(r, k).iter().any(|rows| {
                subsets(c, k).iter().any(|cols| {
                    let m: Vec<Vec<i128>> = rows
                        .iter()
                        .map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect())
                        .collect();
                    det_i128(&m) != 0
                })
            })
        })
        .unwrap_or(0)
}

fn rows(a: &[Vec<i64>]) -> RationalMatrix {
    RationalMatrix::from_int_rows(a).unwrap()
}

fn ty(s: &str) -> RootSystemType {
    s.parse().unwrap()
}

fn ray_vectors(name: &str, j0: usize) -> Vec<RationalVector> {
    resonance::complement_rays(ty(name), j0).unwrap().rays().to_vec()
}

fn center_set(rays: &RaySet) -> BTreeSet<RationalVector> {
    resonance::find_centers(rays)
        .unwrap()
        .into_iter()
        .map(|i| rays.rays()[i].clone())
        .collect()
}

fn rule_set(s: &ConformalSpectrum) -> BTreeSet<Rule> {
    confstruct::validate(s).into_iter().map(|v| v.rule).collect()
}

/// Random blocks over `R^2` with multiplicities summing to `p + q`.
fn spectrum_parts() -> impl Strategy<Value = (usize, usize, Vec<Block>)> {
    (0usize..4, 1usize..4).prop_flat_map(|(p, q)| {
        let n = p + q;
        (1..=n).prop_flat_map(move |r| {
            (
                prop::collection::btree_set((-4i64..=4, -4i64..=4), r),
                prop::collection::vec(any::<bool>(), r),
                Just(r),
            )
                .prop_filter_map("distinct functionals", move |(fs, iso, r)| {
                    if fs.len() != r {
                        return None;
                    }
                    // spread n over r blocks, the first one takes the rest
                    let mut mult = vec![1; r];
                    mult[0] += n - r;
                    let blocks = fs
                        .into_iter()
                        .zip(mult)
                        .zip(iso)
                        .map(|(((a, b), m), iso)| Block {
                            functional: RationalVector::from_ints(&[a, b]),
                            multiplicity: m,
                            signature: if iso {
                                BlockSignature::Isotropic
                            } else {
                                BlockSignature::Signature { p: m.min(p), q: m - m.min(p) }
                            },
                        })
                        .collect();
                    Some((p, q, blocks))
                })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_is_transpose_invariant(a in int_matrix(5, 5, 4)) {
        let m = rows(&a);
        prop_assert_eq!(exactlin::rank(&m), exactlin::rank(&m.transpose()));
    }

    #[test]
    fn rank_matches_minors(a in int_matrix(4, 4, 2)) {
        prop_assert_eq!(exactlin::rank(&rows(&a)), rank_by_minors(&a));
    }

    #[test]
    fn solve_reproduces_rhs(a in int_matrix(4, 4, 3), x in prop::collection::vec(-3i64..=3, 4)) {
        let m = rows(&a);
        let x = RationalVector::from_ints(&x[..m.cols()]);
        let b = RationalVector::new((0..m.rows()).map(|i| m.row(i).dot(&x)).collect());
        let sol = exactlin::solve(&m, &b).unwrap();
        for i in 0..m.rows() {
            prop_assert_eq!(m.row(i).dot(&sol.x), b.entries()[i].clone());
        }
        prop_assert_eq!(sol.unique, exactlin::rank(&m) == m.cols());
    }

    #[test]
    fn cone_membership_follows_coefficient_signs(
        v in prop::collection::vec(-5i64..=5, 3),
        w in prop::collection::vec(-5i64..=5, 3),
        a in -4i64..=4,
        b in -4i64..=4,
        k in 1i64..=7,
    ) {
        let (v, w) = (RationalVector::from_ints(&v), RationalVector::from_ints(&w));
        prop_assume!(exactlin::rank_of(&[v.clone(), w.clone()]).unwrap() == 2);
        let u = &(&ratio(a, 1) * &v) + &(&ratio(b, 1) * &w);
        prop_assume!(!u.is_zero());
        let inside = exactlin::in_open_cone2(&u, &v, &w).unwrap();
        prop_assert_eq!(inside, a > 0 && b > 0);
        prop_assert_eq!(exactlin::in_open_cone2(&u, &w, &v).unwrap(), inside);
        let kk = ratio(k, 3);
        prop_assert_eq!(exactlin::in_open_cone2(&u.scale(&kk), &v, &w.scale(&kk)).unwrap(), inside);
    }

    #[test]
    fn centers_ignore_order_and_scale(
        which in 0usize..4,
        perm_seed in any::<u64>(),
        scales in prop::collection::vec(1i64..=6, 32),
    ) {
        let (name, j0) = [("F4", 4), ("F4", 1), ("G2", 1), ("G2", 2)][which];
        let base = ray_vectors(name, j0);
        let mut shuffled: Vec<RationalVector> = base
            .iter()
            .zip(scales.iter().cycle())
            .map(|(v, &s)| v.scale(&ratio(s, 2)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        let dim = resonance::complement_rays(ty(name), j0).unwrap().space_dim();
        let a = RaySet::with_space_dim(&base, dim).unwrap();
        let b = RaySet::with_space_dim(&shuffled, dim).unwrap();
        prop_assert_eq!(center_set(&a), center_set(&b));
    }

    #[test]
    fn shuffled_f4_configuration_is_the_same(which in 0usize..2, perm_seed in any::<u64>()) {
        let j0 = [4, 1][which];
        let mut rays = ray_vectors("F4", j0);
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        rand::seq::SliceRandom::shuffle(rays.as_mut_slice(), &mut rng);
        let set = RaySet::with_space_dim(&rays, 4).unwrap();
        let c = resonance::find_centers(&set).unwrap()[0];
        let conf = resonance::build_configuration(&set, c).unwrap();
        prop_assert!(conf.relations_hold());
        let x = resonance::uniform_direction(&conf).unwrap().x;
        for f in &conf.functionals {
            prop_assert_eq!(f.dot(&x), ratio(-1, 1));
        }
        let reference = resonance::build_configuration(
            &resonance::complement_rays(ty("F4"), j0).unwrap(),
            c_of("F4", j0),
        ).unwrap();
        let got: BTreeSet<_> = conf.functionals.iter().cloned().collect();
        let want: BTreeSet<_> = reference.functionals.iter().cloned().collect();
        prop_assert_eq!(got, want);
        prop_assert_eq!(conf.chi, reference.chi);
    }

    #[test]
    fn validate_ignores_block_order(parts in spectrum_parts(), perm_seed in any::<u64>()) {
        let (p, q, blocks) = parts;
        let chi = confstruct::derive_chi(&blocks).unwrap();
        let s = ConformalSpectrum::new(p, q, blocks.clone(), chi.clone()).unwrap();
        let mut shuffled = blocks;
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        let t = ConformalSpectrum::new(p, q, shuffled, chi).unwrap();
        prop_assert_eq!(t.blocks(), s.blocks());
        prop_assert_eq!(confstruct::validate(&t), confstruct::validate(&s));
    }

    #[test]
    fn validate_ignores_positive_rescaling(parts in spectrum_parts(), k in 1i64..=9, d in 1i64..=5) {
        let (p, q, blocks) = parts;
        let s = ConformalSpectrum::with_derived_chi(p, q, blocks.clone()).unwrap();
        let c: Rational = ratio(k, d);
        let scaled: Vec<Block> = blocks
            .into_iter()
            .map(|b| Block { functional: b.functional.scale(&c), ..b })
            .collect();
        let t = ConformalSpectrum::new(p, q, scaled, s.chi().scale(&c)).unwrap();
        prop_assert_eq!(rule_set(&t), rule_set(&s));
    }

    #[test]
    fn derived_chi_satisfies_the_trace_rule(parts in spectrum_parts()) {
        let (p, q, blocks) = parts;
        let s = ConformalSpectrum::with_derived_chi(p, q, blocks).unwrap();
        prop_assert!(!rule_set(&s).contains(&Rule::R6));
    }

    #[test]
    fn swapping_p_and_q_is_a_no_op(parts in spectrum_parts()) {
        let (p, q, blocks) = parts;
        prop_assume!(p != q);
        let s = ConformalSpectrum::with_derived_chi(p, q, blocks.clone()).unwrap();
        let swapped: Vec<Block> = blocks
            .into_iter()
            .map(|b| Block {
                signature: match b.signature {
                    BlockSignature::Signature { p, q } => BlockSignature::Signature { p: q, q: p },
                    iso => iso,
                },
                ..b
            })
            .collect();
        let t = ConformalSpectrum::with_derived_chi(q, p, swapped).unwrap();
        prop_assert_eq!(&t, &s);
    }

    #[test]
    fn sampled_steps_are_conformal(p in 0usize..4, q in 1usize..4, seed in any::<u64>(), len in 1usize..6) {
        let model = CocycleModel::new(p, q, SamplerSpec::default(), seed).unwrap();
        let n = model.n();
        let j = lyapsim::form(p, q);
        let mut rng = model.rng();
        let mut g = DMatrix::<f64>::identity(n, n);
        let mut c = 0.0;
        for _ in 0..len {
            let step = lyapsim::sample_step(&model, &mut rng);
            c += step.log_scale;
            step.apply_left(&mut g);
        }
        let lhs = g.transpose() * &j * &g;
        let rhs = &j * (2.0 * c).exp();
        let scale = g.norm_squared().max(1.0);
        prop_assert!((lhs - rhs).amax() / scale < 1e-10);
        let det = lyapsim::log_abs_det(&g).unwrap();
        prop_assert!((det - n as f64 * c).abs() < 1e-9 * (1.0 + c.abs() * n as f64));
    }

    #[test]
    fn perturbation_moves_logs_by_bounded_amounts(
        n in 1usize..5,
        bound in 1.5f64..20.0,
        seed in any::<u64>(),
        rates in prop::collection::vec(-0.5f64..0.5, 4),
    ) {
        let s = lyapsim::diagonal_family(&rates[..n], 20);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = lyapsim::perturb(&s, bound, &mut rng);
        let lb = bound.ln();
        for ((_, d0, m0), (_, d1, m1)) in s.logs().unwrap().into_iter().zip(t.logs().unwrap()) {
            prop_assert!((d1 - d0).abs() <= 2.0 * n as f64 * lb + 1e-9);
            prop_assert!((m1 - m0).abs() <= 2.0 * lb + 1e-9);
        }
    }

    #[test]
    fn bounded_multiplier_respects_its_bound(n in 1usize..6, bound in 1.0f64..50.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lyapsim::bounded_multiplier(n, bound, &mut rng);
        let sv = l.singular_values();
        prop_assert!(sv.max() <= bound * (1.0 + 1e-12));
        prop_assert!(1.0 / sv.min() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn scalar_sequences_are_uniform_after_perturbation(n in 1usize..4, seed in any::<u64>()) {
        let s = lyapsim::scalar_family(n, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = lyapsim::perturb(&s, 10.0, &mut rng);
        let rep = lyapsim::classify_uniform_regularity(&t, 1e-2).unwrap();
        prop_assert!(matches!(rep.verdict, lyapsim::Regularity::Uniform { .. }), "{:?}", rep);
    }
}

fn c_of(name: &str, j0: usize) -> usize {
    resonance::find_centers(&resonance::complement_rays(ty(name), j0).unwrap()).unwrap()[0]
}

#[test]
fn sequence_rejects_bad_times() {
    let m = vec![DMatrix::<f64>::identity(2, 2); 2];
    assert!(MatrixSequence::new(m.clone(), vec![2.0, 1.0]).is_err());
    assert!(MatrixSequence::new(m.clone(), vec![0.0, 1.0]).is_err());
    assert!(MatrixSequence::new(m, vec![1.0]).is_err());
}

#[test]
fn root_system_json_round_trips() {
    for t in RootSystemType::exceptional_types() {
        let rs = rootsys::build(t).unwrap();
        let back = rootsys::RootSystem::from_json(&rs.to_json().unwrap()).unwrap();
        assert_eq!(back.roots(), rs.roots());
    }
}
