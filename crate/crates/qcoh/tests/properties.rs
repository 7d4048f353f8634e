use proptest::prelude::*;

use qcoh::birkhoff::{birkhoff_matrix, birkhoff_scalar, build_fundamental, is_negative_hbar, verify_pair};
use qcoh::connection::{commutator, flatness_residual, gauge_fixed_all, raw_connection};
use qcoh::formal::{BiLaurent, Series, SeriesMap, Window};
use qcoh::ifunction::{build_i, f3_eta, Action, GeometrySpec};
use qcoh::localization::{assemble_f, brute_force_f, LocConfig};
use qcoh::matrix::SeriesMatrix;
use qcoh::{qr, Q};

const BOX: [u32; 2] = [3, 3];

fn rational() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| qr(n, d))
}

/// Sparse series with zero constant term; `hbar` allows `hbar^-1, hbar^-2` terms.
fn series(hbar: bool) -> impl Strategy<Value = Series> {
    let e = if hbar { -2i32..=0 } else { 0i32..=0 };
    prop::collection::vec(((0u32..=3, 0u32..=3), e, rational()), 0..6).prop_map(|terms| {
        let mut s = Series::zero(&BOX, Window::UNBOUNDED);
        for ((d1, d2), e, c) in terms {
            if d1 + d2 > 0 {
                s.add_at(&[d1, d2], &BiLaurent::monomial(e, 0, c, Window::UNBOUNDED));
            }
        }
        s
    })
}

fn hirzebruch() -> impl Strategy<Value = GeometrySpec> {
    (0i64..=4, 1u32..=3, 1u32..=2).prop_map(|(n, a, b)| GeometrySpec::fn_(n, [a, b]))
}

fn nef() -> impl Strategy<Value = GeometrySpec> {
    prop_oneof![
        (1u32..=4).prop_map(GeometrySpec::p1),
        (0i64..=2, 1u32..=2, 1u32..=2).prop_map(|(n, a, b)| GeometrySpec::fn_(n, [a, b])),
        (1u32..=2).prop_map(|d| GeometrySpec::gk(-1, [d, d])),
        (1u32..=3).prop_map(|d| GeometrySpec::xk(-1, Action::Diagonal, d)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn birkhoff_postconditions(spec in hirzebruch()) {
        let i = build_i(&spec).unwrap();
        prop_assert!(is_negative_hbar(&birkhoff_scalar(&i).unwrap().j));
        let fs = build_fundamental(&i).unwrap();
        let pair = birkhoff_matrix(&fs).unwrap();
        prop_assert!(verify_pair(&fs, &pair));
    }

    #[test]
    fn j_equals_i_on_nef(spec in nef()) {
        let i = build_i(&spec).unwrap();
        prop_assert_eq!(birkhoff_scalar(&i).unwrap().j, i);
    }

    #[test]
    fn connection_matrices_are_flat(spec in hirzebruch()) {
        let i = build_i(&spec).unwrap();
        let fs = build_fundamental(&i).unwrap();
        let raw: Vec<SeriesMatrix> = (0..2).map(|k| raw_connection(&fs, k).unwrap()).collect();
        prop_assert!(flatness_residual(&raw[0], &raw[1], 0, 1).is_zero());
        let om = gauge_fixed_all(&fs, &birkhoff_matrix(&fs).unwrap()).unwrap();
        prop_assert!(om.iter().all(SeriesMatrix::is_hbar_free));
        prop_assert!(commutator(&om[0], &om[1]).is_zero());
    }

    #[test]
    fn brute_force_matches_assembly(k in 0u32..=2, z in prop::sample::select(vec![(1, 1), (-1, 1), (2, 1), (-1, 2)])) {
        let cfg = LocConfig::new(k, qr(z.0, z.1), 3);
        let f = assemble_f(&cfg).unwrap().coeffs;
        for d in 1..=3u32 {
            prop_assert_eq!(&brute_force_f(&cfg, d).unwrap(), &f[d as usize - 1]);
        }
    }

    #[test]
    fn brute_force_matches_assembly_off_grid(k in 0u32..=2, z in rational().prop_filter("nonzero", |z| *z != qr(0, 1))) {
        let cfg = LocConfig::new(k, z, 2);
        let f = assemble_f(&cfg).unwrap().coeffs;
        prop_assert_eq!(&brute_force_f(&cfg, 2).unwrap(), &f[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invert_map_round_trip(f1 in series(false), f2 in series(false)) {
        let m = SeriesMap::from_log_corrections(&[f1, f2]).unwrap();
        let inv = m.invert().unwrap();
        prop_assert_eq!(m.compose(&inv).unwrap(), SeriesMap::identity(&BOX));
        prop_assert_eq!(inv.compose(&m).unwrap(), SeriesMap::identity(&BOX));
    }

    #[test]
    fn exp_and_log_are_inverse(s in series(true)) {
        prop_assert_eq!(s.exp().unwrap().log().unwrap(), s.clone());
        let one_plus = Series::one(&BOX, Window::UNBOUNDED).add(&s);
        prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);
    }

    #[test]
    fn exp_is_a_homomorphism(a in series(true), b in series(true)) {
        prop_assert_eq!(a.add(&b).exp().unwrap(), a.exp().unwrap().mul(&b.exp().unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn wdvv_residual_vanishes(a in 2u32..=3, b in 2u32..=3) {
        let i = build_i(&GeometrySpec::fn_(3, [a, b])).unwrap();
        let bq = qcoh::bigquantum::run(&i, &f3_eta()).unwrap();
        prop_assert!(bq.gf.wdvv_residual().iter().all(SeriesMatrix::is_zero));
    }
}
