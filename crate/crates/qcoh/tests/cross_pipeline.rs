//! The mirror-side W^ of X_k against the localization graph sum.

use qcoh::birkhoff::birkhoff_scalar;
use qcoh::ifunction::{build_i, Action, GeometrySpec};
use qcoh::localization::{assemble_f, LocConfig};
use qcoh::mirror::gw_readout;
use qcoh::{q, qr, Q};

const ORDER: u32 = 4;

fn w_hat(k: i64, action: Action) -> Vec<Q> {
    let i = build_i(&GeometrySpec::xk(k, action, ORDER)).unwrap();
    let g = gw_readout(&birkhoff_scalar(&i).unwrap().j).unwrap();
    (1..=ORDER).map(|d| g.w_hat.rat(&[d])).collect()
}

fn graph_sum(k: u32, z: Q) -> Vec<Q> {
    assemble_f(&LocConfig::new(k, z, ORDER)).unwrap().coeffs
}

#[test]
fn diagonal_action_is_the_multiple_cover() {
    for k in 0..=3u32 {
        let f = graph_sum(k, q(1));
        let want: Vec<Q> = f.iter().enumerate().map(|(i, c)| c * q(-2 * (i as i64 + 1))).collect();
        assert_eq!(w_hat(k as i64, Action::Diagonal), want, "k={k}");
    }
}

#[test]
fn antidiagonal_action_matches_up_to_a_sign() {
    // W^_d = -((k+1)/2) (-1)^(kd) 4 d F_d
    for k in 0..=3u32 {
        let f = graph_sum(k, q(-1));
        let want: Vec<Q> = f
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = i as i64 + 1;
                let sign = if (k as i64 * d) % 2 == 0 { 1 } else { -1 };
                c * qr(-(k as i64 + 1) * sign * 4 * d, 2)
            })
            .collect();
        assert_eq!(w_hat(k as i64, Action::Antidiagonal), want, "k={k}");
    }
}
