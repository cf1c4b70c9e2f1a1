use vicsek::gaps::{
    cluster_demo, clustering_certificate, gap_containing, ratio_gaps, ratio_intervals, reduce_ratio, IntervalKind,
};
use vicsek::{DecimationSystem, Series, VicsekParams};

fn sys(n: usize) -> DecimationSystem {
    DecimationSystem::new(VicsekParams::new(n).unwrap())
}

fn assert_gap(n: usize, ell: usize, lo: f64, hi: f64) {
    let cert = ratio_gaps(&sys(n), ell).unwrap();
    let mid = 0.5 * (lo + hi);
    let g = cert
        .gap_containing(mid)
        .unwrap_or_else(|| panic!("n={n} ℓ={ell}: no gap at {mid}: {:?}", cert.gaps));
    assert!((g.lo - lo).abs() < 1e-3 && (g.hi - hi).abs() < 1e-3, "n={n} ℓ={ell}: {g:?}");
}

#[test]
fn gap_table_small_cases() {
    assert_gap(2, 1, 3.5370, 4.2409);
    assert_gap(2, 2, 3.2948, 4.5526);
    assert_gap(3, 2, 6.6952, 6.7212);
}

#[test]
fn gap_table_n4_ell3() {
    assert_gap(4, 3, 9.5357, 9.5431);
}

#[test]
fn no_gap_at_sqrt45_for_n3_ell1() {
    let cert = ratio_gaps(&sys(3), 1).unwrap();
    assert!(cert.gap_containing(45f64.sqrt()).is_none());
}

#[test]
fn sqrt15_gap_contains_the_point() {
    let cert = ratio_gaps(&sys(2), 1).unwrap();
    assert!(cert.gap_containing(15f64.sqrt()).is_some());
}

#[test]
fn level_one_pieces_n2() {
    let s = sys(2);
    let ivs = ratio_intervals(&s, 1).unwrap();
    let psi_sixth = s.psi(1.0 / 6.0).unwrap();
    let w1: Vec<_> = ivs.iter().filter(|iv| iv.word == [1]).collect();
    assert!(w1
        .iter()
        .any(|iv| iv.kind == IntervalKind::FourThirdsImage && (iv.lo - psi_sixth).abs() < 1e-12));
    let w3: Vec<_> = ivs.iter().filter(|iv| iv.word == [3]).collect();
    assert!(w3
        .iter()
        .any(|iv| iv.kind == IntervalKind::Range && (iv.graph_lo - 5.0 / 6.0).abs() < 1e-13));
    let top = s.psi(s.fixed_points().q).unwrap();
    for iv in &ivs {
        assert!(iv.lo >= 0.0 && iv.lo <= iv.hi && iv.hi <= top + 1e-12, "{iv:?}");
    }
}

#[test]
fn enumerated_ratios_avoid_certified_gaps() {
    for (n, ell) in [(2, 1), (2, 2), (3, 2)] {
        let s = sys(n);
        let cert = ratio_gaps(&s, ell).unwrap();
        let vals: Vec<f64> = s
            .enumerate_spectrum(4)
            .unwrap()
            .records()
            .iter()
            .map(|r| r.value)
            .filter(|&v| v > 0.0)
            .collect();
        for &a in &vals {
            for &b in &vals {
                let r = reduce_ratio(a / b, s.rho());
                assert!(cert.gap_containing(r).is_none(), "n={n} ℓ={ell} ratio {r}");
            }
        }
    }
}

#[test]
fn gaps_grow_with_word_length() {
    let s = sys(2);
    let g1 = ratio_gaps(&s, 1).unwrap();
    let g2 = ratio_gaps(&s, 2).unwrap();
    for g in &g1.gaps {
        assert!(
            g2.gaps.iter().any(|h| h.lo <= g.lo && g.hi <= h.hi),
            "{g:?} not inside an ℓ=2 gap"
        );
    }
}

#[test]
fn streaming_search_agrees_with_full_certificate() {
    let s = sys(2);
    let cert = ratio_gaps(&s, 1).unwrap();
    let p = 15f64.sqrt();
    let full = cert.gap_containing(p).unwrap();
    let (lo, hi) = gap_containing(&s, 1, p).unwrap().unwrap();
    assert!((lo - full.lo).abs() < 1e-12 && (hi - full.hi).abs() < 1e-12);
    let t = s.enumerate_spectrum(2).unwrap();
    let r = t.records();
    let ratio = reduce_ratio(r[2].value / r[1].value, s.rho());
    assert!(gap_containing(&s, 1, ratio).unwrap().is_none());
}

#[test]
fn no_gap_at_sqrt_rho_for_n5() {
    let s = sys(5);
    assert!(gap_containing(&s, 3, s.rho().sqrt()).unwrap().is_none());
}

#[test]
fn point_outside_range_is_rejected() {
    assert!(gap_containing(&sys(2), 1, 0.5).is_err());
    assert!(ratio_gaps(&sys(2), 0).is_err());
}

#[test]
fn clustering_table() {
    let table = [
        (2, 0.9024, 16.314),
        (3, 0.8905, 139.99),
        (4, 0.8891, 1235.5),
        (5, 0.8889, 1.1079e4),
        (6, 0.8889, 9.9655e4),
        (7, 0.8889, 8.9682e5),
        (8, 0.8889, 8.0713e6),
        (9, 0.8889, 7.2641e7),
    ];
    for (n, t, rp) in table {
        let c = clustering_certificate(&sys(n));
        assert!((c.t - t).abs() <= 5e-5, "n={n} t={}", c.t);
        assert!((c.rprime - rp).abs() <= 5e-5 * rp, "n={n} R'={}", c.rprime);
        assert!(c.certified);
    }
    let c = clustering_certificate(&sys(2));
    assert!((c.t - (4.0 + 2f64.sqrt()) / 6.0).abs() < 1e-12);
}

#[test]
fn cluster_demo_tight_spread() {
    let s = sys(2);
    let d = cluster_demo(&s, 3, 1e-3).unwrap();
    assert_eq!(d.members.len(), 3);
    assert!(d.spread <= 1e-3);
    assert!(d.members.windows(2).all(|w| w[0].offset < w[1].offset));
    for m in &d.members {
        let w = m.word(3);
        assert_eq!(w.len(), d.exponent);
        let first = w.iter().find(|&&j| j != 1).copied().unwrap();
        assert_eq!(first % 2, 1);
    }
}

#[test]
fn cluster_demo_members_are_enumerated_eigenvalues() {
    let s = sys(2);
    let d = cluster_demo(&s, 3, 500.0).unwrap();
    let table = s.brute_enumerate(d.exponent).unwrap();
    for (m, v) in d.members.iter().zip(d.values()) {
        let w = m.word(3);
        let rec = table
            .records()
            .iter()
            .find(|r| r.series == Series::Zero && r.word == w)
            .unwrap_or_else(|| panic!("word {w:?} missing"));
        assert!((rec.value - v).abs() < 1e-6 * v, "{} vs {v}", rec.value);
    }
}
