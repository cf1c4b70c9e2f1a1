use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vicsek::green::{green_eval, green_field, green_verify, harmonic_residual, vertex_points, Leg, SkeletonPoint};
use vicsek::vsgraph::Diagonal;
use vicsek::{GraphApprox, VicsekParams};

fn graph(n: usize, m: usize) -> GraphApprox {
    GraphApprox::build(VicsekParams::new(n).unwrap(), m).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng) -> SkeletonPoint {
    let arm = rng.gen_range(0..4);
    // Coarse s values make shared attachment points common.
    let s = rng.gen_range(0..=8) as f64 / 8.0;
    let legs: Vec<Leg> = (0..rng.gen_range(0..3))
        .map(|i| Leg {
            dir: (arm + 1 + 2 * (i % 2)) % 4,
            len: rng.gen_range(1..4) as f64 / 16.0,
        })
        .collect();
    SkeletonPoint {
        arm,
        s,
        offset: legs.iter().map(|l| l.len).sum(),
        branch_path: Some(legs),
    }
}

#[test]
fn named_values() {
    let y = SkeletonPoint::on_arm(2, 0.5);
    let q0 = SkeletonPoint::on_arm(0, 0.0);
    assert_eq!(green_eval(&q0, &y).unwrap(), 0.125);
    for arm in 0..4 {
        let q = SkeletonPoint::on_arm(arm, 1.0);
        assert_eq!(green_eval(&q, &y).unwrap(), 0.0);
    }
    for s in [0.1, 0.3, 0.7] {
        let z = SkeletonPoint::on_arm(1, s);
        let b = (1.0 - s) * (3.0 * s + 1.0) / 4.0;
        assert!((green_eval(&z, &z).unwrap() - b).abs() < 1e-15);
    }
}

#[test]
fn symmetric_and_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (x, y) = (random_point(&mut rng), random_point(&mut rng));
        let (a, b) = (green_eval(&x, &y).unwrap(), green_eval(&y, &x).unwrap());
        assert!((a - b).abs() <= 1e-12);
        assert!(a >= 0.0);
    }
}

#[test]
fn meeting_point_adds_shared_path() {
    let leg = |dir, len| Leg { dir, len };
    let x = SkeletonPoint {
        arm: 0,
        s: 0.4,
        offset: 0.3,
        branch_path: Some(vec![leg(1, 0.2), leg(2, 0.1)]),
    };
    let y = SkeletonPoint {
        arm: 0,
        s: 0.4,
        offset: 0.5,
        branch_path: Some(vec![leg(1, 0.2), leg(0, 0.3)]),
    };
    let b = 0.6 * 2.2 / 4.0;
    assert!((green_eval(&x, &y).unwrap() - (b + 0.2)).abs() < 1e-15);
    let bare = SkeletonPoint { branch_path: None, ..y };
    assert!(green_eval(&x, &bare).is_err());
}

#[test]
fn defining_relations_hold() {
    for i in 1..=20 {
        for j in 0..20 {
            let s = i as f64 / 21.0;
            let t = j as f64 / 20.0;
            let r = green_verify(s, t).unwrap();
            assert!(r.iter().all(|x| x.abs() <= 1e-12), "s={s} t={t} {r:?}");
        }
    }
    assert!(green_verify(0.0, 0.1).is_err());
    assert!(green_verify(1.0, 0.1).is_err());
    let near = green_verify(1.0 - 1e-9, 0.0).unwrap();
    assert!(near.iter().all(|x| x.abs() < 1e-6));
}

#[test]
fn vertex_descriptions_match_skeleton_distances() {
    for (n, m) in [(2, 3), (3, 2)] {
        let g = graph(n, m);
        let d = g.center_distances();
        for (p, dv) in vertex_points(&g).iter().zip(&d) {
            assert!((p.s + p.offset - dv).abs() < 1e-12, "{p:?} {dv}");
        }
        for arm in 0..4 {
            for v in g.diagonal_vertices(Diagonal::Arm(arm)) {
                let p = &vertex_points(&g)[v];
                assert_eq!(p.offset, 0.0);
                assert_eq!(p.arm, arm);
            }
        }
    }
}

#[test]
fn field_on_graph() {
    let g = graph(2, 4);
    let pts = vertex_points(&g);
    // A vertex off the cross as the source.
    let yv = (0..g.vertex_count()).find(|&v| pts[v].offset > 0.1 && pts[v].arm == 1).unwrap();
    let y = pts[yv].clone();
    let f = green_field(&g, &y).unwrap();
    for b in g.boundary_ids() {
        assert_eq!(f.values[b], 0.0);
    }
    let res = harmonic_residual(&g, &f, &[(0.5, 0.5), y.attachment(), g.point(yv)]).unwrap();
    assert!(res <= 1e-10, "residual {res}");
    // Linear along an arm away from y.
    let diag = g.diagonal_vertices(Diagonal::Arm(3));
    for w in diag.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let (sa, sb, sc) = (pts[a].s, pts[b].s, pts[c].s);
        let slope1 = (f.values[b] - f.values[a]) / (sb - sa);
        let slope2 = (f.values[c] - f.values[b]) / (sc - sb);
        assert!((slope1 - slope2).abs() < 1e-12);
    }
    // Constant on trees that y's path does not enter.
    for (v, p) in pts.iter().enumerate() {
        if p.offset > 0.0 && (p.arm != y.arm || (p.s - y.s).abs() > 1e-12) {
            let z = SkeletonPoint::on_arm(p.arm, p.s);
            assert_eq!(f.values[v], green_eval(&z, &y).unwrap());
        }
    }
}

#[test]
fn invalid_points_are_rejected() {
    let mut p = SkeletonPoint::on_arm(0, 0.5);
    p.arm = 4;
    assert!(green_eval(&p, &p).is_err());
    let q = SkeletonPoint {
        arm: 0,
        s: 0.5,
        offset: 0.2,
        branch_path: Some(vec![]),
    };
    assert!(q.validate().is_err());
}
