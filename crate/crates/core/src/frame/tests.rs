use super::*;
use crate::models::{model, CylinderGauge, ModelName, ModelParams};
use crate::sampling::sample_domain;
use num_complex::Complex64;

type C = Complex64;

fn chart(name: ModelName) -> ChartSpec {
    model(name, &ModelParams::default()).unwrap().chart
}

fn values(v: &Field<f64>) -> [C; 3] {
    std::array::from_fn(|k| v[k].value())
}

/// Frame values only (no derivatives) at a point.
fn frame_values(chart: &ChartSpec, p: [f64; 3]) -> ([C; 3], [C; 3], [C; 3], [C; 3]) {
    let f = build_frame::<f64>(chart, p, 3).unwrap();
    (values(&f.z), values(&f.zbar), values(&f.t), values(&f.zeta))
}

/// Central-difference bracket of frame fields built from point values only.
fn fd_structure(chart: &ChartSpec, p: [f64; 3]) -> (C, C, C) {
    let h = 1e-5;
    let shifted = |axis: usize, s: f64| {
        let mut q = p;
        q[axis] += s;
        frame_values(chart, q)
    };
    let (z, zb, t, zeta) = frame_values(chart, p);
    // d[axis] holds the derivatives of (Z, Zbar, T) along u_axis
    let d: Vec<([C; 3], [C; 3], [C; 3])> = (0..3)
        .map(|axis| {
            let (zp, zbp, tp, _) = shifted(axis, h);
            let (zm, zbm, tm, _) = shifted(axis, -h);
            let diff = |a: [C; 3], b: [C; 3]| std::array::from_fn(|k| (a[k] - b[k]) / (2.0 * h));
            (diff(zp, zm), diff(zbp, zbm), diff(tp, tm))
        })
        .collect();
    let deriv = |v: [C; 3], which: usize| -> [C; 3] {
        std::array::from_fn(|k| {
            (0..3)
                .map(|j| {
                    let dj = match which {
                        0 => d[j].0[k],
                        1 => d[j].1[k],
                        _ => d[j].2[k],
                    };
                    v[j] * dj
                })
                .sum()
        })
    };
    let br = |v: [C; 3], vi: usize, w: [C; 3], wi: usize| -> [C; 3] {
        let vw = deriv(v, wi);
        let wv = deriv(w, vi);
        std::array::from_fn(|k| vw[k] - wv[k])
    };
    let zeta_of = |v: [C; 3]| -> C { (0..3).map(|k| zeta[k] * v[k]).sum() };
    let a = C::i() * zeta_of(br(z, 0, zb, 1));
    let b = zeta_of(br(z, 0, t, 2));
    let c = zeta_of(br(zb, 1, t, 2));
    (a, b, c)
}

/// Finite-difference exterior derivative of the contact form and a direct Reeb solve.
fn fd_reeb(chart: &ChartSpec, p: [f64; 3]) -> [f64; 3] {
    let h = 1e-5;
    let th = |q: [f64; 3]| -> [f64; 3] { std::array::from_fn(|k| chart.theta[k].value(q).unwrap().re) };
    let mut grad = [[0.0; 3]; 3]; // grad[i][j] = d_i theta_j
    for i in 0..3 {
        let mut qp = p;
        let mut qm = p;
        qp[i] += h;
        qm[i] -= h;
        let (a, b) = (th(qp), th(qm));
        for j in 0..3 {
            grad[i][j] = (a[j] - b[j]) / (2.0 * h);
        }
    }
    let w = |i: usize, j: usize| grad[i][j] - grad[j][i];
    // kernel of dθ is the cross product of its "axial vector"
    let axial = [w(1, 2), w(2, 0), w(0, 1)];
    let theta = th(p);
    let dot: f64 = (0..3).map(|k| axial[k] * theta[k]).sum();
    std::array::from_fn(|k| axial[k] / dot)
}

#[test]
fn heisenberg_reeb_field_is_vertical() {
    let ch = chart(ModelName::Heisenberg);
    for p in sample_domain(&ch.domain, 10, 0, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&ch, p, 3).unwrap();
        let oracle = fd_reeb(&ch, p);
        for k in 0..3 {
            assert!((f.t[k].value() - C::new(oracle[k], 0.0)).norm() < 1e-8);
        }
        assert!((f.t[2].value() - 1.0).norm() < 1e-12);
        assert!(f.t[0].value().norm() < 1e-12 && f.t[1].value().norm() < 1e-12);
    }
}

#[test]
fn reeb_matches_finite_difference_oracle_on_sphere() {
    let ch = chart(ModelName::Sphere);
    for p in sample_domain(&ch.domain, 10, 5, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&ch, p, 3).unwrap();
        let oracle = fd_reeb(&ch, p);
        for k in 0..3 {
            assert!((f.t[k].value() - oracle[k]).norm() < 1e-8);
        }
    }
}

#[test]
fn normalization_and_reeb_identities_hold_on_every_model() {
    for name in ModelName::ALL {
        let ch = chart(name);
        for p in sample_domain(&ch.domain, 100, 0, DEFAULT_MARGIN) {
            let f = build_frame::<f64>(&ch, p, 5).unwrap();
            let r = f.verify().unwrap();
            assert!(r.levi_normalization < 1e-12, "{name}: {r:?}");
            assert!(r.reeb < 1e-9, "{name}: {r:?}");
            assert!(r.duality < 1e-10, "{name}: {r:?}");
            assert!(r.max() < 1e-8, "{name}: {r:?}");
        }
    }
}

#[test]
fn heisenberg_structure_functions_vanish_and_match_fd_brackets() {
    let ch = chart(ModelName::Heisenberg);
    for p in sample_domain(&ch.domain, 8, 0, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&ch, p, 4).unwrap();
        let (a, b, c) = fd_structure(&ch, p);
        for (jet, fd) in [(&f.a, a), (&f.b, b), (&f.c, c)] {
            assert!(jet.value().norm() < 1e-9);
            assert!((jet.value() - fd).norm() < 1e-7);
        }
    }
}

#[test]
fn sphere_is_sasakian_with_b_equal_to_i() {
    let ch = chart(ModelName::Sphere);
    for p in sample_domain(&ch.domain, 50, 0, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&ch, p, 4).unwrap();
        assert!(f.c.value().norm() < 1e-9);
        assert!(f.a.value().norm() < 1e-9);
        assert!((f.b.value() - C::i()).norm() < 1e-9);
    }
    let p = [0.3, -0.4, 1.0];
    let (a, b, c) = fd_structure(&ch, p);
    assert!(a.norm() < 1e-7 && (b - C::i()).norm() < 1e-7 && c.norm() < 1e-7);
}

#[test]
fn cylinder_gauge_has_constant_b_and_c() {
    let ch = chart(ModelName::Cylinder);
    let half_i = C::new(0.0, 0.5);
    for p in sample_domain(&ch.domain, 50, 0, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&ch, p, 4).unwrap();
        assert!((f.b.value() - half_i).norm() < 1e-9);
        assert!((f.c.value() - half_i).norm() < 1e-9);
        assert!(f.a.value().norm() < 1e-9);
    }
    let (_, b, c) = fd_structure(&ch, [0.7, 0.2, -0.5]);
    assert!((b - half_i).norm() < 1e-7 && (c - half_i).norm() < 1e-7);
}

#[test]
fn corrupted_b_is_detected_by_jacobi_residuals() {
    let ch = chart(ModelName::Sphere);
    let mut f = build_frame::<f64>(&ch, [0.2, 0.1, 0.3], 5).unwrap();
    assert!(f.verify().unwrap().jacobi < 1e-10);
    f.b = f.b.add_constant(C::new(1e-3, 0.0));
    let r = f.verify().unwrap();
    assert!((r.b_real_part - 2e-3).abs() < 1e-9, "{r:?}");
    assert!(r.max() > 5e-4);
}

#[test]
fn identity_and_constant_gauges() {
    let ch = chart(ModelName::Cylinder);
    let p = [0.4, -0.3, 0.8];
    let f0 = build_frame::<f64>(&ch, p, 5).unwrap();

    let same = ch.change_frame(&Expr::real(0.0), 1e-9).unwrap();
    let f1 = build_frame::<f64>(&same, p, 5).unwrap();
    for (x, y) in [(&f0.a, &f1.a), (&f0.b, &f1.b), (&f0.c, &f1.c)] {
        assert!((x.value() - y.value()).norm() < 1e-14);
    }

    let v = 0.7;
    let rotated = ch.change_frame(&Expr::real(v), 1e-9).unwrap();
    let f2 = build_frame::<f64>(&rotated, p, 5).unwrap();
    let phase = C::new(0.0, 2.0 * v).exp();
    assert!((f2.c.value() - phase * f0.c.value()).norm() < 1e-12);
    assert!((f2.b.value() - f0.b.value()).norm() < 1e-12);
    let r = gauge_law_residuals(&f0, &f2, &Expr::real(v)).unwrap();
    assert!(r.iter().all(|x| *x < 1e-12));
}

#[test]
fn pre_gauge_cylinder_is_fixed_by_solved_gauge() {
    let pre = model(
        ModelName::Cylinder,
        &ModelParams {
            cylinder_gauge: CylinderGauge::Pre,
            ..Default::default()
        },
    )
    .unwrap()
    .chart;
    // solve e^{2iv} c = i/2 pointwise and compare with the closed form v = u2
    for p in sample_domain(&pre.domain, 20, 1, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&pre, p, 4).unwrap();
        let c = f.c.value();
        assert!((c.norm() - 0.5).abs() < 1e-9);
        let v = 0.5 * (C::new(0.0, 0.5) / c).arg();
        let diff = (v - p[1]).rem_euclid(std::f64::consts::PI);
        assert!(diff.min(std::f64::consts::PI - diff) < 1e-9);
    }
    let gauge = expr::parse("u2").unwrap();
    let fixed = pre.change_frame(&gauge, 1e-9).unwrap();
    for p in sample_domain(&fixed.domain, 20, 0, DEFAULT_MARGIN) {
        let f = build_frame::<f64>(&fixed, p, 4).unwrap();
        assert!((f.b.value() - C::new(0.0, 0.5)).norm() < 1e-9);
        assert!((f.c.value() - C::new(0.0, 0.5)).norm() < 1e-9);
        let orig = build_frame::<f64>(&pre, p, 4).unwrap();
        let r = gauge_law_residuals(&orig, &f, &gauge).unwrap();
        assert!(r.iter().all(|x| *x < 1e-9), "{r:?}");
    }
}

#[test]
fn complex_gauge_is_rejected() {
    let ch = chart(ModelName::Heisenberg);
    let v = expr::parse("u1 + 0.1*i").unwrap();
    assert!(matches!(ch.change_frame(&v, 1e-9), Err(Error::NonRealGauge { .. })));
}

#[test]
fn webster_products_of_frame_vectors() {
    let ch = chart(ModelName::Sphere);
    let f = build_frame::<f64>(&ch, [0.5, 0.2, -1.0], 3).unwrap();
    let z = values(&f.z);
    let t = values(&f.t);
    assert!((f.webster_inner(z, z, InnerKind::Hermitian) - 1.0).norm() < 1e-12);
    assert!(f.webster_inner(z, z, InnerKind::Bilinear).norm() < 1e-12);
    assert!(f.webster_inner(z, t, InnerKind::Hermitian).norm() < 1e-12);
    let x = values(&f.field(FrameField::X));
    let y = values(&f.field(FrameField::Y));
    assert!((f.webster_inner(x, x, InnerKind::Bilinear) - 1.0).norm() < 1e-12);
    assert!(f.webster_inner(x, y, InnerKind::Bilinear).norm() < 1e-12);
    assert!(x.iter().chain(&y).all(|c| c.im.abs() < 1e-12));
}

/// `g = θ⊗θ + dθ(·, J·)` assembled from coordinate data with `J` diagonal on the frame.
fn metric_oracle(f: &FrameData<f64>) -> [[f64; 3]; 3] {
    let cols = [values(&f.z), values(&f.zbar), values(&f.t)];
    let m: [[C; 3]; 3] = std::array::from_fn(|k| std::array::from_fn(|c| cols[c][k]));
    let inv = inverse3_values(&m).unwrap();
    let eig = [C::i(), -C::i(), C::new(0.0, 0.0)];
    let j: [[C; 3]; 3] =
        std::array::from_fn(|r| std::array::from_fn(|s| (0..3).map(|k| m[r][k] * eig[k] * inv[k][s]).sum()));
    let th: [f64; 3] = std::array::from_fn(|k| f.theta[k].value().re);
    let dth: [[f64; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|s| f.dtheta[r][s].value().re));
    std::array::from_fn(|r| {
        std::array::from_fn(|s| {
            let levi: f64 = (0..3).map(|k| dth[r][k] * j[k][s].re).sum();
            th[r] * th[s] + levi
        })
    })
}

#[test]
fn webster_metric_matches_coordinate_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for name in ModelName::ALL {
        let ch = chart(name);
        for p in sample_domain(&ch.domain, 5, 0, DEFAULT_MARGIN) {
            let f = build_frame::<f64>(&ch, p, 3).unwrap();
            let g = metric_oracle(&f);
            for _ in 0..4 {
                let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let w: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let want: f64 = (0..9).map(|n| v[n / 3] * g[n / 3][n % 3] * w[n % 3]).sum();
                let cv = v.map(|x| C::new(x, 0.0));
                let cw = w.map(|x| C::new(x, 0.0));
                let got = f.webster_inner(cv, cw, InnerKind::Bilinear);
                assert!((got - want).norm() < 1e-9, "{name}: {got} vs {want}");
                let herm = f.webster_inner(cv, cw, InnerKind::Hermitian);
                assert!((herm - want).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn single_precision_frame_tracks_double() {
    let ch = chart(ModelName::Sphere);
    let p = [0.3, 0.2, 0.5];
    let f64f = build_frame::<f64>(&ch, p, 4).unwrap();
    let f32f = build_frame_with_tol::<f32>(&ch, [0.3f32, 0.2, 0.5], 4, 1e-5).unwrap();
    for k in 0..3 {
        let d = f64f.t[k].value() - C::new(f32f.t[k].value().re as f64, f32f.t[k].value().im as f64);
        assert!(d.norm() < 1e-5);
    }
    assert!((f32f.b.value().im as f64 - 1.0).abs() < 1e-4);
}

#[test]
fn frame_errors() {
    let h = chart(ModelName::Heisenberg);
    let p = [0.1, 0.2, 0.3];

    let mut flipped = h.clone();
    flipped.z = std::array::from_fn(|k| Expr::unary(UnaryOp::Conj, h.z[k].clone()));
    assert!(matches!(
        build_frame::<f64>(&flipped, p, 3),
        Err(Error::NotPseudoconvex { .. })
    ));

    let mut vertical = h.clone();
    vertical.z = [Expr::real(0.0), Expr::real(0.0), Expr::real(1.0)];
    assert!(matches!(
        build_frame::<f64>(&vertical, p, 3),
        Err(Error::ContactViolation { .. })
    ));

    let flat = ChartSpec::from_sources(
        "nearly degenerate",
        Domain::cube(1.0),
        ["1", "-1e-13*i", "50*u2 + 50e-13*i*u1"],
        ["-50*u2", "50*u1", "1"],
    )
    .unwrap();
    assert!(matches!(
        build_frame::<f64>(&flat, p, 3),
        Err(Error::DegenerateFrame { .. })
    ));

    assert!(matches!(
        build_frame::<f64>(&h, p, 1),
        Err(Error::Jet(crate::jet::JetError::OrderExhausted))
    ));
}

#[test]
fn homothety_rescales_structure_functions() {
    let ch = chart(ModelName::Sphere);
    let p = [0.1, -0.6, 0.9];
    let f = build_frame::<f64>(&ch, p, 4).unwrap();
    for lambda in [0.5, 2.0, 10.0] {
        let g = build_frame::<f64>(&ch.pseudo_homothety(lambda), p, 4).unwrap();
        for k in 0..3 {
            assert!((g.t[k].value() * lambda - f.t[k].value()).norm() < 1e-12);
            assert!((g.z[k].value() * lambda.sqrt() - f.z[k].value()).norm() < 1e-12);
        }
        assert!((g.b.value() * lambda - f.b.value()).norm() < 1e-12);
    }
}
