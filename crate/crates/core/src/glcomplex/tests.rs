use super::*;
use crate::expr::{self, Expr};
use crate::frame::{build_frame, ChartSpec, FrameField};
use crate::fuzz::{random_chart, random_complex_function, random_real_function, rng_for};
use crate::models::{model, ModelName, ModelParams};
use crate::sampling::{sample_domain, DEFAULT_MARGIN};
use num_complex::Complex64;
use proptest::prelude::*;

type C = Complex64;

fn chart(name: ModelName) -> ChartSpec {
    model(name, &ModelParams::default()).unwrap().chart
}

fn all_charts() -> Vec<ChartSpec> {
    let mut charts: Vec<_> = ModelName::ALL.iter().map(|n| chart(*n)).collect();
    charts.extend((0..3).map(|k| random_chart(0, k)));
    charts
}

fn frame_at(ch: &ChartSpec, p: [f64; 3], order: usize) -> FrameData<f64> {
    build_frame(ch, p, order).unwrap()
}

#[test]
fn first_differentials_of_functions() {
    let h = chart(ModelName::Heisenberg);
    let p = [0.3, -0.7, 0.2];
    let fr = frame_at(&h, p, 4);
    let cx = GLComplex::new(&fr);

    let constant = GLForm::scalar(Bidegree::E00, expr::parse("2.5").unwrap().eval(p, 4).unwrap());
    assert_eq!(cx.d_prime(&constant).unwrap().max_abs(), 0.0);
    assert_eq!(cx.d_second(&constant).unwrap().max_abs(), 0.0);

    let u3 = GLForm::scalar(Bidegree::E00, Expr::coord(2).eval(p, 4).unwrap());
    let d = cx.d_prime(&u3).unwrap();
    assert_eq!(d.bidegree, Bidegree::E10);
    // Z u3 = i z̄ / √L(Z_raw) with z = u1 + i u2
    let want = C::i() * C::new(p[0], -p[1]) / fr.levi_raw.sqrt();
    assert!((d.coeff().value() - want).norm() < 1e-14);
    assert!((d.coeff() - &fr.z[2]).max_abs() < 1e-15);

    let f = random_real_function(&mut rng_for(7, 0), 1.0).eval(p, 4).unwrap();
    let form = GLForm::scalar(Bidegree::E00, f);
    let dp = cx.d_prime(&form).unwrap();
    let ds = cx.d_second(&form).unwrap();
    assert!((ds.coeff() - &dp.coeff().conj()).max_abs() < 1e-13);
}

#[test]
fn heisenberg_operators_match_flat_formulas() {
    let h = chart(ModelName::Heisenberg);
    for (k, p) in sample_domain(&h.domain, 10, 0, DEFAULT_MARGIN).into_iter().enumerate() {
        let fr = frame_at(&h, p, 5);
        let cx = GLComplex::new(&fr);
        let g = random_complex_function(&mut rng_for(3, k), 1.0).eval(p, 5).unwrap();
        let tg = fr.tf(&g).unwrap();
        let zbg = fr.zbarf(&g).unwrap();
        let flat_prime = -(tg + fr.zf(&zbg).unwrap() * C::i());
        let flat_second = -(fr.zbarf(&zbg).unwrap() * C::i());
        assert!((cx.big_d_prime_10(&g).unwrap() - flat_prime).max_abs() < 1e-10);
        assert!((cx.big_d_second_10(&g).unwrap() - flat_second).max_abs() < 1e-10);
    }
}

#[test]
fn zero_inputs_give_zero_forms() {
    let fr = frame_at(&chart(ModelName::Sphere), [0.1, 0.2, 0.3], 4);
    let cx = GLComplex::new(&fr);
    let zero = Jet::zero(4, [0.1, 0.2, 0.3]);
    for op in [
        GLComplex::big_d_prime_10,
        GLComplex::big_d_second_10,
        GLComplex::big_d_prime_01,
        GLComplex::big_d_plus_01,
    ] {
        assert_eq!(op(&cx, &zero).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn pluriharmonic_sphere_coordinates_are_killed_by_d() {
    let desc = model(ModelName::Sphere, &ModelParams::default()).unwrap();
    let emb = desc.embedding.unwrap();
    for p in sample_domain(&desc.chart.domain, 20, 0, DEFAULT_MARGIN) {
        let fr = frame_at(&desc.chart, p, 5);
        let cx = GLComplex::new(&fr);
        for f in emb.eval(p, 5, 1e-9).unwrap() {
            let g = fr.zf(&f).unwrap();
            assert!(cx.big_d_prime_10(&g).unwrap().value().norm() < 1e-8);
            assert!(cx.big_d_second_10(&g).unwrap().value().norm() < 1e-8);
        }
    }
}

#[test]
fn conjugate_pairs_of_operators() {
    for ch in all_charts() {
        let p = ch.domain.center();
        let fr = frame_at(&ch, p, 5);
        let cx = GLComplex::new(&fr);
        let g = random_complex_function(&mut rng_for(9, 1), 1.0).eval(p, 5).unwrap();
        let gb = g.conj();
        let d1 = cx.big_d_plus_01(&gb).unwrap() - cx.big_d_second_10(&g).unwrap().conj();
        let d2 = cx.big_d_prime_01(&gb).unwrap() - cx.big_d_prime_10(&g).unwrap().conj();
        assert!(d1.max_abs() < 1e-10, "{}", ch.name);
        assert!(d2.max_abs() < 1e-10, "{}", ch.name);
    }
}

#[test]
fn integrability_component_on_models() {
    for name in ModelName::ALL {
        let ch = chart(name);
        for (k, p) in sample_domain(&ch.domain, 10, 0, DEFAULT_MARGIN).into_iter().enumerate() {
            let fr = frame_at(&ch, p, 5);
            let cx = GLComplex::new(&fr);
            let f = random_real_function(&mut rng_for(21, k), 1.0).eval(p, 5).unwrap();
            let omega = cx.d_prime(&GLForm::scalar(Bidegree::E00, f)).unwrap();
            let omega_bar = GLForm::scalar(Bidegree::E01, omega.coeff().conj());
            let lhs = cx.big_d_second(&omega).unwrap();
            let rhs = cx.big_d_prime(&omega_bar).unwrap();
            assert!(lhs.try_add(&rhs).unwrap().max_value() < 1e-8, "{name}");
        }
    }
}

#[test]
fn top_differentials() {
    let h = chart(ModelName::Heisenberg);
    let p = [0.2, 0.1, -0.4];
    let fr = frame_at(&h, p, 4);
    let cx = GLComplex::new(&fr);
    let c = Jet::constant(C::new(1.5, -0.5), 4, p);
    assert_eq!(cx.d_second(&GLForm::scalar(Bidegree::F20, c)).unwrap().max_abs(), 0.0);
}

#[test]
fn top_differential_matches_finite_differences_on_random_chart() {
    let ch = random_chart(0, 2);
    let g_expr = random_complex_function(&mut rng_for(5, 5), 1.0);
    let h_expr = random_complex_function(&mut rng_for(5, 6), 1.0);
    for p in sample_domain(&ch.domain, 5, 2, DEFAULT_MARGIN) {
        let fr = frame_at(&ch, p, 4);
        let cx = GLComplex::new(&fr);
        let step = 1e-5;
        let grad = |e: &Expr| -> [C; 3] {
            std::array::from_fn(|k| {
                let (mut a, mut b) = (p, p);
                a[k] += step;
                b[k] -= step;
                (e.value(a).unwrap() - e.value(b).unwrap()) / (2.0 * step)
            })
        };
        let along = |v: &[Jet<f64>; 3], grad: [C; 3]| -> C { (0..3).map(|k| v[k].value() * grad[k]).sum() };
        let a = fr.a.value();
        let g = g_expr.value(p).unwrap();
        let h = h_expr.value(p).unwrap();
        let fd20 = -(along(&fr.zbar, grad(&g_expr)) - C::i() * a * g);
        let fd11 = along(&fr.z, grad(&h_expr)) + C::i() * a.conj() * h;
        let got20 = cx.d_second_20(&g_expr.eval(p, 4).unwrap()).unwrap().value();
        let got11 = cx.d_prime_11(&h_expr.eval(p, 4).unwrap()).unwrap().value();
        assert!((got20 - fd20).norm() < 1e-5 * fd20.norm().max(1.0));
        assert!((got11 - fd11).norm() < 1e-5 * fd11.norm().max(1.0));
    }
}

#[test]
fn star_is_an_involutive_relabelling() {
    let p = [0.0; 3];
    let j = Jet::variable(0, 3, p).exp();
    for b in Bidegree::ALL {
        let form = GLForm::scalar(b, j.clone());
        let once = star(&form);
        assert_eq!(once.bidegree, b.star());
        assert_eq!(once.bidegree.degree(), 3 - b.degree());
        assert_eq!(star(&once), form);
        let s = C::new(0.3, -2.0);
        assert_eq!(star(&form.scale(s)), once.scale(s));
    }
    let f = GLForm::scalar(Bidegree::E00, j);
    assert_eq!(star(&f).bidegree, Bidegree::F21);
}

#[test]
fn adjoint_of_second_differential_is_the_sublaplacian() {
    for ch in all_charts() {
        let p = ch.domain.center();
        let fr = frame_at(&ch, p, 5);
        let cx = GLComplex::new(&fr);
        let f = random_real_function(&mut rng_for(2, 2), 1.0).eval(p, 5).unwrap();
        let form = GLForm::scalar(Bidegree::E00, f.clone());
        let dd = cx.delta_second(&cx.d_second(&form).unwrap()).unwrap();
        assert_eq!(dd.bidegree, Bidegree::E00);
        assert!((dd.coeff() - cx.laplacian_gl(&f).unwrap()).max_abs() < 1e-12);
    }
}

#[test]
fn adjoints_vanish_on_constants() {
    let p = [0.1, 0.0, 0.2];
    let fr = frame_at(&chart(ModelName::Cylinder), p, 4);
    let cx = GLComplex::new(&fr);
    let c = Jet::constant(C::new(2.0, 1.0), 4, p);
    let vol = GLForm::scalar(Bidegree::F21, c.clone());
    assert_eq!(cx.delta_prime(&vol).unwrap().bidegree, Bidegree::F11);
    assert_eq!(cx.delta_prime(&vol).unwrap().max_abs(), 0.0);
    assert_eq!(cx.delta_second(&vol).unwrap().max_abs(), 0.0);
    let f = GLForm::scalar(Bidegree::E00, c);
    assert_eq!(cx.delta_prime(&f).unwrap().max_abs(), 0.0);
    assert_eq!(cx.laplacian_gl(f.coeff()).unwrap().max_abs(), 0.0);
}

#[test]
fn operators_reject_foreign_bidegrees() {
    let p = [0.0; 3];
    let fr = frame_at(&chart(ModelName::Heisenberg), p, 4);
    let cx = GLComplex::new(&fr);
    let j = Jet::variable(1, 4, p);
    let undefined = |r: Result<GLForm<f64>>| matches!(r, Err(Error::UndefinedOnBidegree(_)));
    let form = |b| GLForm::scalar(b, j.clone());
    assert!(undefined(cx.d_prime(&form(Bidegree::E10))));
    assert!(undefined(cx.d_second(&form(Bidegree::F11))));
    assert!(undefined(cx.big_d_prime(&form(Bidegree::E00))));
    assert!(undefined(cx.big_d_second(&form(Bidegree::E01))));
    assert!(undefined(cx.big_d_plus(&form(Bidegree::E10))));
    assert!(undefined(cx.delta_prime(&form(Bidegree::E01))));
    assert!(undefined(cx.delta_second(&form(Bidegree::F20))));
    assert!(cx.rumin_d(&form(Bidegree::E01), &form(Bidegree::E01)).is_err());
}

#[test]
fn adjointness_quadrature_spot_check() {
    use crate::sampling::halton_point;
    // bump (1 - x²)⁴ in each rescaled coordinate of the fuzz box [-0.5, 0.5]³
    let ch = random_chart(0, 1);
    let bump = (0..3)
        .map(|k| format!("(1 - 4*u{}^2)^4", k + 1))
        .collect::<Vec<_>>()
        .join("*");
    let bump = expr::parse(&bump).unwrap();
    let f_expr = bump.clone().mul(random_real_function(&mut rng_for(4, 0), 1.0));
    let g_expr = bump.mul(random_complex_function(&mut rng_for(4, 1), 1.0));
    let (mut lhs, mut rhs) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    let mut accumulate = |p: [f64; 3]| {
        let fr = frame_at(&ch, p, 2);
        let cx = GLComplex::new(&fr);
        let f = f_expr.eval(p, 2).unwrap();
        let g = g_expr.eval(p, 2).unwrap();
        let cols = [&fr.z, &fr.zbar, &fr.t];
        let m: [[C; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r].value()));
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let w = 1.0 / det.norm();
        let df = fr.zf(&f).unwrap().value();
        let dg = cx.delta_prime(&GLForm::scalar(Bidegree::E10, g.clone())).unwrap();
        lhs += df * g.value().conj() * w;
        rhs += f.value() * dg.coeff().value().conj() * w;
    };
    for k in 0..40_000 {
        let u = halton_point(0, k);
        accumulate(std::array::from_fn(|a| u[a] - 0.5));
    }
    let rel = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
    assert!(rel < 1e-2, "lhs {lhs} rhs {rhs} rel {rel}");
}

#[test]
fn laplacian_relation_on_random_functions() {
    for ch in all_charts() {
        for (k, p) in sample_domain(&ch.domain, 10, 0, DEFAULT_MARGIN).into_iter().enumerate() {
            let fr = frame_at(&ch, p, 4);
            let cx = GLComplex::new(&fr);
            let f = random_real_function(&mut rng_for(17, k), 1.0).eval(p, 4).unwrap();
            assert!(cx.laplacian_residual(&f).unwrap() < 1e-10, "{}", ch.name);
            assert!(cx.reeb_residual(&f).unwrap() < 1e-9, "{}", ch.name);
        }
    }
}

#[test]
fn laplacians_scale_inversely_with_contact_form() {
    let f_expr = random_real_function(&mut rng_for(8, 0), 1.0);
    for name in ModelName::ALL {
        let ch = chart(name);
        for p in sample_domain(&ch.domain, 5, 0, DEFAULT_MARGIN) {
            let fr = frame_at(&ch, p, 5);
            let f = f_expr.eval(p, 5).unwrap();
            let base_r = GLComplex::new(&fr).laplacian_r(&f).unwrap().value();
            let base_gl = GLComplex::new(&fr).laplacian_gl(&f).unwrap().value();
            for lambda in [0.5, 2.0, 10.0] {
                let scaled = frame_at(&ch.pseudo_homothety(lambda), p, 5);
                let cx = GLComplex::new(&scaled);
                let r = cx.laplacian_r(&f).unwrap().value();
                let gl = cx.laplacian_gl(&f).unwrap().value();
                assert!((r * lambda - base_r).norm() < 1e-9 * base_r.norm().max(1.0));
                assert!((gl * lambda - base_gl).norm() < 1e-9 * base_gl.norm().max(1.0));
            }
        }
    }
}

#[test]
fn vector_forms_act_componentwise() {
    let desc = model(ModelName::Cylinder, &ModelParams::default()).unwrap();
    let p = [0.4, 0.3, -0.2];
    let fr = frame_at(&desc.chart, p, 4);
    let cx = GLComplex::new(&fr);
    let comps = desc.embedding.unwrap().eval(p, 4, 1e-9).unwrap();
    let form = GLForm::vector(Bidegree::E00, comps.clone());
    let d = cx.d_prime(&form).unwrap();
    assert_eq!(d.dim(), 4);
    for (k, c) in comps.iter().enumerate() {
        assert_eq!(d.coeffs[k], fr.apply(FrameField::Z, c).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn anticommutation_relations_hold(seed in 0u64..10_000, chart_index in 0usize..6, x in 0.0f64..1.0) {
        let ch = all_charts().swap_remove(chart_index);
        let p = ch.domain.map_unit([x, 1.0 - x, 0.5 * x + 0.2], DEFAULT_MARGIN);
        let fr = frame_at(&ch, p, 5);
        let cx = GLComplex::new(&fr);
        let mut rng = rng_for(seed, 0);
        let f = random_real_function(&mut rng, 1.0).eval(p, 5).unwrap();
        let g = random_complex_function(&mut rng, 1.0).eval(p, 5).unwrap();
        let h = random_complex_function(&mut rng, 1.0).eval(p, 5).unwrap();
        let r = cx.identity_residuals(&f, &g, &h).unwrap();
        prop_assert!(r.max() < 1e-8, "{}: {:?}", ch.name, r);
    }
}
