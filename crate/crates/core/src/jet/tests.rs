use super::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type J = Jet<f64>;

fn var(axis: usize, order: usize, p: [f64; 3]) -> J {
    J::variable(axis, order, p)
}

fn cst(v: f64, order: usize, p: [f64; 3]) -> J {
    J::constant(Complex64::new(v, 0.0), order, p)
}

/// Dense cubic polynomial in three variables with random coefficients.
#[derive(Clone)]
struct Cubic(Vec<(MultiIndex, f64)>);

impl Cubic {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let mut terms = Vec::new();
        for a in 0..=3u8 {
            for b in 0..=3 - a {
                for c in 0..=3 - a - b {
                    terms.push(([a, b, c], rng.gen_range(-1.0..1.0)));
                }
            }
        }
        Cubic(terms)
    }

    fn eval(&self, x: [f64; 3]) -> f64 {
        self.0
            .iter()
            .map(|(a, k)| k * x[0].powi(a[0] as i32) * x[1].powi(a[1] as i32) * x[2].powi(a[2] as i32))
            .sum()
    }

    fn jet(&self, order: usize, p: [f64; 3]) -> J {
        let vars = [var(0, order, p), var(1, order, p), var(2, order, p)];
        let mut acc = J::zero(order, p);
        for (a, k) in &self.0 {
            let mut m = cst(*k, order, p);
            for axis in 0..3 {
                m = m * vars[axis].powi(a[axis] as i32).unwrap();
            }
            acc = acc + m;
        }
        acc
    }
}

fn unit(axis: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    e
}

fn shifted(p: [f64; 3], axis: usize, h: f64) -> [f64; 3] {
    let mut q = p;
    q[axis] += h;
    q
}

fn fd_first(f: &dyn Fn([f64; 3]) -> f64, p: [f64; 3], axis: usize, h: f64) -> f64 {
    (f(shifted(p, axis, h)) - f(shifted(p, axis, -h))) / (2.0 * h)
}

fn fd_second(f: &dyn Fn([f64; 3]) -> f64, p: [f64; 3], i: usize, j: usize, h: f64) -> f64 {
    if i == j {
        (f(shifted(p, i, h)) - 2.0 * f(p) + f(shifted(p, i, -h))) / (h * h)
    } else {
        let pp = shifted(shifted(p, i, h), j, h);
        let pm = shifted(shifted(p, i, h), j, -h);
        let mp = shifted(shifted(p, i, -h), j, h);
        let mm = shifted(shifted(p, i, -h), j, -h);
        (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn square_of_coordinate() {
    let p = [0.0; 3];
    let u = var(0, 2, p);
    let sq = &u * &u;
    assert_eq!(sq.coeff([2, 0, 0]), Some(Complex64::new(1.0, 0.0)));
    assert_eq!(sq.derivative([2, 0, 0]), Some(Complex64::new(2.0, 0.0)));
}

#[test]
fn self_division_is_one() {
    let p = [0.3, -0.2, 0.5];
    let a = var(0, 4, p).exp() + var(1, 4, p) * var(2, 4, p);
    let q = a.try_div(&a).unwrap();
    assert!((q.value() - 1.0).norm() < 1e-14);
    assert!(q.coeffs()[1..].iter().all(|c| c.norm() < 1e-13));
}

#[test]
fn cubic_products_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-5;
    for _ in 0..5 {
        let f = Cubic::random(&mut rng);
        let g = Cubic::random(&mut rng);
        let p = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let prod = f.jet(3, p) * g.jet(3, p);
        let oracle = |x: [f64; 3]| f.eval(x) * g.eval(x);
        assert!(rel_err(prod.value().re, oracle(p)) < 1e-12);
        for i in 0..3 {
            let mut a = [0u8; 3];
            a[i] = 1;
            let ad = prod.derivative(a).unwrap().re;
            assert!(rel_err(ad, fd_first(&oracle, p, i, h)) < 1e-5);
            for j in 0..3 {
                let mut b = a;
                b[j] += 1;
                let ad2 = prod.derivative(b).unwrap().re;
                assert!(rel_err(ad2, fd_second(&oracle, p, i, j, 1e-4)) < 1e-5, "{i}{j}");
            }
        }
    }
}

#[test]
fn euler_identity() {
    let p = [0.0, 0.0, std::f64::consts::PI];
    let z = var(2, 3, p).scale(Complex64::new(0.0, 1.0)).exp();
    assert!((z.value() + 1.0).norm() < 1e-15);
}

#[test]
fn sqrt_first_order_coefficient() {
    let p = [0.0; 3];
    let s = (var(0, 3, p) + cst(1.0, 3, p)).sqrt().unwrap();
    assert!((s.value() - 1.0).norm() < 1e-15);
    assert!((s.coeff([1, 0, 0]).unwrap() - 0.5).norm() < 1e-15);
    assert!((s.coeff([2, 0, 0]).unwrap() + 0.125).norm() < 1e-15);
}

#[test]
fn exp_log_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let order = 5;
        let mut coeffs: Vec<Complex64> = (0..len_for(order))
            .map(|_| Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
            .collect();
        coeffs[0] = Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(-0.5..0.5));
        let a = J::from_coeffs(order, [0.1, 0.2, 0.3], coeffs).unwrap();
        let back = a.ln().unwrap().exp();
        assert!((&back - &a).max_abs() < 1e-12);
    }
}

#[test]
fn branch_and_division_errors() {
    let p = [0.0; 3];
    assert!(matches!(
        (var(0, 2, p) - cst(1.0, 2, p)).sqrt(),
        Err(JetError::BranchViolation { function: "sqrt", .. })
    ));
    assert!(matches!(var(0, 2, p).ln(), Err(JetError::BranchViolation { .. })));
    assert!(matches!(
        cst(1.0, 2, p).try_div(&var(0, 2, p)),
        Err(JetError::DivisionNearZero { .. })
    ));
    assert!(matches!(
        jet_arith(&cst(1.0, 2, p), &cst(1.0, 3, p), ArithOp::Add),
        Err(JetError::OrderMismatch { left: 2, right: 3 })
    ));
    assert!(matches!(
        jet_arith(&cst(1.0, 2, p), &cst(1.0, 2, [1.0, 0.0, 0.0]), ArithOp::Mul),
        Err(JetError::BasePointMismatch)
    ));
    assert!(matches!(cst(1.0, 0, p).partial(0), Err(JetError::OrderExhausted)));
    // off the cut, a negative imaginary value is fine
    let z = cst(-1.0, 2, p) + J::constant(Complex64::new(0.0, -0.5), 2, p);
    assert!(z.sqrt().is_ok());
}

#[test]
#[should_panic(expected = "different base points")]
fn operators_refuse_mixed_base_points() {
    let _ = cst(1.0, 2, [0.0; 3]) + cst(1.0, 2, [0.0, 0.0, 1.0]);
}

#[test]
fn partial_of_square() {
    let p = [0.0; 3];
    let u = var(0, 3, p);
    let d = (&u * &u).partial(0).unwrap();
    assert_eq!(d.order(), 2);
    assert_eq!(d.value(), Complex64::new(0.0, 0.0));
    // ∂₁(u₁²) = 2u₁
    assert_eq!(d.coeff([1, 0, 0]), Some(Complex64::new(2.0, 0.0)));
    let z = cst(4.0, 3, p).partial(2).unwrap();
    assert_eq!(z.max_abs(), 0.0);
}

fn random_jet(rng: &mut ChaCha8Rng, order: usize, p: [f64; 3]) -> J {
    let coeffs = (0..len_for(order))
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    J::from_coeffs(order, p, coeffs).unwrap()
}

#[test]
fn mixed_partials_commute_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let a = random_jet(&mut rng, 6, [0.0; 3]);
        let x = a.partial(0).unwrap().partial(1).unwrap();
        let y = a.partial(1).unwrap().partial(0).unwrap();
        assert_eq!(x, y);
    }
}

#[test]
fn field_along_first_axis() {
    let p = [0.0; 3];
    let v = [cst(1.0, 3, p), cst(0.0, 3, p), cst(0.0, 3, p)];
    let f = var(0, 4, p).exp();
    let vf = apply_field(&v, &f).unwrap();
    assert!((vf.value() - 1.0).norm() < 1e-15);
    assert_eq!(vf.order(), 3);
}

#[test]
fn commutator_matches_bracket_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = [0.2, -0.4, 0.7];
    for _ in 0..5 {
        let v: [J; 3] = std::array::from_fn(|_| Cubic::random(&mut rng).jet(5, p));
        let w: [J; 3] = std::array::from_fn(|_| Cubic::random(&mut rng).jet(5, p));
        let f = Cubic::random(&mut rng).jet(5, p) * var(1, 5, p).sin();
        // [V,W]^k = V(W^k) - W(V^k)
        let bracket: [J; 3] =
            std::array::from_fn(|k| apply_field(&v, &w[k]).unwrap() - apply_field(&w, &v[k]).unwrap());
        let lhs = apply_field(&v, &apply_field(&w, &f).unwrap()).unwrap()
            - apply_field(&w, &apply_field(&v, &f).unwrap()).unwrap();
        let rhs = apply_field(&bracket, &f).unwrap();
        let scale = lhs.max_abs().max(1.0);
        assert!((lhs - rhs).max_abs() / scale < 1e-10);
    }
}

#[test]
fn transcendental_derivatives_match_finite_differences() {
    let oracle = |x: [f64; 3]| (x[0] * x[1]).sin() * (x[2] - x[0]).exp() + (1.0 + x[1] * x[1]).sqrt().ln();
    let p = [0.3, 0.8, -0.2];
    let j = {
        let u = [var(0, 4, p), var(1, 4, p), var(2, 4, p)];
        (&u[0] * &u[1]).sin() * (&u[2] - &u[0]).exp() + (cst(1.0, 4, p) + &u[1] * &u[1]).sqrt().unwrap().ln().unwrap()
    };
    for i in 0..3 {
        let a = {
            let mut a = [0u8; 3];
            a[i] = 1;
            a
        };
        assert!(rel_err(j.derivative(a).unwrap().re, fd_first(&oracle, p, i, 1e-5)) < 1e-5);
        for k in 0..3 {
            let mut b = a;
            b[k] += 1;
            let fd = fd_second(&oracle, p, i, k, 1e-4);
            assert!(rel_err(j.derivative(b).unwrap().re, fd) < 1e-5);
        }
    }
    let _ = unit(0);
}

proptest! {
    #[test]
    fn leibniz_rule(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [0.0; 3];
        let v: [J; 3] = std::array::from_fn(|_| random_jet(&mut rng, 4, p));
        let f = random_jet(&mut rng, 5, p);
        let g = random_jet(&mut rng, 5, p);
        let lhs = apply_field(&v, &(&f * &g)).unwrap();
        let rhs = apply_field(&v, &f).unwrap() * &g + &f * apply_field(&v, &g).unwrap();
        prop_assert!((&lhs - &rhs).max_abs() / lhs.max_abs().max(1.0) < 1e-12);
    }

    #[test]
    fn truncation_commutes_with_product(seed in 0u64..10_000, k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [0.0; 3];
        let f = random_jet(&mut rng, 5, p);
        let g = random_jet(&mut rng, 5, p);
        let a = (&f * &g).truncate(k);
        let b = f.truncate(k) * g.truncate(k);
        prop_assert!((a - b).max_abs() < 1e-12);
    }
}
