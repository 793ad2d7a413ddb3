//! Seeded random charts, functions and gauges for property checks.
//!
//! Random charts perturb the Heisenberg structure on the box `[-0.5, 0.5]³`:
//!
//! ```text
//! θ     = e^p (du3 + (ε1 - u2) du1 + (ε2 + u1) du2)
//! Z_raw = α E1 + β E2,   E1 = θ3 ∂1 - θ1 ∂3,   E2 = θ3 ∂2 - θ2 ∂3
//! ```
//!
//! with small random `p, ε1, ε2`, `α ≈ 1` and `β ≈ ±i`, the sign chosen so that
//! the Levi form is positive.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Expr, UnaryOp};
use crate::frame::{build_frame, ChartSpec};
use crate::jet::Elementary;
use crate::sampling::Domain;

pub const FUZZ_HALF_WIDTH: f64 = 0.5;

/// Deterministic generator for the `index`-th item of a seeded stream.
pub fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn lit(x: f64) -> Expr {
    Expr::real(x)
}

fn linear(rng: &mut impl Rng, scale: f64) -> Expr {
    let mut e = lit(rng.gen_range(-scale..scale));
    for axis in 0..3 {
        e = e.add(lit(rng.gen_range(-scale..scale)).mul(Expr::coord(axis)));
    }
    e
}

/// A random real analytic function: quadratic polynomial plus `sin` and `exp` terms.
pub fn random_real_function(rng: &mut impl Rng, amplitude: f64) -> Expr {
    let mut e = linear(rng, amplitude);
    for _ in 0..2 {
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        let monomial = Expr::coord(i).mul(Expr::coord(j));
        e = e.add(lit(rng.gen_range(-amplitude..amplitude)).mul(monomial));
    }
    let s = Expr::call(Elementary::Sin, linear(rng, 1.5));
    let x = Expr::call(Elementary::Exp, linear(rng, 0.8));
    e = e.add(lit(rng.gen_range(-amplitude..amplitude)).mul(s));
    e.add(lit(rng.gen_range(-amplitude..amplitude)).mul(x))
}

/// `u + i v` with independent random real parts.
pub fn random_complex_function(rng: &mut impl Rng, amplitude: f64) -> Expr {
    let re = random_real_function(rng, amplitude);
    let im = random_real_function(rng, amplitude);
    re.add(Expr::imag_unit().mul(im))
}

/// A random smooth gauge for pseudohermitian changes of frame.
pub fn random_gauge(rng: &mut impl Rng) -> Expr {
    random_real_function(rng, 0.6)
}

/// `count` real test functions drawn from `seed`.
pub fn random_functions(seed: u64, count: usize) -> Vec<Expr> {
    (0..count)
        .map(|k| random_real_function(&mut rng_for(seed, k), 1.0))
        .collect()
}

/// The `index`-th random chart of the corpus generated by `seed`.
pub fn random_chart(seed: u64, index: usize) -> ChartSpec {
    let mut rng = rng_for(seed ^ 0x5eed_c4a7, index);
    let p = random_real_function(&mut rng, 0.15);
    let eps1 = random_real_function(&mut rng, 0.15);
    let eps2 = random_real_function(&mut rng, 0.15);
    let scale = Expr::call(Elementary::Exp, p);
    let theta = [
        scale.clone().mul(eps1.sub(Expr::coord(1))),
        scale.clone().mul(eps2.add(Expr::coord(0))),
        scale,
    ];
    let alpha = lit(1.0).add(random_complex_function(&mut rng, 0.1));
    let beta_mag = lit(1.0).add(random_complex_function(&mut rng, 0.1));

    let e1 = [theta[2].clone(), lit(0.0), Expr::unary(UnaryOp::Neg, theta[0].clone())];
    let e2 = [lit(0.0), theta[2].clone(), Expr::unary(UnaryOp::Neg, theta[1].clone())];
    let domain = Domain::cube(FUZZ_HALF_WIDTH);
    let assemble = |sign: f64| -> [Expr; 3] {
        let beta = Expr::Literal(Complex64::new(0.0, sign)).mul(beta_mag.clone());
        std::array::from_fn(|k| alpha.clone().mul(e1[k].clone()).add(beta.clone().mul(e2[k].clone())))
    };
    let name = format!("fuzz-{seed}-{index}");
    let minus = ChartSpec::new(name.clone(), domain, assemble(-1.0), theta.clone());
    if build_frame::<f64>(&minus, domain.center(), 2).is_ok() {
        minus
    } else {
        ChartSpec::new(name, domain, assemble(1.0), theta)
    }
}

/// The first `count` charts of the corpus generated by `seed`.
pub fn random_charts(seed: u64, count: usize) -> Vec<ChartSpec> {
    (0..count).map(|k| random_chart(seed, k)).collect()
}
