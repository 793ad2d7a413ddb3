//! 3×3 inversion by cofactors, over jets and over complex values.

use num_traits::Zero;

use crate::jet::{Jet, JetError};
use crate::scalar::{Cplx, Real};

/// Inverse of a jet-valued 3×3 matrix. Fails when the determinant's value vanishes.
pub fn inverse3<S: Real>(m: &[[Jet<S>; 3]; 3]) -> Result<[[Jet<S>; 3]; 3], JetError> {
    // cyclic index choice makes the cofactor sign implicit
    let cof = |i: usize, j: usize| {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        &m[i1][j1] * &m[i2][j2] - &m[i1][j2] * &m[i2][j1]
    };
    let cofactors: [[Jet<S>; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| cof(i, j)));
    let det = &m[0][0] * &cofactors[0][0] + &m[0][1] * &cofactors[0][1] + &m[0][2] * &cofactors[0][2];
    let inv_det = det.recip()?;
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| &cofactors[j][i] * &inv_det)
    }))
}

/// Inverse of a complex 3×3 matrix, `None` if singular.
pub fn inverse3_values<S: Real>(m: &[[Cplx<S>; 3]; 3]) -> Option<[[Cplx<S>; 3]; 3]> {
    let cof = |i: usize, j: usize| {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]
    };
    let det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
    if det.is_zero() || !det.norm().is_finite() {
        return None;
    }
    Some(std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / det)))
}

fn frobenius<S: Real>(m: &[[Cplx<S>; 3]; 3]) -> f64 {
    m.iter()
        .flatten()
        .map(|z| z.norm_sqr().to_f64_lossy())
        .sum::<f64>()
        .sqrt()
}

/// Frobenius condition number `‖M‖ ‖M⁻¹‖`, infinite for singular matrices.
pub fn condition_number<S: Real>(m: &[[Cplx<S>; 3]; 3]) -> f64 {
    match inverse3_values(m) {
        Some(inv) => frobenius(m) * frobenius(&inv),
        None => f64::INFINITY,
    }
}
