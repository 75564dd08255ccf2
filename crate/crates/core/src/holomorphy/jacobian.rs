//! Real Jacobians on the real shadow `R^{2^r n} -> R^{2^r p}`.
//!
//! Real-shadow coordinates are coordinate-major: index `k 2^r + p` is the
//! `i_p` coefficient of coordinate `k`.

use nalgebra::DMatrix;

use super::derivative::doubled;
use super::phrase::PhraseMap;
use crate::error::Result;
use crate::linear::CdVector;

/// Central-difference Jacobian of an arbitrary map at `z`.
pub fn real_jacobian<F>(map: F, z: &CdVector<f64>, step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&CdVector<f64>) -> Result<CdVector<f64>>,
{
    let level = z.level();
    let base = z.to_real();
    let cols = base.len();
    let mut columns = Vec::with_capacity(cols);
    let mut probe = base.clone();
    for q in 0..cols {
        probe[q] = base[q] + step;
        let plus = map(&CdVector::from_real(level, &probe)?)?.to_real();
        probe[q] = base[q] - step;
        let minus = map(&CdVector::from_real(level, &probe)?)?.to_real();
        probe[q] = base[q];
        columns.push(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * step)).collect::<Vec<_>>());
    }
    let rows = columns.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, cols, |i, j| columns[j][i]))
}

/// Jacobian of a phrase map assembled from its Leibniz derivative along
/// each real basis direction.
pub fn phrase_jacobian(map: &PhraseMap<f64>, z: &CdVector<f64>) -> Result<DMatrix<f64>> {
    derivative_jacobian(&map.derivative(), z)
}

/// [`phrase_jacobian`] for an already differentiated map `d = map.derivative()`.
pub fn derivative_jacobian(d: &PhraseMap<f64>, z: &CdVector<f64>) -> Result<DMatrix<f64>> {
    let level = z.level();
    let cols = z.real_dim();
    let rows = d.output_dim() << level;
    let mut jac = DMatrix::zeros(rows, cols);
    let mut e = vec![0.0; cols];
    for q in 0..cols {
        e[q] = 1.0;
        let h = CdVector::from_real(level, &e)?;
        let col = d.eval(&doubled(z, &h)?)?.to_real();
        e[q] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            jac[(i, q)] = v;
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CdElement;
    use crate::holomorphy::Phrase;
    use crate::sampling::{random_vector, rng_for};

    #[test]
    fn identity_map() {
        let mut rng = rng_for(1, &[]);
        let z = random_vector(2, 2, &mut rng);
        let j = real_jacobian(|x| Ok(x.clone()), &z, 1e-5).unwrap();
        assert!((j - DMatrix::<f64>::identity(8, 8)).abs().max() < 1e-9);
    }

    #[test]
    fn left_i1_is_a_signed_permutation() {
        let i1 = CdElement::<f64>::generator(2, 1);
        let z = CdVector::zeros(2, 1);
        let j = real_jacobian(|x| x.left_mul(&i1), &z, 1e-5).unwrap();
        // columns read off the quaternion table: i1*1 = i1, i1*i1 = -1, i1*i2 = i3, i1*i3 = -i2
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            0.0, -1.0, 0.0,  0.0,
            1.0,  0.0, 0.0,  0.0,
            0.0,  0.0, 0.0, -1.0,
            0.0,  0.0, 1.0,  0.0,
        ]);
        assert!((j - want).abs().max() < 1e-9);
    }

    #[test]
    fn phrase_and_finite_difference_jacobians_agree() {
        let mut rng = rng_for(2, &[]);
        for level in [2, 3] {
            let p0 = Phrase::mul(Phrase::var(0), Phrase::conj(Phrase::var(1)));
            let p1 = Phrase::inv(Phrase::add(Phrase::var(0), Phrase::real(level, 3.0)));
            let map = PhraseMap::new(2, level, vec![p0, p1]).unwrap();
            let z = random_vector(level, 2, &mut rng).scale(0.5);
            let a = phrase_jacobian(&map, &z).unwrap();
            let b = real_jacobian(|x| map.eval(x), &z, 1e-5).unwrap();
            assert!((a - b).abs().max() < 1e-6);
        }
    }
}
