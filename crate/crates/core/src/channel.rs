//! Rayleigh fading channels and the null-space transmit beamformers /
//! receive combiners built from them.
//!
//! Convention: a channel *row* g (1 x N) hits a beamformer u (N x 1) as the
//! plain bilinear product g.u; nulling g therefore means u is orthogonal to
//! conj(g) under the Hermitian inner product. A combiner t applies as t^* to
//! column channels, so canceling a column c means t is orthogonal to c.
//! With entries i.i.d. CN(0,1) (unit total variance), |h|^2 is exponential
//! with mean one and the squared norm of a projection onto a j-dimensional
//! subspace is Gamma(j, 1).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CVec = Vec<Complex64>;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> CMat {
        CMat { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[CVec]) -> CMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = CMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> CVec {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// M * v for a column vector v of length `cols`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<CVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, vector has length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.iter())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// M^H * v for a column vector v of length `rows`.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Result<CVec> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, adjoint applied to length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::ZERO; self.cols];
        for i in 0..self.rows {
            let vi = v[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o += self[(i, j)].conj() * vi;
            }
        }
        Ok(out)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Hermitian inner product sum conj(a_i) b_i.
#[inline]
pub fn dot_h(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Bilinear row-times-column product sum a_i b_i (no conjugation), as in the
/// SIR gain terms g.u.
#[inline]
pub fn dot_row(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// One i.i.d. CN(0,1) draw: real and imaginary parts each N(0, 1/2).
#[inline]
pub fn draw_cn<R: Rng>(rng: &mut R) -> Complex64 {
    const SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * SCALE, im * SCALE)
}

/// Matrix with i.i.d. CN(0,1) entries.
pub fn draw_gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Result<CMat> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter(format!(
            "gaussian matrix needs positive dimensions, got {rows}x{cols}"
        )));
    }
    let mut m = CMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = draw_cn(rng);
        }
    }
    Ok(m)
}

pub fn draw_gaussian_vector<R: Rng>(len: usize, rng: &mut R) -> CVec {
    (0..len).map(|_| draw_cn(rng)).collect()
}

/// Orthonormal basis of the orthogonal complement of `j` constraint rows,
/// together with the rows themselves (kept for residual checks downstream).
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// n x (n - j), orthonormal columns; every constraint row times every
    /// column is zero to working precision.
    pub basis: CMat,
    pub constraints: Vec<CVec>,
}

impl NullSpace {
    pub fn dim(&self) -> usize {
        self.basis.cols
    }
}

/// Null space of `j` stacked 1 x n row channels: the columns q of the result
/// satisfy row . q = 0 for every constraint row.
///
/// Computed by Householder QR of the n x j matrix whose columns are the
/// conjugated rows; the trailing n - j columns of the accumulated unitary Q
/// span the complement.
pub fn null_space_basis(n: usize, constraint_rows: &[CVec]) -> Result<NullSpace> {
    let j = constraint_rows.len();
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if j >= n && j > 0 {
        return Err(Error::DegreesOfFreedom(format!(
            "{j} nulling constraints leave no signaling dimension out of {n}"
        )));
    }
    for row in constraint_rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint row has length {}, expected {n}",
                row.len()
            )));
        }
    }
    if j == 0 {
        return Ok(NullSpace { basis: CMat::identity(n), constraints: Vec::new() });
    }

    // W[:, i] = conj(row_i)^T
    let mut w = CMat::zeros(n, j);
    let mut max_col_norm = 0.0f64;
    for (i, row) in constraint_rows.iter().enumerate() {
        for (r, z) in row.iter().enumerate() {
            w[(r, i)] = z.conj();
        }
        max_col_norm = max_col_norm.max(norm_sq(row).sqrt());
    }

    let mut q = CMat::identity(n);
    for col in 0..j {
        // Householder vector for W[col.., col]
        let m = n - col;
        let mut v: CVec = (0..m).map(|r| w[(col + r, col)]).collect();
        let xnorm = norm_sq(&v).sqrt();
        if xnorm <= 1e-14 * max_col_norm.max(1.0) {
            return Err(Error::IllConditioned(format!(
                "constraint rows are numerically rank deficient at column {col}"
            )));
        }
        let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { Complex64::ONE };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vn = norm_sq(&v).sqrt();
        if vn > 0.0 {
            for z in v.iter_mut() {
                *z /= vn;
            }
            // W[col.., col..] <- (I - 2 v v^H) W[col.., col..]
            for c in col..j {
                let mut s = Complex64::ZERO;
                for r in 0..m {
                    s += v[r].conj() * w[(col + r, c)];
                }
                s *= 2.0;
                for r in 0..m {
                    let delta = v[r] * s;
                    w[(col + r, c)] -= delta;
                }
            }
            // Q <- Q (I - 2 v v^H), acting on columns col..
            for r in 0..n {
                let mut s = Complex64::ZERO;
                for k in 0..m {
                    s += q[(r, col + k)] * v[k];
                }
                s *= 2.0;
                for k in 0..m {
                    let delta = s * v[k].conj();
                    q[(r, col + k)] -= delta;
                }
            }
        }
        // Rank check on the produced diagonal of R.
        if w[(col, col)].norm() <= 1e-10 * max_col_norm {
            return Err(Error::IllConditioned(format!(
                "constraint rows are numerically rank deficient at column {col}"
            )));
        }
    }

    let mut basis = CMat::zeros(n, n - j);
    for r in 0..n {
        for c in 0..(n - j) {
            basis[(r, c)] = q[(r, j + c)];
        }
    }
    Ok(NullSpace { basis, constraints: constraint_rows.to_vec() })
}

/// Null space for a receive combiner that must cancel the given M x 1
/// effective column channels: t^* c = 0, i.e. the complement of span{c_i}.
/// Equivalent to [`null_space_basis`] on the conjugated columns as rows.
pub fn cancelation_null_space(m_dim: usize, canceled_channels: &[CVec]) -> Result<NullSpace> {
    let rows: Vec<CVec> = canceled_channels
        .iter()
        .map(|c| c.iter().map(|z| z.conj()).collect())
        .collect();
    null_space_basis(m_dim, &rows)
}

/// Unit-norm transmit beamformer: the normalized projection of the
/// conjugated own channel onto the null space.
#[derive(Debug, Clone)]
pub struct Beamformer {
    pub vector: CVec,
    pub nulled_targets: Vec<CVec>,
    /// |q.u|^2 achieved on the own channel.
    pub signal_gain: f64,
}

impl Beamformer {
    /// Largest |g.u| over the nulled target rows.
    pub fn max_residual(&self) -> f64 {
        self.nulled_targets
            .iter()
            .map(|g| dot_row(g, &self.vector).norm())
            .fold(0.0, f64::max)
    }
}

/// Beamformer for `own_channel` (1 x N) constrained to the given null space.
/// The achieved gain |q.u|^2 equals the squared norm of the projection of
/// conj(q) onto the space.
pub fn transmit_beamformer(own_channel: &[Complex64], null_space: &NullSpace) -> Result<Beamformer> {
    let n = null_space.basis.rows;
    if own_channel.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "own channel has length {}, basis lives in dimension {n}",
            own_channel.len()
        )));
    }
    if null_space.dim() == 0 {
        return Err(Error::DegreesOfFreedom("empty null space basis".into()));
    }
    let target: CVec = own_channel.iter().map(|z| z.conj()).collect();
    // coords = basis^H conj(q); projection = basis * coords
    let coords = null_space.basis.adjoint_mul_vec(&target)?;
    let gain = norm_sq(&coords);
    if gain < 1e-30 {
        return Err(Error::DegenerateChannel(
            "own channel projects to zero inside the null space".into(),
        ));
    }
    let mut vector = null_space.basis.mul_vec(&coords)?;
    let scale = gain.sqrt().recip();
    for z in vector.iter_mut() {
        *z *= scale;
    }
    Ok(Beamformer { vector, nulled_targets: null_space.constraints.clone(), signal_gain: gain })
}

/// Unit-norm receive combiner restricted to the null space of the canceled
/// channels, maximizing |t^* s|^2 for the effective signal s.
#[derive(Debug, Clone)]
pub struct Combiner {
    pub vector: CVec,
    pub canceled_channels: Vec<CVec>,
    /// |t^* s|^2 achieved on the effective signal.
    pub signal_gain: f64,
}

impl Combiner {
    /// Largest |t^* c| over the canceled column channels.
    pub fn max_residual(&self) -> f64 {
        self.canceled_channels
            .iter()
            .map(|c| dot_h(&self.vector, c).norm())
            .fold(0.0, f64::max)
    }
}

/// Combiner for the effective signal (M x 1, typically Q00 u0) constrained
/// to a cancelation null space built by [`cancelation_null_space`].
pub fn receive_combiner(effective_signal: &[Complex64], null_space: &NullSpace) -> Result<Combiner> {
    let m = null_space.basis.rows;
    if effective_signal.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "effective signal has length {}, basis lives in dimension {m}",
            effective_signal.len()
        )));
    }
    if null_space.dim() == 0 {
        return Err(Error::DegreesOfFreedom("empty cancelation basis".into()));
    }
    // t = normalized projection of s: maximizes |t^H s| within the space.
    let coords = null_space.basis.adjoint_mul_vec(effective_signal)?;
    let gain = norm_sq(&coords);
    if gain < 1e-30 {
        return Err(Error::DegenerateChannel(
            "effective signal projects to zero inside the cancelation space".into(),
        ));
    }
    let mut vector = null_space.basis.mul_vec(&coords)?;
    let scale = gain.sqrt().recip();
    for z in vector.iter_mut() {
        *z *= scale;
    }
    let canceled_channels = null_space
        .constraints
        .iter()
        .map(|row| row.iter().map(|z| z.conj()).collect())
        .collect();
    Ok(Combiner { vector, canceled_channels, signal_gain: gain })
}

/// Squared magnitude of left^* . channel . right, with `None` standing for
/// the unit scalar on a 1-dimensional side.
pub fn effective_gain(
    left: Option<&[Complex64]>,
    channel: &CMat,
    right: Option<&[Complex64]>,
) -> Result<f64> {
    let after_right: CVec = match right {
        Some(r) => channel.mul_vec(r)?,
        None => {
            if channel.cols != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "channel has {} columns but no right vector was given",
                    channel.cols
                )));
            }
            channel.col(0)
        }
    };
    let scalar = match left {
        Some(l) => {
            if l.len() != after_right.len() {
                return Err(Error::DimensionMismatch(format!(
                    "left vector has length {}, channel output has length {}",
                    l.len(),
                    after_right.len()
                )));
            }
            dot_h(l, &after_right)
        }
        None => {
            if after_right.len() != 1 {
                return Err(Error::DimensionMismatch(format!(
                    "channel output has length {} but no left vector was given",
                    after_right.len()
                )));
            }
            after_right[0]
        }
    };
    Ok(scalar.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{exp1_cdf, gamma_unit_scale_cdf, ks_one_sample};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn gaussian_entries_have_unit_power() {
        let mut r = rng(1);
        let n = 100_000;
        let mean: f64 =
            (0..n).map(|_| draw_cn(&mut r).norm_sqr()).sum::<f64>() / n as f64;
        // E|h|^2 = 1, Var|h|^2 = 1 => se of mean = 1/sqrt(n)
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "mean power {mean}");
    }

    #[test]
    fn gaussian_power_is_exponential() {
        let mut r = rng(2);
        let samples: Vec<f64> = (0..10_000).map(|_| draw_cn(&mut r).norm_sqr()).collect();
        let rep = ks_one_sample(&samples, exp1_cdf);
        assert!(rep.p_value > 0.01, "KS p {}", rep.p_value);
    }

    #[test]
    fn fixed_seed_reproduces_matrix_bitwise() {
        let a = draw_gaussian_matrix(4, 3, &mut rng(77)).unwrap();
        let b = draw_gaussian_matrix(4, 3, &mut rng(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn null_space_with_no_constraints_is_unitary() {
        let ns = null_space_basis(5, &[]).unwrap();
        assert_eq!(ns.basis.rows, 5);
        assert_eq!(ns.basis.cols, 5);
        assert_gram_identity(&ns.basis, 1e-12);
    }

    #[test]
    fn null_space_of_e1_spans_e2() {
        let g = vec![Complex64::ONE, Complex64::ZERO];
        let ns = null_space_basis(2, &[g.clone()]).unwrap();
        assert_eq!(ns.basis.cols, 1);
        let col = ns.basis.col(0);
        assert!(dot_row(&g, &col).norm() < 1e-10);
        assert!((norm_sq(&col) - 1.0).abs() < 1e-12);
        assert!(col[1].norm() > 1.0 - 1e-10);
    }

    fn assert_gram_identity(m: &CMat, tol: f64) {
        for a in 0..m.cols {
            for b in 0..m.cols {
                let g = dot_h(&m.col(a), &m.col(b));
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (g - Complex64::new(want, 0.0)).norm() < tol,
                    "gram[{a}][{b}] = {g}"
                );
            }
        }
    }

    #[test]
    fn random_null_space_is_orthonormal_and_annihilates() {
        let mut r = rng(5);
        let n = 8;
        let j = 5;
        let rows: Vec<CVec> = (0..j).map(|_| draw_gaussian_vector(n, &mut r)).collect();
        let ns = null_space_basis(n, &rows).unwrap();
        assert_eq!(ns.basis.rows, 8);
        assert_eq!(ns.basis.cols, 3);
        assert_gram_identity(&ns.basis, 1e-10);
        for row in &rows {
            for c in 0..ns.basis.cols {
                assert!(dot_row(row, &ns.basis.col(c)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn null_space_rejects_too_many_constraints() {
        let mut r = rng(6);
        let rows: Vec<CVec> = (0..4).map(|_| draw_gaussian_vector(4, &mut r)).collect();
        assert!(matches!(null_space_basis(4, &rows), Err(Error::DegreesOfFreedom(_))));
    }

    #[test]
    fn null_space_rejects_rank_deficiency() {
        let mut r = rng(7);
        let row = draw_gaussian_vector(4, &mut r);
        let dup = row.clone();
        assert!(matches!(
            null_space_basis(4, &[row, dup]),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn beamformer_without_constraints_is_matched_filter() {
        let mut r = rng(8);
        let q = draw_gaussian_vector(4, &mut r);
        let ns = null_space_basis(4, &[]).unwrap();
        let bf = transmit_beamformer(&q, &ns).unwrap();
        assert!((bf.signal_gain - norm_sq(&q)).abs() < 1e-10);
        assert!((norm_sq(&bf.vector) - 1.0).abs() < 1e-12);
        let gain = dot_row(&q, &bf.vector).norm_sqr();
        assert!((gain - norm_sq(&q)).abs() < 1e-10);
    }

    #[test]
    fn beamformer_degenerate_projection_errors() {
        // N=2, nulling (1, 0): null space spans e2; own channel along e1*
        // projects to zero.
        let g = vec![Complex64::ONE, Complex64::ZERO];
        let ns = null_space_basis(2, &[g]).unwrap();
        let q = vec![Complex64::new(0.3, -0.4), Complex64::ZERO];
        assert!(matches!(
            transmit_beamformer(&q, &ns),
            Err(Error::DegenerateChannel(_))
        ));
    }

    #[test]
    fn beamformer_gain_distribution_is_gamma_n_minus_k() {
        // N=4, k=2 => Gamma(2, 1)
        let mut r = rng(9);
        let mut samples = Vec::with_capacity(10_000);
        for _ in 0..10_000 {
            let rows: Vec<CVec> = (0..2).map(|_| draw_gaussian_vector(4, &mut r)).collect();
            let ns = null_space_basis(4, &rows).unwrap();
            let q = draw_gaussian_vector(4, &mut r);
            let bf = transmit_beamformer(&q, &ns).unwrap();
            assert!((norm_sq(&bf.vector) - 1.0).abs() < 1e-12);
            assert!(bf.max_residual() < 1e-8);
            samples.push(bf.signal_gain);
        }
        let rep = ks_one_sample(&samples, |x| gamma_unit_scale_cdf(2.0, x));
        assert!(rep.p_value > 0.01, "KS p {}", rep.p_value);
    }

    #[test]
    fn combiner_without_cancelation_is_mrc() {
        let mut r = rng(10);
        let s = draw_gaussian_vector(4, &mut r);
        let ns = cancelation_null_space(4, &[]).unwrap();
        let cb = receive_combiner(&s, &ns).unwrap();
        assert!((cb.signal_gain - norm_sq(&s)).abs() < 1e-10);
        assert!((dot_h(&cb.vector, &s).norm_sqr() - norm_sq(&s)).abs() < 1e-10);
    }

    #[test]
    fn combiner_gain_distribution_is_gamma_m_minus_m() {
        // M=4, m=2 => Gamma(2, 1); canceled channels annihilated.
        let mut r = rng(11);
        let mut samples = Vec::with_capacity(10_000);
        for _ in 0..10_000 {
            let canceled: Vec<CVec> = (0..2).map(|_| draw_gaussian_vector(4, &mut r)).collect();
            let ns = cancelation_null_space(4, &canceled).unwrap();
            let s = draw_gaussian_vector(4, &mut r);
            let cb = receive_combiner(&s, &ns).unwrap();
            assert!((norm_sq(&cb.vector) - 1.0).abs() < 1e-12);
            assert!(cb.max_residual() < 1e-8, "residual {}", cb.max_residual());
            samples.push(cb.signal_gain);
        }
        let rep = ks_one_sample(&samples, |x| gamma_unit_scale_cdf(2.0, x));
        assert!(rep.p_value > 0.01, "KS p {}", rep.p_value);
    }

    #[test]
    fn cross_gains_are_exponential() {
        // |g.u|^2 and |t^* f|^2 with independent endpoints ~ Exp(1).
        let mut r = rng(12);
        let mut tx_gains = Vec::with_capacity(10_000);
        let mut rx_gains = Vec::with_capacity(10_000);
        for _ in 0..10_000 {
            let rows: Vec<CVec> = (0..2).map(|_| draw_gaussian_vector(4, &mut r)).collect();
            let ns = null_space_basis(4, &rows).unwrap();
            let q = draw_gaussian_vector(4, &mut r);
            let u = transmit_beamformer(&q, &ns).unwrap();
            let g = draw_gaussian_vector(4, &mut r);
            tx_gains.push(dot_row(&g, &u.vector).norm_sqr());

            let canceled: Vec<CVec> = (0..2).map(|_| draw_gaussian_vector(4, &mut r)).collect();
            let cns = cancelation_null_space(4, &canceled).unwrap();
            let s = draw_gaussian_vector(4, &mut r);
            let t = receive_combiner(&s, &cns).unwrap();
            let f = draw_gaussian_vector(4, &mut r);
            rx_gains.push(dot_h(&t.vector, &f).norm_sqr());
        }
        assert!(ks_one_sample(&tx_gains, exp1_cdf).p_value > 0.01);
        assert!(ks_one_sample(&rx_gains, exp1_cdf).p_value > 0.01);
    }

    #[test]
    fn effective_gain_identity_scalar() {
        let one = CMat::from_rows(&[vec![Complex64::ONE]]);
        assert!((effective_gain(None, &one, None).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn effective_gain_full_chain_matches_manual() {
        let mut r = rng(13);
        let q = draw_gaussian_matrix(3, 4, &mut r).unwrap();
        let u = draw_gaussian_vector(4, &mut r);
        let t = draw_gaussian_vector(3, &mut r);
        let manual = dot_h(&t, &q.mul_vec(&u).unwrap()).norm_sqr();
        let got = effective_gain(Some(&t), &q, Some(&u)).unwrap();
        assert!((got - manual).abs() < 1e-12 * manual.max(1.0));
    }

    #[test]
    fn effective_gain_dimension_mismatch() {
        let m = CMat::zeros(2, 3);
        assert!(effective_gain(None, &m, None).is_err());
        let v = vec![Complex64::ONE; 2];
        assert!(effective_gain(None, &m, Some(&v)).is_err());
    }

    #[test]
    fn projection_is_optimal_in_null_space() {
        let mut r = rng(14);
        for _ in 0..1_000 {
            let rows: Vec<CVec> = (0..3).map(|_| draw_gaussian_vector(6, &mut r)).collect();
            let ns = null_space_basis(6, &rows).unwrap();
            let q = draw_gaussian_vector(6, &mut r);
            let bf = transmit_beamformer(&q, &ns).unwrap();
            let best = dot_row(&q, &bf.vector).norm_sqr();
            for _ in 0..100 {
                let coef = draw_gaussian_vector(ns.dim(), &mut r);
                let mut v = ns.basis.mul_vec(&coef).unwrap();
                let s = norm_sq(&v).sqrt().recip();
                for z in v.iter_mut() {
                    *z *= s;
                }
                let other = dot_row(&q, &v).norm_sqr();
                assert!(best >= other - 1e-10, "best {best} < other {other}");
            }
        }
    }
}
