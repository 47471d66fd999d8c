//! Symmetric-matrix numerics: tolerance-classified eigenvalue summaries,
//! nullspace bases and corank-jump search along one-parameter families.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

/// Relative factor of the default tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Initial uniform samples of [`corank_jump`].
pub const JUMP_SAMPLES: usize = 1024;

/// Bracket width at which bisection in [`corank_jump`] stops.
pub const JUMP_RESOLUTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("matrix has a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
}

/// Dense symmetric matrix. Symmetry is exact: every write updates both
/// triangles.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, SpectraError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SpectraError::NotSquare);
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(SpectraError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { n: self.n, data }
    }

    /// `(1 - t) * a + t * b`.
    pub fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        assert_eq!(a.n, b.n);
        let data = a.data.iter().zip(&b.data).map(|(x, y)| (1.0 - t) * x + t * y).collect();
        Self { n: a.n, data }
    }

    /// `P m P^T` where row `i` of the result is row `perm[i]` of `m`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn check_finite(&self) -> Result<(), SpectraError> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(k) => Err(SpectraError::NonFinite(k / self.n, k % self.n)),
            None => Ok(()),
        }
    }
}

/// Anything that can be viewed as a symmetric matrix.
pub trait SymmetricSource {
    fn symmetric(&self) -> &SymmetricMatrix;
}

impl SymmetricSource for SymmetricMatrix {
    fn symmetric(&self) -> &SymmetricMatrix {
        self
    }
}

/// `tol = rel * max(1, ‖m‖_∞) * n`.
pub fn default_tol(m: &SymmetricMatrix) -> f64 {
    Tolerance::Relative(DEFAULT_REL_TOL).resolve(m)
}

/// Zero threshold for eigenvalues, either fixed or scaled per matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// `rel * max(1, ‖m‖_∞) * n`
    Relative(f64),
}

impl Tolerance {
    pub fn resolve(&self, m: &SymmetricMatrix) -> f64 {
        match *self {
            Tolerance::Absolute(t) => t,
            Tolerance::Relative(rel) => rel * m.norm_inf().max(1.0) * m.n() as f64,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Relative(DEFAULT_REL_TOL)
    }
}

impl From<f64> for Tolerance {
    fn from(t: f64) -> Self {
        Tolerance::Absolute(t)
    }
}

/// Ascending eigenvalues with their signature at a tolerance, plus the
/// orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSummary {
    pub eigenvalues: Vec<f64>,
    pub tol: f64,
    pub n_negative: usize,
    pub corank: usize,
    pub n_positive: usize,
    vectors: Vec<Vec<f64>>,
}

impl EigenSummary {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Unit eigenvector of the `k`-th smallest eigenvalue.
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    /// Eigenvector of the smallest eigenvalue when it is the only negative
    /// one, signed so that its entries sum to a positive number. For a
    /// well-signed matrix on a connected graph every entry is positive.
    pub fn perron_vector(&self) -> Option<Vec<f64>> {
        if self.n_negative != 1 {
            return None;
        }
        let v = &self.vectors[0];
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        Some(v.iter().map(|x| sign * x).collect())
    }

    /// Orthonormal basis of the eigenspace of eigenvalues within `tol` of 0.
    pub fn kernel(&self) -> Vec<Vec<f64>> {
        (self.n_negative..self.n_negative + self.corank).map(|k| self.vectors[k].clone()).collect()
    }
}

pub fn eigen_summary(m: &SymmetricMatrix, tol: impl Into<Tolerance>) -> Result<EigenSummary, SpectraError> {
    m.check_finite()?;
    let tol = tol.into().resolve(m);
    let n = m.n();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &m.data));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    let n_negative = eigenvalues.iter().filter(|&&l| l < -tol).count();
    let n_positive = eigenvalues.iter().filter(|&&l| l > tol).count();
    Ok(EigenSummary { corank: n - n_negative - n_positive, eigenvalues, tol, n_negative, n_positive, vectors })
}

/// Orthonormal rows spanning the eigenspace of eigenvalues with `|λ| <= tol`.
pub fn nullspace_basis(m: &SymmetricMatrix, tol: impl Into<Tolerance>) -> Result<Vec<Vec<f64>>, SpectraError> {
    Ok(eigen_summary(m, tol)?.kernel())
}

/// Largest absolute entry of `U m` for the rows `u`.
pub fn kernel_residual(m: &SymmetricMatrix, u: &[Vec<f64>]) -> f64 {
    u.iter()
        .map(|row| m.mul_vec(row).iter().fold(0.0, |a: f64, x| a.max(x.abs())))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JumpError<E> {
    #[error("family evaluation failed at t = {t}: {source}")]
    Evaluator { t: f64, source: E },
    #[error("family at t = 0 has corank {found}, expected {expected}")]
    BaseCorank { expected: usize, found: usize },
    #[error(transparent)]
    Spectra(SpectraError),
    #[error("signature changes in [{0}, {1}] but no matrix of higher corank was resolved")]
    Unresolved(f64, f64),
}

/// A located corank jump.
#[derive(Clone, Debug)]
pub struct Jump<M> {
    pub t: f64,
    pub matrix: M,
    pub summary: EigenSummary,
    /// Final bisection bracket; its width is the resolution of `t`.
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

struct Sample<M> {
    t: f64,
    m: M,
    s: EigenSummary,
    h: f64,
}

/// Smallest `t` in `(0, 1]` at which the family reaches corank `d + 1`.
///
/// The family must have corank `d` at `t = 0`; with `n0` negative eigenvalues
/// there, the tracked quantity is the sum of eigenvalues `n0..=n0+d` (0-based),
/// which moves only with the eigenvalue leaving or entering the kernel
/// cluster. A uniform scan brackets the first signature change and bisection
/// narrows it to [`JUMP_RESOLUTION`].
pub fn corank_jump<M, E, F>(family: F, d: usize, tol: impl Into<Tolerance>) -> Result<Option<Jump<M>>, JumpError<E>>
where
    M: SymmetricSource,
    F: Fn(f64) -> Result<M, E>,
{
    let tol = tol.into();
    let mut evaluations = 0usize;
    let mut eval = |t: f64| -> Result<(M, EigenSummary), JumpError<E>> {
        evaluations += 1;
        let m = family(t).map_err(|source| JumpError::Evaluator { t, source })?;
        let s = eigen_summary(m.symmetric(), tol).map_err(JumpError::Spectra)?;
        Ok((m, s))
    };
    let (_, s0) = eval(0.0)?;
    if s0.corank != d {
        return Err(JumpError::BaseCorank { expected: d, found: s0.corank });
    }
    let n0 = s0.n_negative;
    if n0 + d >= s0.n() {
        return Ok(None);
    }
    let track = |s: &EigenSummary| s.eigenvalues[n0..=n0 + d].iter().sum::<f64>();
    let crossed = |s: &EigenSummary, h: f64| h <= 0.0 || s.n_negative != n0;
    let good = |s: &EigenSummary| s.corank > d && s.n_negative == n0;

    let mut prev_t = 0.0;
    // samples inside the tolerance band that have not crossed yet
    let mut touch: Option<(f64, Sample<M>)> = None;
    for k in 1..=JUMP_SAMPLES {
        let t = k as f64 / JUMP_SAMPLES as f64;
        let (m, s) = eval(t)?;
        let h = track(&s);
        if crossed(&s, h) {
            let (mut lo, mut hi) = (prev_t, t);
            let mut above: Option<Sample<M>> = touch.take().map(|(_, b)| b);
            let mut below = Sample { t, m, s, h };
            while hi - lo > JUMP_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                let (m, s) = eval(mid)?;
                let h = track(&s);
                if crossed(&s, h) {
                    hi = mid;
                    below = Sample { t: mid, m, s, h };
                } else {
                    lo = mid;
                    above = Some(Sample { t: mid, m, s, h });
                }
            }
            let best = match above {
                Some(a) if good(&a.s) && (!good(&below.s) || a.h.abs() <= below.h.abs()) => a,
                _ => below,
            };
            if !good(&best.s) {
                return Err(JumpError::Unresolved(lo, hi));
            }
            return Ok(Some(Jump { t: best.t, matrix: best.m, summary: best.s, bracket: (lo, hi), evaluations }));
        }
        if s.corank > d {
            match &mut touch {
                None => touch = Some((prev_t, Sample { t, m, s, h })),
                Some((_, best)) if h < best.h => *best = Sample { t, m, s, h },
                _ => {}
            }
        } else if touch.is_some() {
            break;
        }
        prev_t = t;
    }
    match touch {
        Some((lo, best)) => {
            // the eigenvalue entered the band and left it without crossing
            let hi = (prev_t + 1.0 / JUMP_SAMPLES as f64).min(1.0);
            let best = refine_touch(&mut eval, &track, lo, hi, best)?;
            if !good(&best.s) {
                return Err(JumpError::Unresolved(lo, hi));
            }
            Ok(Some(Jump { t: best.t, matrix: best.m, summary: best.s, bracket: (lo, hi), evaluations }))
        }
        None => Ok(None),
    }
}

fn refine_touch<M, E>(
    eval: &mut impl FnMut(f64) -> Result<(M, EigenSummary), JumpError<E>>,
    track: &impl Fn(&EigenSummary) -> f64,
    mut lo: f64,
    mut hi: f64,
    mut best: Sample<M>,
) -> Result<Sample<M>, JumpError<E>> {
    // ternary search for the minimum of the tracked eigenvalue
    for _ in 0..60 {
        if hi - lo <= JUMP_RESOLUTION {
            break;
        }
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        let (ma, sa) = eval(a)?;
        let (mb, sb) = eval(b)?;
        let (ha, hb) = (track(&sa), track(&sb));
        if ha <= hb {
            hi = b;
            if ha < best.h {
                best = Sample { t: a, m: ma, s: sa, h: ha };
            }
        } else {
            lo = a;
            if hb < best.h {
                best = Sample { t: b, m: mb, s: sb, h: hb };
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::convert::Infallible;

    fn minus_j(n: usize) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(n, |_, _| -1.0)
    }

    #[test]
    fn signatures_of_small_matrices() {
        let s = eigen_summary(&minus_j(3), 1e-9).unwrap();
        assert!((s.eigenvalues[0] + 3.0).abs() < 1e-12);
        assert_eq!((s.n_negative, s.corank, s.n_positive), (1, 2, 0));

        let s = eigen_summary(&SymmetricMatrix::identity(3), 1e-9).unwrap();
        assert_eq!((s.n_negative, s.corank, s.n_positive), (0, 0, 3));

        let s = eigen_summary(&SymmetricMatrix::diagonal(&[-1.0, 0.0, 2.0]), 1e-9).unwrap();
        assert_eq!((s.n_negative, s.corank, s.n_positive), (1, 1, 1));
        assert_eq!(s.eigenvalues, vec![-1.0, 0.0, 2.0]);
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let m = SymmetricMatrix::diagonal(&[1.0, f64::NAN]);
        assert_eq!(eigen_summary(&m, 1e-9).unwrap_err(), SpectraError::NonFinite(1, 1));
    }

    #[test]
    fn default_tolerance_scales_with_norm() {
        let m = SymmetricMatrix::diagonal(&[-4.0, 0.0, 2.0]);
        assert!((default_tol(&m) - 1e-9 * 4.0 * 3.0).abs() < 1e-24);
        let small = SymmetricMatrix::diagonal(&[0.5, 0.0]);
        assert!((default_tol(&small) - 2e-9).abs() < 1e-24);
    }

    #[test]
    fn nullspace_of_minus_j3() {
        let m = minus_j(3);
        let u = nullspace_basis(&m, 1e-9).unwrap();
        assert_eq!(u.len(), 2);
        for row in &u {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
            assert!((row.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let dot: f64 = u[0].iter().zip(&u[1]).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
        assert!(kernel_residual(&m, &u) < 1e-12);

        assert!(nullspace_basis(&SymmetricMatrix::identity(3), 1e-9).unwrap().is_empty());
        let e = nullspace_basis(&SymmetricMatrix::diagonal(&[0.0, 1.0, 1.0]), 1e-9).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0][0].abs() - 1.0).abs() < 1e-15);
    }

    fn jump_of(f: impl Fn(f64) -> SymmetricMatrix, d: usize) -> Option<Jump<SymmetricMatrix>> {
        corank_jump(|t| Ok::<_, Infallible>(f(t)), d, 1e-9).unwrap()
    }

    #[test]
    fn linear_root() {
        let j = jump_of(|t| SymmetricMatrix::diagonal(&[-1.0, 1.0 - 2.0 * t, 1.0]), 0).unwrap();
        assert!((j.t - 0.5).abs() < 1e-11, "{}", j.t);
        assert!(j.bracket.1 - j.bracket.0 <= 1e-12);
        assert_eq!(j.summary.corank, 1);
        assert_eq!(j.summary.n_negative, 1);
    }

    #[test]
    fn constant_family_has_no_jump() {
        assert!(jump_of(|_| SymmetricMatrix::identity(3), 0).is_none());
    }

    #[test]
    fn smaller_of_two_roots() {
        let j = jump_of(|t| SymmetricMatrix::diagonal(&[-1.0, (t - 0.3) * (t - 0.7), 1.0]), 0).unwrap();
        assert!((j.t - 0.3).abs() < 1e-9, "{}", j.t);
    }

    #[test]
    fn jump_over_a_persistent_kernel() {
        // one kernel direction stays, a second eigenvalue crosses at 0.25
        let j = jump_of(|t| SymmetricMatrix::diagonal(&[-2.0, 0.0, 1.0 - 4.0 * t, 3.0]), 1).unwrap();
        assert!((j.t - 0.25).abs() < 1e-11);
        assert_eq!(j.summary.corank, 2);
    }

    #[test]
    fn tangential_touch_is_found() {
        // eigenvalue touches 0 at a sample point and comes back
        let j = jump_of(|t| SymmetricMatrix::diagonal(&[-1.0, (t - 0.375) * (t - 0.375), 1.0]), 0).unwrap();
        assert!((j.t - 0.375).abs() < 1e-6, "{}", j.t);
        assert_eq!(j.summary.corank, 1);
    }

    #[test]
    fn base_corank_is_checked() {
        let r = corank_jump(|_| Ok::<_, Infallible>(SymmetricMatrix::zeros(2)), 0, 1e-9);
        assert!(matches!(r, Err(JumpError::BaseCorank { expected: 0, found: 2 })));
    }

    #[test]
    fn evaluator_errors_propagate() {
        let r = corank_jump(
            |t| if t > 0.5 { Err("boom") } else { Ok(SymmetricMatrix::identity(2)) },
            0,
            1e-9,
        );
        assert!(matches!(r, Err(JumpError::Evaluator { .. })));
    }

    fn sym_strategy() -> impl Strategy<Value = SymmetricMatrix> {
        (1usize..7).prop_flat_map(|n| {
            proptest::collection::vec(-3.0f64..3.0, n * n).prop_map(move |v| {
                SymmetricMatrix::from_fn(n, |i, j| v[i * n + j])
            })
        })
    }

    proptest! {
        #[test]
        fn permutation_invariance(m in sym_strategy(), seed in any::<u64>()) {
            let n = m.n();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let tol = default_tol(&m);
            let a = eigen_summary(&m, tol).unwrap();
            let b = eigen_summary(&m.permuted(&perm), tol).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }

        #[test]
        fn scaling_keeps_signature(m in sym_strategy(), c in 0.01f64..100.0) {
            let tol = default_tol(&m);
            let a = eigen_summary(&m, tol).unwrap();
            let b = eigen_summary(&m.scaled(c), c * tol).unwrap();
            // counts agree unless an eigenvalue sits on the threshold
            let near = a.eigenvalues.iter().any(|l| (l.abs() - tol).abs() < 1e-9 * tol.max(1.0));
            if !near {
                prop_assert_eq!((a.n_negative, a.corank, a.n_positive), (b.n_negative, b.corank, b.n_positive));
            }
        }

        #[test]
        fn nullspace_residual_within_tol(m in sym_strategy(), k in 0usize..3) {
            // force some kernel by projecting out k directions
            let n = m.n();
            let mut rows = m.rows();
            for r in rows.iter_mut().take(k.min(n)) {
                r.iter_mut().for_each(|x| *x = 0.0);
            }
            for (i, r) in rows.iter_mut().enumerate() {
                for (j, x) in r.iter_mut().enumerate() {
                    if j < k.min(n) && i != j { *x = 0.0; }
                }
            }
            let m = SymmetricMatrix::from_fn(n, |i, j| rows[i][j]);
            let tol = default_tol(&m);
            let u = nullspace_basis(&m, tol).unwrap();
            prop_assert!(kernel_residual(&m, &u) <= tol * m.norm_inf().max(1.0));
        }

        #[test]
        fn affine_jumps_are_singular(d0 in -2.0f64..-0.1, slope in 0.5f64..5.0, x in 0.05f64..0.95) {
            // third eigenvalue crosses zero at t = x
            let base = SymmetricMatrix::diagonal(&[d0, 0.0, slope * x, 1.0]);
            let delta = SymmetricMatrix::diagonal(&[0.0, 0.0, -slope, 0.0]);
            let j = corank_jump(|t| Ok::<_, Infallible>(base.add(&delta.scaled(t))), 1, Tolerance::default())
                .unwrap()
                .unwrap();
            prop_assert!(j.summary.corank >= 2);
            let again = eigen_summary(&j.matrix, Tolerance::default()).unwrap();
            prop_assert!(again.corank >= 2);
            prop_assert!((j.t - x).abs() < 1e-6);
        }
    }
}
