//! Truncated Fock-space states of one and two bosonic modes.
//!
//! Amplitudes are stored densely. Expectation values of the number and
//! ladder operators are evaluated by index-shifted sums over the amplitude
//! buffer; no operator matrix is ever materialized.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

fn normalize<T: Real>(amps: &mut [Complex<T>]) -> Result<()> {
    let norm = amps
        .iter()
        .map(|a| a.norm_sqr())
        .fold(T::zero(), |s, x| s + x)
        .sqrt();
    if norm == T::zero() || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let inv = T::one() / norm;
    for a in amps.iter_mut() {
        *a *= inv;
    }
    Ok(())
}

/// Pure state of one bosonic mode over occupations `0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> FockState<T> {
    /// Normalizes `amplitudes` and wraps them; the cutoff is `len - 1`.
    pub fn new(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroNorm);
        }
        normalize(&mut amplitudes)?;
        Ok(Self { amplitudes })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::number(0, cutoff)
    }

    /// Number state `|n⟩`; the cutoff is raised to `n` if needed.
    pub fn number(n: usize, cutoff: usize) -> Self {
        let mut amplitudes = vec![czero(); cutoff.max(n) + 1];
        amplitudes[n] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex<T> {
        self.amplitudes.get(n).copied().unwrap_or_else(czero)
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |s, a| s + a.norm_sqr())
    }

    /// Photon-number distribution `P(n) = |⟨n|ψ⟩|²`.
    pub fn distribution(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Returns a copy padded with zero amplitudes up to `cutoff`.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(cutoff.max(self.cutoff()) + 1, czero());
        Self { amplitudes }
    }
}

/// Pure state of two bosonic modes with amplitudes indexed by `(n₀, n₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState<T> {
    cutoffs: (usize, usize),
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> TwoModeState<T> {
    /// Normalizes a row-major buffer (`n₀` slow, `n₁` fast).
    pub fn new(cutoffs: (usize, usize), mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let expected = (cutoffs.0 + 1) * (cutoffs.1 + 1);
        if amplitudes.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        normalize(&mut amplitudes)?;
        Ok(Self {
            cutoffs,
            amplitudes,
        })
    }

    /// Wraps an already-normalized buffer produced by a unitary map.
    pub(crate) fn from_unitary_output(
        cutoffs: (usize, usize),
        amplitudes: Vec<Complex<T>>,
    ) -> Self {
        debug_assert_eq!(amplitudes.len(), (cutoffs.0 + 1) * (cutoffs.1 + 1));
        Self {
            cutoffs,
            amplitudes,
        }
    }

    pub fn vacuum(cutoffs: (usize, usize)) -> Self {
        Self::basis(0, 0, cutoffs)
    }

    /// Joint number state `|n₀, n₁⟩`; cutoffs are raised to fit.
    pub fn basis(n0: usize, n1: usize, cutoffs: (usize, usize)) -> Self {
        let cutoffs = (cutoffs.0.max(n0), cutoffs.1.max(n1));
        let mut amplitudes = vec![czero(); (cutoffs.0 + 1) * (cutoffs.1 + 1)];
        amplitudes[n0 * (cutoffs.1 + 1) + n1] = Complex::new(T::one(), T::zero());
        Self {
            cutoffs,
            amplitudes,
        }
    }

    /// Product state `|a⟩ ⊗ |b⟩`.
    pub fn tensor(a: &FockState<T>, b: &FockState<T>) -> Self {
        let amplitudes = a
            .amplitudes
            .iter()
            .flat_map(|&x| b.amplitudes.iter().map(move |&y| x * y))
            .collect();
        Self {
            cutoffs: (a.cutoff(), b.cutoff()),
            amplitudes,
        }
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        self.cutoffs
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    #[inline]
    fn index(&self, n0: usize, n1: usize) -> usize {
        n0 * (self.cutoffs.1 + 1) + n1
    }

    /// Amplitude of `|n₀, n₁⟩`; zero outside the stored range.
    pub fn amplitude(&self, n0: usize, n1: usize) -> Complex<T> {
        if n0 > self.cutoffs.0 || n1 > self.cutoffs.1 {
            czero()
        } else {
            self.amplitudes[self.index(n0, n1)]
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |s, a| s + a.norm_sqr())
    }

    /// Iterates `((n₀, n₁), amplitude)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Complex<T>)> + '_ {
        let stride = self.cutoffs.1 + 1;
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, &a)| ((i / stride, i % stride), a))
    }

    /// Multiplies every amplitude by `f(n₀, n₁)`. The caller guarantees the
    /// factors are unimodular.
    pub(crate) fn map_diagonal<F>(&self, f: F) -> Self
    where
        F: Fn(usize, usize) -> Complex<T>,
    {
        let amplitudes = self.iter().map(|((n0, n1), a)| a * f(n0, n1)).collect();
        Self {
            cutoffs: self.cutoffs,
            amplitudes,
        }
    }

    /// Marginal photon-number distribution of one mode.
    pub fn marginal(&self, mode: usize) -> Result<Vec<T>> {
        let len = self.mode_cutoff(mode)? + 1;
        let mut p = vec![T::zero(); len];
        for ((n0, n1), a) in self.iter() {
            p[if mode == 0 { n0 } else { n1 }] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Distribution of the total photon number `n₀ + n₁`.
    pub fn total_number_distribution(&self) -> Vec<T> {
        let mut p = vec![T::zero(); self.cutoffs.0 + self.cutoffs.1 + 1];
        for ((n0, n1), a) in self.iter() {
            p[n0 + n1] += a.norm_sqr();
        }
        p
    }

    /// Largest `n₀ + n₁` carrying a nonzero amplitude.
    pub fn max_occupied_total(&self) -> usize {
        self.iter()
            .filter(|(_, a)| a.re != T::zero() || a.im != T::zero())
            .map(|((n0, n1), _)| n0 + n1)
            .max()
            .unwrap_or(0)
    }

    fn mode_cutoff(&self, mode: usize) -> Result<usize> {
        match mode {
            0 => Ok(self.cutoffs.0),
            1 => Ok(self.cutoffs.1),
            _ => Err(Error::InvalidMode(mode)),
        }
    }

    /// `Σ conj(ψ(n)) · w(n) · ψ(n + shift)` along `mode`, other mode summed.
    fn shifted_sum<W>(&self, mode: usize, shift: usize, weight: W) -> Result<Complex<T>>
    where
        W: Fn(usize) -> T,
    {
        let cutoff = self.mode_cutoff(mode)?;
        let mut acc = czero();
        for ((n0, n1), a) in self.iter() {
            let n = if mode == 0 { n0 } else { n1 };
            if n + shift > cutoff {
                continue;
            }
            let shifted = if mode == 0 {
                self.amplitudes[self.index(n0 + shift, n1)]
            } else {
                self.amplitudes[self.index(n0, n1 + shift)]
            };
            acc += a.conj() * shifted * weight(n);
        }
        Ok(acc)
    }

    /// `⟨n̂⟩` of `mode`.
    pub fn expect_number(&self, mode: usize) -> Result<T> {
        Ok(self.shifted_sum(mode, 0, T::from_count)?.re)
    }

    /// `⟨n̂²⟩` of `mode`.
    pub fn expect_number_sq(&self, mode: usize) -> Result<T> {
        Ok(self
            .shifted_sum(mode, 0, |n| {
                let n = T::from_count(n);
                n * n
            })?
            .re)
    }

    /// `Δ²n̂` of `mode`, clamped at zero against rounding.
    pub fn variance_number(&self, mode: usize) -> Result<T> {
        let m = self.expect_number(mode)?;
        Ok((self.expect_number_sq(mode)? - m * m).max(T::zero()))
    }

    /// `⟨b̂⟩` of `mode`.
    pub fn expect_lowering(&self, mode: usize) -> Result<Complex<T>> {
        self.shifted_sum(mode, 1, |n| T::from_count(n + 1).sqrt())
    }

    /// `⟨b̂²⟩` of `mode`; zero when the cutoff is below 2.
    pub fn expect_lowering_sq(&self, mode: usize) -> Result<Complex<T>> {
        self.shifted_sum(mode, 2, |n| {
            (T::from_count(n + 1) * T::from_count(n + 2)).sqrt()
        })
    }

    /// `⟨n̂b̂⟩` of `mode`.
    pub fn expect_number_lowering(&self, mode: usize) -> Result<Complex<T>> {
        self.shifted_sum(mode, 1, |n| T::from_count(n) * T::from_count(n + 1).sqrt())
    }

    /// `⟨a|b⟩`, conjugate-linear in `a`.
    pub fn inner(a: &Self, b: &Self) -> Result<Complex<T>> {
        if a.cutoffs != b.cutoffs {
            return Err(Error::CutoffMismatch {
                left: a.cutoffs,
                right: b.cutoffs,
            });
        }
        Ok(a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .fold(czero(), |acc, (x, y)| acc + x.conj() * y))
    }

    /// Component-wise `(a - b) / step`, used by the finite-difference oracles.
    pub(crate) fn difference_quotient(a: &Self, b: &Self, step: T) -> Result<Self> {
        if a.cutoffs != b.cutoffs {
            return Err(Error::CutoffMismatch {
                left: a.cutoffs,
                right: b.cutoffs,
            });
        }
        let amplitudes = a
            .amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y) / step)
            .collect();
        Ok(Self {
            cutoffs: a.cutoffs,
            amplitudes,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn plus() -> FockState<f64> {
        FockState::new(vec![c(1.0), c(1.0)]).unwrap()
    }

    #[test]
    fn vacuum_tensor_vacuum() {
        let s = TwoModeState::tensor(&FockState::<f64>::vacuum(0), &FockState::vacuum(0));
        assert_eq!(s.amplitude(0, 0), c(1.0));
        assert_eq!(s.amplitudes().len(), 1);
    }

    #[test]
    fn vacuum_tensor_superposition() {
        let s = TwoModeState::tensor(&FockState::vacuum(0), &plus());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0, 0) - c(h)).norm() < 1e-15);
        assert!((s.amplitude(0, 1) - c(h)).norm() < 1e-15);
        assert_eq!(s.amplitude(1, 0), c(0.0));
    }

    #[test]
    fn number_and_lowering_on_superposition() {
        let s = TwoModeState::tensor(&FockState::vacuum(0), &plus());
        assert!((s.expect_number(1).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.expect_number_sq(1).unwrap() - 0.5).abs() < 1e-15);
        assert!((s.expect_lowering(1).unwrap() - c(0.5)).norm() < 1e-15);
        assert_eq!(s.expect_number(0).unwrap(), 0.0);
        assert_eq!(s.expect_lowering_sq(1).unwrap(), c(0.0));
    }

    #[test]
    fn vacuum_moments_vanish() {
        let s = TwoModeState::<f64>::vacuum((3, 3));
        for mode in 0..2 {
            assert_eq!(s.expect_number(mode).unwrap(), 0.0);
            assert_eq!(s.expect_number_sq(mode).unwrap(), 0.0);
            assert_eq!(s.expect_lowering(mode).unwrap(), c(0.0));
            assert_eq!(s.expect_lowering_sq(mode).unwrap(), c(0.0));
            assert_eq!(s.expect_number_lowering(mode).unwrap(), c(0.0));
        }
    }

    #[test]
    fn number_state_has_no_coherence() {
        let s = TwoModeState::tensor(&FockState::vacuum(0), &FockState::<f64>::number(2, 4));
        assert_eq!(s.expect_lowering_sq(1).unwrap(), c(0.0));
        assert_eq!(s.expect_lowering(1).unwrap(), c(0.0));
        assert_eq!(s.expect_number(1).unwrap(), 2.0);
    }

    #[test]
    fn invalid_mode_is_rejected() {
        let s = TwoModeState::<f64>::vacuum((1, 1));
        assert_eq!(s.expect_number(2), Err(Error::InvalidMode(2)));
        assert!(s.expect_lowering(7).is_err());
        assert!(s.marginal(2).is_err());
    }

    #[test]
    fn inner_products() {
        let a = TwoModeState::<f64>::basis(0, 0, (1, 1));
        let b = TwoModeState::<f64>::basis(0, 1, (1, 1));
        assert_eq!(TwoModeState::inner(&a, &b).unwrap(), c(0.0));
        assert_eq!(TwoModeState::inner(&a, &a).unwrap(), c(1.0));
        let d = TwoModeState::<f64>::basis(0, 0, (2, 1));
        assert!(matches!(
            TwoModeState::inner(&a, &d),
            Err(Error::CutoffMismatch { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FockState::<f64>::new(vec![c(0.0); 3]), Err(Error::ZeroNorm));
        assert!(matches!(
            TwoModeState::<f64>::new((1, 1), vec![c(1.0); 3]),
            Err(Error::ShapeMismatch {
                expected: 4,
                got: 3
            })
        ));
    }

    #[test]
    fn marginals_and_total_distribution() {
        let s = TwoModeState::tensor(&plus(), &plus());
        let m0 = s.marginal(0).unwrap();
        assert!((m0[0] - 0.5).abs() < 1e-15 && (m0[1] - 0.5).abs() < 1e-15);
        let total = s.total_number_distribution();
        assert!((total[1] - 0.5).abs() < 1e-15);
        assert_eq!(s.max_occupied_total(), 2);
    }
}
