//! Mach–Zehnder optical train: two beam splitters around a phase stage.
//!
//! Port labels follow the usual layout: inputs 0/1 enter BS1, the arms are
//! modes 2 (upper) and 3 (lower), BS2 maps the arms onto outputs 4/5. After
//! each stage the two-mode state is re-indexed so that index 0 is always the
//! first port of the pair (0, 2 or 4) and index 1 the second (1, 3 or 5).
//!
//! Splitters use the convention τ real and non-negative, `r = i|r|`, so that
//! `b̂₂ = τ b̂₀ + r b̂₁` and `b̂₃ = r b̂₀ + τ b̂₁`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::TwoModeState;
use crate::scalar::{cplx, czero, Real};

/// Lossless beam splitter with real transmission `τ` and reflection `i|r|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitter<T> {
    tau: T,
    r_mag: T,
}

impl<T: Real> BeamSplitter<T> {
    /// From the transmission probability `τ² ∈ [0, 1]`.
    pub fn from_transmissivity(tau_sq: T) -> Result<Self> {
        if !(tau_sq >= T::zero() && tau_sq <= T::one()) {
            return Err(Error::InvalidTransmissivity(
                tau_sq.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self {
            tau: tau_sq.sqrt(),
            r_mag: (T::one() - tau_sq).sqrt(),
        })
    }

    /// From the transmission amplitude `τ ∈ [0, 1]`.
    pub fn from_amplitude(tau: T) -> Result<Self> {
        if !(tau >= T::zero() && tau <= T::one()) {
            return Err(Error::InvalidTransmissivity(
                tau.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self {
            tau,
            r_mag: (T::one() - tau * tau).max(T::zero()).sqrt(),
        })
    }

    pub fn identity() -> Self {
        Self {
            tau: T::one(),
            r_mag: T::zero(),
        }
    }

    pub fn balanced() -> Self {
        let h = T::FRAC_1_SQRT_2();
        Self { tau: h, r_mag: h }
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn r_mag(&self) -> T {
        self.r_mag
    }

    /// Complex reflection coefficient `i|r|`.
    pub fn r(&self) -> Complex<T> {
        cplx(T::zero(), self.r_mag)
    }

    pub fn tau_sq(&self) -> T {
        self.tau * self.tau
    }

    pub fn r_sq(&self) -> T {
        self.r_mag * self.r_mag
    }

    /// True when either coefficient vanishes (`τ ∈ {0, 1}`).
    pub fn is_degenerate(&self) -> bool {
        self.tau == T::zero() || self.r_mag == T::zero()
    }

    /// Matrix of the splitter on the `N`-photon sector in the basis
    /// `|k, N−k⟩`, `k = 0..=N`; entry `[m * (N+1) + k]` is `⟨m, N−m|U|k, N−k⟩`.
    ///
    /// Obtained by expanding `U b̂₀†ᵏ b̂₁†ᴺ⁻ᵏ U† = (τb̂₀† + r b̂₁†)ᵏ (r b̂₀† + τb̂₁†)ᴺ⁻ᵏ`.
    pub fn sector_matrix(&self, n: usize) -> Vec<Complex<T>> {
        let pascal = pascal_rows::<T>(n);
        let tau_pow = powers(self.tau, n);
        let r_pow = powers(self.r_mag, n);
        let dim = n + 1;
        let mut u = vec![czero(); dim * dim];
        for k in 0..=n {
            for m in 0..=n {
                let p_lo = m.saturating_sub(n - k);
                let p_hi = k.min(m);
                let mut acc = czero::<T>();
                for p in p_lo..=p_hi {
                    let q = m - p;
                    let coef = pascal[k][p] * pascal[n - k][q];
                    let t_exp = p + (n - k - q);
                    let r_exp = (k - p) + q;
                    acc += i_pow::<T>(r_exp) * (coef * tau_pow[t_exp] * r_pow[r_exp]);
                }
                let scale = (pascal[n][k] / pascal[n][m]).sqrt();
                u[m * dim + k] = acc * scale;
            }
        }
        u
    }
}

fn pascal_rows<T: Real>(n: usize) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![T::one(); i + 1];
        for k in 1..i {
            row[k] = rows[i - 1][k - 1] + rows[i - 1][k];
        }
        rows.push(row);
    }
    rows
}

fn powers<T: Real>(x: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = T::one();
    for _ in 0..=n {
        out.push(acc);
        acc *= x;
    }
    out
}

fn i_pow<T: Real>(e: usize) -> Complex<T> {
    match e % 4 {
        0 => cplx(T::one(), T::zero()),
        1 => cplx(T::zero(), T::one()),
        2 => cplx(-T::one(), T::zero()),
        _ => cplx(T::zero(), -T::one()),
    }
}

/// Applies a beam splitter to a two-mode state with equal cutoffs.
///
/// The splitter conserves the total photon number, so it acts block-wise on
/// the sectors `n₀ + n₁ = N`. The output cutoff grows to the largest occupied
/// `N` when that exceeds the input cutoff, which keeps the map exact.
pub fn apply_bs<T: Real>(state: &TwoModeState<T>, bs: &BeamSplitter<T>) -> Result<TwoModeState<T>> {
    let (c0, c1) = state.cutoffs();
    if c0 != c1 {
        return Err(Error::CutoffMismatch {
            left: (c0, c1),
            right: (c1, c0),
        });
    }
    let cin = c0;
    let n_max = state.max_occupied_total();
    let cout = cin.max(n_max);
    let stride = cout + 1;
    let mut out = vec![czero(); stride * stride];
    for n in 0..=n_max {
        let u = bs.sector_matrix(n);
        let dim = n + 1;
        let k_lo = n.saturating_sub(cin);
        let k_hi = n.min(cin);
        for m in 0..=n {
            let mut acc = czero();
            for k in k_lo..=k_hi {
                acc += u[m * dim + k] * state.amplitude(k, n - k);
            }
            out[m * stride + (n - m)] = acc;
        }
    }
    Ok(TwoModeState::from_unitary_output((cout, cout), out))
}

/// Phase placement inside the interferometer arms.
///
/// `phi1` acts on the lower arm (mode 3) and `phi2` on the upper arm
/// (mode 2); the phase difference seen by the detectors is `φ = φ₁ − φ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseConfig<T> {
    /// `e^{−iφ n̂₃}`
    SingleArm { phi: T },
    /// `±φ/2` split across the arms: `φ₁ = −φ₂ = φ/2`.
    Symmetric { phi: T },
    /// Two independent arm phases.
    TwoParam { phi1: T, phi2: T },
}

impl<T: Real> PhaseConfig<T> {
    /// Sum/difference coordinates of the two-parameter problem,
    /// `e^{−i(n̂₂−n̂₃)φ_d/2} e^{−i(n̂₂+n̂₃)φ_s/2}`.
    pub fn from_sum_difference(phi_s: T, phi_d: T) -> Self {
        let two = T::lit(2.0);
        PhaseConfig::TwoParam {
            phi1: (phi_s - phi_d) / two,
            phi2: (phi_s + phi_d) / two,
        }
    }

    /// `(upper, lower)` arm phases.
    pub fn arm_phases(&self) -> (T, T) {
        match *self {
            PhaseConfig::SingleArm { phi } => (T::zero(), phi),
            PhaseConfig::Symmetric { phi } => {
                let half = phi / T::lit(2.0);
                (-half, half)
            }
            PhaseConfig::TwoParam { phi1, phi2 } => (phi2, phi1),
        }
    }

    /// `φ = φ₁ − φ₂`.
    pub fn phase_difference(&self) -> T {
        let (upper, lower) = self.arm_phases();
        lower - upper
    }
}

/// Where the unknown phase sits: (a) one arm, (b) split symmetrically,
/// (c) two independent arm phases estimated jointly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    SingleArm,
    Symmetric,
    TwoParam,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::SingleArm, Scenario::Symmetric, Scenario::TwoParam];

    /// Phase stage realizing a phase difference `phi`; for `TwoParam` the
    /// whole difference is put on the lower arm (`φ₁ = φ`, `φ₂ = 0`).
    pub fn config<T: Real>(self, phi: T) -> PhaseConfig<T> {
        match self {
            Scenario::SingleArm => PhaseConfig::SingleArm { phi },
            Scenario::Symmetric => PhaseConfig::Symmetric { phi },
            Scenario::TwoParam => PhaseConfig::TwoParam {
                phi1: phi,
                phi2: T::zero(),
            },
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scenario::SingleArm => "a",
            Scenario::Symmetric => "b",
            Scenario::TwoParam => "c",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "a" | "i" => Ok(Scenario::SingleArm),
            "b" | "ii" => Ok(Scenario::Symmetric),
            "c" => Ok(Scenario::TwoParam),
            other => Err(format!("unknown scenario '{other}' (expected a, b or c)")),
        }
    }
}

/// Multiplies `|n₂, n₃⟩` by `e^{−i(φ_upper n₂ + φ_lower n₃)}`.
pub fn apply_phase<T: Real>(state: &TwoModeState<T>, cfg: &PhaseConfig<T>) -> TwoModeState<T> {
    let (upper, lower) = cfg.arm_phases();
    state.map_diagonal(|n0, n1| {
        let angle = upper * T::from_count(n0) + lower * T::from_count(n1);
        Complex::from_polar(T::one(), -angle)
    })
}

/// BS1, then the phase stage, then BS2 when present.
pub fn propagate<T: Real>(
    input: &TwoModeState<T>,
    bs1: &BeamSplitter<T>,
    cfg: &PhaseConfig<T>,
    bs2: Option<&BeamSplitter<T>>,
) -> Result<TwoModeState<T>> {
    let arms = apply_phase(&apply_bs(input, bs1)?, cfg);
    match bs2 {
        Some(bs) => apply_bs(&arms, bs),
        None => Ok(arms),
    }
}
