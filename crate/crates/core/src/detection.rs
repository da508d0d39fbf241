//! Phase sensitivity of the three detection schemes.
//!
//! Every scheme measures an observable `D̂` on the output modes 4/5 and is
//! scored by error propagation, `Δφ = ΔD̂ / |∂⟨D̂⟩/∂φ|`:
//!
//! * SMI: photocurrent of port 4, `D̂ = n̂₄`;
//! * DI: difference current, `D̂ = n̂₄ − n̂₅`;
//! * BH: homodyne quadrature of port 4 against a local oscillator of phase
//!   `φ_L`, `D̂ = Ŷ = (e^{−iφ_L} b̂₄ + e^{iφ_L} b̂₄†)/2`.
//!
//! The closed forms assume vacuum in input port 0. Under that assumption
//! the mode-0 coherence terms of the general SMI/DI expressions vanish, so
//! the specialized forms with `|sinφ·⟨n̂₁⟩|` denominators are exact.
//! [`sensitivity_oracle`] evaluates the same ratio on the propagated state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::TwoModeState;
use crate::interferometer::{propagate, BeamSplitter, PhaseConfig, Scenario};
use crate::qfi::QfiReport;
use crate::scalar::{cplx, Real};
use crate::states::{input_moments, InputMoments, Su2CoherentParams};

/// Points of the uniform scan in [`optimize_phase`].
pub const SCAN_POINTS: usize = 10_000;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Smi,
    Di,
    Bh,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Smi, Scheme::Di, Scheme::Bh];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Smi => "smi",
            Scheme::Di => "di",
            Scheme::Bh => "bh",
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "smi" => Ok(Scheme::Smi),
            "di" => Ok(Scheme::Di),
            "bh" => Ok(Scheme::Bh),
            other => Err(format!("unknown scheme '{other}' (expected smi, di or bh)")),
        }
    }
}

/// A phase sensitivity, or the divergent sentinel at zeros of the signal
/// slope. `Divergent` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Sensitivity<T> {
    Finite(T),
    Divergent,
}

impl<T: Real> Sensitivity<T> {
    /// `spread / |slope|`, divergent when `|slope|` is at or below the
    /// relative noise floor of `slope_bound` (the slope's magnitude scale).
    pub fn from_ratio(spread: T, slope: T, slope_bound: T) -> Self {
        let floor = T::divergence_eps() * slope_bound.abs();
        if slope_bound.is_nan()
            || slope_bound <= T::zero()
            || slope.is_nan()
            || slope.abs() <= floor
        {
            return Sensitivity::Divergent;
        }
        let value = spread.max(T::zero()).sqrt() / slope.abs();
        if value.is_finite() {
            Sensitivity::Finite(value)
        } else {
            Sensitivity::Divergent
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Sensitivity::Divergent)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Sensitivity::Finite(v) => Some(v),
            Sensitivity::Divergent => None,
        }
    }

    /// The value, with `+∞` for the sentinel.
    pub fn value(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }
}

impl<T: Real> fmt::Display for Sensitivity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sensitivity::Finite(v) => fmt::Display::fmt(v, f),
            Sensitivity::Divergent => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint<T> {
    pub phi: T,
    pub delta_phi: Sensitivity<T>,
    pub scheme: Scheme,
    pub scenario: Scenario,
}

/// `A₀, A₁, A₀₁` of the port-4 photocurrent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmiCoeffs<T> {
    pub a0: T,
    pub a1: T,
    pub a01: Complex<T>,
}

/// `A_d, C_d` of the difference current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiCoeffs<T> {
    pub ad: T,
    pub cd: Complex<T>,
}

/// `K₀, K₁` of the homodyne quadrature: `e^{−iφ_L} b̂₄ / 2 = K₀ b̂₀ + K₁ b̂₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BhCoeffs<T> {
    pub k0: Complex<T>,
    pub k1: Complex<T>,
    pub phi_l: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeCoeffs<T> {
    Smi(SmiCoeffs<T>),
    Di(DiCoeffs<T>),
    Bh(BhCoeffs<T>),
}

/// `|ττ′rr′|`
fn four_amplitude<T: Real>(bs1: &BeamSplitter<T>, bs2: &BeamSplitter<T>) -> T {
    bs1.tau() * bs1.r_mag() * bs2.tau() * bs2.r_mag()
}

pub fn coeffs_smi<T: Real>(bs1: &BeamSplitter<T>, bs2: &BeamSplitter<T>, phi: T) -> SmiCoeffs<T> {
    let two = T::lit(2.0);
    let t = four_amplitude(bs1, bs2);
    let (c, s) = (phi.cos(), phi.sin());
    let a0 = bs1.tau_sq() * bs2.tau_sq() + bs1.r_sq() * bs2.r_sq() - two * t * c;
    let a1 = bs1.tau_sq() * bs2.r_sq() + bs2.tau_sq() * bs1.r_sq() + two * t * c;
    let a01 = bs1.r() * bs1.tau() * (two * bs2.tau_sq() - T::one())
        + bs2.r()
            * bs2.tau()
            * (cplx(bs1.tau_sq() * c, -bs1.tau_sq() * s) - cplx(bs1.r_sq() * c, bs1.r_sq() * s));
    SmiCoeffs { a0, a1, a01 }
}

pub fn coeffs_di<T: Real>(bs1: &BeamSplitter<T>, bs2: &BeamSplitter<T>, phi: T) -> DiCoeffs<T> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let tr = bs1.tau() * bs1.r_mag();
    let tr2 = bs2.tau() * bs2.r_mag();
    let (c, s) = (phi.cos(), phi.sin());
    let cross = bs1.tau() * bs2.r_mag() + bs1.r_mag() * bs2.tau();
    let ad = T::one() - two * cross * cross + four * tr * tr2 * (T::one() - c);
    let cd = cplx(
        two * tr2 * s,
        two * (tr * (T::one() - two * bs2.tau_sq()) + (T::one() - two * bs1.tau_sq()) * tr2 * c),
    );
    let norm = ad * ad + cd.norm_sqr();
    debug_assert!(
        (norm - T::one()).abs() <= T::lit(1e-9).max(T::epsilon() * T::lit(64.0)),
        "difference-current coefficients lost normalization: {norm}"
    );
    DiCoeffs { ad, cd }
}

/// Amplitudes `(α, β)` of `b̂₄ = α b̂₀ + β b̂₁` for the given arm phases.
fn port4_amplitudes<T: Real>(
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    cfg: &PhaseConfig<T>,
) -> (Complex<T>, Complex<T>) {
    let (upper, lower) = cfg.arm_phases();
    let e_up = Complex::from_polar(T::one(), -upper);
    let e_lo = Complex::from_polar(T::one(), -lower);
    let alpha = e_up * bs2.tau() * bs1.tau() + e_lo * bs2.r() * bs1.r();
    let beta = e_up * bs2.tau() * bs1.r() + e_lo * bs2.r() * bs1.tau();
    (alpha, beta)
}

/// `∂β/∂φ` and a bound on `|∂β/∂φ|` over all phases.
fn port4_slope<T: Real>(
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    scenario: Scenario,
    phi: T,
) -> (Complex<T>, T) {
    let (rate_up, rate_lo) = arm_rates::<T>(scenario);
    let (upper, lower) = scenario.config(phi).arm_phases();
    let minus_i = cplx(T::zero(), -T::one());
    let up = Complex::from_polar(T::one(), -upper) * bs2.tau() * bs1.r() * rate_up;
    let lo = Complex::from_polar(T::one(), -lower) * bs2.r() * bs1.tau() * rate_lo;
    let bound = bs2.tau() * bs1.r_mag() * rate_up.abs() + bs2.r_mag() * bs1.tau() * rate_lo.abs();
    (minus_i * (up + lo), bound)
}

/// `(dφ_upper/dφ, dφ_lower/dφ)` along a scenario's phase path.
fn arm_rates<T: Real>(scenario: Scenario) -> (T, T) {
    match scenario {
        Scenario::SingleArm | Scenario::TwoParam => (T::zero(), T::one()),
        Scenario::Symmetric => {
            let half = T::lit(0.5);
            (-half, half)
        }
    }
}

pub fn coeffs_bh<T: Real>(
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    cfg: &PhaseConfig<T>,
    phi_l: T,
) -> BhCoeffs<T> {
    let (alpha, beta) = port4_amplitudes(bs1, bs2, cfg);
    let lo = Complex::from_polar(T::lit(0.5), -phi_l);
    BhCoeffs {
        k0: lo * alpha,
        k1: lo * beta,
        phi_l,
    }
}

pub fn smi_from_moments<T: Real>(
    m: &InputMoments<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi: T,
) -> Sensitivity<T> {
    let k = coeffs_smi(bs1, bs2, phi);
    let spread = k.a1 * k.a1 * m.var_n + k.a01.norm_sqr() * m.mean_n;
    let scale = T::lit(2.0) * four_amplitude(bs1, bs2) * m.mean_n;
    Sensitivity::from_ratio(spread, scale * phi.sin(), scale)
}

pub fn di_from_moments<T: Real>(
    m: &InputMoments<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi: T,
) -> Sensitivity<T> {
    let k = coeffs_di(bs1, bs2, phi);
    let spread = k.ad * k.ad * m.var_n + k.cd.norm_sqr() * m.mean_n;
    let scale = T::lit(4.0) * four_amplitude(bs1, bs2) * m.mean_n;
    Sensitivity::from_ratio(spread, scale * phi.sin(), scale)
}

/// Homodyne sensitivity with the local-oscillator phase held at `phi_l`
/// while `φ` varies.
///
/// `Δ²Ŷ = ¼ + 2Re{K₁²Δ²b̂₁} + 2|K₁|²(⟨n̂₁⟩ − |ν|²)` and
/// `∂⟨Ŷ⟩/∂φ = Re{e^{−iφ_L} (∂β/∂φ) ν}`.
pub fn bh_from_moments<T: Real>(
    m: &InputMoments<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    scenario: Scenario,
    phi: T,
    phi_l: T,
) -> Sensitivity<T> {
    let two = T::lit(2.0);
    let k = coeffs_bh(bs1, bs2, &scenario.config(phi), phi_l);
    let spread = T::lit(0.25)
        + two * (k.k1 * k.k1 * m.lowering_variance()).re
        + two * k.k1.norm_sqr() * m.incoherent_number();
    let (dbeta, bound) = port4_slope(bs1, bs2, scenario, phi);
    let slope = (Complex::from_polar(T::one(), -phi_l) * dbeta * m.nu).re;
    Sensitivity::from_ratio(spread, slope, bound * m.nu.norm())
}

pub fn sensitivity_smi<T: Real>(
    p: &Su2CoherentParams<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi: T,
) -> SensitivityPoint<T> {
    SensitivityPoint {
        phi,
        delta_phi: smi_from_moments(&input_moments(p), bs1, bs2, phi),
        scheme: Scheme::Smi,
        scenario: Scenario::SingleArm,
    }
}

/// Same value for the single-arm and symmetric placements.
pub fn sensitivity_di<T: Real>(
    p: &Su2CoherentParams<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi: T,
) -> SensitivityPoint<T> {
    SensitivityPoint {
        phi,
        delta_phi: di_from_moments(&input_moments(p), bs1, bs2, phi),
        scheme: Scheme::Di,
        scenario: Scenario::SingleArm,
    }
}

pub fn sensitivity_bh<T: Real>(
    p: &Su2CoherentParams<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi: T,
    phi_l: T,
    scenario: Scenario,
) -> SensitivityPoint<T> {
    SensitivityPoint {
        phi,
        delta_phi: bh_from_moments(&input_moments(p), bs1, bs2, scenario, phi, phi_l),
        scheme: Scheme::Bh,
        scenario,
    }
}

/// Closed-form sensitivity of any scheme. `phi_l = None` puts the local
/// oscillator at `φ_L = φ` (still held fixed in the derivative).
pub fn sensitivity<T: Real>(
    scheme: Scheme,
    scenario: Scenario,
    m: &InputMoments<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi: T,
    phi_l: Option<T>,
) -> Sensitivity<T> {
    match scheme {
        Scheme::Smi => smi_from_moments(m, bs1, bs2, phi),
        Scheme::Di => di_from_moments(m, bs1, bs2, phi),
        Scheme::Bh => bh_from_moments(m, bs1, bs2, scenario, phi, phi_l.unwrap_or(phi)),
    }
}

/// Quantum Cramér–Rao bound a scheme is compared against: the two-parameter
/// bound for the intensity schemes (no phase reference), the scenario's own
/// bound for homodyne.
pub fn matching_qcrb<T: Real>(report: &QfiReport<T>, scheme: Scheme, scenario: Scenario) -> T {
    match (scheme, scenario) {
        (Scheme::Bh, Scenario::SingleArm) => report.qcrb_a,
        (Scheme::Bh, Scenario::Symmetric) => report.qcrb_b,
        _ => report.qcrb_c,
    }
}

/// Observable measured on the output modes by [`sensitivity_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable<T> {
    N4,
    Nd,
    Y { phi_l: T },
}

impl<T: Real> Observable<T> {
    pub fn for_scheme(scheme: Scheme, phi_l: T) -> Self {
        match scheme {
            Scheme::Smi => Observable::N4,
            Scheme::Di => Observable::Nd,
            Scheme::Bh => Observable::Y { phi_l },
        }
    }

    /// `(⟨D̂⟩, ⟨D̂²⟩)` on an output state.
    pub fn moments(&self, out: &TwoModeState<T>) -> Result<(T, T)> {
        match *self {
            Observable::N4 => Ok((out.expect_number(0)?, out.expect_number_sq(0)?)),
            Observable::Nd => {
                let mut mean = T::zero();
                let mut sq = T::zero();
                for ((n0, n1), a) in out.iter() {
                    let d = T::from_count(n0) - T::from_count(n1);
                    let p = a.norm_sqr();
                    mean += d * p;
                    sq += d * d * p;
                }
                Ok((mean, sq))
            }
            Observable::Y { phi_l } => {
                // ⟨b̂b̂†⟩ = ⟨n̂⟩ + 1 from the commutator, exact at any cutoff.
                let quarter = T::lit(0.25);
                let two = T::lit(2.0);
                let lo = Complex::from_polar(T::one(), -phi_l);
                let mean = (lo * out.expect_lowering(0)?).re;
                let sq = quarter
                    * (two * (lo * lo * out.expect_lowering_sq(0)?).re
                        + two * out.expect_number(0)?
                        + T::one());
                Ok((mean, sq))
            }
        }
    }
}

/// Error-propagation sensitivity computed on the propagated state:
/// variance at `φ` over a Richardson-extrapolated central difference of
/// `⟨D̂⟩`. The slope is divergent below the difference quotient's rounding
/// floor.
pub fn sensitivity_oracle<T: Real>(
    input: &TwoModeState<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    scenario: Scenario,
    observable: Observable<T>,
    phi: T,
    step: T,
) -> Result<Sensitivity<T>> {
    if !(step >= T::lit(1e-8) && step <= T::lit(1e-2)) {
        return Err(Error::StepOutOfRange(step.to_f64().unwrap_or(f64::NAN)));
    }
    let mean_at = |x: T| -> Result<T> {
        let out = propagate(input, bs1, &scenario.config(x), Some(bs2))?;
        Ok(observable.moments(&out)?.0)
    };
    let out = propagate(input, bs1, &scenario.config(phi), Some(bs2))?;
    let (mean, sq) = observable.moments(&out)?;
    let two = T::lit(2.0);
    let half = step / two;
    let coarse = (mean_at(phi + step)? - mean_at(phi - step)?) / (two * step);
    let fine = (mean_at(phi + half)? - mean_at(phi - half)?) / step;
    let slope = (T::lit(4.0) * fine - coarse) / T::lit(3.0);
    let floor_scale = (mean.abs() + sq.abs().sqrt() + T::one()) / step;
    Ok(Sensitivity::from_ratio(
        sq - mean * mean,
        slope,
        floor_scale,
    ))
}

/// Outcome of a phase optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseOptimum<T> {
    Found {
        phi: T,
        delta_phi: T,
    },
    /// Every scanned point diverged: the scheme sees no signal.
    NoSignal,
}

impl<T: Real> PhaseOptimum<T> {
    pub fn delta_phi(&self) -> Sensitivity<T> {
        match *self {
            PhaseOptimum::Found { delta_phi, .. } => Sensitivity::Finite(delta_phi),
            PhaseOptimum::NoSignal => Sensitivity::Divergent,
        }
    }
}

/// Minimizes a function of an angle over `(0, 2π)`: uniform scan of
/// `points` cell midpoints, then golden-section refinement of the
/// neighbourhood of the best cell. Ties go to the smallest angle.
pub fn minimize_angle<T, F>(f: F, points: usize) -> PhaseOptimum<T>
where
    T: Real,
    F: Fn(T) -> Sensitivity<T>,
{
    let points = points.max(3);
    let width = T::TAU() / T::from_count(points);
    let grid = |k: usize| (T::from_count(k) + T::lit(0.5)) * width;
    let mut best: Option<(usize, T)> = None;
    for k in 0..points {
        if let Sensitivity::Finite(v) = f(grid(k)) {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((k, v));
            }
        }
    }
    let Some((k, v)) = best else {
        return PhaseOptimum::NoSignal;
    };

    let golden = T::lit(0.5) * (T::lit(5.0).sqrt() - T::one());
    let mut lo = grid(k) - width;
    let mut hi = grid(k) + width;
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = f(x1).value();
    let mut f2 = f(x2).value();
    let tol = T::lit(REFINE_TOLERANCE).max(T::epsilon() * T::lit(16.0));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = f(x1).value();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = f(x2).value();
        }
    }
    let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if fx.is_finite() && fx < v {
        PhaseOptimum::Found {
            phi: x - (x / T::TAU()).floor() * T::TAU(),
            delta_phi: fx,
        }
    } else {
        PhaseOptimum::Found {
            phi: grid(k),
            delta_phi: v,
        }
    }
}

/// Optimal operating phase of a scheme. For homodyne the local oscillator
/// follows `φ_L = φ` unless `phi_l` pins it.
pub fn optimize_phase<T: Real>(
    scheme: Scheme,
    scenario: Scenario,
    p: &Su2CoherentParams<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    phi_l: Option<T>,
) -> PhaseOptimum<T> {
    let m = input_moments(p);
    minimize_angle(
        |phi| sensitivity(scheme, scenario, &m, bs1, bs2, phi, phi_l),
        SCAN_POINTS,
    )
}

/// Best homodyne sensitivity at fixed `phi` over the local-oscillator phase.
pub fn optimize_local_phase<T: Real>(
    m: &InputMoments<T>,
    bs1: &BeamSplitter<T>,
    bs2: &BeamSplitter<T>,
    scenario: Scenario,
    phi: T,
    points: usize,
) -> PhaseOptimum<T> {
    minimize_angle(
        |phi_l| bh_from_moments(m, bs1, bs2, scenario, phi, phi_l),
        points,
    )
}
