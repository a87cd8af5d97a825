//! Closed-form and semi-analytic references: the decoupled dimer, the
//! weak-field EP curve, the Hermitian block spectrum and the waveguide force.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::lattice::C64;

/// Floquet multipliers `(e^{i Lambda}, e^{-i Lambda})` of the `J = 0` chain,
/// `Lambda = pi sqrt(1/4 - (beta/omega)^2)`.
pub fn dimer_multipliers(beta: f64, omega: f64) -> Result<(C64, C64)> {
    if !(omega > 0.0 && beta >= 0.0 && omega.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("need omega > 0, beta >= 0; got omega={omega}, beta={beta}")));
    }
    let ratio = beta / omega;
    let lambda = C64::new(0.25 - ratio * ratio, 0.0).sqrt() * PI;
    let i = C64::new(0.0, 1.0);
    Ok(((i * lambda).exp(), (-i * lambda).exp()))
}

// 15-point Kronrod extension of the 7-point Gauss rule
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One G7-K15 panel: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let pair = f(centre - half * x) + f(centre + half * x);
        kronrod += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    ((kronrod * half), ((kronrod - gauss) * half).norm())
}

/// Adaptive Gauss-Kronrod quadrature of a complex integrand to relative error `rel_tol`.
pub fn integrate_adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<C64> {
    const MAX_PANELS: usize = 20_000;
    let mut panels = vec![(a, b, gk15(&f, a, b))];
    loop {
        let total: C64 = panels.iter().map(|p| p.2 .0).sum();
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= rel_tol * total.norm().max(f64::MIN_POSITIVE) || err < 1e-15 {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!("no convergence after {MAX_PANELS} panels (error {err:e})")));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .expect("at least one panel");
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        panels.push((lo, mid, gk15(&f, lo, mid)));
        panels.push((mid, hi, gk15(&f, mid, hi)));
    }
}

/// Integrand of the dynamical-phase integral, principal square root.
pub fn d_integrand(j: f64, beta: f64, theta: f64) -> C64 {
    C64::new(j * j - beta * beta, 2.0 * beta * j * theta.cos()).sqrt()
}

/// `d = int_0^pi sqrt(J^2 - beta^2 + 2 i beta J cos(theta)) d theta`.
///
/// The map `theta -> pi - theta` conjugates the integrand, so the integral is
/// real; a residual imaginary part above `1e-10 |d|` is reported as an error.
pub fn d_integral(j: f64, beta: f64) -> Result<f64> {
    if !(j > 0.0 && j.is_finite() && beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("need J > 0, beta >= 0; got J={j}, beta={beta}")));
    }
    let f = |t: f64| d_integrand(j, beta, t);
    // split at pi/2, where the integrand crosses the branch cut when beta > J
    let value = integrate_adaptive(f, 0.0, 0.5 * PI, 1e-13)? + integrate_adaptive(f, 0.5 * PI, PI, 1e-13)?;
    if value.im.abs() >= 1e-10 * value.norm() {
        return Err(Error::Quadrature(format!("imaginary residue {:e} in d = {}", value.im, value)));
    }
    Ok(value.re)
}

/// A point on the weak-field EP curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpCurvePoint {
    pub n: u32,
    pub omega: f64,
    pub d_value: f64,
}

/// Weak-field EP curve `omega_n = d / (4 n pi + 2 pi)`, `n = 0..=n_max`, descending in omega.
pub fn ep_curve(j: f64, beta: f64, n_max: u32) -> Result<Vec<EpCurvePoint>> {
    let d = d_integral(j, beta)?;
    Ok((0..=n_max)
        .map(|n| EpCurvePoint { n, omega: d / (4.0 * n as f64 * PI + 2.0 * PI), d_value: d })
        .collect())
}

/// `omega_n = d / ((2n + 1) pi)`: the slopes where the adiabatic phase condition
/// with `E = 2 n omega` and a Berry phase of `-pi/2` is met. These sit at the
/// centres of the PT-broken bands of the exact Floquet trace.
pub fn ep_band_centres(j: f64, beta: f64, n_max: u32) -> Result<Vec<EpCurvePoint>> {
    let d = d_integral(j, beta)?;
    Ok((0..=n_max)
        .map(|n| EpCurvePoint { n, omega: d / ((2.0 * n as f64 + 1.0) * PI), d_value: d })
        .collect())
}

/// Eigenvalues `(lower, upper)` of the decoupled `beta = 0` blocks on sites
/// `(2l, 2l+1)`, one pair per cell index `l`.
pub fn hermitian_dimer_spectrum(j: f64, omega: f64, cells: RangeInclusive<i64>) -> Result<Vec<(f64, f64)>> {
    if !(j > 0.0 && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("need J > 0, omega > 0; got J={j}, omega={omega}")));
    }
    Ok(cells
        .map(|l| {
            let a = omega * (2.0 * l as f64 + 0.5);
            let d = omega * (2.0 * l as f64 + 1.5);
            let mean = 0.5 * (a + d);
            let radius = (0.25 * (a - d) * (a - d) + j * j).sqrt();
            (mean - radius, mean + radius)
        })
        .collect())
}

/// Inertial force on waveguide `l`, `F_l = ln(0.002 l + 12.6) / (0.002 l)`.
pub fn waveguide_force_profile(l: i64) -> Result<f64> {
    if l <= 0 {
        return Err(Error::Domain { site: l, argument: 0.002 * l as f64 });
    }
    let x = 0.002 * l as f64;
    Ok((x + 12.6).ln() / x)
}

/// `1 / (d(F_l l)/dl)` at `l0 + delta_n` minus the same at `l0`, by central differences.
pub fn waveguide_force_shift(l0: i64, delta_n: i64) -> Result<f64> {
    let inverse_slope = |l: i64| -> Result<f64> {
        let h = 1i64;
        let up = waveguide_force_profile(l + h)? * (l + h) as f64;
        let down = waveguide_force_profile(l - h)? * (l - h) as f64;
        Ok(2.0 * h as f64 / (up - down))
    };
    Ok(inverse_slope(l0 + delta_n)? - inverse_slope(l0)?)
}
