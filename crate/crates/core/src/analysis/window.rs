//! Compactly supported smooth windows with controlled derivatives.

use crate::error::{Error, Result};

/// Integral of `exp(1 - 1/(1 - t^2))` over `[-1, 1]`.
pub const BUMP_INTEGRAL: f64 = 1.206_900_322_437_876_2;

// Upper bounds for sup |W^(j)| / K^j, j = 1..3, measured on the unit-scale profiles
// (bump: 2.1704, 21.066, 506.69 before the factor 2^j; step: 2.0, 9.841, 110.57).
const BUMP_CONSTANTS: [f64; 3] = [4.5, 85.0, 4100.0];
const PLATEAU_CONSTANTS: [f64; 3] = [2.05, 10.0, 111.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowFamily {
    /// `exp(1 - 1/(1 - t^2))` after mapping the support onto `[-1, 1]`. Peak value 1.
    Bump,
    /// Equal to 1 on `[inner_lo, inner_hi]`, smooth steps outside.
    Plateau { inner_lo: f64, inner_hi: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothWindow {
    lo: f64,
    hi: f64,
    family: WindowFamily,
    scale: f64,
}

fn bump_profile(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    (1.0 - 1.0 / (1.0 - t * t)).exp()
}

fn psi(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth step rising from 0 at `u <= 0` to 1 at `u >= 1`.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = psi(u);
    a / (a + psi(1.0 - u))
}

impl SmoothWindow {
    pub fn bump(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::arg(format!("bad window support [{lo}, {hi}]")));
        }
        let w = Self {
            lo,
            hi,
            family: WindowFamily::Bump,
            scale: 1.0,
        };
        Ok(Self {
            scale: w.intrinsic_scale(),
            ..w
        })
    }

    pub fn plateau(lo: f64, inner_lo: f64, inner_hi: f64, hi: f64) -> Result<Self> {
        let ok = [lo, inner_lo, inner_hi, hi].iter().all(|v| v.is_finite()) && lo < inner_lo && inner_lo <= inner_hi && inner_hi < hi;
        if !ok {
            return Err(Error::arg(format!(
                "plateau needs lo < inner_lo <= inner_hi < hi, got {lo}, {inner_lo}, {inner_hi}, {hi}"
            )));
        }
        let w = Self {
            lo,
            hi,
            family: WindowFamily::Plateau { inner_lo, inner_hi },
            scale: 1.0,
        };
        Ok(Self {
            scale: w.intrinsic_scale(),
            ..w
        })
    }

    /// Declare the derivative scale `K`. It must be at least the intrinsic scale of the shape.
    pub fn with_scale(self, k: f64) -> Result<Self> {
        let need = self.intrinsic_scale();
        if !(k.is_finite() && k >= need * (1.0 - 1e-12)) {
            return Err(Error::arg(format!(
                "derivative scale {k} is below the window's intrinsic scale {need}"
            )));
        }
        Ok(Self { scale: k, ..self })
    }

    /// The smallest admissible `K`: `max(1, 1/width)` for the bump, `max(1, 1/shortest ramp)` for the plateau.
    pub fn intrinsic_scale(&self) -> f64 {
        (1.0 / self.characteristic_width()).max(1.0)
    }

    /// Width over which the window changes by O(1): the support for the bump, the shortest ramp for the plateau.
    pub fn characteristic_width(&self) -> f64 {
        match self.family {
            WindowFamily::Bump => self.hi - self.lo,
            WindowFamily::Plateau { inner_lo, inner_hi } => (inner_lo - self.lo).min(self.hi - inner_hi),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn family(&self) -> WindowFamily {
        self.family
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        match self.family {
            WindowFamily::Bump => {
                let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
                bump_profile(t)
            }
            WindowFamily::Plateau { inner_lo, inner_hi } => {
                if x < inner_lo {
                    smooth_step((x - self.lo) / (inner_lo - self.lo))
                } else if x > inner_hi {
                    smooth_step((self.hi - x) / (self.hi - inner_hi))
                } else {
                    1.0
                }
            }
        }
    }

    /// `x -> W(x / t)`, supported on `[t lo, t hi]`, with the derivative scale divided by `t`.
    pub fn dilate(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::arg("dilation factor must be positive"));
        }
        let family = match self.family {
            WindowFamily::Bump => WindowFamily::Bump,
            WindowFamily::Plateau { inner_lo, inner_hi } => WindowFamily::Plateau {
                inner_lo: inner_lo * t,
                inner_hi: inner_hi * t,
            },
        };
        Ok(Self {
            lo: self.lo * t,
            hi: self.hi * t,
            family,
            scale: self.scale / t,
        })
    }

    /// `C_j` with `sup |W^(j)| <= C_j K^j` for `j = 1, 2, 3` (and `C_0 = 1`).
    pub fn derivative_constant(&self, j: usize) -> Option<f64> {
        if j == 0 {
            return Some(1.0);
        }
        let table = match self.family {
            WindowFamily::Bump => &BUMP_CONSTANTS,
            WindowFamily::Plateau { .. } => &PLATEAU_CONSTANTS,
        };
        table.get(j - 1).copied()
    }

    /// Sample `|W^(j)|` by central finite differences on `points` grid points and
    /// return `(max observed, C_j K^j)`.
    pub fn derivative_check(&self, j: usize, points: usize) -> Result<(f64, f64)> {
        let c = self
            .derivative_constant(j)
            .ok_or_else(|| Error::arg(format!("no derivative constant for order {j}")))?;
        let width = self.hi - self.lo;
        let h = width * 2e-4;
        let mut worst: f64 = 0.0;
        for i in 0..points {
            let x = self.lo + width * (i as f64 + 0.5) / points as f64;
            let d = match j {
                0 => self.eval(x),
                1 => (self.eval(x + h) - self.eval(x - h)) / (2.0 * h),
                2 => (self.eval(x + h) - 2.0 * self.eval(x) + self.eval(x - h)) / (h * h),
                3 => {
                    (self.eval(x + 2.0 * h) - 2.0 * self.eval(x + h) + 2.0 * self.eval(x - h) - self.eval(x - 2.0 * h)) / (2.0 * h * h * h)
                }
                _ => unreachable!(),
            };
            worst = worst.max(d.abs());
        }
        Ok((worst, c * self.scale.powi(j as i32)))
    }
}

/// The fixed weight `omega` on `[1/2, 1]` normalised to unit integral.
pub fn omega() -> NormalizedWindow {
    let w = SmoothWindow::bump(0.5, 1.0).expect("static support");
    // int over [1/2, 1] = (1/4) * BUMP_INTEGRAL
    NormalizedWindow {
        window: w,
        factor: 4.0 / BUMP_INTEGRAL,
    }
}

/// A window multiplied by a constant.
#[derive(Clone, Copy, Debug)]
pub struct NormalizedWindow {
    pub window: SmoothWindow,
    pub factor: f64,
}

impl NormalizedWindow {
    pub fn eval(&self, x: f64) -> f64 {
        self.factor * self.window.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::quad::{integrate, QuadratureConfig};
    use proptest::prelude::*;

    #[test]
    fn bump_integral_matches_constant() {
        let r = integrate(bump_profile, -1.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value - BUMP_INTEGRAL).abs() < 1e-12);
    }

    #[test]
    fn omega_has_unit_mass() {
        let w = omega();
        let r = integrate(|x| w.eval(x), 0.5, 1.0, &QuadratureConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scale_below_intrinsic_rejected() {
        let w = SmoothWindow::bump(1.0, 1.25).unwrap();
        assert_eq!(w.intrinsic_scale(), 4.0);
        assert!(w.with_scale(3.0).is_err());
        assert!(w.with_scale(4.0).is_ok());
    }

    #[test]
    fn plateau_is_one_inside() {
        let v = SmoothWindow::plateau(1.0 / 3.0, 0.5, 2.5, 3.0).unwrap();
        assert_eq!(v.eval(1.0), 1.0);
        assert_eq!(v.eval(0.3), 0.0);
        assert!(v.eval(0.4) > 0.0 && v.eval(0.4) < 1.0);
    }

    #[test]
    fn derivative_bounds_hold() {
        for w in [
            SmoothWindow::bump(1.0, 2.0).unwrap(),
            SmoothWindow::bump(50.0, 200.0).unwrap(),
            SmoothWindow::plateau(1.0 / 3.0, 0.5, 2.5, 3.0).unwrap(),
            SmoothWindow::bump(1.0, 1.1).unwrap(),
        ] {
            for j in 1..=3 {
                let (seen, bound) = w.derivative_check(j, 4000).unwrap();
                assert!(seen <= bound, "{w:?} j={j}: {seen} > {bound}");
            }
        }
    }

    proptest! {
        #[test]
        fn window_values_in_unit_interval(lo in -10.0f64..10.0, width in 0.01f64..20.0, u in -0.5f64..1.5) {
            let w = SmoothWindow::bump(lo, lo + width).unwrap();
            let x = lo + u * width;
            let v = w.eval(x);
            prop_assert!((0.0..=1.0).contains(&v));
            if !(0.0..=1.0).contains(&u) {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn dilation_commutes(t in 0.1f64..100.0, x in 0.0f64..4.0) {
            let w = SmoothWindow::plateau(1.0 / 3.0, 0.5, 2.5, 3.0).unwrap();
            let d = w.dilate(t).unwrap();
            prop_assert!((d.eval(x * t) - w.eval(x)).abs() < 1e-12);
        }
    }
}
