//! Compensated (Neumaier) accumulation.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// e(k/q) = exp(2 pi i k / q), with k reduced modulo q first.
#[inline]
pub fn unit_root(k: i128, q: u64) -> Complex64 {
    let r = k.rem_euclid(q as i128) as f64;
    let theta = std::f64::consts::TAU * r / q as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// e(x) = exp(2 pi i x) for real x.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let frac = x - x.floor();
    let theta = std::f64::consts::TAU * frac;
    Complex64::new(theta.cos(), theta.sin())
}
