//! Log-gamma for real arguments and cached tables at half-integers.

use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` for real `x` not a non-positive integer (Lanczos, reflection
/// below one half).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln Γ(k/2)` for `k = 1, 2, ...`, built from `Γ(1/2) = √π`, `Γ(1) = 1`
/// and `Γ(x + 1) = x Γ(x)`.
#[derive(Debug, Clone)]
pub struct HalfGammaTable<T> {
    ln: Vec<T>,
    raw: Vec<f64>,
}

impl<T: Scalar> HalfGammaTable<T> {
    /// Table valid for `k <= max_k`.
    pub fn new(max_k: usize) -> Self {
        let mut t = Self {
            ln: Vec::new(),
            raw: Vec::new(),
        };
        t.ensure(max_k);
        t
    }

    pub fn ensure(&mut self, max_k: usize) {
        if self.raw.is_empty() {
            // index 0 is a pole; never read
            self.raw
                .extend([f64::INFINITY, 0.5 * std::f64::consts::PI.ln(), 0.0]);
        }
        while self.raw.len() <= max_k {
            let k = self.raw.len();
            let prev = self.raw[k - 2];
            self.raw.push(prev + ((k as f64 - 2.0) / 2.0).ln());
        }
        while self.ln.len() < self.raw.len() {
            self.ln.push(T::lit(self.raw[self.ln.len()]));
        }
    }

    pub fn max_k(&self) -> usize {
        self.raw.len() - 1
    }

    /// `ln Γ(k/2)`; `k` must be at least one.
    #[inline]
    pub fn ln_half(&self, k: usize) -> T {
        debug_assert!(k >= 1);
        self.ln[k]
    }
}

/// `ln n!` for `n = 0, 1, ...`.
#[derive(Debug, Clone)]
pub struct LnFactorial<T> {
    ln: Vec<T>,
    raw: Vec<f64>,
}

impl<T: Scalar> LnFactorial<T> {
    pub fn new(max_n: usize) -> Self {
        let mut t = Self {
            ln: Vec::new(),
            raw: Vec::new(),
        };
        t.ensure(max_n);
        t
    }

    pub fn ensure(&mut self, max_n: usize) {
        if self.raw.is_empty() {
            self.raw.push(0.0);
        }
        while self.raw.len() <= max_n {
            let n = self.raw.len();
            let prev = self.raw[n - 1];
            self.raw.push(prev + (n as f64).ln());
        }
        while self.ln.len() < self.raw.len() {
            self.ln.push(T::lit(self.raw[self.ln.len()]));
        }
    }

    #[inline]
    pub fn get(&self, n: usize) -> T {
        self.ln[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lanczos_known_values() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(
            ln_gamma(0.5),
            0.5 * std::f64::consts::PI.ln(),
            epsilon = 1e-14
        );
        // Γ(-1/2) = -2√π
        assert_relative_eq!(
            ln_gamma(-0.5),
            (2.0 * std::f64::consts::PI.sqrt()).ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn half_table_matches_lanczos() {
        let t = HalfGammaTable::<f64>::new(400);
        for k in 1..=400 {
            let x = k as f64 / 2.0;
            assert_relative_eq!(
                t.ln_half(k),
                ln_gamma(x),
                epsilon = 1e-12,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn factorial_table() {
        let f = LnFactorial::<f64>::new(30);
        assert_eq!(f.get(0), 0.0);
        assert_relative_eq!(f.get(5), 120f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(f.get(30), ln_gamma(31.0), max_relative = 1e-13);
    }

    #[test]
    fn tables_grow_on_demand() {
        let mut t = HalfGammaTable::<f32>::new(4);
        t.ensure(10);
        assert_eq!(t.max_k(), 10);
        assert!((t.ln_half(10) - 24f32.ln()).abs() < 1e-5);
    }
}
