use crate::numeric::Scalar;

/// Odd, nondecreasing, C^2 cutoff with `chi(s) = s` on `|s| <= 1` and
/// `chi(s) = 2 sign(s)` on `|s| >= 2`, used at scale `delta` as
/// `s -> delta chi(s / delta)`.
///
/// On `1 <= s <= 2`, with `u = s - 1`, `chi = 1 + u + 4u^3 - 7u^4 + 3u^5`,
/// whose derivative `(1-u)^2 (15u^2 + 2u + 1)` is nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    delta: f64,
}

impl Cutoff {
    pub fn new(delta: f64) -> Option<Self> {
        (delta > 0.0 && delta.is_finite()).then_some(Cutoff { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `(chi, chi', chi'')` at `s`.
    pub fn chi3(s: f64) -> (f64, f64, f64) {
        let a = s.abs();
        let sg = if s < 0.0 { -1.0 } else { 1.0 };
        if a <= 1.0 {
            (s, 1.0, 0.0)
        } else if a >= 2.0 {
            (2.0 * sg, 0.0, 0.0)
        } else {
            let u = a - 1.0;
            let h = 1.0 + u + u * u * u * (4.0 + u * (-7.0 + 3.0 * u));
            let dh = (1.0 - u) * (1.0 - u) * (1.0 + u * (2.0 + 15.0 * u));
            let d2h = u * (24.0 + u * (-84.0 + 60.0 * u));
            (sg * h, dh, sg * d2h)
        }
    }

    pub fn chi(s: f64) -> f64 {
        Self::chi3(s).0
    }

    pub fn chi_prime(s: f64) -> f64 {
        Self::chi3(s).1
    }

    pub fn chi_second(s: f64) -> f64 {
        Self::chi3(s).2
    }

    /// `delta chi(s / delta)`.
    pub fn scaled(&self, s: f64) -> f64 {
        self.delta * Self::chi(s / self.delta)
    }

    /// `delta chi(s / delta)` with derivatives carried through.
    pub fn apply<S: Scalar>(&self, s: &S) -> S {
        let (c, dc, d2c) = Self::chi3(s.value() / self.delta);
        s.apply(self.delta * c, dc, d2c / self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Jet2;

    #[test]
    fn defining_values() {
        assert_eq!(Cutoff::chi(0.5), 0.5);
        assert_eq!(Cutoff::chi(3.0), 2.0);
        assert_eq!(Cutoff::chi(-3.0), -2.0);
        assert_eq!(Cutoff::chi(-0.25), -0.25);
    }

    #[test]
    fn hermite_conditions_at_the_knots() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-14;
        for (s, v, d1, d2) in [(1.0, 1.0, 1.0, 0.0), (2.0, 2.0, 0.0, 0.0)] {
            for eps in [-1e-9, 0.0, 1e-9] {
                let (c, dc, d2c) = Cutoff::chi3(s + eps);
                assert!((c - v).abs() < 1e-8 && (dc - d1).abs() < 1e-7 && (d2c - d2).abs() < 1e-6);
            }
            let (c, dc, d2c) = Cutoff::chi3(s);
            assert!(close(c, v) && close(dc, d1) && close(d2c, d2));
        }
    }

    #[test]
    fn monotone_odd_and_bounded() {
        let cut = Cutoff::new(0.05).unwrap();
        for k in 0..1000 {
            let s = -5.0 + 10.0 * k as f64 / 999.0;
            assert!(Cutoff::chi_prime(s) >= 0.0);
            assert_eq!(Cutoff::chi(-s), -Cutoff::chi(s));
            assert!(cut.scaled(s).abs() <= 2.0 * cut.delta());
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for k in 0..200 {
            let s = -2.5 + 5.0 * k as f64 / 199.0;
            let fd1 = (Cutoff::chi(s + h) - Cutoff::chi(s - h)) / (2.0 * h);
            let fd2 = (Cutoff::chi_prime(s + h) - Cutoff::chi_prime(s - h)) / (2.0 * h);
            assert!((fd1 - Cutoff::chi_prime(s)).abs() < 1e-8);
            assert!((fd2 - Cutoff::chi_second(s)).abs() < 1e-4);
        }
    }

    #[test]
    fn scaled_derivative_bounds() {
        // d/ds delta chi(eps s / delta) = eps chi', second derivative eps^2 chi'' / delta
        let cut = Cutoff::new(0.1).unwrap();
        let eps = 0.03;
        let sup = |f: fn(f64) -> f64| {
            (0..=1000).map(|k| f(1.0 + k as f64 / 1000.0).abs()).fold(0.0, f64::max)
        };
        let (sup1, sup2) = (sup(Cutoff::chi_prime), sup(Cutoff::chi_second));
        assert!(sup1 < 1.52);
        for k in 0..100 {
            let s = -20.0 + 40.0 * k as f64 / 99.0;
            let j = cut.apply(&Jet2::variable(eps * s, 0, 1));
            assert!((j.g[0] * eps).abs() <= sup1 * eps + 1e-15);
            assert!((j.h[0] * eps * eps).abs() <= sup2 * eps * eps / cut.delta() + 1e-12);
        }
    }
}
