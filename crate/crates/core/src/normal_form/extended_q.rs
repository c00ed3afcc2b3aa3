use nalgebra::{DMatrix, DVector};

use super::cutoff::Cutoff;
use super::spec::{build_normal_form, NormalFormSpec, Variant};
use crate::error::{Error, Result};
use crate::numeric::{Jet2, Scalar};
use crate::symbolic::phase::{rat_to_f64, Var};
use crate::symbolic::poly::{CompiledPoly, Ring};

/// `Q(w, theta)` with `a / N = eps^2 Q + rem` on the reconstruction chart,
/// where `N = q_{p+1}` (form 1) or `r_p` (form 2) and `rem = psi` resp. `g`.
///
/// Layouts:
/// * form 1: `w = (y_1..y_p, eta_1..eta_p)`, `theta = (t, z, eps)`
/// * form 2: `w = (y_1..y_{p-1}, eta_1..eta_p)`, `theta = (t, z, x_p, eps)`
///
/// with `z = (x_{p+1}..x_d, xi_{p+1}..xi_d) - (0, e_d)`.
#[derive(Clone, Debug)]
pub struct ExtendedQ {
    spec: NormalFormSpec,
    cutoff: Cutoff,
    q: Vec<CompiledPoly>,
    r: Vec<CompiledPoly>,
    norm: CompiledPoly,
    a: CompiledPoly,
    phi: Option<CompiledPoly>,
    rem: CompiledPoly,
    constant: ConstantPart,
}

/// `Q(w, 0) = w^T A w + b^T w + c`, with its minimizer.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantPart {
    pub hessian: DMatrix<f64>,
    pub gradient: DVector<f64>,
    pub value: f64,
    pub minimizer: DVector<f64>,
    pub minimum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentitySides {
    /// `a / N` at the uncut reconstruction point.
    pub lhs: f64,
    /// `eps^2 Q(w, theta) + rem`.
    pub rhs: f64,
    /// Whether any cut coordinate left `[-delta, delta]`.
    pub cutoff_active: bool,
}

pub fn build_extended_q(spec: &NormalFormSpec, cutoff: Cutoff) -> Result<ExtendedQ> {
    ExtendedQ::new(spec, cutoff)
}

impl ExtendedQ {
    pub fn new(spec: &NormalFormSpec, cutoff: Cutoff) -> Result<Self> {
        let a = build_normal_form(spec)?;
        let (phi, rem) = match spec.variant() {
            Variant::Form1 => (
                spec.phi().map(|f| f.compile()),
                spec.psi().expect("form 1 carries psi").compile(),
            ),
            Variant::Form2 => (None, spec.g().expect("form 2 carries g").compile()),
        };
        let mut eq = ExtendedQ {
            spec: spec.clone(),
            cutoff,
            q: spec.q().iter().map(|f| f.compile()).collect(),
            r: spec.r().iter().map(|f| f.compile()).collect(),
            norm: spec.normalizer().compile(),
            a: a.compile(),
            phi,
            rem,
            constant: ConstantPart {
                hessian: DMatrix::zeros(0, 0),
                gradient: DVector::zeros(0),
                value: 0.0,
                minimizer: DVector::zeros(0),
                minimum: 0.0,
            },
        };
        eq.constant = eq.compute_constant_part()?;
        Ok(eq)
    }

    pub fn spec(&self) -> &NormalFormSpec {
        &self.spec
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn w_dim(&self) -> usize {
        match self.spec.variant() {
            Variant::Form1 => 2 * self.spec.p(),
            Variant::Form2 => 2 * self.spec.p() - 1,
        }
    }

    pub fn z_dim(&self) -> usize {
        2 * (self.spec.dim() - self.spec.p())
    }

    pub fn theta_dim(&self) -> usize {
        match self.spec.variant() {
            Variant::Form1 => self.z_dim() + 2,
            Variant::Form2 => self.z_dim() + 3,
        }
    }

    pub fn constant_part(&self) -> &ConstantPart {
        &self.constant
    }

    /// Normalized base values `q_j(base)/N(base)` and `r_j(base)/N(base)`.
    pub fn normalized_bars(&self) -> (Vec<f64>, Vec<f64>) {
        let nb = rat_to_f64(&self.spec.normalizer().eval(&self.spec.base()).expect("dim"));
        let f = |v: Vec<_>| v.iter().map(|x| rat_to_f64(x) / nb).collect();
        (f(self.spec.q_bar()), f(self.spec.r_bar()))
    }

    /// `phi(z)` (form 1) or `0` (form 2, where the time function is `x_p`).
    pub fn phi_of(&self, z: &[f64]) -> f64 {
        match &self.phi {
            Some(phi) => phi.eval(&self.base_coords(z, 0.0)),
            None => 0.0,
        }
    }

    /// `psi(z)` or `g(x_p, z)`.
    pub fn remainder(&self, z: &[f64], x_p: f64) -> f64 {
        self.rem.eval(&self.base_coords(z, x_p))
    }

    /// `theta` on the slice `eps = t - phi(z)` resp. `eps = t - x_p`.
    pub fn theta_on_slice(&self, t: f64, z: &[f64], x_p: f64) -> Vec<f64> {
        assert_eq!(z.len(), self.z_dim(), "z has wrong length");
        let mut th = Vec::with_capacity(self.theta_dim());
        th.push(t);
        th.extend_from_slice(z);
        match self.spec.variant() {
            Variant::Form1 => th.push(t - self.phi_of(z)),
            Variant::Form2 => {
                th.push(x_p);
                th.push(t - x_p);
            }
        }
        th
    }

    /// Coordinates with only `t`, `x_b`, `xi_b` (and `x_p` in form 2) set.
    fn base_coords(&self, z: &[f64], x_p: f64) -> Vec<f64> {
        let d = self.spec.dim();
        let p = self.spec.p();
        let mut c = vec![0.0; 2 * (d + 1)];
        let nb = d - p;
        for j in 0..nb {
            c[Var::X(p + 1 + j).index(d)] = z[j];
            c[Var::Xi(p + 1 + j).index(d)] = z[nb + j] + if p + 1 + j == d { 1.0 } else { 0.0 };
        }
        if self.spec.variant() == Variant::Form2 {
            c[Var::X(p).index(d)] = x_p;
        }
        c
    }

    fn check_lens(&self, w: usize, th: usize) {
        assert_eq!(w, self.w_dim(), "w has wrong length");
        assert_eq!(th, self.theta_dim(), "theta has wrong length");
    }

    /// Phase coordinates at which `q_j`, `r_j` are evaluated.
    fn coords<S: Scalar>(&self, w: &[S], th: &[S], cut: bool) -> Vec<S> {
        let d = self.spec.dim();
        let p = self.spec.p();
        let zd = self.z_dim();
        let nb = d - p;
        let mut c: Vec<S> = vec![S::from_f64(0.0); 2 * (d + 1)];
        let cutf = |s: S| if cut { self.cutoff.apply(&s) } else { s };
        c[0] = th[0].clone();
        for j in 0..nb {
            c[Var::X(p + 1 + j).index(d)] = th[1 + j].clone();
            let e = if p + 1 + j == d { 1.0 } else { 0.0 };
            c[Var::Xi(p + 1 + j).index(d)] = th[1 + nb + j].add(&S::from_f64(e));
        }
        let eps = th[th.len() - 1].clone();
        match self.spec.variant() {
            Variant::Form1 => {
                for k in 1..=p {
                    let x = eps.mul(&w[k - 1]).add(&th[0]);
                    c[Var::X(k).index(d)] = cutf(x);
                    c[Var::Xi(k).index(d)] = cutf(eps.mul(&w[p + k - 1]));
                }
            }
            Variant::Form2 => {
                let xp = th[1 + zd].clone();
                for k in 1..p {
                    c[Var::X(k).index(d)] = cutf(xp.sub(&eps.mul(&w[k - 1])));
                }
                c[Var::X(p).index(d)] = xp;
                for k in 1..=p {
                    c[Var::Xi(k).index(d)] = cutf(eps.mul(&w[p - 1 + k - 1]));
                }
            }
        }
        c
    }

    fn eval_generic<S: Scalar>(&self, w: &[S], th: &[S]) -> S {
        let p = self.spec.p();
        let c = self.coords(w, th, true);
        let n = self.norm.eval_ring(&c);
        let ratio = |f: &CompiledPoly| f.eval_ring(&c).div(&n);
        let sq = |s: &S| s.mul(s);
        let one = S::from_f64(1.0);
        let mut acc = S::from_f64(0.0);
        match self.spec.variant() {
            Variant::Form1 => {
                let y = |j: usize| if j == 0 { S::from_f64(0.0) } else { w[j - 1].clone() };
                for j in 1..=p {
                    acc = acc.add(&sq(&y(j - 1).sub(&y(j))).mul(&ratio(&self.q[j - 1])));
                    acc = acc.add(&sq(&w[p + j - 1]).mul(&ratio(&self.r[j - 1])));
                }
                acc = acc.add(&sq(&y(p).add(&one)));
            }
            Variant::Form2 => {
                let y = |j: usize| if j == p { S::from_f64(0.0) } else { w[j - 1].clone() };
                acc = acc.add(&sq(&y(1).add(&one)).mul(&ratio(&self.q[0])));
                for j in 1..p {
                    acc = acc.add(&sq(&y(j).sub(&y(j + 1))).mul(&ratio(&self.q[j])));
                }
                for j in 1..=p {
                    acc = acc.add(&sq(&w[p - 1 + j - 1]).mul(&ratio(&self.r[j - 1])));
                }
            }
        }
        acc
    }

    pub fn value(&self, w: &[f64], theta: &[f64]) -> f64 {
        self.check_lens(w.len(), theta.len());
        self.eval_generic(w, theta)
    }

    /// Value, gradient and Hessian in `w`.
    pub fn w_derivatives(&self, w: &[f64], theta: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        self.check_lens(w.len(), theta.len());
        let n = w.len();
        let wj: Vec<Jet2> = w.iter().enumerate().map(|(k, &v)| Jet2::variable(v, k, n)).collect();
        let tj: Vec<Jet2> = theta.iter().map(|&v| Jet2::from_f64(v)).collect();
        let j = self.eval_generic(&wj, &tj);
        let (g, h) = if j.g.is_empty() {
            (DVector::zeros(n), DMatrix::zeros(n, n))
        } else {
            (j.gradient(), j.hessian())
        };
        (j.v, g, h)
    }

    /// Gradient of `Q` in `theta` at fixed `w`.
    pub fn theta_gradient(&self, w: &[f64], theta: &[f64]) -> DVector<f64> {
        self.check_lens(w.len(), theta.len());
        let n = theta.len();
        let wj: Vec<Jet2> = w.iter().map(|&v| Jet2::from_f64(v)).collect();
        let tj: Vec<Jet2> =
            theta.iter().enumerate().map(|(k, &v)| Jet2::variable(v, k, n)).collect();
        let j = self.eval_generic(&wj, &tj);
        if j.g.is_empty() {
            DVector::zeros(n)
        } else {
            j.gradient()
        }
    }

    fn compute_constant_part(&self) -> Result<ConstantPart> {
        let n = self.w_dim();
        let w0 = vec![0.0; n];
        let th0 = vec![0.0; self.theta_dim()];
        let (value, gradient, hessian) = self.w_derivatives(&w0, &th0);
        if n == 0 {
            return Ok(ConstantPart {
                hessian,
                gradient,
                value,
                minimizer: DVector::zeros(0),
                minimum: value,
            });
        }
        let chol = hessian.clone().cholesky().ok_or_else(|| {
            let min = hessian.clone().symmetric_eigenvalues().min();
            Error::HessianDegenerate(min)
        })?;
        let minimizer = -chol.solve(&gradient);
        let minimum = value + 0.5 * gradient.dot(&minimizer);
        Ok(ConstantPart {
            hessian,
            gradient,
            value,
            minimizer,
            minimum,
        })
    }

    /// Uncut reconstruction point `(t, x, 0, xi)` in phase coordinates.
    pub fn reconstruct(&self, w: &[f64], theta: &[f64]) -> Vec<f64> {
        self.check_lens(w.len(), theta.len());
        self.coords(w, theta, false)
    }

    /// Both sides of `a / N = eps^2 Q + rem` at `(w, t, z)` with `eps` on
    /// the slice.
    pub fn identity_sides(&self, w: &[f64], t: f64, z: &[f64], x_p: f64) -> IdentitySides {
        let th = self.theta_on_slice(t, z, x_p);
        let pt = self.reconstruct(w, &th);
        let cut = self.coords(w, &th, true);
        let cutoff_active = pt.iter().zip(&cut).any(|(a, b)| a != b);
        let lhs = self.a.eval(&pt) / self.norm.eval(&pt);
        let eps = th[th.len() - 1];
        let rhs = eps * eps * self.value(w, &th) + self.remainder(z, x_p);
        IdentitySides {
            lhs,
            rhs,
            cutoff_active,
        }
    }

    /// `a` at phase coordinates (uncut).
    pub fn symbol_at(&self, coords: &[f64]) -> f64 {
        self.a.eval(coords)
    }

    /// `|Q(w, theta) - Q(w, 0)| / Q(w, 0)`.
    pub fn relative_deviation(&self, w: &[f64], theta: &[f64]) -> f64 {
        let q0 = self.value(w, &vec![0.0; self.theta_dim()]);
        (self.value(w, theta) - q0).abs() / q0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::{int, rat, Rational};
    use crate::symbolic::poly::PolySymbol;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b1() -> NormalFormSpec {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        NormalFormSpec::form1(d, 0, vec![PolySymbol::xi(d, 2).pow(2)], vec![], x1.clone(), x1.pow(3))
            .unwrap()
    }

    fn b2(r1: Rational) -> NormalFormSpec {
        let d = 2;
        let xi2sq = PolySymbol::xi(d, 2).pow(2);
        let g = PolySymbol::x(d, 1).pow(3) * &xi2sq;
        NormalFormSpec::form2(d, 1, vec![xi2sq], vec![PolySymbol::constant(d, r1)], g).unwrap()
    }

    /// d = 3, form 1, p = 1 with non-constant factors.
    fn f1_p1(qbar: Rational) -> NormalFormSpec {
        let d = 3;
        let xi3sq = PolySymbol::xi(d, 3).pow(2);
        let x2 = PolySymbol::x(d, 2);
        let q1 = (PolySymbol::constant(d, qbar) + PolySymbol::x(d, 1).scale(&rat(1, 3))) * &xi3sq;
        let q2 = &xi3sq + PolySymbol::xi(d, 1).pow(2).scale(&rat(1, 5));
        let r1 = PolySymbol::constant(d, rat(1, 2)) + PolySymbol::t(d).scale(&rat(1, 4));
        NormalFormSpec::form1(d, 1, vec![q1, q2], vec![r1], x2.clone(), x2.pow(4)).unwrap()
    }

    /// d = 4, form 2, p = 3: chain direction and anchoring.
    fn f2_p3() -> NormalFormSpec {
        let d = 4;
        let xi4sq = PolySymbol::xi(d, 4).pow(2);
        let q = vec![
            xi4sq.scale(&int(2)) + (PolySymbol::x(d, 2) * PolySymbol::xi(d, 4)).pow(2),
            xi4sq.scale(&rat(1, 2)),
            xi4sq.clone() + (PolySymbol::xi(d, 2) * PolySymbol::xi(d, 4)).scale(&rat(1, 7)),
        ];
        let r = vec![
            PolySymbol::constant(d, int(1)),
            PolySymbol::constant(d, int(2)) + PolySymbol::x(d, 1).scale(&rat(1, 2)),
            PolySymbol::constant(d, rat(3, 2)),
        ];
        let g = (PolySymbol::x(d, 3).pow(2) + PolySymbol::x(d, 4).pow(2)) * &xi4sq;
        NormalFormSpec::form2(d, 3, q, r, g).unwrap()
    }

    fn cut() -> Cutoff {
        Cutoff::new(0.05).unwrap()
    }

    #[test]
    fn b2_constant_part() {
        let eq = build_extended_q(&b2(rat(1, 2)), cut()).unwrap();
        assert_eq!((eq.w_dim(), eq.theta_dim()), (1, 5));
        // a / r_1 gives Q(w, 0) = 2 (y_1 + 1)^2 + eta_1^2 with y_1 = y_p = 0
        for eta in [-1.0, 0.0, 0.5, 3.0] {
            assert!((eq.value(&[eta], &[0.0; 5]) - (2.0 + eta * eta)).abs() < 1e-14);
        }
        let cp = eq.constant_part();
        assert!((cp.minimum - 2.0).abs() < 1e-14 && cp.minimizer[0].abs() < 1e-14);
    }

    #[test]
    fn b1_has_empty_w() {
        let eq = build_extended_q(&b1(), cut()).unwrap();
        assert_eq!((eq.w_dim(), eq.theta_dim()), (0, 6));
        assert_eq!(eq.value(&[], &[0.01, 0.02, 0.0, 0.0, 0.0, 0.01]), 1.0);
        assert_eq!(eq.constant_part().minimum, 1.0);
    }

    #[test]
    fn p1_minimum_closed_form() {
        for (qbar, qf) in [(rat(1, 2), 0.5), (int(1), 1.0), (int(2), 2.0)] {
            let eq = build_extended_q(&f1_p1(qbar), cut()).unwrap();
            let cp = eq.constant_part();
            assert!((cp.minimum - qf / (1.0 + qf)).abs() < 1e-12);
            assert!((cp.minimizer[0] + 1.0 / (1.0 + qf)).abs() < 1e-12);
            assert!(cp.minimizer[1].abs() < 1e-14);
        }
    }

    #[test]
    fn constant_part_matches_displayed_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eq1 = build_extended_q(&f1_p1(int(1)), cut()).unwrap();
        let (q, r) = eq1.normalized_bars();
        for _ in 0..20 {
            let (y, e): (f64, f64) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let expect = y * y * q[0] + (y + 1.0).powi(2) + e * e * r[0];
            assert!((eq1.value(&[y, e], &[0.0; 6]) - expect).abs() < 1e-12);
        }
        let eq2 = build_extended_q(&f2_p3(), cut()).unwrap();
        let (q, r) = eq2.normalized_bars();
        for _ in 0..20 {
            let w: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (y1, y2) = (w[0], w[1]);
            let expect = (y1 + 1.0).powi(2) * q[0]
                + (y1 - y2).powi(2) * q[1]
                + y2 * y2 * q[2]
                + (0..3).map(|j| w[2 + j] * w[2 + j] * r[j]).sum::<f64>();
            assert!((eq2.value(&w, &[0.0; 5]) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_holds_where_cutoff_is_inactive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [b1(), b2(rat(1, 2)), f1_p1(int(2)), f2_p3()] {
            let eq = build_extended_q(&spec, Cutoff::new(1.0).unwrap()).unwrap();
            let mut checked = 0;
            while checked < 20 {
                let w: Vec<f64> = (0..eq.w_dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let z: Vec<f64> = (0..eq.z_dim()).map(|_| rng.gen_range(-0.1..0.1)).collect();
                let t = rng.gen_range(0.0..0.1);
                let xp = rng.gen_range(-0.1..0.1);
                let s = eq.identity_sides(&w, t, &z, xp);
                assert!(!s.cutoff_active);
                let scale = 1.0 + s.lhs.abs();
                assert!((s.lhs - s.rhs).abs() <= 1e-12 * scale, "{s:?}");
                checked += 1;
            }
        }
    }

    #[test]
    fn zero_eps_leaves_the_remainder() {
        let eq = build_extended_q(&f1_p1(int(1)), cut()).unwrap();
        let z = [0.03, -0.01, 0.02, 0.01];
        let t = eq.phi_of(&z);
        let s = eq.identity_sides(&[1.5, -0.7], t, &z, 0.0);
        assert_eq!(s.rhs, eq.remainder(&z, 0.0));
        assert!((s.lhs - s.rhs).abs() < 1e-15);
    }

    #[test]
    fn relative_stability_for_small_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let delta = 0.05;
        for spec in [b2(rat(1, 2)), f1_p1(int(1)), f2_p3()] {
            let eq = build_extended_q(&spec, Cutoff::new(delta).unwrap()).unwrap();
            for _ in 0..200 {
                let mut w: Vec<f64> = (0..eq.w_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let nw = w.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                let rad = rng.gen_range(0.0..10.0);
                w.iter_mut().for_each(|v| *v *= rad / nw);
                let mut th: Vec<f64> =
                    (0..eq.theta_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                th[0] = th[0].abs();
                let l1 = th.iter().map(|v| v.abs()).sum::<f64>();
                th.iter_mut().for_each(|v| *v *= delta / 4.0 / l1);
                assert!(eq.relative_deviation(&w, &th) <= 0.5);
            }
        }
    }

    #[test]
    fn q_is_nonnegative_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eq = build_extended_q(&f2_p3(), cut()).unwrap();
        for _ in 0..500 {
            let w: Vec<f64> = (0..5).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let th: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.05..0.05)).collect();
            assert!(eq.value(&w, &th) >= 0.0);
        }
    }

    #[test]
    fn theta_gradient_matches_finite_differences() {
        let eq = build_extended_q(&f1_p1(int(1)), cut()).unwrap();
        let w = [0.4, -0.3];
        let th = [0.01, 0.02, -0.01, 0.015, 0.005, 0.02];
        let g = eq.theta_gradient(&w, &th);
        let h = 1e-6;
        for k in 0..th.len() {
            let (mut a, mut b) = (th, th);
            a[k] += h;
            b[k] -= h;
            let fd = (eq.value(&w, &a) - eq.value(&w, &b)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6, "k = {k}: {fd} vs {}", g[k]);
        }
    }
}
