use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::symbolic::calculus::{homogeneity_check, poisson_bracket};
use crate::symbolic::phase::{rat_to_f64, PhasePoint, Rational, Var};
use crate::symbolic::poly::PolySymbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `sum (x_{i-1}-x_i)^2 q_i + sum xi_i^2 r_i + ((x_p - phi_p)^2 + psi_p) q_{p+1}`
    Form1,
    /// `sum (x_{i-1}-x_i)^2 q_i + sum xi_i^2 r_i + g_p r_p`
    Form2,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Form1 => "form1",
            Variant::Form2 => "form2",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Normal-form data for `a` near the base point `(0, 0, e_d)`; `x_0 = t`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormSpec {
    variant: Variant,
    dim: usize,
    p: usize,
    q: Vec<PolySymbol>,
    r: Vec<PolySymbol>,
    phi: Option<PolySymbol>,
    psi: Option<PolySymbol>,
    g: Option<PolySymbol>,
}

fn violation(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvariantViolation {
        field: field.into(),
        reason: reason.into(),
    }
}

impl NormalFormSpec {
    /// `q` holds `q_1..q_{p+1}`, `r` holds `r_1..r_p`.
    pub fn form1(
        dim: usize,
        p: usize,
        q: Vec<PolySymbol>,
        r: Vec<PolySymbol>,
        phi: PolySymbol,
        psi: PolySymbol,
    ) -> Result<Self> {
        let spec = NormalFormSpec {
            variant: Variant::Form1,
            dim,
            p,
            q,
            r,
            phi: Some(phi),
            psi: Some(psi),
            g: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `q` holds `q_1..q_p`, `r` holds `r_1..r_p`.
    pub fn form2(
        dim: usize,
        p: usize,
        q: Vec<PolySymbol>,
        r: Vec<PolySymbol>,
        g: PolySymbol,
    ) -> Result<Self> {
        let spec = NormalFormSpec {
            variant: Variant::Form2,
            dim,
            p,
            q,
            r,
            phi: None,
            psi: None,
            g: Some(g),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> &[PolySymbol] {
        &self.q
    }

    pub fn r(&self) -> &[PolySymbol] {
        &self.r
    }

    pub fn phi(&self) -> Option<&PolySymbol> {
        self.phi.as_ref()
    }

    pub fn psi(&self) -> Option<&PolySymbol> {
        self.psi.as_ref()
    }

    pub fn g(&self) -> Option<&PolySymbol> {
        self.g.as_ref()
    }

    pub fn base(&self) -> PhasePoint {
        PhasePoint::base(self.dim)
    }

    /// `q_i` and `r_i` at the base point.
    pub fn q_bar(&self) -> Vec<Rational> {
        let b = self.base();
        self.q.iter().map(|q| q.eval(&b).expect("validated dim")).collect()
    }

    pub fn r_bar(&self) -> Vec<Rational> {
        let b = self.base();
        self.r.iter().map(|r| r.eval(&b).expect("validated dim")).collect()
    }

    /// The factor divided out of `a` before forming `Q`: `q_{p+1}` or `r_p`.
    pub fn normalizer(&self) -> &PolySymbol {
        match self.variant {
            Variant::Form1 => &self.q[self.p],
            Variant::Form2 => &self.r[self.p - 1],
        }
    }

    /// Position `x_i`, with `x_0 = t`.
    pub fn position(&self, i: usize) -> PolySymbol {
        if i == 0 {
            PolySymbol::t(self.dim)
        } else {
            PolySymbol::x(self.dim, i)
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(violation("dim", "spatial dimension must be positive"));
        }
        let (p_ok, nq) = match self.variant {
            Variant::Form1 => (self.p < d, self.p + 1),
            Variant::Form2 => (self.p >= 1 && self.p < d, self.p),
        };
        if !p_ok {
            let range = match self.variant {
                Variant::Form1 => format!("0 <= p <= {}", d - 1),
                Variant::Form2 => format!("1 <= p <= {}", d - 1),
            };
            return Err(violation("p", format!("p = {} outside {range}", self.p)));
        }
        if self.q.len() != nq {
            return Err(violation("q", format!("expected {nq} factors, found {}", self.q.len())));
        }
        if self.r.len() != self.p {
            return Err(violation("r", format!("expected {} factors, found {}", self.p, self.r.len())));
        }
        let base = self.base();
        let named = |v: &[PolySymbol], s: &str| {
            v.iter()
                .enumerate()
                .map(|(i, f)| (format!("{s}{}", i + 1), f.clone(), if s == "q" { 2 } else { 0 }))
                .collect::<Vec<_>>()
        };
        for (field, f, deg) in named(&self.q, "q").into_iter().chain(named(&self.r, "r")) {
            self.check_common(&field, &f, deg)?;
            let v = f.eval(&base)?;
            if !v.is_positive() {
                return Err(violation(field, format!("value {v} at the base point is not positive")));
            }
        }
        // Allowed variables for the remainder data.
        let (remainder, first_x): (Vec<(&str, &PolySymbol, i64)>, usize) = match self.variant {
            Variant::Form1 => (
                vec![
                    ("phi", self.phi.as_ref().ok_or_else(|| violation("phi", "missing"))?, 0),
                    ("psi", self.psi.as_ref().ok_or_else(|| violation("psi", "missing"))?, 0),
                ],
                self.p + 1,
            ),
            Variant::Form2 => (
                vec![("g", self.g.as_ref().ok_or_else(|| violation("g", "missing"))?, 2)],
                self.p,
            ),
        };
        for (field, f, deg) in remainder {
            self.check_common(field, f, deg)?;
            for k in f.support() {
                let v = Var::from_index(k, d);
                let allowed = match v {
                    Var::X(i) => i >= first_x,
                    Var::Xi(i) => i > self.p,
                    Var::T | Var::Tau => false,
                };
                if !allowed {
                    return Err(violation(field, format!("depends on {v}")));
                }
            }
            let v = f.eval(&base)?;
            if !v.is_zero() {
                return Err(violation(field, format!("value {v} at the base point is not zero")));
            }
        }
        Ok(())
    }

    fn check_common(&self, field: &str, f: &PolySymbol, degree: i64) -> Result<()> {
        if f.dim() != self.dim {
            return Err(violation(
                field,
                format!("dimension {} differs from d = {}", f.dim(), self.dim),
            ));
        }
        if f.depends_on(Var::Tau) {
            return Err(violation(field, "depends on tau"));
        }
        if !homogeneity_check(f, degree).homogeneous {
            return Err(violation(field, format!("not homogeneous of degree {degree} in xi")));
        }
        Ok(())
    }
}

/// Assembles `a` from the normal-form data.
pub fn build_normal_form(spec: &NormalFormSpec) -> Result<PolySymbol> {
    spec.validate()?;
    let d = spec.dim;
    let p = spec.p;
    let mut a = PolySymbol::zero(d);
    for i in 1..=p {
        a = a + (spec.position(i - 1) - spec.position(i)).pow(2) * &spec.q[i - 1];
        a = a + PolySymbol::xi(d, i).pow(2) * &spec.r[i - 1];
    }
    let tail = match spec.variant {
        Variant::Form1 => {
            let phi = spec.phi.as_ref().expect("validated");
            let psi = spec.psi.as_ref().expect("validated");
            ((spec.position(p) - phi).pow(2) + psi) * &spec.q[p]
        }
        Variant::Form2 => spec.g.as_ref().expect("validated") * &spec.r[p - 1],
    };
    Ok(a + tail)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SideCheck {
    pub name: String,
    pub holds: bool,
    /// Exact value for algebraic checks, worst sampled value for grid checks.
    pub value: String,
    pub note: Option<String>,
}

/// Sampling grid for one-sided sign checks: every variable the remainder
/// depends on ranges over `base +- half_width` with `points` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignGrid {
    pub half_width: f64,
    pub points: usize,
    pub budget: usize,
}

impl Default for SignGrid {
    fn default() -> Self {
        SignGrid {
            half_width: 0.1,
            points: 9,
            budget: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SideConditionReport {
    pub checks: Vec<SideCheck>,
    pub grid: SignGrid,
    /// Points per axis actually used and the sampled axes.
    pub grid_points: usize,
    pub grid_axes: Vec<Var>,
}

pub const BBIS_FAILURE: &str = "not effectively hyperbolic by psi(0) criterion";

impl SideConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SideCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

pub fn check_side_conditions(spec: &NormalFormSpec, grid: SignGrid) -> SideConditionReport {
    let d = spec.dim;
    let base = spec.base();
    let mut checks = Vec::new();
    let exact = |name: String, v: Rational, holds: bool, note: Option<String>| SideCheck {
        name,
        holds,
        value: v.to_string(),
        note,
    };
    for (i, v) in spec.q_bar().into_iter().enumerate() {
        let ok = v.is_positive();
        checks.push(exact(format!("q{}(base) > 0", i + 1), v, ok, None));
    }
    for (i, v) in spec.r_bar().into_iter().enumerate() {
        let ok = v.is_positive();
        checks.push(exact(format!("r{}(base) > 0", i + 1), v, ok, None));
    }
    let (sign_target, sign_guard, axes) = match spec.variant {
        Variant::Form1 => {
            let phi = spec.phi.as_ref().expect("validated");
            let psi = spec.psi.as_ref().expect("validated");
            let inner = poisson_bracket(phi, psi).expect("same dim");
            let v = poisson_bracket(phi, &inner).expect("same dim").eval(&base).expect("dim");
            let ok = v.is_zero();
            checks.push(exact("{phi, {phi, psi}}(base) = 0".into(), v, ok, None));
            (psi.clone(), phi.clone(), union_support(&[phi, psi]))
        }
        Variant::Form2 => {
            let g = spec.g.as_ref().expect("validated");
            let xi_p = PolySymbol::xi(d, spec.p);
            let inner = poisson_bracket(&xi_p, g).expect("same dim");
            let v = poisson_bracket(&xi_p, &inner).expect("same dim").eval(&base).expect("dim");
            let ok = v.is_zero();
            checks.push(exact(format!("{{xi{0}, {{xi{0}, g}}}}(base) = 0", spec.p), v, ok, None));
            let inv: Rational = spec.r_bar().iter().filter(|r| r.is_positive()).map(|r| r.recip()).sum();
            let ok = inv > Rational::one();
            let note = (!ok).then(|| BBIS_FAILURE.to_string());
            checks.push(exact("sum 1/r_i(base) > 1".into(), inv, ok, note));
            let guard = PolySymbol::x(d, spec.p);
            let mut axes = union_support(&[g]);
            let kp = Var::X(spec.p).index(d);
            if !axes.contains(&kp) {
                axes.push(kp);
                axes.sort_unstable();
            }
            (g.clone(), guard, axes)
        }
    };
    let (points, worst, witness) = one_sided_sample(&sign_target, &sign_guard, &axes, &base, grid);
    let scale = rat_to_f64(&sign_target.max_abs_coeff()).max(1.0);
    let ok = worst >= -1e-12 * scale;
    let (tname, gname) = match spec.variant {
        Variant::Form1 => ("psi", "phi".to_string()),
        Variant::Form2 => ("g", format!("x{}", spec.p)),
    };
    checks.push(SideCheck {
        name: format!("{tname} >= 0 where {gname} >= 0 (sampled)"),
        holds: ok,
        value: format!("{worst:e}"),
        note: witness.map(|w| format!("worst at {}", fmt_point(&w, &axes, d))),
    });
    SideConditionReport {
        checks,
        grid,
        grid_points: points,
        grid_axes: axes.iter().map(|&k| Var::from_index(k, d)).collect(),
    }
}

fn union_support(fs: &[&PolySymbol]) -> Vec<usize> {
    let mut s: Vec<usize> = fs.iter().flat_map(|f| f.support()).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn fmt_point(coords: &[f64], axes: &[usize], d: usize) -> String {
    if axes.is_empty() {
        return "the base point (constant)".into();
    }
    axes.iter()
        .map(|&k| format!("{} = {}", Var::from_index(k, d), coords[k]))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Minimum of `target` over grid points where `guard >= 0`.
fn one_sided_sample(
    target: &PolySymbol,
    guard: &PolySymbol,
    axes: &[usize],
    base: &PhasePoint,
    grid: SignGrid,
) -> (usize, f64, Option<Vec<f64>>) {
    let mut n = grid.points.max(2);
    while !axes.is_empty() && n > 2 && (n as f64).powi(axes.len() as i32) > grid.budget as f64 {
        n -= 1;
    }
    let center = base.to_f64();
    let tc = target.compile();
    let gc = guard.compile();
    let total = n.pow(axes.len() as u32);
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut coords = center.clone();
    for idx in 0..total {
        let mut rem = idx;
        for &k in axes {
            let j = rem % n;
            rem /= n;
            coords[k] = center[k] - grid.half_width + 2.0 * grid.half_width * j as f64 / (n - 1) as f64;
        }
        if gc.eval(&coords) < 0.0 {
            continue;
        }
        let v = tc.eval(&coords);
        if v < worst {
            worst = v;
            witness = Some(coords.clone());
        }
    }
    if witness.is_none() {
        worst = 0.0;
    }
    (n, worst, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::{int, rat};

    pub(crate) fn b1() -> NormalFormSpec {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        NormalFormSpec::form1(d, 0, vec![PolySymbol::xi(d, 2).pow(2)], vec![], x1.clone(), x1.pow(3))
            .unwrap()
    }

    pub(crate) fn b2(r1: Rational) -> NormalFormSpec {
        let d = 2;
        let xi2sq = PolySymbol::xi(d, 2).pow(2);
        let g = PolySymbol::x(d, 1).pow(3) * &xi2sq;
        NormalFormSpec::form2(d, 1, vec![xi2sq], vec![PolySymbol::constant(d, r1)], g).unwrap()
    }

    #[test]
    fn b1_assembles_by_hand() {
        let d = 2;
        let t = PolySymbol::t(d);
        let x1 = PolySymbol::x(d, 1);
        let expect = ((&t - &x1).pow(2) + x1.pow(3)) * PolySymbol::xi(d, 2).pow(2);
        assert_eq!(build_normal_form(&b1()).unwrap(), expect);
    }

    #[test]
    fn b2_assembles_by_hand() {
        let d = 2;
        let t = PolySymbol::t(d);
        let x1 = PolySymbol::x(d, 1);
        let xi2sq = PolySymbol::xi(d, 2).pow(2);
        let expect = (&t - &x1).pow(2) * &xi2sq
            + PolySymbol::xi(d, 1).pow(2).scale(&rat(1, 2))
            + (x1.pow(3) * &xi2sq).scale(&rat(1, 2));
        let a = build_normal_form(&b2(rat(1, 2))).unwrap();
        assert_eq!(a, expect);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn nonvanishing_psi_is_rejected() {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        let psi = x1.pow(3) + PolySymbol::one(d);
        let err = NormalFormSpec::form1(d, 0, vec![PolySymbol::xi(d, 2).pow(2)], vec![], x1, psi)
            .unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { ref field, .. } if field == "psi"));
    }

    #[test]
    fn dependence_and_degree_restrictions() {
        let d = 3;
        let q = vec![PolySymbol::xi(d, 3).pow(2)];
        let r = vec![PolySymbol::constant(d, rat(1, 2))];
        let xi3sq = PolySymbol::xi(d, 3).pow(2);
        // g may not depend on xi_1 or t
        for bad in [
            PolySymbol::x(d, 1) * PolySymbol::xi(d, 1) * PolySymbol::xi(d, 3),
            PolySymbol::t(d) * PolySymbol::x(d, 2) * &xi3sq,
        ] {
            let e = NormalFormSpec::form2(d, 1, q.clone(), r.clone(), bad).unwrap_err();
            assert!(matches!(e, Error::InvariantViolation { ref field, .. } if field == "g"));
        }
        // wrong xi-degree for g
        let e = NormalFormSpec::form2(d, 1, q.clone(), r.clone(), PolySymbol::x(d, 2).pow(2))
            .unwrap_err();
        assert!(matches!(e, Error::InvariantViolation { .. }));
        // r must be positive at the base
        let e = NormalFormSpec::form2(d, 1, q.clone(), vec![PolySymbol::x(d, 1)], xi3sq.clone())
            .unwrap_err();
        assert!(matches!(e, Error::InvariantViolation { ref field, .. } if field == "r1"));
        // p out of range
        let e = NormalFormSpec::form2(d, 3, q, r, xi3sq).unwrap_err();
        assert!(matches!(e, Error::InvariantViolation { ref field, .. } if field == "p"));
    }

    #[test]
    fn b1_side_conditions_hold() {
        let rep = check_side_conditions(&b1(), SignGrid::default());
        assert!(rep.passed(), "{:?}", rep.checks);
        assert_eq!(rep.checks.iter().find(|c| c.name.starts_with("{phi")).unwrap().value, "0");
    }

    #[test]
    fn b2_side_conditions_hold() {
        let rep = check_side_conditions(&b2(rat(1, 2)), SignGrid::default());
        assert!(rep.passed(), "{:?}", rep.checks);
        let bbis = rep.checks.iter().find(|c| c.name.starts_with("sum")).unwrap();
        assert_eq!(bbis.value, "2");
    }

    #[test]
    fn bbis_failure_is_flagged() {
        let rep = check_side_conditions(&b2(int(2)), SignGrid::default());
        assert!(!rep.passed());
        let f: Vec<_> = rep.failures().collect();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].value, "1/2");
        assert_eq!(f[0].note.as_deref(), Some(BBIS_FAILURE));
    }

    #[test]
    fn one_sided_sign_failure_is_detected() {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        let spec = NormalFormSpec::form1(
            d,
            0,
            vec![PolySymbol::xi(d, 2).pow(2)],
            vec![],
            x1.clone(),
            -x1.pow(3),
        )
        .unwrap();
        let rep = check_side_conditions(&spec, SignGrid::default());
        let bad: Vec<_> = rep.failures().collect();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].name.contains("psi >= 0"));
        assert!(bad[0].note.as_ref().unwrap().contains("x1 = 0.1"));
    }
}
