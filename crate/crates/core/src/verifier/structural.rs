use rayon::prelude::*;

use super::grid::Region;
use super::minimize::{minimize_path, QMinimum};
use crate::error::{Error, Result};
use crate::normal_form::{build_normal_form, Cutoff, ExtendedQ, NormalFormSpec, Variant};
use crate::symbolic::phase::Var;
use crate::time_function::TimeFunctionCert;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructuralOptions {
    /// Samples per `theta` axis.
    pub points: usize,
    pub cutoff_delta: f64,
    /// Offset of the extra probes `w_bar +- probe e_k`.
    pub probe: f64,
}

impl Default for StructuralOptions {
    fn default() -> Self {
        StructuralOptions {
            points: 9,
            cutoff_delta: 0.5,
            probe: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginCheck {
    pub pass: bool,
    pub worst_margin: f64,
    /// Phase coordinates of the worst sample.
    pub witness: Vec<f64>,
    pub samples: usize,
    /// Samples skipped because a cut coordinate left `[-delta, delta]`.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchConstant {
    pub value: f64,
    pub witness: Vec<f64>,
    pub evaluated: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuralReport {
    /// `a/N >= m_1 (t - phi)^2 + rem` at reconstruction points.
    pub kihon: MarginCheck,
    /// `m_1(0, .) phi^2 + rem >= 0`.
    pub t_phi_lower: MarginCheck,
    /// `inf a / (t^2 |xi|^2)` where the branch guard is negative.
    pub c1: Option<BranchConstant>,
    /// `inf a / ((t - phi)^2 |xi|^2)` where the guard is nonnegative.
    pub c_prime: Option<BranchConstant>,
    /// `max |m_1(t, .) - m_1(0, .)| / t`.
    pub lipschitz_c: f64,
    pub m1_min: f64,
    pub max_hessian_cond: f64,
    pub theta_samples: usize,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        let pos = |b: &Option<BranchConstant>| b.as_ref().is_none_or(|b| b.value > 0.0);
        self.kihon.pass
            && self.t_phi_lower.pass
            && pos(&self.c1)
            && pos(&self.c_prime)
            && self.lipschitz_c.is_finite()
            && self.m1_min > 0.0
    }
}

fn axis(h: f64, n: usize) -> Vec<f64> {
    let mid = (n - 1) as f64 / 2.0;
    (0..n)
        .map(|k| if 2 * k + 1 == n { 0.0 } else { h * (k as f64 - mid) / mid })
        .collect()
}

pub fn check_structural(
    spec: &NormalFormSpec,
    cert: &TimeFunctionCert,
    region: &Region,
    opts: StructuralOptions,
) -> Result<StructuralReport> {
    region.validate()?;
    if opts.points < 2 {
        return Err(Error::InvalidArgument("structural grid needs at least 2 points".into()));
    }
    let cutoff = Cutoff::new(opts.cutoff_delta)
        .ok_or_else(|| Error::InvalidArgument("cutoff delta must be positive".into()))?;
    let eq = ExtendedQ::new(spec, cutoff)?;
    let d = spec.dim();
    let p = spec.p();
    let nb = d - p;
    let n = opts.points;

    // theta-sample axes besides t: x_b, xi_b (xi_d held at 1), x_p (form 2)
    let mut rest_axes: Vec<Vec<f64>> = Vec::new();
    for _ in 0..nb {
        rest_axes.push(axis(region.x_half, n));
    }
    for j in 0..nb {
        rest_axes.push(if p + 1 + j == d { vec![0.0] } else { axis(region.xi_half, n) });
    }
    let form2 = spec.variant() == Variant::Form2;
    if form2 {
        rest_axes.push(axis(region.x_half, n));
    }
    let t_axis: Vec<f64> = (0..n).map(|k| region.t_max * k as f64 / (n - 1) as f64).collect();
    let rest_len: usize = rest_axes.iter().map(|a| a.len()).product();
    let rest_point = |mut idx: usize| -> (Vec<f64>, f64) {
        let mut v = vec![0.0; rest_axes.len()];
        for (k, a) in rest_axes.iter().enumerate().rev() {
            v[k] = a[idx % a.len()];
            idx /= a.len();
        }
        let xp = if form2 { v.pop().expect("x_p axis") } else { 0.0 };
        (v, xp)
    };

    // m_1 along each t-line, warm-started in t
    let lines: Vec<Vec<QMinimum>> = (0..rest_len)
        .into_par_iter()
        .map(|r| {
            let (z, xp) = rest_point(r);
            let thetas: Vec<Vec<f64>> = t_axis.iter().map(|&t| eq.theta_on_slice(t, &z, xp)).collect();
            minimize_path(&eq, &thetas)
        })
        .collect::<Result<_>>()?;

    let mut m1_min = f64::INFINITY;
    let mut max_cond: f64 = 1.0;
    let mut lipschitz_c: f64 = 0.0;
    let mut kihon = MarginCheck {
        pass: true,
        worst_margin: f64::INFINITY,
        witness: vec![],
        samples: 0,
        skipped: 0,
    };
    let mut sita = kihon.clone();
    let mut scale: f64 = 1.0;
    for (r, line) in lines.iter().enumerate() {
        let (z, xp) = rest_point(r);
        let rem = eq.remainder(&z, xp);
        let m0 = line[0].m;
        // t = 0 lower bound
        let phi0 = if form2 { xp } else { eq.phi_of(&z) };
        let th0 = eq.theta_on_slice(0.0, &z, xp);
        let wit0 = eq.reconstruct(&line[0].w_bar, &th0);
        let v = m0 * phi0 * phi0 + rem;
        sita.samples += 1;
        if v < sita.worst_margin {
            sita.worst_margin = v;
            sita.witness = wit0;
        }
        for (k, (&t, mm)) in t_axis.iter().zip(line).enumerate() {
            m1_min = m1_min.min(mm.m);
            max_cond = max_cond.max(mm.hessian_cond);
            if k > 0 {
                lipschitz_c = lipschitz_c.max((mm.m - m0).abs() / t);
            }
            let th = eq.theta_on_slice(t, &z, xp);
            let eps = th[th.len() - 1];
            let rhs = mm.m * eps * eps + rem;
            let mut probes = vec![mm.w_bar.clone(), vec![0.0; mm.w_bar.len()]];
            for j in 0..mm.w_bar.len() {
                for s in [-1.0, 1.0] {
                    let mut w = mm.w_bar.clone();
                    w[j] += s * opts.probe;
                    probes.push(w);
                }
            }
            for w in probes {
                let sides = eq.identity_sides(&w, t, &z, xp);
                if sides.cutoff_active {
                    kihon.skipped += 1;
                    continue;
                }
                kihon.samples += 1;
                scale = scale.max(sides.lhs.abs());
                let margin = sides.lhs - rhs;
                if margin < kihon.worst_margin {
                    kihon.worst_margin = margin;
                    kihon.witness = eq.reconstruct(&w, &th);
                }
            }
        }
    }
    kihon.pass = kihon.samples > 0 && kihon.worst_margin >= -1e-9 * scale;
    sita.pass = sita.worst_margin >= -1e-9 * scale;

    // branch constants on the region grid
    let a = build_normal_form(spec)?;
    let ac = a.compile();
    let pc = cert.phi.compile();
    let guard_idx = if form2 { Some(Var::X(p).index(d)) } else { None };
    let grid = region.grid(d, false);
    let eta = region.eta();
    let xi2 = |c: &[f64]| (1..=d).map(|i| c[Var::Xi(i).index(d)].powi(2)).sum::<f64>();
    let guard = |c: &[f64]| match guard_idx {
        Some(k) => c[k],
        None => pc.eval(c),
    };
    let branch = |negative: bool| {
        let ext = grid.extremes(|c| {
            let g = guard(c);
            if (g < 0.0) != negative {
                return None;
            }
            let base = if negative { c[0] } else { c[0] - pc.eval(c) };
            let den = base * base * xi2(c);
            (den >= eta).then(|| ac.eval(c) / den)
        });
        ext.min.map(|(value, i)| BranchConstant {
            value,
            witness: grid.point(i),
            evaluated: ext.evaluated,
        })
    };
    let (c1, c_prime) = (branch(true), branch(false));

    Ok(StructuralReport {
        kihon,
        t_phi_lower: sita,
        c1,
        c_prime,
        lipschitz_c,
        m1_min,
        max_hessian_cond: max_cond,
        theta_samples: rest_len * n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::rat;
    use crate::symbolic::poly::PolySymbol;
    use crate::time_function::construct_time_function;

    fn b1() -> NormalFormSpec {
        let d = 2;
        let x1 = PolySymbol::x(d, 1);
        NormalFormSpec::form1(d, 0, vec![PolySymbol::xi(d, 2).pow(2)], vec![], x1.clone(), x1.pow(3))
            .unwrap()
    }

    fn b2() -> NormalFormSpec {
        let d = 2;
        let xi2sq = PolySymbol::xi(d, 2).pow(2);
        let g = PolySymbol::x(d, 1).pow(3) * &xi2sq;
        NormalFormSpec::form2(d, 1, vec![xi2sq], vec![PolySymbol::constant(d, rat(1, 2))], g)
            .unwrap()
    }

    fn run(spec: &NormalFormSpec) -> StructuralReport {
        let cert = construct_time_function(spec, &rat(1, 100)).unwrap();
        let region = Region::default().with_points(17);
        check_structural(spec, &cert, &region, StructuralOptions::default()).unwrap()
    }

    #[test]
    fn b1_branch_constants() {
        let r = run(&b1());
        assert!(r.passed(), "{r:?}");
        assert!(r.c1.as_ref().unwrap().value >= 0.98);
        assert!(r.c_prime.as_ref().unwrap().value >= 0.98);
        assert_eq!(r.lipschitz_c, 0.0);
        assert_eq!(r.m1_min, 1.0);
    }

    #[test]
    fn b2_structure() {
        let r = run(&b2());
        assert!(r.passed(), "{r:?}");
        // x_p = 0 slice: g(0, z) = 0 and phi = 0 give a zero margin
        assert_eq!(r.t_phi_lower.worst_margin, 0.0);
        assert!(r.kihon.worst_margin >= -1e-12);
        assert!(r.kihon.samples > 0);
        assert!((r.m1_min - 2.0).abs() < 1e-12);
    }
}
