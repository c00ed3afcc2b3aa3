//! Verification of user-supplied homogeneous symplectic frames.

use num_traits::Zero;

use super::calculus::{homogeneity_check, poisson_bracket};
use super::phase::PhasePoint;
use super::poly::PolySymbol;
use crate::error::{Error, Result};

/// Candidate coordinates `(X_j, Xi_j)`, `j = first..=d`, around a base point.
#[derive(Clone, Debug)]
pub struct CandidateFrame {
    pub first: usize,
    pub pairs: Vec<(PolySymbol, PolySymbol)>,
    pub base: PhasePoint,
}

impl CandidateFrame {
    pub fn new(first: usize, pairs: Vec<(PolySymbol, PolySymbol)>, base: PhasePoint) -> Result<Self> {
        let d = base.dim();
        for (x, xi) in &pairs {
            if x.dim() != d || xi.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: if x.dim() != d { x.dim() } else { xi.dim() },
                });
            }
        }
        if first == 0 || first + pairs.len() != d + 1 {
            return Err(Error::InvalidArgument(format!(
                "frame starting at j = {first} must have {} pairs for d = {d}",
                (d + 1).saturating_sub(first)
            )));
        }
        Ok(CandidateFrame { first, pairs, base })
    }

    /// The trivial frame `(x_j, xi_j)`, `j = first..=d`, at `(0, e_d)`.
    pub fn identity(dim: usize, first: usize) -> Self {
        let pairs = (first..=dim)
            .map(|j| (PolySymbol::x(dim, j), PolySymbol::xi(dim, j)))
            .collect();
        CandidateFrame {
            first,
            pairs,
            base: PhasePoint::base(dim),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameFailure {
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameReport {
    pub checks_run: usize,
    pub failures: Vec<FrameFailure>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, check: String, detail: impl FnOnce() -> String) {
        self.checks_run += 1;
        if !ok {
            self.failures.push(FrameFailure {
                check,
                detail: detail(),
            });
        }
    }
}

pub fn check_frame(frame: &CandidateFrame) -> FrameReport {
    let mut report = FrameReport::default();
    let d = frame.base.dim();
    let label = |k: usize| frame.first + k;
    let one = PolySymbol::one(d);

    let bracket = |f: &PolySymbol, g: &PolySymbol| poisson_bracket(f, g).expect("dims checked");

    for (i, (xi_, xii)) in frame.pairs.iter().enumerate() {
        report.record(
            homogeneity_check(xi_, 0).homogeneous,
            format!("X{} homogeneous of degree 0", label(i)),
            || format!("X{} = {xi_}", label(i)),
        );
        report.record(
            homogeneity_check(xii, 1).homogeneous,
            format!("Xi{} homogeneous of degree 1", label(i)),
            || format!("Xi{} = {xii}", label(i)),
        );
        for (j, (xj, xij)) in frame.pairs.iter().enumerate() {
            if i < j {
                let b = bracket(xi_, xj);
                report.record(b.is_zero(), format!("{{X{}, X{}}} = 0", label(i), label(j)), || {
                    format!("got {b}")
                });
                let b = bracket(xii, xij);
                report.record(
                    b.is_zero(),
                    format!("{{Xi{}, Xi{}}} = 0", label(i), label(j)),
                    || format!("got {b}"),
                );
            }
            let b = bracket(xii, xj);
            let want = if i == j { one.clone() } else { PolySymbol::zero(d) };
            report.record(
                b == want,
                format!("{{Xi{}, X{}}} = {}", label(i), label(j), u8::from(i == j)),
                || format!("got {b}"),
            );
        }
    }

    let last = frame.pairs.len().saturating_sub(1);
    for (i, (x, xi)) in frame.pairs.iter().enumerate() {
        let xv = x.eval(&frame.base).expect("dims checked");
        report.record(xv.is_zero(), format!("X{}(base) = 0", label(i)), || {
            format!("got {xv}")
        });
        let v = xi.eval(&frame.base).expect("dims checked");
        if i < last {
            report.record(v.is_zero(), format!("Xi{}(base) = 0", label(i)), || {
                format!("got {v}")
            });
        } else {
            report.record(!v.is_zero(), format!("Xi{}(base) != 0", label(i)), || {
                "got 0".to_string()
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::phase::rat;

    #[test]
    fn identity_frame_passes() {
        for d in 1..4 {
            let r = check_frame(&CandidateFrame::identity(d, 1));
            assert!(r.passed(), "{:?}", r.failures);
        }
    }

    #[test]
    fn shifted_momentum_frame_passes() {
        // Xi_1 = xi_1 - h with h = 3/2 xi_2, which vanishes at (0, e_3); the
        // companion pair X_2 = x_2 + 3/2 x_1 keeps the frame canonical.
        let d = 3;
        let c = rat(3, 2);
        let xi1 = &PolySymbol::xi(d, 1) - &PolySymbol::xi(d, 2).scale(&c);
        let x1 = PolySymbol::x(d, 1);
        assert_eq!(poisson_bracket(&xi1, &x1).unwrap(), PolySymbol::one(d));
        let frame = CandidateFrame::new(
            1,
            vec![
                (x1.clone(), xi1),
                (&PolySymbol::x(d, 2) + &x1.scale(&c), PolySymbol::xi(d, 2)),
                (PolySymbol::x(d, 3), PolySymbol::xi(d, 3)),
            ],
            PhasePoint::base(d),
        )
        .unwrap();
        let r = check_frame(&frame);
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn repeated_position_fails() {
        let d = 2;
        let frame = CandidateFrame::new(
            1,
            vec![
                (PolySymbol::x(d, 1), PolySymbol::xi(d, 1)),
                (PolySymbol::x(d, 1), PolySymbol::xi(d, 2)),
            ],
            PhasePoint::base(d),
        )
        .unwrap();
        let r = check_frame(&frame);
        assert!(!r.passed());
        let names: Vec<&str> = r.failures.iter().map(|f| f.check.as_str()).collect();
        assert!(names.contains(&"{Xi1, X2} = 0"));
        assert!(names.contains(&"{Xi2, X2} = 1"));
    }

    #[test]
    fn point_conditions() {
        let d = 1;
        let frame = CandidateFrame::new(
            1,
            vec![(&PolySymbol::x(d, 1) + &PolySymbol::one(d), PolySymbol::xi(d, 1))],
            PhasePoint::origin(d),
        )
        .unwrap();
        let r = check_frame(&frame);
        let names: Vec<&str> = r.failures.iter().map(|f| f.check.as_str()).collect();
        assert_eq!(names, vec!["X1(base) = 0", "Xi1(base) != 0"]);
    }

    #[test]
    fn pair_count_is_validated() {
        assert!(CandidateFrame::new(1, vec![], PhasePoint::base(2)).is_err());
    }
}
