//! Exact certificate for the factor-revealing LP behind the 6/5 bound.
//!
//! Variables are `x3..x6` (sets of each size in an optimal partition, per
//! part of the local-search solution), `z` and `r`. The LP maximises `r`.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, ratio, Rational};

const VARIABLES: [&str; 6] = ["x3", "x4", "x5", "x6", "z", "r"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `z - (x3 + x4 + x5 + x6) = 1`
    PartCount,
    /// `3 x3 + 4 x4 + 5 x5 + 6 x6 - z <= 0`
    ElementCount,
    /// `r - z + 3/4 x3 <= 0`
    SizeThree,
    /// `r - z + 3/5 (x3 + x4) <= 0`
    SizeFour,
    /// `r - z + 1/2 (x3 + x4 + x5) <= 0`
    SizeFive,
}

impl Constraint {
    pub const ALL: [Constraint; 5] = [
        Constraint::PartCount,
        Constraint::ElementCount,
        Constraint::SizeThree,
        Constraint::SizeFour,
        Constraint::SizeFive,
    ];

    fn is_equality(self) -> bool {
        self == Constraint::PartCount
    }

    /// Coefficients over `x3, x4, x5, x6, z, r` and the right-hand side.
    fn row(self) -> ([Rational; 6], Rational) {
        let z = int;
        match self {
            Constraint::PartCount => ([z(-1), z(-1), z(-1), z(-1), z(1), z(0)], z(1)),
            Constraint::ElementCount => ([z(3), z(4), z(5), z(6), z(-1), z(0)], z(0)),
            Constraint::SizeThree => ([ratio(3, 4), z(0), z(0), z(0), z(-1), z(1)], z(0)),
            Constraint::SizeFour => ([ratio(3, 5), ratio(3, 5), z(0), z(0), z(-1), z(1)], z(0)),
            Constraint::SizeFive => {
                ([ratio(1, 2), ratio(1, 2), ratio(1, 2), z(0), z(-1), z(1)], z(0))
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Constraint::PartCount => "part count",
            Constraint::ElementCount => "element count",
            Constraint::SizeThree => "size-3 bound",
            Constraint::SizeFour => "size-4 bound",
            Constraint::SizeFive => "size-5 bound",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimalSolution {
    pub x3: Rational,
    pub x4: Rational,
    pub x5: Rational,
    pub x6: Rational,
    pub z: Rational,
    pub r: Rational,
}

impl PrimalSolution {
    fn vector(&self) -> [Rational; 6] {
        [
            self.x3.clone(),
            self.x4.clone(),
            self.x5.clone(),
            self.x6.clone(),
            self.z.clone(),
            self.r.clone(),
        ]
    }

    /// Linear constraints this point violates. Sign constraints are checked
    /// by [`LpCertificate::verify`].
    pub fn violations(&self) -> Vec<Constraint> {
        let v = self.vector();
        Constraint::ALL
            .into_iter()
            .filter(|c| {
                let (row, rhs) = c.row();
                let lhs: Rational = row.iter().zip(&v).map(|(a, x)| a * x).sum();
                if c.is_equality() {
                    lhs != rhs
                } else {
                    lhs > rhs
                }
            })
            .collect()
    }
}

/// Multipliers `alpha` (part count), `beta` (element count) and `y3, y4,
/// y5` (size bounds).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSolution {
    pub alpha: Rational,
    pub beta: Rational,
    pub y3: Rational,
    pub y4: Rational,
    pub y5: Rational,
}

impl DualSolution {
    fn multipliers(&self) -> [Rational; 5] {
        [
            self.alpha.clone(),
            self.beta.clone(),
            self.y3.clone(),
            self.y4.clone(),
            self.y5.clone(),
        ]
    }

    /// `y^T A - c` per variable; nonnegative for sign-constrained variables
    /// and zero for `r` when dual feasible.
    pub fn reduced_costs(&self) -> [Rational; 6] {
        let y = self.multipliers();
        let objective = [int(0), int(0), int(0), int(0), int(0), int(1)];
        std::array::from_fn(|var| {
            let mut total = -objective[var].clone();
            for (c, mult) in Constraint::ALL.iter().zip(&y) {
                total += &c.row().0[var] * mult;
            }
            total
        })
    }

    pub fn objective(&self) -> Rational {
        Constraint::ALL
            .iter()
            .zip(self.multipliers())
            .map(|(c, y)| c.row().1 * y)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpCertificate {
    pub primal: PrimalSolution,
    pub dual: DualSolution,
    pub value: Rational,
}

impl LpCertificate {
    pub fn nominal() -> Self {
        LpCertificate {
            primal: PrimalSolution {
                x3: ratio(4, 15),
                x4: ratio(1, 15),
                x5: ratio(1, 15),
                x6: int(0),
                z: ratio(7, 5),
                r: ratio(6, 5),
            },
            dual: DualSolution {
                alpha: ratio(6, 5),
                beta: ratio(1, 5),
                y3: ratio(4, 15),
                y4: ratio(1, 3),
                y5: ratio(2, 5),
            },
            value: ratio(6, 5),
        }
    }

    /// Coefficients of `y3 (z - 3/4 x3) + y4 (z - 3/5 (x3 + x4)) + y5 (z -
    /// 1/2 (x3 + x4 + x5))` over `x3, x4, x5, x6, z`.
    pub fn chain_form(&self) -> [Rational; 5] {
        let d = &self.dual;
        let size_rows = [
            (Constraint::SizeThree, &d.y3),
            (Constraint::SizeFour, &d.y4),
            (Constraint::SizeFive, &d.y5),
        ];
        std::array::from_fn(|var| {
            size_rows
                .iter()
                .map(|(c, y)| -(&c.row().0[var]) * *y)
                .sum()
        })
    }

    /// Exact check of primal feasibility, dual feasibility, equal
    /// objectives, and the telescoped bound `r <= alpha (z - Σx) - beta (z -
    /// Σ k x_k) = alpha`.
    pub fn verify(&self) -> Result<()> {
        let p = &self.primal;
        let d = &self.dual;
        let fail = |msg: String| Err(Error::CertificateInvalid(msg));

        for (name, v) in VARIABLES.iter().zip(p.vector()).take(5) {
            if v.is_negative() {
                return fail(format!("primal {name} = {} is negative", format_rational(&v)));
            }
        }
        let violated = p.violations();
        if !violated.is_empty() {
            let names: Vec<String> = violated.iter().map(|c| c.to_string()).collect();
            return fail(format!("primal violates {}", names.join(", ")));
        }
        if p.r != self.value {
            return fail(format!(
                "primal objective {} differs from claimed value {}",
                format_rational(&p.r),
                format_rational(&self.value)
            ));
        }

        for (name, y) in ["beta", "y3", "y4", "y5"].iter().zip(&d.multipliers()[1..]) {
            if y.is_negative() {
                return fail(format!("dual {name} = {} is negative", format_rational(y)));
            }
        }
        let reduced = d.reduced_costs();
        if !reduced[5].is_zero() {
            return fail(format!(
                "dual multipliers on the size bounds sum to {}, not 1",
                format_rational(&(&reduced[5] + int(1)))
            ));
        }
        for (name, rc) in VARIABLES.iter().zip(&reduced).take(5) {
            if rc.is_negative() {
                return fail(format!("dual constraint for {name} violated by {}", format_rational(rc)));
            }
        }
        if d.objective() != self.value {
            return fail(format!(
                "dual objective {} differs from claimed value {}",
                format_rational(&d.objective()),
                format_rational(&self.value)
            ));
        }

        let chain = self.chain_form();
        let sizes = [int(3), int(4), int(5), int(6)];
        let mut target: Vec<Rational> = sizes
            .iter()
            .map(|k| -&d.alpha + &d.beta * k)
            .collect();
        target.push(&d.alpha - &d.beta);
        if chain.to_vec() != target {
            let shown: Vec<String> = chain.iter().map(format_rational).collect();
            return fail(format!(
                "telescoped form [{}] does not equal alpha (z - Σx) - beta (z - Σ k x_k)",
                shown.join(", ")
            ));
        }
        if d.alpha != self.value {
            return fail(format!(
                "telescoped bound {} differs from claimed value {}",
                format_rational(&d.alpha),
                format_rational(&self.value)
            ));
        }
        Ok(())
    }
}

/// Verifies the built-in certificate and returns it.
pub fn verify_factor_revealing_certificate() -> Result<LpCertificate> {
    let cert = LpCertificate::nominal();
    cert.verify()?;
    Ok(cert)
}
