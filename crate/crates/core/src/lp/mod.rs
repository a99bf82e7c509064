//! Exact rational linear programming and the capacitated k-center relaxation.

mod model;
mod simplex;

pub use model::{
    build_lp, check_solution, min_cost_for_component, min_feasible_k, min_feasible_k_with,
    solve_center_lp, CenterLp, KSearch, LpMode, LpSolution, MinCost, Roles,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::Zero;

use crate::rational::{format as fmt_q, Rational};
use simplex::{Outcome, RowKind, StandardForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("objective is unbounded")]
    Unbounded,
    #[error("solution violates a constraint: {0}")]
    ConstraintViolated(String),
    #[error("malformed program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub lower: Rational,
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// A linear program with finite lower bounds on every variable and an
/// optional objective to minimize.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Option<Vec<(usize, Rational)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        values: Vec<Rational>,
        /// Zero for pure feasibility programs.
        objective: Rational,
    },
    Infeasible,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, lower: Rational, upper: Option<Rational>) -> usize {
        self.vars.push(Variable { lower, upper });
        self.vars.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, Rational)>) {
        self.objective = Some(coeffs);
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn objective(&self) -> Option<&[(usize, Rational)]> {
        self.objective.as_deref()
    }

    fn standard_form(&self) -> Result<StandardForm, LpError> {
        let n = self.vars.len();
        let mut rows = Vec::new();
        let mut kinds = Vec::new();
        let mut rhs = Vec::new();
        // x = lower + x', x' >= 0
        for c in &self.constraints {
            let mut shifted = c.rhs.clone();
            for (j, a) in &c.coeffs {
                if *j >= n {
                    return Err(LpError::Malformed(format!("variable {j} out of range")));
                }
                shifted -= a * &self.vars[*j].lower;
            }
            rows.push(c.coeffs.clone());
            kinds.push(match c.sense {
                Sense::Le => RowKind::SlackPlus,
                Sense::Ge => RowKind::SlackMinus,
                Sense::Eq => RowKind::Equality,
            });
            rhs.push(shifted);
        }
        for (j, v) in self.vars.iter().enumerate() {
            if let Some(u) = &v.upper {
                if u < &v.lower {
                    return Err(LpError::Malformed(format!("variable {j} has upper < lower")));
                }
                rows.push(alloc::vec![(j, Rational::from_integer(1.into()))]);
                kinds.push(RowKind::SlackPlus);
                rhs.push(u - &v.lower);
            }
        }
        let cost = self.objective.as_ref().map(|obj| {
            let mut c = alloc::vec![Rational::zero(); n];
            for (j, a) in obj {
                c[*j] += a;
            }
            c
        });
        Ok(StandardForm {
            n,
            rows,
            kinds,
            rhs,
            cost,
        })
    }

    /// Solves exactly. Deterministic for a given program.
    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        let sf = self.standard_form()?;
        match simplex::solve(&sf) {
            Outcome::Infeasible => Ok(LpOutcome::Infeasible),
            Outcome::Unbounded => Err(LpError::Unbounded),
            Outcome::Optimal(shifted) => {
                let values: Vec<Rational> = shifted
                    .into_iter()
                    .zip(&self.vars)
                    .map(|(x, v)| x + &v.lower)
                    .collect();
                let objective = self.evaluate_objective(&values);
                self.check(&values)?;
                Ok(LpOutcome::Optimal { values, objective })
            }
        }
    }

    pub fn evaluate_objective(&self, values: &[Rational]) -> Rational {
        self.objective.as_ref().map_or_else(Rational::zero, |obj| {
            obj.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &values[*j])
        })
    }

    /// Exact check of bounds and constraints.
    pub fn check(&self, values: &[Rational]) -> Result<(), LpError> {
        if values.len() != self.vars.len() {
            return Err(LpError::Malformed(format!(
                "expected {} values, got {}",
                self.vars.len(),
                values.len()
            )));
        }
        for (j, (x, v)) in values.iter().zip(&self.vars).enumerate() {
            if x < &v.lower || v.upper.as_ref().is_some_and(|u| x > u) {
                return Err(LpError::ConstraintViolated(format!("bounds of variable {j}")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = c
                .coeffs
                .iter()
                .fold(Rational::zero(), |acc, (j, a)| acc + a * &values[*j]);
            let holds = match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Ge => lhs >= c.rhs,
                Sense::Eq => lhs == c.rhs,
            };
            if !holds {
                return Err(LpError::ConstraintViolated(format!("row {i}")));
            }
        }
        Ok(())
    }

    /// Plain-text listing of the program, one row per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let term = |s: &mut String, coeffs: &[(usize, Rational)]| {
            for (i, (j, a)) in coeffs.iter().enumerate() {
                let sep = if i == 0 { "" } else { " + " };
                let _ = write!(s, "{sep}{} x{j}", fmt_q(a));
            }
        };
        if let Some(obj) = &self.objective {
            s.push_str("min: ");
            term(&mut s, obj);
            s.push('\n');
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = write!(s, "r{i}: ");
            term(&mut s, &c.coeffs);
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(s, " {op} {}", fmt_q(&c.rhs));
        }
        for (j, v) in self.vars.iter().enumerate() {
            match &v.upper {
                Some(u) => {
                    let _ = writeln!(s, "{} <= x{j} <= {}", fmt_q(&v.lower), fmt_q(u));
                }
                None => {
                    let _ = writeln!(s, "x{j} >= {}", fmt_q(&v.lower));
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use alloc::vec;

    #[test]
    fn minimizes_single_bounded_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(int(0), Some(int(1)));
        lp.set_objective(vec![(x, int(1))]);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { values, objective } => {
                assert_eq!(values, vec![int(0)]);
                assert_eq!(objective, int(0));
            }
            LpOutcome::Infeasible => panic!("feasible"),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let mut lp = LinearProgram::new();
        let x = lp.add_var(int(0), None);
        let y = lp.add_var(int(0), None);
        lp.add_constraint(vec![(x, int(1))], Sense::Le, int(4));
        lp.add_constraint(vec![(y, int(2))], Sense::Le, int(12));
        lp.add_constraint(vec![(x, int(3)), (y, int(2))], Sense::Le, int(18));
        lp.set_objective(vec![(x, int(-3)), (y, int(-5))]);
        let LpOutcome::Optimal { values, objective } = lp.solve().unwrap() else {
            panic!("feasible")
        };
        assert_eq!(values, vec![int(2), int(6)]);
        assert_eq!(objective, int(-36));
    }

    #[test]
    fn fractional_optimum_and_lower_bounds() {
        // min x + y s.t. 2x + y >= 3, x + 3y >= 4, x >= 1/2
        let mut lp = LinearProgram::new();
        let x = lp.add_var(ratio(1, 2), None);
        let y = lp.add_var(int(0), None);
        lp.add_constraint(vec![(x, int(2)), (y, int(1))], Sense::Ge, int(3));
        lp.add_constraint(vec![(x, int(1)), (y, int(3))], Sense::Ge, int(4));
        lp.set_objective(vec![(x, int(1)), (y, int(1))]);
        let LpOutcome::Optimal { values, objective } = lp.solve().unwrap() else {
            panic!("feasible")
        };
        assert_eq!(values, vec![int(1), int(1)]);
        assert_eq!(objective, int(2));
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(int(0), Some(int(1)));
        lp.add_constraint(vec![(x, int(1))], Sense::Ge, int(2));
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(int(0), None);
        lp.set_objective(vec![(x, int(-1))]);
        assert_eq!(lp.solve(), Err(LpError::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(int(0), None);
        let y = lp.add_var(int(0), None);
        lp.add_constraint(vec![(x, int(1)), (y, int(1))], Sense::Eq, int(1));
        lp.add_constraint(vec![(x, int(2)), (y, int(2))], Sense::Eq, int(2));
        lp.set_objective(vec![(x, int(1)), (y, int(2))]);
        let LpOutcome::Optimal { values, .. } = lp.solve().unwrap() else {
            panic!("feasible")
        };
        assert_eq!(values, vec![int(1), int(0)]);
    }

    #[test]
    fn dump_lists_rows() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(int(0), Some(int(1)));
        lp.add_constraint(vec![(x, ratio(1, 2))], Sense::Le, int(1));
        let d = lp.dump();
        assert!(d.contains("r0: 1/2 x0 <= 1"));
        assert!(d.contains("0 <= x0 <= 1"));
    }
}
