//! Two-phase dense tableau simplex with Bland's rule, generic over an exact
//! field. A fixed-width rational is tried first; on overflow the same pivot
//! sequence is replayed with arbitrary precision, so results never depend on
//! which field finished the job.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

pub(crate) struct Overflow;

pub(crate) trait Field: Clone + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn from_rational(r: &Rational) -> Option<Self>;
    fn to_rational(&self) -> Rational;
}

impl Field for Ratio<i128> {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        // Keep headroom so that negation and reduction never overflow.
        let n = r.numer().to_i128()?;
        let d = r.denom().to_i128()?;
        (n != i128::MIN && d != i128::MIN).then(|| Ratio::new_raw(n, d))
    }
    fn to_rational(&self) -> Rational {
        Rational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    /// `a x + s = b` with `s >= 0`.
    SlackPlus,
    /// `a x - s = b` with `s >= 0`.
    SlackMinus,
    Equality,
}

/// `rows[i] . x (+/- slack) = rhs[i]`, `x >= 0`, minimize `cost . x`.
pub(crate) struct StandardForm {
    pub n: usize,
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub kinds: Vec<RowKind>,
    pub rhs: Vec<Rational>,
    pub cost: Option<Vec<Rational>>,
}

pub(crate) enum Outcome {
    Optimal(Vec<Rational>),
    Infeasible,
    Unbounded,
}

pub(crate) fn solve(sf: &StandardForm) -> Outcome {
    match run::<Ratio<i128>>(sf) {
        Ok(out) => out,
        Err(Overflow) => match run::<Rational>(sf) {
            Ok(out) => out,
            Err(Overflow) => unreachable!("arbitrary precision cannot overflow"),
        },
    }
}

struct Tableau<F> {
    t: Vec<Vec<F>>,
    obj: Vec<F>,
    basis: Vec<usize>,
    /// Column index of the right-hand side.
    rhs: usize,
    blocked: Vec<bool>,
}

fn ok<T>(v: Option<T>) -> Result<T, Overflow> {
    v.ok_or(Overflow)
}

impl<F: Field> Tableau<F> {
    fn pivot(&mut self, r: usize, c: usize) -> Result<(), Overflow> {
        let piv = self.t[r][c].clone();
        let nz: Vec<usize> = (0..=self.rhs).filter(|&j| !self.t[r][j].is_zero()).collect();
        for &j in &nz {
            self.t[r][j] = ok(self.t[r][j].div(&piv))?;
        }
        let prow = self.t[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for &j in &nz {
                let delta = ok(f.mul(&prow[j]))?;
                self.t[i][j] = ok(self.t[i][j].sub(&delta))?;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &nz {
                let delta = ok(f.mul(&prow[j]))?;
                self.obj[j] = ok(self.obj[j].sub(&delta))?;
            }
        }
        self.basis[r] = c;
        Ok(())
    }

    /// Runs Bland's rule to optimality. Returns `false` when unbounded.
    fn optimize(&mut self) -> Result<bool, Overflow> {
        loop {
            let entering = (0..self.rhs).find(|&j| !self.blocked[j] && self.obj[j].is_neg());
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut best: Option<(usize, F)> = None;
            for i in 0..self.t.len() {
                if !self.t[i][c].is_pos() {
                    continue;
                }
                let ratio = ok(self.t[i][self.rhs].div(&self.t[i][c]))?;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c)?,
            }
        }
    }

    /// Reduced costs and objective value for costs `c` over the current basis.
    fn price(&mut self, c: &[F]) -> Result<(), Overflow> {
        let width = self.rhs + 1;
        let mut obj: Vec<F> = (0..width)
            .map(|j| if j < self.rhs { c[j].clone() } else { F::zero() })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if self.t[i][j].is_zero() {
                    continue;
                }
                let delta = ok(cb.mul(&self.t[i][j]))?;
                obj[j] = ok(obj[j].sub(&delta))?;
            }
        }
        self.obj = obj;
        Ok(())
    }
}

fn run<F: Field>(sf: &StandardForm) -> Result<Outcome, Overflow> {
    let m = sf.rows.len();
    let n = sf.n;
    let slack_count = sf.kinds.iter().filter(|k| **k != RowKind::Equality).count();
    // Rows are sign-normalized so that rhs >= 0; a row keeps its slack as the
    // initial basic variable only when the slack coefficient stays +1.
    let mut negate = vec![false; m];
    let mut needs_art = vec![false; m];
    for i in 0..m {
        negate[i] = sf.rhs[i].is_negative();
        needs_art[i] = match sf.kinds[i] {
            RowKind::SlackPlus => negate[i],
            RowKind::SlackMinus => !negate[i],
            RowKind::Equality => true,
        };
    }
    let art_count = needs_art.iter().filter(|b| **b).count();
    let cols = n + slack_count + art_count;
    let rhs_col = cols;
    let mut t = vec![vec![F::zero(); cols + 1]; m];
    let mut basis = vec![0; m];
    let mut slack = n;
    let mut art = n + slack_count;
    for i in 0..m {
        let sign = |v: F| if negate[i] { v.neg() } else { v };
        for (j, a) in &sf.rows[i] {
            let v = ok(F::from_rational(a))?;
            t[i][*j] = ok(t[i][*j].add(&sign(v)))?;
        }
        t[i][rhs_col] = sign(ok(F::from_rational(&sf.rhs[i]))?);
        match sf.kinds[i] {
            RowKind::SlackPlus | RowKind::SlackMinus => {
                let coef = if sf.kinds[i] == RowKind::SlackPlus {
                    F::one()
                } else {
                    F::one().neg()
                };
                t[i][slack] = sign(coef);
                if !needs_art[i] {
                    basis[i] = slack;
                }
                slack += 1;
            }
            RowKind::Equality => {}
        }
        if needs_art[i] {
            t[i][art] = F::one();
            basis[i] = art;
            art += 1;
        }
    }
    let first_art = n + slack_count;
    let mut tab = Tableau {
        t,
        obj: Vec::new(),
        basis,
        rhs: rhs_col,
        blocked: vec![false; cols],
    };

    if art_count > 0 {
        let phase1: Vec<F> = (0..cols)
            .map(|j| if j >= first_art { F::one() } else { F::zero() })
            .collect();
        tab.price(&phase1)?;
        tab.optimize()?;
        if !tab.obj[rhs_col].is_zero() {
            return Ok(Outcome::Infeasible);
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= first_art {
                match (0..first_art).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j)?,
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for j in first_art..cols {
            tab.blocked[j] = true;
        }
    }

    if let Some(cost) = &sf.cost {
        let mut c = vec![F::zero(); cols];
        for (j, v) in cost.iter().enumerate() {
            c[j] = ok(F::from_rational(v))?;
        }
        tab.price(&c)?;
        if !tab.optimize()? {
            return Ok(Outcome::Unbounded);
        }
    }

    let mut x = vec![<Rational as Zero>::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[i][rhs_col].to_rational();
        }
    }
    Ok(Outcome::Optimal(x))
}
