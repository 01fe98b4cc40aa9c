use std::fmt::{self, Write as _};

use num_rational::Ratio;
use serde::Serialize;

/// A coefficient with its exact rational value when one is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coef {
    pub value: f64,
    pub exact: Option<Ratio<i64>>,
}

impl Coef {
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom).into()
    }

    pub fn int(v: i64) -> Self {
        Ratio::from_integer(v).into()
    }

    /// A real parameter; it keeps an exact form only if a small fraction
    /// reproduces it bit for bit.
    pub fn real(value: f64) -> Self {
        let exact = Ratio::<i64>::approximate_float(value)
            .filter(|r| *r.denom() <= 1_000_000 && ratio_to_f64(*r) == value);
        Coef { value, exact }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0
    }
}

impl From<Ratio<i64>> for Coef {
    fn from(r: Ratio<i64>) -> Self {
        Coef {
            value: ratio_to_f64(r),
            exact: Some(r),
        }
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{:?}", self.value),
        }
    }
}

pub(crate) fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpFamily {
    Beta,
    BetaLambda,
    GeneralLb,
}

impl LpFamily {
    pub fn name(self) -> &'static str {
        match self {
            LpFamily::Beta => "beta",
            LpFamily::BetaLambda => "beta_lambda",
            LpFamily::GeneralLb => "general_lb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpMeta {
    pub family: LpFamily,
    pub n: usize,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
}

/// `Σ_k coefs[k].1 · x[coefs[k].0] >= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coefs: Vec<(usize, Coef)>,
    pub rhs: Coef,
}

impl Constraint {
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|(j, c)| c.value * x[*j]).sum()
    }
}

/// Minimize `objective · x + objective_offset` subject to `≥` rows and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub meta: LpMeta,
    pub var_names: Vec<String>,
    pub objective: Vec<Coef>,
    /// Constant added to the objective on report; the solver ignores it.
    pub objective_offset: Coef,
    pub constraints: Vec<Constraint>,
}

impl LpModel {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|v| v == name)
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    /// Objective value including the offset.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, v)| c.value * v)
            .sum::<f64>()
            + self.objective_offset.value
    }

    /// Largest shortfall over all rows and non-negativity bounds; `<= 0` when feasible.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| c.rhs.value - c.lhs(x));
        let bounds = x.iter().map(|v| -v);
        rows.chain(bounds).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Plain-text listing, one constraint per line, exact fractions where known.
    pub fn to_listing(&self) -> String {
        let mut out = String::new();
        let meta = &self.meta;
        let _ = write!(out, "\\ family {} n {}", meta.family.name(), meta.n);
        if let Some(l) = meta.lambda {
            let _ = write!(out, " lambda {l:?}");
        }
        if let Some(b) = meta.beta {
            let _ = write!(out, " beta {b:?}");
        }
        out.push('\n');
        if !self.objective_offset.is_zero() {
            let _ = writeln!(out, "\\ objective offset {}", self.objective_offset);
        }
        out.push_str("minimize\n obj:");
        let terms: Vec<(usize, Coef)> = self
            .objective
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        self.write_terms(&mut out, &terms);
        out.push_str("\nsubject to\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            self.write_terms(&mut out, &c.coefs);
            let _ = writeln!(out, " >= {}", c.rhs);
        }
        out.push_str("bounds\n all variables >= 0\nend\n");
        out
    }

    fn write_terms(&self, out: &mut String, terms: &[(usize, Coef)]) {
        if terms.is_empty() {
            out.push_str(" 0");
        }
        for (k, (j, c)) in terms.iter().enumerate() {
            let negative = c.value < 0.0;
            let magnitude = Coef {
                value: c.value.abs(),
                exact: c.exact.map(|r| if negative { -r } else { r }),
            };
            let sign = match (k, negative) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => "+ ",
                (_, true) => "- ",
            };
            let coef = if magnitude.value == 1.0 {
                String::new()
            } else {
                format!("{magnitude} ")
            };
            let _ = write!(out, " {sign}{coef}{}", self.var_names[*j]);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective including the model's offset; meaningful when optimal.
    pub objective: f64,
    pub primal: Vec<f64>,
    pub max_violation: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}
