//! Golden-value checks: numeric Legendre conjugates against the published
//! closed forms, and the two expressions of the trace functional against each
//! other.

use serde::Serialize;

use crate::error::Result;
use crate::matcore::random_pd;
use crate::posmap::PositiveMap;
use crate::scalarfun::{legendre_numeric, log_grid, tilde, ScalarFunction, LEGENDRE_TOL};
use crate::tracefun::{core_functional, inverse_form, FunctionalSpec, Mode};

pub const GOLDEN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct GoldenRow {
    pub name: String,
    pub max_error: f64,
    /// Argument at which the error is largest.
    pub worst_t: f64,
}

impl GoldenRow {
    pub fn passed(&self) -> bool {
        self.max_error <= GOLDEN_TOL
    }
}

type Formula = Box<dyn Fn(f64) -> f64>;

/// `(label, function to conjugate, published formula)`.
fn legendre_cases() -> Vec<(String, ScalarFunction, Formula)> {
    let mut cases: Vec<(String, ScalarFunction, Formula)> = Vec::new();
    // breve(h) = check(h~)
    cases.push((
        "breve(log)".into(),
        tilde(&ScalarFunction::Log),
        Box::new(|t: f64| 1.0 + t.ln()),
    ));
    for r in [0.25, 0.5, 1.0, 2.0] {
        cases.push((
            format!("breve(power:{r})"),
            tilde(&ScalarFunction::Power(r)),
            Box::new(move |t: f64| {
                r.powf(1.0 / (r + 1.0)) * (1.0 + 1.0 / r) * t.powf(r / (r + 1.0))
            }),
        ));
    }
    for r in [0.25, 0.5] {
        cases.push((
            format!("breve(negpower:{r})"),
            tilde(&ScalarFunction::NegPower(r)),
            Box::new(move |t: f64| r.powf(r / (1.0 - r)) * (r - 1.0) * t.powf(r / (r - 1.0))),
        ));
    }
    cases.push((
        "check(log)".into(),
        ScalarFunction::Log,
        Box::new(|t: f64| 1.0 + t.ln()),
    ));
    for r in [0.25, 0.5] {
        cases.push((
            format!("check(power:{r})"),
            ScalarFunction::Power(r),
            Box::new(move |t: f64| r.powf(r / (1.0 - r)) * (r - 1.0) * t.powf(r / (r - 1.0))),
        ));
    }
    for r in [0.25, 0.5, 1.0, 2.0] {
        cases.push((
            format!("check(negpower:{r})"),
            ScalarFunction::NegPower(r),
            Box::new(move |t: f64| {
                r.powf(1.0 / (r + 1.0)) * (1.0 + 1.0 / r) * t.powf(r / (r + 1.0))
            }),
        ));
    }
    cases
}

/// Relative error `|formula - numeric| / (1 + |formula|)` on the 21-point grid.
pub fn legendre_rows() -> Result<Vec<GoldenRow>> {
    let grid = log_grid();
    legendre_cases()
        .into_iter()
        .map(|(name, f, formula)| {
            let mut row = GoldenRow {
                name,
                max_error: 0.0,
                worst_t: grid[0],
            };
            for &t in &grid {
                let numeric = legendre_numeric(&f, t, LEGENDRE_TOL)?;
                let exact = formula(t);
                let err = if numeric.at_boundary {
                    f64::INFINITY
                } else {
                    (exact - numeric.value).abs() / (1.0 + exact.abs())
                };
                if err > row.max_error {
                    row.max_error = err;
                    row.worst_t = t;
                }
            }
            Ok(row)
        })
        .collect()
}

/// `core_functional` against `inverse_form` on random convex-mode instances.
pub fn proof_identity_rows(instances: usize) -> Result<Vec<GoldenRow>> {
    let inv = ScalarFunction::InvPower(1.0);
    let half = ScalarFunction::InvPower(0.5);
    let mut rows = Vec::new();
    for (i, h) in [
        ScalarFunction::Log,
        ScalarFunction::Power(1.0),
        ScalarFunction::NegPower(0.5),
    ]
    .into_iter()
    .enumerate()
    {
        let mut row = GoldenRow {
            name: format!("identity({h})"),
            max_error: 0.0,
            worst_t: f64::NAN,
        };
        for j in 0..instances {
            let seed = 1000 * i as u64 + 4 * j as u64;
            let (m, n, k) = (2 + j % 3, 2 + (j + 1) % 3, 2 + (j + 2) % 3);
            let spec = FunctionalSpec::new(
                h.clone(),
                inv.clone(),
                half.clone(),
                PositiveMap::random(m, k, 2, seed)?,
                PositiveMap::random(n, k, 2, seed + 1)?,
                Mode::Convex,
            )?;
            let a = random_pd(m, seed + 2, (0.1, 10.0))?;
            let b = random_pd(n, seed + 3, (0.1, 10.0))?;
            let direct = core_functional(&spec, &a, &b)?;
            let other = inverse_form(&spec, &a, &b)?;
            let err = (direct - other).abs() / (1.0 + direct.abs());
            if err > row.max_error {
                row.max_error = err;
                row.worst_t = j as f64;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn all_rows() -> Result<Vec<GoldenRow>> {
    let mut rows = legendre_rows()?;
    rows.extend(proof_identity_rows(20)?);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_golden_rows_pass() {
        for row in all_rows().unwrap() {
            assert!(
                row.passed(),
                "{} max error {:e} at {}",
                row.name,
                row.max_error,
                row.worst_t
            );
        }
    }

    #[test]
    fn formulas_agree_with_hand_values() {
        // check(log)(1) = 1; breve(power:1)(4) = 2 sqrt(4) = 4
        let cases = legendre_cases();
        let find = |n: &str| cases.iter().find(|c| c.0 == n).unwrap();
        assert!(((find("check(log)").2)(1.0) - 1.0).abs() < 1e-15);
        assert!(((find("breve(power:1)").2)(4.0) - 4.0).abs() < 1e-15);
        // r = 1/2: 0.5 * (-0.5) / t = -1/(4t)
        assert!(((find("check(power:0.5)").2)(2.0) + 0.125).abs() < 1e-15);
    }
}
