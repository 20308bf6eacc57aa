//! Trial reports, reproducible witnesses and their serialized forms.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, HermitianMatrix};

/// Per-trial record used for the CSV export.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialGap {
    pub trial: usize,
    pub gap: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub suite: String,
    pub trials: usize,
    pub violations: usize,
    pub min_gap: f64,
    pub worst_witness: Option<Witness>,
    pub runtime_ms: u64,
    pub seed: u64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    #[serde(skip)]
    pub gaps: Vec<TrialGap>,
}

impl TrialReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Columns: `trial,gap,seed`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "trial,gap,seed")?;
        for g in &self.gaps {
            writeln!(w, "{},{:e},{}", g.trial, g.gap, g.seed)?;
        }
        Ok(())
    }
}

/// Inputs of one trial, stored bit-exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub trial_seed: u64,
    pub gap: f64,
    pub gap_hex: String,
    pub inputs: Vec<EncodedMatrix>,
}

impl Witness {
    pub fn new(
        trial: usize,
        trial_seed: u64,
        gap: f64,
        inputs: &[(&str, &HermitianMatrix)],
    ) -> Self {
        Self {
            trial,
            trial_seed,
            gap,
            gap_hex: to_hex_float(gap),
            inputs: inputs
                .iter()
                .map(|(name, m)| EncodedMatrix::encode(name, m))
                .collect(),
        }
    }

    pub fn decode_inputs(&self) -> Result<Vec<HermitianMatrix>> {
        self.inputs.iter().map(EncodedMatrix::decode).collect()
    }

    pub fn recorded_gap(&self) -> Result<f64> {
        parse_hex_float(&self.gap_hex)
    }
}

/// Row-major matrix with entries as hex-float strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedMatrix {
    pub name: String,
    pub dim: usize,
    pub re: Vec<String>,
    pub im: Vec<String>,
}

impl EncodedMatrix {
    pub fn encode(name: &str, m: &HermitianMatrix) -> Self {
        let n = m.dim();
        let e = m.entries();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(to_hex_float(e[(i, j)].re));
                im.push(to_hex_float(e[(i, j)].im));
            }
        }
        Self {
            name: name.to_string(),
            dim: n,
            re,
            im,
        }
    }

    pub fn decode(&self) -> Result<HermitianMatrix> {
        let n = self.dim;
        if n == 0 || self.re.len() != n * n || self.im.len() != n * n {
            return Err(Error::Witness(format!(
                "matrix {:?} has inconsistent dimension {n}",
                self.name
            )));
        }
        let mut data = Vec::with_capacity(n * n);
        for (r, i) in self.re.iter().zip(&self.im) {
            data.push(Complex64::new(parse_hex_float(r)?, parse_hex_float(i)?));
        }
        // entries are already Hermitian, so the symmetrization is exact
        HermitianMatrix::new(CMatrix::from_row_slice(n, n, &data))
    }
}

/// `2^k` for normal exponents.
fn pow2(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// C99 `%a`-style formatting, e.g. `0x1.8p+1` for 3.0.
pub fn to_hex_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x.is_infinite() {
        return format!("{sign}inf");
    }
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = bits & ((1u64 << 52) - 1);
    if biased == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 {
        (0, -1022)
    } else {
        (1, biased - 1023)
    };
    let mut frac = format!("{mantissa:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let esign = if exp < 0 { '-' } else { '+' };
    if frac.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{frac}p{esign}{}", exp.abs())
    }
}

pub fn parse_hex_float(s: &str) -> Result<f64> {
    let bad = || Error::Witness(format!("invalid hex float {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let value = match body {
        "nan" => f64::NAN,
        "inf" => f64::INFINITY,
        _ => {
            let body = body.strip_prefix("0x").ok_or_else(bad)?;
            let (digits, exp) = body.split_once('p').ok_or_else(bad)?;
            let exp: i32 = exp.parse().map_err(|_| bad())?;
            let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
            if int.is_empty() || int.len() + frac.len() > 15 {
                return Err(bad());
            }
            let m = u64::from_str_radix(&format!("{int}{frac}"), 16).map_err(|_| bad())?;
            if m >= 1 << 53 {
                return Err(bad());
            }
            let mut v = m as f64;
            let mut e = exp - 4 * frac.len() as i32;
            while e != 0 {
                let step = e.clamp(-1000, 1000);
                v *= pow2(step);
                e -= step;
            }
            v
        }
    };
    Ok(if neg { -value } else { value })
}
