use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Integral curve class in coordinates `[a, d_1, .., d_r]` meaning
/// `a L + d_1 E_1' + .. + d_r E_r'`, where `L` is the pulled-back line class and
/// `E_i'` is the class of a line inside the `i`-th exceptional divisor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(Vec<i64>);

impl CurveClass {
    pub fn new(coords: Vec<i64>) -> Self {
        CurveClass(coords)
    }

    pub fn zero(rank: usize) -> Self {
        CurveClass(vec![0; rank])
    }

    /// `d L`.
    pub fn line(rank: usize, d: i64) -> Self {
        let mut c = vec![0; rank];
        c[0] = d;
        CurveClass(c)
    }

    /// `d E_i'` for the 0-based blow-up `i`.
    pub fn exceptional(rank: usize, blowup: usize, d: i64) -> Self {
        let mut c = vec![0; rank];
        c[1 + blowup] = d;
        CurveClass(c)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn line_degree(&self) -> i64 {
        self.0[0]
    }

    /// Coefficient `d_i` of `E_i'`.
    pub fn exceptional_multiple(&self, blowup: usize) -> i64 {
        self.0[1 + blowup]
    }

    /// Drops the last exceptional coordinate (class in the parent lattice).
    pub fn truncate_last(&self) -> CurveClass {
        CurveClass(self.0[..self.0.len() - 1].to_vec())
    }

    pub fn scale(&self, k: i64) -> CurveClass {
        CurveClass(self.0.iter().map(|c| c * k).collect())
    }
}

impl Add for &CurveClass {
    type Output = CurveClass;
    fn add(self, rhs: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CurveClass {
    type Output = CurveClass;
    fn sub(self, rhs: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = if i == 0 {
                "L".to_string()
            } else {
                format!("E{i}'")
            };
            let coeff = match c {
                1 => String::new(),
                -1 => "-".to_string(),
                _ => c.to_string(),
            };
            parts.push(format!("{coeff}{name}"));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(&format!("-{rest}"));
            } else {
                out.push_str(&format!("+{p}"));
            }
        }
        write!(f, "{out}")
    }
}
