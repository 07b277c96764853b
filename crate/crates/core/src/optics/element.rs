use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Phase convention of a beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `|a⟩ → √r|a⟩ + √t|b⟩`, `|b⟩ → √t|a⟩ − √r|b⟩`. Real amplitudes, so
    /// a balanced cascade produces an all-positive W state.
    #[default]
    RealHadamard,
    /// `|a⟩ → √t|a⟩ + i√r|b⟩`, `|b⟩ → i√r|a⟩ + √t|b⟩`.
    SymmetricPhase,
}

/// Two-mode beamsplitter acting on modes `mode_a` and `mode_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementDoc")]
pub struct BeamsplitterElement {
    pub mode_a: usize,
    pub mode_b: usize,
    pub reflectivity: f64,
    pub convention: Convention,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    mode_a: usize,
    mode_b: usize,
    #[serde(default = "half")]
    reflectivity: f64,
    #[serde(default)]
    convention: Convention,
}

fn half() -> f64 {
    0.5
}

impl TryFrom<ElementDoc> for BeamsplitterElement {
    type Error = Error;
    fn try_from(d: ElementDoc) -> Result<Self> {
        BeamsplitterElement::new(d.mode_a, d.mode_b, d.reflectivity, d.convention)
    }
}

impl BeamsplitterElement {
    pub fn new(mode_a: usize, mode_b: usize, reflectivity: f64, convention: Convention) -> Result<Self> {
        if mode_a == mode_b {
            return Err(Error::param("beamsplitter", format!("both ports are mode {mode_a}")));
        }
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(Error::param("reflectivity", format!("must lie in [0, 1], got {reflectivity}")));
        }
        Ok(BeamsplitterElement { mode_a, mode_b, reflectivity, convention })
    }

    /// 50:50 real-Hadamard splitter.
    pub fn balanced(mode_a: usize, mode_b: usize) -> Result<Self> {
        Self::new(mode_a, mode_b, 0.5, Convention::RealHadamard)
    }

    /// Transfer matrix on `(mode_a, mode_b)`; column `j` is the image of
    /// input port `j`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let (r, t) = if self.reflectivity == 0.5 {
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
        } else {
            (self.reflectivity.sqrt(), (1.0 - self.reflectivity).sqrt())
        };
        let re = |x: f64| C64::new(x, 0.0);
        match self.convention {
            Convention::RealHadamard => [[re(r), re(t)], [re(t), re(-r)]],
            Convention::SymmetricPhase => [[re(t), C64::new(0.0, r)], [C64::new(0.0, r), re(t)]],
        }
    }
}
