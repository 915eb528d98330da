use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// How the mixing strength is chosen for each augmented pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    Fixed(f64),
    /// Uniform on `(0, 1]`.
    Uniform,
}

impl LambdaMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LambdaMode::Fixed(v) if !(v > 0.0 && v <= 1.0) => Err(Error::InvalidParameter(format!(
                "fixed lambda must be in (0, 1], got {v}"
            ))),
            _ => Ok(()),
        }
    }

    /// One draw. `Uniform` maps the generator's `[0, 1)` output to `(0, 1]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            LambdaMode::Fixed(v) => v,
            LambdaMode::Uniform => 1.0 - rng.gen::<f64>(),
        }
    }
}

impl FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("uniform") {
            return Ok(LambdaMode::Uniform);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("lambda must be a number or 'uniform', got '{s}'")))?;
        let mode = LambdaMode::Fixed(v);
        mode.validate()?;
        Ok(mode)
    }
}

impl fmt::Display for LambdaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaMode::Fixed(v) => write!(f, "{v}"),
            LambdaMode::Uniform => f.write_str("uniform"),
        }
    }
}
