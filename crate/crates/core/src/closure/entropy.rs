use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Entropy densities with their Legendre duals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entropy {
    MaxwellBoltzmann,
    BoseEinstein,
    /// `η(ψ) = ψ²/2`, giving the linear closure.
    Quadratic,
}

impl Entropy {
    /// `η(ψ)`.
    pub fn eta(self, psi: f64) -> f64 {
        match self {
            Entropy::MaxwellBoltzmann => {
                if psi == 0.0 {
                    0.0
                } else {
                    psi * psi.ln() - psi
                }
            }
            Entropy::BoseEinstein => {
                let a = if psi == 0.0 { 0.0 } else { psi * psi.ln() };
                a - (1.0 + psi) * psi.ln_1p()
            }
            Entropy::Quadratic => 0.5 * psi * psi,
        }
    }

    /// `η*(p)`.
    pub fn dual(self, p: f64) -> f64 {
        match self {
            Entropy::MaxwellBoltzmann => p.exp(),
            Entropy::BoseEinstein => -(-p.exp()).ln_1p(),
            Entropy::Quadratic => 0.5 * p * p,
        }
    }

    /// `η*'(p)`, the ansatz as a function of `bᵀα`.
    pub fn dual_d1(self, p: f64) -> f64 {
        match self {
            Entropy::MaxwellBoltzmann => p.exp(),
            Entropy::BoseEinstein => 1.0 / (-p).exp_m1(),
            Entropy::Quadratic => p,
        }
    }

    /// `η*''(p)`.
    pub fn dual_d2(self, p: f64) -> f64 {
        match self {
            Entropy::MaxwellBoltzmann => p.exp(),
            Entropy::BoseEinstein => {
                let d = (-p).exp_m1();
                (-p).exp() / (d * d)
            }
            Entropy::Quadratic => 1.0,
        }
    }

    /// Whether `p` lies in the domain of `η*`.
    pub fn in_domain(self, p: f64) -> bool {
        match self {
            Entropy::BoseEinstein => p < 0.0,
            _ => p.is_finite(),
        }
    }

    /// `η*'^{-1}`: the multiplier value producing a constant ansatz `c`.
    pub fn inverse_d1(self, c: f64) -> f64 {
        match self {
            Entropy::MaxwellBoltzmann => c.ln(),
            Entropy::BoseEinstein => (c / (1.0 + c)).ln(),
            Entropy::Quadratic => c,
        }
    }

    pub fn is_nonlinear(self) -> bool {
        self != Entropy::Quadratic
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Entropy::MaxwellBoltzmann => "mb",
            Entropy::BoseEinstein => "be",
            Entropy::Quadratic => "quadratic",
        }
    }
}

impl fmt::Display for Entropy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Entropy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mb" | "maxwell-boltzmann" | "maxwellboltzmann" => Ok(Entropy::MaxwellBoltzmann),
            "be" | "bose-einstein" | "boseeinstein" => Ok(Entropy::BoseEinstein),
            "quadratic" | "linear" => Ok(Entropy::Quadratic),
            other => Err(Error::Parse(format!("unknown entropy `{other}`"))),
        }
    }
}
