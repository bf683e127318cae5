//! Turning family flags into polynomials and polynomial sequences.

use clap::{Args, ValueEnum};
use flatpoly::generators::{
    blaschke_partial_sum, class_b, gauss_fresnel, hardy_littlewood, single_spike, ClassBSpec,
};
use flatpoly::{Complex64, FlatError, TrigPoly};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Classb,
    Gauss,
    Hl,
    Spike,
    Blaschke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DeltaSchedule {
    /// delta = 1/n
    Inverse,
    /// delta = 2^-n
    Dyadic,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Size parameter: a value, a comma list, or an inclusive range a..b.
    #[arg(long)]
    pub n: Option<String>,
    /// Hardy-Littlewood constant.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c: f64,
    /// Spike height; overrides --delta-schedule.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = DeltaSchedule::Inverse)]
    pub delta_schedule: DeltaSchedule,
    /// Class-B exponents R_k, comma separated.
    #[arg(long)]
    pub exponents: Option<String>,
    /// Use R = {1, ..., m-1}.
    #[arg(long)]
    pub consecutive: bool,
    /// Class-B term count: a value, a comma list, or a range a..b.
    #[arg(long)]
    pub m: Option<String>,
    /// Blaschke zeros as re,im pairs separated by ';' (or repeat the flag).
    #[arg(long, allow_hyphen_values = true)]
    pub zeros: Vec<String>,
    /// Blaschke truncation degree: a value, a list, or a range.
    #[arg(long)]
    pub degree: Option<String>,
    /// Largest exponent of random class-B polynomials.
    #[arg(long, default_value_t = 64)]
    pub max_exp: i64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// Parses `7`, `2,4,8` or `2..32` (inclusive).
pub fn parse_list(flag: &str, text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("--{flag}: cannot parse '{text}'"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

fn parse_zeros(items: &[String]) -> Result<Vec<Complex64>, CliError> {
    let mut out = Vec::new();
    for item in items {
        for pair in item.split(';').filter(|s| !s.trim().is_empty()) {
            let bad = || CliError::Usage(format!("--zeros: cannot parse '{pair}' as re,im"));
            let (re, im) = pair.split_once(',').ok_or_else(bad)?;
            let re: f64 = re.trim().parse().map_err(|_| bad())?;
            let im: f64 = im.trim().parse().map_err(|_| bad())?;
            out.push(Complex64::new(re, im));
        }
    }
    Ok(out)
}

fn parse_exponents(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--exponents: cannot parse '{s}'")))
        })
        .collect()
}

fn require<'a>(flag: &str, v: &'a Option<String>) -> Result<&'a str, CliError> {
    v.as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for this family")))
}

impl FamilyArgs {
    pub fn family(&self) -> Result<Family, CliError> {
        self.family
            .ok_or_else(|| CliError::Usage("--family is required".into()))
    }

    /// The members of the family selected by the flags, in order, each
    /// normalized in L².
    pub fn sequence(&self) -> Result<Vec<TrigPoly>, CliError> {
        let polys = match self.family()? {
            Family::Classb => self.class_b_sequence()?,
            Family::Gauss => parse_list("n", require("n", &self.n)?)?
                .into_iter()
                .map(gauss_fresnel)
                .collect::<Result<_, _>>()?,
            Family::Hl => parse_list("n", require("n", &self.n)?)?
                .into_iter()
                .map(|n| hardy_littlewood(n, self.c))
                .collect::<Result<_, _>>()?,
            Family::Spike => parse_list("n", require("n", &self.n)?)?
                .into_iter()
                .map(|n| {
                    let delta = self.delta.unwrap_or(match self.delta_schedule {
                        DeltaSchedule::Inverse => 1.0 / n as f64,
                        DeltaSchedule::Dyadic => 0.5f64.powi(n as i32),
                    });
                    single_spike(n as i64, delta)
                })
                .collect::<Result<_, _>>()?,
            Family::Blaschke => {
                let zeros = parse_zeros(&self.zeros)?;
                parse_list("degree", require("degree", &self.degree)?)?
                    .into_iter()
                    .map(|d| blaschke_partial_sum(&zeros, d)?.normalize_l2())
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(polys)
    }

    /// Exactly one polynomial; list-valued flags must hold a single value.
    pub fn single(&self) -> Result<TrigPoly, CliError> {
        let mut seq = self.sequence()?;
        if seq.len() != 1 {
            return Err(CliError::Usage(format!(
                "expected one polynomial, the flags select {}",
                seq.len()
            )));
        }
        Ok(seq.remove(0))
    }

    fn class_b_sequence(&self) -> Result<Vec<TrigPoly>, CliError> {
        if let Some(text) = &self.exponents {
            let spec = ClassBSpec::new(parse_exponents(text)?)?;
            return Ok(vec![class_b(&spec)]);
        }
        let ms = parse_list("m", require("m", &self.m)?)?;
        if self.consecutive {
            return ms
                .into_iter()
                .map(|m| Ok(class_b(&ClassBSpec::consecutive(m)?)))
                .collect();
        }
        // seeded random exponents R ⊂ {1..max_exp}
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        ms.into_iter()
            .map(|m| {
                let pool = self.max_exp.max(0) as usize;
                if m == 0 || m - 1 > pool {
                    return Err(FlatError::InvalidParameter(format!(
                        "cannot draw {} distinct exponents from 1..={}",
                        m.saturating_sub(1),
                        self.max_exp
                    ))
                    .into());
                }
                let exps = sample(&mut rng, pool, m - 1)
                    .into_iter()
                    .map(|i| i as i64 + 1)
                    .collect();
                Ok(class_b(&ClassBSpec::new(exps)?))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("m", "2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_list("n", "8,16, 32").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_list("n", "7").unwrap(), vec![7]);
        assert!(parse_list("n", "5..2").is_err());
        assert!(parse_list("n", "x").is_err());
    }

    #[test]
    fn zeros_accept_both_separators() {
        let z = parse_zeros(&["0.5,0;-0.25,0.1".into(), "0,-0.3".into()]).unwrap();
        assert_eq!(
            z,
            vec![
                Complex64::new(0.5, 0.0),
                Complex64::new(-0.25, 0.1),
                Complex64::new(0.0, -0.3)
            ]
        );
        assert!(parse_zeros(&["0.5".into()]).is_err());
    }
}
