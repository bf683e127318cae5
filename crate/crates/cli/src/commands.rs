use std::path::Path;

use flatpoly::factorization::{inner_outer, jensen_residual};
use flatpoly::flatness::{flatness_report, ratio_table, RatioTable, RATIO_CSV_HEADER};
use flatpoly::generators::{gauss_fresnel_vdc_bound, hl_dyadic_certificate};
use flatpoly::io::{from_json, to_json, PolyRecord, TermRecord};
use flatpoly::riesz::{
    choose_scales, singularity_diagnostic, DivergenceWitness, RieszProductState, ScaledFamily,
    SeriesInput,
};
use flatpoly::{Complex64, FlatError, Grid, TrigPoly};
use serde::Serialize;

use crate::family::{Family, FamilyArgs};
use crate::output::{emit, num, opt_num, Csv};
use crate::{CliError, Format, GridArgs, OutArgs};

pub const GRID_ENV: &str = "FLATPOLY_GRID";
pub const RIESZ_TRACE_HEADER: &str = "depth,l1,mass";
pub const SINGULARITY_HEADER: &str = "j,N,r,s,A,series5,series6";

fn write(out: &OutArgs, bytes: Vec<u8>) -> Result<(), CliError> {
    emit(out.output.as_deref(), &bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn json_line<T: Serialize>(buf: &mut String, value: &T) {
    buf.push_str(&serde_json::to_string(value).expect("plain data serializes"));
    buf.push('\n');
}

/// `--grid`, then `$FLATPOLY_GRID`; `None` means derive from the polynomial.
fn grid_override(args: &GridArgs) -> Result<Option<Grid>, CliError> {
    let size = match args.grid {
        Some(m) => Some(m),
        None => match std::env::var(GRID_ENV) {
            Ok(text) => Some(text.trim().parse().map_err(|_| {
                CliError::Usage(format!("{GRID_ENV}: cannot parse '{text}' as a grid size"))
            })?),
            Err(_) => None,
        },
    };
    size.map(|m| {
        Grid::new(m).map_err(|e| match e {
            FlatError::InvalidGrid(_) => CliError::Usage(e.to_string()),
            other => other.into(),
        })
    })
    .transpose()
}

fn grid_for(args: &GridArgs, p: &TrigPoly) -> Result<Grid, CliError> {
    Ok(grid_override(args)?.unwrap_or_else(|| Grid::default_for(p)))
}

fn read_poly(path: &Path) -> Result<TrigPoly, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    match from_json(&text) {
        Ok(parsed) => Ok(parsed?),
        Err(e) => Err(CliError::Usage(format!(
            "{}:{}:{}: malformed polynomial JSON: {e}",
            path.display(),
            e.line(),
            e.column()
        ))),
    }
}

fn reject_csv(out: &OutArgs, command: &str) -> Result<(), CliError> {
    if out.format == Some(Format::Csv) {
        return Err(CliError::Usage(format!("{command} emits JSON only")));
    }
    Ok(())
}

pub fn generate(family: &FamilyArgs, out: &OutArgs) -> Result<(), CliError> {
    reject_csv(out, "generate")?;
    let p = family.single()?;
    write(out, format!("{}\n", to_json(&p)).into_bytes())
}

pub fn ratio_csv(table: &RatioTable) -> Csv {
    let mut csv = Csv::new(RATIO_CSV_HEADER);
    for r in &table.rows {
        csv.row([
            r.j.to_string(),
            r.m.to_string(),
            r.n.to_string(),
            num(r.l),
            num(r.eps),
            opt_num(r.r),
            opt_num(r.r_over_n),
            opt_num(r.n_over_l2),
            opt_num(r.r_over_2n),
        ]);
    }
    csv
}

pub fn analyze(
    inputs: &[std::path::PathBuf],
    grid: &GridArgs,
    tau: f64,
    out: &OutArgs,
) -> Result<(), CliError> {
    let mut reports = Vec::with_capacity(inputs.len());
    for path in inputs {
        let p = read_poly(path)?;
        reports.push(flatness_report(&p, &grid_for(grid, &p)?, tau)?);
    }
    let bytes = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut buf = String::new();
            for r in &reports {
                json_line(&mut buf, r);
            }
            buf.into_bytes()
        }
        Format::Csv => ratio_csv(&ratio_table(&reports)).into_bytes(),
    };
    write(out, bytes)
}

#[derive(Serialize)]
struct ComplexRecord {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexRecord {
    fn from(c: Complex64) -> Self {
        ComplexRecord { re: c.re, im: c.im }
    }
}

#[derive(Serialize)]
struct FactorRecord {
    inside: Vec<ComplexRecord>,
    outside: Vec<ComplexRecord>,
    gamma: ComplexRecord,
    q: PolyRecord,
    q0: f64,
    jensen_residual: f64,
    boundary_root: bool,
}

pub fn factor(input: &Path, grid: &GridArgs, out: &OutArgs) -> Result<(), CliError> {
    reject_csv(out, "factor")?;
    let p = read_poly(input)?;
    let f = inner_outer(&p)?;
    let residual = jensen_residual(&p, &f, &grid_for(grid, &p)?)?;
    let record = FactorRecord {
        inside: f.inside.iter().map(|c| (*c).into()).collect(),
        outside: f.outside.iter().map(|c| (*c).into()).collect(),
        gamma: f.gamma.into(),
        q: PolyRecord::from(&f.q),
        q0: f.q0(),
        jensen_residual: residual,
        boundary_root: f.boundary_root,
    };
    let mut buf = String::new();
    json_line(&mut buf, &record);
    write(out, buf.into_bytes())
}

pub fn sweep(family: &FamilyArgs, grid: &GridArgs, out: &OutArgs) -> Result<(), CliError> {
    let seq = family.sequence()?;
    let fixed = grid_override(grid)?;
    let reports = seq
        .iter()
        .map(|p| {
            let g = fixed.clone().unwrap_or_else(|| Grid::default_for(p));
            flatness_report(p, &g, 0.5)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = ratio_table(&reports);
    let bytes = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => ratio_csv(&table).into_bytes(),
        Format::Json => {
            let mut buf = String::new();
            json_line(&mut buf, &table);
            buf.into_bytes()
        }
    };
    write(out, bytes)
}

#[derive(Serialize)]
struct DepthRecord {
    depth: usize,
    l1: f64,
    coeff0: f64,
    new_coeffs: Vec<TermRecord>,
}

fn scaled_family(p: &TrigPoly, scales: &str, depth: usize) -> Result<ScaledFamily, CliError> {
    if scales == "greedy" {
        return Ok(choose_scales(&vec![p.clone(); depth])?);
    }
    let base = scales
        .strip_prefix("geometric:")
        .and_then(|b| b.parse::<u64>().ok())
        .filter(|b| *b >= 2)
        .ok_or_else(|| {
            CliError::Usage(format!("--scales: expected greedy or geometric:B, got '{scales}'"))
        })?;
    Ok(ScaledFamily::geometric(p, base, depth)?.verify()?)
}

pub fn riesz(
    family: &FamilyArgs,
    depth: usize,
    scales: &str,
    trace: Option<&Path>,
    grid: &GridArgs,
    out: &OutArgs,
) -> Result<(), CliError> {
    let p = family.single()?;
    let fam = scaled_family(&p, scales, depth)?;
    let grid = match grid_override(grid)? {
        Some(g) => g,
        None => {
            let top = fam.scales().last().copied().unwrap_or(1) as usize;
            let need = (8 * top * p.span() as usize).max(flatpoly::grid::MIN_DEFAULT_GRID);
            Grid::new(need.next_power_of_two())?
        }
    };
    let mut state = RieszProductState::new(fam, grid);
    let mut records = Vec::with_capacity(depth);
    for _ in 0..depth {
        let fresh = state.extend()?;
        let d = state.depth();
        records.push(DepthRecord {
            depth: d,
            l1: state.l1_of_sqrt_density()[d],
            coeff0: state.coeff(0).re,
            new_coeffs: fresh
                .iter()
                .map(|e| {
                    let c = state.coeff(*e);
                    TermRecord {
                        exp: *e,
                        re: c.re,
                        im: c.im,
                    }
                })
                .collect(),
        });
    }

    let mut trace_csv = Csv::new(RIESZ_TRACE_HEADER);
    for (d, (l1, mass)) in state
        .l1_of_sqrt_density()
        .iter()
        .zip(state.mass_trace())
        .enumerate()
    {
        trace_csv.row([d.to_string(), num(*l1), num(*mass)]);
    }
    let trace_bytes = trace_csv.into_bytes();
    if let Some(path) = trace {
        emit(Some(path), &trace_bytes).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut buf = String::new();
            for r in &records {
                json_line(&mut buf, r);
            }
            buf.into_bytes()
        }
        Format::Csv => trace_bytes,
    };
    write(out, bytes)
}

#[derive(Serialize)]
struct SingularityRecord<'a> {
    inputs: &'a [SeriesInput],
    diagnostic: &'a flatpoly::riesz::SingularityDiagnostic,
}

pub fn singularity(
    family: &FamilyArgs,
    depth: Option<usize>,
    grid: &GridArgs,
    out: &OutArgs,
) -> Result<(), CliError> {
    // N, L and r do not change under z ↦ z^l, so the undilated polynomial
    // stands in for every scaled copy.
    let seq = match depth {
        Some(d) => vec![family.single()?; d],
        None => family.sequence()?,
    };
    let inputs = seq
        .iter()
        .map(|p| {
            let rep = flatness_report(p, &grid_for(grid, p)?, 0.5)?;
            Ok(SeriesInput::try_from(&rep)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let diag = singularity_diagnostic(&inputs, None, DivergenceWitness::default())?;
    let bytes = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(SINGULARITY_HEADER);
            for (j, inp) in inputs.iter().enumerate() {
                csv.row([
                    (j + 1).to_string(),
                    inp.n.to_string(),
                    num(inp.r),
                    num(diag.s[j]),
                    num(diag.partial_sums[j]),
                    num(diag.series5[j]),
                    opt_num(diag.series6[j]),
                ]);
            }
            csv.comment(&format!("verdict: {:?} (heuristic)", diag.verdict));
            csv.into_bytes()
        }
        Format::Json => {
            let mut buf = String::new();
            json_line(
                &mut buf,
                &SingularityRecord {
                    inputs: &inputs,
                    diagnostic: &diag,
                },
            );
            buf.into_bytes()
        }
    };
    write(out, bytes)
}

#[derive(Serialize)]
struct VdcRow {
    n: usize,
    sup: f64,
    bound: f64,
    holds: bool,
}

pub fn vdc_check(family: &FamilyArgs, grid: &GridArgs, out: &OutArgs) -> Result<(), CliError> {
    let kind = family.family()?;
    if !matches!(kind, Family::Gauss | Family::Hl) {
        return Err(CliError::Usage("vdc-check supports --family gauss or hl".into()));
    }
    let seq = family.sequence()?;
    let mut rows = Vec::with_capacity(seq.len());
    for p in &seq {
        let n = p.max_exp().unwrap_or(0) as usize + 1;
        let sup = p.sup_modulus(&grid_for(grid, p)?)?;
        let bound = match kind {
            Family::Gauss => gauss_fresnel_vdc_bound(n)?,
            _ => hl_dyadic_certificate(n, family.c, 0.0)?,
        };
        rows.push(VdcRow {
            n,
            sup,
            bound,
            holds: sup <= bound,
        });
    }
    let bytes = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new("n,sup,bound,holds");
            for r in &rows {
                csv.row([r.n.to_string(), num(r.sup), num(r.bound), r.holds.to_string()]);
            }
            csv.into_bytes()
        }
        Format::Json => {
            let mut buf = String::new();
            for r in &rows {
                json_line(&mut buf, r);
            }
            buf.into_bytes()
        }
    };
    write(out, bytes)
}

pub fn egorov(family: &FamilyArgs, grid: &GridArgs, out: &OutArgs) -> Result<(), CliError> {
    let seq = family.sequence()?;
    let grid = match grid_override(grid)? {
        Some(g) => g,
        None => {
            let span = seq.iter().map(TrigPoly::span).max().unwrap_or(0);
            Grid::new(Grid::default_size(span))?
        }
    };
    let picks = flatpoly::flatness::egorov_select(&seq, &grid);
    let bytes = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Picks<'a> {
                length: usize,
                picks: &'a [flatpoly::flatness::EgorovPick],
            }
            let mut buf = String::new();
            json_line(
                &mut buf,
                &Picks {
                    length: picks.len(),
                    picks: &picks,
                },
            );
            buf.into_bytes()
        }
        Format::Csv => {
            let mut csv = Csv::new("index,k,deviation_measure");
            for p in &picks {
                csv.row([p.index.to_string(), p.k.to_string(), num(p.deviation_measure)]);
            }
            csv.into_bytes()
        }
    };
    write(out, bytes)
}

/// CSV to whitespace-separated columns. Comment lines are skipped and empty
/// fields become `NaN`.
pub fn plot(input: &Path, columns: &str, output: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| CliError::Usage(format!("{} has no header row", input.display())))?
        .split(',')
        .collect();
    let wanted: Vec<&str> = columns.split(',').map(str::trim).collect();
    let idx = wanted
        .iter()
        .map(|w| {
            header.iter().position(|h| h == w).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown column '{w}'; available: {}",
                    header.join(",")
                ))
            })
        })
        .collect::<Result<Vec<usize>, _>>()?;

    let mut buf = format!("# {}\n", wanted.join(" "));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let row: Vec<&str> = idx
            .iter()
            .map(|i| match fields.get(*i) {
                Some(f) if !f.is_empty() => *f,
                _ => "NaN",
            })
            .collect();
        buf.push_str(&row.join(" "));
        buf.push('\n');
    }
    let default = input.with_extension("dat");
    emit(Some(output.unwrap_or(&default)), buf.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))
}
