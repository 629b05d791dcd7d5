//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 parse/usage error, 3 domain error.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::convolutions::{boolean_convolve, boolean_power, free_f_grid};
use crate::decomposition::decompose;
use crate::error::{Error, Result};
use crate::inversion::{recover_measure, sample_cauchy};
use crate::measure::{ComplexGrid, NevanlinnaData};
use crate::measure_file::{self, MeasureFile};
use crate::suite::{run_suite, SuiteKind};
use crate::transforms::{
    char_fn, f_transform, restricted_cauchy, restricted_nevanlinna, self_energy, TransformKind,
};

/// Evaluation grid given as `start:stop:count`. `count = 1` yields `[start]`.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + step * k as f64).collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid '{s}' is not start:stop:count")));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid start '{}'", parts[0])))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid stop '{}'", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid count '{}'", parts[2])))?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::Parse(format!("degenerate grid '{s}'")));
        }
        Ok(GridSpec { start, stop, count })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "nevlab",
    version,
    about = "Transform calculus on finitely supported measures"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a transform of a measure on an imaginary-axis grid, as CSV.
    Eval {
        /// Transform: cauchy | nevanlinna | charfn | selfenergy | freciprocal
        transform: TransformKind,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long = "t-grid")]
        t_grid: GridSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the Cauchy transform of a measure and recover the measure back.
    Invert {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long = "t-grid")]
        t_grid: GridSpec,
        /// Number of atoms to solve for (defaults to the input's atom count).
        #[arg(long = "degree-hint")]
        degree_hint: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose the uniform measure on a support set via derivative roots.
    Decompose {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convolve measures: boolean M1 M2 [M3...] | booleanpow M S | free M1 M2
    Convolve {
        /// Operation: boolean | booleanpow | free
        op: String,
        /// Measure files; booleanpow takes one file and a real exponent.
        inputs: Vec<String>,
        /// F-transform grid for `free` (required there, ignored otherwise).
        #[arg(long = "t-grid")]
        t_grid: Option<GridSpec>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        /// Suite: all | theorem1 | corollaries | example | boolean | free | remark2
        #[arg(default_value = "all")]
        suite: SuiteKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// CSV with 17-significant-digit floats: stable across runs and platforms.
fn render_csv(grid: &ComplexGrid) -> String {
    let mut csv = String::from("t,re,im\n");
    for (t, v) in grid.iter() {
        csv.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", t, v.re, v.im));
    }
    csv
}

fn eval_grid(
    transform: TransformKind,
    data: &NevanlinnaData,
    t_grid: &[f64],
) -> Result<ComplexGrid> {
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let v = match transform {
            TransformKind::Cauchy => restricted_cauchy(&data.rho, t)?,
            TransformKind::Nevanlinna => restricted_nevanlinna(data, t)?,
            TransformKind::CharFn => char_fn(&data.rho, t),
            TransformKind::SelfEnergy => self_energy(&data.rho, t)?,
            TransformKind::FReciprocal => f_transform(&data.rho, Complex64::new(0.0, t))?,
        };
        values.push(v);
    }
    ComplexGrid::new(t_grid.to_vec(), values)
}

fn run_command(command: Command) -> Result<i32> {
    match command {
        Command::Eval {
            transform,
            measure,
            t_grid,
            out,
        } => {
            let file = measure_file::read(&measure)?;
            let grid = eval_grid(transform, &file.nevanlinna_data(), &t_grid.points())?;
            emit(out.as_deref(), &render_csv(&grid))?;
            Ok(0)
        }
        Command::Invert {
            measure,
            t_grid,
            degree_hint,
            out,
        } => {
            let file = measure_file::read(&measure)?;
            let hint = degree_hint.unwrap_or(file.measure.len());
            let samples = sample_cauchy(&file.measure, &t_grid.points())?;
            let recovered = recover_measure(&samples, hint)?;
            emit(
                out.as_deref(),
                &measure_file::render(&MeasureFile::from_measure(recovered)),
            )?;
            Ok(0)
        }
        Command::Decompose { measure, out } => {
            let file = measure_file::read(&measure)?;
            let dec = decompose(file.measure.atoms())?;
            emit(
                out.as_deref(),
                &measure_file::render(&MeasureFile::from_nevanlinna(&dec.nevanlinna_data())),
            )?;
            Ok(0)
        }
        Command::Convolve {
            op,
            inputs,
            t_grid,
            out,
        } => {
            let text = match op.as_str() {
                "boolean" => {
                    if inputs.len() < 2 {
                        return Err(Error::Parse("boolean needs at least two measures".into()));
                    }
                    let mut acc = measure_file::read(Path::new(&inputs[0]))?.measure;
                    for path in &inputs[1..] {
                        let next = measure_file::read(Path::new(path))?.measure;
                        acc = boolean_convolve(&acc, &next)?;
                    }
                    measure_file::render(&MeasureFile::from_measure(acc))
                }
                "booleanpow" => {
                    if inputs.len() != 2 {
                        return Err(Error::Parse(
                            "booleanpow needs a measure file and an exponent".into(),
                        ));
                    }
                    let m = measure_file::read(Path::new(&inputs[0]))?.measure;
                    let s: f64 = inputs[1]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent '{}'", inputs[1])))?;
                    measure_file::render(&MeasureFile::from_measure(boolean_power(&m, s)?))
                }
                "free" => {
                    if inputs.len() != 2 {
                        return Err(Error::Parse("free needs exactly two measures".into()));
                    }
                    let grid = t_grid
                        .ok_or_else(|| Error::Parse("free requires --t-grid".into()))?;
                    let m1 = measure_file::read(Path::new(&inputs[0]))?.measure;
                    let m2 = measure_file::read(Path::new(&inputs[1]))?.measure;
                    render_csv(&free_f_grid(&m1, &m2, &grid.points())?)
                }
                other => return Err(Error::Parse(format!("unknown convolution '{other}'"))),
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let outcome = run_suite(suite, seed);
            print!("{}", outcome.render_table());
            Ok(if outcome.all_passed() { 0 } else { 1 })
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parses_and_expands() {
        let g: GridSpec = "1:3:5".parse().unwrap();
        assert_eq!(g.points(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let single: GridSpec = "2:9:1".parse().unwrap();
        assert_eq!(single.points(), vec![2.0]);
    }

    #[test]
    fn grid_spec_rejects_malformed() {
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("a:2:3".parse::<GridSpec>().is_err());
        assert!("1:2:0".parse::<GridSpec>().is_err());
    }

    #[test]
    fn csv_is_stable() {
        let grid = ComplexGrid::new(vec![1.0], vec![Complex64::new(0.5, -0.25)]).unwrap();
        assert_eq!(
            render_csv(&grid),
            "t,re,im\n1.0000000000000000e0,5.0000000000000000e-1,-2.5000000000000000e-1\n"
        );
    }
}
