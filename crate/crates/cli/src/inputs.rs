use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gconvex_core::system::parse_real;
use gconvex_core::{
    load_table, uniform_grid, ChebyshevSystem, Expression, FunctionSource, Interval, TableInterpolation,
};

use crate::args::{Common, GridArgs, SystemArgs, TargetArgs};

/// Points used when no grid is given and the interval is unbounded.
pub const DEFAULT_GRID: (f64, f64, usize) = (-1.0, 1.0, 30);

pub fn system(args: &SystemArgs) -> Result<ChebyshevSystem> {
    let spec = args.system.trim();
    if let Some(n) = spec.strip_prefix("poly:") {
        let n: usize = n.parse().with_context(|| format!("bad order in `{spec}`"))?;
        return Ok(ChebyshevSystem::monomial(n, Interval::real_line())?);
    }
    if let Some(rates) = spec.strip_prefix("exp:") {
        let rates = rates
            .split(',')
            .map(|r| parse_real(r.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(ChebyshevSystem::exponential(&rates, Interval::real_line())?);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("cannot read system file `{spec}`"))?;
    text.parse::<ChebyshevSystem>()
        .with_context(|| format!("in system file `{spec}`"))
}

pub fn target(args: &TargetArgs) -> Result<FunctionSource> {
    let interp = if args.linear {
        TableInterpolation::Linear
    } else {
        TableInterpolation::None
    };
    if let Some(path) = args.f.strip_prefix("table:") {
        let file = fs::File::open(path).with_context(|| format!("cannot open table `{path}`"))?;
        return load_table(file, interp).with_context(|| format!("in table `{path}`"));
    }
    if args.linear {
        bail!("--linear applies to table sources only");
    }
    Ok(FunctionSource::expression(args.f.parse::<Expression>()?))
}

/// The grid and a short description of where it came from.
pub fn grid(args: &GridArgs, system: &ChebyshevSystem) -> Result<(Vec<f64>, String)> {
    if let Some(spec) = &args.grid {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            bail!("grid must look like lo:hi:count, got `{spec}`");
        }
        let lo = parse_real(parts[0])?;
        let hi = parse_real(parts[1])?;
        let count: usize = parts[2].parse().with_context(|| format!("bad count in `{spec}`"))?;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            bail!("grid needs finite lo < hi, got `{spec}`");
        }
        return Ok((uniform_grid(lo, hi, count), spec.clone()));
    }
    if let Some(path) = &args.grid_file {
        return Ok((grid_from_file(path)?, format!("file:{}", path.display())));
    }
    let iv = system.interval();
    if iv.is_bounded() {
        Ok((
            iv.sample(DEFAULT_GRID.2)?,
            format!("{iv} sampled at {}", DEFAULT_GRID.2),
        ))
    } else {
        let (lo, hi, count) = DEFAULT_GRID;
        Ok((uniform_grid(lo, hi, count), format!("{lo}:{hi}:{count}")))
    }
}

fn grid_from_file(path: &Path) -> Result<Vec<f64>> {
    let file = fs::File::open(path).with_context(|| format!("cannot open grid file `{}`", path.display()))?;
    let source = load_table(file, TableInterpolation::None)?;
    Ok(source.as_table().expect("tables load as tables").abscissae().to_vec())
}

pub fn check_common(common: &Common) -> Result<()> {
    if !(common.atol > 0.0 && common.atol.is_finite()) || !(common.rtol > 0.0 && common.rtol.is_finite()) {
        bail!("tolerances must be positive and finite");
    }
    if common.budget == 0 {
        bail!("budget must be positive");
    }
    Ok(())
}
