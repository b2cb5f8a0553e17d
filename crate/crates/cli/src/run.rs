use std::path::{Path, PathBuf};

use bunching_core::decoherence::{decay_bound, r_series};
use bunching_core::spectrum::{build_sector, circuit_report, PhysicalParams};
use bunching_core::{Correlator, TimeGrid};

use crate::config::Scenario;
use crate::error::CliError;
use crate::output::{self, Cell, Format, Metadata, Table};

pub struct Written {
    pub path: PathBuf,
    pub summary: String,
}

fn grid(s: &Scenario, t_max: f64) -> Result<TimeGrid, CliError> {
    Ok(TimeGrid::uniform(t_max, s.steps)?)
}

/// `|r^{(1,0)}_{0,1}(t)|²` per scenario.
pub fn rscan(scenarios: &[Scenario], dir: &Path, format: Format) -> Result<Vec<Written>, CliError> {
    let mut written = Vec::new();
    for s in scenarios {
        let cfg = s.chain()?;
        let (a, b) = (build_sector(&cfg, 1, 0)?, build_sector(&cfg, 0, 1)?);
        let series = r_series(&a, &b, &grid(s, s.tmax)?)?;
        let bound = decay_bound(&cfg, s.k_c).ok();
        let mut rows = Vec::with_capacity(series.len());
        let mut min_abs2 = f64::INFINITY;
        for (&t, r) in series.times.iter().zip(&series.values) {
            let abs2 = r.norm_sqr();
            min_abs2 = min_abs2.min(abs2);
            let envelope = match &bound {
                Some(p) if p.in_short_time_window(t) || t == 0.0 => Cell::Num(p.envelope(t)),
                _ => Cell::Empty,
            };
            rows.push(vec![Cell::Num(t), Cell::Num(abs2), Cell::Num(r.re), Cell::Num(r.im), envelope]);
        }
        let mut meta = Metadata::for_scenario("rscan", s);
        meta.num("lambda10", a.lambda);
        meta.num("lambda01", b.lambda);
        meta.push("k_points", a.len());
        meta.num("min_abs2", min_abs2);
        match &bound {
            Some(p) => {
                meta.num("bound_gamma", p.gamma);
                meta.num("bound_e_kc", p.e_kc);
                meta.push("bound_n_c", p.n_c);
                meta.num("bound_window", p.short_time_limit);
            }
            None => meta.push("bound_gamma", "undefined"),
        }
        let table = Table { columns: vec!["t", "abs2", "re", "im", "bound"], rows };
        let path = output::target(dir, "rscan", &s.name, format);
        output::write(&path, format, &meta, &table)?;
        written.push(Written { path, summary: format!("{}: min |r|^2 = {}", s.name, output::number(min_abs2)) });
    }
    Ok(written)
}

/// `g²(t)` per scenario, with the trailing-window mean and `g²(0)` in the header.
pub fn g2scan(scenarios: &[Scenario], dir: &Path, format: Format) -> Result<Vec<Written>, CliError> {
    let mut written = Vec::new();
    for s in scenarios {
        let cfg = s.chain()?;
        let corr = Correlator::new(&cfg, s.field_state()?, s.frame, s.first_order)?;
        let res = corr.evaluate(&grid(s, s.tmax)?)?;
        let mut columns = vec!["t", "g2", "g2num_re", "g2num_im", "intensity"];
        if res.g1.is_some() {
            columns.extend(["g1_re", "g1_im"]);
        }
        let rows = (0..res.times.len())
            .map(|j| {
                let mut row = vec![
                    Cell::Num(res.times[j]),
                    Cell::opt(res.g2[j]),
                    Cell::Num(res.g2num[j].re),
                    Cell::Num(res.g2num[j].im),
                    Cell::Num(res.intensity[j]),
                ];
                if let Some(g1) = &res.g1 {
                    row.extend([Cell::Num(g1[j].re), Cell::Num(g1[j].im)]);
                }
                row
            })
            .collect();
        let g2_0 = res.g2[0];
        let trailing = res.trailing_mean(s.trailing_fraction);
        let mut meta = Metadata::for_scenario("g2scan", s);
        meta.push("sector_pairs", corr.table.len());
        meta.num("initial_intensity", corr.state.intensity_moment());
        meta.num("g2_0", g2_0.unwrap_or(f64::NAN));
        meta.num("trailing_mean", trailing.unwrap_or(f64::NAN));
        meta.push("gaps", res.gap_count());
        let path = output::target(dir, "g2scan", &s.name, format);
        output::write(&path, format, &meta, &Table { columns, rows })?;
        let show = |v: Option<f64>| v.map_or("nan".to_string(), output::number);
        written.push(Written {
            path,
            summary: format!(
                "{}: g2(0) = {}, trailing mean = {}, gaps = {}",
                s.name,
                show(g2_0),
                show(trailing),
                res.gap_count()
            ),
        });
    }
    Ok(written)
}

/// Gaussian short-time bound against `|r|²` on the bound's own window.
pub fn bound(scenarios: &[Scenario], dir: &Path, format: Format) -> Result<Vec<Written>, CliError> {
    let mut written = Vec::new();
    for s in scenarios {
        let cfg = s.chain()?;
        let p = decay_bound(&cfg, s.k_c)?;
        let (a, b) = (build_sector(&cfg, 1, 0)?, build_sector(&cfg, 0, 1)?);
        let series = r_series(&a, &b, &grid(s, s.tmax.min(p.short_time_limit))?)?;
        let mut violations = 0usize;
        let mut first = None;
        let mut rows = Vec::with_capacity(series.len());
        for (&t, r) in series.times.iter().zip(&series.values) {
            let abs2 = r.norm_sqr();
            let holds = p.bound_holds(abs2, t, 1e-6);
            if !holds {
                violations += 1;
                first.get_or_insert(t);
            }
            rows.push(vec![Cell::Num(t), Cell::Num(abs2), Cell::Num(p.envelope(t)), Cell::Num(f64::from(holds as u8))]);
        }
        let mut meta = Metadata::for_scenario("bound", s);
        meta.num("lambda10", p.lambda10);
        meta.num("lambda01", p.lambda01);
        meta.push("n_c", p.n_c);
        meta.num("e_kc", p.e_kc);
        meta.num("gamma", p.gamma);
        meta.num("short_time_limit", p.short_time_limit);
        meta.push("tolerance", "1e-6");
        meta.push("violations", violations);
        meta.num("first_violation_t", first.unwrap_or(f64::NAN));
        let path = output::target(dir, "bound", &s.name, format);
        let table = Table { columns: vec!["t", "abs2", "envelope", "holds"], rows };
        output::write(&path, format, &meta, &table)?;
        written.push(Written {
            path,
            summary: format!(
                "{}: gamma = {}, window (0, {}], {violations}/{} samples above the bound",
                s.name,
                output::number(p.gamma),
                output::number(p.short_time_limit),
                series.len()
            ),
        });
    }
    Ok(written)
}

/// Derived model parameters of a circuit, as ordered `(key, value)` pairs.
pub fn params(p: &PhysicalParams) -> Result<Vec<(&'static str, f64)>, CliError> {
    let r = circuit_report(p)?;
    Ok(vec![
        ("eta1", r.eta1),
        ("eta2", r.eta2),
        ("eta_ratio", r.eta_ratio),
        ("sqrt_frequency_ratio", (p.omega1 / p.omega2).sqrt()),
        ("b_formula_hz", r.b_formula_hz),
        ("b_formula_rad_s", r.b_formula_rad_s),
        ("b_quoted_hz", r.b_quoted_hz),
        ("lambda_bare", r.lambda_bare),
        ("omega2_over_b", r.omega2_over_b),
    ])
}

pub fn write_params(p: &PhysicalParams, values: &[(&'static str, f64)], dir: &Path, format: Format) -> Result<PathBuf, CliError> {
    let mut meta = Metadata::default();
    meta.push("tool", format!("bunching {}", env!("CARGO_PKG_VERSION")));
    meta.push("command", "params");
    if let serde_json::Value::Object(fields) = serde_json::to_value(p).expect("params serialize") {
        for (k, v) in fields {
            meta.push(&k, v);
        }
    }
    let table = Table {
        columns: values.iter().map(|(k, _)| *k).collect(),
        rows: vec![values.iter().map(|(_, v)| Cell::Num(*v)).collect()],
    };
    let path = output::target(dir, "params", "circuit", format);
    output::write(&path, format, &meta, &table)?;
    Ok(path)
}
