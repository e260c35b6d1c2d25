//! Command implementations and deterministic output formatting.
//!
//! Every command writes key=value lines or CSV to a caller-supplied sink,
//! so the binary and the tests share one code path. Numeric output is
//! formatted to a configured number of significant digits, making repeated
//! runs byte-identical.

use std::io::Write;
use std::path::Path;

use crate::analysis::{sweep, GridSpec, SweepTable};
use crate::classical::{self, ClassicalQuantities, CountDistribution};
use crate::equilibrium::{closed_form_nash, numeric_nash, transition_gamma, EquilibriumResult};
use crate::error::{Error, Result};
use crate::quantum::{
    apply_loss, compensate_loss, payoffs_closed, payoffs_mc, payoffs_series, GamePoint,
    LossChannel, StrategyPair,
};

/// Environment variable naming an alternative config file.
pub const CONFIG_ENV: &str = "QCOURNOT_CONFIG";

/// Config file picked up from the working directory when present.
pub const CONFIG_FILE: &str = "qcournot.conf";

/// Loss-check acceptance threshold on the payoff deviation.
pub const LOSS_CHECK_TOL: f64 = 1e-10;

/// Exact header of the sweep CSV.
pub const SWEEP_HEADER: &str = "k,inv_k,gamma,x1_sq,x2_sq,x1_sq_over_k,x2_sq_over_k,U1,U2,U1_over_k2,U2_over_k2,sum_over_k2,diff_over_k2,branch,region";

/// Header of the regions CSV.
pub const REGIONS_HEADER: &str = "k,inv_k,gamma,cos_2gamma,region";

/// Defaults applied when a flag is omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub default_k: f64,
    pub default_gamma: f64,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub series_tail_tol: f64,
    pub output_precision: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            default_k: 4.0,
            default_gamma: 0.0,
            mc_samples: 1_000_000,
            mc_seed: 1,
            series_tail_tol: 1e-12,
            output_precision: 12,
        }
    }
}

impl RunConfig {
    /// Parse a flat `key=value` file. Blank lines and `#` comments are
    /// skipped; unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| {
                Error::Config(format!("line {}: {key}: {e}", lineno + 1))
            };
            match key {
                "default_k" => cfg.default_k = value.parse().map_err(|e| bad(&e))?,
                "default_gamma" => cfg.default_gamma = value.parse().map_err(|e| bad(&e))?,
                "mc_samples" => cfg.mc_samples = value.parse().map_err(|e| bad(&e))?,
                "mc_seed" => cfg.mc_seed = value.parse().map_err(|e| bad(&e))?,
                "series_tail_tol" => cfg.series_tail_tol = value.parse().map_err(|e| bad(&e))?,
                "output_precision" => cfg.output_precision = value.parse().map_err(|e| bad(&e))?,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Resolve the config: explicit path, else `QCOURNOT_CONFIG`, else
    /// `qcournot.conf` when present, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        if let Some(path) = explicit {
            return Self::from_file(path);
        }
        if let Ok(path) = std::env::var(CONFIG_ENV) {
            return Self::from_file(Path::new(&path));
        }
        let default = Path::new(CONFIG_FILE);
        if default.exists() {
            return Self::from_file(default);
        }
        Ok(Self::default())
    }

    fn validate(&self) -> Result<()> {
        if self.mc_samples == 0 {
            return Err(Error::Config("mc_samples must be at least 1".into()));
        }
        if !(self.series_tail_tol > 0.0 && self.series_tail_tol <= 1e-6) {
            return Err(Error::Config(
                "series_tail_tol must lie in (0, 1e-6]".into(),
            ));
        }
        if self.output_precision == 0 || self.output_precision > 17 {
            return Err(Error::Config("output_precision must lie in 1..=17".into()));
        }
        GamePoint::new(self.default_k, self.default_gamma)?;
        Ok(())
    }
}

/// Format with a fixed number of significant digits, positional where the
/// magnitude allows and scientific otherwise, trailing zeros trimmed.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific formatting always contains an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn kv(out: &mut dyn Write, key: &str, value: &str) -> Result<()> {
    writeln!(out, "{key}={value}")?;
    Ok(())
}

fn kvf(out: &mut dyn Write, key: &str, value: f64, precision: usize) -> Result<()> {
    kv(out, key, &format_sig(value, precision))
}

/// Evaluator behind the `payoff` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffMethod {
    Closed,
    Series,
    Mc,
}

/// Evaluator behind the `nash` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NashMethod {
    Closed,
    Numeric,
}

pub fn cmd_payoff(
    g: GamePoint,
    x1_sq: f64,
    x2_sq: f64,
    method: PayoffMethod,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let s = StrategyPair::from_squares(x1_sq, x2_sq)?;
    let p = cfg.output_precision;
    match method {
        PayoffMethod::Closed => {
            let (u1, u2) = payoffs_closed(s, g);
            kvf(out, "u1", u1, p)?;
            kvf(out, "u2", u2, p)?;
        }
        PayoffMethod::Series => {
            let (u1, u2) = payoffs_series(s, g, cfg.series_tail_tol)?;
            kvf(out, "u1", u1, p)?;
            kvf(out, "u2", u2, p)?;
        }
        PayoffMethod::Mc => {
            let est = payoffs_mc(s, g, cfg.mc_samples, cfg.mc_seed)?;
            kvf(out, "u1", est.u1, p)?;
            kvf(out, "u2", est.u2, p)?;
            kvf(out, "stderr2", est.stderr2, p)?;
        }
    }
    Ok(())
}

/// Default successive-change tolerance for `nash --method numeric`.
pub const NUMERIC_NASH_TOL: f64 = 1e-10;

pub fn cmd_nash(
    g: GamePoint,
    method: NashMethod,
    tol: Option<f64>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let eq: EquilibriumResult = match method {
        NashMethod::Closed => closed_form_nash(g),
        NashMethod::Numeric => numeric_nash(g, tol.unwrap_or(NUMERIC_NASH_TOL))?,
    };
    let p = cfg.output_precision;
    kvf(out, "x1_sq", eq.x1_sq, p)?;
    kvf(out, "x2_sq", eq.x2_sq, p)?;
    kvf(out, "U1", eq.u1, p)?;
    kvf(out, "U2", eq.u2, p)?;
    kv(out, "branch", eq.branch.as_str())?;
    if let Some(gc) = transition_gamma(g.k()) {
        kvf(out, "gamma_c", gc, p)?;
    }
    Ok(())
}

/// Render a sweep table as CSV with the exact column set of
/// [`SWEEP_HEADER`].
pub fn write_sweep_csv(table: &SweepTable, precision: usize, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in &table.rows {
        let k = row.k;
        let k2 = k * k;
        let fields = [
            format_sig(k, precision),
            format_sig(1.0 / k, precision),
            format_sig(row.gamma, precision),
            format_sig(row.x1_sq, precision),
            format_sig(row.x2_sq, precision),
            format_sig(row.x1_sq / k, precision),
            format_sig(row.x2_sq / k, precision),
            format_sig(row.u1, precision),
            format_sig(row.u2, precision),
            format_sig(row.u1 / k2, precision),
            format_sig(row.u2 / k2, precision),
            format_sig(row.sum / k2, precision),
            format_sig(row.diff / k2, precision),
            row.branch.as_str().to_string(),
            row.region.map_or("-", |r| r.as_str()).to_string(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn cmd_sweep(
    k_grid: GridSpec,
    gamma_grid: GridSpec,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let table = sweep(k_grid, gamma_grid)?;
    write_sweep_csv(&table, cfg.output_precision, out)
}

/// Like `sweep` but restricted to the region-classification columns.
pub fn cmd_regions(
    k_grid: GridSpec,
    gamma_grid: GridSpec,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let table = sweep(k_grid, gamma_grid)?;
    let p = cfg.output_precision;
    writeln!(out, "{REGIONS_HEADER}")?;
    for row in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_sig(row.k, p),
            format_sig(1.0 / row.k, p),
            format_sig(row.gamma, p),
            format_sig((2.0 * row.gamma).cos(), p),
            row.region.map_or("-", |r| r.as_str()),
        )?;
    }
    Ok(())
}

/// Check the loss-compensation invariance; returns whether the deviation
/// stayed within [`LOSS_CHECK_TOL`].
pub fn cmd_loss_check(
    g: GamePoint,
    x1: f64,
    x2: f64,
    kappa_t: f64,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<bool> {
    let s = StrategyPair::new(x1, x2)?;
    let ch = LossChannel::new(kappa_t, 1.0)?;
    let (u1_before, u2_before) = payoffs_closed(s, g);
    let transmitted = apply_loss(compensate_loss(s, ch), ch);
    let (u1_after, u2_after) = payoffs_closed(transmitted, g);
    let deviation = (u1_before - u1_after)
        .abs()
        .max((u2_before - u2_after).abs());

    let p = cfg.output_precision;
    kvf(out, "u1_before", u1_before, p)?;
    kvf(out, "u2_before", u2_before, p)?;
    kvf(out, "u1_after", u1_after, p)?;
    kvf(out, "u2_after", u2_after, p)?;
    kvf(out, "max_deviation", deviation, p)?;
    let ok = deviation <= LOSS_CHECK_TOL;
    kv(out, "within_tolerance", if ok { "true" } else { "false" })?;
    Ok(ok)
}

/// Front-end to the classical-game operations.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalOp {
    Payoffs { q1: f64, q2: f64 },
    MandelQ { q2: f64 },
    Nash,
    PoissonEq,
    Advantage,
}

/// Parse a distribution argument: `deterministic`, `poisson`, or
/// `const:<sigma2>`.
pub fn parse_distribution(text: &str) -> Result<CountDistribution> {
    match text {
        "deterministic" => Ok(CountDistribution::Deterministic),
        "poisson" => Ok(CountDistribution::Poisson),
        other => {
            if let Some(sigma2) = other.strip_prefix("const:") {
                let sigma2: f64 = sigma2
                    .parse()
                    .map_err(|e| Error::Domain(format!("const variance '{sigma2}': {e}")))?;
                if !(sigma2 >= 0.0 && sigma2.is_finite()) {
                    return Err(Error::Domain(format!(
                        "const variance {sigma2} must be nonnegative"
                    )));
                }
                Ok(CountDistribution::ConstantVariance(sigma2))
            } else {
                Err(Error::Domain(format!(
                    "unknown distribution '{other}' (expected deterministic, poisson, \
                     or const:<sigma2>)"
                )))
            }
        }
    }
}

pub fn cmd_classical(
    op: ClassicalOp,
    dist: &CountDistribution,
    k: f64,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> Result<()> {
    let p = cfg.output_precision;
    match op {
        ClassicalOp::Payoffs { q1, q2 } => {
            let q = ClassicalQuantities::new(q1, q2, k)?;
            let (u1, u2) = classical::payoffs(q, dist)?;
            kvf(out, "u1", u1, p)?;
            kvf(out, "u2", u2, p)?;
        }
        ClassicalOp::MandelQ { q2 } => {
            let (mq, g2) = classical::mandel_q(dist, q2)?;
            kvf(out, "Q", mq, p)?;
            kvf(out, "g2", g2, p)?;
        }
        ClassicalOp::Nash => {
            let (q1, q2) = classical::nash(dist, k)?;
            let (u1, u2) = classical::payoffs(ClassicalQuantities::new(q1, q2, k)?, dist)?;
            kvf(out, "q1", q1, p)?;
            kvf(out, "q2", q2, p)?;
            kvf(out, "u1", u1, p)?;
            kvf(out, "u2", u2, p)?;
        }
        ClassicalOp::PoissonEq => {
            let (q1, q2, u1, u2) = classical::poisson_equilibrium(k)?;
            kvf(out, "q1", q1, p)?;
            kvf(out, "q2", q2, p)?;
            kvf(out, "u1", u1, p)?;
            kvf(out, "u2", u2, p)?;
        }
        ClassicalOp::Advantage => {
            let advantage = classical::firm2_advantage(dist, k)?;
            kv(
                out,
                "firm2_advantage",
                if advantage { "true" } else { "false" },
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(3.6, 12), "3.6");
        assert_eq!(format_sig(-3.6, 12), "-3.6");
        assert_eq!(format_sig(0.13125, 12), "0.13125");
        assert_eq!(format_sig(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_sig(25.0 / 9.0, 6), "2.77778");
        assert_eq!(format_sig(1e-30, 12), "1e-30");
        assert_eq!(format_sig(1.23456789e15, 6), "1.23457e15");
        assert_eq!(format_sig(100.0, 12), "100");
        assert_eq!(format_sig(0.9999, 2), "1");
    }

    #[test]
    fn config_parses_and_validates() {
        let dir = std::env::temp_dir().join("qcournot-cfg-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("good.conf");
        std::fs::write(
            &path,
            "# comment\ndefault_k = 6\nmc_samples=5000\nmc_seed = 9\noutput_precision=8\n",
        )
        .unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.default_k, 6.0);
        assert_eq!(cfg.mc_samples, 5000);
        assert_eq!(cfg.mc_seed, 9);
        assert_eq!(cfg.output_precision, 8);
        assert_eq!(cfg.series_tail_tol, 1e-12);

        let bad = dir.join("bad.conf");
        std::fs::write(&bad, "unknown_key=1\n").unwrap();
        assert!(RunConfig::from_file(&bad).is_err());

        let invalid = dir.join("invalid.conf");
        std::fs::write(&invalid, "series_tail_tol=0.5\n").unwrap();
        assert!(RunConfig::from_file(&invalid).is_err());
    }

    #[test]
    fn payoff_command_output() {
        let g = GamePoint::new(4.0, 0.0).unwrap();
        let cfg = RunConfig::default();
        let mut buf = Vec::new();
        cmd_payoff(g, 2.0, 2.0, PayoffMethod::Closed, &cfg, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "u1=2\nu2=1\n");

        let mut buf = Vec::new();
        cmd_payoff(g, 2.0, 2.0, PayoffMethod::Series, &cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("u1=2\nu2="), "{text}");

        let mut buf = Vec::new();
        cmd_payoff(g, 2.0, 2.0, PayoffMethod::Mc, &cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("stderr2="), "{text}");
    }

    #[test]
    fn nash_command_output() {
        let g = GamePoint::new(4.0, std::f64::consts::FRAC_PI_6).unwrap();
        let cfg = RunConfig::default();
        let mut buf = Vec::new();
        cmd_nash(g, NashMethod::Closed, None, &cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("x1_sq=3.6\n"), "{text}");
        assert!(text.contains("x2_sq=0.6\n"), "{text}");
        assert!(text.contains("branch=interior"), "{text}");
        assert!(text.contains("gamma_c="), "{text}");

        // k < 2 has no transition angle to report.
        let g = GamePoint::new(1.5, 0.2).unwrap();
        let mut buf = Vec::new();
        cmd_nash(g, NashMethod::Closed, None, &cfg, &mut buf).unwrap();
        assert!(!String::from_utf8(buf).unwrap().contains("gamma_c="));
    }

    #[test]
    fn sweep_csv_shape() {
        let cfg = RunConfig::default();
        let mut buf = Vec::new();
        cmd_sweep(
            GridSpec::new(4.0, 4.0, 1).unwrap(),
            GridSpec::new(0.0, 0.0, 1).unwrap(),
            &cfg,
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(lines.next(), None);
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 15);
        assert_eq!(fields[0], "4");
        assert_eq!(fields[1], "0.25");
        // U1/k^2 = 25/144.
        assert_eq!(fields[9], format_sig(25.0 / 144.0, 12));
        assert_eq!(fields[13], "interior");
        assert_eq!(fields[14], "-");
    }

    #[test]
    fn regions_csv_shape() {
        let cfg = RunConfig::default();
        let mut buf = Vec::new();
        cmd_regions(
            GridSpec::new(10.0, 10.0, 1).unwrap(),
            GridSpec::new(0.05, 0.05, 1).unwrap(),
            &cfg,
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), REGIONS_HEADER);
        assert!(lines.next().unwrap().ends_with(",D"));
    }

    #[test]
    fn loss_check_verdicts() {
        let cfg = RunConfig::default();
        let g = GamePoint::new(4.0, 0.3).unwrap();
        let mut buf = Vec::new();
        let ok = cmd_loss_check(g, 1.2, 0.7, 0.0, &cfg, &mut buf).unwrap();
        assert!(ok);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("max_deviation=0\n"), "{text}");

        let mut buf = Vec::new();
        let ok = cmd_loss_check(g, 1.2, 0.7, 2.0 * (2.0_f64).ln(), &cfg, &mut buf).unwrap();
        assert!(ok);
    }

    #[test]
    fn distribution_parsing() {
        assert!(matches!(
            parse_distribution("poisson").unwrap(),
            CountDistribution::Poisson
        ));
        assert!(matches!(
            parse_distribution("deterministic").unwrap(),
            CountDistribution::Deterministic
        ));
        match parse_distribution("const:2.5").unwrap() {
            CountDistribution::ConstantVariance(s) => assert_eq!(s, 2.5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_distribution("const:-1").is_err());
        assert!(parse_distribution("gaussian").is_err());
    }

    #[test]
    fn classical_command_output() {
        let cfg = RunConfig::default();
        let dist = CountDistribution::Poisson;

        let mut buf = Vec::new();
        cmd_classical(
            ClassicalOp::Payoffs { q1: 1.0, q2: 1.0 },
            &dist,
            4.0,
            &cfg,
            &mut buf,
        )
        .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "u1=2\nu2=1\n");

        let mut buf = Vec::new();
        cmd_classical(ClassicalOp::MandelQ { q2: 3.0 }, &dist, 4.0, &cfg, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "Q=0\ng2=1\n");

        let mut buf = Vec::new();
        cmd_classical(ClassicalOp::PoissonEq, &dist, 4.0, &cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("q1=1.66666666667\n"), "{text}");

        let mut buf = Vec::new();
        cmd_classical(ClassicalOp::Advantage, &dist, 5.0, &cfg, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "firm2_advantage=false\n");
    }
}
