use std::path::Path;

use colotame_core::inverse::{
    derivative_amplification, newton_invert, InversionResult, DEFAULT_MAXITER,
};
use colotame_core::nemytskii::COLO_SLACK;
use colotame_core::tameness::GeneratorFamily;
use colotame_core::{CompOp, Error, Grading, SmoothFn};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{result_csv, write_atomic, Report};

pub const RESULT_FILE: &str = "result.csv";
pub const SOLUTION_FILE: &str = "solution.txt";
pub const GENERATOR_FILE: &str = "generator.txt";

fn operator(config: &RunConfig) -> Result<CompOp, CliError> {
    let grid = config.grid()?;
    Ok(CompOp::new(config.phi()?, &grid)?)
}

fn check_order(m: &Grading, config: &RunConfig) -> Result<(), CliError> {
    if m.max_order() != config.max_order {
        return Err(CliError::Config(format!(
            "grading has {} entries but N = {} needs {}",
            m.values().len(),
            config.max_order,
            config.max_order + 1
        )));
    }
    Ok(())
}

/// Factor by which the default grading exceeds the rounding noise of each
/// derivative order.
pub const NOISE_MARGIN: f64 = 1e6;

/// `m_i = max_{l ≤ i} max(sup|v₀^(l)|, NOISE_MARGIN·r_l)` for `v₀ = ℓ(x − f(y₀))`,
/// where `r_l` is the largest `l`-th derivative that rounding of the
/// coefficients of `y₀ + 2v₀` can produce. The target lies in `B_m`, and
/// gauges of increments are not dominated by rounding.
pub fn default_grading(op: &CompOp, y0: &SmoothFn, x: &SmoothFn) -> Result<Grading, CliError> {
    let v0 = op.ell_apply(y0, &(x - &op.apply(y0)?))?;
    let config = y0.config();
    let scale = y0.sup_abs(0)? + 2.0 * v0.sup_abs(0)?;
    let amplification = derivative_amplification(config.degree, config.max_order);
    let mut acc = 0.0_f64;
    let values: Vec<f64> = v0
        .sup_abs_orders()
        .into_iter()
        .zip(amplification)
        .map(|(sup, amp)| {
            acc = acc
                .max(sup)
                .max(NOISE_MARGIN * 8.0 * f64::EPSILON * scale * amp);
            acc
        })
        .collect();
    if acc == 0.0 {
        return Ok(Grading::constant(values.len() - 1, 1.0)?);
    }
    Ok(Grading::new(values)?)
}

#[derive(Debug, Clone)]
pub struct InvertOutcome {
    pub result: InversionResult,
    pub grading: Grading,
    pub report: Report,
}

/// Solves `f(y) = target` near `y0` and writes `result.csv` and `solution.txt`.
///
/// The files are written whenever the iteration runs; an uncertified run
/// then fails with a certificate error.
pub fn invert(
    config: &RunConfig,
    out: &Path,
    grading: Option<Grading>,
) -> Result<InvertOutcome, CliError> {
    let op = operator(config)?;
    let y0 = config.y0_fn(op.grid())?;
    let x = config.target_fn(op.grid())?;
    let m = match grading {
        Some(m) => m,
        None => default_grading(&op, &y0, &x)?,
    };
    check_order(&m, config)?;
    let result = newton_invert(
        &op,
        &y0,
        &x,
        &m,
        config.epsilon,
        config.tol,
        DEFAULT_MAXITER,
    )?;
    let c = result.certificate;
    let mut report = Report::new();
    report
        .put("phi", &config.phi)
        .put("y0", &config.y0)
        .put("target", &config.target)
        .put_f64("epsilon", config.epsilon)
        .put_list("grading", m.values())
        .put("steps", result.steps())
        .put("stop", format!("{:?}", result.stop))
        .put("certified", result.certified())
        .put("cauchy_ok", c.cauchy_ok)
        .put("domain_ok", c.domain_ok)
        .put("lipschitz_ok", c.lipschitz_ok)
        .put("converged", c.converged)
        .put_f64("v0_gauge", result.v0_gauge)
        .put_f64("residual_sup", result.residual_sup)
        .put_f64("error_bound", result.error_bound)
        .put_f64("noise_floor", result.noise_floor)
        .put("degree", result.y.degree())
        .put_list("coefficients", result.y.coeffs());
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join(RESULT_FILE), &result_csv(&result)?)?;
    write_atomic(&out.join(SOLUTION_FILE), report.render().as_bytes())?;
    if !result.certified() {
        return Err(CliError::Certificate(format!(
            "inversion not certified: stop={:?} cauchy_ok={} domain_ok={} lipschitz_ok={} converged={}",
            result.stop, c.cauchy_ok, c.domain_ok, c.lipschitz_ok, c.converged
        )));
    }
    Ok(InvertOutcome {
        result,
        grading: m,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct CertifyOutcome {
    pub report: Report,
    pub certified: bool,
}

/// Builds the generator family at `y0`, checks the grading (canonical or
/// overridden) and writes `generator.txt`.
pub fn certify(
    config: &RunConfig,
    out: &Path,
    grading: Option<Grading>,
) -> Result<CertifyOutcome, CliError> {
    let op = operator(config)?;
    let y0 = config.y0_fn(op.grid())?;
    let family = GeneratorFamily::build(&op, &y0, config.l0, config.quad_nodes)?;
    let m = match grading {
        Some(m) => m,
        None => family.canonical()?,
    };
    check_order(&m, config)?;
    let seed = config.seed;
    let mut report = Report::new();
    report
        .put("phi", &config.phi)
        .put("y0", &config.y0)
        .put("l0", family.l0())
        .put_f64("B0", family.b0())
        .put("chi_zero", family.chi().is_zero())
        .put("halvings", family.halvings())
        .put_list("n", family.n())
        .put_list("x0", family.x0())
        .put_list("x1", family.x1())
        .put_list("m", m.values())
        .put_f64("base_point_scale", family.base_point_scale());
    let mut failures = Vec::new();

    let membership = family.check_membership(&m);
    match &membership {
        Ok(()) => report.put("membership", "ok"),
        Err(Error::NotMember(why)) => {
            failures.push(format!("membership: {why}"));
            report.put("membership", format!("failed ({why})"))
        }
        Err(e) => return Err(e.clone().into()),
    };
    if membership.is_ok() {
        let star = family.verify_star(&m, config.samples, seed)?;
        report
            .put("star_passed", star.passed)
            .put("star_v0_ok", star.v0_ok)
            .put_f64("star_max_gauge", star.max_gauge);
        if !star.passed {
            let index = star.witness.as_ref().map(|w| w.0).unwrap_or_default();
            failures.push(format!("star: gauge {} at sample {index}", star.max_gauge));
        }
    }

    let colo = op.colo_check(&y0, config.epsilon, &m, config.samples, seed)?;
    let witness = colo.witness.as_ref().map(|w| w.index);
    report
        .put_f64("colo_epsilon", colo.epsilon)
        .put("colo_passed", colo.passed)
        .put_f64("colo_max_ratio", colo.max_ratio)
        .put(
            "colo_witness",
            witness
                .map(|k| k.to_string())
                .unwrap_or_else(|| "none".into()),
        );
    if !colo.passed {
        failures.push(format!(
            "colo: ratio {} at sample {}",
            colo.max_ratio,
            witness.unwrap_or_default()
        ));
    }

    let contraction = op.contraction_ratio(&y0, &m, config.pairs, seed)?;
    let contraction_ok = contraction <= config.epsilon + COLO_SLACK;
    report
        .put_f64("contraction_ratio", contraction)
        .put("contraction_passed", contraction_ok);
    if !contraction_ok {
        failures.push(format!("contraction: ratio {contraction}"));
    }

    let bound = family.deriv_bound_check(&m, config.samples, seed)?;
    report
        .put("deriv_bound_passed", bound.passed)
        .put_f64("deriv_bound_max_ratio", bound.max_ratio)
        .put("deriv_bound_passed_loose", bound.passed_loose)
        .put_f64("deriv_bound_max_ratio_loose", bound.max_ratio_loose);
    if !(bound.passed && bound.passed_loose) {
        failures.push(format!("derivative bound: ratio {}", bound.max_ratio));
    }

    let certified = failures.is_empty();
    report.put("certified", certified);
    std::fs::create_dir_all(out)?;
    write_atomic(&out.join(GENERATOR_FILE), report.render().as_bytes())?;
    if !certified {
        return Err(CliError::Certificate(failures.join("; ")));
    }
    Ok(CertifyOutcome { report, certified })
}
