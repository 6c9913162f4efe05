//! Reduced-size run of the module invariants, one line per suite.

use std::sync::Arc;

use colotame_core::funrep::{Grid, GridConfig};
use colotame_core::inverse::{
    derivative_invertibility, inverse_lipschitz_check, max_norm, neumann_bound_on, newton_invert,
    sample_target, DEFAULT_MAXITER, DEFAULT_TOL, RATIO_SLACK,
};
use colotame_core::sampling::{disk_element, stream, uniform, Purpose};
use colotame_core::tameness::{
    chi_identity_residual, chi_kernel, jet_derivative, GeneratorFamily, JetRecursion,
    DEFAULT_QUAD_NODES,
};
use colotame_core::{BivarFn, CompOp, Grading, SmoothFn};

/// Deliberate corruption used to check that the self-test notices it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Builds the grading with `0.99·θ` in place of `θ`.
    Theta,
}

struct Setup {
    grid: Arc<Grid>,
    op: CompOp,
    y0: SmoothFn,
    family: GeneratorFamily,
    m: Grading,
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn setup(fault: Option<Fault>) -> Result<Setup, String> {
    let grid = Grid::new(GridConfig::with_degree(32, 4).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let op = CompOp::new(
        BivarFn::parse("eta+eta^3").map_err(|e| e.to_string())?,
        &grid,
    )
    .map_err(|e| e.to_string())?;
    let y0 = SmoothFn::zero(&grid);
    let family =
        GeneratorFamily::build(&op, &y0, 2, DEFAULT_QUAD_NODES).map_err(|e| e.to_string())?;
    let n0 = family.n()[0];
    let m = match fault {
        None => family.canonical(),
        Some(Fault::Theta) => family.recursive_grading(|mi, i| Ok(0.99 * family.theta(n0, mi, i)?)),
    }
    .map_err(|e| e.to_string())?;
    Ok(Setup {
        grid,
        op,
        y0,
        family,
        m,
    })
}

fn funrep(s: &Setup) -> Outcome {
    let cube = SmoothFn::from_coeffs(
        &s.grid,
        vec![5.0 / 16.0, 15.0 / 32.0, 3.0 / 16.0, 1.0 / 32.0],
    )
    .map_err(|e| e.to_string())?;
    let projected = SmoothFn::from_fn(&s.grid, |t| t * t * t).map_err(|e| e.to_string())?;
    let err = (&cube - &projected).sup_abs(0).map_err(|e| e.to_string())?;
    check(err <= 1e-14, || format!("projection of s^3 off by {err:e}"))?;
    let d = cube.derivative().eval(0.5).map_err(|e| e.to_string())?;
    check((d - 0.75).abs() <= 1e-14, || format!("(s^3)'(0.5) = {d}"))?;
    Ok(format!("projection error {err:.1e}"))
}

fn bivar() -> Outcome {
    let f = BivarFn::parse("s*eta^2 + sin(eta)").map_err(|e| e.to_string())?;
    let got = f.partial(0, 1).eval(0.5, 0.3).map_err(|e| e.to_string())?;
    let want = 0.3 + 0.3_f64.cos();
    check((got - want).abs() <= 1e-15, || {
        format!("d/deta = {got}, expected {want}")
    })?;
    let mixed = f.partial(1, 1).eval(0.5, 0.3).map_err(|e| e.to_string())?;
    let swapped = f
        .partial(1, 0)
        .partial(0, 1)
        .eval(0.5, 0.3)
        .map_err(|e| e.to_string())?;
    check((mixed - swapped).abs() <= 1e-15, || {
        "mixed partials disagree".into()
    })?;
    Ok("partials exact".into())
}

fn grading(s: &Setup) -> Outcome {
    for k in 0..16 {
        let radius = 0.1 + 0.2 * k as f64;
        let x = disk_element(&s.grid, &s.m, radius, &mut stream(1, Purpose::Aux, k))
            .map_err(|e| e.to_string())?;
        let g = s.m.gauge(&x).map_err(|e| e.to_string())?;
        check((g - radius).abs() <= 1e-12 * radius, || {
            format!("sample {k}: gauge {g} != radius {radius}")
        })?;
        let g3 = s.m.gauge(&x.scaled(-3.0)).map_err(|e| e.to_string())?;
        check((g3 - 3.0 * g).abs() <= 1e-12 * g3, || {
            format!("sample {k}: gauge not homogeneous")
        })?;
    }
    Ok("16 samples".into())
}

fn inclusion(s: &Setup) -> Outcome {
    let report =
        s.op.colo_check(&s.y0, 0.5, &s.m, 16, 2)
            .map_err(|e| e.to_string())?;
    check(report.passed, || {
        format!("max ratio {} > 1/2", report.max_ratio)
    })?;
    Ok(format!("max ratio {:.3e}", report.max_ratio))
}

fn membership(s: &Setup) -> Outcome {
    s.family.check_membership(&s.m).map_err(|e| e.to_string())?;
    let n = s.family.n();
    check(
        n[0] <= 1.0 / (3.0 * s.family.b0()) && 2.0 * n[2] <= 1.0,
        || "n violates its constraints".into(),
    )?;
    let merged = s.family.merge(&s.m, &s.m).map_err(|e| e.to_string())?;
    check(merged == s.m, || "merge(m, m) != m".into())?;
    let (_, absorbed) = s.family.absorb(&[10.0; 5]).map_err(|e| e.to_string())?;
    s.family
        .check_membership(&absorbed)
        .map_err(|e| e.to_string())?;
    Ok(format!("B0 = {}", s.family.b0()))
}

fn star(s: &Setup) -> Outcome {
    let report = s
        .family
        .verify_star(&s.m, 16, 3)
        .map_err(|e| e.to_string())?;
    check(report.passed, || format!("max gauge {}", report.max_gauge))?;
    Ok(format!("max gauge {:.3e}", report.max_gauge))
}

fn chi_identity(s: &Setup) -> Outcome {
    let mut worst = 0.0_f64;
    for k in 0..4 {
        let mut rng = stream(4, Purpose::Aux, k);
        let mut poly = |amp: f64| {
            let c: Vec<f64> = (0..4).map(|_| uniform(&mut rng, -amp, amp)).collect();
            SmoothFn::from_coeffs(&s.grid, c).map_err(|e| e.to_string())
        };
        let (x, u, v) = (poly(0.1)?, poly(0.05)?, poly(0.5)?);
        let chi = chi_kernel(&s.op, &x, DEFAULT_QUAD_NODES).map_err(|e| e.to_string())?;
        worst =
            worst.max(chi_identity_residual(&s.op, &chi, &x, &u, &v).map_err(|e| e.to_string())?);
    }
    check(worst <= 1e-9, || format!("residual {worst:e}"))?;
    Ok(format!("residual {worst:.1e}"))
}

/// `(s·u·u·v)^(i)` against spectral differentiation of the product formed
/// in Chebyshev coefficients.
fn jet_recursion(s: &Setup) -> Outcome {
    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (j, x) in a.iter().enumerate() {
            for (k, y) in b.iter().enumerate() {
                out[j + k] += 0.5 * x * y;
                out[j.abs_diff(k)] += 0.5 * x * y;
            }
        }
        out
    }
    let chi = BivarFn::parse("s*eta").map_err(|e| e.to_string())?;
    let rec = JetRecursion::new(5);
    let mut worst = 0.0_f64;
    for k in 0..4 {
        let mut rng = stream(5, Purpose::Aux, k);
        let cu: Vec<f64> = (0..4).map(|_| uniform(&mut rng, -0.5, 0.5)).collect();
        let cv: Vec<f64> = (0..4).map(|_| uniform(&mut rng, -0.5, 0.5)).collect();
        let w = mul(&mul(&mul(&[0.5, 0.5], &cu), &cu), &cv);
        let w = SmoothFn::from_coeffs(&s.grid, w).map_err(|e| e.to_string())?;
        let u = SmoothFn::from_coeffs(&s.grid, cu).map_err(|e| e.to_string())?;
        let v = SmoothFn::from_coeffs(&s.grid, cv).map_err(|e| e.to_string())?;
        for i in 1..=5 {
            let d = w.nth_derivative(i);
            let scale = d.sup_abs(0).map_err(|e| e.to_string())?;
            for t in 0..=10 {
                let at = t as f64 / 10.0;
                let got = jet_derivative(&chi, &rec, &u, &v, i, at).map_err(|e| e.to_string())?;
                let want = d.eval(at).map_err(|e| e.to_string())?;
                worst = worst.max((got - want).abs() / scale.max(want.abs()));
            }
        }
    }
    check(worst <= 1e-7, || format!("relative error {worst:e}"))?;
    Ok(format!("relative error {worst:.1e}"))
}

fn derivative_bound(s: &Setup) -> Outcome {
    let report = s
        .family
        .deriv_bound_check(&s.m, 8, 6)
        .map_err(|e| e.to_string())?;
    check(report.passed && report.passed_loose, || {
        format!("ratio {}", report.max_ratio)
    })?;
    Ok(format!("max ratio {:.3e}", report.max_ratio))
}

fn neumann() -> Outcome {
    for eps in [0.1, 0.25, 0.49] {
        let v = neumann_bound_on(
            |x| vec![(1.0 - eps) * x[0]],
            max_norm,
            eps,
            &[vec![1.0], vec![-0.3]],
        )
        .map_err(|e| e.to_string())?;
        check(v.holds, || format!("bounds fail at eps {eps}"))?;
        check((v.inverse_ratio - 1.0 / (1.0 - eps)).abs() <= 1e-12, || {
            format!("inverse bound not attained at eps {eps}")
        })?;
    }
    Ok("scalar bounds attained".into())
}

fn newton(s: &Setup) -> Outcome {
    let mut worst = 0.0_f64;
    for k in 0..8 {
        let x =
            sample_target(&s.op, &s.y0, &s.m, 7, Purpose::Target, k).map_err(|e| e.to_string())?;
        let r = newton_invert(&s.op, &s.y0, &x, &s.m, 0.5, DEFAULT_TOL, DEFAULT_MAXITER)
            .map_err(|e| e.to_string())?;
        check(r.certified(), || {
            format!("target {k} not certified: {:?}", r.certificate)
        })?;
        check(
            r.ratios.iter().flatten().all(|&q| q <= 0.5 + RATIO_SLACK),
            || format!("target {k}: ratio above 1/2"),
        )?;
        for (y, t) in r.y.node_values().iter().zip(x.node_values()) {
            let mut root = t;
            for _ in 0..60 {
                root -= (root + root * root * root - t) / (1.0 + 3.0 * root * root);
            }
            worst = worst.max((y - root).abs());
        }
    }
    check(worst <= 1e-10, || format!("scalar oracle error {worst:e}"))?;
    Ok(format!("oracle error {worst:.1e}"))
}

fn lipschitz(s: &Setup) -> Outcome {
    let v = inverse_lipschitz_check(&s.op, &s.y0, &s.m, 0.5, 8, 8).map_err(|e| e.to_string())?;
    check(v.passed, || {
        format!("pair {:?} exceeds the bound", v.witness)
    })?;
    Ok(format!("max ratio {:.3e}", v.max_ratio))
}

fn derivative_inverse(s: &Setup) -> Outcome {
    let u = disk_element(&s.grid, &s.m, 0.25, &mut stream(9, Purpose::Aux, 0))
        .map_err(|e| e.to_string())?;
    let v = derivative_invertibility(&s.op, &s.y0, &(&s.y0 + &u), &s.m, 0.5, 16, 9)
        .map_err(|e| e.to_string())?;
    check(v.holds(), || {
        format!("witness probe {:?}", v.neumann.witness)
    })?;
    Ok(format!("premise ratio {:.1e}", v.neumann.premise_ratio))
}

/// Runs every suite, reporting `(name, detail)` lines through `emit`.
/// Stops at the first failing suite and returns its name and reason.
pub fn run(fault: Option<Fault>, mut emit: impl FnMut(&str, &str)) -> Result<(), (String, String)> {
    let fail = |name: &str, why: String| (name.to_string(), why);
    let s = setup(fault).map_err(|e| fail("setup", e))?;
    let suites: Vec<(&str, Box<dyn Fn(&Setup) -> Outcome>)> = vec![
        ("funrep-projection", Box::new(funrep)),
        ("bivar-partials", Box::new(|_| bivar())),
        ("grading-gauge", Box::new(grading)),
        ("nemytskii-inclusion", Box::new(inclusion)),
        ("tameness-membership", Box::new(membership)),
        ("tameness-star", Box::new(star)),
        ("tameness-chi-identity", Box::new(chi_identity)),
        ("tameness-jet-recursion", Box::new(jet_recursion)),
        ("tameness-derivative-bound", Box::new(derivative_bound)),
        ("inverse-neumann", Box::new(|_| neumann())),
        ("inverse-newton", Box::new(newton)),
        ("inverse-lipschitz", Box::new(lipschitz)),
        ("inverse-derivative", Box::new(derivative_inverse)),
    ];
    for (name, suite) in &suites {
        let detail = suite(&s).map_err(|why| fail(name, why))?;
        emit(name, &detail);
    }
    Ok(())
}
