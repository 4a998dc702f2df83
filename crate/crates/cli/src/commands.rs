use std::fmt::Write as _;
use std::path::Path;

use bidisk_pick::extremal3::analyze_scale;
use bidisk_pick::hyperbolic::{
    circle_grid, coordinate_dists, interior_grid, is_balanced, kobayashi_dist, normalize_problem,
};
use bidisk_pick::pick::{build_matrices, classify};
use bidisk_pick::realization::{build_realization, cross_validate};
use bidisk_pick::{
    solve_extremal, BidiskPoint, Error, PickData3, RationalInner2, SolverConfig, C64,
};
use serde_json::{json, Map, Value};

use crate::io::{scaled_targets, ClassificationFile, PhiFile, ProblemFile, SolutionFile};
use crate::{Cli, CliError, Command, Global};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Solve { problem } => solve(g, problem),
        Command::Verify { solution, problem } => verify(g, solution, problem),
        Command::Classify { problem } => classify_cmd(g, problem),
        Command::Eval {
            solution,
            at,
            grid,
            boundary,
        } => eval(g, solution, at.as_deref(), *grid, *boundary),
        Command::Example { r } => example(g, *r),
        Command::Distance { p, q } => distance(g, p, q),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(g: &Global, text: &str) -> Result<(), CliError> {
    match &g.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(g: &Global, v: &impl serde::Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    emit(g, &s)
}

fn merge(into: &mut Map<String, Value>, from: &Value, source: &str) -> Result<(), CliError> {
    let obj = from.as_object().ok_or_else(|| {
        CliError::Input(format!("{source}: expected an object of solver settings"))
    })?;
    for (k, v) in obj {
        into.insert(k.clone(), v.clone());
    }
    Ok(())
}

/// Defaults, then the problem file's `config`, then `--config`, then `--tol`.
fn config(g: &Global, from_problem: Option<&Value>) -> Result<SolverConfig, CliError> {
    let Value::Object(mut map) =
        serde_json::to_value(SolverConfig::default()).expect("serializable")
    else {
        unreachable!("SolverConfig serializes to an object")
    };
    if let Some(v) = from_problem {
        merge(&mut map, v, "config")?;
    }
    if let Some(path) = &g.config {
        let v: Value = serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        merge(&mut map, &v, &path.display().to_string())?;
    }
    for item in &g.tol {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--tol {item}: expected KEY=VALUE")))?;
        if !map.contains_key(key) {
            return Err(CliError::Input(format!(
                "--tol {item}: unknown setting {key}"
            )));
        }
        let v: Value = serde_json::from_str(value.trim())
            .map_err(|_| CliError::Input(format!("--tol {item}: {value} is not a number")))?;
        map.insert(key.to_string(), v);
    }
    serde_json::from_value(Value::Object(map))
        .map_err(|e| CliError::Input(format!("solver settings: {e}")))
}

fn load_problem(g: &Global, path: &Path) -> Result<(PickData3, SolverConfig), CliError> {
    let p = ProblemFile::parse(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let cfg = config(g, p.config.as_ref())?;
    Ok((p.data, cfg))
}

/// The JSON report for an outcome that classifies the data instead of
/// solving it, or `None` for genuine failures.
fn classification_report(e: &Error) -> Option<Value> {
    let c = match e.root() {
        Error::ClassifiedAway(c) => ClassificationFile::new(c),
        Error::DegenerateAtExtreme(details) => ClassificationFile {
            kind: "Degenerate".into(),
            nodes: None,
            details: details.clone(),
        },
        Error::Infeasible { i, j, .. } => ClassificationFile {
            kind: "Infeasible".into(),
            nodes: Some([i + 1, j + 1]),
            details: e.root().to_string(),
        },
        _ => return None,
    };
    Some(json!({ "classification": c }))
}

fn solve(g: &Global, problem: &Path) -> Result<(), CliError> {
    let (data, cfg) = load_problem(g, problem)?;
    match solve_extremal(&data, &cfg) {
        Ok(report) => {
            emit_json(g, &SolutionFile::from_report(&report))?;
            if !g.quiet {
                eprintln!(
                    "t* = {:.12} ({} refinement, {} Newton steps)",
                    report.t_star,
                    match report.diagnostics.refinement {
                        bidisk_pick::extremal3::Refinement::Fold => "stationarity",
                        bidisk_pick::extremal3::Refinement::FixedScale { .. } => "fixed-scale",
                    },
                    report.diagnostics.newton_iterations
                );
            }
            Ok(())
        }
        Err(e) => {
            if let Some(report) = classification_report(&e) {
                emit_json(g, &report)?;
            }
            Err(e.into())
        }
    }
}

struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn max_node_error(phi: &RationalInner2, data: &PickData3, targets: &[C64; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let p = data.nodes()[i];
            (phi.eval(p.z1, p.z2) - targets[i]).norm()
        })
        .fold(0.0, f64::max)
}

fn verify(g: &Global, solution: &Path, problem: &Path) -> Result<(), CliError> {
    let (data, cfg) = load_problem(g, problem)?;
    let sol = SolutionFile::parse(&read(solution)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", solution.display())))?;
    let gamma = sol.gamma()?;
    let delta = sol.delta()?;
    let phi = sol.phi.to_phi()?;
    let (a, b) = (sol.a(), sol.b());

    let targets = scaled_targets(&data, sol.t_star);
    let scaled = PickData3::new(*data.nodes(), targets)
        .map_err(|e| CliError::Input(format!("t_star: {e}")))?;
    let mats = build_matrices(&scaled);
    let stated = (0..3)
        .map(|i| (crate::io::complex(sol.scaled_targets[i]) - targets[i]).norm())
        .fold(0.0, f64::max);
    let rank_one = gamma
        .sub(&a.outer_self())
        .frobenius_norm()
        .max(delta.sub(&b.outer_self()).frobenius_norm());
    let realization = match build_realization(&a, &b, &scaled, cfg.gram_tol, cfg.rank_tol) {
        Ok(psi) => cross_validate(&psi, &phi, 16),
        Err(_) => f64::INFINITY,
    };
    let checks = [
        Check {
            name: "scaled targets",
            residual: stated,
            tolerance: cfg.interp_tol,
        },
        Check {
            name: "decomposition",
            residual: mats.decomposition_residual(&gamma, &delta),
            tolerance: cfg.feas_tol,
        },
        Check {
            name: "gamma positive semidefinite",
            residual: (-gamma.min_eigenvalue()).max(0.0),
            tolerance: cfg.psd_tol,
        },
        Check {
            name: "delta positive semidefinite",
            residual: (-delta.min_eigenvalue()).max(0.0),
            tolerance: cfg.psd_tol,
        },
        Check {
            name: "rank one",
            residual: rank_one,
            tolerance: cfg.feas_tol,
        },
        Check {
            name: "interpolation",
            residual: max_node_error(&phi, &data, &targets),
            tolerance: cfg.interp_tol,
        },
        Check {
            name: "innerness",
            residual: phi.torus_deviation(cfg.torus_grid),
            tolerance: cfg.inner_tol,
        },
        Check {
            name: "realization",
            residual: realization,
            tolerance: cfg.inner_tol,
        },
    ];
    let mut report = String::new();
    for c in &checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(
            report,
            "{verdict} {}: residual {:.3e} (tolerance {:.1e})",
            c.name, c.residual, c.tolerance
        )
        .expect("writing to a String");
    }
    if !g.quiet {
        emit(g, &report)?;
    }
    match checks.iter().filter(|c| !c.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}

fn classify_cmd(g: &Global, problem: &Path) -> Result<(), CliError> {
    let (data, cfg) = load_problem(g, problem)?;
    let (direction, _) = normalize_problem(&data);
    let s = analyze_scale(&direction, &cfg)?;
    let mut out =
        serde_json::to_value(ClassificationFile::new(&s.classification)).expect("serializable");
    let obj = out.as_object_mut().expect("object");
    obj.insert("t_star".into(), json!(s.t_star));
    obj.insert("t_one_variable".into(), json!(s.t_one_variable));
    obj.insert("t_two_point".into(), json!(s.t_two_point));
    obj.insert(
        "two_point_nodes".into(),
        json!([s.two_point_pair.0 + 1, s.two_point_pair.1 + 1]),
    );
    // Data in the disk is also a problem in its own right, at scale one.
    // Below that scale no interpolant exists at all, whatever the pairwise
    // tests say.
    if data.in_disk() {
        let given = if s.upper < 1.0 - cfg.two_point_band {
            json!({
                "kind": "Infeasible",
                "details": format!("the data needs scale {:.12} < 1; no interpolant of norm at most one exists", s.t_star),
            })
        } else {
            match classify(&data, cfg.two_point_band) {
                Ok(c) => serde_json::to_value(ClassificationFile::new(&c)).expect("serializable"),
                Err(e) => match classification_report(&e) {
                    Some(v) => v["classification"].clone(),
                    None => return Err(e.into()),
                },
            }
        };
        obj.insert("given_scale".into(), given);
    }
    emit_json(g, &out)
}

fn parse_point(s: &str, what: &str) -> Result<BidiskPoint, CliError> {
    let x: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("{what}: expected re,im,re,im")))?;
    if x.len() != 4 || x.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Input(format!(
            "{what}: expected four finite numbers re,im,re,im"
        )));
    }
    BidiskPoint::new(C64::new(x[0], x[1]), C64::new(x[2], x[3]))
        .map_err(|e| CliError::Input(format!("{what}: {e}")))
}

fn eval(
    g: &Global,
    solution: &Path,
    at: Option<&str>,
    grid: Option<usize>,
    boundary: bool,
) -> Result<(), CliError> {
    let sol = SolutionFile::parse(&read(solution)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", solution.display())))?;
    let phi = sol.phi.to_phi()?;
    let points: Vec<(C64, C64)> = match (at, grid) {
        (Some(s), _) => {
            let p = parse_point(s, "--at")?;
            vec![(p.z1, p.z2)]
        }
        (None, Some(n)) if n > 0 => {
            let axis = if boundary {
                circle_grid(n)
            } else {
                interior_grid(n)
            };
            axis.iter()
                .flat_map(|&z1| axis.iter().map(move |&z2| (z1, z2)))
                .collect()
        }
        _ => return Err(CliError::Input("--grid: expected a positive size".into())),
    };
    let mut csv = String::new();
    for (z1, z2) in points {
        let v = phi.eval(z1, z2);
        writeln!(
            csv,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            z1.re,
            z1.im,
            z2.re,
            z2.im,
            v.re,
            v.im,
            v.norm()
        )
        .expect("writing to a String");
    }
    emit(g, &csv)
}

fn example(g: &Global, r: f64) -> Result<(), CliError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CliError::Input(format!("--r {r}: expected 0 < r < 1")));
    }
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let node = |a: f64, b: f64| BidiskPoint::new(C64::new(a, 0.0), C64::new(b, 0.0));
    let data = PickData3::new(
        [node(0.0, 0.0)?, node(r, 0.0)?, node(0.0, r)?],
        [zero, one, one],
    )?;
    // φ = (z¹ + z² − 2z¹z²)/(2 − z¹ − z²) for every r, at scale t* = r/(2 − r)
    let phi = RationalInner2::new(
        [zero, one, one, C64::new(-2.0, 0.0)],
        [C64::new(2.0, 0.0), -one, -one, zero],
    )?;
    let mut doc = ProblemFile::to_value(&data);
    doc.as_object_mut().expect("object").insert(
        "expected".into(),
        json!({ "t_star": r / (2.0 - r), "phi": PhiFile::from_phi(&phi) }),
    );
    emit_json(g, &doc)
}

fn distance(g: &Global, p: &str, q: &str) -> Result<(), CliError> {
    let cfg = config(g, None)?;
    let (p, q) = (parse_point(p, "p")?, parse_point(q, "q")?);
    let (d1, d2) = coordinate_dists(&p, &q);
    emit_json(
        g,
        &json!({
            "kobayashi": kobayashi_dist(&p, &q),
            "coordinate": [d1, d2],
            "balanced": is_balanced(&p, &q, cfg.balance_tol),
            "points": [[p.z1.re, p.z1.im, p.z2.re, p.z2.im], [q.z1.re, q.z1.im, q.z2.re, q.z2.im]],
        }),
    )
}
