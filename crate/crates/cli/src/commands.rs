//! Subcommand bodies. Each returns whether every requested check passed.

use std::io::Write;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};
use stablab::boundary::estimates::{check_boundary_estimate, BoundaryEstimate, BoundaryInput, BoundaryParams};
use stablab::boundary::grid::{Field2D, HalfDiskMesh};
use stablab::boundary::remark::remark81_counterexample;
use stablab::boundary::solver::{solve_half_disk, CurvedBoundary};
use stablab::boundary::suite::{run_boundary_suite, BoundarySuiteConfig};
use stablab::inequality::sweep::{run_suite, SuiteGroup};
use stablab::interior::appendix_e::{appendix_e_counterexample, default_mesh};
use stablab::interior::suite::{run_interior_suite, SuiteConfig};
use stablab::interior::{check_interior_estimate, InteriorEstimate, InteriorInput, InteriorParams};
use stablab::radial::{continue_branch_on, shoot, singular_solution_on};
use stablab::report::EstimateReport;
use stablab::sampler::SamplerConfig;
use stablab::stability::{annotate_stability, first_eigenvalue};
use stablab::{Dimension, Error, Nonlinearity, RadialField, RadialMesh};

use crate::args::{
    BcheckArgs, BranchArgs, BsolveArgs, CheckAllArgs, CheckArgs, Command, Counterexample, CounterexampleArgs, ReportArgs,
    StabilityArgs, SuiteArgs, SuiteKind,
};
use crate::branch_table::{BranchMeta, BranchTable};
use crate::output::{companion, num, opt_num, to_canonical_string, Run, Table};
use crate::Failure;

pub fn dispatch(cmd: &Command, run: &mut Run) -> Result<bool, Failure> {
    match cmd {
        Command::Branch(a) => branch(a, run),
        Command::Stability(a) => stability(a, run),
        Command::Check(a) => check(a, run),
        Command::CheckAll(a) => check_all(a, run),
        Command::Bsolve(a) => bsolve(a, run),
        Command::Bcheck(a) => bcheck(a, run),
        Command::Suite(a) => suite(a, run),
        Command::Counterexample(a) => counterexample(a, run),
        Command::Report(a) => report(a, run),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn require_dim(n: usize, min: usize, max: usize) -> Result<Dimension, Failure> {
    if n < min || n > max {
        return Err(Error::DimensionOutOfRange { n, min, max }.into());
    }
    Ok(Dimension::new(n)?)
}

fn report_row(r: &EstimateReport) -> Vec<String> {
    vec![r.estimate_id.clone(), num(r.lhs), num(r.rhs_core), num(r.empirical_constant), num(r.budget), r.pass.to_string()]
}

const REPORT_COLUMNS: [&str; 6] = ["estimate_id", "lhs", "rhs_core", "constant", "budget", "pass"];

fn announce_failure(what: &str, witness: &str) {
    eprintln!("check failed: {what}");
    eprintln!("witness: {witness}");
}

fn branch(a: &BranchArgs, run: &mut Run) -> Result<bool, Failure> {
    let d = Dimension::new(a.dim)?;
    let f = Nonlinearity::parse(&a.nl)?;
    let mesh = RadialMesh::unit_uniform(a.nodes)?;
    let mut b = continue_branch_on(d, &f, a.smax, a.steps, &mesh)?;
    annotate_stability(&mut b)?;
    let meta = BranchMeta { dim: a.dim, nl: a.nl.clone(), nodes: a.nodes, smax: a.smax, steps: a.steps };
    let table = BranchTable::from_branch(meta, &b);
    run.write_csv(&a.out, &table.header(), &table.table())?;
    let summary = json!({
        "pass": true,
        "dim": a.dim,
        "nl": a.nl,
        "lambda_star_estimate": b.lambda_star_estimate,
        "turning_index": b.turning_index,
        "rows": table.rows,
    });
    run.write_json(&companion(&a.out, "json"), &summary)?;
    run.record("branch", true);
    println!("lambda* ~ {} at row {} of {}", b.lambda_star_estimate, b.turning_index, table.rows.len());
    Ok(true)
}

/// Re-solves row `index` of a branch CSV.
fn branch_solution(path: &Path, index: usize) -> Result<(BranchTable, Nonlinearity, f64, RadialField), Failure> {
    let table = BranchTable::parse(&read(path)?)?;
    let row = table.row(index)?.clone();
    let f = Nonlinearity::parse(&table.meta.nl)?;
    let mesh = RadialMesh::unit_uniform(table.meta.nodes)?;
    let (lambda, field) = shoot(Dimension::new(table.meta.dim)?, &f, row.s, &mesh)?;
    Ok((table, f, lambda, field))
}

fn stability(a: &StabilityArgs, run: &mut Run) -> Result<bool, Failure> {
    let (_, f, lambda, field) = branch_solution(&a.branch, a.index)?;
    let rep = first_eigenvalue(&field, &f, lambda)?;
    // A closed pipe (e.g. `| head`) is not a failure of the check.
    let _ = writeln!(std::io::stdout().lock(), "{}", to_canonical_string(&rep)?);
    if let Some(out) = &a.out {
        run.write_json(out, &rep)?;
    }
    run.record("stability", true);
    Ok(true)
}

fn interior_params(a: &CheckArgs) -> InteriorParams {
    InteriorParams { rho: a.rho, alpha: a.alpha, shift_k: a.shift_k, budget: a.budget, ..InteriorParams::default() }
}

fn check(a: &CheckArgs, run: &mut Run) -> Result<bool, Failure> {
    let id: InteriorEstimate = a.estimate.parse()?;
    let req = id.requirements();
    let params = interior_params(a);
    let rep = if let (Some(path), Some(index)) = (&a.branch, a.index) {
        let (table, f, lambda, field) = branch_solution(path, index)?;
        require_dim(table.meta.dim, req.min_dim, req.max_dim)?;
        check_interior_estimate(id, &InteriorInput::solution(&field, &f, lambda), &params)?
    } else {
        let n = a.dim.ok_or_else(|| Failure::Usage("check needs --branch/--index or --dim".into()))?;
        let d = require_dim(n, req.min_dim, req.max_dim)?;
        if a.singular {
            let field = singular_solution_on(d, &RadialMesh::unit_geometric(a.nodes)?)?;
            check_interior_estimate(id, &InteriorInput::bare(&field), &params)?
        } else {
            let f = Nonlinearity::parse(&a.nl)?;
            let (lambda, field) = shoot(d, &f, a.s, &RadialMesh::unit_uniform(a.nodes)?)?;
            check_interior_estimate(id, &InteriorInput::solution(&field, &f, lambda), &params)?
        }
    };
    let mut table = Table::new(&REPORT_COLUMNS);
    table.push(report_row(&rep));
    run.emit_report(&a.out, &rep, &table)?;
    run.record(rep.estimate_id.clone(), rep.pass);
    if !rep.pass {
        announce_failure(
            &format!("{} constant {} exceeds budget {}", rep.estimate_id, rep.empirical_constant, rep.budget),
            &format!("lhs {} rhs_core {} params {}", rep.lhs, rep.rhs_core, json!(rep.params)),
        );
    }
    Ok(rep.pass)
}

fn check_row(prefix: &[String], id: &str, coarse: Option<&EstimateReport>, refined: Option<&EstimateReport>, drift: Option<f64>, pass: bool) -> Vec<String> {
    let mut row = prefix.to_vec();
    row.extend([
        id.to_string(),
        opt_num(coarse.map(|r| r.empirical_constant)),
        opt_num(refined.map(|r| r.empirical_constant)),
        opt_num(drift),
        pass.to_string(),
    ]);
    row
}

fn check_all(a: &CheckAllArgs, run: &mut Run) -> Result<bool, Failure> {
    match a.suite {
        SuiteKind::Interior => {
            let nonlinearities = a.nls.iter().map(|s| Nonlinearity::parse(s)).collect::<Result<Vec<_>, _>>()?;
            let cfg = SuiteConfig {
                dims: a.dims.clone(),
                nonlinearities,
                points_per_branch: a.points,
                nodes: a.nodes,
                steps: a.steps,
                ..SuiteConfig::default()
            };
            let entries = run_interior_suite(&cfg, &InteriorParams::default())?;
            let mut table = Table::new(&["dim", "nl", "s", "lambda", "estimate_id", "coarse", "refined", "drift", "pass"]);
            let mut pass = true;
            for e in &entries {
                let prefix = [e.dim.to_string(), e.nonlinearity.clone(), num(e.center_value), num(e.lambda)];
                for c in &e.checks {
                    let ok = c.error.is_none()
                        && c.coarse.as_ref().is_some_and(|r| r.pass)
                        && c.refined.as_ref().is_some_and(|r| r.pass)
                        && c.drift.is_some_and(|d| d < a.max_drift);
                    if !ok {
                        announce_failure(
                            &format!("{} at n={} {} s={}", c.estimate_id, e.dim, e.nonlinearity, e.center_value),
                            &to_canonical_string(c)?,
                        );
                    }
                    pass &= ok;
                    table.push(check_row(&prefix, &c.estimate_id, c.coarse.as_ref(), c.refined.as_ref(), c.drift, ok));
                }
            }
            run.emit_report(&a.out, &json!({ "suite": "interior", "pass": pass, "config": cfg, "entries": entries }), &table)?;
            run.record("interior", pass);
            Ok(pass)
        }
        SuiteKind::Boundary => {
            let cfg = BoundarySuiteConfig { nonlinearity: Nonlinearity::parse(&a.nl)?, nr: a.grid.0, nphi: a.grid.1, ..BoundarySuiteConfig::default() };
            let rep = run_boundary_suite(&cfg, &BoundaryParams::default())?;
            let mut table = Table::new(&["estimate_id", "coarse", "refined", "drift", "pass"]);
            for c in &rep.checks {
                let ok = c.passes(a.max_drift);
                if !ok {
                    announce_failure(&c.estimate_id, &to_canonical_string(c)?);
                }
                table.push(check_row(&[], &c.estimate_id, c.coarse.as_ref(), c.refined.as_ref(), c.drift, ok));
            }
            let pass = rep.all_pass(a.max_drift);
            run.emit_report(&a.out, &json!({ "suite": "boundary", "pass": pass, "config": cfg, "report": rep }), &table)?;
            run.record("boundary", pass);
            Ok(pass)
        }
    }
}

fn bsolve(a: &BsolveArgs, run: &mut Run) -> Result<bool, Failure> {
    let f = Nonlinearity::parse(&a.nl)?;
    let mesh = HalfDiskMesh::half_disk(1.0, a.grid.0, a.grid.1)?;
    let sol = solve_half_disk(&f, a.lambda, mesh, &CurvedBoundary::Zero)?;
    let mut table = Table::new(&["r", "phi", "u"]);
    for i in 0..=mesh.nr {
        for j in 0..=mesh.nphi {
            table.push(vec![num(mesh.radius(i)), num(mesh.angle(j)), num(sol.field.at(i, j))]);
        }
    }
    let doc = json!({
        "pass": true,
        "nl": a.nl,
        "lambda": a.lambda,
        "residual": sol.residual,
        "newton_steps": sol.newton_steps,
        "field": sol.field,
    });
    run.emit_report(&a.out, &doc, &table)?;
    run.record("bsolve", true);
    Ok(true)
}

#[derive(Deserialize)]
struct FieldFile {
    nl: String,
    lambda: f64,
    field: Field2D,
}

fn bcheck(a: &BcheckArgs, run: &mut Run) -> Result<bool, Failure> {
    let id: BoundaryEstimate = a.estimate.parse()?;
    let file: FieldFile = serde_json::from_str(&read(&a.field)?)
        .map_err(|e| Failure::Usage(format!("{} is not a bsolve field: {e}", a.field.display())))?;
    let f = Nonlinearity::parse(&file.nl)?;
    let params = BoundaryParams { rho: a.rho, alpha: a.alpha, budget: a.budget, ..BoundaryParams::default() };
    let rep = check_boundary_estimate(id, &BoundaryInput::solution(&file.field, &f, file.lambda), &params)?;
    let mut table = Table::new(&REPORT_COLUMNS);
    table.push(report_row(&rep));
    run.emit_report(&a.out, &rep, &table)?;
    run.record(rep.estimate_id.clone(), rep.pass);
    if !rep.pass {
        announce_failure(
            &format!("{} constant {} exceeds budget {}", rep.estimate_id, rep.empirical_constant, rep.budget),
            &format!("lhs {} rhs_core {} params {}", rep.lhs, rep.rhs_core, json!(rep.params)),
        );
    }
    Ok(rep.pass)
}

fn suite(a: &SuiteArgs, run: &mut Run) -> Result<bool, Failure> {
    let group: SuiteGroup = a.group.parse()?;
    let samples = a.samples.unwrap_or_else(|| group.default_samples());
    let cfg = SamplerConfig { seed: a.seed, ..SamplerConfig::default() };
    let rep = run_suite(group, samples, &cfg)?;
    let mut table = Table::new(&["check", "samples", "evaluations", "violations", "max_empirical_constant", "constant", "pass"]);
    for c in &rep.checks {
        table.push(vec![
            c.name.clone(),
            c.samples.to_string(),
            c.evaluations.to_string(),
            c.violations.to_string(),
            num(c.max_empirical_constant),
            opt_num(c.constant),
            c.pass.to_string(),
        ]);
        run.record(c.name.clone(), c.pass);
        if !c.pass {
            announce_failure(
                &format!("{}: {} violations in {} evaluations", c.name, c.violations, c.evaluations),
                &c.witness.as_ref().map_or_else(|| "none recorded".to_string(), Value::to_string),
            );
        }
    }
    run.emit_report(&a.out, &rep, &table)?;
    Ok(rep.pass)
}

fn counterexample(a: &CounterexampleArgs, run: &mut Run) -> Result<bool, Failure> {
    match a.which {
        Counterexample::Remark81 => {
            let rep = remark81_counterexample(a.delta, a.dim.unwrap_or(2))?;
            let mut table = Table::new(&["delta", "n", "l1", "radial_l1", "ratio", "superharmonic"]);
            table.push(vec![num(rep.delta), rep.n.to_string(), num(rep.l1), num(rep.radial_l1), num(rep.ratio), rep.superharmonic.to_string()]);
            let pass = rep.superharmonic;
            let mut doc = serde_json::to_value(&rep).map_err(|e| Failure::Internal(e.to_string()))?;
            doc["pass"] = json!(pass);
            run.emit_report(&a.out, &doc, &table)?;
            run.record("remark81", pass);
            if !pass {
                announce_failure("the family member is not superharmonic", &format!("min -Δu = {}", rep.min_minus_laplacian));
            }
            Ok(pass)
        }
        Counterexample::AppendixE => {
            let rep = appendix_e_counterexample(Dimension::new(a.dim.unwrap_or(3))?, &default_mesh()?)?;
            let mut table = Table::new(&["rho", "lhs", "rhs_core", "constant", "planar_energy"]);
            for s in &rep.scales {
                table.push(vec![num(s.rho), num(s.lhs), num(s.rhs_core), num(s.constant), num(s.planar_energy)]);
            }
            run.emit_report(&a.out, &rep, &table)?;
            run.record("appendixE", rep.pass);
            if !rep.pass {
                announce_failure("appendixE", &to_canonical_string(&rep.growth)?);
            }
            Ok(rep.pass)
        }
    }
}

fn report(a: &ReportArgs, run: &mut Run) -> Result<bool, Failure> {
    let mut table = Table::new(&["file", "manifest", "pass"]);
    let mut pass = true;
    let mut entries = Vec::new();
    for path in &a.inputs {
        let v: Value = serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{} is not JSON: {e}", path.display())))?;
        let ok = v
            .get("pass")
            .and_then(Value::as_bool)
            .ok_or_else(|| Failure::Usage(format!("{} has no top-level pass flag", path.display())))?;
        let manifest = v.get("manifest").and_then(Value::as_str).unwrap_or("").to_string();
        pass &= ok;
        table.push(vec![path.display().to_string(), manifest.clone(), ok.to_string()]);
        entries.push(json!({ "file": path.display().to_string(), "manifest": manifest, "pass": ok }));
        run.record(path.display().to_string(), ok);
    }
    run.emit_report(&a.out, &json!({ "pass": pass, "inputs": entries }), &table)?;
    Ok(pass)
}
