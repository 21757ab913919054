use serde::Serialize;

use super::{sha256_hex, Check, ExperimentConfig, RunOutput};
use crate::error::Result;
use crate::operators::{audit_axioms, build_dg_pair, build_drp_pair, build_fd_pair, write_operator, OperatorPair};

#[derive(Serialize)]
struct Row {
    label: String,
    family: &'static str,
    order: usize,
    n: usize,
    strength: f64,
    report: crate::operators::AxiomReport,
}

/// Every shipped operator: FD and DRP orders 1–9, DG degrees 1–6 with
/// dissipation strength 0 and `dg_strength`.
pub fn shipped_operators(n_fd: usize, dg_strength: f64) -> Result<Vec<(String, OperatorPair, f64)>> {
    let mut ops = Vec::new();
    for order in 1..=9 {
        ops.push((format!("fd_upwind_p{order}"), build_fd_pair(order, n_fd, 1.0)?, 0.0));
    }
    for order in 1..=9 {
        ops.push((format!("fd_drp_p{order}"), build_drp_pair(order, n_fd, 1.0)?, 0.0));
    }
    for p in 1..=6 {
        for c in [0.0, dg_strength] {
            ops.push((format!("dg_lgl_p{p}_c{c}"), build_dg_pair(p, c, 1.0)?, c));
        }
    }
    Ok(ops)
}

pub fn run_operators_audit(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let mut rows = Vec::new();
    let mut csv = String::from("label,family,order,n,strength,a1_min_h,a1_sum_error,a2_residual,a3_residual,a4_max_quadratic,pass\n");
    for (i, (label, pair, c)) in shipped_operators(config.nodes, config.dg_strength)?.into_iter().enumerate() {
        let report = audit_axioms(&pair, config.trials, 1e-11, config.seed.wrapping_add(i as u64));
        csv.push_str(&format!(
            "{label},{},{},{},{c},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}\n",
            pair.family.as_str(),
            pair.interior_order,
            pair.n(),
            report.a1_min_h,
            report.a1_sum_error,
            report.a2_residual,
            report.a3_residual,
            report.a4_max_quadratic,
            report.pass()
        ));
        out.checks.push(Check::new(
            format!("audit {label}"),
            report.pass(),
            format!("A3 {:.2e}, A4 {:.2e}, A2 {:.2e}", report.a3_residual, report.a4_max_quadratic, report.a2_residual),
        ));
        out.operator_hashes.insert(label.clone(), sha256_hex(write_operator(&pair).as_bytes()));
        rows.push(Row { label, family: pair.family.as_str(), order: pair.interior_order, n: pair.n(), strength: c, report });
    }
    out.add_file("audit.csv", csv);
    out.add_json("audit.json", &rows)?;
    Ok(out)
}
