use super::{oracle_mass, CylinderOracle};
use crate::error::Result;
use crate::space::{full_set, Partition, StateSet};

/// Outcome of [`check_consistency`]: the largest defect found and where.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub words_checked: usize,
    pub max_violation: f64,
    pub worst: Option<String>,
}

impl ConsistencyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Checks the measure axioms an oracle must satisfy on every cell word over `p` of
/// length below `max_len`, extended by one more slot:
/// normalization `μ(∅-word) = 1`, marginal consistency `μ(w·X) = μ(w)`,
/// additivity over the cells of `p` and over unions of two cells, monotonicity
/// `μ(w·A) ≤ μ(w)`, and range `[0, 1]`.
pub fn check_consistency(
    mu: &dyn CylinderOracle,
    p: &Partition,
    max_len: usize,
) -> Result<ConsistencyReport> {
    let mut report = ConsistencyReport {
        words_checked: 0,
        max_violation: 0.0,
        worst: None,
    };
    let norm = oracle_mass(mu, &[])?;
    note(&mut report, (norm - 1.0).abs(), || "normalization".to_string());
    let mut word = Vec::new();
    walk(mu, p, max_len, &mut word, &mut Vec::new(), &mut report)?;
    Ok(report)
}

fn note(report: &mut ConsistencyReport, violation: f64, what: impl FnOnce() -> String) {
    if violation > report.max_violation {
        report.max_violation = violation;
        report.worst = Some(what());
    }
}

fn walk(
    mu: &dyn CylinderOracle,
    p: &Partition,
    max_len: usize,
    word: &mut Vec<StateSet>,
    labels: &mut Vec<usize>,
    report: &mut ConsistencyReport,
) -> Result<()> {
    if word.len() >= max_len {
        return Ok(());
    }
    report.words_checked += 1;
    let base = oracle_mass(mu, word)?;
    let at = |labels: &[usize]| format!("word {labels:?}");

    word.push(full_set(p.universe()));
    let extended = oracle_mass(mu, word)?;
    word.pop();
    note(report, (extended - base).abs(), || {
        format!("marginal consistency at {}", at(labels))
    });

    let mut singles = Vec::with_capacity(p.len());
    for cell in p.cells() {
        word.push(cell.clone());
        let m = oracle_mass(mu, word)?;
        word.pop();
        note(report, (m - base).max(0.0), || format!("monotonicity at {}", at(labels)));
        note(report, (-m).max(m - 1.0).max(0.0), || format!("range at {}", at(labels)));
        singles.push(m);
    }
    let total: f64 = singles.iter().sum();
    note(report, (total - base).abs(), || format!("cell additivity at {}", at(labels)));

    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let mut union = p.cell(i).clone();
            union.union_with(p.cell(j));
            word.push(union);
            let m = oracle_mass(mu, word)?;
            word.pop();
            note(report, (m - singles[i] - singles[j]).abs(), || {
                format!("additivity of cells {i},{j} at {}", at(labels))
            });
        }
    }

    for (i, cell) in p.cells().iter().enumerate() {
        word.push(cell.clone());
        labels.push(i);
        walk(mu, p, max_len, word, labels, report)?;
        labels.pop();
        word.pop();
    }
    Ok(())
}
