//! Shared experiment bookkeeping: per-trial records and binomial summaries.

/// One game trial. A trial that fails revocation is an abort and can never
/// be a success.
#[derive(Clone, Copy, Debug)]
pub struct TrialRecord {
    pub index: u64,
    pub revoked: bool,
    pub success: bool,
}

/// Aggregated counts with binomial standard errors.
#[derive(Clone, Debug)]
pub struct ExperimentStats {
    pub trials: usize,
    pub revoked_count: usize,
    pub success_count: usize,
    pub revocation_rate: f64,
    pub revocation_se: f64,
    pub success_rate: f64,
    pub success_se: f64,
    pub records: Vec<TrialRecord>,
}

impl ExperimentStats {
    pub fn from_records(records: Vec<TrialRecord>) -> Self {
        let trials = records.len();
        let revoked_count = records.iter().filter(|r| r.revoked).count();
        let success_count = records.iter().filter(|r| r.success).count();
        let n = trials.max(1) as f64;
        let rr = revoked_count as f64 / n;
        let sr = success_count as f64 / n;
        ExperimentStats {
            trials,
            revoked_count,
            success_count,
            revocation_rate: rr,
            revocation_se: (rr * (1.0 - rr) / n).sqrt(),
            success_rate: sr,
            success_se: (sr * (1.0 - sr) / n).sqrt(),
            records,
        }
    }
}

/// Binomial standard error of an empirical rate.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n.max(1) as f64).sqrt()
}
