//! Per-round measurements and their CSV emission.

use std::path::Path;

use crate::error::Result;

pub const METRICS_HEADER: &str = "round,global_ft_val_acc,global_ft_test_acc,global_ft_val_loss,pred_test_acc,pred_val_acc,pred_val_loss,avg_local_train_acc,avg_local_test_acc,avg_local_train_loss,avg_local_train_time_s,comm_time_s";

/// Everything measured in one communication round. Accuracies are in
/// `[0, 1]`; times are wall-clock seconds and excluded from determinism
/// guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetrics {
    pub round: usize,
    pub global_ft_val_acc: f64,
    pub global_ft_test_acc: f64,
    pub global_ft_val_loss: f64,
    pub pred_test_acc: f64,
    pub pred_val_acc: f64,
    pub pred_val_loss: f64,
    pub avg_local_train_acc: f64,
    pub avg_local_test_acc: f64,
    pub avg_local_train_loss: f64,
    pub avg_local_train_time_s: f64,
    pub comm_time_s: f64,
}

impl RoundMetrics {
    /// The deterministic columns, i.e. everything except the two times.
    pub fn deterministic_values(&self) -> [f64; 9] {
        [
            self.global_ft_val_acc,
            self.global_ft_test_acc,
            self.global_ft_val_loss,
            self.pred_test_acc,
            self.pred_val_acc,
            self.pred_val_loss,
            self.avg_local_train_acc,
            self.avg_local_test_acc,
            self.avg_local_train_loss,
        ]
    }

    fn to_row(&self) -> String {
        format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            self.round,
            self.global_ft_val_acc,
            self.global_ft_test_acc,
            self.global_ft_val_loss,
            self.pred_test_acc,
            self.pred_val_acc,
            self.pred_val_loss,
            self.avg_local_train_acc,
            self.avg_local_test_acc,
            self.avg_local_train_loss,
            self.avg_local_train_time_s,
            self.comm_time_s
        )
    }
}

/// Render rounds as CSV text: the fixed header plus one 6-decimal row per
/// round.
pub fn metrics_to_csv(rounds: &[RoundMetrics]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for round in rounds {
        out.push_str(&round.to_row());
        out.push('\n');
    }
    out
}

pub fn write_metrics_csv(path: impl AsRef<Path>, rounds: &[RoundMetrics]) -> Result<()> {
    if let Some(parent) = path.as_ref().parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path.as_ref(), metrics_to_csv(rounds))?;
    Ok(())
}
