//! Collision statistics of the chip model against gamma, gamma^2 and e^{-gamma}.

use xorsat_lab::instance::ModelTag;
use xorsat_lab::lab::{run_collision_check, ExperimentConfig, ExperimentKind};

fn main() -> xorsat_lab::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::CollisionCheck,
        model: ModelTag::RelaxedC,
        k: 3,
        n: 500,
        m_list: vec![400, 500, 600, 700],
        trials: 5000,
        seed: 17,
        ..ExperimentConfig::default()
    };
    let (rows, _) = run_collision_check(&cfg)?;
    for r in rows {
        println!(
            "m={:<4} gamma {:.4} mean {:.4} | gamma^2 {:.3} E[M(M-1)] {:.3} | e^-gamma {:.4} accept {:.4}",
            r.m, r.gamma, r.mean, r.gamma_sq, r.factorial2, r.exp_neg_gamma, r.accept_rate
        );
    }
    Ok(())
}
