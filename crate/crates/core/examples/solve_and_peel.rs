//! Peels an instance to its 2-core, solves the core, and extends the solution.

use xorsat_lab::gf2::{count_critical_sets, solve};
use xorsat_lab::instance::gen_unconstrained;
use xorsat_lab::peel::{extend_solution, two_core};
use xorsat_lab::rng::Seed;

fn main() -> xorsat_lab::Result<()> {
    for c in [0.8, 0.9, 0.95] {
        let n = 2000;
        let m = (c * n as f64) as usize;
        let inst = gen_unconstrained(3, m, n, Seed::new(42, 0))?;
        let (core, trace, stats) = two_core(&inst)?;
        let res = solve(&core.matrix(), &core.rhs)?;
        let line = format!(
            "c={c:<5} core {:>4} vars {:>4} eqs  rank {:>4}  critical sets {}",
            stats.core_vars,
            stats.core_eqs,
            res.rank,
            count_critical_sets(&core.matrix())
        );
        match res.one_solution {
            Some(x) => {
                let full = extend_solution(&x, &trace, &inst)?;
                println!("{line}  satisfiable, verified {}", inst.is_satisfied_by(&full)?);
            }
            None => println!("{line}  unsatisfiable"),
        }
    }
    Ok(())
}
