//! Draws one instance from each model, saves it in both formats, and reloads it.

use xorsat_lab::instance::{gen_c_model, gen_constrained, gen_unconstrained, Instance};
use xorsat_lab::rng::Seed;

fn main() -> xorsat_lab::Result<()> {
    let dir = std::env::temp_dir().join("xorsat-lab-example");
    std::fs::create_dir_all(&dir)?;
    let seed = Seed::new(7, 0);
    let unconstrained = gen_unconstrained(3, 80, 100, seed)?;
    let constrained = gen_constrained(4, 90, 100, seed)?;
    let alloc = gen_c_model(3, 60, 50, seed)?;
    println!(
        "chip model: {} chips, {} collisions",
        alloc.chip_columns.len(),
        xorsat_lab::instance::collision_count(&alloc)
    );
    for (name, inst) in [("unconstrained", &unconstrained), ("constrained", &constrained)] {
        for ext in ["json", "xsat"] {
            let path = dir.join(format!("{name}.{ext}"));
            inst.save(&path)?;
            let back = Instance::load(&path)?;
            assert_eq!(&back, inst);
            println!(
                "{name:<14} {ext:<4} {:>6} bytes  hash {}",
                std::fs::metadata(&path)?.len(),
                &back.content_hash()[..16]
            );
        }
    }
    let degrees = constrained.degrees();
    println!("constrained min degree {}", degrees.iter().min().unwrap_or(&0));
    Ok(())
}
