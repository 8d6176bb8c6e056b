//! A small convergence sweep through the experiment harness, writing the CSV
//! table and plot script into a temporary directory.

use iga_bem::bench::{emit_outputs, observed_order, Experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig::parse(
        "geometry = fichera\nproblem = laplace\ndegrees = 0,1\nlevels = 1-3\n",
    )?;
    let mut experiment = Experiment::new(config)?;
    let summary = experiment.run(|p, m, cell| match cell {
        Ok(r) => println!(
            "p={p} m={m} error {:.3e} ({:.1}s)",
            r.potential_max_err, r.seconds
        ),
        Err(e) => println!("p={p} m={m} failed: {e}"),
    });
    for p in [0, 1] {
        match observed_order(&summary.potential_errors(p)) {
            Some(order) => println!("p={p}: observed order {order:.2}"),
            None => println!("p={p}: observed order N/A"),
        }
    }
    let dir = std::env::temp_dir().join("iga_bem_convergence_study");
    let stem = experiment.config.stem();
    let (csv, script) = emit_outputs(&summary.records, &dir, &stem, &experiment.title())?;
    println!("wrote {} and {}", csv.display(), script.display());
    Ok(())
}
