//! Train a small tanh network on daily temperature with
//! Levenberg-Marquardt, then sweep the hidden-layer size.

use weathergen::climdata::{select_rows, SelectionCriteria, Variable};
use weathergen::neuralfit::{eqm, sweep_hidden, train_lm, TrainOptions};
use weathergen::synthetic::SyntheticWorld;

fn main() -> weathergen::Result<()> {
    let world = SyntheticWorld::standard()?;
    let table = world.augusts(2001, 5, 11)?;
    let temp = table.series(Variable::DryBulbTemp)?;
    let inputs = [
        table.series(Variable::GlobalRad)?,
        table.series(Variable::WindSpeed)?,
    ];
    let (x, y) = select_rows(&temp, &inputs, &SelectionCriteria::all(), &[])?;

    let net = train_lm(
        &x,
        &y,
        TrainOptions {
            n_hidden: 3,
            seed: 1,
            ..Default::default()
        },
    )?;
    let report = net.report.as_ref().expect("trained network has a report");
    println!(
        "3 hidden: eqm {:.4} -> {:.4} in {} iterations ({:?}), noise variance {:.4}",
        report.eqm_history[0],
        eqm(&net, &x, &y)?,
        report.iterations,
        report.stop,
        world.temp_noise * world.temp_noise
    );
    for (g, w) in [(100.0, 5.0), (250.0, 3.0), (300.0, 8.0)] {
        println!(
            "  T({g}, {w}) = {:.2}, truth {:.2}",
            net.forward(&[g, w])?,
            world.temperature(g, w)
        );
    }

    let sweep = sweep_hidden(
        &x,
        &y,
        1..=6,
        TrainOptions {
            seed: 1,
            ..Default::default()
        },
    )?;
    println!("\nhidden  train eqm  validation eqm");
    for r in &sweep.rows {
        println!(
            "{:>6}  {:>9.4}  {:>14.4}",
            r.n_hidden, r.train_eqm, r.validation_eqm
        );
    }
    println!("best: {} hidden neurons", sweep.rows[sweep.best].n_hidden);
    Ok(())
}
