//! Box-Jenkins on daily wind speed: autocorrelations, order
//! identification, estimation, residual diagnosis and simulation.

use weathergen::arma::{acf_pacf, diagnose, estimate, identify, simulate};
use weathergen::climdata::{select, SelectionCriteria, Variable};
use weathergen::stats::{mean, std_dev};
use weathergen::synthetic::SyntheticWorld;

fn main() -> weathergen::Result<()> {
    let world = SyntheticWorld::standard()?;
    let blocks: Vec<(i32, u32)> = (2001..2004)
        .flat_map(|y| (1..=12).map(move |m| (y, m)))
        .collect();
    let table = world.months(&blocks, 42)?;
    let wind = table.series(Variable::WindSpeed)?;

    let acf = acf_pacf(&wind, 20)?;
    println!("lag    acf    pacf");
    for k in 1..=5 {
        println!("{k:>3}  {:>5.3}  {:>6.3}", acf.r[k], acf.pacf[k]);
    }
    let id = identify(&acf)?;
    println!("identified {:?}({}, {})", id.kind, id.p, id.q);

    let model = estimate(&wind, id.p, id.q)?;
    println!(
        "phi={:?} theta={:?} sigma={:.3} (truth phi={})",
        model.phi, model.theta, model.noise_sigma, world.wind_phi
    );
    let diag = diagnose(&model, &wind)?;
    println!(
        "residuals: {} of 20 lags outside the band, Ljung-Box p={:.3} -> {}",
        diag.exceedances,
        diag.ljung_box_p,
        if diag.pass { "white" } else { "not white" }
    );

    let aug = SelectionCriteria::months([8])?;
    let measured = select(&wind, &aug, &[])?.present();
    let start = chrono::NaiveDate::from_ymd_opt(2030, 8, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let (series, _) = simulate(&model, start, 31, 7)?;
    let values = series.present();
    println!(
        "August mean/std measured {:.2}/{:.2}, simulated {:.2}/{:.2}",
        mean(&measured),
        std_dev(&measured),
        mean(&values),
        std_dev(&values)
    );
    Ok(())
}
