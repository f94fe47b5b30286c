//! Fit Weibull to wind speed and the Saunier law to the clearness index,
//! then check both with a chi-square test.

use weathergen::climdata::Variable;
use weathergen::distfit::{chi2_gof, saunier_fit, weibull_fit, DistModel};
use weathergen::synthetic::SyntheticWorld;

fn main() -> weathergen::Result<()> {
    let world = SyntheticWorld::standard()?;
    let table = world.augusts(2001, 10, 1)?;

    let wind = table.series(Variable::WindSpeed)?;
    let w = weibull_fit(&wind)?;
    let gof = chi2_gof(&wind.present(), &DistModel::Weibull(w.params), 10, 0.05)?;
    println!(
        "weibull: k={:.3} c={:.3} mean={:.3}  chi2={:.2} dof={} p={:.3}",
        w.params.k,
        w.params.c,
        w.params.mean(),
        gof.statistic,
        gof.dof,
        gof.p_value
    );

    let kt = table.series(Variable::ClearnessIndex)?;
    // the true upper bound of this world is 0.75
    for kt_max in [None, Some(0.75)] {
        let p = saunier_fit(&kt, kt_max)?;
        let gof = chi2_gof(&kt.present(), &DistModel::Saunier(p), 10, 0.05)?;
        println!(
            "saunier (kt_max {:.3}): gamma1={:.3} C1={:.3} kt_moy={:.3}  chi2={:.2} p={:.3}",
            p.kt_max, p.gamma1, p.c1, p.kt_moy, gof.statistic, gof.p_value
        );
    }
    println!("truth: gamma1={:.3}", world.kt.gamma1);
    Ok(())
}
