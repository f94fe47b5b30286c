//! Least-squares correlation of daily temperature on global irradiance,
//! with coefficient significance and the relative error surface.

use weathergen::climdata::{SelectionCriteria, Variable};
use weathergen::corrfit::{error_surface, fit_correlation, GridAxis, Template};
use weathergen::synthetic::SyntheticWorld;

fn main() -> weathergen::Result<()> {
    let world = SyntheticWorld::standard()?;
    let table = world.augusts(2001, 5, 3)?;
    let temp = table.series(Variable::DryBulbTemp)?;
    let global = table.series(Variable::GlobalRad)?;
    let criteria = SelectionCriteria::months([8])?;

    for degree in 1..=3 {
        let m = fit_correlation(
            &Template::poly(degree),
            &temp,
            std::slice::from_ref(&global),
            &criteria,
            &[],
        )?;
        let sig = m.significance(0.05)?;
        println!(
            "poly{degree}: r2={:.3} residual std={:.3} F p={:.2e}",
            m.diagnostics.r2, m.diagnostics.residual_std, sig.f_p_value
        );
        for ((label, c), p) in m
            .term_labels()
            .iter()
            .zip(&m.coefficients)
            .zip(&sig.t_p_values)
        {
            println!("    {label:<20} {c:>12.5e}  p={p:.3}");
        }
    }

    let m = fit_correlation(&Template::poly(2), &temp, &[global], &criteria, &[])?;
    let axis = GridAxis {
        variable: Variable::GlobalRad,
        edges: (0..=8).map(|i| 100.0 + 40.0 * i as f64).collect(),
    };
    let surface = error_surface(&m, &[axis])?;
    print!("\n{}", surface.to_csv());
    Ok(())
}
