//! Compare a generated month against a reference with the full battery:
//! two-sample KS, monthly mean and std, extremes, and the wet-bulb check.

use weathergen::genseq::derive_variables;
use weathergen::synthetic::SyntheticWorld;
use weathergen::validate::{full_report, ValidateOptions};

fn main() -> weathergen::Result<()> {
    let world = SyntheticWorld::standard()?;
    let mut reference = world.augusts(2001, 10, 1)?;
    let mut candidate = world.augusts(2030, 1, 2)?;
    derive_variables(&mut reference, &world.site, false)?;
    derive_variables(&mut candidate, &world.site, false)?;

    let options = ValidateOptions {
        site: Some(world.site.clone()),
        ..ValidateOptions::default()
    };
    let report = full_report(&candidate, &reference, &options)?;
    print!("{}", report.to_text());
    Ok(())
}
