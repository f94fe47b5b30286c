//! Summary statistics and bin data of a measured series.
//!
//! Uses three synthetic Augusts in place of a station file.

use weathergen::climdata::{bin_data, describe, select, SelectionCriteria, Variable};
use weathergen::synthetic::SyntheticWorld;

fn main() -> weathergen::Result<()> {
    let world = SyntheticWorld::standard()?;
    let table = world.augusts(2001, 3, 7)?;
    let temp = table.series(Variable::DryBulbTemp)?;
    let wind = table.series(Variable::WindSpeed)?;

    let s = describe(&temp)?;
    println!(
        "dry bulb: n={} mean={:.2} std={:.2} range=[{:.1}, {:.1}]",
        s.count, s.mean, s.std, s.min, s.max
    );

    // the same statistics on calm days only
    let calm = SelectionCriteria::months([8])?.with_predicate(Variable::WindSpeed, 0.0, 4.0)?;
    let sub = select(&temp, &calm, &[wind])?;
    let c = describe(&sub)?;
    println!("dry bulb, wind < 4 m/s: n={} mean={:.2}", c.count, c.mean);

    let bins = bin_data(&temp, 1.0)?;
    println!("\n{:>6}  {:>5}  {:>6}", "from", "days", "hours");
    for b in &bins.bins {
        println!("{:>6.1}  {:>5}  {:>6.0}", b.lower_edge, b.count, b.hours);
    }
    Ok(())
}
