//! Measured weather data: series, site metadata, selection criteria,
//! descriptive statistics, bin data and psychrometrics.

mod analysis;
mod criteria;
mod ingest;
pub mod psychro;
mod series;
mod table;
mod variable;

pub use analysis::{bin_data, describe, Bin, BinTable, Summary};
pub use criteria::{select, select_rows, Predicate, SelectionCriteria};
pub use ingest::{ingest_csv, ingest_reader, CsvSchema, Dataset, TIMESTAMP_FORMAT};
pub use psychro::wet_bulb;
pub use series::{Cadence, ClimateSeries, SiteMeta};
pub use table::WeatherTable;
pub use variable::Variable;
