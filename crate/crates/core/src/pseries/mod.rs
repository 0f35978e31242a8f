//! Truncated power series over finite fields and the coordinate changes
//! acting on them.

mod coord;
mod series;
mod text;

pub use coord::{transport_change, CoordChange};
pub use series::Series;
pub use text::{format_series, parse_elem, parse_series, parse_terms, SeriesJson};
