pub mod acceptance;
pub mod classes;
pub mod degrees;
pub mod limitlaws;
pub mod num;
pub mod oracle;
pub mod singular;
pub mod series;
pub mod solver;
pub mod spec;

pub use num::{BigFloat, Domain, Field, Rational, Real};
pub use series::{SeriesError, TruncatedSeries};
pub use spec::{ClassSpec, Expr, Flavor};
