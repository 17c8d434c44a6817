pub mod graph;
pub mod numeric;
pub mod oracle;
pub mod congest;
pub mod cut;
pub mod fixtures;
pub mod spectral;
