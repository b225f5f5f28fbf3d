pub mod cli;
pub mod elliptic;
pub mod error;
pub mod forms;
pub mod geom;
pub mod heights;
pub mod json;
pub mod quad;
pub mod svcore;
