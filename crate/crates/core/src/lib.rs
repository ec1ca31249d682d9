pub mod bigserde;
pub mod fpdata;
pub mod generators;
pub mod symbolic;
pub mod validator;
pub mod reducer;
pub mod sampler;
