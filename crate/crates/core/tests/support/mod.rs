//! Shared by the integration tests and the acceptance suite: `oracles` holds
//! reference computations written without the library's planners or
//! models, `scenarios` and `two_state` the experiments that compare them.
#![allow(dead_code)]

pub mod oracles;
pub mod scenarios;
pub mod two_state;
