//! Policy lab: design plastics policy scenarios as small scripts and see
//! their simulated consequences on a yearly, per-region mass-flow baseline.
//!
//! The crate is organized bottom-up:
//!
//! - [`projection`]: baseline series, vocabulary config, canonical CSV.
//! - [`dsl`]: lever script lexer, parser, static checker, formatter.
//! - [`runtime`]: interpreter for checked scripts against one year's frame.
//! - [`engine`]: scenario propagation, lifetime convolution, fate reconciliation.
//! - [`interface`]: the `policy-lab` CLI and the JSON/HTTP service.
//!
//! Runnable walkthroughs for each capability live under `examples/`:
//!
//! ```bash
//! cargo run -p policy-lab --example load_baseline
//! cargo run -p policy-lab --example format_script
//! cargo run -p policy-lab --example check_script
//! cargo run -p policy-lab --example run_lever
//! cargo run -p policy-lab --example run_scenario
//! cargo run -p policy-lab --example compare_scenarios
//! cargo run -p policy-lab --example hot_reload
//! cargo run -p policy-lab --example serve
//! cargo run -p policy-lab --example generate_baselines
//! ```

pub mod dsl;
pub mod engine;
pub mod interface;
pub mod projection;
pub mod runtime;
pub mod synthetic;

/// Reported by the CLI, the service and result sidecars.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
