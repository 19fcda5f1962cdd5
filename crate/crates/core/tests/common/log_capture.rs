//! A process-wide `log` sink that keeps every formatted record in memory.

use std::sync::{Mutex, OnceLock};

struct Capture;

static LINES: Mutex<Vec<String>> = Mutex::new(Vec::new());
static INSTALLED: OnceLock<()> = OnceLock::new();

impl log::Log for Capture {
    fn enabled(&self, _: &log::Metadata) -> bool {
        true
    }

    fn log(&self, record: &log::Record) {
        let line = format!("{} {} {}", record.level(), record.target(), record.args());
        LINES.lock().unwrap().push(line);
    }

    fn flush(&self) {}
}

/// Installs the sink at trace level. Safe to call from every test.
pub fn install() {
    INSTALLED.get_or_init(|| {
        log::set_boxed_logger(Box::new(Capture)).expect("no other logger installed");
        log::set_max_level(log::LevelFilter::Trace);
    });
}

pub fn lines() -> Vec<String> {
    LINES.lock().unwrap().clone()
}
