use std::io::Write;

use log::{Level, LevelFilter, Log, Metadata, Record};

/// Writes `level=... code=... msg="..."` lines to standard error.
/// The log target doubles as the code.
struct StderrLogger;

impl Log for StderrLogger {
    fn enabled(&self, metadata: &Metadata) -> bool {
        metadata.level() <= log::max_level()
    }

    fn log(&self, record: &Record) {
        if self.enabled(record.metadata()) {
            line(record.level(), record.target(), &record.args().to_string());
        }
    }

    fn flush(&self) {}
}

pub(crate) fn line(level: Level, code: &str, msg: &str) {
    let level = level.as_str().to_ascii_lowercase();
    let _ = writeln!(std::io::stderr().lock(), "level={level} code={code} msg={msg:?}");
}

pub(crate) fn init(quiet: bool) {
    // a second call in the same process keeps the first logger
    let _ = log::set_logger(&StderrLogger);
    log::set_max_level(if quiet { LevelFilter::Warn } else { LevelFilter::Info });
}
