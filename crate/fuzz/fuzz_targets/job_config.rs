#![no_main]

use libfuzzer_sys::fuzz_target;
use pie_cli::config::JobConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(job) = JobConfig::from_json(text) {
        if let Ok(kernel) = job.kernel() {
            let _ = job.rhs(&kernel);
        }
        let _ = job.kappa();
    }
});
