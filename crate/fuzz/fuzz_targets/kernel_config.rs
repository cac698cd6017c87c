#![no_main]

use libfuzzer_sys::fuzz_target;
use pie_core::kernel::KernelConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(config) = serde_json::from_slice::<KernelConfig>(data) else {
        return;
    };
    if let Ok(kernel) = config.build() {
        let d = *kernel.domain();
        let _ = kernel.eval(d.a(), d.b(), 0.5 * (d.a() + d.b()));
    }
});
