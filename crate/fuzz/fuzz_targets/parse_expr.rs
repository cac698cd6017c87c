#![no_main]

use libfuzzer_sys::fuzz_target;
use pie_core::expr::parse;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    match parse(text) {
        Ok(e) => {
            let printed = e.pretty();
            let again = parse(&printed).expect("printed expression reparses");
            assert_eq!(again, e);
            assert_eq!(again.pretty(), printed);
            let _ = e.evaluate(0.25, 0.5, 0.75);
            let _ = e.swap_x_s();
        }
        Err(err) => {
            if let Some(offset) = err.offset() {
                assert!(offset <= text.len());
            }
        }
    }
});
