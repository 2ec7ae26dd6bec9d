#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    match psc_core::tokenize(src) {
        Ok(tokens) => {
            let mut end = 0;
            for t in &tokens {
                assert!(t.span.offset >= end);
                assert_eq!(&src[t.span.offset..t.span.end()], t.lexeme);
                end = t.span.end();
            }
        }
        Err(diags) => {
            assert!(!diags.is_empty());
            for d in diags {
                assert!(d.span.map_or(true, |s| s.end() <= src.len()));
            }
        }
    }
});
