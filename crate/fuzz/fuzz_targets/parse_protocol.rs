#![no_main]

use libfuzzer_sys::fuzz_target;
use psc_core::codegen::{emit_stubs, Manifest};
use psc_core::{build_automaton, parse_protocol, validate, Automaton};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let decl = match parse_protocol(src) {
        Ok(decl) => decl,
        Err(diags) => {
            for d in diags {
                assert!(d.span.map_or(true, |s| s.end() <= src.len()));
            }
            return;
        }
    };
    // printing and reparsing gives back the same tree
    let printed = decl.to_string();
    assert_eq!(parse_protocol(&printed).expect("pretty output parses"), decl);

    if !validate(&decl).is_empty() {
        return;
    }
    let a = build_automaton(&decl);
    assert_eq!(a.check_invariants(), Vec::<String>::new());
    assert_eq!(Automaton::from_dump(&a.to_dump()).unwrap(), a);
    let _ = a.to_dot();
    let m = Manifest::from_protocol(&decl, &a);
    assert_eq!(Manifest::parse(&m.to_string()).unwrap(), m);
    let _ = emit_stubs(&decl);
});
