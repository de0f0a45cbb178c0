#![no_main]

use curveflow::output::{read_frame, write_frame};
use curveflow::DiscreteCurve;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(curves) = read_frame(text) else {
        return;
    };
    let Ok(curves) = curves.into_iter().map(DiscreteCurve::new).collect::<Result<Vec<_>, _>>() else {
        return;
    };
    let mut buf = Vec::new();
    write_frame(&mut buf, &curves).unwrap();
    let back = read_frame(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back.len(), curves.len());
    for (c, b) in curves.iter().zip(&back) {
        assert_eq!(c.nodes(), b.as_slice());
    }
});
