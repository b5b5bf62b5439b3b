// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The loglog-beta Authors

#![no_main]

use libfuzzer_sys::fuzz_target;
use loglog_beta::BetaPolynomial;

fuzz_target!(|text: &str| {
    if let Ok(poly) = BetaPolynomial::from_text(text) {
        let again = BetaPolynomial::from_text(&poly.to_text()).unwrap();
        assert_eq!(again, poly);
        let _ = poly.eval(poly.m());
    }
});
