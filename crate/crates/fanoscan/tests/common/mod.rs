//! Helpers shared by the integration suites.
//!
//! Each integration binary compiles this module separately and uses a
//! subset of the helpers, hence the dead-code allowance.

#![allow(dead_code)]

use std::process::Command;

/// Independent enumeration of every order multiset with `sum(r - 1/r) < 24`
/// (the `chi = 1` budget), written directly against the definition and
/// sharing no code with the library's stream.
///
/// All arithmetic is integral: scaling by `L = lcm(1..=24)` turns each term
/// `r - 1/r = (r^2 - 1)/r` into the exact integer `(L/r)(r^2 - 1)`, valid
/// because any order `r >= 25` already exceeds the budget on its own.
/// Multisets are produced as sorted vectors in lexicographic order, the
/// empty multiset first.
pub fn oracle_order_multisets() -> Vec<Vec<u64>> {
    let l: i128 = (1..=24).fold(1, num_integer::lcm);

    fn step(min_r: u64, used: i128, l: i128, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        for r in min_r..=24 {
            let term = (l / r as i128) * (r as i128 * r as i128 - 1);
            if used + term >= 24 * l {
                break; // terms increase with r, so no larger r fits either
            }
            prefix.push(r);
            step(r, used + term, l, prefix, out);
            prefix.pop();
        }
    }

    let mut out = Vec::new();
    step(2, 0, l, &mut Vec::new(), &mut out);
    out
}

/// Runs the compiled `fanoscan` binary and captures the outcome.
pub fn run_fanoscan(args: &[&str]) -> (String, String, i32) {
    let output = Command::new(env!("CARGO_BIN_EXE_fanoscan"))
        .args(args)
        .output()
        .expect("fanoscan binary runs");
    (
        String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        String::from_utf8(output.stderr).expect("stderr is UTF-8"),
        output.status.code().expect("process exits normally"),
    )
}
