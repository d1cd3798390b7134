//! WebAssembly bindings for the single-page demo in `www/`.
//!
//! Every export returns plain JSON (or bytes) so the page needs no glue
//! beyond what `wasm-bindgen` generates. Errors come back as
//! `{"error": "..."}`.

use polygon_tc::certifier::{build_witness, certify_lower};
use polygon_tc::parity::{binom_mod2, decompose};
use polygon_tc::ring::CohomologyRing;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` for which the page asks for graded dimensions.
pub const DIMS_LIMIT: u32 = 14;

/// Largest `n` the page certifies; expansion cost grows quickly past this.
pub const CERTIFY_LIMIT: u32 = 40;

fn error(msg: impl ToString) -> Value {
    json!({ "error": msg.to_string() })
}

pub fn certify_value(n: u32, k: u32) -> Value {
    if n > CERTIFY_LIMIT {
        return error(format!("the demo certifies n <= {CERTIFY_LIMIT}"));
    }
    let p = match decompose(n, k) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let witness: Vec<String> = build_witness(&p)
        .factors
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(y, e)| format!("({y}⊗1+1⊗{y})^{e}"))
        .collect();
    match certify_lower(n, k) {
        Ok(c) => json!({
            "params": p,
            "witness": witness.join(" · "),
            "certificate": c,
            "id": c.id(),
        }),
        Err(e) => error(e),
    }
}

pub fn graded_dims_value(n: u32, k: u32) -> Value {
    if n > DIMS_LIMIT {
        return error(format!("graded dimensions are limited to n <= {DIMS_LIMIT}"));
    }
    match CohomologyRing::new(n, k) {
        Ok(r) => json!({ "dims": r.dims() }),
        Err(e) => error(e),
    }
}

/// Pascal's triangle mod 2 as a `rows × rows` grid, row-major.
///
/// Cell values: 0 even, 1 odd, plus 2 when the cell is one of the
/// coefficients `C(n-2-s, k-1-s)` that the top-degree functional reads.
pub fn parity_grid(rows: u32, n: u32, k: u32) -> Vec<u8> {
    let rows = rows.min(512) as i64;
    let mut grid = vec![0u8; (rows * rows) as usize];
    for a in 0..rows {
        for b in 0..=a {
            grid[(a * rows + b) as usize] = binom_mod2(a, b) as u8;
        }
    }
    if k >= 1 && n > k {
        for s in 0..k as i64 {
            let (a, b) = (n as i64 - 2 - s, k as i64 - 1 - s);
            if (0..rows).contains(&a) && (0..=a).contains(&b) {
                grid[(a * rows + b) as usize] |= 2;
            }
        }
    }
    grid
}

#[wasm_bindgen]
pub fn certify(n: u32, k: u32) -> String {
    certify_value(n, k).to_string()
}

#[wasm_bindgen]
pub fn graded_dims(n: u32, k: u32) -> String {
    graded_dims_value(n, k).to_string()
}

#[wasm_bindgen]
pub fn parity_triangle(rows: u32, n: u32, k: u32) -> Vec<u8> {
    parity_grid(rows, n, k)
}
