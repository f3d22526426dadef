//! WebAssembly bindings for the static demo page in `www/`.

use sortnet_core::huffman::huffman_min;
use sortnet_core::seqset::is_sorted_code;
use sortnet_core::{ComparatorNetwork, Search};
use wasm_bindgen::prelude::*;

/// Largest channel count the page will search; larger ones take seconds.
pub const DEMO_MAX_CHANNELS: usize = 8;

pub fn verify(text: &str) -> Result<String, String> {
    let net: ComparatorNetwork = text
        .parse()
        .map_err(|e: sortnet_core::Error| e.to_string())?;
    let w = net.width();
    if net.is_sorting_network() {
        return Ok(format!("SORTS: {} comparators on {w} channels", net.size()));
    }
    let witness = (0..1u32 << w)
        .find(|&c| !is_sorted_code(net.apply_code(c), w))
        .unwrap_or(0);
    let bits: String = (0..w)
        .map(|c| if witness >> c & 1 == 1 { '1' } else { '0' })
        .collect();
    Ok(format!("NOT-SORTING: input {bits} is left unsorted"))
}

pub fn optimal_size(n: usize) -> Result<String, String> {
    if !(1..=DEMO_MAX_CHANNELS).contains(&n) {
        return Err(format!("pick 1 to {DEMO_MAX_CHANNELS} channels"));
    }
    let search = Search::new();
    let s = search.min_size(n).map_err(|e| e.to_string())?;
    Ok(format!(
        "s({n}) = {s} ({} table entries)",
        search.table().len()
    ))
}

pub fn huffman(values: &str) -> Result<String, String> {
    let leaves = values
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| format!("`{t}` is not a natural number"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let h = huffman_min(&leaves).map_err(|e| e.to_string())?;
    Ok(format!("H = {h}"))
}

fn report(r: Result<String, String>) -> String {
    r.unwrap_or_else(|e| format!("error: {e}"))
}

#[wasm_bindgen]
pub fn verify_network(text: &str) -> String {
    report(verify(text))
}

#[wasm_bindgen]
pub fn min_size(n: usize) -> String {
    report(optimal_size(n))
}

#[wasm_bindgen]
pub fn huffman_bound(values: &str) -> String {
    report(huffman(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verifies_networks() {
        assert!(verify_network("width 3\nc 0 2\nc 1 2\nc 0 1\n").starts_with("SORTS"));
        assert_eq!(
            verify_network("width 3\nc 0 1\nc 1 2\n"),
            "NOT-SORTING: input 110 is left unsorted"
        );
        assert!(verify_network("nonsense").starts_with("error"));
    }

    #[test]
    fn sizes_and_bounds() {
        assert!(min_size(5).starts_with("s(5) = 9"));
        assert!(min_size(40).starts_with("error"));
        assert_eq!(huffman_bound("0 0 0 0 0"), "H = 3");
        assert_eq!(huffman_bound("3, 1, 1"), "H = 4");
        assert!(huffman_bound("").starts_with("error"));
    }
}
