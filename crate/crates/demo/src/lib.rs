//! Browser demo for the halving-polytope toolkit: three canvas scenes
//! (halving polygon vs. its limit circle, a rasterized planar k-distance
//! with its sites and trace hull, and moment curves across dimensions).
//!
//! All geometry lives in [`scene`] as plain functions so the host test
//! suite covers it; the `wasm32` build adds thin bindings that ship the
//! same structs to JavaScript as JSON plus one raw pixel buffer.
//!
//! Build the page bundle with
//! `wasm-pack build crates/demo --target web --out-dir www/pkg`
//! and serve `crates/demo/www/`.

pub mod scene;

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    use crate::scene;

    fn to_json<T: serde::Serialize>(value: &T) -> Result<String, JsError> {
        serde_json::to_string(value).map_err(|e| JsError::new(&e.to_string()))
    }

    fn js_err(e: halving_lab::Error) -> JsError {
        JsError::new(&e.to_string())
    }

    /// Halving polygon of `n` seeded circle points: JSON with the points,
    /// polygon vertices, limit radius, exact deviation, and certificate.
    #[wasm_bindgen]
    pub fn halving_json(n: u32, seed: u32, eta: f64) -> Result<String, JsError> {
        let s = scene::halving_scene(n as usize, seed as u64, eta).map_err(js_err)?;
        to_json(&s)
    }

    /// Structure half of the k-distance raster: sites, hull, value range.
    #[wasm_bindgen]
    pub fn field_json(
        points: &[f64],
        k: u32,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        width: u32,
        height: u32,
    ) -> Result<String, JsError> {
        let s = scene::kdistance_field(
            points,
            k as usize,
            (x0, y0, x1, y1),
            width as usize,
            height as usize,
        )
        .map_err(js_err)?;
        to_json(&s)
    }

    /// Pixel half of the k-distance raster: row-major RGBA, top row
    /// first, for the same arguments as [`field_json`].
    #[wasm_bindgen]
    pub fn field_pixels(
        points: &[f64],
        k: u32,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        width: u32,
        height: u32,
    ) -> Result<Vec<u8>, JsError> {
        let s = scene::kdistance_field(
            points,
            k as usize,
            (x0, y0, x1, y1),
            width as usize,
            height as usize,
        )
        .map_err(js_err)?;
        Ok(s.rgba)
    }

    /// Moment table and density curves for the requested dimensions.
    #[wasm_bindgen]
    pub fn moments_json(dims: &[u32], samples: u32) -> Result<String, JsError> {
        let dims: Vec<usize> = dims.iter().map(|&d| d as usize).collect();
        let s = scene::moment_scene(&dims, samples as usize).map_err(js_err)?;
        to_json(&s)
    }
}
