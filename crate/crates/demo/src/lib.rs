//! Browser front end: three operations on the reference geometry at reduced
//! grid sizes, small enough to run interactively in wasm.
//!
//! The `scene` functions are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only translate errors and shapes.

use wasm_bindgen::prelude::*;

pub mod scene;

fn js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `|u|^2` on the image line for `model`, at `nx + 1` points of the window.
#[wasm_bindgen(js_name = imageIntensity)]
pub fn image_intensity(model: &str, n: usize, nx: usize) -> Result<Vec<f64>, JsError> {
    js(scene::image_intensity(model, n, nx).map(|(_, v)| v))
}

/// Image-window abscissae matching [`image_intensity`].
#[wasm_bindgen(js_name = imageAxis)]
pub fn image_axis(nx: usize) -> Result<Vec<f64>, JsError> {
    js(scene::image_axis(nx))
}

#[wasm_bindgen]
pub struct ReconstructionView {
    inner: scene::Reconstructed,
}

#[wasm_bindgen]
impl ReconstructionView {
    #[wasm_bindgen(getter)]
    pub fn z(&self) -> Vec<f64> {
        self.inner.z.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn prescribed(&self) -> Vec<f64> {
        self.inner.prescribed.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn direct(&self) -> Vec<f64> {
        self.inner.direct.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn coupled(&self) -> Vec<f64> {
        self.inner.coupled.clone()
    }

    #[wasm_bindgen(getter, js_name = dThin)]
    pub fn d_thin(&self) -> f64 {
        self.inner.d_thin
    }

    #[wasm_bindgen(getter, js_name = dThick)]
    pub fn d_thick(&self) -> f64 {
        self.inner.d_thick
    }

    #[wasm_bindgen(getter)]
    pub fn condition(&self) -> f64 {
        self.inner.condition
    }
}

/// Solves both inverse systems and returns `|u0|^2` curves with the D values.
#[wasm_bindgen]
pub fn reconstruct(model: &str, n: usize, nx: usize, mode: &str, delta: f64) -> Result<ReconstructionView, JsError> {
    js(scene::reconstruct(model, n, nx, mode, delta)).map(|inner| ReconstructionView { inner })
}

/// Thin and thick D for each `delta`, interleaved as `[thin0, thick0, thin1, ...]`.
#[wasm_bindgen(js_name = deltaSweep)]
pub fn delta_sweep(model: &str, n: usize, nx: usize, mode: &str, deltas: Vec<f64>) -> Result<Vec<f64>, JsError> {
    js(scene::delta_sweep(model, n, nx, mode, &deltas))
}
