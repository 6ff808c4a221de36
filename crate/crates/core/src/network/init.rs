use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Scalar;

/// Hidden weights `W` (`d_in × n`) and bias row (`n`) of one layer, i.i.d.
/// uniform on `[-1, 1]`.
///
/// Each `(seed, layer_index)` pair selects its own ChaCha stream, so a
/// layer's weights never depend on how many values other layers consumed.
pub fn init_layer_weights<T: Scalar>(d_in: usize, n: usize, seed: u64, layer_index: usize) -> (Array2<T>, Array1<T>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(layer_index as u64);
    let mut draw = || T::from_f64_lossy(rng.random_range(-1.0..=1.0));
    let w = Array2::from_shape_simple_fn((d_in, n), &mut draw);
    let bias = Array1::from_shape_simple_fn(n, &mut draw);
    (w, bias)
}
