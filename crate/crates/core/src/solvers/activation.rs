use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::Scalar;

/// Hidden-neuron non-linearity `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Relu => x.max(T::zero()),
            Activation::Sigmoid => T::one() / (T::one() + (-x).exp()),
            Activation::Tanh => x.tanh(),
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            other => Err(format!("unknown activation {other:?} (expected relu, sigmoid or tanh)")),
        }
    }
}

pub fn apply_activation<T: Scalar>(h: ArrayView2<T>, kind: Activation) -> Array2<T> {
    h.mapv(|v| kind.apply(v))
}

pub fn apply_activation_inplace<T: Scalar>(h: &mut Array2<T>, kind: Activation) {
    h.mapv_inplace(|v| kind.apply(v));
}
