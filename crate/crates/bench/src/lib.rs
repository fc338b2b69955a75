//! Benchmark fixtures shared by the criterion targets.

use ncfa_core::{cyclic_model, s3_model, tl_model, Element, PlanarModel, RandomKind};

pub fn models() -> Vec<PlanarModel> {
    vec![cyclic_model(8).unwrap(), cyclic_model(64).unwrap(), s3_model(), tl_model(2.0).unwrap()]
}

pub fn sample(model: &PlanarModel, seed: u64) -> Element {
    Element::random(model.a_plus(), RandomKind::Generic, seed)
}
