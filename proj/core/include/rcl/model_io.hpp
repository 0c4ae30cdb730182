// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "rcl/model.hpp"

namespace rcl {

/// Builds a model from a JSON config:
///
///   {"sites": {"size": n, "coords": [[...], ...]},
///    "hopping": {"kind": "chain", "t": 0.1}
///             | {"kind": "grid", "L": 4, "t": 0.1}
///             | {"kind": "dense", "matrix": [[...], ...]},
///    "potentials": [{"kind": "uniform", "lo": 0, "hi": 1}
///                 | {"kind": "tent", "lo": 0, "hi": 1}
///                 | {"kind": "piecewise_linear", "knots": [...], "density": [...]}, ...],
///    "rescale": true}
///
/// A single-element potentials array is broadcast to every site. Throws
/// ModelError on malformed input.
ModelSpec model_from_json(const nlohmann::json& config);

/// Canonical description of a model with stable key order. The rescaled flag
/// is recorded; loading the result back reproduces the model exactly.
nlohmann::ordered_json model_to_json(const ModelSpec& model);

/// 16 hex digits of FNV-1a over the canonical description.
std::string model_hash(const ModelSpec& model);

}  // namespace rcl
