#pragma once

// JSON model files.
//
//   {
//     "name": "damped_rotation",
//     "notes": ["free-form provenance lines"],
//     "dimension": 2,
//     "dynamics": {"matrix": [row-major reals], "continuous": true, "step": 0.01},
//     "uncertainty": [{"row": 0, "col": 0, "relative": 0.02},
//                     {"row": 0, "col": 1, "interval": [-1.1, -0.9]}],
//     "initial": {"box": [[0.9, 1.1], [-0.1, 0.1]]},
//     "unsafe": [{"normal": [1, 0], "offset": 2.0}],
//     "horizon": 2050,
//     "reduction": {"method": "interval", "period": 500, "target": 4}
//   }
//
// Rows and columns are 0-indexed. `notes`, `uncertainty`, `unsafe`,
// `reduction` and `reduction.target` are optional.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "ureach/reach.hpp"

namespace ureach {

ModelSpec parse_model(std::string_view text);
ModelSpec model_from_json(const nlohmann::json& doc);
nlohmann::ordered_json model_to_json(const ModelSpec& model);
std::string serialize_model(const ModelSpec& model);

ModelSpec load_model(const std::filesystem::path& path);

}  // namespace ureach
