#pragma once

// Model files, schema "mmjump.model/1":
//
//   {
//     "schema": "mmjump.model/1",
//     "name": "two_state",
//     "dim": 1,
//     "switching": {"states": ["A", "B"], "q": [1, 2], "P": [[0, 1], [1, 0]]},
//     "jumps": [                                  // one array per state
//       [{"family": "point", "v0": 1, "rate": 2, "kappa": 0.5, "ucap": 2},
//        {"family": "gauss", "mean": 0.5, "sd": 0.5, "rate": 3}],
//       [{"family": "uniform", "lo": -1, "hi": 0, "rate": 4}]
//     ],
//     "drift": {
//       "rho": [2, 1],
//       "d": [{"offset": 1, "slope": -0.5, "cap": 4}, -1]
//     },
//     "L": 20                                     // optional growth bound
//   }
//
// For dim > 1 a component lists its coordinates under "marginals" (each with
// "family" and parameters) and displacement fields are arrays of length dim.
// A displacement is a number (constant), an object {offset, slope, cap}
// (cap omitted: no saturation), or {"terms": [...]} summing several.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include <mmjump/jump_model.hpp>
#include <mmjump/switching.hpp>

namespace mmjump {

inline constexpr std::string_view kModelSchema = "mmjump.model/1";

struct ModelFile {
  std::string name;
  SwitchSpec switching;
  JumpModel model;
};

/// Throws ModelError with the key path of the offending value, e.g.
/// "jumps[1][0].rate: must be >= 0".
ModelFile parse_model(const nlohmann::json& doc);
/// Reads and parses a file; JSON syntax errors carry line and column.
ModelFile load_model(const std::filesystem::path& path);

nlohmann::ordered_json model_to_json(const std::string& name, const SwitchSpec& switching,
                                     const JumpModel& model);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace mmjump
