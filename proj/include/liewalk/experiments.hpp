#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "liewalk/cartan_walk.hpp"
#include "liewalk/lie_algebra.hpp"

namespace liewalk {

/// One reproducible experiment run: a named experiment, a flat parameter
/// object (experiment-specific keys, unknown keys rejected), a seed, and an
/// output path.  The resolved configuration (defaults filled in) is echoed
/// into the CSV header together with its content hash, so any artifact can
/// be reproduced from its own header.
struct ExperimentConfig {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string output_path = "out.csv";
  bool strict = false;
  int threads = 1;
};

/// Parses a JSON config document.  Recognized top-level keys: experiment,
/// params, seed, out, strict, threads.  Anything else is a ConfigError.
ExperimentConfig parse_config_text(const std::string& json_text);

/// Runs the named experiment and writes its CSV artifact.  Returns 0 on
/// success and 1 when a soft check failed in non-strict mode; in strict
/// mode soft failures throw InvariantViolation instead.
int run_experiment(const ExperimentConfig& cfg);

/// The integer walk measure used by the equidistribution experiments:
/// uniform on {A, A^{-1}, B, B^{-1}} with A = [[1,2],[0,1]], B = [[1,0],[2,1]].
WalkMeasure default_modular_measure();

/// Measure for Lie-group walks: `count` seeded group elements together with
/// their inverses, uniform weights.  Elements are exponentials of algebra
/// samples clamped to Frobenius norm `scale`.
WalkMeasure build_group_measure(const LieAlgebra& alg, int count, double scale,
                                std::uint64_t seed);

/// Shared family parser: "sl" with param d >= 2, or "so_p1" with param p >= 2.
LieAlgebra build_family(const std::string& family, int param);

}  // namespace liewalk
