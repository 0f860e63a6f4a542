#pragma once

#include <filesystem>
#include <string>

#include "clarity/run_config.hpp"

namespace clarity {

class RunExists : public std::runtime_error {
 public:
  explicit RunExists(const std::filesystem::path& dir);
};

// split -> preprocess -> train (all seeds) or zero-shot -> evaluate -> report.
// The run directory is <out_root>/<name>-<hash8>; a fresh run writes its
// manifest, split, per-seed predictions, metrics, and plots there. A second
// invocation with the same config hash refuses unless `force`.
std::filesystem::path run_experiment(const RunConfig& config,
                                     const std::filesystem::path& out_root,
                                     bool force = false);

std::filesystem::path run_experiment(const std::filesystem::path& config_path,
                                     const std::filesystem::path& out_root,
                                     bool force = false);

}  // namespace clarity
