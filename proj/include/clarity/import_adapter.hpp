#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "clarity/instances.hpp"

namespace clarity {

// Field mapping from the internal schema to candidate upstream column names;
// for each field the first candidate present in a record wins. Covers both
// CSV (RFC-4180 quoting) and JSONL sources.
struct ImportMapping {
  std::map<std::string, std::vector<std::string>> candidates;

  static ImportMapping defaults();
  static ImportMapping load(const std::filesystem::path& path);
};

// Converts an upstream file into the canonical training/test JSONL schema.
// Returns the number of imported records.
std::size_t import_training(const std::filesystem::path& source, const ImportMapping& mapping,
                            const std::filesystem::path& dest);
std::size_t import_test(const std::filesystem::path& source, const ImportMapping& mapping,
                        const std::filesystem::path& dest);

}  // namespace clarity
