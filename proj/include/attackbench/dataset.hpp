#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "attackbench/types.hpp"

namespace attackbench {

// SHA-512 of: dim as 4-byte little-endian, then every coordinate as a
// little-endian float32. Returned as 128 lowercase hex characters.
std::string hash_sample(std::span<const double> x);
std::vector<unsigned char> canonical_sample_bytes(std::span<const double> x);

struct Dataset {
  std::vector<Sample> samples;
  std::size_t dim = 0;
  std::size_t num_classes = 0;

  std::size_t size() const { return samples.size(); }
  // Throws DataError unless features lie in [0,1] and labels in [0, C).
  void validate() const;
};

enum class SyntheticKind { Blobs, Moons };

// Deterministic in seed; features min-max scaled into [0,1] and rounded to
// float32. Blobs use `classes` Gaussian clusters; moons are two interleaved
// half circles in the first two coordinates (d >= 2) with noise elsewhere.
// Throws ConfigError for n == 0.
Dataset generate_synthetic(SyntheticKind kind, std::size_t n, std::size_t d, std::uint64_t seed,
                           std::size_t classes = 3);

// CSV: d feature columns then an integer label column; an optional header
// line is skipped.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

}  // namespace attackbench
