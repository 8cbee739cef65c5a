#pragma once

#include <cstddef>
#include <filesystem>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "netexplain/feature_stats.hpp"
#include "netexplain/manifest.hpp"
#include "netexplain/tensor.hpp"

namespace netexplain {

using FeatureLoader = std::function<Tensor(const ManifestRecord&)>;

/// Reads record.feature_path relative to data_root.
FeatureLoader npy_file_loader(std::filesystem::path data_root);

/// Loads and pools every record, fanning the work out over `jobs` threads
/// (0 = hardware concurrency). Output is in record order regardless of jobs.
///
/// All pooled vectors must share one channel count; when `expected_channels`
/// is given they must match it. Failures are rethrown nested inside an
/// IoError whose message names the offending example and file.
std::vector<PooledVector> pool_records(
    std::span<const ManifestRecord> records, const FeatureLoader& load,
    unsigned jobs = 1, std::optional<std::size_t> expected_channels = {});

/// Joins an exception and its nested causes into one line.
std::string describe_exception(const std::exception& e);

}  // namespace netexplain
