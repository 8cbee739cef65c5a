#include "netexplain/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>

#include "netexplain/errors.hpp"
#include "netexplain/npy.hpp"

namespace netexplain {

FeatureLoader npy_file_loader(std::filesystem::path data_root) {
  return [root = std::move(data_root)](const ManifestRecord& r) {
    return read_npy_file(root / r.feature_path);
  };
}

std::vector<PooledVector> pool_records(
    std::span<const ManifestRecord> records, const FeatureLoader& load,
    unsigned jobs, std::optional<std::size_t> expected_channels) {
  std::vector<PooledVector> pooled(records.size());
  std::vector<std::exception_ptr> failures(records.size());

  auto work_on = [&](std::size_t i) {
    try {
      pooled[i] = global_max_pool(load(records[i]));
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  if (jobs == 0) jobs = std::max(1U, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(
      std::min<std::size_t>(jobs, std::max<std::size_t>(1, records.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) work_on(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) work_on(i);
      });
    }
  }

  // Report the first failure in record order so diagnostics do not depend on
  // thread scheduling.
  std::optional<std::size_t> channels = expected_channels;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto where = [&r] {
      return fmt::format("example '{}' ({})", r.example_id, r.feature_path);
    };
    if (failures[i]) {
      try {
        std::rethrow_exception(failures[i]);
      } catch (...) {
        std::throw_with_nested(IoError(where()));
      }
    }
    if (!channels) channels = pooled[i].size();
    if (pooled[i].size() != *channels) {
      try {
        throw ShapeError(fmt::format("has {} channels, expected {}",
                                     pooled[i].size(), *channels));
      } catch (...) {
        std::throw_with_nested(IoError(where()));
      }
    }
  }
  return pooled;
}

std::string describe_exception(const std::exception& e) {
  std::string msg = e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    msg += ": " + describe_exception(inner);
  } catch (...) {
    msg += ": unknown error";
  }
  return msg;
}

}  // namespace netexplain
