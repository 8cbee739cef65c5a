#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace netexplain {

enum class Split { kTrain, kTest };

std::string_view to_string(Split s) noexcept;

struct ManifestRecord {
  std::string example_id;
  std::string class_label;
  std::string feature_path;  // relative to the data root
  double softmax_prob = 0.0;
  Split split = Split::kTrain;
  // Classifier output for test records; absent means "use class_label".
  std::optional<std::string> predicted_class;

  const std::string& prediction() const noexcept {
    return predicted_class ? *predicted_class : class_label;
  }

  friend bool operator==(const ManifestRecord&,
                         const ManifestRecord&) = default;
};

struct Manifest {
  std::vector<ManifestRecord> records;
  // Known once a feature file has been loaded against this manifest.
  std::optional<std::size_t> channel_count;

  Manifest filter(Split s) const;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Parses newline-delimited JSON records:
///   {"id": "...", "class": "...", "feature": "a/b.npy", "prob": 0.97,
///    "split": "train"}
/// plus an optional "pred" string. Blank lines are skipped.
///
/// Errors: SchemaError (bad JSON, missing/mistyped field, unknown split),
/// ValueError (prob outside [0,1]), DuplicateId.
Manifest load_manifest(std::string_view text);
Manifest load_manifest_file(const std::string& path);

/// One record per line, fixed key order; load_manifest(dump) == input.
std::string dump_manifest(const Manifest& m);
void write_manifest(std::ostream& out, const Manifest& m);

/// Keeps the n highest-probability records of each class (all of them when
/// the class is smaller). Within a class: descending prob, then ascending
/// example_id. Classes appear in order of their first record in the input.
/// Throws ValueError if n == 0.
Manifest select_top_n_per_class(const Manifest& m, std::size_t n);

}  // namespace netexplain
