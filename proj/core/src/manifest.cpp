#include "netexplain/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "netexplain/errors.hpp"

namespace netexplain {
namespace {

using Json = nlohmann::json;

const Json& require(const Json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(fmt::format("line {}: missing field '{}'", line, key));
  }
  return *it;
}

std::string require_string(const Json& obj, const char* key, std::size_t line) {
  const Json& v = require(obj, key, line);
  if (!v.is_string()) {
    throw SchemaError(fmt::format("line {}: '{}' must be a string", line, key));
  }
  return v.get<std::string>();
}

ManifestRecord parse_record(std::string_view text, std::size_t line) {
  Json obj;
  try {
    obj = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(fmt::format("line {}: invalid JSON: {}", line, e.what()));
  }
  if (!obj.is_object()) {
    throw SchemaError(fmt::format("line {}: record must be an object", line));
  }

  ManifestRecord r;
  r.example_id = require_string(obj, "id", line);
  r.class_label = require_string(obj, "class", line);
  r.feature_path = require_string(obj, "feature", line);

  const Json& prob = require(obj, "prob", line);
  if (!prob.is_number()) {
    throw SchemaError(fmt::format("line {}: 'prob' must be a number", line));
  }
  r.softmax_prob = prob.get<double>();
  if (!(r.softmax_prob >= 0.0 && r.softmax_prob <= 1.0)) {
    throw ValueError(fmt::format("line {}: prob {} outside [0, 1]", line,
                                 r.softmax_prob));
  }

  const std::string split = require_string(obj, "split", line);
  if (split == "train") {
    r.split = Split::kTrain;
  } else if (split == "test") {
    r.split = Split::kTest;
  } else {
    throw SchemaError(
        fmt::format("line {}: split must be train or test, got '{}'", line,
                    split));
  }

  if (auto it = obj.find("pred"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw SchemaError(fmt::format("line {}: 'pred' must be a string", line));
    }
    r.predicted_class = it->get<std::string>();
  }
  return r;
}

}  // namespace

std::string_view to_string(Split s) noexcept {
  return s == Split::kTrain ? "train" : "test";
}

Manifest Manifest::filter(Split s) const {
  Manifest out;
  out.channel_count = channel_count;
  for (const auto& r : records) {
    if (r.split == s) out.records.push_back(r);
  }
  return out;
}

Manifest load_manifest(std::string_view text) {
  Manifest m;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    ManifestRecord r = parse_record(line, line_no);
    if (!seen.insert(r.example_id).second) {
      throw DuplicateId(fmt::format("line {}: duplicate example id '{}'",
                                    line_no, r.example_id));
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest load_manifest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open manifest '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return load_manifest(buf.str());
}

void write_manifest(std::ostream& out, const Manifest& m) {
  for (const auto& r : m.records) {
    // ordered_json keeps the documented key order on output.
    nlohmann::ordered_json obj;
    obj["id"] = r.example_id;
    obj["class"] = r.class_label;
    obj["feature"] = r.feature_path;
    obj["prob"] = r.softmax_prob;
    obj["split"] = std::string(to_string(r.split));
    if (r.predicted_class) obj["pred"] = *r.predicted_class;
    out << obj.dump() << '\n';
  }
}

std::string dump_manifest(const Manifest& m) {
  std::ostringstream out;
  write_manifest(out, m);
  return out.str();
}

Manifest select_top_n_per_class(const Manifest& m, std::size_t n) {
  if (n == 0) throw ValueError("n must be at least 1");

  std::vector<std::string> class_order;
  std::unordered_map<std::string, std::vector<const ManifestRecord*>> groups;
  for (const auto& r : m.records) {
    auto [it, inserted] = groups.try_emplace(r.class_label);
    if (inserted) class_order.push_back(r.class_label);
    it->second.push_back(&r);
  }

  auto better = [](const ManifestRecord* a, const ManifestRecord* b) {
    if (a->softmax_prob != b->softmax_prob) {
      return a->softmax_prob > b->softmax_prob;
    }
    return a->example_id < b->example_id;
  };

  Manifest out;
  out.channel_count = m.channel_count;
  for (const auto& label : class_order) {
    auto& group = groups[label];
    const std::size_t keep = std::min(n, group.size());
    std::partial_sort(group.begin(), group.begin() + keep, group.end(), better);
    for (std::size_t i = 0; i < keep; ++i) out.records.push_back(*group[i]);
  }
  return out;
}

}  // namespace netexplain
