#include "netexplain/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "netexplain/errors.hpp"

namespace netexplain {
namespace {

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) throw SchemaError(fmt::format("{} must be an object", what));
  auto it = j.find(key);
  if (it == j.end()) {
    throw SchemaError(fmt::format("{} is missing '{}'", what, key));
  }
  return *it;
}

std::size_t positive_size(const Json& j, const char* key, const char* what) {
  const Json& v = field(j, key, what);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw SchemaError(fmt::format("{}: '{}' must be a positive integer", what,
                                  key));
  }
  return v.get<std::size_t>();
}

double positive_real(const Json& j, const char* key, const char* what) {
  const Json& v = field(j, key, what);
  if (!v.is_number() || !(v.get<double>() > 0.0) ||
      !std::isfinite(v.get<double>())) {
    throw SchemaError(fmt::format("{}: '{}' must be a positive number", what,
                                  key));
  }
  return v.get<double>();
}

std::size_t parse_channel_key(const std::string& key) {
  std::size_t value = 0;
  const char* end = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(key.data(), end, value);
  if (key.empty() || ec != std::errc() || ptr != end) {
    throw SchemaError(fmt::format("lexicon key '{}' is not a channel index",
                                  key));
  }
  return value;
}

}  // namespace

Json stats_to_json(const StatsArtifact& s) {
  return Json{{"means", s.stats.means},
              {"count", s.stats.sample_count},
              {"epsilon", s.stats.epsilon},
              {"gamma", s.gamma},
              {"channels", s.stats.channels()}};
}

StatsArtifact stats_from_json(const Json& j) {
  constexpr const char* what = "stats file";
  StatsArtifact s;
  const std::size_t channels = positive_size(j, "channels", what);
  s.stats.sample_count = positive_size(j, "count", what);
  s.stats.epsilon = positive_real(j, "epsilon", what);
  s.gamma = positive_real(j, "gamma", what);
  const Json& means = field(j, "means", what);
  if (!means.is_array() || means.size() != channels) {
    throw SchemaError("stats file: 'means' must hold one value per channel");
  }
  s.stats.means.reserve(channels);
  for (const Json& m : means) {
    if (!m.is_number() || !std::isfinite(m.get<double>()) ||
        m.get<double>() < 0.0) {
      throw SchemaError("stats file: means must be finite and non-negative");
    }
    s.stats.means.push_back(m.get<double>());
  }
  return s;
}

Json table_to_json(const ClassFrequentTable& t, const ClassCountMap* counts) {
  Json classes = Json::object();
  for (const auto& [label, q] : t.entries) classes[label] = q.to_string();
  Json j{{"k", t.k},
         {"channels", t.channels},
         {"gamma", t.gamma},
         {"classes", std::move(classes)}};
  if (counts != nullptr) {
    Json audit = Json::object();
    for (const auto& [label, c] : *counts) {
      audit[label] = Json{{"samples", c.sample_count}, {"counts", c.counts}};
    }
    j["counts"] = std::move(audit);
  }
  return j;
}

ClassFrequentTable table_from_json(const Json& j) {
  constexpr const char* what = "table file";
  ClassFrequentTable t;
  t.k = positive_size(j, "k", what);
  t.channels = positive_size(j, "channels", what);
  t.gamma = positive_real(j, "gamma", what);
  const Json& classes = field(j, "classes", what);
  if (!classes.is_object()) {
    throw SchemaError("table file: 'classes' must be an object");
  }
  for (const auto& [label, bits] : classes.items()) {
    if (!bits.is_string()) {
      throw SchemaError(fmt::format("table file: class '{}' must map to a 0/1 "
                                    "string",
                                    label));
    }
    BinaryFeature q;
    try {
      q = BinaryFeature::from_string(bits.get<std::string>());
    } catch (const ValueError& e) {
      throw SchemaError(fmt::format("table file: class '{}': {}", label,
                                    e.what()));
    }
    if (q.size() != t.channels) {
      throw SchemaError(fmt::format("table file: class '{}' has {} bits, "
                                    "expected {}",
                                    label, q.size(), t.channels));
    }
    if (q.popcount() > t.k) {
      throw SchemaError(fmt::format("table file: class '{}' sets more than "
                                    "k = {} channels",
                                    label, t.k));
    }
    t.entries.emplace(label, std::move(q));
  }
  return t;
}

Json lexicon_to_json(const AttributeLexicon& lex) {
  Json attrs = Json::object();
  for (const auto& [channel, phrases] : lex.entries()) {
    attrs[std::to_string(channel)] = phrases;
  }
  return Json{{"channels", lex.channels()}, {"attributes", std::move(attrs)}};
}

AttributeLexicon lexicon_from_json(const Json& j) {
  constexpr const char* what = "lexicon file";
  AttributeLexicon lex(positive_size(j, "channels", what));
  const Json& attrs = field(j, "attributes", what);
  if (!attrs.is_object()) {
    throw SchemaError("lexicon file: 'attributes' must be an object");
  }
  for (const auto& [key, phrases] : attrs.items()) {
    const std::size_t channel = parse_channel_key(key);
    if (!phrases.is_array()) {
      throw SchemaError(fmt::format("lexicon file: channel {} must map to a "
                                    "list of phrases",
                                    key));
    }
    std::vector<std::string> list;
    for (const Json& p : phrases) {
      if (!p.is_string() || p.get<std::string>().empty()) {
        throw SchemaError(fmt::format("lexicon file: channel {} has an empty "
                                      "or non-string phrase",
                                      key));
      }
      list.push_back(p.get<std::string>());
    }
    lex.annotate(channel, std::move(list));
  }
  return lex;
}

Json explanation_to_json(const std::string& example_id, const Explanation& x) {
  Json reasons = Json::array();
  for (const Reason& r : x.reasons) {
    reasons.push_back(Json{{"channel", r.channel},
                           {"activation", r.activation},
                           {"phrases", r.phrases}});
  }
  return Json{{"id", example_id},
              {"class", x.predicted_class},
              {"reasons", std::move(reasons)},
              {"text", render_explanation(x)}};
}

Json eval_to_json(const EvalSummary& s) {
  Json per_class = Json::object();
  for (const auto& [label, c] : s.per_class) {
    per_class[label] = Json{{"examples", c.examples},
                            {"mean_popcount_e", c.mean_popcount_e},
                            {"mean_popcount_a", c.mean_popcount_a},
                            {"coverage", c.coverage}};
  }
  Json unknown = Json::array();
  for (const auto& [id, label] : s.unknown) {
    unknown.push_back(Json{{"id", id}, {"class", label}});
  }
  return Json{{"per_class", std::move(per_class)},
              {"annotated_fraction", s.annotated_fraction},
              {"evaluated", s.evaluated},
              {"unknown_class", std::move(unknown)}};
}

void check_compatible(const StatsArtifact& stats,
                      const ClassFrequentTable& table) {
  if (stats.gamma != table.gamma) {
    throw IncompatibleArtifacts(fmt::format(
        "stats were recorded with gamma {} but the table with gamma {}",
        stats.gamma, table.gamma));
  }
  if (stats.stats.channels() != table.channels) {
    throw IncompatibleArtifacts(fmt::format(
        "stats cover {} channels but the table {}", stats.stats.channels(),
        table.channels));
  }
}

void check_compatible(const ClassFrequentTable& table,
                      const AttributeLexicon& lexicon) {
  if (table.channels != lexicon.channels()) {
    throw IncompatibleArtifacts(fmt::format(
        "table covers {} channels but the lexicon {}", table.channels,
        lexicon.channels()));
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw SchemaError(fmt::format("'{}' is not valid JSON: {}", path.string(),
                                  e.what()));
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot create '{}'", path.string()));
  out << text;
  out.flush();
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace netexplain
