#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "netexplain/class_model.hpp"
#include "netexplain/explain.hpp"
#include "netexplain/feature_stats.hpp"
#include "netexplain/lexicon.hpp"
#include "netexplain/report.hpp"

// JSON record files exchanged between pipeline stages. Every reader throws
// SchemaError on a structurally invalid document.
namespace netexplain {

using Json = nlohmann::json;

struct StatsArtifact {
  NormStats stats;
  double gamma = kDefaultGamma;
  friend bool operator==(const StatsArtifact&, const StatsArtifact&) = default;
};

Json stats_to_json(const StatsArtifact& s);
StatsArtifact stats_from_json(const Json& j);

Json table_to_json(const ClassFrequentTable& t,
                   const ClassCountMap* counts = nullptr);
ClassFrequentTable table_from_json(const Json& j);

Json lexicon_to_json(const AttributeLexicon& lex);
/// Also throws IndexError for a channel key >= channels.
AttributeLexicon lexicon_from_json(const Json& j);

Json explanation_to_json(const std::string& example_id, const Explanation& x);
Json eval_to_json(const EvalSummary& s);

/// Throws IncompatibleArtifacts if gamma or channel counts disagree.
void check_compatible(const StatsArtifact& stats,
                      const ClassFrequentTable& table);
void check_compatible(const ClassFrequentTable& table,
                      const AttributeLexicon& lexicon);

/// Indented, key-sorted, newline-terminated. Identical values give
/// identical bytes.
std::string dump_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace netexplain
