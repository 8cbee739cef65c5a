#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "netexplain/netexplain.hpp"
#include "test_util.hpp"

namespace netexplain {
namespace {

using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) { return read_text_file(p); }

// Writes feature files and a manifest under a scratch directory.
class Dataset {
 public:
  std::string add(const std::string& id, const std::string& cls, double prob,
                  const Tensor& t, Split split = Split::kTrain,
                  std::optional<std::string> pred = {}) {
    const std::string rel = "features/" + id + ".npy";
    std::filesystem::create_directories(dir_ / "features");
    write_npy_file(dir_ / rel, t, DType::kFloat32);
    manifest_.records.push_back({id, cls, rel, prob, split, std::move(pred)});
    return rel;
  }

  std::string manifest_path() {
    write_text_file(dir_ / "manifest.jsonl", dump_manifest(manifest_));
    return (dir_ / "manifest.jsonl").string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  const Manifest& manifest() const { return manifest_; }

 private:
  TempDir dir_;
  Manifest manifest_;
};

// 1x1xC tensor: pooling is the identity, so pooled values are explicit.
Tensor vec(std::vector<double> v) {
  const std::size_t c = v.size();
  return Tensor({1, 1, c}, std::move(v));
}

// Three classes over five channels, each with three planted channels.
// Channels 0 and 4 fire for every class, so their normalized value sits near
// 1; the toy runs use gamma 0.5 to keep them clearly active.
void add_toy_classes(Dataset& ds, int per_class) {
  const std::vector<std::pair<std::string, std::vector<std::size_t>>> classes = {
      {"dog", {0, 2, 4}}, {"cat", {0, 1, 4}}, {"bird", {0, 3, 4}}};
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  for (const auto& [label, on] : classes) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> v(5, 0.05);
      for (std::size_t j : on) v[j] = 3.0 * noise(rng);
      ds.add(label + std::to_string(i), label, 0.5 + 0.01 * i, vec(v));
    }
  }
}

TEST(CliUsage, HelpListsFlagsWithDefaults) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  for (const char* needle :
       {"--manifest", "--data-root", "--gamma", "--k", "--ell", "--epsilon",
        "--n", "--stats", "--table", "--lexicon", "--out", "--format", "select",
        "stats", "classfeat", "explain", "report", "eval"}) {
    EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
  }
  EXPECT_NE(r.out.find("--gamma FLOAT:POSITIVE [1]"), std::string::npos);
  EXPECT_NE(r.out.find("--k UINT:POSITIVE [3]"), std::string::npos);
  EXPECT_NE(r.out.find("--ell UINT:POSITIVE [3]"), std::string::npos);
}

TEST(CliUsage, UnknownSubcommandAndBadFlags) {
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"stats", "--k", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"explain", "--format", "xml"}).code, cli::kExitUsage);
  const auto r = run({"stats"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--manifest"), std::string::npos);
}

TEST(CliSelect, KeepsTopNPerClassAndIsAFixpoint) {
  Dataset ds;
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int c = 0; c < 5; ++c) {
    for (int i = 0; i < 150; ++i) {
      ds.add("c" + std::to_string(c) + "_" + std::to_string(i),
             "class" + std::to_string(c), prob(rng), vec({1.0}));
    }
  }
  for (int i = 0; i < 40; ++i) {
    ds.add("small_" + std::to_string(i), "small", prob(rng), vec({1.0}));
  }
  const auto out1 = ds.path("sel1.jsonl");
  const auto r = run({"select", "--manifest", ds.manifest_path(), "--out", out1});
  ASSERT_EQ(r.code, 0) << r.err;
  const Manifest sel = load_manifest(slurp(out1));
  EXPECT_EQ(sel.records.size(), 540u);
  EXPECT_NE(r.out.find("small\t40"), std::string::npos);
  EXPECT_NE(r.err.find("warning: class 'small'"), std::string::npos);
  EXPECT_EQ(r.err.find("class0"), std::string::npos);
  EXPECT_EQ(sel, select_top_n_per_class(ds.manifest(), 100));

  const auto out2 = ds.path("sel2.jsonl");
  ASSERT_EQ(run({"select", "--manifest", out1, "--out", out2}).code, 0);
  EXPECT_EQ(slurp(out1), slurp(out2));
}

TEST(CliStats, MeansOfIdenticalFilesAndByteStableReruns) {
  Dataset ds;
  ds.add("a", "x", 0.9, vec({0.5, 2.0, 0.0}));
  ds.add("b", "x", 0.8, vec({0.5, 2.0, 0.0}));
  ds.add("t", "x", 0.8, vec({9.0, 9.0, 9.0}), Split::kTest);
  const auto m = ds.manifest_path();
  ASSERT_EQ(run({"stats", "--manifest", m, "--out", ds.path("s1.json")}).code, 0);
  ASSERT_EQ(run({"stats", "--manifest", m, "--out", ds.path("s2.json"), "--jobs", "3"}).code, 0);
  EXPECT_EQ(slurp(ds.path("s1.json")), slurp(ds.path("s2.json")));
  const auto s = stats_from_json(read_json_file(ds.path("s1.json")));
  EXPECT_EQ(s.stats.means, (std::vector<double>{0.5, 2.0, 0.0}));
  EXPECT_EQ(s.stats.sample_count, 2u);
  EXPECT_EQ(s.gamma, 1.0);
}

TEST(CliStats, MissingFeatureFileNamesThePath) {
  Dataset ds;
  ds.add("a", "x", 0.9, vec({1.0}));
  const auto m = ds.manifest_path();
  std::filesystem::remove(ds.path("features/a.npy"));
  const auto r = run({"stats", "--manifest", m, "--out", ds.path("s.json")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("features/a.npy"), std::string::npos) << r.err;
}

TEST(CliStats, EmptyTrainSplitAndShapeMismatch) {
  Dataset ds;
  ds.add("t", "x", 0.9, vec({1.0}), Split::kTest);
  EXPECT_EQ(run({"stats", "--manifest", ds.manifest_path(), "--out",
                 ds.path("s.json")}).code,
            cli::kExitInput);

  Dataset mixed;
  mixed.add("a", "x", 0.9, vec({1.0, 2.0}));
  mixed.add("b", "x", 0.9, vec({1.0, 2.0, 3.0}));
  const auto r = run({"stats", "--manifest", mixed.manifest_path(), "--out",
                      mixed.path("s.json")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("features/b.npy"), std::string::npos) << r.err;
}

TEST(CliClassfeat, ToyDatasetRowsHaveThreeBits) {
  Dataset ds;
  add_toy_classes(ds, 6);
  const auto m = ds.manifest_path();
  ASSERT_EQ(run({"stats", "--manifest", m, "--out", ds.path("s.json"),
                 "--gamma", "0.5"}).code,
            0);
  const auto r = run({"classfeat", "--manifest", m, "--stats", ds.path("s.json"),
                      "--out", ds.path("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = table_from_json(read_json_file(ds.path("t.json")));
  EXPECT_EQ(t.k, 3u);
  EXPECT_EQ(t.entries.at("dog").to_string(), "10101");
  EXPECT_EQ(t.entries.at("cat").to_string(), "11001");
  EXPECT_EQ(t.entries.at("bird").to_string(), "10011");
  for (const auto& [label, q] : t.entries) EXPECT_EQ(q.popcount(), 3u);
}

TEST(CliClassfeat, KAboveChannelsCapsAtActiveCount) {
  Dataset ds;
  add_toy_classes(ds, 4);
  const auto m = ds.manifest_path();
  ASSERT_EQ(run({"stats", "--manifest", m, "--out", ds.path("s.json"),
                 "--gamma", "0.5"}).code,
            0);
  ASSERT_EQ(run({"classfeat", "--manifest", m, "--stats", ds.path("s.json"),
                 "--out", ds.path("t.json"), "--k", "9"}).code,
            0);
  const auto t = table_from_json(read_json_file(ds.path("t.json")));
  for (const auto& [label, q] : t.entries) EXPECT_EQ(q.popcount(), 3u) << label;
}

TEST(CliClassfeat, ParallelAndSerialTablesIdentical) {
  Dataset ds;
  std::mt19937_64 rng(107);
  for (int i = 0; i < 60; ++i) {
    ds.add("r" + std::to_string(i), "c" + std::to_string(i % 4), 0.5,
           testing::random_tensor(rng, {4, 4, 24}));
  }
  const auto m = ds.manifest_path();
  ASSERT_EQ(run({"stats", "--manifest", m, "--out", ds.path("s.json")}).code, 0);
  ASSERT_EQ(run({"classfeat", "--manifest", m, "--stats", ds.path("s.json"),
                 "--out", ds.path("t1.json"), "--jobs", "1"}).code,
            0);
  ASSERT_EQ(run({"classfeat", "--manifest", m, "--stats", ds.path("s.json"),
                 "--out", ds.path("t4.json"), "--jobs", "4"}).code,
            0);
  EXPECT_EQ(slurp(ds.path("t1.json")), slurp(ds.path("t4.json")));
}

TEST(CliClassfeat, GammaMismatchWithStatsIsRejected) {
  Dataset ds;
  add_toy_classes(ds, 2);
  const auto m = ds.manifest_path();
  ASSERT_EQ(run({"stats", "--manifest", m, "--out", ds.path("s.json"),
                 "--gamma", "1.5"}).code,
            0);
  EXPECT_EQ(run({"classfeat", "--manifest", m, "--stats", ds.path("s.json"),
                 "--out", ds.path("t.json"), "--gamma", "1.0"}).code,
            cli::kExitInput);
  ASSERT_EQ(run({"classfeat", "--manifest", m, "--stats", ds.path("s.json"),
                 "--out", ds.path("t.json")}).code,
            0);
  EXPECT_EQ(table_from_json(read_json_file(ds.path("t.json"))).gamma, 1.5);
}

// Fixed stats, table and lexicon; channel 0 is the strongest activation but
// is not frequent for "cat", so it must not appear.
struct GoldenFixture {
  Dataset ds;
  std::string stats, table, lexicon;

  GoldenFixture() {
    stats = ds.path("stats.json");
    table = ds.path("table.json");
    lexicon = ds.path("lexicon.json");
    write_text_file(stats, dump_json(stats_to_json(
                               {{std::vector<double>(6, 1.0), 100, 1e-12}, 1.0})));
    write_text_file(table, dump_json(table_to_json(
                               {3, 6, 1.0,
                                {{"cat", BinaryFeature::from_string("010110")},
                                 {"dog", BinaryFeature::from_string("101001")}}})));
    write_text_file(lexicon, R"({"channels": 6, "attributes": {
      "3": ["tiger patterns", "two-tone black/brown", "furs"],
      "1": ["animal hands", "brown color"],
      "4": ["furry surfaces", "furs", "animal ears"]}})");
  }
};

const char* kGoldenCat =
    "This is cat because, 1) it has tiger patterns, two-tone black/brown or "
    "furs; 2) it has animal hands or brown color; 3) it has furry surfaces, "
    "furs or animal ears.";

TEST(CliExplain, GoldenSentenceForSingleFeature) {
  GoldenFixture fx;
  const auto f = fx.ds.add(
      "img", "cat", 1.0,
      Tensor({1, 2, 6}, {5.0, 3.0, 0.5, 1.0, 2.0, 0.1,
                         0.0, 0.2, 0.5, 4.0, 0.0, 0.1}));
  const auto r = run({"explain", "--stats", fx.stats, "--table", fx.table,
                      "--lexicon", fx.lexicon, "--feature",
                      fx.ds.path(f), "--class", "cat"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, std::string(kGoldenCat) + "\n");
}

TEST(CliExplain, BatchOrderDegenerateAndUnknownClass) {
  GoldenFixture fx;
  fx.ds.add("z1", "cat", 0.9, vec({5.0, 3.0, 0.5, 4.0, 2.0, 0.1}), Split::kTest);
  fx.ds.add("z2", "cat", 0.9, vec({0, 0, 0, 0, 0, 0}), Split::kTest);
  fx.ds.add("z3", "cat", 0.9, vec({5, 5, 5, 5, 5, 5}), Split::kTest, "zebra");
  fx.ds.add("z4", "dog", 0.9, vec({5, 5, 5, 5, 5, 5}), Split::kTest);
  fx.ds.add("tr", "dog", 0.9, vec({5, 5, 5, 5, 5, 5}));
  const auto m = fx.ds.manifest_path();

  const auto r = run({"explain", "--manifest", m, "--stats", fx.stats,
                      "--table", fx.table, "--lexicon", fx.lexicon});
  EXPECT_EQ(r.code, cli::kExitInput);
  std::istringstream lines(r.out);
  std::vector<std::string> got;
  for (std::string line; std::getline(lines, line);) got.push_back(line);
  ASSERT_EQ(got.size(), 4u);
  EXPECT_EQ(got[0], kGoldenCat);
  EXPECT_EQ(got[1], "This is cat. (no explainable features above threshold)");
  EXPECT_NE(got[2].find("zebra"), std::string::npos);
  EXPECT_EQ(got[3],
            "This is dog because, 1) it has feature #0 (unannotated); 2) it "
            "has feature #2 (unannotated); 3) it has feature #5 (unannotated).");

  const auto rec = run({"explain", "--manifest", m, "--stats", fx.stats,
                        "--table", fx.table, "--lexicon", fx.lexicon,
                        "--format", "records", "--ell", "1", "--out",
                        fx.ds.path("out.jsonl")});
  EXPECT_EQ(rec.code, cli::kExitInput);
  std::istringstream jl(slurp(fx.ds.path("out.jsonl")));
  std::vector<Json> records;
  for (std::string line; std::getline(jl, line);) records.push_back(Json::parse(line));
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0]["id"], "z1");
  EXPECT_EQ(records[0]["reasons"].size(), 1u);
  EXPECT_EQ(records[0]["reasons"][0]["channel"], 3);
  EXPECT_EQ(records[0]["text"],
            "This is cat because, 1) it has tiger patterns, two-tone "
            "black/brown or furs.");
  EXPECT_TRUE(records[2].contains("error"));
}

TEST(CliExplain, IncompatibleLexiconRejected) {
  GoldenFixture fx;
  write_text_file(fx.lexicon, R"({"channels": 7, "attributes": {}})");
  const auto f = fx.ds.add("img", "cat", 1.0, vec({1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(run({"explain", "--stats", fx.stats, "--table", fx.table,
                 "--lexicon", fx.lexicon, "--feature", fx.ds.path(f),
                 "--class", "cat"}).code,
            cli::kExitInput);
}

TEST(CliPipeline, EndToEndEqualsLibraryComposition) {
  Dataset ds;
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int i = 0; i < 90; ++i) {
    ds.add("tr" + std::to_string(i), "c" + std::to_string(i % 3), prob(rng),
           testing::random_tensor(rng, {3, 3, 12}, 1.0 + i % 3));
  }
  for (int i = 0; i < 12; ++i) {
    ds.add("te" + std::to_string(i), "c" + std::to_string(i % 3), prob(rng),
           testing::random_tensor(rng, {3, 3, 12}), Split::kTest);
  }
  const auto m = ds.manifest_path();
  const auto sel = ds.path("sel.jsonl"), st = ds.path("s.json"),
             tb = ds.path("t.json"), lx = ds.path("lex.json");
  write_text_file(lx, R"({"channels": 12, "attributes": {"0": ["a"], "5": ["b", "c"]}})");

  ASSERT_EQ(run({"select", "--manifest", m, "--n", "20", "--out", sel}).code, 0);
  ASSERT_EQ(run({"stats", "--manifest", sel, "--data-root", ds.path(""), "--out", st}).code, 0);
  ASSERT_EQ(run({"classfeat", "--manifest", sel, "--data-root", ds.path(""),
                 "--stats", st, "--out", tb, "--k", "4"}).code,
            0);
  const auto ex = run({"explain", "--manifest", m, "--stats", st, "--table", tb,
                       "--lexicon", lx, "--ell", "2"});
  ASSERT_EQ(ex.code, 0) << ex.err;

  // Same thing through the library.
  const Manifest selected =
      select_top_n_per_class(ds.manifest().filter(Split::kTrain), 20);
  const auto loader = npy_file_loader(ds.path(""));
  const auto pooled = pool_records(selected.records, loader);
  const NormStats stats = compute_mean_stats(pooled);
  ClassCountAccumulator counts;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    counts.add(selected.records[i].class_label,
               binarize(normalize(pooled[i], stats), 1.0));
  }
  const auto table = build_class_frequent_table(counts.counts(), 4, 1.0);
  EXPECT_EQ(table_from_json(read_json_file(tb)), table);
  EXPECT_EQ(stats_from_json(read_json_file(st)).stats, stats);

  const auto lex = lexicon_from_json(read_json_file(lx));
  std::string expected;
  for (const auto& r : ds.manifest().filter(Split::kTest).records) {
    expected += render_explanation(
                    explain_one(loader(r), r.prediction(), stats, table, lex, 1.0, 2)) +
                "\n";
  }
  EXPECT_EQ(ex.out, expected);

  // report and eval run on the same artifacts.
  const auto rep = run({"report", "--manifest", sel, "--data-root", ds.path(""),
                        "--stats", st, "--table", tb, "--m", "5", "--out",
                        ds.path("report.md")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  const std::string doc = slurp(ds.path("report.md"));
  EXPECT_NE(doc.find("## Channel 11"), std::string::npos);
  const auto ev = run({"eval", "--manifest", m, "--stats", st, "--table", tb,
                       "--lexicon", lx});
  ASSERT_EQ(ev.code, 0) << ev.err;
  const Json summary = Json::parse(ev.out);
  EXPECT_EQ(summary["evaluated"], 12);
  std::vector<PooledExample> test_examples;
  for (const auto& r : ds.manifest().filter(Split::kTest).records) {
    test_examples.push_back({r.example_id, r.prediction(),
                             global_max_pool(loader(r))});
  }
  EXPECT_EQ(ev.out, dump_json(eval_to_json(
                        evaluate(test_examples, stats, table, lex, 1.0))));
}

TEST(CliEval, UnknownPredictionsAreReportedNotFatal) {
  GoldenFixture fx;
  fx.ds.add("a", "cat", 0.9, vec({5, 5, 5, 5, 5, 5}), Split::kTest);
  fx.ds.add("b", "cat", 0.9, vec({5, 5, 5, 5, 5, 5}), Split::kTest, "okapi");
  const auto r = run({"eval", "--manifest", fx.ds.manifest_path(), "--stats",
                      fx.stats, "--table", fx.table, "--lexicon", fx.lexicon});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["evaluated"], 1);
  EXPECT_EQ(j["unknown_class"][0]["class"], "okapi");
  EXPECT_EQ(j["per_class"]["cat"]["coverage"], 1.0);
  EXPECT_NE(r.err.find("okapi"), std::string::npos);
}

}  // namespace
}  // namespace netexplain
