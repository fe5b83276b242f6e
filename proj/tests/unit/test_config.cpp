#include <gtest/gtest.h>

#include "propcheck/config.hpp"
#include "propcheck/error.hpp"
#include "support.hpp"

using namespace propcheck;

TEST(RunConfig, Defaults) {
  RunConfig c;
  EXPECT_EQ(c.thresholds, (ModelConfig{0.005, 0.02, 0.005, 0.005}));
  EXPECT_EQ(c.rarity_grid.size(), 8u);
  EXPECT_EQ(c.confidence_grid.size(), 8u);
  EXPECT_EQ(c.min_support, 5u);
  EXPECT_EQ(c.folds, 10u);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_TRUE(c.tracked_modules.empty());
  EXPECT_TRUE(c.excluded_props.count("toString"));
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, OverlaysOnlyPresentKeys) {
  RunConfig c;
  c.seed = 9;
  c.apply_json(R"({"thresholds": {"p_a": 0.1, "p_cprop": 0.25}, "folds": 4, "tracked_modules": ["fs"]})", "c.json");
  EXPECT_EQ(c.thresholds, (ModelConfig{0.1, 0.02, 0.005, 0.25}));
  EXPECT_EQ(c.folds, 4u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.tracked_modules, std::set<std::string>{"fs"});
  AnalysisOptions a = c.analysis_options();
  EXPECT_FALSE(a.infer.roots.all_modules);
  EXPECT_EQ(a.infer.roots.modules, std::set<std::string>{"fs"});
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.apply_json(R"({"rarity_grid": [0.5, 0.25], "confidence_grid": [1], "min_support": 2, "excluded_props": ["a"],
                   "seed": 77, "workers": 3, "path_cap": 4, "lenient_ts": true, "h2_typeof_in": true})",
               "c.json");
  RunConfig d;
  d.apply_json(c.to_json(), "round.json");
  EXPECT_EQ(d.to_json(), c.to_json());
  EXPECT_EQ(d.rarity_grid, (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(d.seed, 77u);
  EXPECT_TRUE(d.lenient_ts);
  EXPECT_TRUE(d.check_options().h2_typeof_guard);
  EXPECT_EQ(d.check_options().workers, 3u);
  EXPECT_EQ(d.analysis_options().infer.path_cap, 4u);
  EXPECT_TRUE(d.analysis_options().parse.lenient_types);
  EXPECT_EQ(d.sweep_options().min_support, 2u);
  EXPECT_EQ(d.sweep_options().excluded, std::set<std::string>{"a"});
}

TEST(RunConfig, RejectsBadInput) {
  const char* format_errors[] = {"{", "[1]", R"({"unknown": 1})", R"({"seed": -1})", R"({"seed": "x"})",
                                 R"({"thresholds": {"p_x": 0.1}})", R"({"lenient_ts": 1})", R"({"rarity_grid": "a"})"};
  for (const char* text : format_errors) {
    RunConfig c;
    EXPECT_THROW(c.apply_json(text, "c.json"), FormatError) << text;
  }
  RunConfig c;
  EXPECT_THROW(c.apply_json(R"({"thresholds": {"p_a": 0}})", "c.json"), DomainError);
  EXPECT_THROW(c.apply_json(R"({"rarity_grid": [1.5]})", "c.json"), DomainError);
  EXPECT_THROW(c.apply_json(R"({"rarity_grid": []})", "c.json"), UsageError);
  EXPECT_THROW(c.apply_json(R"({"workers": 0})", "c.json"), UsageError);
  EXPECT_THROW(c.apply_json(R"({"folds": 1})", "c.json"), UsageError);
  // a rejected document leaves the config untouched
  EXPECT_EQ(c.to_json(), RunConfig{}.to_json());
}

TEST(RunConfig, FileLoading) {
  testing_support::TempDir dir;
  auto f = dir.write("cfg.json", R"({"seed": 5})");
  RunConfig c;
  c.apply_file(f);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_THROW(c.apply_file(dir.path() / "missing.json"), IoError);
}
