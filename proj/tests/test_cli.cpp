#include "tgact/tgact.hpp"

#include <gtest/gtest.h>

#include <set>
#include <string>

using namespace tgact;

namespace {

std::string fixture(const std::string& name) { return std::string(TGACT_FIXTURES_DIR) + "/" + name; }

Json so3_doc() { return read_json_file(fixture("so3.json")); }

Json minimal(const std::string& extra) {
  return Json::parse(R"({"models": [{"name": "so3", "builtin": "so3"}],
    "representations": [{"name": "adj", "model": "so3", "builtin": "adjoint"},
                        {"name": "triv", "model": "so3", "builtin": "trivial"}])" +
                     extra + "}");
}

Json strip_time(Json j) {
  j.erase("wall_time_ms");
  return j;
}

}  // namespace

TEST(Cli, CommandNamesCoverEveryCommand) {
  std::set<std::string> names(command_names().begin(), command_names().end());
  for (const char* c : {"validate", "hom", "classify", "kgroup", "adjoint-check", "monad-check", "manifold-verify",
                        "all"})
    EXPECT_TRUE(names.count(c)) << c;
}

TEST(Cli, ExitCodesOnFixtures) {
  EXPECT_EQ(run_file("all", fixture("so3.json")).exit_code, exit_pass);
  EXPECT_EQ(run_file("classify", fixture("refused_classify.json")).exit_code, exit_refused);
  EXPECT_EQ(run_file("validate", fixture("unresolved_reference.json")).exit_code, exit_config);
  EXPECT_EQ(run_file("validate", fixture("malformed_matrix.json")).exit_code, exit_config);
  EXPECT_EQ(run_file("manifold-verify", fixture("failing_section.json")).exit_code, exit_fail);
  EXPECT_EQ(run_file("validate", fixture("does_not_exist.json")).exit_code, exit_config);
  EXPECT_EQ(run("frobnicate", so3_doc()).exit_code, exit_config);
  RunOptions bad_field;
  bad_field.field = "quaternion";
  EXPECT_EQ(run("validate", so3_doc(), bad_field).exit_code, exit_config);
}

TEST(Cli, ErrorReportsCarryAMessage) {
  auto r = run_file("classify", fixture("refused_classify.json"));
  EXPECT_FALSE(r.report.error.empty());
  EXPECT_EQ(r.report.to_json()["status"], "error");
  EXPECT_NE(r.report.summary().find("ERROR"), std::string::npos);
  auto f = run_file("manifold-verify", fixture("failing_section.json"));
  EXPECT_EQ(f.report.to_json()["status"], "fail");
  EXPECT_GT(f.report.failures(), 0u);
}

TEST(Cli, ClassifyReportsMultiplicity) {
  auto r = run("classify", so3_doc());
  ASSERT_EQ(r.exit_code, exit_pass) << r.report.summary();
  bool found = false;
  for (const auto& n : r.report.notes)
    if (n.find("adj2_id0") != std::string::npos && n.find("n = 2") != std::string::npos &&
        n.find("nonzero") != std::string::npos)
      found = true;
  EXPECT_TRUE(found) << r.report.summary();
}

TEST(Cli, ReportJsonSchema) {
  auto r = run("hom", so3_doc());
  ASSERT_EQ(r.exit_code, exit_pass);
  Json j = r.report.to_json();
  for (const char* key : {"command", "field", "seed", "samples", "tolerance", "status", "checks", "artifacts", "notes",
                          "wall_time_ms"})
    EXPECT_TRUE(j.contains(key)) << key;
  ASSERT_FALSE(j["checks"].empty());
  for (const auto& c : j["checks"]) {
    for (const char* key : {"name", "status", "residual", "tolerance", "bound"}) EXPECT_TRUE(c.contains(key)) << key;
    EXPECT_TRUE(c["bound"] == "at_most" || c["bound"] == "above");
  }
  EXPECT_EQ(j["field"], "real");
  EXPECT_FALSE(strip_time(j).contains("wall_time_ms"));
  // Checks are sorted by name.
  std::vector<std::string> names;
  for (const auto& c : j["checks"]) names.push_back(c["name"]);
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
}

TEST(Cli, DeterministicAcrossRuns) {
  for (const char* field : {"real", "complex"}) {
    RunOptions opts;
    opts.field = field;
    auto a = run_file("all", fixture("all.json"), opts);
    auto b = run_file("all", fixture("all.json"), opts);
    ASSERT_EQ(a.exit_code, exit_pass) << a.report.summary(true);
    EXPECT_EQ(strip_time(a.report.to_json()).dump(), strip_time(b.report.to_json()).dump());
  }
}

TEST(Cli, SeedOverrideChangesSampling) {
  RunOptions a, b;
  a.load.seed = 1;
  b.load.seed = 2;
  auto ra = run("monad-check", so3_doc(), a), rb = run("monad-check", so3_doc(), b);
  ASSERT_EQ(ra.exit_code, exit_pass);
  ASSERT_EQ(rb.exit_code, exit_pass);
  EXPECT_EQ(ra.report.seed, 1u);
  EXPECT_EQ(rb.report.seed, 2u);
  EXPECT_EQ(ra.report.checks.size(), rb.report.checks.size());
}

TEST(Cli, DeriveSeedDependsOnTagAndBase) {
  EXPECT_EQ(derive_seed(0, "abc"), derive_seed(0, "abc"));
  EXPECT_NE(derive_seed(0, "abc"), derive_seed(0, "abd"));
  EXPECT_NE(derive_seed(0, "abc"), derive_seed(1, "abc"));
}

TEST(Cli, ComplexModeUsesComplexField) {
  RunOptions opts;
  opts.field = "complex";
  auto r = run("all", so3_doc(), opts);
  ASSERT_EQ(r.exit_code, exit_pass) << r.report.summary(true);
  EXPECT_EQ(r.report.field, "complex");
}

// Config loading ------------------------------------------------------------

TEST(Config, FieldTaggedItemsAreSkippedWithDependents) {
  Json doc = minimal(R"(, "pairs": [
      {"name": "cplx", "base": "adj", "carrier": "adj", "phi": [0, 1], "field": "complex"},
      {"name": "real", "base": "adj", "carrier": "adj", "phi": 2.0, "field": "real"}],
    "classify": ["cplx", "real"])");
  auto wr = load_workspace<Real>(doc);
  EXPECT_TRUE(wr.pairs.count("real"));
  EXPECT_FALSE(wr.pairs.count("cplx"));
  auto wc = load_workspace<Complex>(doc);
  EXPECT_TRUE(wc.pairs.count("cplx"));
  EXPECT_FALSE(wc.pairs.count("real"));
  EXPECT_LE(std::abs(wc.pairs.at("cplx").phi(0, 0) - Complex(0, 1)), 0.0);
}

TEST(Config, DuplicateNamesRejected) {
  Json doc = minimal(R"(, "pairs": [
      {"name": "p", "base": "adj", "carrier": "adj", "phi": "identity"},
      {"name": "p", "base": "adj", "carrier": "adj", "phi": "zero"}])");
  EXPECT_THROW(load_workspace<Real>(doc), ConfigError);
}

TEST(Config, ImaginaryEntriesRejectedInRealMode) {
  Json doc = minimal(R"(, "pairs": [{"name": "p", "base": "adj", "carrier": "adj", "phi": [0, 1]}])");
  EXPECT_THROW(load_workspace<Real>(doc), ConfigError);
  EXPECT_NO_THROW(load_workspace<Complex>(doc));
}

TEST(Config, NonEquivariantStructureMapRejected) {
  Json doc = minimal(R"(, "pairs": [{"name": "p", "base": "adj", "carrier": "triv", "phi": [[1, 0, 0]]}])");
  EXPECT_THROW(load_workspace<Real>(doc), ConfigError);
}

TEST(Config, OverridesApply) {
  LoadOptions opts;
  opts.seed = 42;
  opts.samples = 17;
  opts.tolerance = 1e-7;
  auto ws = load_workspace<Real>(so3_doc(), opts);
  EXPECT_EQ(ws.seed, 42u);
  EXPECT_EQ(ws.samples, 17);
  EXPECT_EQ(ws.tol.matrix, 1e-7);
}

TEST(Config, UnknownBuiltinRejected) {
  Json doc = Json::parse(R"({"models": [{"name": "g2", "builtin": "g2"}]})");
  EXPECT_THROW(load_workspace<Real>(doc), ConfigError);
  EXPECT_EQ(run("validate", doc).exit_code, exit_config);
}
