#include <gtest/gtest.h>

#include <fstream>

#include "activecanvas/error.hpp"
#include "activecanvas/harness.hpp"
#include "activecanvas/workspace.hpp"
#include "support/oracles.hpp"

using namespace activecanvas;
namespace fs = std::filesystem;

namespace {

harness::SyntheticDataset small_data(std::size_t items = 40, std::size_t dims = 12) {
  harness::SyntheticSpec spec;
  spec.classes = 3;
  spec.items = items;
  spec.dims = dims;
  spec.informative = 4;
  spec.seed = 3;
  return harness::generate_synthetic(spec);
}

workspace::Workspace small_ws(std::size_t items = 40, std::size_t dims = 12) {
  auto d = small_data(items, dims);
  return {"toy", d.manifest, d.features, workspace::random_layout(d.manifest, 1)};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

void touch_first(workspace::Workspace& ws, std::size_t count) {
  std::vector<workspace::Move> moves;
  for (std::size_t i = 0; i < count; ++i) {
    moves.push_back({ws.manifest()[i].id, 0.1 + 0.8 * (i % 3) / 2.0, 0.2 + 0.05 * double(i % 5)});
  }
  workspace::apply_layout(ws, moves);
}

}  // namespace

TEST(Workspace, LoadsDefaultScaleDataset) {
  oracle::TempDir tmp("load");
  harness::SyntheticSpec spec;
  const auto data = harness::generate_synthetic(spec);
  harness::write_dataset(data, tmp.path() / "demo");
  const auto ws = workspace::load_workspace(tmp.path() / "demo" / "manifest.json", tmp.path() / "demo" / "features.csv");
  EXPECT_EQ(ws.size(), 250u);
  EXPECT_EQ(ws.dims(), 500u);
  EXPECT_EQ(ws.dataset_id(), "demo");
  EXPECT_EQ(ws.raw_features(), data.features);
  for (const auto& p : ws.layout()) {
    EXPECT_GE(p.x, 0.05);
    EXPECT_LE(p.x, 0.95);
    EXPECT_FALSE(p.touched);
  }
}

TEST(Workspace, SingleItemDataset) {
  const std::vector<workspace::ManifestItem> manifest{{"only", "only.png", std::nullopt}};
  const auto m = oracle::matrix_from_columns({{1.0}, {2.0}});
  const workspace::Workspace ws("one", manifest, m, workspace::random_layout(manifest, 0));
  EXPECT_EQ(ws.size(), 1u);
}

TEST(Workspace, RowCountMismatch) {
  oracle::TempDir tmp("rows");
  const auto data = small_data(250, 5);
  harness::write_dataset(data, tmp.path() / "d");
  // Drop the last data row.
  const auto csv = tmp.path() / "d" / "features.csv";
  std::ifstream in(csv);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  in.close();
  lines.pop_back();
  std::ofstream out(csv);
  for (const auto& l : lines) out << l << "\n";
  out.close();
  EXPECT_EQ(code_of([&] { workspace::load_workspace(tmp.path() / "d" / "manifest.json", csv); }),
            ErrorCode::kRowCountMismatch);
}

TEST(Workspace, MovesTouchAndClamp) {
  auto ws = small_ws();
  const auto id = ws.manifest()[7].id;
  const std::vector<workspace::Move> one{{id, 0.2, 0.9}};
  workspace::apply_layout(ws, one);
  EXPECT_TRUE(ws.layout()[7].touched);
  EXPECT_EQ(ws.layout()[7].x, 0.2);
  EXPECT_EQ(ws.layout()[7].y, 0.9);

  const std::vector<workspace::Move> twice{{id, 0.3, 0.3}, {id, 1.3, 0.4}};
  workspace::apply_layout(ws, twice);
  EXPECT_EQ(ws.layout().touched_count(), 1u);
  EXPECT_EQ(ws.layout()[7].x, 1.0);
  EXPECT_EQ(ws.layout()[7].y, 0.4);
}

TEST(Workspace, UnknownIdChangesNothing) {
  auto ws = small_ws();
  const auto before = ws.layout();
  const std::vector<workspace::Move> moves{{ws.manifest()[0].id, 0.1, 0.1}, {"nope", 0.5, 0.5}};
  EXPECT_EQ(code_of([&] { workspace::apply_layout(ws, moves); }), ErrorCode::kUnknownId);
  EXPECT_EQ(ws.layout(), before);
}

TEST(Workspace, RefinementMovesEveryUntouchedItem) {
  harness::SyntheticSpec spec;
  const auto data = harness::generate_synthetic(spec);
  workspace::Workspace ws("demo", data.manifest, data.features, workspace::random_layout(data.manifest, 2));
  touch_first(ws, 8);
  const auto before = ws.layout();
  const auto report = workspace::run_refinement(ws, EngineConfig{});
  EXPECT_EQ(report.touched, 8u);
  EXPECT_GE(report.mi_after, report.mi_before);
  ASSERT_EQ(ws.layout().size(), 250u);
  for (std::size_t i = 0; i < 250; ++i) {
    EXPECT_EQ(ws.layout()[i].touched, before[i].touched);
    if (!before[i].touched) {
      EXPECT_TRUE(ws.layout()[i].x != before[i].x || ws.layout()[i].y != before[i].y) << i;
    }
  }
}

TEST(Workspace, TooFewTouchedLeavesLayout) {
  auto ws = small_ws();
  touch_first(ws, 4);
  const auto before = ws.layout();
  EXPECT_EQ(code_of([&] { workspace::run_refinement(ws, EngineConfig{}); }), ErrorCode::kTooFewTouched);
  EXPECT_EQ(ws.layout(), before);
}

TEST(Workspace, RefinementIsDeterministic) {
  auto a = small_ws();
  touch_first(a, 9);
  auto b = a;
  workspace::run_refinement(a, EngineConfig{});
  workspace::run_refinement(b, EngineConfig{});
  EXPECT_EQ(a.layout(), b.layout());
}

TEST(Workspace, CommitAppendsTwoColumns) {
  auto ws = small_ws();
  touch_first(ws, 6);
  const auto layout = ws.layout();
  workspace::commit(ws, "s1", "first");
  EXPECT_EQ(ws.dims(), 14u);
  EXPECT_EQ(ws.innate_dims(), 12u);
  const auto& raw = ws.raw_features();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    EXPECT_EQ(raw(i, 12), layout[i].x);
    EXPECT_EQ(raw(i, 13), layout[i].y);
  }
  EXPECT_TRUE(raw.provenance()[12].is_committed());
  EXPECT_EQ(raw.names()[12], "commit1_x");
  workspace::commit(ws, "s1", "second");
  EXPECT_EQ(ws.dims(), 16u);
  EXPECT_EQ(ws.commits().size(), 2u);
  EXPECT_EQ(ws.commits()[1].annotation, "second");
}

TEST(Workspace, SaveReloadRoundTrip) {
  oracle::TempDir tmp("roundtrip");
  auto ws = small_ws();
  touch_first(ws, 8);
  workspace::run_refinement(ws, EngineConfig{});
  for (int c = 0; c < 3; ++c) workspace::commit(ws, "s" + std::to_string(c), "c", tmp.path());
  const auto back = workspace::reload_workspace(tmp.path(), "toy");
  EXPECT_EQ(back.commits(), ws.commits());
  EXPECT_EQ(back.layout(), ws.layout());
  EXPECT_EQ(back.manifest().size(), ws.manifest().size());
  ASSERT_EQ(back.dims(), ws.dims());
  for (std::size_t c = 0; c < ws.dims(); ++c) {
    for (std::size_t r = 0; r < ws.size(); ++r) {
      EXPECT_NEAR(back.raw_features()(r, c), ws.raw_features()(r, c), 1e-12);
      EXPECT_NEAR(back.features()(r, c), ws.features()(r, c), 1e-12);
    }
  }
  std::size_t committed = 0;
  for (const auto& p : back.raw_features().provenance()) committed += p.is_committed();
  EXPECT_EQ(committed, 6u);
  EXPECT_EQ(back.raw_features().provenance(), ws.raw_features().provenance());
}

TEST(Workspace, ReloadErrors) {
  oracle::TempDir tmp("errors");
  EXPECT_EQ(code_of([&] { workspace::reload_workspace(tmp.path(), "missing"); }), ErrorCode::kNotFound);

  auto ws = small_ws();
  workspace::save_workspace(ws, tmp.path());
  {
    std::ofstream f(tmp.path() / "toy" / "layout.csv", std::ios::app);
    f << "tampered\n";
  }
  EXPECT_EQ(code_of([&] { workspace::reload_workspace(tmp.path(), "toy"); }), ErrorCode::kCorruption);
}

TEST(Workspace, FailedCommitLeavesWorkspace) {
  oracle::TempDir tmp("blocked");
  const auto blocker = tmp.path() / "file";
  std::ofstream(blocker) << "x";
  auto ws = small_ws();
  const auto dims = ws.dims();
  EXPECT_THROW(workspace::commit(ws, "s", "", blocker), Error);
  EXPECT_EQ(ws.dims(), dims);
  EXPECT_TRUE(ws.commits().empty());
}

TEST(Workspace, BeginSessionResetsTouches) {
  auto ws = small_ws();
  touch_first(ws, 5);
  workspace::begin_session(ws, 4);
  EXPECT_EQ(ws.layout().touched_count(), 0u);
}
