// Copyright 2026 The melaug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "melaug/core/rng.hpp"
#include "melaug/data/features.hpp"
#include "melaug/data/manifest.hpp"
#include "melaug/data/toy.hpp"
#include "melaug/dsp/f0.hpp"

using namespace melaug;
using namespace melaug::data;

namespace {

DatasetManifest synthetic_manifest(const std::vector<int>& per_class,
                                   const std::string& split = "") {
  DatasetManifest m;
  m.class_names = {"english", "hindi", "hindi-english"};
  m.seed = 1;
  for (std::size_t c = 0; c < per_class.size(); ++c)
    for (int i = 0; i < per_class[c]; ++i) {
      LabeledExample e;
      e.id = "ex_" + std::to_string(c) + "_" + std::to_string(i);
      e.path = "/dev/null";
      e.label = m.class_names[c];
      e.split = split;
      e.duration = 2.0;
      m.examples.push_back(std::move(e));
    }
  return m;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("manifest persists losslessly") {
  DatasetManifest m = synthetic_manifest({3, 2, 1}, "train");
  m.examples[0].synthetic = true;
  m.examples[1].split = "test";
  const std::string path = temp_file("melaug_manifest.jsonl");
  save_manifest(path, m);
  DatasetManifest back = load_manifest(path);
  CHECK(back.class_names == m.class_names);
  CHECK(back.seed == m.seed);
  REQUIRE(back.examples.size() == m.examples.size());
  for (std::size_t i = 0; i < m.examples.size(); ++i) {
    CHECK(back.examples[i].id == m.examples[i].id);
    CHECK(back.examples[i].path == m.examples[i].path);
    CHECK(back.examples[i].label == m.examples[i].label);
    CHECK(back.examples[i].split == m.examples[i].split);
    CHECK(back.examples[i].duration == m.examples[i].duration);
    CHECK(back.examples[i].synthetic == m.examples[i].synthetic);
  }
  CHECK_THROWS_AS(m.class_index("bengali"), Error);
}

TEST_CASE("split hits exact per-class quotas and replays under a seed") {
  DatasetManifest m = synthetic_manifest({100, 100, 100});
  split_examples(m, SplitRatios{0.8, 0.2, 0.0}, 9);
  for (const auto& cls : m.class_names) {
    CHECK(m.count("train", cls) == 80);
    CHECK(m.count("val", cls) == 20);
    CHECK(m.count("test", cls) == 0);
  }

  DatasetManifest a = synthetic_manifest({30, 30, 30});
  DatasetManifest b = synthetic_manifest({30, 30, 30});
  split_examples(a, SplitRatios{0.64, 0.16, 0.2}, 7);
  split_examples(b, SplitRatios{0.64, 0.16, 0.2}, 7);
  for (std::size_t i = 0; i < a.examples.size(); ++i)
    CHECK(a.examples[i].split == b.examples[i].split);

  // per-class proportions within one example of the quota
  for (const auto& cls : a.class_names) {
    CHECK(std::abs(a.count("train", cls) - 19.2) <= 1.0);
    CHECK(std::abs(a.count("val", cls) - 4.8) <= 1.0);
    CHECK(std::abs(a.count("test", cls) - 6.0) <= 1.0);
  }
}

TEST_CASE("an externally supplied test split is never resampled") {
  DatasetManifest m = synthetic_manifest({50, 50, 50});
  std::set<std::string> pinned;
  for (std::size_t i = 0; i < m.examples.size(); i += 5) {
    m.examples[i].split = "test";
    pinned.insert(m.examples[i].id);
  }
  split_examples(m, SplitRatios{0.64, 0.16, 0.2}, 3);
  for (const auto& e : m.examples) {
    if (pinned.count(e.id))
      CHECK(e.split == "test");
    else
      CHECK(e.split != "test");
  }
}

TEST_CASE("split ratios must sum to one and feed every nonempty split") {
  DatasetManifest m = synthetic_manifest({10, 10, 10});
  CHECK_THROWS_AS(split_examples(m, SplitRatios{0.5, 0.2, 0.2}, 1), Error);
  DatasetManifest tiny = synthetic_manifest({1, 1, 1});
  CHECK_THROWS_AS(split_examples(tiny, SplitRatios{0.34, 0.33, 0.33}, 1), Error);
}

TEST_CASE("five-fold assignment puts each train example in exactly one fold") {
  DatasetManifest m = synthetic_manifest({50, 50, 50});
  split_examples(m, SplitRatios{0.8, 0.2, 0.0}, 5);
  auto folds = kfold_assignments(m, 5, 11);

  int train_total = 0;
  std::vector<int> fold_sizes(5, 0);
  for (const auto& e : m.examples) {
    if (e.split != "train") {
      CHECK(folds.count(e.id) == 0);
      continue;
    }
    ++train_total;
    REQUIRE(folds.count(e.id) == 1);  // exactly one validation fold
    ++fold_sizes[folds.at(e.id)];
  }
  CHECK(train_total == 120);
  for (int s : fold_sizes) CHECK(std::abs(s - 24) <= 3);
}

TEST_CASE("imbalance keeps the documented count and only touches train") {
  DatasetManifest m = synthetic_manifest({100, 100, 3135});
  // all train for the target class, others mixed
  for (auto& e : m.examples) e.split = "train";
  for (std::size_t i = 0; i < m.examples.size(); ++i)
    if (m.examples[i].label != "hindi-english" && i % 3 == 0) m.examples[i].split = "test";

  std::set<std::string> other_ids, target_val_ids;
  for (const auto& e : m.examples)
    if (e.label != "hindi-english") other_ids.insert(e.id);

  simulate_imbalance(m, "hindi-english", 0.8, 4);
  CHECK(m.count("train", "hindi-english") == 627);  // ceil(0.2 * 3135)

  std::set<std::string> other_after;
  for (const auto& e : m.examples)
    if (e.label != "hindi-english") other_after.insert(e.id);
  CHECK(other_after == other_ids);  // untouched classes keep every id

  // determinism: same seed keeps the same ids
  DatasetManifest m2 = synthetic_manifest({100, 100, 3135});
  for (auto& e : m2.examples) e.split = "train";
  for (std::size_t i = 0; i < m2.examples.size(); ++i)
    if (m2.examples[i].label != "hindi-english" && i % 3 == 0) m2.examples[i].split = "test";
  simulate_imbalance(m2, "hindi-english", 0.8, 4);
  std::set<std::string> kept1, kept2;
  for (const auto& e : m.examples)
    if (e.label == "hindi-english") kept1.insert(e.id);
  for (const auto& e : m2.examples)
    if (e.label == "hindi-english") kept2.insert(e.id);
  CHECK(kept1 == kept2);

  // drop 0 changes nothing
  DatasetManifest m3 = synthetic_manifest({5, 5, 5}, "train");
  const std::size_t before = m3.examples.size();
  simulate_imbalance(m3, "hindi", 0.0, 1);
  CHECK(m3.examples.size() == before);

  CHECK_THROWS_AS(simulate_imbalance(m3, "hindi", 1.0, 1), Error);
  CHECK_THROWS_AS(simulate_imbalance(m3, "bengali", 0.5, 1), Error);
}

TEST_CASE("toy corpus counts, determinism and value range") {
  ToyConfig cfg;
  cfg.counts = {6, 6, 6};
  const std::string dir = temp_file("melaug_toy_corpus");
  std::filesystem::remove_all(dir);
  DatasetManifest m =
      synth_toy_corpus(cfg, {"english", "hindi", "hindi-english"}, 13, dir);
  CHECK(m.examples.size() == 18);
  for (const auto& e : m.examples) {
    CHECK(std::filesystem::exists(e.path));
    CHECK(e.duration == doctest::Approx(33536.0 / 16000.0));
  }

  auto a = synth_toy_clip(2, 3, 13, cfg);
  auto b = synth_toy_clip(2, 3, 13, cfg);
  CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0f);
  CHECK(a.samples.cwiseAbs().maxCoeff() <= 1.0f);
  CHECK(a.samples.cwiseAbs().maxCoeff() > 0.05f);

  auto c = synth_toy_clip(2, 3, 14, cfg);
  CHECK((a.samples - c.samples).cwiseAbs().maxCoeff() > 0.0f);

  ToyConfig zero;
  zero.counts = {0, 1, 1};
  CHECK_THROWS_AS(synth_toy_corpus(zero, {"a", "b", "c"}, 1, dir), Error);
}

TEST_CASE("mixed-class clips alternate between the two F0 bands") {
  ToyConfig cfg;
  const dsp::DspConfig dsp_cfg;
  const std::uint64_t seed = 21;

  int checked = 0;
  for (int index = 0; index < 4; ++index) {
    auto clip = synth_toy_clip(2, index, seed, cfg);
    auto sections = toy_mixed_sections(index, seed, cfg);
    REQUIRE(sections.size() >= 3);
    auto track = dsp::extract_f0<float>(clip, dsp_cfg);

    // per section: the interior voiced frames sit in the planned band
    const double frame_hop = 256.0;
    int band_hits = 0, band_frames = 0;
    bool saw_low = false, saw_high = false;
    for (const auto& sec : sections) {
      const int f_begin = static_cast<int>(sec.begin / frame_hop) + 2;
      const int f_end = static_cast<int>((sec.end - 1024) / frame_hop) - 2;
      for (int f = f_begin; f <= f_end && f < 128; ++f) {
        if (f < 0 || track.hz[f] == 0.0f) continue;
        ++band_frames;
        const bool low = track.hz[f] >= 90.0f && track.hz[f] <= 165.0f;
        const bool high = track.hz[f] >= 180.0f && track.hz[f] <= 330.0f;
        if (sec.band == 0 && low) ++band_hits;
        if (sec.band == 1 && high) ++band_hits;
        saw_low |= low;
        saw_high |= high;
      }
    }
    if (band_frames < 20) continue;  // degenerate section layout, skip
    ++checked;
    CHECK(saw_low);
    CHECK(saw_high);
    CHECK(static_cast<double>(band_hits) / band_frames > 0.7);
  }
  CHECK(checked >= 3);
}

TEST_CASE("feature sets persist losslessly") {
  FeatureSet fs;
  fs.ids = {"a", "b"};
  fs.labels = {0, 2};
  Rng rng(5);
  fs.spec_db.resize(16, 2);
  fs.f0_hz.resize(4, 2);
  for (Eigen::Index i = 0; i < fs.spec_db.size(); ++i)
    fs.spec_db.data()[i] = static_cast<float>(rng.uniform(-80.0, 0.0));
  for (Eigen::Index i = 0; i < fs.f0_hz.size(); ++i)
    fs.f0_hz.data()[i] = static_cast<float>(rng.uniform(0.0, 400.0));

  const std::string path = temp_file("melaug_features.bin");
  save_feature_set(path, fs);
  FeatureSet back = load_feature_set(path);
  CHECK(back.ids == fs.ids);
  CHECK(back.labels == fs.labels);
  CHECK((back.spec_db - fs.spec_db).cwiseAbs().maxCoeff() == 0.0f);
  CHECK((back.f0_hz - fs.f0_hz).cwiseAbs().maxCoeff() == 0.0f);
}
