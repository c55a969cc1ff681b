/* Copyright 2026 The emoforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Acceptance runner: one PASS/FAIL/SKIP line per criterion, non-zero exit on
// any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <sys/wait.h>

#include "test_util.hpp"

namespace emoforge {
namespace {

namespace t = testing;

struct Outcome {
  bool pass = true;
  bool skipped = false;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Outcome dsp_oracles() {
  Outcome o;
  Rng rng(1);
  std::size_t clip_mismatch = 0;
  for (int k = 0; k < 10000; ++k) {
    const double y = uniform(rng, -2.0, 2.0), level = uniform(rng, 0.0, 1.5);
    const double expected = y >= level ? y - level : (y <= -level ? y + level : 0.0);
    clip_mismatch += center_clip(y, level) != expected;
  }
  o.check(clip_mismatch == 0, std::to_string(clip_mismatch) + " center_clip mismatches");

  std::size_t median_mismatch = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 1 + uniform_index(rng, 64), l = 1 + uniform_index(rng, 15);
    std::vector<double> x(n);
    for (double& v : x) v = k % 2 ? static_cast<double>(uniform_index(rng, 5)) : normal(rng);
    median_mismatch += median_filter_1d(x, l) != t::brute_median(x, l);
  }
  o.check(median_mismatch == 0, std::to_string(median_mismatch) + " median mismatches");

  for (double f : {80.0, 120.0, 220.0, 400.0}) {
    const auto tone = t::sine(f, 22050.0, 2048);
    const auto peak = autocorr_pitch(tone, 22050);
    const double expected = 22050.0 / f;
    o.check(std::abs(static_cast<double>(peak.lag) - expected) <= 1.0,
            "pitch lag " + std::to_string(peak.lag) + " for " + fmt(f) + " Hz");
  }

  const auto sine = t::sine(1000.0, 16000.0, 16000);
  const double r = root_mean_square(sine);
  o.check(std::abs(r - 1.0 / std::sqrt(2.0)) <= 1e-3, "sine rmse " + fmt(r));

  std::vector<double> fixture(100, 0.5);
  for (std::size_t i = 0; i < 30; ++i) fixture[i * 3] = 0.0;
  const double pr = pause_ratio(t::make_clip(fixture));
  o.check(pr == 0.3, "pause ratio " + fmt(pr));
  return o;
}

Outcome tfidf_exactness() {
  Outcome o;
  std::vector<TokenList> docs;
  for (const char* raw : {"The cat sat.", "The cat ran, the dog ran!", "A dog barked"}) docs.push_back(normalize_text(raw));
  const auto v = fit_vocabulary(docs);
  o.check(v.terms() == std::vector<std::string>{"the", "cat", "sat", "ran", "dog", "a", "barked"}, "vocabulary order");
  if (!o.pass) return o;
  const double l3 = std::log(3.0), l32 = std::log(1.5);
  const double expected[3][7] = {{l32, l32, l3, 0, 0, 0, 0},
                                 {2 * l32, l32, 0, 2 * l3, l32, 0, 0},
                                 {0, 0, 0, 0, l32, l3, l3}};
  double worst = 0.0;
  for (std::size_t d = 0; d < 3; ++d) {
    const Vector w = tfidf_transform(docs[d], v);
    for (std::size_t k = 0; k < 7; ++k) worst = std::max(worst, std::abs(w[Eigen::Index(k)] - expected[d][k]));
  }
  o.check(worst <= 1e-12, "max deviation " + fmt(worst));
  return o;
}

Outcome gradient_checks() {
  Outcome o;
  double mlp = 0.0, lstm = 0.0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    mlp = std::max(mlp, t::mlp_gradient_check(seed));
    lstm = std::max(lstm, t::lstm_gradient_check(seed));
  }
  o.check(mlp < 1e-4, "mlp max relative error " + fmt(mlp));
  o.check(lstm < 1e-4, "lstm max relative error " + fmt(lstm));
  o.detail += o.pass ? "mlp " + fmt(mlp) + ", lstm " + fmt(lstm) : "";
  return o;
}

// Three classes, each with two exclusive terms, plus one shared term.
t::Labeled exclusive_term_corpus(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  t::Labeled out{Matrix::Zero(Eigen::Index(3 * per_class), 7), {}};
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const std::size_t c = i % 3;
    const auto r = Eigen::Index(i);
    out.X(r, Eigen::Index(2 * c)) = static_cast<double>(uniform_index(rng, 4));
    out.X(r, Eigen::Index(2 * c + 1)) = static_cast<double>(1 + uniform_index(rng, 3));
    out.X(r, 6) = static_cast<double>(uniform_index(rng, 6));
    out.y.push_back(c);
  }
  return out;
}

Outcome classifier_capability() {
  Outcome o;
  const auto xor_data = t::jittered_xor(50, 3);
  ForestParams fp;
  fp.trees = 50;
  const double rf = t::accuracy(fit_random_forest(xor_data.X, xor_data.y, 2, fp, 1).predict(xor_data.X), xor_data.y);
  const double gb =
      t::accuracy(fit_gradient_boosting(xor_data.X, xor_data.y, 2, {}, 1).predict(xor_data.X), xor_data.y);
  o.check(rf >= 0.95, "rf xor " + fmt(rf));
  o.check(gb >= 0.95, "xgb xor " + fmt(gb));

  const auto train = t::separable_blobs(100, 2, 1.5, 51), test = t::separable_blobs(100, 2, 1.5, 52);
  const double lr = t::accuracy(fit_logistic_regression(train.X, train.y, 2, {}, 1).predict(test.X), test.y);
  const double svm = t::accuracy(fit_linear_svm(train.X, train.y, 2, {}, 1).predict(test.X), test.y);
  o.check(lr >= 0.95, "lr blobs " + fmt(lr));
  o.check(svm >= 0.95, "svm blobs " + fmt(svm));

  const auto nb_train = exclusive_term_corpus(30, 5), nb_test = exclusive_term_corpus(30, 6);
  const auto nb = fit_multinomial_nb(nb_train.X, nb_train.y, 3, {});
  const double mnb = std::min(t::accuracy(nb.predict(nb_train.X), nb_train.y), t::accuracy(nb.predict(nb_test.X), nb_test.y));
  o.check(mnb == 1.0, "mnb exclusive terms " + fmt(mnb));

  const std::size_t solved = t::cumulative_sum_solved(10);
  o.check(solved >= 8, "lstm cumulative sum solved " + std::to_string(solved) + "/10");
  if (o.pass) o.detail = "lstm solved " + std::to_string(solved) + "/10";
  return o;
}

Outcome metric_identities() {
  Outcome o;
  Rng rng(7);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t C = 2 + uniform_index(rng, 5), n = 1 + uniform_index(rng, 60);
    std::vector<std::size_t> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) truth[i] = uniform_index(rng, C), pred[i] = uniform_index(rng, C);
    const auto r = evaluate(pred, truth, C);
    std::size_t trace = 0, fp = 0, fn = 0;
    for (std::size_t c = 0; c < C; ++c) {
      std::size_t row = 0, col = 0;
      for (std::size_t k = 0; k < C; ++k) row += r.confusion[c][k], col += r.confusion[k][c];
      violations += row != static_cast<std::size_t>(std::count(truth.begin(), truth.end(), c));
      trace += r.confusion[c][c];
      fp += col - r.confusion[c][c];
      fn += row - r.confusion[c][c];
    }
    const double acc = static_cast<double>(trace) / static_cast<double>(n);
    violations += acc != r.accuracy;
    violations += static_cast<double>(trace) / static_cast<double>(trace + fp) != r.accuracy;
    violations += static_cast<double>(trace) / static_cast<double>(trace + fn) != r.accuracy;
  }
  o.check(violations == 0, std::to_string(violations) + " identity violations");
  const std::vector<std::size_t> truth = {0, 0, 1, 1}, pred = {0, 1, 1, 1};
  const double f1 = evaluate(pred, truth, 2).macro_f1;
  o.check(std::abs(f1 - 11.0 / 15.0) <= 1e-15, "worked macro F1 " + fmt(f1));
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + EMOFORGE_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string quoted(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

struct Workspace {
  std::filesystem::path dir = t::scratch_dir("acceptance");
  std::filesystem::path manifest;
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

std::string train_args(const std::string& kind, const std::string& setting, const std::filesystem::path& out) {
  return "train --manifest " + quoted(workspace().manifest) + " --model " + kind + " --setting " + setting +
         " --classes 6 --seed 17 --out " + quoted(out);
}

Outcome synthetic_end_to_end() {
  Outcome o;
  auto& w = workspace();
  o.check(run_cli("synth-corpus --out " + quoted(w.dir / "corpus") + " --seed 2026") == 0, "synth-corpus failed");
  w.manifest = w.dir / "corpus" / "manifest.jsonl";
  if (!o.pass) return o;
  const auto entries = read_manifest(w.manifest);
  o.check(entries.size() == 600, "corpus has " + std::to_string(entries.size()) + " rows");

  struct Run {
    std::string kind, setting;
    double overall = 0.0, audio_classes = 0.0, text_classes = 0.0;
  };
  std::vector<Run> runs = {{"e1", "audio_only"}, {"e2", "text_only"}, {"e2", "audio_text"}};
  const std::vector<std::size_t> audio_cued_classes = {0, 1, 2}, text_cued_classes = {3, 4, 5};
  for (auto& r : runs) {
    const auto out = w.dir / (r.kind + "_" + r.setting);
    if (run_cli(train_args(r.kind, r.setting, out)) != 0) {
      o.check(false, "train " + r.kind + " " + r.setting + " failed");
      return o;
    }
    const Json j = read_json_file(out / "report.json");
    EvalReport report;
    report.confusion = j.at("confusion_matrix").get<std::vector<std::vector<std::size_t>>>();
    r.overall = j.at("accuracy").get<double>();
    r.audio_classes = subset_accuracy(report, audio_cued_classes);
    r.text_classes = subset_accuracy(report, text_cued_classes);
  }
  o.check(runs[0].audio_classes >= 0.8, "audio-only e1 on audio classes " + fmt(runs[0].audio_classes));
  o.check(runs[1].text_classes >= 0.8, "text-only e2 on text classes " + fmt(runs[1].text_classes));
  const double fused = runs[2].overall;
  o.check(fused - runs[0].overall >= 0.10, "fused " + fmt(fused) + " vs audio-only " + fmt(runs[0].overall));
  o.check(fused - runs[1].overall >= 0.10, "fused " + fmt(fused) + " vs text-only " + fmt(runs[1].overall));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("audio ") + fmt(runs[0].overall) + " (cued " +
              fmt(runs[0].audio_classes) + "), text " + fmt(runs[1].overall) + " (cued " + fmt(runs[1].text_classes) +
              "), fused " + fmt(fused);
  return o;
}

Outcome determinism() {
  Outcome o;
  auto& w = workspace();
  if (w.manifest.empty() || !std::filesystem::exists(w.manifest)) {
    o.check(run_cli("synth-corpus --out " + quoted(w.dir / "corpus") + " --seed 2026") == 0, "synth-corpus failed");
    w.manifest = w.dir / "corpus" / "manifest.jsonl";
  }
  // e2 trains rf, xgb, mlp, mnb and lr; lstm covers the frame-sequence path.
  for (const auto& [kind, setting] :
       std::vector<std::pair<std::string, std::string>>{{"e2", "audio_text"}, {"lstm", "audio_only"}}) {
    const auto a = w.dir / ("det_a_" + kind), b = w.dir / ("det_b_" + kind);
    const bool ran = run_cli(train_args(kind, setting, a)) == 0 && run_cli(train_args(kind, setting, b)) == 0;
    o.check(ran, "train " + kind + " failed");
    if (!ran) continue;
    for (const char* file : {"model.json", "report.json", "confusion.csv"}) {
      o.check(t::slurp(a / file) == t::slurp(b / file), kind + " " + file + " differs");
    }
  }
  return o;
}

Outcome gated_dataset() {
  Outcome o;
  const char* path = std::getenv("EMOFORGE_IEMOCAP_MANIFEST");
  if (path == nullptr || *path == '\0') {
    o.skipped = true;
    o.detail = "EMOFORGE_IEMOCAP_MANIFEST not set";
    return o;
  }
  const auto ds = to_dataset(read_manifest(path), ClassMode::kSix);
  const std::map<EmotionLabel, std::size_t> expected = {
      {EmotionLabel::kAngry, 860}, {EmotionLabel::kHappy, 1309},    {EmotionLabel::kSad, 2327},
      {EmotionLabel::kFear, 1007}, {EmotionLabel::kSurprise, 949}, {EmotionLabel::kNeutral, 1385}};
  const auto hist = class_histogram(ds);
  for (const auto& [label, count] : expected) {
    const std::size_t got = hist.count(label) ? hist.at(label) : 0;
    o.check(got == count, std::string(to_string(label)) + " " + std::to_string(got) + " != " + std::to_string(count));
  }
  o.check(ds.size() == 7837, "total " + std::to_string(ds.size()));
  return o;
}

Outcome importance_sanity() {
  Outcome o;
  Rng rng(9);
  Matrix X(400, 5);
  std::vector<std::size_t> y(400);
  for (Eigen::Index i = 0; i < 400; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) X(i, j) = uniform01(rng);
    y[std::size_t(i)] = X(i, 0) > 0.5 ? 1 : 0;
  }
  const std::vector<std::string> names = {"f0", "f1", "f2", "f3", "f4"};
  const auto gb = fit_gradient_boosting(X, y, 2, BoostingParams{20, 0.1, 3, 1}, 1);
  const auto ranking = feature_importance(gb, names);
  double sum = 0.0;
  for (const auto& f : ranking) sum += f.importance;
  o.check(std::abs(sum - 1.0) <= 1e-9, "importances sum to " + fmt(sum));
  o.check(ranking.front().index == 0 && ranking.front().importance > 0.9,
          "informative feature share " + fmt(ranking.front().importance));

  auto& w = workspace();
  if (w.manifest.empty()) {
    o.check(false, "no synthetic corpus");
    return o;
  }
  const auto out = w.dir / "imp_xgb";
  o.check(run_cli(train_args("xgb", "audio_only", out)) == 0, "train xgb failed");
  if (!o.pass) return o;
  const Json report = read_json_file(out / "report.json");
  std::vector<std::string> reported;
  double reported_sum = 0.0;
  for (const auto& f : report.at("importance")) {
    reported.push_back(f.at("feature").get<std::string>());
    reported_sum += f.at("importance").get<double>();
  }
  std::vector<std::string> canonical(AudioFeatureVector::kNames.begin(), AudioFeatureVector::kNames.end());
  std::sort(reported.begin(), reported.end());
  std::sort(canonical.begin(), canonical.end());
  o.check(reported == canonical, "report does not name the 8 audio features");
  o.check(std::abs(reported_sum - 1.0) <= 1e-9, "report importances sum to " + fmt(reported_sum));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace emoforge

int main() {
  using namespace emoforge;
  const std::vector<Criterion> criteria = {
      {1, "DSP oracle suite", 30, dsp_oracles},
      {2, "TFIDF exactness", 1, tfidf_exactness},
      {3, "gradient checks", 60, gradient_checks},
      {4, "classifier capability", 120, classifier_capability},
      {5, "metric identities", 5, metric_identities},
      {6, "synthetic end-to-end", 180, synthetic_end_to_end},
      {7, "determinism", 60, determinism},
      {8, "gated dataset histogram", 0, gated_dataset},
      {9, "feature-importance sanity", 30, importance_sanity},
  };
  bool all_ok = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.skipped && c.budget_s > 0 && secs > c.budget_s) {
      o.check(false, "took " + fmt(secs) + " s, budget " + fmt(c.budget_s) + " s");
    }
    const char* verdict = o.skipped ? "SKIP" : (o.pass ? "PASS" : "FAIL");
    all_ok = all_ok && (o.skipped || o.pass);
    std::cout << verdict << " criterion " << c.id << ": " << c.title << " (" << fmt(secs) << " s";
    if (c.budget_s > 0) std::cout << " / " << fmt(c.budget_s) << " s";
    std::cout << ")";
    if (!o.detail.empty()) std::cout << " - " << o.detail;
    std::cout << std::endl;
  }
  std::filesystem::remove_all(workspace().dir);
  return all_ok ? 0 : 1;
}
