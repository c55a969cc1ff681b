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

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace emoforge {
namespace {

TEST(NormalizeText, Examples) {
  EXPECT_EQ(normalize_text("This is AWESOME!!"), (TokenList{"this", "is", "awesome"}));
  EXPECT_TRUE(normalize_text("").empty());
  EXPECT_EQ(normalize_text("don't stop"), (TokenList{"don't", "stop"}));
  EXPECT_EQ(normalize_text("  A-b\tC3\n"), (TokenList{"a", "b", "c3"}));
  EXPECT_EQ(normalize_text("caf\xc3\xa9 ok"), (TokenList{"caf", "ok"}));
}

TEST(FitVocabulary, DocumentFrequencies) {
  const std::vector<TokenList> corpus = {{"a", "b"}, {"b", "c"}};
  const auto v = fit_vocabulary(corpus);
  EXPECT_EQ(v.documents(), 2u);
  EXPECT_EQ(v.document_frequency("a"), 1u);
  EXPECT_EQ(v.document_frequency("b"), 2u);
  EXPECT_EQ(v.document_frequency("c"), 1u);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"a", "b", "c"}));

  const std::vector<TokenList> single = {{"a", "a", "a"}};
  EXPECT_EQ(fit_vocabulary(single).document_frequency("a"), 1u);
  EXPECT_THROW(fit_vocabulary(std::vector<TokenList>{}), Error);
}

TEST(FitVocabulary, Deterministic) {
  const std::vector<TokenList> corpus = {{"z", "y", "x"}, {"x", "w"}, {"v"}};
  const auto a = fit_vocabulary(corpus);
  const auto b = fit_vocabulary(corpus);
  EXPECT_EQ(a.terms(), b.terms());
  EXPECT_EQ(a.document_frequencies(), b.document_frequencies());
}

TEST(Tfidf, WorkedExample) {
  const std::vector<TokenList> corpus = {{"a", "b"}, {"b", "c"}};
  const auto v = fit_vocabulary(corpus);
  const Vector w = tfidf_transform({"a", "a", "b"}, v);
  EXPECT_NEAR(w[0], 2.0 * std::log(2.0), 1e-15);
  EXPECT_EQ(w[1], 0.0);
  EXPECT_EQ(w[2], 0.0);
  EXPECT_TRUE((tfidf_transform({"q", "r"}, v).array() == 0.0).all());
}

TEST(Tfidf, ThreeDocumentMatrixMatchesHandValues) {
  const std::vector<std::string> raw = {"The cat sat.", "The cat ran, the dog ran!", "A dog barked"};
  std::vector<TokenList> docs;
  for (const auto& r : raw) docs.push_back(normalize_text(r));
  const auto v = fit_vocabulary(docs);
  ASSERT_EQ(v.terms(), (std::vector<std::string>{"the", "cat", "sat", "ran", "dog", "a", "barked"}));
  const double l3 = std::log(3.0), l32 = std::log(1.5);
  // Rows: documents; columns: the, cat, sat, ran, dog, a, barked.
  const double expected[3][7] = {{l32, l32, l3, 0, 0, 0, 0},
                                 {2 * l32, l32, 0, 2 * l3, l32, 0, 0},
                                 {0, 0, 0, 0, l32, l3, l3}};
  for (std::size_t d = 0; d < 3; ++d) {
    const Vector w = tfidf_transform(docs[d], v);
    for (std::size_t t = 0; t < 7; ++t) EXPECT_NEAR(w[Eigen::Index(t)], expected[d][t], 1e-12) << d << "," << t;
  }
}

TEST(Tfidf, UbiquitousTermWeighsZeroAndLinearInCount) {
  const std::vector<TokenList> corpus = {{"x", "y"}, {"x"}, {"x", "z"}};
  const auto v = fit_vocabulary(corpus);
  EXPECT_EQ(tfidf_transform({"x", "x", "x", "x"}, v)[0], 0.0);
  const double one = tfidf_transform({"y"}, v)[1];
  EXPECT_GT(one, 0.0);
  EXPECT_EQ(tfidf_transform({"y", "y"}, v)[1], 2.0 * one);
}

TEST(Tfidf, NonNegativeAndZeroIffAbsentOrUbiquitous) {
  Rng rng(21);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps", "zeta"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TokenList> corpus(5);
    for (auto& doc : corpus) {
      for (std::size_t k = 0; k < 1 + uniform_index(rng, 6); ++k) doc.push_back(words[uniform_index(rng, words.size())]);
    }
    const auto v = fit_vocabulary(corpus);
    for (const auto& doc : corpus) {
      const Vector w = tfidf_transform(doc, v);
      for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& term = v.terms()[i];
        const bool present = std::find(doc.begin(), doc.end(), term) != doc.end();
        const bool zero_expected = !present || v.document_frequencies()[i] == v.documents();
        EXPECT_GE(w[Eigen::Index(i)], 0.0);
        EXPECT_EQ(w[Eigen::Index(i)] == 0.0, zero_expected) << term;
      }
    }
  }
}

TEST(Vocabulary, TsvRoundTripAndValidation) {
  const std::vector<TokenList> corpus = {{"hello", "world"}, {"world", "it's"}};
  const auto v = fit_vocabulary(corpus);
  std::ostringstream out;
  write_vocabulary(out, v);
  EXPECT_EQ(out.str(), "N=2\nhello\t1\nworld\t2\nit's\t1\n");
  std::istringstream in(out.str());
  const auto r = read_vocabulary(in);
  EXPECT_EQ(r.terms(), v.terms());
  EXPECT_EQ(r.document_frequencies(), v.document_frequencies());
  EXPECT_EQ(r.documents(), 2u);

  for (const char* bad : {"", "M=2\n", "N=2\nx\t3\n", "N=2\nx\t0\n", "N=2\nx 1\n", "N=2\nx\t1\nx\t1\n"}) {
    std::istringstream b(bad);
    EXPECT_THROW(read_vocabulary(b), Error) << bad;
  }
}

TEST(Fuse, AudioBlockFirst) {
  AudioFeatureVector a;
  a.autocorr_peak_mean = 0.1;
  a.harmonic_mean = 3.0;
  a.amp_std = 0.7;
  Vector t(3);
  t << 1.0, 0.0, 2.5;
  const Vector f = fuse(a, t, 3);
  ASSERT_EQ(f.size(), 11);
  const auto av = a.values();
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(f[Eigen::Index(i)], av[i]);
  EXPECT_EQ(f.tail(3), t);
  EXPECT_TRUE((fuse(a, Vector::Zero(3), 3).tail(3).array() == 0.0).all());
  EXPECT_THROW(fuse(a, t, 4), Error);
}

TEST(Fuse, Injective) {
  Rng rng(22);
  std::vector<Vector> seen;
  for (int k = 0; k < 200; ++k) {
    AudioFeatureVector a;
    a.rmse_mean = static_cast<double>(uniform_index(rng, 3));
    Vector t(2);
    t << static_cast<double>(uniform_index(rng, 3)), static_cast<double>(uniform_index(rng, 3));
    const Vector f = fuse(a, t, 2);
    for (const auto& g : seen) {
      if (g == f) {
        EXPECT_EQ(g[3], a.rmse_mean);
        EXPECT_EQ(g.tail(2), t);
      }
    }
    seen.push_back(f);
  }
}

}  // namespace
}  // namespace emoforge
