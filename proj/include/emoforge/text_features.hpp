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
#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "emoforge/common.hpp"

namespace emoforge {

using TokenList = std::vector<std::string>;

/// Lowercases, replaces everything outside [a-z0-9'] with a space and splits
/// on whitespace. Non-ASCII bytes are treated as separators.
inline TokenList normalize_text(std::string_view raw) {
  TokenList tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (unsigned char c : raw) {
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
    if (keep) {
      current.push_back(static_cast<char>(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

/// Term index and document frequency, indices contiguous in first-appearance order.
class Vocabulary {
 public:
  std::size_t size() const { return terms_.size(); }
  std::size_t documents() const { return documents_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequencies() const { return df_; }

  std::optional<std::size_t> index_of(const std::string& term) const {
    const auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t document_frequency(const std::string& term) const {
    const auto i = index_of(term);
    return i ? df_[*i] : 0;
  }

  /// Rebuilds from serialized parts, checking the invariants.
  static Vocabulary from_parts(std::size_t documents, std::vector<std::string> terms, std::vector<std::size_t> df) {
    require(terms.size() == df.size(), ErrorKind::kFormat, "vocabulary term/df length mismatch");
    Vocabulary v;
    v.documents_ = documents;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      require(df[i] >= 1 && df[i] <= documents, ErrorKind::kFormat, "document frequency out of range for '" +
                                                                        terms[i] + "'");
      require(v.index_.emplace(terms[i], i).second, ErrorKind::kFormat, "duplicate term '" + terms[i] + "'");
    }
    v.terms_ = std::move(terms);
    v.df_ = std::move(df);
    return v;
  }

 private:
  friend Vocabulary fit_vocabulary(std::span<const TokenList> corpus);

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t documents_ = 0;
};

inline Vocabulary fit_vocabulary(std::span<const TokenList> corpus) {
  require(!corpus.empty(), ErrorKind::kParameter, "cannot fit a vocabulary on an empty corpus");
  Vocabulary v;
  v.documents_ = corpus.size();
  std::unordered_set<std::string> seen_in_doc;
  for (const auto& doc : corpus) {
    seen_in_doc.clear();
    for (const auto& term : doc) {
      if (!seen_in_doc.insert(term).second) continue;
      auto [it, inserted] = v.index_.emplace(term, v.terms_.size());
      if (inserted) {
        v.terms_.push_back(term);
        v.df_.push_back(0);
      }
      ++v.df_[it->second];
    }
  }
  return v;
}

/// Dense TFIDF: raw count times ln(N / df). Out-of-vocabulary tokens are skipped.
inline Vector tfidf_transform(const TokenList& doc, const Vocabulary& vocab) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(vocab.size()));
  std::vector<std::size_t> counts(vocab.size(), 0);
  for (const auto& term : doc) {
    if (const auto i = vocab.index_of(term)) ++counts[*i];
  }
  const double n = static_cast<double>(vocab.documents());
  const auto& df = vocab.document_frequencies();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    out[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) * std::log(n / static_cast<double>(df[i]));
  }
  return out;
}

/// Text form: a header line "N=<documents>" then "term<TAB>df" per index.
inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  out << "N=" << vocab.documents() << '\n';
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.terms()[i] << '\t' << vocab.document_frequencies()[i] << '\n';
  }
}

inline Vocabulary read_vocabulary(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line.rfind("N=", 0) == 0, ErrorKind::kFormat,
          "vocabulary header must be N=<count>");
  std::size_t documents = 0;
  try {
    documents = std::stoull(line.substr(2));
  } catch (const std::exception&) {
    fail(ErrorKind::kFormat, "bad vocabulary header '" + line + "'");
  }
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    require(tab != std::string::npos, ErrorKind::kFormat, "vocabulary line without tab: '" + line + "'");
    terms.push_back(line.substr(0, tab));
    try {
      df.push_back(std::stoull(line.substr(tab + 1)));
    } catch (const std::exception&) {
      fail(ErrorKind::kFormat, "bad document frequency in '" + line + "'");
    }
  }
  return Vocabulary::from_parts(documents, std::move(terms), std::move(df));
}

inline void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  write_vocabulary(out, vocab);
}

}  // namespace emoforge
