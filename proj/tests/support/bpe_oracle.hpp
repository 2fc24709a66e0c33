#pragma once

// Brute-force reference BPE: recounts every adjacent pair from scratch on
// each step and applies merges by rewriting the whole sequence.

#include <cstddef>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Pair = std::pair<std::u32string, std::u32string>;

inline std::vector<std::u32string> apply_merge(
    const std::vector<std::u32string>& seq, const Pair& pair) {
  std::vector<std::u32string> out;
  for (std::size_t i = 0; i < seq.size();) {
    if (i + 1 < seq.size() && seq[i] == pair.first &&
        seq[i + 1] == pair.second) {
      out.push_back(pair.first + pair.second);
      i += 2;
    } else {
      out.push_back(seq[i]);
      ++i;
    }
  }
  return out;
}

// `capacity` excludes specials.
inline std::vector<Pair> train(const std::u32string& corpus,
                               std::size_t capacity) {
  std::vector<std::u32string> seq;
  std::set<std::u32string> vocab;
  for (char32_t c : corpus) {
    seq.emplace_back(1, c);
    vocab.emplace(1, c);
  }
  std::vector<Pair> merges;
  while (vocab.size() < capacity) {
    std::map<Pair, long> counts;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      ++counts[{seq[i], seq[i + 1]}];
    }
    const Pair* best = nullptr;
    long best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best_count < 2) break;
    const Pair chosen = *best;
    merges.push_back(chosen);
    vocab.insert(chosen.first + chosen.second);
    seq = apply_merge(seq, chosen);
  }
  return merges;
}

inline std::vector<std::u32string> encode(const std::u32string& text,
                                          const std::vector<Pair>& merges) {
  std::vector<std::u32string> seq;
  for (char32_t c : text) seq.emplace_back(1, c);
  for (const auto& m : merges) seq = apply_merge(seq, m);
  return seq;
}

inline std::u32string random_string(std::mt19937_64& rng,
                                     const std::u32string& alphabet,
                                     std::size_t length) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::u32string s;
  for (std::size_t i = 0; i < length; ++i) s.push_back(alphabet[pick(rng)]);
  return s;
}

// A skewed alphabet draw so that frequent pairs, ties and runs all appear.
inline std::u32string random_corpus(std::mt19937_64& rng,
                                    std::size_t max_len,
                                    std::size_t max_alphabet) {
  static const std::u32string pool = U"ab cé中\U0001F600\t\nxyz";
  std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
  std::uniform_int_distribution<std::size_t> alpha_dist(1, max_alphabet);
  const std::size_t k = std::min(alpha_dist(rng), pool.size());
  std::u32string alphabet = pool.substr(0, k);
  std::u32string s;
  const std::size_t n = len_dist(rng);
  std::geometric_distribution<std::size_t> skew(0.4);
  while (s.size() < n) {
    // Occasionally repeat an earlier chunk to create long shared substrings.
    if (s.size() > 4 && rng() % 4 == 0) {
      std::uniform_int_distribution<std::size_t> from(0, s.size() - 2);
      const std::size_t start = from(rng);
      const std::size_t len = std::min<std::size_t>(1 + rng() % 6, n - s.size());
      s += s.substr(start, len);
    } else {
      s.push_back(alphabet[std::min(skew(rng), k - 1)]);
    }
  }
  return s.substr(0, n);
}

}  // namespace oracle
