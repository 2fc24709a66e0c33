#include "toklab/bpe.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "toklab/utf8.hpp"

namespace toklab::bpe {
namespace {

constexpr std::uint64_t kLowMask = 0xFFFFFFFFull;

std::uint64_t pack(std::uint32_t left, std::uint32_t right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

// Serialization escapes: one logical item per line, tabs as separators.
std::string escape(std::string_view raw) {
  std::string out;
  for (char32_t c : utf8::decode(raw)) {
    switch (c) {
      case U'\\': out += "\\\\"; break;
      case U'\t': out += "\\t"; break;
      case U'\n': out += "\\n"; break;
      case U'\r': out += "\\r"; break;
      case U' ': out += "\\s"; break;
      default:
        if (c < 0x20 || c == 0x7F || utf8::is_space(c)) {
          char buf[16];
          std::snprintf(buf, sizeof buf, "\\u{%X}", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += utf8::encode(c);
        }
    }
  }
  return out;
}

std::string unescape(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\') {
      out.push_back(text[i]);
      continue;
    }
    if (++i >= text.size()) throw MalformedModel("dangling escape");
    switch (text[i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 's': out.push_back(' '); break;
      case 'u': {
        const auto close = text.find('}', i);
        if (i + 1 >= text.size() || text[i + 1] != '{' ||
            close == std::string_view::npos) {
          throw MalformedModel("bad \\u escape");
        }
        unsigned value = 0;
        const auto digits = text.substr(i + 2, close - i - 2);
        const auto [ptr, ec] = std::from_chars(
            digits.data(), digits.data() + digits.size(), value, 16);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) {
          throw MalformedModel("bad \\u escape");
        }
        out += utf8::encode(static_cast<char32_t>(value));
        i = close;
        break;
      }
      default:
        throw MalformedModel(std::string("unknown escape \\") + text[i]);
    }
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::size_t parse_count(std::string_view s, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw MalformedModel(std::string("bad ") + what + ": '" + std::string(s) +
                         "'");
  }
  return value;
}

}  // namespace

std::string UnknownCharacter::hex(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(c));
  return buf;
}

const std::vector<std::string>& default_specials() {
  static const std::vector<std::string> specials = {"[PAD]", "[UNK]", "[CLS]",
                                                    "[SEP]", "[MASK]"};
  return specials;
}

BpeModel::BpeModel(std::u32string alphabet, std::vector<MergeRule> merges,
                   std::vector<std::string> specials,
                   std::size_t target_vocab_size)
    : alphabet_(std::move(alphabet)),
      merges_(std::move(merges)),
      specials_(std::move(specials)),
      target_(target_vocab_size) {
  std::unordered_set<std::string> seen_specials;
  for (const auto& s : specials_) {
    if (s.empty() || !seen_specials.insert(s).second) {
      throw MalformedModel("special tokens must be non-empty and distinct");
    }
    vocab_.push_back(s);
  }
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (i > 0 && alphabet_[i] <= alphabet_[i - 1]) {
      throw MalformedModel("alphabet must be strictly ascending");
    }
    const auto id = static_cast<TokenId>(vocab_.size());
    vocab_.push_back(utf8::encode(alphabet_[i]));
    ids_.emplace(vocab_.back(), id);
    char_ids_.emplace(alphabet_[i], id);
  }
  rank_pair_.reserve(merges_.size());
  rank_result_.reserve(merges_.size());
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    const MergeRule& m = merges_[rank];
    if (m.rank != rank) throw MalformedModel("merge ranks must be dense");
    if (m.result != m.left + m.right) {
      throw MalformedModel("merge result must equal left + right");
    }
    const auto left = ids_.find(m.left);
    const auto right = ids_.find(m.right);
    if (left == ids_.end() || right == ids_.end()) {
      throw MalformedModel("merge " + std::to_string(rank) +
                           " uses a part that is not yet in the vocabulary");
    }
    auto [it, inserted] =
        ids_.emplace(m.result, static_cast<TokenId>(vocab_.size()));
    if (inserted) vocab_.push_back(m.result);
    const std::uint64_t key = pack(left->second, right->second);
    PairInfo& info = pairs_[key];
    info.ranks.push_back(static_cast<std::uint32_t>(rank));
    info.result = it->second;
    rank_pair_.push_back(key);
    rank_result_.push_back(it->second);
  }
  if (vocab_.size() > target_) {
    throw MalformedModel("vocabulary (" + std::to_string(vocab_.size()) +
                         ") exceeds target size " + std::to_string(target_));
  }
}

std::optional<TokenId> BpeModel::token_id(std::string_view token) const {
  if (const auto it = ids_.find(std::string(token)); it != ids_.end()) {
    return it->second;
  }
  for (std::size_t i = 0; i < specials_.size(); ++i) {
    if (specials_[i] == token) return static_cast<TokenId>(i);
  }
  return std::nullopt;
}

const std::string& BpeModel::token(TokenId id) const {
  if (id >= vocab_.size()) throw InvalidId(id);
  return vocab_[id];
}

BpeModel BpeModel::truncated(std::size_t target) const {
  const std::size_t base = specials_.size() + alphabet_.size();
  if (target < base) throw TargetTooSmall(target, base);
  std::vector<MergeRule> kept;
  std::unordered_set<std::string> results;
  std::size_t size = base;
  for (const MergeRule& m : merges_) {
    if (size >= target) break;
    kept.push_back(m);
    if (results.insert(m.result).second) ++size;
  }
  return BpeModel(alphabet_, std::move(kept), specials_, target);
}

TokenSequence BpeModel::encode(std::string_view text,
                               UnknownPolicy policy) const {
  const std::u32string chars = utf8::decode(text);
  const std::size_t n = chars.size();

  std::optional<TokenId> unk;
  if (policy == UnknownPolicy::kSubstitute) {
    for (std::size_t i = 0; i < specials_.size(); ++i) {
      if (specials_[i].find("UNK") != std::string::npos ||
          specials_[i].find("unk") != std::string::npos) {
        unk = static_cast<TokenId>(i);
        break;
      }
    }
    if (!unk) {
      throw std::invalid_argument(
          "substitute policy needs an unknown-token special");
    }
  }

  std::vector<TokenId> sym(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = char_ids_.find(chars[i]);
    if (it != char_ids_.end()) {
      sym[i] = it->second;
    } else if (unk) {
      sym[i] = *unk;
    } else {
      throw UnknownCharacter(chars[i], i);
    }
  }

  // Linked list over code-point positions; a merged node keeps its left
  // position, so (rank, position) order is leftmost-first within a rank.
  std::vector<std::int64_t> next(n);
  std::vector<std::int64_t> prev(n);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    next[i] = i + 1 < n ? static_cast<std::int64_t>(i + 1) : -1;
    prev[i] = static_cast<std::int64_t>(i) - 1;
  }

  using Entry = std::pair<std::uint32_t, std::int64_t>;  // (rank, position)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  // A pair formed after rank `after` is only eligible for its later ranks.
  auto schedule = [&](std::int64_t pos, std::int64_t after) {
    const std::int64_t nx = next[pos];
    if (nx < 0) return;
    const auto it = pairs_.find(pack(sym[pos], sym[nx]));
    if (it == pairs_.end()) return;
    const auto& ranks = it->second.ranks;
    const auto r = std::upper_bound(
        ranks.begin(), ranks.end(), after,
        [](std::int64_t a, std::uint32_t b) { return a < b; });
    if (r != ranks.end()) heap.emplace(*r, pos);
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    schedule(static_cast<std::int64_t>(i), -1);
  }

  while (!heap.empty()) {
    const auto [rank, pos] = heap.top();
    heap.pop();
    if (!alive[pos]) continue;
    const std::int64_t nx = next[pos];
    if (nx < 0 || rank_pair_[rank] != pack(sym[pos], sym[nx])) continue;
    sym[pos] = rank_result_[rank];
    alive[nx] = false;
    next[pos] = next[nx];
    if (next[nx] >= 0) prev[next[nx]] = pos;
    if (prev[pos] >= 0) schedule(prev[pos], rank);
    schedule(pos, rank);
  }

  TokenSequence out;
  for (std::int64_t i = n > 0 ? 0 : -1; i >= 0; i = next[i]) {
    out.ids.push_back(sym[i]);
    out.surface.push_back(vocab_[sym[i]]);
  }
  return out;
}

std::string BpeModel::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) out += token(id);
  return out;
}

std::size_t BpeModel::max_token_length() const {
  std::size_t best = 0;
  for (std::size_t id = specials_.size(); id < vocab_.size(); ++id) {
    best = std::max(best, utf8::length(vocab_[id]));
  }
  return best;
}

std::string BpeModel::serialize() const {
  std::ostringstream out;
  out << "toklab-bpe 1\n";
  out << "target_vocab_size " << target_ << "\n";
  out << "[alphabet] " << alphabet_.size() << "\n";
  for (char32_t c : alphabet_) out << escape(utf8::encode(c)) << "\n";
  out << "[merges] " << merges_.size() << "\n";
  for (const MergeRule& m : merges_) {
    out << m.rank << "\t" << escape(m.left) << "\t" << escape(m.right) << "\n";
  }
  out << "[specials] " << specials_.size() << "\n";
  for (const auto& s : specials_) out << escape(s) << "\n";
  return out.str();
}

BpeModel BpeModel::deserialize(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::size_t at = 0;
  auto next_line = [&]() -> std::string_view {
    if (at >= lines.size()) throw MalformedModel("unexpected end of model");
    return lines[at++];
  };
  auto section = [&](std::string_view name) {
    const auto line = next_line();
    const std::string prefix = "[" + std::string(name) + "] ";
    if (line.substr(0, prefix.size()) != prefix) {
      throw MalformedModel("expected section " + prefix);
    }
    return parse_count(line.substr(prefix.size()), "section count");
  };

  if (next_line() != "toklab-bpe 1") throw MalformedModel("bad header");
  const auto target_line = next_line();
  constexpr std::string_view kTarget = "target_vocab_size ";
  if (target_line.substr(0, kTarget.size()) != kTarget) {
    throw MalformedModel("missing target_vocab_size");
  }
  const std::size_t target =
      parse_count(target_line.substr(kTarget.size()), "target size");

  std::u32string alphabet;
  for (std::size_t i = 0, n = section("alphabet"); i < n; ++i) {
    const std::u32string c = utf8::decode(unescape(next_line()));
    if (c.size() != 1) throw MalformedModel("alphabet entry is not one char");
    alphabet.push_back(c[0]);
  }
  std::vector<MergeRule> merges;
  for (std::size_t i = 0, n = section("merges"); i < n; ++i) {
    const auto fields = split(next_line(), '\t');
    if (fields.size() != 3) throw MalformedModel("merge line needs 3 fields");
    MergeRule m;
    m.rank = parse_count(fields[0], "rank");
    m.left = unescape(fields[1]);
    m.right = unescape(fields[2]);
    m.result = m.left + m.right;
    merges.push_back(std::move(m));
  }
  std::vector<std::string> specials;
  for (std::size_t i = 0, n = section("specials"); i < n; ++i) {
    specials.push_back(unescape(next_line()));
  }
  if (at != lines.size()) throw MalformedModel("trailing data after specials");
  return BpeModel(std::move(alphabet), std::move(merges), std::move(specials),
                  target);
}

bool BpeModel::operator==(const BpeModel& other) const {
  return alphabet_ == other.alphabet_ && merges_ == other.merges_ &&
         specials_ == other.specials_ && target_ == other.target_;
}

BpeModel train(std::string_view corpus, std::size_t target_vocab_size,
               const std::vector<std::string>& specials) {
  if (corpus.empty()) throw EmptyCorpus();
  const std::u32string chars = utf8::decode(corpus);

  std::u32string alphabet = chars;
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()),
                 alphabet.end());
  const std::size_t required = alphabet.size() + specials.size();
  if (target_vocab_size < required) {
    throw TargetTooSmall(target_vocab_size, required);
  }
  const std::size_t capacity = target_vocab_size - specials.size();

  // Training-local ids: alphabet first, then new merge results.
  std::vector<std::u32string> tokens;
  std::unordered_map<std::u32string, std::uint32_t> token_ids;
  for (char32_t c : alphabet) {
    token_ids.emplace(std::u32string(1, c),
                      static_cast<std::uint32_t>(tokens.size()));
    tokens.emplace_back(1, c);
  }

  const std::size_t n = chars.size();
  std::vector<std::int32_t> sym(n);
  std::vector<std::int32_t> prev(n);
  std::vector<std::int32_t> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    sym[i] = static_cast<std::int32_t>(
        std::lower_bound(alphabet.begin(), alphabet.end(), chars[i]) -
        alphabet.begin());
    prev[i] = static_cast<std::int32_t>(i) - 1;
    next[i] = i + 1 < n ? static_cast<std::int32_t>(i + 1) : -1;
  }

  std::unordered_map<std::uint64_t, std::int64_t> counts;
  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> positions;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto key = pack(sym[i], sym[i + 1]);
    ++counts[key];
    positions[key].push_back(static_cast<std::int32_t>(i));
  }

  auto pair_less = [&tokens](std::uint64_t a, std::uint64_t b) {
    const int c = tokens[a >> 32].compare(tokens[b >> 32]);
    if (c != 0) return c < 0;
    return tokens[a & kLowMask].compare(tokens[b & kLowMask]) < 0;
  };
  struct Entry {
    std::int64_t count;
    std::uint64_t key;
  };
  // Max-heap on count; among equal counts the smallest pair wins.
  auto lower_priority = [&pair_less](const Entry& x, const Entry& y) {
    if (x.count != y.count) return x.count < y.count;
    return pair_less(y.key, x.key);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)>
      heap(lower_priority);
  for (const auto& [key, count] : counts) {
    if (count >= 2) heap.push({count, key});
  }

  auto decrement = [&counts](std::uint64_t key) {
    const auto it = counts.find(key);
    if (--it->second == 0) counts.erase(it);
  };

  std::vector<MergeRule> merges;
  std::size_t vocab = alphabet.size();
  std::vector<std::uint64_t> touched;

  while (vocab < capacity) {
    // Lazy deletion: every live pair has an entry whose count is at least
    // its true count, so a top entry that is current is the true maximum.
    bool found = false;
    while (!heap.empty()) {
      const Entry top = heap.top();
      const auto it = counts.find(top.key);
      const std::int64_t current = it == counts.end() ? 0 : it->second;
      if (current == top.count) {
        found = true;
        break;
      }
      heap.pop();
      if (current >= 2) heap.push({current, top.key});
    }
    if (!found) break;
    const Entry best = heap.top();
    heap.pop();

    const auto left = static_cast<std::int32_t>(best.key >> 32);
    const auto right = static_cast<std::int32_t>(best.key & kLowMask);
    std::u32string merged = tokens[left] + tokens[right];
    auto [id_it, inserted] = token_ids.emplace(
        merged, static_cast<std::uint32_t>(tokens.size()));
    if (inserted) {
      tokens.push_back(merged);
      ++vocab;
    }
    const auto merged_id = static_cast<std::int32_t>(id_it->second);
    merges.push_back({utf8::encode(tokens[left]), utf8::encode(tokens[right]),
                      utf8::encode(merged), merges.size()});

    auto node = positions.extract(best.key);
    std::vector<std::int32_t> where = std::move(node.mapped());
    std::sort(where.begin(), where.end());
    where.erase(std::unique(where.begin(), where.end()), where.end());

    touched.clear();
    for (const std::int32_t pos : where) {
      if (sym[pos] != left) continue;
      const std::int32_t nx = next[pos];
      if (nx < 0 || sym[nx] != right) continue;
      const std::int32_t p = prev[pos];
      const std::int32_t after = next[nx];
      if (p >= 0) decrement(pack(sym[p], left));
      decrement(best.key);
      if (after >= 0) decrement(pack(right, sym[after]));

      sym[pos] = merged_id;
      sym[nx] = -1;
      next[pos] = after;
      if (after >= 0) prev[after] = pos;

      if (p >= 0) {
        const auto key = pack(sym[p], merged_id);
        ++counts[key];
        positions[key].push_back(p);
        touched.push_back(key);
      }
      if (after >= 0) {
        const auto key = pack(merged_id, sym[after]);
        ++counts[key];
        positions[key].push_back(pos);
        touched.push_back(key);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (const auto key : touched) {
      const auto it = counts.find(key);
      if (it != counts.end() && it->second >= 2) heap.push({it->second, key});
    }
  }

  return BpeModel(std::move(alphabet), std::move(merges), specials,
                  target_vocab_size);
}

}  // namespace toklab::bpe
