#include "toklab/sweep.hpp"

#include <algorithm>
#include <iomanip>
#include <stdexcept>

#include <json.hpp>

#include "toklab/normalize.hpp"
#include "toklab/utf8.hpp"

namespace toklab::sweep {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kCharacter: return "character";
    case Stage::kSubword: return "subword";
    case Stage::kWord: return "word";
    case Stage::kMultiword: return "multiword";
  }
  return "?";
}

Stage classify_token_stage(std::string_view token,
                           const std::set<std::string>& words) {
  if (token.empty()) throw std::invalid_argument("empty token");
  std::u32string chars = utf8::decode(token);
  if (chars.size() == 1) return Stage::kCharacter;
  if (chars.front() == U' ') chars.erase(chars.begin());
  if (chars.size() <= 1) return Stage::kCharacter;
  while (!chars.empty() && utf8::is_space(chars.back())) chars.pop_back();
  if (chars.empty()) return Stage::kCharacter;  // a run of whitespace
  const auto first_text =
      std::find_if_not(chars.begin(), chars.end(), utf8::is_space);
  if (std::any_of(first_text, chars.end(), utf8::is_space)) {
    return Stage::kMultiword;
  }
  if (chars.size() == 1) return Stage::kCharacter;
  if (words.count(normalize::ascii_lower(utf8::encode(chars)))) {
    return Stage::kWord;
  }
  return Stage::kSubword;
}

const std::vector<std::size_t>& default_sizes() {
  static const std::vector<std::size_t> sizes = {100,  700,   1000,  2000,
                                                 5000, 10000, 20000, 30000};
  return sizes;
}

const std::string& default_probe() {
  static const std::string probe =
      "Alice was beginning to get very tired of sitting by her sister on the "
      "bank, and of having nothing to do: once or twice she had peeped into "
      "the book her sister was reading, but it had no pictures or "
      "conversations in it, 'and what is the use of a book,' thought Alice "
      "'without pictures or conversations?'";
  return probe;
}

std::string ensure_probe_in_corpus(std::string_view corpus,
                                   std::string_view probe) {
  std::string out(corpus);
  if (out.find(probe) == std::string::npos) {
    if (!out.empty() && out.back() != '\n') out.push_back('\n');
    out.append(probe);
  }
  return out;
}

std::vector<SweepPoint> run_sweep(std::string_view corpus,
                                  const std::vector<std::size_t>& sizes,
                                  std::string_view probe,
                                  const std::set<std::string>& words,
                                  const std::vector<std::string>& specials) {
  if (sizes.empty()) throw std::invalid_argument("no sweep sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) {
      throw std::invalid_argument("sweep sizes must be strictly ascending");
    }
  }
  if (probe.empty()) throw std::invalid_argument("empty probe");
  if (corpus.find(probe) == std::string_view::npos) {
    throw std::invalid_argument("probe text does not occur in the corpus");
  }

  const bpe::BpeModel full = bpe::train(corpus, sizes.back(), specials);
  std::vector<SweepPoint> points;
  for (std::size_t size : sizes) {
    const bpe::BpeModel model = full.truncated(size);
    SweepPoint p;
    p.vocab_size = size;
    p.achieved_vocab_size = model.vocab_size();
    p.probe_tokens = model.encode(probe);
    p.max_token_length = model.max_token_length();
    std::set<std::string> distinct(p.probe_tokens.surface.begin(),
                                   p.probe_tokens.surface.end());
    p.distinct_tokens = distinct.size();
    std::size_t chars = 0;
    for (const auto& t : p.probe_tokens.surface) chars += utf8::length(t);
    p.mean_token_length = static_cast<double>(chars) /
                          static_cast<double>(p.probe_tokens.size());
    p.mean_count_per_token = static_cast<double>(p.probe_tokens.size()) /
                             static_cast<double>(p.distinct_tokens);
    for (Stage s : {Stage::kCharacter, Stage::kSubword, Stage::kWord,
                    Stage::kMultiword}) {
      p.stage_histogram[s] = 0;
    }
    for (const auto& t : distinct) ++p.stage_histogram[classify_token_stage(t, words)];
    points.push_back(std::move(p));
  }
  return points;
}

void write_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "size,achieved_vocab_size,probe_token_count,distinct_tokens,"
         "mean_token_length,mean_count_per_token,max_token_length,"
         "character,subword,word,multiword\n";
  out << std::setprecision(6) << std::fixed;
  for (const auto& p : points) {
    out << p.vocab_size << ',' << p.achieved_vocab_size << ','
        << p.probe_tokens.size() << ',' << p.distinct_tokens << ','
        << p.mean_token_length << ',' << p.mean_count_per_token << ','
        << p.max_token_length;
    for (Stage s : {Stage::kCharacter, Stage::kSubword, Stage::kWord,
                    Stage::kMultiword}) {
      out << ',' << p.stage_histogram.at(s);
    }
    out << '\n';
  }
}

void write_tokens_json(std::ostream& out, const std::vector<SweepPoint>& points) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& p : points) {
    doc[std::to_string(p.vocab_size)] = p.probe_tokens.surface;
  }
  out << doc.dump(1) << '\n';
}

}  // namespace toklab::sweep
