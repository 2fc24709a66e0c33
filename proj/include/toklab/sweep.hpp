#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toklab/bpe.hpp"

namespace toklab::sweep {

enum class Stage { kCharacter, kSubword, kWord, kMultiword };

std::string_view stage_name(Stage stage);

// One leading space is dropped first. Then: a single code point is a
// character; an interior space makes a multiword; a lowercase form (trailing
// whitespace trimmed) found in `words` is a word; anything else a subword.
Stage classify_token_stage(std::string_view token,
                           const std::set<std::string>& words);

struct SweepPoint {
  std::size_t vocab_size = 0;           // requested target
  std::size_t achieved_vocab_size = 0;  // may be lower if pairs ran out
  bpe::TokenSequence probe_tokens;
  std::size_t distinct_tokens = 0;
  double mean_token_length = 0;     // code points per probe token
  double mean_count_per_token = 0;  // probe tokens per distinct token
  std::size_t max_token_length = 0;  // over the whole model vocabulary
  std::map<Stage, std::size_t> stage_histogram;  // over distinct probe tokens
};

const std::vector<std::size_t>& default_sizes();
const std::string& default_probe();

// Appends the probe on its own line when the corpus lacks it.
std::string ensure_probe_in_corpus(std::string_view corpus,
                                   std::string_view probe);

// Trains once at the largest size and truncates for the others.
std::vector<SweepPoint> run_sweep(
    std::string_view corpus, const std::vector<std::size_t>& sizes,
    std::string_view probe, const std::set<std::string>& words,
    const std::vector<std::string>& specials = bpe::default_specials());

// size, probe_token_count, distinct, mean_token_length,
// mean_count_per_token, max_token_length, one column per stage.
void write_csv(std::ostream& out, const std::vector<SweepPoint>& points);
// {"<size>": [token, ...], ...} in size order.
void write_tokens_json(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace toklab::sweep
