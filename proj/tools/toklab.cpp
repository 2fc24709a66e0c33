// toklab: command-line pipelines over the toklab library.
//
// Every subcommand writes its data files plus manifest.json into --out. The
// manifest records input digests, the full configuration and the seed, and
// carries no timestamps, so a re-run with the same inputs is byte-identical.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "toklab/bpe.hpp"
#include "toklab/categorize.hpp"
#include "toklab/digest.hpp"
#include "toklab/error.hpp"
#include "toklab/inclusion.hpp"
#include "toklab/lexicon.hpp"
#include "toklab/normalize.hpp"
#include "toklab/sweep.hpp"
#include "toklab/trajectory.hpp"
#include "toklab/vocab.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace toklab;

namespace {

constexpr const char* kVersion = "0.1.0";

// Thrown for bad flag combinations found after parsing; exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owns the output directory of one run and its manifest.
class Run {
 public:
  Run(std::string subcommand, fs::path out, std::uint64_t seed)
      : subcommand_(std::move(subcommand)), out_(std::move(out)), seed_(seed) {
    fs::create_directories(out_);
  }

  json& config() { return config_; }
  json& summary() { return summary_; }

  void input(const fs::path& path, const std::string& role) {
    inputs_.push_back({{"role", role}, {"path", path.string()},
                       {"sha256", sha256_file(path)}});
  }

  void output(const std::string& name, const std::string& bytes) {
    const fs::path path = out_ / name;
    fs::create_directories(path.parent_path());
    write_file(path, bytes);
    outputs_.push_back({{"path", name}, {"sha256", sha256_hex(bytes)}});
  }

  void output_json(const std::string& name, const json& doc) {
    output(name, doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
  }

  void finish() const {
    json manifest;
    manifest["tool"] = "toklab";
    manifest["versions"] = {
        {"toklab", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                      std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    manifest["subcommand"] = subcommand_;
    manifest["seed"] = seed_;
    manifest["config"] = config_;
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    if (!summary_.is_null()) manifest["summary"] = summary_;
    write_file(out_ / "manifest.json",
               manifest.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
  }

 private:
  std::string subcommand_;
  fs::path out_;
  std::uint64_t seed_;
  json config_ = json::object();
  json summary_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << v;
  return s.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Files named on the command line; directories contribute their regular
// files in name order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    if (fs::is_directory(a)) {
      std::vector<fs::path> inner;
      for (const auto& e : fs::directory_iterator(a)) {
        if (e.is_regular_file()) inner.push_back(e.path());
      }
      std::sort(inner.begin(), inner.end());
      out.insert(out.end(), inner.begin(), inner.end());
    } else {
      out.emplace_back(a);
    }
  }
  if (out.empty()) throw UsageError("no vocabulary files given");
  return out;
}

struct VocabOptions {
  std::vector<std::string> paths;
  std::string format = "auto";
  std::string utf8 = "strict";
};

void add_vocab_options(CLI::App* sub, VocabOptions& o) {
  sub->add_option("--vocab", o.paths, "Vocabulary files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  sub->add_option("--format", o.format,
                  "auto, line_per_token, token_to_id_map or base64_rank")
      ->capture_default_str();
  sub->add_option("--utf8", o.utf8, "strict or replace")->capture_default_str();
}

std::vector<vocab::VocabularyFile> load_vocabs(const VocabOptions& o, Run& run) {
  if (o.utf8 != "strict" && o.utf8 != "replace") {
    throw UsageError("--utf8 must be strict or replace");
  }
  const auto policy =
      o.utf8 == "replace" ? vocab::Utf8Policy::kReplace : vocab::Utf8Policy::kStrict;
  std::optional<vocab::Format> fixed_format;
  if (o.format != "auto") {
    try {
      fixed_format = vocab::parse_format(o.format);
    } catch (const vocab::UnknownFormat& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<vocab::VocabularyFile> files;
  std::set<std::string> names;
  for (const auto& path : expand_inputs(o.paths)) {
    const auto format = fixed_format.value_or(vocab::guess_format(path));
    run.input(path, "vocab");
    auto f = vocab::load_vocab_file(path, format, policy);
    f.name = path.filename().string();
    if (!names.insert(f.name).second) {
      throw UsageError("two vocabulary files are named '" + f.name + "'");
    }
    files.push_back(std::move(f));
  }
  run.config()["vocab_format"] = o.format;
  run.config()["utf8"] = o.utf8;
  return files;
}

struct LexiconInput {
  lexicon::ListPaths paths;
  lexicon::Lexicon lexicon;
  bool present = false;
};

LexiconInput load_lists(const std::string& dir, Run& run) {
  LexiconInput in;
  run.config()["lists"] = dir;
  if (dir.empty()) return in;
  in.paths = lexicon::ListPaths::from_directory(dir);
  in.present = true;
  auto note = [&run](const std::optional<fs::path>& p, const char* role) {
    if (p) run.input(*p, role);
  };
  note(in.paths.csw19, "csw19");
  note(in.paths.s2, "s2");
  note(in.paths.affixes, "affixes");
  note(in.paths.function_words, "function_words");
  note(in.paths.iconicity, "iconicity");
  for (const auto& p : in.paths.bad_words) run.input(p, "bad_words");
  in.lexicon = lexicon::load_lexicon(in.paths);
  return in;
}

// Category lists in the cleaned lowercase space that tokens are matched in.
std::vector<std::pair<std::string, std::set<std::string>>> category_lists(
    const lexicon::Lexicon& lex) {
  auto clean = [](const auto& words) {
    std::set<std::string> out;
    for (const auto& w : words) {
      std::string c = normalize::ascii_lower(normalize::clean_aggressive(w));
      if (!c.empty()) out.insert(std::move(c));
    }
    return out;
  };
  std::set<std::string> csw;
  for (const auto& e : lex.csw19) csw.insert(e.word);
  const auto expansion = lexicon::expand_affixed_forms(lex.csw19);

  std::vector<std::pair<std::string, std::set<std::string>>> lists;
  auto add = [&lists](std::string name, std::set<std::string> entries) {
    if (!entries.empty()) lists.emplace_back(std::move(name), std::move(entries));
  };
  add("morphemes", lex.master_morphemes);
  add("affixes", clean(lex.affixes));
  add("function_words", clean(lex.function_words));
  add("csw19", clean(csw));
  add("csw19_base_words", clean(expansion.base_words));
  add("s2", clean(lex.s2));
  for (lexicon::PosTag tag : lexicon::kAllPosTags) {
    std::set<std::string> words;
    for (const auto& [w, tags] : lex.words_pos) {
      if (tags.count(tag)) words.insert(w);
    }
    add("pos_" + std::string(lexicon::pos_name(tag)), clean(words));
  }
  add("bad_words", clean(lex.bad_words));
  add("iconicity", clean([&lex] {
        std::set<std::string> s;
        for (const auto& [w, score] : lex.iconicity) s.insert(w);
        return s;
      }()));
  return lists;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string corpus;
  std::size_t vocab_size = 0;
  std::vector<std::string> specials = bpe::default_specials();
  std::string out;
};

int cmd_train(const TrainArgs& a, std::uint64_t seed) {
  Run run("train", a.out, seed);
  run.input(a.corpus, "corpus");
  run.config()["vocab_size"] = a.vocab_size;
  run.config()["specials"] = a.specials;
  const auto model = bpe::train(read_file(a.corpus), a.vocab_size, a.specials);
  run.output("model.txt", model.serialize());
  run.summary() = {{"achieved_vocab_size", model.vocab_size()},
                   {"alphabet", model.base_alphabet().size()},
                   {"merges", model.merges().size()},
                   {"max_token_length", model.max_token_length()}};
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string model;
  std::string text;
  std::string input;
  std::string unknown = "error";
  std::string out;
};

int cmd_encode(const EncodeArgs& a, std::uint64_t seed) {
  if (a.text.empty() == a.input.empty()) {
    throw UsageError("give exactly one of --text and --input");
  }
  if (a.unknown != "error" && a.unknown != "substitute") {
    throw UsageError("--unknown must be error or substitute");
  }
  Run run("encode", a.out, seed);
  run.input(a.model, "model");
  run.config()["unknown"] = a.unknown;
  std::string text = a.text;
  if (!a.input.empty()) {
    run.input(a.input, "text");
    text = read_file(a.input);
  } else {
    run.config()["text"] = a.text;
  }
  const auto model = bpe::BpeModel::deserialize(read_file(a.model));
  const auto seq = model.encode(text, a.unknown == "substitute"
                                          ? bpe::UnknownPolicy::kSubstitute
                                          : bpe::UnknownPolicy::kError);
  run.output_json("tokens.json", {{"count", seq.size()}, {"ids", seq.ids},
                                  {"surface", seq.surface}});
  run.summary() = {{"tokens", seq.size()}};
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string corpus;
  std::vector<std::size_t> sizes = sweep::default_sizes();
  std::string probe_file;
  std::string words;
  std::string lists;
  bool save_models = false;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, std::uint64_t seed) {
  Run run("sweep", a.out, seed);
  run.input(a.corpus, "corpus");
  std::string probe = sweep::default_probe();
  if (!a.probe_file.empty()) {
    run.input(a.probe_file, "probe");
    probe = read_file(a.probe_file);
    while (!probe.empty() && (probe.back() == '\n' || probe.back() == '\r')) probe.pop_back();
  }
  std::set<std::string> words;
  if (!a.words.empty()) {
    run.input(a.words, "words");
    for (const auto& w : lexicon::load_word_list(a.words)) words.insert(w);
    run.config()["lists"] = "";
  } else {
    words = load_lists(a.lists, run).lexicon.word_set();
  }
  if (words.empty()) {
    std::cerr << "toklab: no word list given; no token will be classed as a word\n";
  }
  run.config()["sizes"] = a.sizes;
  run.config()["probe"] = probe;
  run.config()["words"] = a.words;

  const std::string corpus = read_file(a.corpus);
  const std::string trained_on = sweep::ensure_probe_in_corpus(corpus, probe);
  run.config()["probe_appended"] = trained_on.size() != corpus.size();
  const auto points = sweep::run_sweep(trained_on, a.sizes, probe, words);

  std::ostringstream csv, tokens;
  sweep::write_csv(csv, points);
  sweep::write_tokens_json(tokens, points);
  run.output("sweep.csv", csv.str());
  run.output("sweep_tokens.json", tokens.str());
  if (a.save_models) {
    const auto full = bpe::train(trained_on, a.sizes.back());
    for (std::size_t size : a.sizes) {
      run.output("models/bpe_" + std::to_string(size) + ".txt",
                 full.truncated(size).serialize());
    }
  }
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  VocabOptions vocab;
  bool tsv = false;
  std::string out;
};

int cmd_ingest(const IngestArgs& a, std::uint64_t seed) {
  Run run("ingest", a.out, seed);
  const auto files = load_vocabs(a.vocab, run);
  run.config()["tsv"] = a.tsv;

  std::ostringstream manifest;
  vocab::write_manifest(manifest, files, vocab::detect_duplicates(files));
  run.output("vocab_manifest.json", manifest.str());

  std::ostringstream problems;
  problems << "file\tline\treason\traw\n";
  std::vector<std::vector<std::string>> lists;
  json per_file = json::array();
  for (const auto& f : files) {
    for (const auto& p : f.problems) {
      problems << normalize::escape_field(f.name) << '\t' << p.line << '\t' << p.reason
               << '\t' << normalize::escape_field(p.raw) << '\n';
    }
    const auto c = normalize::count_clean(f.tokens);
    per_file.push_back({{"name", f.name}, {"raw", c.raw}, {"cleaned", c.cleaned},
                        {"unique_cased", c.unique_cased},
                        {"unique_lower", c.unique_lower}});
    lists.push_back(f.tokens);
    if (a.tsv) {
      std::ostringstream tsv;
      normalize::write_tsv(tsv, normalize::make_records(f.tokens));
      run.output("tokens/" + f.name + ".tsv", tsv.str());
    }
  }
  run.output("problems.tsv", problems.str());
  const auto all = normalize::count_clean(lists);
  run.output_json("clean_counts.json",
                  {{"files", per_file},
                   {"union", {{"raw", all.raw}, {"cleaned", all.cleaned},
                              {"unique_cased", all.unique_cased},
                              {"unique_lower", all.unique_lower}}}});
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- audit

struct AuditArgs {
  VocabOptions vocab;
  std::string lists;
  bool canonical = false;
  std::string proper_noun_rule = "initial";
  std::size_t min_len = 3;
  std::size_t top_k = 20;
  std::string out;
};

int cmd_audit(const AuditArgs& a, std::uint64_t seed) {
  if (a.proper_noun_rule != "initial" && a.proper_noun_rule != "strict") {
    throw UsageError("--proper-nouns must be initial or strict");
  }
  if (a.min_len < 3) throw UsageError("--min-len must be at least 3");
  Run run("audit", a.out, seed);
  const auto files = load_vocabs(a.vocab, run);
  const auto lex = load_lists(a.lists, run);
  run.config()["canonical_lists"] = a.canonical;
  run.config()["proper_nouns"] = a.proper_noun_rule;
  run.config()["min_len"] = a.min_len;
  run.config()["top_k"] = a.top_k;
  const auto rule = a.proper_noun_rule == "strict" ? categorize::ProperNounRule::kStrict
                                                   : categorize::ProperNounRule::kInitialCapital;
  const auto lists = category_lists(lex.lexicon);

  std::ostringstream cat_csv;
  cat_csv << "category,file,count,fraction_of_clean,fraction_of_raw,coverage_of_list\n";
  std::set<std::string> union_lower, union_cased;
  json shapes = json::array();
  json lengths = json::object();
  for (const auto& f : files) {
    const auto lower = categorize::clean_lower_set(f);
    const auto cased = categorize::clean_cased_set(f);
    union_lower.insert(lower.begin(), lower.end());
    union_cased.insert(cased.begin(), cased.end());
    const double raw = static_cast<double>(f.tokens.size());
    for (const auto& [name, list] : lists) {
      const auto r = categorize::match_category(name, lower, list);
      cat_csv << name << ',' << csv_field(f.name) << ',' << r.matched.size() << ','
              << fixed(r.coverage_of_vocab) << ','
              << fixed(raw == 0 ? 0.0 : r.matched.size() / raw) << ','
              << fixed(r.coverage_of_list) << '\n';
    }
    const auto groups = categorize::case_variant_groups(cased);
    shapes.push_back({{"file", f.name},
                      {"raw", f.tokens.size()},
                      {"clean_cased", cased.size()},
                      {"clean_lower", lower.size()},
                      {"proper_noun_candidates",
                       categorize::proper_noun_candidates(cased, rule).size()},
                      {"all_caps", categorize::all_caps_tokens(cased).size()},
                      {"case_variant_groups", groups.size()},
                      {"tokens_in_case_groups", categorize::tokens_in_groups(groups)},
                      {"redundant_case_variants", categorize::redundant_case_variants(groups)}});
    const auto stats = categorize::vocab_length_stats(f.tokens, a.top_k);
    auto longest = [](const std::vector<categorize::LongToken>& v) {
      json out = json::array();
      for (const auto& t : v) {
        out.push_back({{"token", t.token}, {"length", t.length},
                       {"repeated_run", t.repeated_run}});
      }
      return out;
    };
    json hist = json::object();
    for (const auto& [len, n] : stats.histogram) hist[std::to_string(len)] = n;
    lengths[f.name] = {{"histogram", hist},
                       {"longest", longest(stats.longest)},
                       {"longest_nonrepeating", longest(stats.longest_nonrepeating)}};
  }
  for (const auto& [name, list] : lists) {
    const auto r = categorize::match_category(name, union_lower, list);
    cat_csv << name << ",*," << r.matched.size() << ',' << fixed(r.coverage_of_vocab)
            << ",," << fixed(r.coverage_of_list) << '\n';
  }
  run.output("categories.csv", cat_csv.str());
  run.output_json("token_shapes.json", shapes);
  run.output_json("lengths.json", lengths);

  json union_shape = {
      {"clean_cased", union_cased.size()},
      {"clean_lower", union_lower.size()},
      {"proper_noun_candidates", categorize::proper_noun_candidates(union_cased, rule).size()},
      {"all_caps", categorize::all_caps_tokens(union_cased).size()}};

  if (!lex.lexicon.bad_words.empty()) {
    const auto bad = categorize::bad_word_scan(files, lex.lexicon.bad_words);
    std::ostringstream bad_csv;
    bad_csv << "file,count\n";
    for (const auto& [file, n] : bad.per_file_counts) bad_csv << csv_field(file) << ',' << n << '\n';
    run.output("bad_words.csv", bad_csv.str());

    std::vector<std::string> tokens(union_cased.begin(), union_cased.end());
    json suspects = json::object();
    for (const auto& [token, hit] :
         categorize::substring_suspect_scan(tokens, lex.lexicon.bad_words, a.min_len)) {
      suspects[token] = {{"containing", hit.containing}, {"all_caps", hit.all_caps}};
    }
    run.output_json("suspects.json", suspects);
    union_shape["bad_word_hits"] = bad.matched.size();
    union_shape["bad_word_list"] = bad.list_size;
  }

  bool canonical_failed = false;
  if (lex.present) {
    json checks = json::array();
    for (const auto& c : lexicon::canonical_count_checks(lex.lexicon, lex.paths)) {
      checks.push_back({{"name", c.name}, {"expected", c.expected}, {"actual", c.actual},
                        {"available", c.available}, {"pass", c.pass()}});
      if (a.canonical && c.available && !c.pass()) {
        canonical_failed = true;
        std::cerr << "toklab: canonical count '" << c.name << "' is " << c.actual
                  << ", expected " << c.expected << '\n';
      }
    }
    run.output_json("count_checks.json", checks);
  }
  run.summary() = union_shape;
  run.finish();
  return canonical_failed ? 2 : 0;
}

// ---------------------------------------------------------------- inclusion

struct InclusionArgs {
  VocabOptions vocab;
  std::string mode = "clean_lower";
  std::string lists;
  std::size_t top_k = 500;
  std::string zipf_corpus;
  std::string zipf_model;
  std::string out;
};

std::vector<categorize::CategoryReport> table_categories(
    const inclusion::InclusionTable& table, const lexicon::Lexicon& lex) {
  std::vector<categorize::CategoryReport> reports;
  categorize::CategoryReport all;
  all.category = "all_tokens";
  for (const auto& [token, idx] : table.membership()) all.matched.push_back(token);
  reports.push_back(all);
  for (const auto& [name, list] : category_lists(lex)) {
    categorize::CategoryReport r;
    r.category = name;
    r.list_size = list.size();
    for (const auto& [token, idx] : table.membership()) {
      if (list.count(normalize::ascii_lower(normalize::clean_aggressive(token)))) {
        r.matched.push_back(token);
      }
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string averages_csv(const std::vector<inclusion::CategoryAverage>& rows) {
  std::ostringstream out;
  out << "category,tokens,mean_files,mean_length\n";
  for (const auto& r : rows) {
    out << r.category << ',' << r.tokens << ',' << fixed(r.mean_files) << ','
        << fixed(r.mean_length) << '\n';
  }
  return out.str();
}

int cmd_inclusion(const InclusionArgs& a, std::uint64_t seed) {
  if (a.zipf_corpus.empty() != a.zipf_model.empty()) {
    throw UsageError("--zipf-corpus and --zipf-model go together");
  }
  if (a.top_k < 1) throw UsageError("--top-k must be at least 1");
  inclusion::Mode mode;
  try {
    mode = inclusion::parse_mode(a.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Run run("inclusion", a.out, seed);
  const auto files = load_vocabs(a.vocab, run);
  const auto lex = load_lists(a.lists, run);
  run.config()["mode"] = a.mode;
  run.config()["top_k"] = a.top_k;

  const auto table = inclusion::InclusionTable::build(files, mode);
  const auto by_count = table.tokens_by_count();
  std::ostringstream portion;
  portion << "count,tokens,portion\n";
  const auto series = inclusion::portion_by_count(table);
  for (const auto& [count, share] : series) {
    const auto c = static_cast<std::size_t>(count);
    portion << c << ',' << (by_count.count(c) ? by_count.at(c) : 0) << ','
            << fixed(share, 9) << '\n';
  }
  run.output("portion_by_count.csv", portion.str());

  json fit;
  try {
    const auto d = inclusion::fit_decay(series);
    fit = {{"rate", d.rate}, {"intercept", d.intercept}, {"residual", d.residual},
           {"points", d.points}};
  } catch (const DegenerateSeries& e) {
    fit = {{"error", e.what()}};
  }
  run.output_json("decay_fit.json", fit);

  std::ostringstream lengths;
  lengths << "count,tokens,mean_length,longest\n";
  for (const auto& r : inclusion::length_by_inclusion(table)) {
    lengths << r.count << ',' << r.tokens << ',' << fixed(r.mean_length) << ','
            << csv_field(r.longest) << '\n';
  }
  run.output("length_by_inclusion.csv", lengths.str());

  const auto reports = table_categories(table, lex.lexicon);
  run.output("category_averages.csv",
             averages_csv(inclusion::category_file_averages(table, reports)));
  run.output("category_averages_top" + std::to_string(a.top_k) + ".csv",
             averages_csv(inclusion::truncated_category_averages(table, reports, a.top_k)));
  if (!lex.lexicon.master_morphemes.empty()) {
    std::set<std::string> reference;
    for (const auto& [token, idx] : table.membership()) {
      if (lex.lexicon.master_morphemes.count(
              normalize::ascii_lower(normalize::clean_aggressive(token)))) {
        reference.insert(token);
      }
    }
    std::ostringstream morph;
    morph << "count,portion_morphemes\n";
    for (const auto& [count, share] : inclusion::portion_in_reference(table, reference)) {
      morph << static_cast<std::size_t>(count) << ',' << fixed(share, 9) << '\n';
    }
    run.output("morpheme_portion_by_count.csv", morph.str());
  }

  json summary = {{"tokens", table.size()}, {"files", table.file_count()},
                  {"mean_count", table.mean_count()}};
  if (!a.zipf_corpus.empty()) {
    run.input(a.zipf_corpus, "zipf_corpus");
    run.input(a.zipf_model, "zipf_model");
    const auto model = bpe::BpeModel::deserialize(read_file(a.zipf_model));
    const auto seq = model.encode(read_file(a.zipf_corpus), bpe::UnknownPolicy::kSubstitute);
    const auto z = inclusion::zipf_check(inclusion::frequencies(seq.surface));
    run.output_json("zipf.json", {{"slope", z.slope}, {"intercept", z.intercept},
                                  {"types", z.types}, {"tokens", seq.size()}});
    summary["zipf_slope"] = z.slope;
  }
  run.summary() = summary;
  run.finish();
  return 0;
}

// ---------------------------------------------------------------- trajectory

struct TrajectoryArgs {
  std::string in;
  std::size_t k = 50;
  std::string epsilon = "auto";
  std::size_t min_points = 5;
  std::string projection = "pca2";
  std::string points;
  bool per_layer = false;
  std::size_t sample = 10;
  std::size_t window = 10;
  std::string out;
};

int cmd_trajectory(const TrajectoryArgs& a, std::uint64_t seed) {
  if (a.projection != "pca2" && a.projection != "external") {
    throw UsageError("--projection must be pca2 or external");
  }
  if (a.projection == "external" && a.points.empty()) {
    throw UsageError("--projection external needs --points");
  }
  std::optional<double> epsilon;
  if (a.epsilon != "auto") {
    try {
      std::size_t used = 0;
      epsilon = std::stod(a.epsilon, &used);
      if (used != a.epsilon.size() || !(*epsilon > 0)) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("--epsilon must be auto or a positive number");
    }
  }
  if (a.min_points < 1) throw UsageError("--min-points must be at least 1");
  if (a.k < 1) throw UsageError("--k must be at least 1");

  Run run("trajectory", a.out, seed);
  run.input(a.in, "trajectories");
  const auto tensors = trajectory::load_trajectories(a.in);
  if (tensors.size() < 2) throw Error("need at least two trajectories");
  const Eigen::MatrixXd data = trajectory::stack_flattened(tensors);
  const std::size_t k = std::min<std::size_t>(
      a.k, std::min<std::size_t>(tensors.size() - 1, static_cast<std::size_t>(data.cols())));
  if (k != a.k) {
    std::cerr << "toklab: --k " << a.k << " reduced to " << k << " for this data\n";
  }
  run.config()["k"] = a.k;
  run.config()["k_effective"] = k;
  run.config()["epsilon"] = a.epsilon;
  run.config()["min_points"] = a.min_points;
  run.config()["projection"] = a.projection;
  run.config()["per_layer"] = a.per_layer;
  run.config()["sample"] = a.sample;
  run.config()["window"] = a.window;

  const auto pca = trajectory::pca_reduce(data, k);
  std::vector<double> explained(pca.explained_variance.data(),
                                pca.explained_variance.data() + pca.explained_variance.size());
  json pca_doc = {{"instances", tensors.size()},
                  {"layers", tensors.front().layers()},
                  {"dim", tensors.front().dim()},
                  {"k", k},
                  {"explained_variance", explained},
                  {"total_variance", pca.total_variance},
                  {"explained_fraction", pca.explained_fraction()},
                  {"positive_components", pca.positive_components},
                  {"rank_deficient", pca.rank_deficient}};
  if (a.per_layer) {
    const std::size_t layer_k = std::min<std::size_t>(
        k, std::min<std::size_t>(tensors.size() - 1, tensors.front().dim()));
    json layers = json::array();
    for (const auto& r : trajectory::per_layer_pca(tensors, layer_k)) {
      layers.push_back({{"explained_fraction", r.explained_fraction()},
                        {"rank_deficient", r.rank_deficient}});
    }
    pca_doc["per_layer"] = layers;
  }
  run.output_json("pca.json", pca_doc);

  Eigen::MatrixXd points;
  if (a.projection == "pca2") {
    points = trajectory::project_pca2(pca.scores);
  } else {
    run.input(a.points, "points");
    points = trajectory::load_external_points(a.points, tensors.size());
  }
  const double eps = epsilon ? *epsilon : trajectory::default_epsilon(points, seed);
  const auto map = trajectory::cluster(points, eps, a.min_points);

  std::ostringstream csv;
  csv << std::setprecision(17) << "instance_id,x,y,label\n";
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    csv << csv_field(tensors[i].instance_id) << ',' << points(i, 0) << ',' << points(i, 1)
        << ',' << map.labels[i] << '\n';
  }
  run.output("clusters.csv", csv.str());

  json clusters = json::array();
  json samples = json::object();
  for (int c = 0; c < map.cluster_count(); ++c) {
    clusters.push_back({{"label", c}, {"size", map.members(c).size()}});
    json list = json::array();
    for (const auto& s : trajectory::sample_cluster(map, tensors, c, a.sample, a.window,
                                                    seed + static_cast<std::uint64_t>(c))) {
      list.push_back({{"index", s.index}, {"instance_id", s.instance_id},
                      {"snippet", s.snippet}});
    }
    samples[std::to_string(c)] = list;
  }
  const auto noise = static_cast<std::size_t>(
      std::count(map.labels.begin(), map.labels.end(), -1));
  run.output_json("cluster_summary.json", {{"epsilon", eps},
                                           {"min_points", a.min_points},
                                           {"clusters", clusters},
                                           {"noise", noise}});
  run.output_json("samples.json", samples);
  run.summary() = {{"clusters", map.cluster_count()}, {"noise", noise},
                   {"explained_fraction", pca.explained_fraction()}};
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tokenization laboratory: BPE sweeps, vocabulary audits, trajectory maps"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for sampled steps")->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a character-level BPE model");
  train_cmd->add_option("--corpus", train.corpus)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--vocab-size", train.vocab_size)->required()->check(CLI::PositiveNumber);
  train_cmd->add_option("--specials", train.specials, "Comma-separated special tokens")
      ->delimiter(',');
  train_cmd->add_option("--out", train.out)->required();

  EncodeArgs encode;
  auto* encode_cmd = app.add_subcommand("encode", "Encode text with a trained model");
  encode_cmd->add_option("--model", encode.model)->required()->check(CLI::ExistingFile);
  encode_cmd->add_option("--text", encode.text);
  encode_cmd->add_option("--input", encode.input)->check(CLI::ExistingFile);
  encode_cmd->add_option("--unknown", encode.unknown, "error or substitute")
      ->capture_default_str();
  encode_cmd->add_option("--out", encode.out)->required();

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Vocabulary-size sweep over a probe text");
  sweep_cmd->add_option("--corpus", sw.corpus)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--sizes", sw.sizes, "Ascending vocabulary sizes")->delimiter(',');
  sweep_cmd->add_option("--probe-file", sw.probe_file)->check(CLI::ExistingFile);
  sweep_cmd->add_option("--words", sw.words, "Word list for stage classes")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--lists", sw.lists, "Lexicon directory")
      ->envname("TOKLAB_LEXICON_DIR")
      ->check(CLI::ExistingDirectory);
  sweep_cmd->add_flag("--save-models", sw.save_models);
  sweep_cmd->add_option("--out", sw.out)->required();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load vocabularies, find problems and duplicates");
  add_vocab_options(ingest_cmd, ingest.vocab);
  ingest_cmd->add_flag("--tsv", ingest.tsv, "Dump raw/stripped/clean forms per file");
  ingest_cmd->add_option("--out", ingest.out)->required();

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Match vocabularies against word lists");
  add_vocab_options(audit_cmd, audit.vocab);
  audit_cmd->add_option("--lists", audit.lists, "Lexicon directory")
      ->envname("TOKLAB_LEXICON_DIR")
      ->check(CLI::ExistingDirectory);
  audit_cmd->add_flag("--canonical-lists", audit.canonical,
                      "Fail when published list sizes are not reproduced");
  audit_cmd->add_option("--proper-nouns", audit.proper_noun_rule, "initial or strict")
      ->capture_default_str();
  audit_cmd->add_option("--min-len", audit.min_len)->capture_default_str();
  audit_cmd->add_option("--top-k", audit.top_k)->capture_default_str();
  audit_cmd->add_option("--out", audit.out)->required();

  InclusionArgs incl;
  auto* incl_cmd = app.add_subcommand("inclusion", "File-inclusion statistics");
  add_vocab_options(incl_cmd, incl.vocab);
  incl_cmd->add_option("--mode", incl.mode, "raw, clean or clean_lower")->capture_default_str();
  incl_cmd->add_option("--lists", incl.lists, "Lexicon directory")
      ->envname("TOKLAB_LEXICON_DIR")
      ->check(CLI::ExistingDirectory);
  incl_cmd->add_option("--top-k", incl.top_k)->capture_default_str();
  incl_cmd->add_option("--zipf-corpus", incl.zipf_corpus)->check(CLI::ExistingFile);
  incl_cmd->add_option("--zipf-model", incl.zipf_model)->check(CLI::ExistingFile);
  incl_cmd->add_option("--out", incl.out)->required();

  TrajectoryArgs traj;
  auto* traj_cmd = app.add_subcommand("trajectory", "PCA, projection and clustering of trajectories");
  traj_cmd->add_option("--in", traj.in)->required()->check(CLI::ExistingFile);
  traj_cmd->add_option("--k", traj.k)->capture_default_str();
  traj_cmd->add_option("--epsilon", traj.epsilon, "auto or a distance")->capture_default_str();
  traj_cmd->add_option("--min-points", traj.min_points)->capture_default_str();
  traj_cmd->add_option("--projection", traj.projection, "pca2 or external")
      ->capture_default_str();
  traj_cmd->add_option("--points", traj.points, "CSV of x,y for external projection")
      ->check(CLI::ExistingFile);
  traj_cmd->add_flag("--per-layer", traj.per_layer);
  traj_cmd->add_option("--sample", traj.sample)->capture_default_str();
  traj_cmd->add_option("--window", traj.window)->capture_default_str();
  traj_cmd->add_option("--out", traj.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train, seed);
    if (encode_cmd->parsed()) return cmd_encode(encode, seed);
    if (sweep_cmd->parsed()) return cmd_sweep(sw, seed);
    if (ingest_cmd->parsed()) return cmd_ingest(ingest, seed);
    if (audit_cmd->parsed()) return cmd_audit(audit, seed);
    if (incl_cmd->parsed()) return cmd_inclusion(incl, seed);
    if (traj_cmd->parsed()) return cmd_trajectory(traj, seed);
  } catch (const UsageError& e) {
    std::cerr << "toklab: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "toklab: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "toklab: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
