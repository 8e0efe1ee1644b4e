// sstune: build self-supervised multiple-choice datasets, render zero-shot
// task inputs, and score classifier logits.
//
//   sstune generate --seed 7 --articles wiki.jsonl --flat reviews.jsonl --out data/
//   sstune render   --task sst2.json --input test.jsonl --output rendered.jsonl
//   sstune eval     --logits logits.jsonl --n-l 2
//   sstune inspect  data/tuning-00000.jsonl
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sstune/sstune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct GenerateArgs {
  std::string config;
  std::vector<std::string> articles;
  std::vector<std::string> flat;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> objective;
  std::optional<std::size_t> n_model;
  std::optional<std::size_t> n_max_label;
  std::optional<std::size_t> hard_negatives;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> shard_size;
  std::optional<double> validation_fraction;
  std::optional<std::size_t> per_corpus_quota;
  std::optional<std::size_t> max_paragraphs;
  std::optional<std::size_t> max_per_category;
  std::optional<double> max_error_rate;
};

struct RenderArgs {
  std::string task;
  std::string input;
  std::string samples;
  std::string output;
  std::size_t n_model = 20;
  std::optional<std::string> scheme;
  std::vector<std::string> symbols;
  sstune::MarkerSet markers;
};

struct EvalArgs {
  std::string logits;
  std::size_t n_l = 0;
  std::string task;
  std::string report;
};

struct InspectArgs {
  std::string path;
  std::size_t limit = 3;
  std::optional<std::size_t> index;
  std::string scheme = "alphabet";
};

template <typename T>
void read_key(const json& j, const char* key, T& dst) {
  if (auto it = j.find(key); it != j.end()) dst = it->get<T>();
}

template <typename T>
void read_key(const json& j, const char* key, std::optional<T>& dst) {
  if (auto it = j.find(key); it != j.end()) dst = it->get<T>();
}

// Config file values first, then command-line overrides.
sstune::RunConfig build_run_config(const GenerateArgs& args) {
  sstune::RunConfig cfg;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> articles;
  std::vector<std::string> flat;
  std::string out;
  if (!args.config.empty()) {
    std::ifstream in(args.config);
    if (!in) throw sstune::ConfigError("cannot open config " + args.config);
    json j;
    try {
      in >> j;
      if (!j.is_object()) throw sstune::ConfigError("config must hold a JSON object");
      read_key(j, "seed", seed);
      if (auto it = j.find("objective"); it != j.end())
        cfg.sampler.objective = sstune::parse_objective(it->get<std::string>());
      read_key(j, "n_model", cfg.sampler.n_model);
      read_key(j, "n_max_label", cfg.sampler.n_max_label);
      read_key(j, "hard_negatives", cfg.sampler.hard_negatives);
      read_key(j, "hard_negatives_flat", cfg.sampler.hard_negatives_flat);
      read_key(j, "validation_fraction", cfg.sampler.validation_fraction);
      read_key(j, "max_paragraphs_per_article", cfg.ingest.max_paragraphs_per_article);
      read_key(j, "max_samples_per_category", cfg.ingest.max_samples_per_category);
      read_key(j, "per_corpus_quota", cfg.ingest.per_corpus_quota);
      read_key(j, "workers", cfg.workers);
      read_key(j, "shard_size", cfg.shard_size);
      read_key(j, "max_error_rate", cfg.max_error_rate);
      read_key(j, "articles", articles);
      read_key(j, "flat", flat);
      read_key(j, "output_dir", out);
    } catch (const json::exception& e) {
      throw sstune::ConfigError("config " + args.config + ": " + e.what());
    }
  }
  if (args.seed) seed = args.seed;
  if (!seed) throw sstune::ConfigError("a seed is required (--seed or \"seed\" in the config)");
  cfg.sampler.seed = *seed;
  if (args.objective) cfg.sampler.objective = sstune::parse_objective(*args.objective);
  if (args.n_model) cfg.sampler.n_model = *args.n_model;
  if (args.n_max_label) cfg.sampler.n_max_label = *args.n_max_label;
  if (args.hard_negatives) cfg.sampler.hard_negatives = *args.hard_negatives;
  if (args.validation_fraction) cfg.sampler.validation_fraction = *args.validation_fraction;
  if (args.max_paragraphs) cfg.ingest.max_paragraphs_per_article = *args.max_paragraphs;
  if (args.max_per_category) cfg.ingest.max_samples_per_category = *args.max_per_category;
  if (args.per_corpus_quota) cfg.ingest.per_corpus_quota = args.per_corpus_quota;
  if (args.workers) cfg.workers = *args.workers;
  if (args.shard_size) cfg.shard_size = *args.shard_size;
  if (args.max_error_rate) cfg.max_error_rate = *args.max_error_rate;
  if (!args.articles.empty()) articles = args.articles;
  if (!args.flat.empty()) flat = args.flat;
  if (!args.out.empty()) out = args.out;

  for (const auto& p : articles) cfg.inputs.push_back({p, sstune::CorpusSource::article_corpus});
  for (const auto& p : flat) cfg.inputs.push_back({p, sstune::CorpusSource::flat_corpus});
  for (const auto& in : cfg.inputs)
    if (!fs::exists(in.path)) throw sstune::ConfigError("input not found: " + in.path.string());
  cfg.output_dir = out;
  cfg.validate();
  return cfg;
}

int cmd_generate(const GenerateArgs& args) {
  const auto cfg = build_run_config(args);
  const auto stats = sstune::run_generate(cfg, &std::cerr);
  std::cerr << "articles " << stats.articles << ", paragraphs " << stats.paragraphs_seen
            << ", kept " << stats.filter.count(sstune::FilterReason::kept) << ", tuning "
            << stats.tuning_samples << ", validation " << stats.validation_samples << "\n";
  return 0;
}

sstune::IndicatorScheme resolve_scheme(const std::optional<std::string>& kind,
                                       const std::vector<std::string>& symbols,
                                       const std::optional<sstune::IndicatorScheme>& fallback) {
  if (!kind) {
    if (fallback) return *fallback;
    return sstune::IndicatorScheme::alphabet();
  }
  sstune::IndicatorScheme s{sstune::parse_scheme_kind(*kind), symbols};
  if (s.kind == sstune::IndicatorScheme::Kind::custom && symbols.empty())
    throw sstune::ConfigError("--scheme custom needs --symbols");
  return s;
}

// Writes one {"input", "label"} record per line of the source.
int cmd_render(const RenderArgs& args) {
  args.markers.validate();
  if (args.task.empty() == args.samples.empty())
    throw sstune::ConfigError("render needs exactly one of --task (with --input) or --samples");

  std::ofstream file;
  if (!args.output.empty()) {
    file.open(args.output, std::ios::binary | std::ios::trunc);
    if (!file) throw sstune::DataError("cannot create " + args.output);
  }
  std::ostream& out = args.output.empty() ? std::cout : file;

  if (!args.samples.empty()) {
    const auto scheme = resolve_scheme(args.scheme, args.symbols, std::nullopt);
    for (const auto& s : sstune::read_shard(args.samples)) {
      out << sstune::dump_line({{"input", sstune::render_tuning(s, scheme, args.markers)},
                                {"label", s.label}})
          << '\n';
    }
    return 0;
  }

  if (args.input.empty()) throw sstune::ConfigError("--task needs --input");
  const auto task = sstune::read_task_file(args.task, args.n_model);
  const auto scheme = resolve_scheme(args.scheme, args.symbols, task.scheme);
  const auto n_l = task.spec.num_labels();
  const auto options = sstune::inference_options(task.spec);
  scheme.symbols(args.n_model);

  std::ifstream in(args.input);
  if (!in) throw sstune::DataError("cannot open " + args.input);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return sstune::DataError(args.input + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    if (!j.is_object()) throw fail("record is not a JSON object");
    auto text = j.find("text");
    if (text == j.end() || !text->is_string()) throw fail("missing or non-string field 'text'");
    auto label = j.find("label");
    if (label == j.end()) throw fail("missing field 'label'");
    if (!label->is_number_integer() || label->get<long long>() < 0)
      throw fail("'label' is not a non-negative integer");
    const auto value = label->get<std::size_t>();
    if (value >= n_l)
      throw fail("label " + std::to_string(value) + " >= number of classes " + std::to_string(n_l));
    out << sstune::dump_line(
               {{"input", sstune::render_input(options, text->get<std::string>(), scheme, args.markers)},
                {"label", value}})
        << '\n';
  }
  return 0;
}

int cmd_eval(const EvalArgs& args) {
  const auto records = sstune::read_logits_file(args.logits);
  const auto report = sstune::evaluate(records, args.n_l, args.task);
  std::cout << report;
  const auto record = report.to_json().dump();
  if (!args.report.empty()) {
    std::ofstream(args.report) << record << '\n';
  } else {
    std::cout << record << '\n';
  }
  return 0;
}

int cmd_inspect(const InspectArgs& args) {
  const fs::path path(args.path);
  if (fs::is_directory(path)) {
    std::ifstream in(path / "stats.json");
    if (!in) throw sstune::DataError("no stats.json in " + path.string());
    json stats;
    try {
      in >> stats;
    } catch (const json::exception& e) {
      throw sstune::DataError("stats.json: " + std::string(e.what()));
    }
    std::cout << stats.dump(2) << "\n";
    std::vector<fs::path> shards;
    for (const auto& e : fs::directory_iterator(path))
      if (e.path().extension() == ".jsonl") shards.push_back(e.path());
    std::sort(shards.begin(), shards.end());
    for (const auto& s : shards) std::cout << "shard " << s.filename().string() << "\n";
    return 0;
  }

  const auto samples = sstune::read_shard(path);
  const auto scheme = resolve_scheme(args.scheme, {}, std::nullopt);
  std::size_t begin = 0;
  std::size_t end = std::min(samples.size(), args.limit);
  if (args.index) {
    if (*args.index >= samples.size())
      throw sstune::DataError("index " + std::to_string(*args.index) + " past the " +
                              std::to_string(samples.size()) + " samples in " + path.string());
    begin = *args.index;
    end = begin + 1;
  }
  const auto symbols = scheme.symbols(samples.empty() ? 0 : samples.front().options.size());
  for (std::size_t i = begin; i < end; ++i) {
    const auto& s = samples[i];
    std::cout << "#" << i << " label=" << s.label << " (" << symbols.at(s.label) << ")"
              << " J=" << s.num_negatives() << " hard=" << s.num_hard()
              << " objective=" << sstune::to_string(s.objective)
              << " source=" << s.positive_source.article_id << "#"
              << s.positive_source.paragraph_index << "\n";
    std::cout << sstune::render_tuning(s, scheme) << "\n\n";
  }
  std::cout << samples.size() << " samples\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised multiple-choice dataset builder and zero-shot toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build tuning/validation shards from corpora");
  generate->add_option("--config", gen.config, "JSON config file; flags override its values");
  generate->add_option("--articles", gen.articles, "Article corpus (JSONL: id, paragraphs)");
  generate->add_option("--flat", gen.flat, "Flat corpus (JSONL: category, text)");
  generate->add_option("--out", gen.out, "Output directory");
  generate->add_option("--seed", gen.seed, "Random seed (required)");
  generate->add_option("--objective", gen.objective, "fsp|lsp|nss|rsp")
      ->check(CLI::IsMember({"fsp", "lsp", "nss", "rsp"}));
  generate->add_option("--n-model", gen.n_model, "Option slots per sample (default 20)");
  generate->add_option("--n-max-label", gen.n_max_label, "Max real options per sample (default 10)");
  generate->add_option("--hard-negatives", gen.hard_negatives,
                       "Same-article negatives per sample for article corpora (default 1)");
  generate->add_option("--workers", gen.workers, "Worker threads (default 1)");
  generate->add_option("--shard-size", gen.shard_size, "Records per shard (default 100000)");
  generate->add_option("--validation-fraction", gen.validation_fraction,
                       "Share of articles routed to validation (default 0)");
  generate->add_option("--per-corpus-quota", gen.per_corpus_quota,
                       "Articles sampled from each corpus (default: all)");
  generate->add_option("--max-paragraphs", gen.max_paragraphs,
                       "Paragraphs kept per article (default 5)");
  generate->add_option("--max-per-category", gen.max_per_category,
                       "Flat-corpus records kept per category (default 500000)");
  generate->add_option("--max-error-rate", gen.max_error_rate,
                       "Tolerated share of malformed records (default 0.01)");

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Render a zero-shot task dataset or a sample shard");
  render->add_option("--task", ren.task, "Task file (class_names + template or verbalizers)");
  render->add_option("--input", ren.input, "Dataset JSONL with text and label");
  render->add_option("--samples", ren.samples, "Sample shard to render instead of a task");
  render->add_option("--output", ren.output, "Output JSONL (default stdout)");
  render->add_option("--n-model", ren.n_model, "Option slots (default 20)");
  render->add_option("--scheme", ren.scheme, "alphabet|numeric|constant|custom")
      ->check(CLI::IsMember({"alphabet", "numeric", "constant", "custom"}));
  render->add_option("--symbols", ren.symbols, "Indicator symbols for --scheme custom");
  render->add_option("--cls", ren.markers.cls, "Classification marker");
  render->add_option("--sep", ren.markers.sep, "Separator marker");
  render->add_option("--pad", ren.markers.pad, "Pad marker");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Constrained prediction and accuracy over a logits file");
  eval->add_option("--logits", ev.logits, "Logits JSONL (sample_id, logits, gold_label)")->required();
  eval->add_option("--n-l", ev.n_l, "Number of task classes")->required()->check(CLI::PositiveNumber);
  eval->add_option("--task", ev.task, "Task name for the report");
  eval->add_option("--report", ev.report, "Write the JSON report here instead of stdout");

  InspectArgs ins;
  auto* inspect = app.add_subcommand("inspect", "Show samples from a shard, or a run's stats");
  inspect->add_option("path", ins.path, "Shard file or generate output directory")->required();
  inspect->add_option("--limit", ins.limit, "Samples to show (default 3)");
  inspect->add_option("--index", ins.index, "Show only this sample");
  inspect->add_option("--scheme", ins.scheme, "Indicator scheme for display")
      ->check(CLI::IsMember({"alphabet", "numeric", "constant"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*render) return cmd_render(ren);
    if (*eval) return cmd_eval(ev);
    if (*inspect) return cmd_inspect(ins);
  } catch (const sstune::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
