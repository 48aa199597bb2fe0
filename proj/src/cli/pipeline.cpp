#include "mojitalk/cli/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mojitalk/autodiff/checkpoint.hpp"
#include "mojitalk/corpus/normalize.hpp"
#include "mojitalk/eval/metrics.hpp"
#include "mojitalk/models/generate.hpp"
#include "mojitalk/util/io.hpp"
#include "mojitalk/util/random.hpp"

namespace mojitalk::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const UsageError*>(&error)) return kUsage;
  if (dynamic_cast<const InputError*>(&error)) return kUnreadableInput;
  if (dynamic_cast<const CheckpointMismatch*>(&error)) return kCheckpointMismatch;
  if (dynamic_cast<const DivergedError*>(&error)) return kDiverged;
  return kFailure;
}

namespace {

// Visits every config field as (key, member).
template <typename Config, typename F>
void visit_fields(Config& c, F&& f) {
  f("input", c.input);
  f("data", c.data);
  f("out", c.out);
  f("init", c.init);
  f("model", c.model);
  f("classifier", c.classifier);
  f("inventory", c.inventory);
  f("emoticons", c.emoticons);
  f("sources", c.sources);
  f("seed", c.seed);
  f("ascii_ratio", c.ascii_ratio);
  f("lowercase", c.lowercase);
  f("split_train", c.split_train);
  f("split_validation", c.split_validation);
  f("split_test", c.split_test);
  f("vocab_cap", c.vocab_cap);
  f("word_embed", c.word_embed);
  f("hidden", c.hidden);
  f("emoji_embed", c.emoji_embed);
  f("emoji_reduced", c.emoji_reduced);
  f("latent", c.latent);
  f("classifier_dropout", c.classifier_dropout);
  f("epochs", c.epochs);
  f("batch_size", c.batch_size);
  f("learning_rate", c.learning_rate);
  f("clip_norm", c.clip_norm);
  f("lambda", c.lambda);
  f("kl_target", c.kl_target);
  f("kl_anneal_epochs", c.kl_anneal_epochs);
  f("policy_start_epoch", c.policy_start_epoch);
  f("patience", c.patience);
  f("policy_latent", c.policy_latent);
  f("max_decode_len", c.max_decode_len);
  f("temperature", c.temperature);
  f("source", c.source);
  f("emoji", c.emoji);
  f("k", c.k);
  f("split", c.split);
  f("prior_samples", c.prior_samples);
  f("max_samples", c.max_samples);
  f("report_emojis", c.report_emojis);
  f("bar_width", c.bar_width);
}

void read_field(const json& v, const std::string& key, std::string& out) {
  if (!v.is_string()) throw UsageError("config key '" + key + "' must be a string");
  out = v.get<std::string>();
}
void read_field(const json& v, const std::string& key, bool& out) {
  if (!v.is_boolean()) throw UsageError("config key '" + key + "' must be a boolean");
  out = v.get<bool>();
}
void read_field(const json& v, const std::string& key, double& out) {
  if (!v.is_number()) throw UsageError("config key '" + key + "' must be a number");
  out = v.get<double>();
}
void read_field(const json& v, const std::string& key, int& out) {
  if (!v.is_number_integer()) throw UsageError("config key '" + key + "' must be an integer");
  out = v.get<int>();
}
bool non_negative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

void read_field(const json& v, const std::string& key, std::size_t& out) {
  if (!non_negative_integer(v)) throw UsageError("config key '" + key + "' must be a non-negative integer");
  out = v.get<std::size_t>();
}
void read_field(const json& v, const std::string& key, std::optional<std::uint64_t>& out) {
  if (v.is_null()) {
    out.reset();
    return;
  }
  if (!non_negative_integer(v)) throw UsageError("config key '" + key + "' must be a non-negative integer");
  out = v.get<std::uint64_t>();
}

template <typename T>
json write_field(const T& v) {
  return v;
}
json write_field(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

void require(const std::string& value, const char* flag, const std::string& subcommand) {
  if (value.empty()) throw UsageError(subcommand + " needs --" + std::string(flag));
}

std::uint64_t require_seed(const RunConfig& c, const std::string& subcommand) {
  if (!c.seed) throw UsageError(subcommand + " needs --seed");
  return *c.seed;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot read " + path);
}

corpus::NormalizerConfig normalizer(const RunConfig& c) {
  corpus::NormalizerConfig n;
  n.lowercase = c.lowercase;
  if (!c.emoticons.empty()) n.emoticons = corpus::parse_emoticons(read_file(c.emoticons));
  return n;
}

training::TrainConfig train_config(const RunConfig& c, std::uint64_t seed) {
  training::TrainConfig t;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.lambda = c.lambda;
  t.kl_target = c.kl_target;
  t.kl_anneal_epochs = c.kl_anneal_epochs;
  t.policy_start_epoch = c.policy_start_epoch;
  t.seed = seed;
  t.patience = c.patience;
  t.max_decode_len = c.max_decode_len;
  t.temperature = c.temperature;
  try {
    t.policy_latent = training::parse_policy_latent(c.policy_latent);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  t.adam.learning_rate = c.learning_rate;
  t.adam.clip_norm = c.clip_norm;
  if (t.batch_size == 0) throw UsageError("batch size must be positive");
  return t;
}

models::GenerationPolicy generation_policy(const RunConfig& c) {
  models::GenerationPolicy p;
  if (c.k == 0) throw UsageError("k must be positive");
  p.k = c.k;
  p.latent = {models::DecodeMode::sample, c.max_decode_len, c.temperature};
  p.base = {models::DecodeMode::greedy, c.max_decode_len, 1.0};
  return p;
}

std::string metrics_jsonl(const training::TrainResult& result) {
  std::string out;
  for (const auto& m : result.log) out += training::to_json_line(m) + "\n";
  return out;
}

std::size_t metadata_size(const ad::Checkpoint& ck, const std::string& key) {
  auto it = ck.metadata.find(key);
  if (it == ck.metadata.end()) return 0;
  try {
    return static_cast<std::size_t>(std::stoull(it->second));
  } catch (const std::exception&) {
    throw CheckpointMismatch("checkpoint metadata " + key + " is not a count");
  }
}

void check_vocab(const ad::Checkpoint& ck, const corpus::Vocab& vocab, const std::string& path) {
  auto it = ck.metadata.find("data.vocab");
  if (it != ck.metadata.end() && it->second != vocab.fingerprint())
    throw CheckpointMismatch(path + " was trained with a different vocabulary");
}

std::map<std::string, std::string> run_metadata(const Dataset& d, std::uint64_t seed) {
  return {{"data.vocab", d.vocab.fingerprint()},
          {"data.inventory", d.inventory.fingerprint()},
          {"train.seed", std::to_string(seed)}};
}

models::ResponseModel load_response_model(const std::string& path, const corpus::Vocab& vocab) {
  require_file(path);
  const ad::Checkpoint ck = ad::load_checkpoint(path);
  check_vocab(ck, vocab, path);
  if (!models::parse_model_kind(ck.kind)) throw CheckpointMismatch(path + " holds a '" + ck.kind + "', not a response model");
  return models::ResponseModel::from_checkpoint(ck);
}

models::EmojiClassifier load_classifier(const std::string& path, const corpus::Vocab& vocab) {
  require_file(path);
  const ad::Checkpoint ck = ad::load_checkpoint(path);
  check_vocab(ck, vocab, path);
  return models::EmojiClassifier::from_checkpoint(ck);
}

void write_training_outputs(const fs::path& dir, const training::TrainResult& result, const ad::Checkpoint& ck) {
  write_file_atomic(dir / "metrics.jsonl", metrics_jsonl(result));
  if (result.diverged) throw DivergedError("training diverged; metrics kept, no checkpoint written");
  ad::save_checkpoint(dir / "model.ckpt", ck);
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

training::EpochCallback epoch_printer(std::ostream& out) {
  return [&out](const training::EpochMetrics& m) { out << training::to_json_line(m) << "\n"; };
}

}  // namespace

ordered_json RunConfig::to_json() const {
  ordered_json j;
  visit_fields(*this, [&](const char* key, const auto& v) { j[key] = write_field(v); });
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  RunConfig c;
  std::set<std::string> known;
  visit_fields(c, [&](const char* key, auto& v) {
    known.insert(key);
    if (auto it = j.find(key); it != j.end()) read_field(*it, key, v);
  });
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw UsageError("unknown config key '" + item.key() + "'");
  return c;
}

RunConfig resolve_config(const std::optional<fs::path>& config_file, const json& overrides) {
  json merged = json::object();
  if (config_file) {
    require_file(config_file->string());
    try {
      merged = json::parse(read_file(*config_file));
    } catch (const json::parse_error& e) {
      throw InputError("config " + config_file->string() + ": " + e.what());
    }
    if (!merged.is_object()) throw InputError("config " + config_file->string() + " is not a JSON object");
  }
  for (const auto& item : overrides.items()) merged[item.key()] = item.value();
  return RunConfig::from_json(merged);
}

const std::vector<corpus::ConversationPair>& Dataset::split(const std::string& name) const {
  if (name == "train") return train;
  if (name == "validation") return validation;
  if (name == "test") return test;
  throw UsageError("unknown split '" + name + "' (train, validation, test)");
}

void save_dataset(const fs::path& dir, const Dataset& d) {
  fs::create_directories(dir);
  write_file_atomic(dir / "train.jsonl", corpus::serialize_pairs(d.train));
  write_file_atomic(dir / "validation.jsonl", corpus::serialize_pairs(d.validation));
  write_file_atomic(dir / "test.jsonl", corpus::serialize_pairs(d.test));
  write_file_atomic(dir / "vocab.tsv", d.vocab.serialize());
  write_file_atomic(dir / "inventory.tsv", d.inventory.to_tsv());
  ordered_json meta;
  meta["format_version"] = kDatasetVersion;
  meta["sizes"] = {{"train", d.train.size()}, {"validation", d.validation.size()}, {"test", d.test.size()}};
  meta["vocab"] = d.vocab.fingerprint();
  meta["inventory"] = d.inventory.fingerprint();
  json counts = json::array();
  for (const auto& e : d.inventory.entries()) counts.push_back(e.count);
  meta["emoji_counts"] = counts;
  write_file_atomic(dir / "dataset.json", meta.dump(2) + "\n");
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("dataset directory " + dir.string() + " does not exist");
  for (const char* name : {"train.jsonl", "validation.jsonl", "test.jsonl", "vocab.tsv", "inventory.tsv", "dataset.json"})
    require_file((dir / name).string());
  Dataset d;
  d.train = corpus::parse_pairs(read_file(dir / "train.jsonl"));
  d.validation = corpus::parse_pairs(read_file(dir / "validation.jsonl"));
  d.test = corpus::parse_pairs(read_file(dir / "test.jsonl"));
  d.vocab = corpus::Vocab::parse(read_file(dir / "vocab.tsv"));
  d.inventory = corpus::EmojiInventory::parse(read_file(dir / "inventory.tsv"));
  json meta;
  try {
    meta = json::parse(read_file(dir / "dataset.json"));
    if (meta.at("format_version").get<int>() != kDatasetVersion)
      throw InputError("dataset format version " + meta["format_version"].dump() + " is not supported");
    const auto& counts = meta.at("emoji_counts");
    if (counts.size() != d.inventory.size()) throw InputError("dataset.json emoji counts do not match the inventory");
    for (std::size_t i = 0; i < counts.size(); ++i) d.inventory.set_count(static_cast<int>(i), counts[i].get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw InputError("dataset.json: " + std::string(e.what()));
  }
  return d;
}

ordered_json manifest(const std::string& subcommand, const RunConfig& config, const json& overrides) {
  const ordered_json cfg = config.to_json();
  ordered_json m;
  m["manifest_version"] = kManifestVersion;
  m["subcommand"] = subcommand;
  m["seed"] = write_field(config.seed);
  m["config_hash"] = hash_hex(cfg.dump());
  m["config"] = cfg;
  m["overrides"] = overrides;
  m["formats"] = {{"checkpoint", ad::kCheckpointVersion}, {"dataset", kDatasetVersion}, {"manifest", kManifestVersion}};
  return m;
}

void preprocess(const RunConfig& c, std::ostream& out) {
  require(c.input, "input", "preprocess");
  require(c.out, "out", "preprocess");
  require_file(c.input);
  if (!c.inventory.empty()) require_file(c.inventory);
  if (!c.emoticons.empty()) require_file(c.emoticons);
  if (c.split_train < 0 || c.split_validation < 0 || c.split_test < 0 ||
      std::abs(c.split_train + c.split_validation + c.split_test - 1.0) > 1e-9)
    throw UsageError("split fractions must be non-negative and sum to 1");

  corpus::PipelineConfig pc;
  pc.normalizer = normalizer(c);
  if (c.ascii_ratio > 0.0) pc.language = corpus::ascii_ratio_language(c.ascii_ratio);
  const auto inventory =
      c.inventory.empty() ? corpus::EmojiInventory::defaults() : corpus::EmojiInventory::parse(read_file(c.inventory));
  const auto build = corpus::build_corpus(corpus::parse_raw_pairs(read_file(c.input)), inventory, pc);
  const auto splits = corpus::split_corpus(build.pairs, {c.split_train, c.split_validation, c.split_test}, c.seed.value_or(1));

  std::vector<std::vector<std::string>> streams;
  for (const auto& p : splits.train) {
    streams.push_back(p.source_tokens);
    streams.push_back(p.response_tokens);
  }
  Dataset d{splits.train, splits.validation, splits.test, corpus::Vocab::build(streams, c.vocab_cap), build.inventory};
  save_dataset(c.out, d);
  write_file_atomic(fs::path(c.out) / "stats.json", corpus::stats_json(build));
  write_file_atomic(fs::path(c.out) / "stats.txt", corpus::stats_table(build));
  for (const auto& w : splits.warnings) out << "warning: " << w << "\n";
  out << build.raw_count << " raw pairs, " << build.pairs.size() << " kept: " << d.train.size() << " train, "
      << d.validation.size() << " validation, " << d.test.size() << " test; vocabulary " << d.vocab.size() << "\n";
}

training::TrainResult train_classifier(const RunConfig& c, std::ostream& out) {
  const std::string cmd = "train-classifier";
  require(c.data, "data", cmd);
  require(c.out, "out", cmd);
  const std::uint64_t seed = require_seed(c, cmd);
  const Dataset d = load_dataset(c.data);
  const training::TrainConfig tc = train_config(c, seed);

  models::ClassifierConfig cc;
  cc.vocab_size = d.vocab.size();
  cc.embed = c.word_embed;
  cc.hidden = c.hidden;
  cc.dropout = c.classifier_dropout;
  models::EmojiClassifier clf(cc, seed);
  const auto train = training::classifier_examples(training::encode_examples(d.train, d.vocab));
  const auto validation = training::classifier_examples(training::encode_examples(d.validation, d.vocab));
  auto result = training::train_classifier(clf, train, validation, tc, epoch_printer(out));

  auto meta = run_metadata(d, seed);
  meta["train.epochs_total"] = std::to_string(result.epochs_run);
  meta["train.steps_total"] = std::to_string(result.steps);
  meta["train.best_epoch"] = std::to_string(result.best_epoch);
  fs::create_directories(c.out);
  write_training_outputs(c.out, result, clf.to_checkpoint(meta));
  return result;
}

training::TrainResult train_response(models::ModelKind kind, const RunConfig& c, std::ostream& out) {
  const std::string cmd = "train-" + std::string(models::kind_name(kind));
  require(c.data, "data", cmd);
  require(c.out, "out", cmd);
  const std::uint64_t seed = require_seed(c, cmd);
  if (kind != models::ModelKind::base) require(c.init, "init", cmd);
  if (kind == models::ModelKind::reinforced) require(c.classifier, "classifier", cmd);
  const Dataset d = load_dataset(c.data);
  training::TrainConfig tc = train_config(c, seed);

  models::ModelConfig mc;
  mc.vocab_size = d.vocab.size();
  mc.word_embed = c.word_embed;
  mc.hidden = c.hidden;
  mc.emoji_embed = c.emoji_embed;
  mc.emoji_reduced = c.emoji_reduced;
  mc.latent = c.latent;

  models::ResponseModel model;
  if (c.init.empty()) {
    model = models::ResponseModel(kind, mc, seed);
  } else {
    const models::ResponseModel init = load_response_model(c.init, d.vocab);
    const models::ModelKind from = init.kind();
    const bool allowed = kind == models::ModelKind::base         ? from == models::ModelKind::base
                         : kind == models::ModelKind::cvae       ? from != models::ModelKind::reinforced
                                                                 : from != models::ModelKind::base;
    if (!allowed)
      throw CheckpointMismatch(cmd + " cannot start from a " + std::string(models::kind_name(from)) + " checkpoint");
    // The architecture comes from the init checkpoint; the latent sizes from
    // the flags only when the init model has none.
    mc = init.config();
    if (!init.has_latent()) mc.latent = c.latent;
    model = models::ResponseModel(kind, mc, seed);
    model.initialize_from(init);
    if (init.has_latent()) {
      const ad::Checkpoint ck = ad::load_checkpoint(c.init);
      tc.start_epoch = metadata_size(ck, "train.epochs_total");
      tc.start_step = metadata_size(ck, "train.steps_total");
    }
  }
  std::optional<models::EmojiClassifier> clf;
  if (!c.classifier.empty() && kind == models::ModelKind::reinforced) clf = load_classifier(c.classifier, d.vocab);

  const auto train = training::encode_examples(d.train, d.vocab);
  const auto validation = training::encode_examples(d.validation, d.vocab);
  auto result = training::train_response_model(model, train, validation, tc, clf ? &*clf : nullptr, epoch_printer(out));

  auto meta = run_metadata(d, seed);
  meta["train.epochs_total"] = std::to_string(tc.start_epoch + result.epochs_run);
  meta["train.steps_total"] = std::to_string(tc.start_step + result.steps);
  meta["train.best_epoch"] = std::to_string(result.best_epoch);
  fs::create_directories(c.out);
  write_training_outputs(c.out, result, model.to_checkpoint(meta));
  return result;
}

void generate(const RunConfig& c, std::ostream& out) {
  require(c.model, "model", "generate");
  require(c.data, "data", "generate");
  const std::uint64_t seed = require_seed(c, "generate");
  const Dataset d = load_dataset(c.data);
  const auto model = load_response_model(c.model, d.vocab);
  const auto policy = generation_policy(c);
  const bool rerank = model.has_latent() && policy.k > 1;
  if (rerank) require(c.classifier, "classifier", "generate with k > 1");
  std::optional<models::EmojiClassifier> clf;
  if (rerank) clf = load_classifier(c.classifier, d.vocab);

  std::vector<std::pair<int, std::string>> requests;
  if (!c.sources.empty()) {
    require_file(c.sources);
    std::istringstream in(read_file(c.sources));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      try {
        if (tab == std::string::npos) throw std::invalid_argument("expected emoji<TAB>text");
        requests.emplace_back(std::stoi(line.substr(0, tab)), line.substr(tab + 1));
      } catch (const std::exception& e) {
        throw InputError(c.sources + " line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  } else {
    if (c.source.empty() || c.emoji < 0) throw UsageError("generate needs --source and --emoji, or --sources");
    requests.emplace_back(c.emoji, c.source);
  }

  const auto norm = normalizer(c);
  Rng rng(mix_seed(seed, 21));
  std::string text;
  for (const auto& [emoji, source] : requests) {
    if (emoji < 0 || emoji >= static_cast<int>(model.config().num_emojis))
      throw UsageError("emoji id " + std::to_string(emoji) + " out of range");
    const auto ids = d.vocab.encode(corpus::split_tokens(corpus::normalize_text(source, norm)));
    if (ids.empty()) throw UsageError("source '" + source + "' has no tokens after normalization");
    std::vector<int> response;
    if (rerank)
      response = models::generate_best_of_k(model, *clf, ids, emoji, policy.k, policy.latent, rng).ids;
    else
      response = models::generate_once(model, ids, emoji, model.has_latent() ? policy.latent : policy.base, rng).ids;
    text += std::to_string(emoji) + "\t" + corpus::join_tokens(d.vocab.decode(response)) + "\n";
  }
  if (c.out.empty()) {
    out << text;
  } else {
    ensure_parent(c.out);
    write_file_atomic(c.out, text);
  }
}

void evaluate(const RunConfig& c, std::ostream& out) {
  require(c.model, "model", "evaluate");
  require(c.classifier, "classifier", "evaluate");
  require(c.data, "data", "evaluate");
  const Dataset d = load_dataset(c.data);
  const auto model = load_response_model(c.model, d.vocab);
  const auto clf = load_classifier(c.classifier, d.vocab);
  eval::EvalConfig ec;
  ec.prior_samples = c.prior_samples;
  ec.policy = generation_policy(c);
  ec.seed = c.seed.value_or(1);
  ec.max_samples = c.max_samples;
  const auto data = training::encode_examples(d.split(c.split), d.vocab);
  if (data.empty()) throw InputError("the " + c.split + " split is empty");
  const eval::EvalReport r = eval::evaluate(model, clf, data, d.vocab, ec);
  out << r.to_text();
  if (!c.out.empty()) {
    ensure_parent(c.out);
    write_file_atomic(c.out, r.to_json());
  }
}

void report(const RunConfig& c, std::ostream& out) {
  require(c.model, "model", "report");
  require(c.classifier, "classifier", "report");
  require(c.data, "data", "report");
  require(c.out, "out", "report");
  const Dataset d = load_dataset(c.data);
  const auto model = load_response_model(c.model, d.vocab);
  const auto clf = load_classifier(c.classifier, d.vocab);
  const auto sources = eval::unique_sources(training::encode_examples(d.split(c.split), d.vocab));
  if (sources.empty()) throw InputError("the " + c.split + " split is empty");
  auto emojis = eval::emojis_by_frequency(d.inventory);
  if (c.report_emojis < emojis.size()) emojis.resize(c.report_emojis);
  const auto generator = eval::model_generator(model, clf, generation_policy(c), c.seed.value_or(1));
  const auto rows = eval::controllability_report(generator, clf, sources, emojis);
  const std::string bars = eval::controllability_bars(rows, d.inventory, c.bar_width);
  fs::create_directories(c.out);
  write_file_atomic(fs::path(c.out) / "controllability.tsv", eval::controllability_tsv(rows, d.inventory));
  write_file_atomic(fs::path(c.out) / "controllability.txt", bars);
  out << bars;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"preprocess",       "train-classifier", "train-base", "train-cvae",
                                                 "train-reinforced", "generate",         "evaluate",   "report"};
  return names;
}

void run(const std::string& subcommand, const RunConfig& config, const json& overrides, std::ostream& out) {
  // Directory outputs hold their manifest; file outputs get a sibling one.
  fs::path manifest_path;
  if (subcommand == "preprocess") {
    preprocess(config, out);
  } else if (subcommand == "train-classifier") {
    train_classifier(config, out);
  } else if (subcommand.rfind("train-", 0) == 0 && models::parse_model_kind(subcommand.substr(6))) {
    train_response(*models::parse_model_kind(subcommand.substr(6)), config, out);
  } else if (subcommand == "generate") {
    generate(config, out);
    if (config.out.empty()) return;
    manifest_path = config.out + ".manifest.json";
  } else if (subcommand == "evaluate") {
    evaluate(config, out);
    if (config.out.empty()) return;
    manifest_path = config.out + ".manifest.json";
  } else if (subcommand == "report") {
    report(config, out);
  } else {
    throw UsageError("unknown subcommand '" + subcommand + "'");
  }
  if (manifest_path.empty()) manifest_path = fs::path(config.out) / "manifest.json";
  write_file_atomic(manifest_path, manifest(subcommand, config, overrides).dump(2) + "\n");
}

}  // namespace mojitalk::cli
