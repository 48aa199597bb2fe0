#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mojitalk/corpus/corpus.hpp"
#include "mojitalk/corpus/vocab.hpp"
#include "mojitalk/training/trainer.hpp"

namespace mojitalk::cli {

inline constexpr int kManifestVersion = 1;
inline constexpr int kDatasetVersion = 1;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kUnreadableInput = 3,
  kCheckpointMismatch = 4,
  kDiverged = 5,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps the exception types thrown by the pipeline onto exit codes.
int exit_code_for(const std::exception& error);

struct RunConfig {
  // paths
  std::string input;       // raw pairs (preprocess)
  std::string data;        // preprocessed dataset directory
  std::string out;         // output directory, or report file for evaluate
  std::string init;        // checkpoint to start from
  std::string model;       // response model checkpoint
  std::string classifier;  // classifier checkpoint
  std::string inventory;   // emoji inventory TSV; empty means the built-in set
  std::string emoticons;   // emoticon list; empty means the built-in set
  std::string sources;     // generate: "emoji<TAB>text" lines

  std::optional<std::uint64_t> seed;

  // preprocess
  double ascii_ratio = 0.0;  // 0 accepts every language
  bool lowercase = false;
  double split_train = 0.9;
  double split_validation = 0.05;
  double split_test = 0.05;
  std::size_t vocab_cap = corpus::kDefaultVocabCap;

  // model; the classifier uses word_embed and hidden too
  std::size_t word_embed = 128;
  std::size_t hidden = 128;
  std::size_t emoji_embed = 128;
  std::size_t emoji_reduced = 12;
  std::size_t latent = 268;
  double classifier_dropout = 0.2;

  // training
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  double lambda = 1.0;
  double kl_target = 0.5;
  std::size_t kl_anneal_epochs = 6;
  std::size_t policy_start_epoch = 2;
  std::size_t patience = 3;
  std::string policy_latent = "prior";
  std::size_t max_decode_len = 30;
  double temperature = 1.0;

  // generation and evaluation
  std::string source;
  int emoji = -1;
  std::size_t k = 5;
  std::string split = "test";
  std::size_t prior_samples = 1;
  std::size_t max_samples = 5;
  std::size_t report_emojis = 64;
  std::size_t bar_width = 40;

  nlohmann::ordered_json to_json() const;
  // Unknown keys and ill-typed values raise UsageError.
  static RunConfig from_json(const nlohmann::json& j);
};

// Reads the config file (when given) and applies `overrides` on top.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_file, const nlohmann::json& overrides);

struct Dataset {
  std::vector<corpus::ConversationPair> train;
  std::vector<corpus::ConversationPair> validation;
  std::vector<corpus::ConversationPair> test;
  corpus::Vocab vocab;
  corpus::EmojiInventory inventory;  // with corpus counts

  const std::vector<corpus::ConversationPair>& split(const std::string& name) const;
};

// Directory layout: train/validation/test.jsonl, vocab.tsv, inventory.tsv.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

// Effective config, overrides and format versions; no timestamps.
nlohmann::ordered_json manifest(const std::string& subcommand, const RunConfig& config,
                                const nlohmann::json& overrides);

void preprocess(const RunConfig& config, std::ostream& out);
training::TrainResult train_classifier(const RunConfig& config, std::ostream& out);
// cvae needs a base (or cvae) checkpoint to start from, reinforced a cvae (or
// reinforced) one plus a classifier. Epoch and step counts continue from a
// latent init checkpoint.
training::TrainResult train_response(models::ModelKind kind, const RunConfig& config, std::ostream& out);
void generate(const RunConfig& config, std::ostream& out);
void evaluate(const RunConfig& config, std::ostream& out);
void report(const RunConfig& config, std::ostream& out);

const std::vector<std::string>& subcommands();

// Dispatches one subcommand and writes its manifest next to the outputs.
void run(const std::string& subcommand, const RunConfig& config, const nlohmann::json& overrides, std::ostream& out);

}  // namespace mojitalk::cli
