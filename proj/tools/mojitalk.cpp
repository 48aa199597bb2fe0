#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "mojitalk/cli/pipeline.hpp"

namespace cli = mojitalk::cli;

namespace {

struct Bound {
  CLI::Option* option;
  std::string key;
};

std::string key_of(const std::string& flag) {
  std::string k = flag.substr(2);
  for (char& ch : k)
    if (ch == '-') ch = '_';
  return k;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emoji-conditioned response generation: corpus preparation, training, generation and evaluation.",
               "mojitalk"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; MOJITALK_CONFIG is used when absent");

  cli::RunConfig flags;
  std::uint64_t seed = 0;
  std::map<CLI::App*, std::vector<Bound>> bound;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : cli::subcommands()) subs[name] = app.add_subcommand(name);
  subs["preprocess"]->description("Filter, label, normalize and split raw pairs; build the vocabulary");
  subs["train-classifier"]->description("Train the emoji classifier used for rewards and scoring");
  subs["train-base"]->description("Train the attention seq2seq model");
  subs["train-cvae"]->description("Train the conditional variational model from a base checkpoint");
  subs["train-reinforced"]->description("Continue a CVAE checkpoint with the classifier-rewarded policy term");
  subs["generate"]->description("Generate responses for one source or an emoji<TAB>text file");
  subs["evaluate"]->description("Perplexity, emoji accuracy and diversity on a split");
  subs["report"]->description("Per-emoji controllability table and chart");

  auto add = [&](std::initializer_list<const char*> names, const std::string& flag, auto& member,
                 const std::string& help) {
    for (const char* n : names) {
      CLI::App* sub = subs.at(n);
      bound[sub].push_back({sub->add_option(flag, member, help), key_of(flag)});
    }
  };
  const auto all = {"preprocess", "train-classifier", "train-base", "train-cvae", "train-reinforced",
                    "generate",   "evaluate",         "report"};
  const auto train = {"train-classifier", "train-base", "train-cvae", "train-reinforced"};
  const auto response = {"train-base", "train-cvae", "train-reinforced"};
  const auto decoding = {"train-reinforced", "generate", "evaluate", "report"};
  const auto consumers = {"generate", "evaluate", "report"};

  for (const char* n : all) {
    CLI::App* sub = subs.at(n);
    bound[sub].push_back({sub->add_option("--seed", seed, "Random seed (required for training and generation)"), "seed"});
  }
  add({"preprocess"}, "--input", flags.input, "Raw pairs, one JSON object per line");
  add({"preprocess"}, "--inventory", flags.inventory, "Emoji inventory TSV");
  add({"preprocess", "generate"}, "--emoticons", flags.emoticons, "Emoticon list, one per line");
  add({"preprocess"}, "--ascii-ratio", flags.ascii_ratio, "Minimum ASCII letter share for the language filter; 0 disables it");
  add({"preprocess"}, "--split-train", flags.split_train, "Training fraction");
  add({"preprocess"}, "--split-validation", flags.split_validation, "Validation fraction");
  add({"preprocess"}, "--split-test", flags.split_test, "Test fraction");
  add({"preprocess"}, "--vocab-cap", flags.vocab_cap, "Vocabulary size including reserved tokens");
  for (const char* n : {"preprocess", "generate"}) {
    CLI::App* sub = subs.at(n);
    bound[sub].push_back({sub->add_flag("--lowercase", flags.lowercase, "Lowercase text"), "lowercase"});
  }
  add(all, "--out", flags.out, "Output directory (report file for evaluate and generate)");
  add({"train-classifier", "train-base", "train-cvae", "train-reinforced", "generate", "evaluate", "report"}, "--data",
      flags.data, "Preprocessed dataset directory");
  add(response, "--init", flags.init, "Checkpoint to start from");
  add({"train-reinforced", "generate", "evaluate", "report"}, "--classifier", flags.classifier, "Classifier checkpoint");
  add(consumers, "--model", flags.model, "Response model checkpoint");

  add(train, "--word-embed", flags.word_embed, "Word embedding size (classifier too)");
  add(train, "--hidden", flags.hidden, "GRU hidden size (classifier too)");
  add(train, "--emoji-embed", flags.emoji_embed, "Emoji embedding size");
  add(train, "--emoji-reduced", flags.emoji_reduced, "Reduced emoji vector size");
  add(train, "--latent", flags.latent, "Latent size");
  add({"train-classifier"}, "--classifier-dropout", flags.classifier_dropout, "Classifier dropout rate");
  add(train, "--batch-size", flags.batch_size, "Minibatch size");

  add(train, "--epochs", flags.epochs, "Training epochs");
  add(train, "--learning-rate", flags.learning_rate, "Adam learning rate");
  add(train, "--clip-norm", flags.clip_norm, "Global gradient-norm clip");
  add(train, "--patience", flags.patience, "Epochs without validation improvement before stopping; 0 disables");
  add(response, "--kl-target", flags.kl_target, "Final KL weight");
  add(response, "--kl-anneal-epochs", flags.kl_anneal_epochs, "Epochs over which the KL weight rises");
  add({"train-reinforced"}, "--lambda", flags.lambda, "Policy term weight");
  add({"train-reinforced"}, "--policy-start-epoch", flags.policy_start_epoch, "Epoch at which the policy term starts");
  add({"train-reinforced"}, "--policy-latent", flags.policy_latent, "Latent for policy samples: prior or posterior");
  add(decoding, "--max-decode-len", flags.max_decode_len, "Maximum generated length");
  add(decoding, "--temperature", flags.temperature, "Sampling temperature");

  add(consumers, "--k", flags.k, "Candidates for best-of-k reranking");
  add({"generate"}, "--source", flags.source, "Source text");
  add({"generate"}, "--emoji", flags.emoji, "Emoji label id");
  add({"generate"}, "--sources", flags.sources, "File of emoji<TAB>text lines");
  add({"evaluate", "report"}, "--split", flags.split, "Dataset split: train, validation or test");
  add({"evaluate"}, "--prior-samples", flags.prior_samples, "Prior samples per example for perplexity");
  add({"evaluate"}, "--max-samples", flags.max_samples, "Generations kept in the report");
  add({"report"}, "--report-emojis", flags.report_emojis, "Most frequent emojis to report");
  add({"report"}, "--bar-width", flags.bar_width, "Chart width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  flags.seed = seed;
  const auto flag_values = flags.to_json();
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& b : bound[chosen])
    if (b.option->count() > 0) overrides[b.key] = flag_values[b.key];

  try {
    std::optional<std::filesystem::path> config_file;
    if (!config_path.empty())
      config_file = config_path;
    else if (const char* env = std::getenv("MOJITALK_CONFIG"); env && *env)
      config_file = env;
    const cli::RunConfig config = cli::resolve_config(config_file, overrides);
    cli::run(chosen->get_name(), config, overrides, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "mojitalk " << chosen->get_name() << ": " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
  return cli::kOk;
}
