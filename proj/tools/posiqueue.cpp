// posiqueue: operator entry points for the moderation-queue pipeline.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "posiqueue/actions/bestof.hpp"
#include "posiqueue/actions/engine.hpp"
#include "posiqueue/actions/period.hpp"
#include "posiqueue/corpus.hpp"
#include "posiqueue/error.hpp"
#include "posiqueue/model/eval.hpp"
#include "posiqueue/model/gbdt.hpp"
#include "posiqueue/model/labels.hpp"
#include "posiqueue/model/pipeline.hpp"
#include "posiqueue/service/api.hpp"
#include "posiqueue/service/config.hpp"
#include "posiqueue/service/http.hpp"
#include "posiqueue/synthetic.hpp"
#include "posiqueue/textfeat/features.hpp"
#include "posiqueue/textfeat/lexicon.hpp"

namespace fs = std::filesystem;
using namespace posiqueue;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::io_error: return kExitRuntime;
    default: return kExitUsage;
  }
}

std::string summary(const Corpus& c) {
  return "posts=" + std::to_string(c.post_count()) + " comments=" + std::to_string(c.comment_count()) +
         " authors=" + std::to_string(c.authors().size());
}

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

textfeat::LexiconSet load_lexicons(const std::optional<std::string>& dir) {
  return dir ? textfeat::LexiconSet::load_directory(*dir) : textfeat::LexiconSet::builtin();
}

std::size_t model_embedding_dim(const model::GBDTModel& m) {
  std::size_t n = 0;
  for (const auto& name : m.feature_order)
    if (name.rfind("emb:", 0) == 0) ++n;
  return n;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string contributions, authors, out;
};

int run_ingest(const IngestArgs& a) {
  auto corpus = ingest_corpus(a.contributions, a.authors);
  write_corpus(corpus, a.out);
  std::cout << summary(corpus) << '\n';
  return kExitOk;
}

struct SynthArgs {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_posts;
  std::optional<double> signal_strength;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  json j = json::object();
  if (a.config) {
    std::ifstream in(*a.config, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open " + *a.config);
    j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::invalid_argument, *a.config + " is not a JSON object");
  }
  if (a.seed) j["seed"] = *a.seed;
  if (a.n_posts) j["n_posts"] = *a.n_posts;
  if (a.signal_strength) j["signal_strength"] = *a.signal_strength;
  auto corpus = generate_synthetic_corpus(synthetic_config_from_json(j));
  write_corpus(corpus, a.out);
  std::cout << summary(corpus) << '\n';
  return kExitOk;
}

struct FeaturesArgs {
  std::string corpus, out;
  std::optional<std::string> lexicons;
  std::size_t embedding_dim = 384;
  unsigned threads = 0;
};

int run_features(const FeaturesArgs& a) {
  auto corpus = ingest_corpus_dir(a.corpus);
  textfeat::FeatureConfig cfg;
  cfg.embedding_dim = a.embedding_dim;
  unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  auto cache = textfeat::extract_corpus(corpus, load_lexicons(a.lexicons), cfg, threads);
  textfeat::write_feature_cache(cache, a.out);
  std::cout << "features=" << cache.size() << " dim="
            << (cache.empty() ? 0 : textfeat::flatten(cache.begin()->second).size()) << '\n';
  return kExitOk;
}

struct TrainArgs {
  std::string corpus, features, kind, out;
  model::TrainConfig config;
};

int run_train(const TrainArgs& a) {
  auto kind = parse_kind(a.kind);
  if (!kind) throw Error(ErrorCode::invalid_argument, "--kind must be post or comment");
  auto corpus = ingest_corpus_dir(a.corpus);
  auto cache = textfeat::read_feature_cache(a.features);
  auto examples = model::build_labels(corpus, *kind, cache);
  auto split = model::split_train_test(examples, a.config);
  auto m = model::train_gbdt(split.train, a.config, model::cache_feature_order(cache), *kind);
  model::save_model(m, a.out);
  std::cout << "kind=" << to_token(*kind) << " n_train=" << split.train.size() << " n_test=" << split.test.size()
            << " trees=" << m.trees.size() << '\n';
  std::ostringstream trace;
  trace.precision(6);
  trace << std::fixed << "train_loss " << m.loss_trace.front() << " -> " << m.loss_trace.back();
  std::cout << trace.str() << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string model, corpus, features;
  std::optional<std::string> report;
  bool json_out = false;
};

int run_eval(const EvalArgs& a) {
  auto m = model::load_model(a.model);
  auto corpus = ingest_corpus_dir(a.corpus);
  auto cache = textfeat::read_feature_cache(a.features);
  auto report = model::evaluate(m, model::held_out_split(corpus, m, cache));
  auto j = model::to_json(report);
  std::string subreddit = corpus.contributions().empty() ? "" : corpus.contributions().front().subreddit;
  j["subreddit"] = subreddit;
  jsonl::write_file(a.report ? fs::path(*a.report) : fs::path(a.model + ".report.json"), {j});
  if (a.json_out) {
    std::cout << j.dump() << '\n';
  } else {
    std::optional<model::EvalReport> posts, comments;
    (m.kind == Kind::post ? posts : comments) = report;
    std::cout << model::format_table(subreddit, posts, comments);
  }
  return kExitOk;
}

struct ScoreArgs {
  std::string model, text;
  std::optional<std::string> lexicons;
  bool json_out = false;
};

int run_score(const ScoreArgs& a) {
  auto m = model::load_model(a.model);
  std::string text;
  if (a.text == "-") {
    text = read_all(std::cin);
  } else {
    std::ifstream in(a.text, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot open " + a.text);
    text = read_all(in);
  }
  textfeat::FeatureConfig cfg;
  cfg.embedding_dim = model_embedding_dim(m);
  auto fv = textfeat::extract_text_features(text, load_lexicons(a.lexicons), cfg);
  auto x = textfeat::flatten(fv);
  double p = model::predict_probability(m, x);
  int score = model::score_from_probability(p);
  if (a.json_out)
    std::cout << json{{"desirability_score", score}, {"probability", p}, {"kind", to_token(m.kind)}}.dump() << '\n';
  else
    std::cout << score << '\n';
  return kExitOk;
}

struct BestofArgs {
  std::string log, corpus, period;
  std::optional<std::string> out;
};

int run_bestof(const BestofArgs& a) {
  auto [kind, period] = actions::parse_period(a.period);
  auto corpus = ingest_corpus_dir(a.corpus);
  auto state = actions::replay_log(actions::read_action_log(a.log), actions::FoldContext{&corpus, kind});
  auto it = state.threads.find(period.start);
  auto thread = it == state.threads.end() ? actions::empty_thread(period, kind) : it->second;
  auto md = actions::render_bestof(thread);
  if (a.out) {
    fs::create_directories(*a.out);
    std::ofstream out(fs::path(*a.out) / actions::bestof_filename(thread), std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write into " + *a.out);
    out << md;
  }
  std::cout << md;
  return kExitOk;
}

int run_serve(const std::string& config_path) {
  auto config = service::load_config(config_path);
  auto api = service::Api::from_config(config);

  // Route SIGINT/SIGTERM to a waiter thread instead of an async handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::HttpServer server(*api);
  int port = server.bind(config.host, config.port);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  // The socket is already listening, so connections made now are queued.
  std::cout << "posiqueue serving on http://" << config.host << ':' << port << std::endl;
  server.run();
  // Wake the waiter if the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cout << "posiqueue stopped" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive-moderation queue engine"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a corpus and write it to a directory");
  c_ingest->add_option("--contributions", ingest.contributions, "contributions.jsonl")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--authors", ingest.authors, "authors.jsonl")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "Output directory")->required();

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  c_synth->add_option("--config", synth.config, "Generator config (JSON)")->check(CLI::ExistingFile);
  c_synth->add_option("--seed", synth.seed, "Seed (overrides the config)");
  c_synth->add_option("--n-posts", synth.n_posts, "Post count (overrides the config)");
  c_synth->add_option("--signal-strength", synth.signal_strength, "Planted signal strength (overrides the config)");
  c_synth->add_option("--out", synth.out, "Output directory")->required();

  FeaturesArgs feats;
  auto* c_feats = app.add_subcommand("features", "Extract the feature cache");
  c_feats->add_option("--corpus", feats.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_feats->add_option("--lexicons", feats.lexicons, "Lexicon directory")->check(CLI::ExistingDirectory);
  c_feats->add_option("--out", feats.out, "Feature cache path")->required();
  c_feats->add_option("--embedding-dim", feats.embedding_dim, "Hashed embedding size")->capture_default_str();
  c_feats->add_option("--threads", feats.threads, "Worker threads (0 = hardware)");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a desirability model for one kind");
  c_train->add_option("--corpus", train.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_train->add_option("--features", train.features, "Feature cache")->required()->check(CLI::ExistingFile);
  c_train->add_option("--kind", train.kind, "post or comment")->required()->check(CLI::IsMember({"post", "comment"}));
  c_train->add_option("--out", train.out, "Model path")->required();
  c_train->add_option("--max-depth", train.config.max_depth)->capture_default_str();
  c_train->add_option("--rounds", train.config.rounds)->capture_default_str();
  c_train->add_option("--lr", train.config.learning_rate)->capture_default_str();
  c_train->add_option("--min-leaf", train.config.min_leaf)->capture_default_str();
  c_train->add_option("--split-ratio", train.config.split_ratio)->capture_default_str();
  c_train->add_option("--seed", train.config.seed)->capture_default_str();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a model on its held-out split");
  c_eval->add_option("--model", eval.model, "Model path")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--corpus", eval.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--features", eval.features, "Feature cache")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--report", eval.report, "Report path (default: <model>.report.json)");
  c_eval->add_flag("--json", eval.json_out, "Print the report as JSON");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score a text with a model");
  c_score->add_option("--model", score.model, "Model path")->required()->check(CLI::ExistingFile);
  c_score->add_option("--text", score.text, "Text file, or - for standard input")->required();
  c_score->add_option("--lexicons", score.lexicons, "Lexicon directory")->check(CLI::ExistingDirectory);
  c_score->add_flag("--json", score.json_out, "Print JSON");

  BestofArgs bestof;
  auto* c_bestof = app.add_subcommand("bestof", "Render the best-of thread for a period");
  c_bestof->add_option("--log", bestof.log, "Action log")->required()->check(CLI::ExistingFile);
  c_bestof->add_option("--corpus", bestof.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  c_bestof->add_option("--period", bestof.period, "YYYY-Www or YYYY-MM")->required();
  c_bestof->add_option("--out", bestof.out, "Also write bestof-<date>.md into this directory");

  std::string serve_config;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP API");
  c_serve->add_option("--config", serve_config, "Service config (JSON); $POSIQUEUE_CONFIG overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_ingest) return run_ingest(ingest);
    if (*c_synth) return run_synth(synth);
    if (*c_feats) return run_features(feats);
    if (*c_train) return run_train(train);
    if (*c_eval) return run_eval(eval);
    if (*c_score) return run_score(score);
    if (*c_bestof) return run_bestof(bestof);
    if (*c_serve) {
      if (serve_config.empty() && !std::getenv(service::kConfigEnv)) {
        std::cerr << "error: serve needs --config or $" << service::kConfigEnv << '\n';
        return kExitUsage;
      }
      return run_serve(serve_config);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_token(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
