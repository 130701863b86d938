#include "cygnet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "cygnet/checkpoint.hpp"
#include "cygnet/data.hpp"
#include "cygnet/error.hpp"
#include "cygnet/evaluator.hpp"
#include "cygnet/filter.hpp"
#include "cygnet/hist_vocab.hpp"
#include "cygnet/kernels.hpp"
#include "cygnet/run_config.hpp"
#include "cygnet/synth.hpp"
#include "cygnet/trainer.hpp"

namespace cygnet {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string config;
  int threads = 0;

  std::string data;
  std::int64_t granularity = 1;
  bool reciprocal = true;

  std::vector<std::string> inputs;
  std::string stat;
  std::string out;
  std::string split_scheme = "80/10/10";

  std::string history = "train";
  std::string probe = "test";
  std::string csv;

  SynthConfig synth;

  double alpha = 0.8;
  TrainConfig train;
  std::string vocab_mode = "binary";
  std::string loss = "sum";
  std::string log;

  std::string checkpoint;
  std::string split = "test";
  std::string filter = "static";
  std::string mode = "full";
  std::string per_snapshot_csv;
  bool absorb_valid = false;
  bool retrain = false;

  EntityId subject = 0;
  RelationId relation = 0;
  SnapshotIndex time = 0;
  int topk = 10;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  void build();
  void add_common(CLI::App* sub);
  void add_data(CLI::App* sub);
  void add_train_flags(CLI::App* sub);
  void add_eval_flags(CLI::App* sub, bool vocab_flags = true);
  std::vector<std::string> inject_config(CLI::App* sub, const std::vector<std::string>& args,
                                         std::set<std::string>& from_file);
  void resolve_config(CLI::App* sub, const std::set<std::string>& from_flag,
                      const std::set<std::string>& from_file);

  Exec exec() const { return opts_.threads == 1 ? Exec::Serial : Exec::Parallel; }
  Dataset load() const { return load_dataset(opts_.data, {opts_.granularity, opts_.reciprocal}); }
  Checkpoint load_compatible(const Dataset& ds) const;
  HistVocab vocab_for(const Dataset& ds) const;
  std::span<const Quadruple> eval_split(const Dataset& ds) const;
  double eval_alpha(const Checkpoint& ck) const;
  TrainConfig train_config(double alpha) const;
  void write_csv_file(const std::string& path, const std::string& body) const;
  void emit_csv(const std::string& path, const std::string& body);

  void cmd_prepare();
  void cmd_stats();
  void cmd_synth();
  void cmd_train();
  void cmd_eval();
  void cmd_ablate();
  void cmd_sweep();
  void cmd_predict();

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Copy-generation network for temporal knowledge-graph completion", "cygnet"};
  Options opts_;
  RunConfig config_;
  CLI::Option* alpha_opt_ = nullptr;
};

void Cli::add_common(CLI::App* sub) {
  sub->add_option("--config", opts_.config, "key = value configuration file");
  sub->add_option("--threads", opts_.threads, "OpenMP thread cap (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
}

void Cli::add_data(CLI::App* sub) {
  sub->add_option("--data", opts_.data, "dataset directory (train/valid/test/stat)")->required();
  sub->add_option("--granularity", opts_.granularity, "raw time units per snapshot")
      ->check(CLI::PositiveNumber);
  sub->add_option("--reciprocal", opts_.reciprocal, "add reciprocal relations for subject queries");
}

void Cli::add_train_flags(CLI::App* sub) {
  sub->add_option("--dim", opts_.train.dim, "embedding dimension")->check(CLI::PositiveNumber);
  sub->add_option("--lr", opts_.train.learning_rate, "AMSGrad learning rate")
      ->check(CLI::PositiveNumber);
  sub->add_option("--batch-size", opts_.train.batch_size)->check(CLI::PositiveNumber);
  sub->add_option("--epochs", opts_.train.epochs)->check(CLI::PositiveNumber);
  sub->add_option("--seed", opts_.train.seed);
  sub->add_option("--mask-magnitude", opts_.train.mask_magnitude)->check(CLI::PositiveNumber);
  sub->add_option("--mask-in-value", opts_.train.mask_in_value,
                  "copy-mask value at in-vocabulary entities");
  sub->add_option("--vocab-mode", opts_.vocab_mode)->check(CLI::IsMember({"binary", "count"}));
  sub->add_option("--loss", opts_.loss, "batch loss reduction")
      ->check(CLI::IsMember({"sum", "mean"}));
  sub->add_option("--patience", opts_.train.patience, "early-stopping patience in epochs (0 = off)")
      ->check(CLI::NonNegativeNumber);
}

void Cli::add_eval_flags(CLI::App* sub, bool vocab_flags) {
  sub->add_option("--checkpoint", opts_.checkpoint)->required();
  sub->add_option("--split", opts_.split)->check(CLI::IsMember({"test", "valid"}));
  sub->add_option("--filter", opts_.filter)->check(CLI::IsMember({"raw", "static", "time-aware"}));
  sub->add_option("--absorb-valid", opts_.absorb_valid,
                  "extend the frozen vocabulary with validation facts");
  if (!vocab_flags) return;
  sub->add_option("--mask-in-value", opts_.train.mask_in_value);
  sub->add_option("--vocab-mode", opts_.vocab_mode)->check(CLI::IsMember({"binary", "count"}));
}

void Cli::build() {
  app_.option_defaults()->always_capture_default();
  app_.require_subcommand(1);

  auto* prepare = app_.add_subcommand("prepare", "normalize, split and write a dataset");
  add_common(prepare);
  prepare->add_option("--input", opts_.inputs, "raw fact files")->required();
  prepare->add_option("--stat", opts_.stat, "stat.txt with 'N R' (inferred when absent)");
  prepare->add_option("--out", opts_.out, "output directory")->required();
  prepare->add_option("--granularity", opts_.granularity)->check(CLI::PositiveNumber);
  prepare->add_option("--reciprocal", opts_.reciprocal);
  prepare->add_option("--split", opts_.split_scheme)->check(CLI::IsMember({"80/10/10", "80/20"}));

  auto* stats = app_.add_subcommand("stats", "recurrence statistics");
  add_common(stats);
  add_data(stats);
  stats->add_option("--history", opts_.history)->check(CLI::IsMember({"train", "train+valid"}));
  stats->add_option("--probe", opts_.probe)->check(CLI::IsMember({"test", "valid"}));
  stats->add_option("--csv", opts_.csv, "also write metric,value CSV");

  auto* synth = app_.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth);
  synth->add_option("--entities", opts_.synth.num_entities)->check(CLI::PositiveNumber);
  synth->add_option("--relations", opts_.synth.num_relations)->check(CLI::PositiveNumber);
  synth->add_option("--snapshots", opts_.synth.num_snapshots)->check(CLI::PositiveNumber);
  synth->add_option("--facts-per-snapshot", opts_.synth.facts_per_snapshot)
      ->check(CLI::PositiveNumber);
  synth->add_option("--recurrence", opts_.synth.recurrence)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", opts_.synth.seed);
  synth->add_option("--fixed-objects", opts_.synth.fixed_objects,
                    "each (s, p) pair keeps a single object");
  synth->add_option("--split", opts_.split_scheme)->check(CLI::IsMember({"80/10/10", "80/20"}));
  synth->add_option("--out", opts_.out)->required();

  auto* train = app_.add_subcommand("train", "train a model");
  add_common(train);
  add_data(train);
  alpha_opt_ = train->add_option("--alpha", opts_.alpha, "copy weight (default per dataset)")
                   ->check(CLI::Range(0.0, 1.0));
  add_train_flags(train);
  train->add_option("--out", opts_.out, "checkpoint path")->required();
  train->add_option("--log", opts_.log, "training log CSV (epoch,loss,seconds)");

  auto* eval = app_.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval);
  add_data(eval);
  add_eval_flags(eval);
  eval->add_option("--mode", opts_.mode)
      ->check(CLI::IsMember({"full", "copy-only", "gen-only", "gen-new"}));
  eval->add_option("--alpha", opts_.alpha, "overrides the checkpoint's alpha")
      ->check(CLI::Range(0.0, 1.0));
  eval->add_option("--per-snapshot-csv", opts_.per_snapshot_csv);

  auto* ablate = app_.add_subcommand("ablate", "evaluate all four modes");
  add_common(ablate);
  add_data(ablate);
  add_eval_flags(ablate);
  ablate->add_option("--alpha", opts_.alpha)->check(CLI::Range(0.0, 1.0));
  ablate->add_option("--out", opts_.out, "CSV path (stdout when absent)");

  auto* sweep = app_.add_subcommand("sweep-alpha", "evaluate alpha = 0.0, 0.1, ..., 1.0");
  add_common(sweep);
  add_data(sweep);
  add_eval_flags(sweep, false);
  add_train_flags(sweep);
  sweep->add_option("--retrain", opts_.retrain, "train a fresh model per alpha");
  sweep->add_option("--out", opts_.out, "CSV path (stdout when absent)");

  auto* predict = app_.add_subcommand("predict", "rank objects for one query");
  add_common(predict);
  add_data(predict);
  predict->add_option("--checkpoint", opts_.checkpoint)->required();
  predict->add_option("--subject", opts_.subject)->required()->check(CLI::NonNegativeNumber);
  predict->add_option("--relation", opts_.relation)->required()->check(CLI::NonNegativeNumber);
  predict->add_option("--time", opts_.time, "snapshot index")->required()
      ->check(CLI::NonNegativeNumber);
  predict->add_option("--topk", opts_.topk)->check(CLI::PositiveNumber);
  predict->add_option("--mode", opts_.mode)
      ->check(CLI::IsMember({"full", "copy-only", "gen-only", "gen-new"}));
  predict->add_option("--alpha", opts_.alpha)->check(CLI::Range(0.0, 1.0));
  predict->add_option("--absorb-valid", opts_.absorb_valid);
  predict->add_option("--mask-in-value", opts_.train.mask_in_value);
  predict->add_option("--vocab-mode", opts_.vocab_mode)->check(CLI::IsMember({"binary", "count"}));
}

std::string flag_name(const std::string& token) {
  if (token.rfind("--", 0) != 0) return {};
  return token.substr(2, token.find('=') == std::string::npos ? std::string::npos
                                                              : token.find('=') - 2);
}

std::vector<std::string> Cli::inject_config(CLI::App* sub, const std::vector<std::string>& args,
                                            std::set<std::string>& from_file) {
  std::string path;
  std::set<std::string> given;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string name = flag_name(args[i]);
    if (name.empty()) continue;
    given.insert(name);
    if (name == "config") {
      const auto eq = args[i].find('=');
      if (eq != std::string::npos) {
        path = args[i].substr(eq + 1);
      } else if (i + 1 < args.size()) {
        path = args[i + 1];
      }
    }
  }
  std::vector<std::string> merged{args.begin() + 1, args.end()};
  if (path.empty()) return merged;

  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(path)) {
    if (key == "config" || given.count(key)) continue;
    if (sub->get_option_no_throw("--" + key) == nullptr) {
      err_ << "warning: config key '" << key << "' is not used by " << sub->get_name() << '\n';
      continue;
    }
    injected.push_back("--" + key + "=" + value);
    from_file.insert(key);
  }
  injected.insert(injected.end(), merged.begin(), merged.end());
  return injected;
}

void Cli::resolve_config(CLI::App* sub, const std::set<std::string>& from_flag,
                         const std::set<std::string>& from_file) {
  config_ = RunConfig(sub->get_name());
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string key = opt->get_single_name();
    if (key == "help" || key == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    } else {
      value = opt->get_default_str();
    }
    Provenance source = Provenance::Default;
    if (from_flag.count(key)) {
      source = Provenance::Flag;
    } else if (from_file.count(key)) {
      source = Provenance::ConfigFile;
    }
    config_.set(key, value, source);
  }
}

int Cli::run(const std::vector<std::string>& args) {
  build();
  try {
    if (args.empty()) throw UsageError("missing subcommand");
    if (args[0] == "--help" || args[0] == "-h") {
      out_ << app_.help();
      return kExitOk;
    }
    CLI::App* sub = app_.get_subcommand_no_throw(args[0]);
    if (sub == nullptr) throw UsageError("unknown subcommand '" + args[0] + "'");

    std::set<std::string> from_flag, from_file;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const std::string name = flag_name(args[i]);
      if (!name.empty()) from_flag.insert(name);
    }
    auto merged = inject_config(sub, args, from_file);
    std::vector<std::string> reversed{merged.rbegin(), merged.rend()};
    reversed.push_back(args[0]);
    try {
      app_.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out_ << sub->help();
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      throw UsageError(std::string(e.get_name()) + ": " + e.what());
    }
    resolve_config(sub, from_flag, from_file);
    kernels::set_threads(opts_.threads);

    const std::string name = sub->get_name();
    if (name == "prepare") cmd_prepare();
    else if (name == "stats") cmd_stats();
    else if (name == "synth") cmd_synth();
    else if (name == "train") cmd_train();
    else if (name == "eval") cmd_eval();
    else if (name == "ablate") cmd_ablate();
    else if (name == "sweep-alpha") cmd_sweep();
    else if (name == "predict") cmd_predict();
    return kExitOk;
  } catch (const UsageError& e) {
    err_ << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err_ << "error: parse: " << e.what() << '\n';
  } catch (const BoundsError& e) {
    err_ << "error: bounds: " << e.what() << '\n';
  } catch (const SplitError& e) {
    err_ << "error: split: " << e.what() << '\n';
  } catch (const CapacityError& e) {
    err_ << "error: capacity: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    err_ << "error: parameter: " << e.what() << '\n';
  } catch (const NumericError& e) {
    err_ << "error: numeric: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err_ << "error: runtime: " << e.what() << '\n';
  }
  return kExitRuntime;
}

Checkpoint Cli::load_compatible(const Dataset& ds) const {
  Checkpoint ck = load_checkpoint(opts_.checkpoint);
  if (ck.params.num_entities != ds.meta.num_entities ||
      ck.params.num_relations != ds.num_relations_aug) {
    throw Error("checkpoint shape (N=" + std::to_string(ck.params.num_entities) +
                ", R_aug=" + std::to_string(ck.params.num_relations) +
                ") does not match dataset (N=" + std::to_string(ds.meta.num_entities) +
                ", R_aug=" + std::to_string(ds.num_relations_aug) + ")");
  }
  return ck;
}

HistVocab Cli::vocab_for(const Dataset& ds) const {
  return build_vocab(ds, opts_.absorb_valid,
                     opts_.vocab_mode == "count" ? VocabMode::Count : VocabMode::Binary);
}

std::span<const Quadruple> Cli::eval_split(const Dataset& ds) const {
  if (opts_.split == "valid") {
    if (ds.valid.empty()) throw Error("dataset has no validation split");
    return ds.valid;
  }
  return ds.test;
}

double Cli::eval_alpha(const Checkpoint& ck) const {
  const auto* f = config_.find("alpha");
  if (f && f->source != Provenance::Default) return opts_.alpha;
  return static_cast<double>(ck.params.alpha);
}

TrainConfig Cli::train_config(double alpha) const {
  TrainConfig c = opts_.train;
  c.alpha = alpha;
  c.vocab_mode = opts_.vocab_mode == "count" ? VocabMode::Count : VocabMode::Binary;
  c.reduction = opts_.loss == "mean" ? LossReduction::Mean : LossReduction::Sum;
  c.exec = exec();
  return c;
}

void Cli::write_csv_file(const std::string& path, const std::string& body) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << config_.render("# ") << body;
}

void Cli::emit_csv(const std::string& path, const std::string& body) {
  if (path.empty()) {
    out_ << config_.render("# ") << body;
  } else {
    write_csv_file(path, body);
  }
}

void write_dataset_config(const std::filesystem::path& dir, const RunConfig& config,
                          bool reciprocal) {
  std::ofstream f(dir / "dataset.cfg");
  if (!f) throw Error("cannot write " + (dir / "dataset.cfg").string());
  f << config.render("# ") << "granularity = 1\n"
    << "reciprocal = " << (reciprocal ? "true" : "false") << '\n';
}

void Cli::cmd_prepare() {
  DatasetMeta meta;
  const bool have_stat = !opts_.stat.empty();
  if (have_stat) meta = read_stat_file(opts_.stat);
  std::vector<Quadruple> all;
  for (const auto& path : opts_.inputs) {
    auto part = read_quadruple_file(path, have_stat ? &meta : nullptr);
    all.insert(all.end(), part.begin(), part.end());
  }
  if (!have_stat) {
    for (const auto& q : all) {
      meta.num_entities = std::max({meta.num_entities, q.subject + 1, q.object + 1});
      meta.num_relations = std::max(meta.num_relations, q.relation + 1);
    }
    if (all.empty()) throw Error("no facts and no stat file");
  }
  auto norm = normalize_timestamps(deduplicate(all), opts_.granularity);
  meta.num_snapshots = norm.num_snapshots;
  const auto split = chronological_split(norm.quads, parse_split_scheme(opts_.split_scheme));
  write_dataset_dir(opts_.out, split, meta);
  write_dataset_config(opts_.out, config_, opts_.reciprocal);

  const std::size_t factor = opts_.reciprocal ? 2 : 1;
  out_ << "num_entities=" << meta.num_entities << '\n'
       << "num_relations=" << meta.num_relations << '\n'
       << "num_relations_aug=" << factor * meta.num_relations << '\n'
       << "num_snapshots=" << meta.num_snapshots << '\n'
       << "train_facts=" << split.train.size() << '\n'
       << "valid_facts=" << split.valid.size() << '\n'
       << "test_facts=" << split.test.size() << '\n'
       << "valid_begin=" << split.valid_begin << '\n'
       << "test_begin=" << split.test_begin << '\n';
}

void Cli::cmd_stats() {
  const Dataset ds = load_dataset(opts_.data, {opts_.granularity, false});
  std::vector<Quadruple> history = ds.train;
  if (opts_.history == "train+valid") history.insert(history.end(), ds.valid.begin(), ds.valid.end());
  const auto& probe = opts_.probe == "valid" ? ds.valid : ds.test;
  const auto stats = recurrence_stats(history, probe);

  std::ostringstream body;
  body << "fact_repeat_rate=" << format_double(stats.fact_repeat_rate) << '\n'
       << "group_repeat_rate=" << format_double(stats.group_repeat_rate) << '\n'
       << "history_facts=" << history.size() << '\n'
       << "probe_facts=" << stats.probe_facts << '\n'
       << "probe_groups=" << stats.probe_groups << '\n';
  out_ << body.str();
  if (!opts_.csv.empty()) {
    std::ostringstream csv;
    csv << "metric,value\n"
        << "fact_repeat_rate," << format_double(stats.fact_repeat_rate) << '\n'
        << "group_repeat_rate," << format_double(stats.group_repeat_rate) << '\n'
        << "history_facts," << history.size() << '\n'
        << "probe_facts," << stats.probe_facts << '\n'
        << "probe_groups," << stats.probe_groups << '\n';
    write_csv_file(opts_.csv, csv.str());
  }
}

void Cli::cmd_synth() {
  const auto result = generate(opts_.synth);
  const auto split = chronological_split(result.facts, parse_split_scheme(opts_.split_scheme));
  DatasetMeta meta;
  meta.num_entities = opts_.synth.num_entities;
  meta.num_relations = opts_.synth.num_relations;
  meta.num_snapshots = opts_.synth.num_snapshots;
  write_dataset_dir(opts_.out, split, meta);
  write_dataset_config(opts_.out, config_, true);
  const auto stats = recurrence_stats(split.train, split.test);
  out_ << "facts=" << result.facts.size() << '\n'
       << "realized_repeat_rate=" << format_double(result.realized_repeat_rate) << '\n'
       << "train_facts=" << split.train.size() << '\n'
       << "valid_facts=" << split.valid.size() << '\n'
       << "test_facts=" << split.test.size() << '\n'
       << "test_fact_repeat_rate=" << format_double(stats.fact_repeat_rate) << '\n';
}

void Cli::cmd_train() {
  const Dataset ds = load();
  double alpha = opts_.alpha;
  if (alpha_opt_->count() == 0) {
    alpha = default_alpha(ds.name);
    config_.set("alpha", format_double(alpha), Provenance::Default);
  }
  const TrainConfig tc = train_config(alpha);

  FitHooks hooks;
  hooks.on_epoch = [&](const EpochLog& e) {
    out_ << "epoch=" << e.epoch << " loss=" << format_double(e.loss)
         << " seconds=" << format_double(e.seconds);
    if (e.valid_score) out_ << " valid_mrr=" << format_percent(*e.valid_score);
    out_ << '\n';
  };
  std::optional<HistVocab> valid_vocab;
  std::optional<FilterIndex> filter;
  if (tc.patience > 0 && !ds.valid.empty()) {
    valid_vocab = build_vocab(ds, false, tc.vocab_mode);
    filter = build_filter({ds.train, ds.valid, ds.test});
    hooks.validate = [&](const ModelParams<float>& params) {
      EvalConfig ec;
      ec.alpha = tc.alpha;
      ec.mask = {tc.mask_magnitude, tc.mask_in_value};
      ec.exec = tc.exec;
      return evaluate(params, ds.valid, *valid_vocab, *filter, ec, ds.meta.num_relations)
          .overall.mrr;
    };
  }
  const FitResult result = fit(ds, tc, hooks);
  save_checkpoint(opts_.out, result.params, config_.render());
  if (!opts_.log.empty()) {
    std::ostringstream csv;
    csv << "epoch,loss,seconds\n";
    for (const auto& e : result.log) {
      csv << e.epoch << ',' << format_double(e.loss) << ',' << format_double(e.seconds) << '\n';
    }
    write_csv_file(opts_.log, csv.str());
  }
  out_ << "steps=" << result.steps << '\n'
       << "best_epoch=" << result.best_epoch << '\n'
       << "checkpoint=" << opts_.out << '\n';
}

void Cli::cmd_eval() {
  const Dataset ds = load();
  const Checkpoint ck = load_compatible(ds);
  const HistVocab vocab = vocab_for(ds);
  const FilterIndex filter = build_filter({ds.train, ds.valid, ds.test});
  EvalConfig ec;
  ec.alpha = eval_alpha(ck);
  config_.set("alpha", format_double(ec.alpha), config_.find("alpha")->source);
  ec.mode = parse_mode(opts_.mode);
  ec.filter = parse_filter(opts_.filter);
  ec.mask = mask_spec(ck.params, opts_.train.mask_in_value);
  ec.exec = exec();
  const EvalReport report =
      evaluate(ck.params, eval_split(ds), vocab, filter, ec, ds.meta.num_relations);
  out_ << config_.render("# ");
  write_report(out_, report);
  if (!opts_.per_snapshot_csv.empty()) {
    std::ostringstream csv;
    write_per_snapshot_csv(csv, report);
    write_csv_file(opts_.per_snapshot_csv, csv.str());
  }
}

void Cli::cmd_ablate() {
  const Dataset ds = load();
  const Checkpoint ck = load_compatible(ds);
  const HistVocab vocab = vocab_for(ds);
  const FilterIndex filter = build_filter({ds.train, ds.valid, ds.test});
  EvalConfig ec;
  ec.alpha = eval_alpha(ck);
  config_.set("alpha", format_double(ec.alpha), config_.find("alpha")->source);
  ec.filter = parse_filter(opts_.filter);
  ec.mask = mask_spec(ck.params, opts_.train.mask_in_value);
  ec.exec = exec();

  std::ostringstream csv;
  csv << "mode,mrr,hits1,hits3,hits10\n";
  for (Mode mode : {Mode::CopyOnly, Mode::GenOnly, Mode::GenNew, Mode::Full}) {
    ec.mode = mode;
    const auto m = evaluate(ck.params, eval_split(ds), vocab, filter, ec, ds.meta.num_relations)
                       .overall;
    csv << to_string(mode) << ',' << format_percent(m.mrr) << ',' << format_percent(m.hits1)
        << ',' << format_percent(m.hits3) << ',' << format_percent(m.hits10) << '\n';
  }
  emit_csv(opts_.out, csv.str());
}

void Cli::cmd_sweep() {
  const Dataset ds = load();
  const FilterIndex filter = build_filter({ds.train, ds.valid, ds.test});
  const HistVocab vocab = vocab_for(ds);
  std::optional<Checkpoint> ck;
  if (!opts_.retrain) ck = load_compatible(ds);

  std::ostringstream csv;
  csv << "alpha,mrr,hits1,hits3,hits10\n";
  for (int i = 0; i <= 10; ++i) {
    const double alpha = i / 10.0;
    EvalConfig ec;
    ec.alpha = alpha;
    ec.filter = parse_filter(opts_.filter);
    ec.exec = exec();
    Metrics m;
    if (opts_.retrain) {
      const FitResult fitted = fit(ds, train_config(alpha));
      ec.mask = mask_spec(fitted.params, opts_.train.mask_in_value);
      m = evaluate(fitted.params, eval_split(ds), vocab, filter, ec, ds.meta.num_relations).overall;
    } else {
      ec.mask = mask_spec(ck->params, opts_.train.mask_in_value);
      m = evaluate(ck->params, eval_split(ds), vocab, filter, ec, ds.meta.num_relations).overall;
    }
    char label[16];
    std::snprintf(label, sizeof label, "%.1f", alpha);
    csv << label << ',' << format_percent(m.mrr) << ',' << format_percent(m.hits1) << ','
        << format_percent(m.hits3) << ',' << format_percent(m.hits10) << '\n';
  }
  emit_csv(opts_.out, csv.str());
}

void Cli::cmd_predict() {
  const Dataset ds = load();
  const Checkpoint ck = load_compatible(ds);
  const HistVocab vocab = vocab_for(ds);
  const Mode mode = parse_mode(opts_.mode);
  const double alpha = eval_alpha(ck);
  const Query query{opts_.subject, opts_.relation, opts_.time};
  const auto pred =
      predict_probs(ck.params, query, vocab, alpha, mode, mask_spec(ck.params, opts_.train.mask_in_value));
  const auto ranking = rank_entities(pred.combined);

  double copy_weight = alpha;
  if (mode == Mode::CopyOnly) copy_weight = 1.0;
  if (mode == Mode::GenOnly) copy_weight = 0.0;
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(opts_.topk), ranking.size());
  for (std::size_t r = 0; r < k; ++r) {
    const EntityId e = ranking[r];
    const double p = pred.combined[e];
    const double share = p > 0.0 ? copy_weight * pred.copy[e] / p : 0.0;
    out_ << r + 1 << ',' << e << ',' << format_double(p) << ',' << format_double(share) << '\n';
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

}  // namespace cygnet
