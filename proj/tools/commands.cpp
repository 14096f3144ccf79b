#include "commands.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "aim/attribution.hpp"
#include "aim/dataset.hpp"
#include "aim/diagnostics.hpp"
#include "aim/errors.hpp"
#include "aim/metrics.hpp"
#include "aim/mitigation.hpp"
#include "aim/model.hpp"
#include "aim/report_io.hpp"
#include "aim/synth.hpp"

namespace aim::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string input;
  std::string schema;
  std::string out;
  std::string truth;
  double tr = 0.1;
  int td = 2;
  double damping = 0.1;
  std::size_t budget = 0;
  std::string strategy = "rem";
  std::size_t neighbors = 5;
  std::size_t topk = 5;
  std::uint64_t seed = 0;
  std::string control = "none";
  std::string similarity = "rwr";
  std::string solver = "dense";
  std::optional<int> tie_majority;
  std::size_t index = 0;

  // synth
  std::string kind = "group";
  std::size_t n_per_group = 500;
  double shift = 0.2;
  double flip_rate = 0.10;
  double threshold = 0.5;
};

AttributionOptions attribution_options(const RunConfig& cfg) {
  AttributionOptions o;
  o.comparability.numerical_threshold = cfg.tr;
  o.comparability.categorical_threshold = cfg.td;
  o.damping = cfg.damping;
  o.similarity = cfg.similarity == "adjacency" ? SimilarityMode::adjacency : SimilarityMode::rwr;
  o.rwr.solver = cfg.solver == "iterative" ? RwrSolver::iterative : RwrSolver::dense;
  o.top_k = cfg.topk;
  o.comparability.validate();
  return o;
}

std::optional<Label> tie_override(const RunConfig& cfg) {
  if (!cfg.tie_majority) return std::nullopt;
  return static_cast<Label>(*cfg.tie_majority);
}

struct LoadedData {
  SchemaDescriptor schema;
  Dataset raw;
};

LoadedData load(const RunConfig& cfg) {
  auto schema = load_schema(cfg.schema);
  auto raw = load_dataset(cfg.input, schema);
  if (raw.size() == 0) throw ValidationError("input dataset has no rows");
  return {std::move(schema), std::move(raw)};
}

std::optional<synth::GroundTruth> load_truth(const RunConfig& cfg, std::size_t n) {
  if (cfg.truth.empty()) return std::nullopt;
  auto truth = synth::parse_truth(io::read_file(cfg.truth));
  if (truth.biased.size() != n) {
    throw ValidationError(fmt::format("truth file has {} flags for {} rows", truth.biased.size(), n));
  }
  return truth;
}

std::string feature_summary(const Dataset& raw, std::size_t i) {
  std::vector<std::string> parts;
  const auto r = raw.numerical_row(i);
  for (std::size_t k = 0; k < r.size(); ++k) parts.push_back(fmt::format("{}={}", raw.schema().numerical[k], r[k]));
  const auto c = raw.categorical_row(i);
  for (std::size_t k = 0; k < c.size(); ++k) {
    parts.push_back(fmt::format("{}={}", raw.schema().categorical[k], raw.categories(k)[static_cast<std::size_t>(c[k])]));
  }
  return fmt::format("{}", fmt::join(parts, " "));
}

int cmd_attribute(const RunConfig& cfg, std::ostream& out) {
  const auto options = attribution_options(cfg);
  const auto data = load(cfg);
  const auto truth = load_truth(cfg, data.raw.size());
  const auto d = apply_normalization(data.raw, fit_normalization(data.raw));
  const auto report = attribute(d, options);

  if (report.num_defined_bias() == 0) {
    diag::warn("no sample has comparable other-group evidence; every bias score is undefined");
  }
  fs::create_directories(cfg.out);
  const auto path = fs::path(cfg.out) / "bias_report.jsonl";
  io::write_file_atomic(path, io::format_bias_report(report));

  fmt::print(out, "samples {}  defined_bias {}  biased(>{}) {}\n", d.size(), report.num_defined_bias(), kBiasThreshold,
             report.num_biased());
  if (truth) {
    const auto acc = synth::detection_accuracy(report.bias, *truth, d.groups());
    fmt::print(out, "detection_accuracy {}\n", io::decimal(acc));
  }
  fmt::print(out, "wrote {}\n", path.string());
  return kOk;
}

int cmd_explain(const RunConfig& cfg, std::ostream& out) {
  auto options = attribution_options(cfg);
  const auto data = load(cfg);
  if (cfg.index >= data.raw.size()) {
    throw ValidationError(fmt::format("sample index {} out of range (n = {})", cfg.index, data.raw.size()));
  }
  const auto d = apply_normalization(data.raw, fit_normalization(data.raw));
  const auto q = compute_similarity(d, options);
  const auto c = estimate_credibility(d, q);
  const auto b = estimate_bias(d, q, c);
  const auto i = cfg.index;
  if (!b.defined(i)) throw UndefinedBiasError();
  const auto rows = bias_contributions(d, q, c, i, cfg.topk);

  fmt::print(out, "query {}  s={} y={}  bias={}  credibility={}  {}\n", i, data.raw.group_tokens()[d.group(i)],
             data.raw.label_tokens()[d.label(i)], io::decimal(*b.values[i]),
             c.values[i] ? io::decimal(*c.values[i]) : "undefined", feature_summary(data.raw, i));
  fmt::print(out, "{:>4}  {:>7}  {:>12}  {:>12}  {:>12}  {:>10}  {:>10}  {}\n", "rank", "index", "contribution",
             "credibility", "similarity", "s", "y", "features");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& e = rows[r];
    fmt::print(out, "{:>4}  {:>7}  {:>12}  {:>12}  {:>12}  {:>10}  {:>10}  {}\n", r + 1, e.contributor,
               io::decimal(e.contribution), io::decimal(e.credibility), io::decimal(e.similarity),
               data.raw.group_tokens()[d.group(e.contributor)], data.raw.label_tokens()[d.label(e.contributor)],
               feature_summary(data.raw, e.contributor));
  }
  return kOk;
}

struct Arm {
  std::string name;
  Dataset train;
};

int cmd_mitigate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.strategy != "rem" && cfg.strategy != "aug") throw ValidationError("strategy must be rem or aug");
  if (cfg.control == "random" && cfg.strategy != "rem") {
    throw ValidationError("the random control is defined for the removal strategy only");
  }
  const auto options = attribution_options(cfg);
  const auto data = load(cfg);
  const auto truth = load_truth(cfg, data.raw.size());

  const auto split = stratified_split(data.raw, cfg.seed).front();
  const auto norm = fit_normalization(data.raw.subset(split.train));
  const auto train = apply_normalization(data.raw.subset(split.train), norm);
  const auto test = apply_normalization(data.raw.subset(split.test), norm);

  auto eval_labels = test.labels();
  if (truth) {
    // Score against the reference labels: undo the recorded bias on test rows.
    for (std::size_t k = 0; k < split.test.size(); ++k) {
      if (truth->biased[split.test[k]]) eval_labels[k] = 1 - eval_labels[k];
    }
  }

  const auto q = compute_similarity(train, options);
  const auto report = attribute(train, q, options);

  std::vector<Arm> arms;
  arms.push_back({"before", train});
  std::string plan_text;
  std::string plan_name;
  Dataset edited_full;
  if (cfg.strategy == "rem") {
    auto plan = plan_removal(train, report.bias, cfg.budget, tie_override(cfg));
    arms.push_back({"after", apply_plan(train, plan)});
    RemovalPlan global = plan;
    for (auto& idx : global.indices) idx = split.train[idx];
    plan_text = io::format_removal_plan(global);
    plan_name = "removal_plan.txt";
    edited_full = apply_plan(data.raw, global);
    if (cfg.control == "random") {
      const auto control = plan_random_removal(train, plan.indices.size(), cfg.seed + 1);
      arms.push_back({"control_random", apply_plan(train, control)});
    }
  } else {
    AugmentationOptions aug;
    aug.budget = cfg.budget;
    aug.neighbors = cfg.neighbors;
    aug.seed = cfg.seed;
    aug.majority_override = tie_override(cfg);
    const auto plan = synthesize_fair_samples(train, report.bias, q, aug);
    arms.push_back({"after", apply_plan(train, plan)});
    AugmentationPlan global = plan;
    for (auto& s : global.samples) {
      s.seed_index = split.train[s.seed_index];
      s.target_index = split.train[s.target_index];
    }
    // Synthetic rows are returned to the original feature scale.
    AugmentationPlan raw_scale = global;
    for (auto& s : raw_scale.samples) {
      for (std::size_t k = 0; k < s.numericals.size(); ++k) {
        const auto [lo, hi] = norm.ranges[k];
        s.numericals[k] = s.numericals[k] * (hi - lo) + lo;
      }
    }
    plan_text = io::format_augmentation_plan(raw_scale, data.raw);
    plan_name = "augmentation_plan.csv";
    edited_full = apply_plan(data.raw, raw_scale);
  }

  const auto x_test = encode_features(test);
  std::string evaluation;
  fmt::print(out, "{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}\n", "stage", "acc", "roc", "ap", "dp", "eo",
             "pc", "ge", "n_train");
  for (const auto& arm : arms) {
    const auto clf = train_classifier(encode_features(arm.train), arm.train.labels());
    const auto r = evaluate(clf, x_test, eval_labels, test.groups());
    evaluation += io::format_evaluation(arm.name, r);
    fmt::print(out, "{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7}\n", arm.name, io::decimal(r.acc),
               r.roc_auc ? io::decimal(*r.roc_auc) : "-", r.ap ? io::decimal(*r.ap) : "-", io::decimal(r.dp),
               io::decimal(r.eo), r.pc ? io::decimal(*r.pc) : "-", io::decimal(r.ge), arm.train.size());
  }

  fs::create_directories(cfg.out);
  const fs::path dir(cfg.out);
  io::write_file_atomic(dir / "edited.csv", format_dataset(edited_full, data.schema.delimiter));
  io::write_file_atomic(dir / plan_name, plan_text);
  io::write_file_atomic(dir / "evaluation.jsonl", evaluation);
  fmt::print(out, "wrote {}, {}, {}\n", (dir / "edited.csv").string(), (dir / plan_name).string(),
             (dir / "evaluation.jsonl").string());
  return kOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  synth::SynthConfig sc;
  sc.n_per_group = cfg.n_per_group;
  sc.shift = cfg.shift;
  sc.flip_rate = cfg.flip_rate;
  sc.threshold = cfg.threshold;
  sc.seed = cfg.seed;
  const auto base = synth::generate_base(sc);
  synth::BiasedDataset variant;
  if (cfg.kind == "group") {
    variant = synth::inject_group_bias(base, sc);
  } else if (cfg.kind == "individual") {
    variant = synth::inject_individual_bias(base, sc);
  } else if (cfg.kind == "none") {
    variant = {base, {std::vector<std::uint8_t>(base.size(), 0)}};
  } else {
    throw ValidationError("kind must be group, individual or none");
  }
  fs::create_directories(cfg.out);
  const fs::path dir(cfg.out);
  io::write_file_atomic(dir / "data.csv", format_dataset(variant.data));
  io::write_file_atomic(dir / "schema.txt", synth::synthetic_schema_text(sc.dim));
  io::write_file_atomic(dir / "truth.txt", synth::format_truth(variant.truth));
  fmt::print(out, "samples {}  biased {}  wrote {}\n", variant.data.size(), variant.truth.count(), dir.string());
  return kOk;
}

void add_similarity_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--tr", cfg.tr, "Numerical disparity threshold (normalized units)")->capture_default_str();
  app->add_option("--td", cfg.td, "Maximum number of differing categorical features")->capture_default_str();
  app->add_option("--damping", cfg.damping, "RWR damping factor p in [0,1)")->capture_default_str();
  app->add_option("--similarity", cfg.similarity, "Similarity source")
      ->check(CLI::IsMember({"rwr", "adjacency"}))
      ->capture_default_str();
  app->add_option("--solver", cfg.solver, "RWR backend")
      ->check(CLI::IsMember({"dense", "iterative"}))
      ->capture_default_str();
}

void add_input_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--input", cfg.input, "Delimited data file with a header row")->required();
  app->add_option("--schema", cfg.schema, "Schema descriptor (key = value lines)")->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Sample-level bias attribution, explanation and mitigation for tabular data", "aim"};
  app.require_subcommand(1);

  auto* attribute_cmd = app.add_subcommand("attribute", "Score every sample's credibility and bias");
  add_input_flags(attribute_cmd, cfg);
  add_similarity_flags(attribute_cmd, cfg);
  attribute_cmd->add_option("--out", cfg.out, "Output directory")->required();
  attribute_cmd->add_option("--topk", cfg.topk, "Explanations kept per sample")->capture_default_str();
  attribute_cmd->add_option("--truth", cfg.truth, "0/1 ground-truth flags; reports detection accuracy");

  auto* explain_cmd = app.add_subcommand("explain", "Show the contributors behind one sample's bias");
  add_input_flags(explain_cmd, cfg);
  add_similarity_flags(explain_cmd, cfg);
  explain_cmd->add_option("--index", cfg.index, "0-based row of the query sample")->required();
  explain_cmd->add_option("--topk", cfg.topk, "Contributors to show")->capture_default_str();

  auto* mitigate_cmd = app.add_subcommand("mitigate", "Edit the training split and compare fairness before/after");
  add_input_flags(mitigate_cmd, cfg);
  add_similarity_flags(mitigate_cmd, cfg);
  mitigate_cmd->add_option("--out", cfg.out, "Output directory")->required();
  mitigate_cmd->add_option("--budget", cfg.budget, "Samples to remove or synthesize")->capture_default_str();
  mitigate_cmd->add_option("--strategy", cfg.strategy, "rem (removal) or aug (augmentation)")
      ->check(CLI::IsMember({"rem", "aug"}))
      ->capture_default_str();
  mitigate_cmd->add_option("--neighbors", cfg.neighbors, "Mixup neighborhood size")->capture_default_str();
  mitigate_cmd->add_option("--seed", cfg.seed, "Seed for the split, mixup and control")->capture_default_str();
  mitigate_cmd->add_option("--control", cfg.control, "Add a random-removal control arm")
      ->check(CLI::IsMember({"none", "random"}))
      ->capture_default_str();
  mitigate_cmd->add_option("--truth", cfg.truth, "0/1 flags; test labels are scored after undoing flagged bias");
  mitigate_cmd->add_option("--tie-majority", cfg.tie_majority, "Majority label to assume on an exact class tie")
      ->check(CLI::Range(0, 1));

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with injected discrimination");
  synth_cmd->add_option("--out", cfg.out, "Output directory")->required();
  synth_cmd->add_option("--kind", cfg.kind, "group, individual or none")
      ->check(CLI::IsMember({"group", "individual", "none"}))
      ->capture_default_str();
  synth_cmd->add_option("--n", cfg.n_per_group, "Samples per group")->capture_default_str();
  synth_cmd->add_option("--shift", cfg.shift, "Target-group threshold shift")->capture_default_str();
  synth_cmd->add_option("--flip-rate", cfg.flip_rate, "Fraction of target-group labels flipped")->capture_default_str();
  synth_cmd->add_option("--threshold", cfg.threshold, "Reference decision threshold")->capture_default_str();
  synth_cmd->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  struct WarningsTo {
    diag::WarningHandler previous;
    explicit WarningsTo(std::ostream& os)
        : previous(diag::set_warning_handler([&os](const std::string& m) { os << "warning: " << m << '\n'; })) {}
    ~WarningsTo() { diag::set_warning_handler(previous); }
  } warnings_to(err);

  try {
    if (attribute_cmd->parsed()) return cmd_attribute(cfg, out);
    if (explain_cmd->parsed()) return cmd_explain(cfg, out);
    if (mitigate_cmd->parsed()) return cmd_mitigate(cfg, out);
    if (synth_cmd->parsed()) return cmd_synth(cfg, out);
  } catch (const UndefinedBiasError& e) {
    err << "error: " << e.what() << '\n';
    return kUndefinedBias;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const ClassTieError& e) {
    err << "error: " << e.what() << '\n';
    return kClassTie;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace aim::cli
