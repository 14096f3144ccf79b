#include "aim/report_io.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <unistd.h>

#include "aim/errors.hpp"

namespace aim::io {
namespace {

std::string optional_decimal(const std::optional<double>& v) { return v ? decimal(*v) : "null"; }

std::optional<double> optional_number(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string decimal(double v) {
  auto s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_bias_report(const BiasReport& report) {
  std::string out;
  for (const auto& r : report.records) {
    std::string expl;
    for (std::size_t k = 0; k < r.explanations.size(); ++k) {
      const auto& e = r.explanations[k];
      expl += fmt::format("{}{{\"contributor\":{},\"contribution\":{},\"credibility\":{},\"similarity\":{}}}",
                          k ? "," : "", e.contributor, decimal(e.contribution), decimal(e.credibility),
                          decimal(e.similarity));
    }
    out += fmt::format(
        "{{\"index\":{},\"s\":{},\"y\":{},\"credibility\":{},\"bias\":{},\"defined\":{},\"explanations\":[{}]}}\n",
        r.index, r.group, r.label, optional_decimal(r.credibility), optional_decimal(r.bias),
        r.bias ? "true" : "false", expl);
  }
  return out;
}

BiasReport parse_bias_report(const std::string& text) {
  BiasReport report;
  std::stringstream ss(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(row, e.what());
    }
    SampleAttribution r;
    try {
      r.index = j.at("index").get<std::size_t>();
      r.group = j.at("s").get<Group>();
      r.label = j.at("y").get<Label>();
      r.credibility = optional_number(j.at("credibility"));
      r.bias = optional_number(j.at("bias"));
      if (j.at("defined").get<bool>() != r.bias.has_value()) throw ParseError(row, "defined flag disagrees with bias");
      for (const auto& e : j.at("explanations")) {
        r.explanations.push_back({e.at("contributor").get<std::size_t>(), e.at("contribution").get<double>(),
                                  e.at("credibility").get<double>(), e.at("similarity").get<double>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(row, e.what());
    }
    report.credibility.values.push_back(r.credibility);
    report.bias.values.push_back(r.bias);
    report.records.push_back(std::move(r));
    ++row;
  }
  return report;
}

std::string format_removal_plan(const RemovalPlan& plan) {
  std::string out;
  if (plan.selector) {
    out += fmt::format("# removal budget={} selected={} label={} group={}\n", plan.budget, plan.indices.size(),
                       plan.selector->target_label, plan.selector->target_group);
  } else {
    out += fmt::format("# random removal budget={} selected={}\n", plan.budget, plan.indices.size());
  }
  for (auto i : plan.indices) out += fmt::format("{}\n", i);
  return out;
}

std::string format_augmentation_plan(const AugmentationPlan& plan, const Dataset& source) {
  const auto& fs = source.schema();
  std::vector<std::string> head(fs.numerical);
  head.insert(head.end(), fs.categorical.begin(), fs.categorical.end());
  head.insert(head.end(), {fs.label, fs.group, "seed", "target", "lambda"});
  std::string out = fmt::format("{}\n", fmt::join(head, ","));
  for (const auto& s : plan.samples) {
    std::vector<std::string> f;
    for (double v : s.numericals) f.push_back(fmt::format("{}", v));
    for (std::size_t k = 0; k < s.categoricals.size(); ++k) {
      f.push_back(source.categories(k)[static_cast<std::size_t>(s.categoricals[k])]);
    }
    f.push_back(source.label_tokens()[s.label]);
    f.push_back(source.group_tokens()[s.group]);
    f.push_back(std::to_string(s.seed_index));
    f.push_back(std::to_string(s.target_index));
    f.push_back(decimal(s.lambda));
    out += fmt::format("{}\n", fmt::join(f, ","));
  }
  return out;
}

std::string format_evaluation(std::string_view stage, const EvaluationResult& r) {
  return fmt::format(
      "{{\"stage\":\"{}\",\"acc\":{},\"roc_auc\":{},\"ap\":{},\"dp\":{},\"eo\":{},\"pc\":{},\"ge\":{},"
      "\"group_size\":[{},{}],\"positive_rate\":[{},{}],\"tpr\":[{},{}],\"fpr\":[{},{}]}}\n",
      stage, decimal(r.acc), optional_decimal(r.roc_auc), optional_decimal(r.ap), decimal(r.dp), decimal(r.eo),
      optional_decimal(r.pc), decimal(r.ge), r.group_size[0], r.group_size[1], decimal(r.positive_rate[0]),
      decimal(r.positive_rate[1]), decimal(r.tpr[0]), decimal(r.tpr[1]), decimal(r.fpr[0]), decimal(r.fpr[1]));
}

std::string format_edge_list(const ComparabilityGraph& g) {
  std::string out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (auto j : g.neighbors(i)) {
      if (i < j) out += fmt::format("{} {}\n", i, j);
    }
  }
  return out;
}

std::string format_similarity(const SimilarityMatrix& q) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto row = q.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out += fmt::format("{}{:.12e}", j ? " " : "", row[j]);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += fmt::format(".tmp.{}.{}", ::getpid(), counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

}  // namespace aim::io
