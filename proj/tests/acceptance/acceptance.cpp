// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aim/attribution.hpp"
#include "aim/diagnostics.hpp"
#include "aim/metrics.hpp"
#include "aim/mitigation.hpp"
#include "aim/model.hpp"
#include "aim/synth.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace aim;

namespace {

// Every attributed instance is kept so criteria 4 and 8 can sweep the whole suite.
struct Attributed {
  std::string name;
  Dataset d;
  ComparabilityGraph g;
  SimilarityMatrix q;
  CredibilityVector c;
  BiasVector b;
};

std::vector<Attributed>& suite() {
  static std::vector<Attributed> s;
  return s;
}

const Attributed& attribute_and_keep(std::string name, const Dataset& d, const AttributionOptions& opts) {
  Attributed a;
  a.name = std::move(name);
  a.d = d;
  a.g = build_comparability_graph(d, opts.comparability);
  a.q = compute_similarity(d, opts);
  a.c = estimate_credibility(d, a.q);
  a.b = estimate_bias(d, a.q, a.c);
  suite().push_back(std::move(a));
  return suite().back();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  fmt::print("{} [{}] {}: {}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

// 1. Synthetic detection accuracy >= 0.95 on the target group, < 60 s each.
Outcome synthetic_detection() {
  Outcome o;
  std::vector<std::string> parts;
  for (const char* kind : {"group", "individual"}) {
    for (std::uint64_t seed : {0, 1, 2}) {
      synth::SynthConfig cfg;
      cfg.seed = seed;
      const auto t0 = std::chrono::steady_clock::now();
      const auto base = synth::generate_base(cfg);
      const auto data = std::string(kind) == "group" ? synth::inject_group_bias(base, cfg)
                                                     : synth::inject_individual_bias(base, cfg);
      const auto d = apply_normalization(data.data, fit_normalization(data.data));
      const auto& a = attribute_and_keep(fmt::format("synth-{}-{}", kind, seed), d, {});
      const double acc = synth::detection_accuracy(a.b, data.truth, d.groups());
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (acc < 0.95 || secs >= 60.0) o.pass = false;
      parts.push_back(fmt::format("{}/seed{} acc={:.4f} t={:.2f}s", kind, seed, acc, secs));
    }
  }
  o.detail = fmt::format("{}", fmt::join(parts, ", "));
  return o;
}

testing::Rng instance_rng(55);

Attributed random_small_instance(int trial) {
  std::uniform_int_distribution<std::size_t> size(2, 30);
  std::uniform_real_distribution<double> damping(0.05, 0.95);
  std::uniform_real_distribution<double> tr(0.15, 0.6);
  const auto d = testing::random_dataset(
      instance_rng, {.n = size(instance_rng), .numerical = 2, .categorical = 2, .categories = 3,
                     .levels = trial % 2 ? 0 : 5});
  AttributionOptions opts;
  opts.comparability = {.numerical_threshold = tr(instance_rng), .categorical_threshold = 1};
  opts.damping = damping(instance_rng);
  return attribute_and_keep(fmt::format("small-{}", trial), d, opts);
}

// 2. Closed forms equal the grid-scan minimizers of the regression objectives.
Outcome closed_form_argmin() {
  Outcome o;
  std::size_t checked_b = 0, checked_c = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_small_instance(trial);
    const testing::DenseQ q = a.q.values();
    std::vector<double> cw(a.d.size());
    for (std::size_t j = 0; j < a.d.size(); ++j) cw[j] = a.c.weight(j);
    for (std::size_t i = 0; i < a.d.size(); ++i) {
      const auto c_star = testing::credibility_by_argmin(q, a.d.labels(), a.d.groups(), i);
      if (c_star.has_value() != a.c.defined(i)) ++bad;
      if (c_star && a.c.defined(i)) {
        ++checked_c;
        const double err = std::abs(*c_star - *a.c.values[i]);
        worst = std::max(worst, err);
        if (err > 1e-3) ++bad;
      }
      const auto b_star = testing::bias_by_argmin(q, a.d.labels(), a.d.groups(), cw, i);
      if (b_star.has_value() != a.b.defined(i)) ++bad;
      if (b_star && a.b.defined(i)) {
        ++checked_b;
        const double err = std::abs(*b_star - *a.b.values[i]);
        worst = std::max(worst, err);
        if (err > 1e-3) ++bad;
      }
    }
  }
  o.pass = bad == 0 && checked_b > 0;
  o.detail = fmt::format("50 instances, {} bias and {} credibility entries, {} failures, max |diff| = {:.2e}",
                         checked_b, checked_c, bad, worst);
  return o;
}

// 3. Dense and iterative RWR agree within 1e-8; p = 0 gives the identity.
Outcome rwr_backends() {
  Outcome o;
  testing::Rng rng(77);
  std::uniform_int_distribution<std::size_t> size(2, 200);
  std::uniform_real_distribution<double> density(0.005, 0.2);
  double worst = 0.0;
  bool identity = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_graph(rng, size(rng), density(rng));
    const auto w = symmetric_normalize(g);
    for (double p : {0.1, 0.5, 0.9}) {
      const auto dense = rwr_proximity(w, p, {.solver = RwrSolver::dense});
      const auto iter = rwr_proximity(w, p, {.solver = RwrSolver::iterative});
      worst = std::max(worst, (dense.values() - iter.values()).cwiseAbs().maxCoeff());
    }
    for (auto solver : {RwrSolver::dense, RwrSolver::iterative}) {
      const auto q0 = rwr_proximity(w, 0.0, {.solver = solver});
      if (!(q0.values() == RealMatrix::Identity(q0.values().rows(), q0.values().cols()))) identity = false;
    }
  }
  o.pass = worst <= 1e-8 && identity;
  o.detail = fmt::format("20 graphs x p in {{0.1,0.5,0.9}}: max |dense - iterative| = {:.2e}; p=0 identity: {}",
                         worst, identity ? "exact" : "NOT exact");
  return o;
}

struct ArmMetrics {
  double dp = 0.0;
  double eo = 0.0;
  double eo_recorded = 0.0;
};

ArmMetrics train_and_score(const Dataset& train, const Dataset& test, const std::vector<Label>& reference) {
  const auto clf = train_classifier(encode_features(train), train.labels());
  const auto p = predict(clf, encode_features(test));
  return {demographic_parity(p.labels, test.groups()), equalized_odds(p.labels, reference, test.groups()),
          equalized_odds(p.labels, test.labels(), test.groups())};
}

// 5. AIM removal beats random removal on DP (by >= 0.05) and EO, averaged over 5 seeds.
Outcome mitigation_trend() {
  Outcome o;
  ArmMetrics aim_avg, rnd_avg, before_avg;
  std::vector<std::string> per_seed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    synth::SynthConfig cfg;
    cfg.seed = seed;
    const auto data = synth::inject_group_bias(synth::generate_base(cfg), cfg);
    const auto split = stratified_split(data.data, seed).front();
    const auto norm = fit_normalization(data.data.subset(split.train));
    const auto train = apply_normalization(data.data.subset(split.train), norm);
    const auto test = apply_normalization(data.data.subset(split.test), norm);
    std::vector<Label> reference = test.labels();
    for (std::size_t k = 0; k < split.test.size(); ++k) {
      if (data.truth.biased[split.test[k]]) reference[k] = 1 - reference[k];
    }
    std::size_t k = 0;
    for (auto i : split.train) k += data.truth.biased[i];

    const auto& a = attribute_and_keep(fmt::format("mitigation-train-{}", seed), train, {});
    const auto plan = plan_removal(train, a.b, k);
    const auto control = plan_random_removal(train, k, seed + 1000);
    const auto before = train_and_score(train, test, reference);
    const auto aim_arm = train_and_score(apply_plan(train, plan), test, reference);
    const auto rnd_arm = train_and_score(apply_plan(train, control), test, reference);
    before_avg.dp += before.dp / 5;
    before_avg.eo += before.eo / 5;
    aim_avg.dp += aim_arm.dp / 5;
    aim_avg.eo += aim_arm.eo / 5;
    aim_avg.eo_recorded += aim_arm.eo_recorded / 5;
    rnd_avg.dp += rnd_arm.dp / 5;
    rnd_avg.eo += rnd_arm.eo / 5;
    rnd_avg.eo_recorded += rnd_arm.eo_recorded / 5;
    per_seed.push_back(fmt::format("k={}", k));
  }
  o.pass = aim_avg.dp + 0.05 <= rnd_avg.dp && aim_avg.eo < rnd_avg.eo;
  o.detail = fmt::format(
      "mean over 5 seeds ({}): DP aim={:.4f} random={:.4f} (margin {:.4f}); EO aim={:.4f} random={:.4f}; "
      "before DP={:.4f} EO={:.4f}; EO vs recorded labels aim={:.4f} random={:.4f}",
      fmt::join(per_seed, " "), aim_avg.dp, rnd_avg.dp, rnd_avg.dp - aim_avg.dp, aim_avg.eo, rnd_avg.eo,
      before_avg.dp, before_avg.eo, aim_avg.eo_recorded, rnd_avg.eo_recorded);
  return o;
}

// 6. Synthetic samples stay in the seed-target box, categoricals come from the
// pair, and the minority fraction grows.
Outcome augmentation_coherence() {
  Outcome o;
  testing::Rng rng(66);
  std::size_t samples = 0, violations = 0, plans = 0, shrinking = 0;
  auto check = [&](const Dataset& d, const SimilarityMatrix& q, const BiasVector& b, std::uint64_t seed) {
    AugmentationOptions opts{.budget = 60, .neighbors = 5, .seed = seed};
    const auto pos = std::count(d.labels().begin(), d.labels().end(), Label{1});
    if (2 * static_cast<std::size_t>(pos) == d.size()) opts.majority_override = Label{0};
    const auto plan = synthesize_fair_samples(d, b, q, opts);
    ++plans;
    for (const auto& s : plan.samples) {
      ++samples;
      const auto rs = d.numerical_row(s.seed_index);
      const auto rt = d.numerical_row(s.target_index);
      for (std::size_t k = 0; k < rs.size(); ++k) {
        if (s.numericals[k] < std::min(rs[k], rt[k]) || s.numericals[k] > std::max(rs[k], rt[k])) ++violations;
      }
      const auto ds = d.categorical_row(s.seed_index);
      const auto dt = d.categorical_row(s.target_index);
      for (std::size_t k = 0; k < ds.size(); ++k) {
        if (s.categoricals[k] != ds[k] && s.categoricals[k] != dt[k]) ++violations;
      }
    }
    const Label minority = plan.selector.target_label;
    const auto frac = [&](const Dataset& x) {
      return static_cast<double>(std::count(x.labels().begin(), x.labels().end(), minority)) /
             static_cast<double>(x.size());
    };
    if (!(frac(apply_plan(d, plan)) > frac(d))) ++shrinking;
  };
  diag::WarningCapture quiet;
  for (const auto& a : suite()) {
    if (a.name.rfind("synth-", 0) == 0 || a.name.rfind("mitigation-", 0) == 0) check(a.d, a.q, a.b, plans);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = testing::random_dataset(rng, {.n = 120, .numerical = 3, .categorical = 3, .categories = 3});
    AttributionOptions opts;
    opts.comparability = {.numerical_threshold = 0.3, .categorical_threshold = 2};
    const auto& a = attribute_and_keep(fmt::format("aug-random-{}", trial), d, opts);
    check(a.d, a.q, a.b, static_cast<std::uint64_t>(trial));
  }
  o.pass = violations == 0 && shrinking == 0 && samples > 0;
  o.detail = fmt::format("{} plans, {} synthetic rows, {} coordinate violations, {} plans without minority growth",
                         plans, samples, violations, shrinking);
  return o;
}

// 7. AUC, PC and GE against independent recounts.
Outcome metric_oracles() {
  Outcome o;
  testing::Rng rng(88);
  std::uniform_int_distribution<std::size_t> size(2, 50);
  std::uniform_int_distribution<int> level(0, 8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double auc_worst = 0.0, ge_worst = 0.0;
  std::size_t pc_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = size(rng);
    auto y = testing::random_labels(rng, n);
    y[0] = 0;
    y[1] = 1;
    std::vector<double> scores(n);
    for (auto& s : scores) s = level(rng) / 8.0;
    auc_worst = std::max(auc_worst, std::abs(roc_auc(scores, y) - testing::auc_by_pairs(scores, y)));

    DesignMatrix x;
    x.values.resize(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < x.values.rows(); ++i) {
      x.values.row(i) << gauss(rng), gauss(rng), (y[static_cast<std::size_t>(i)] ^ (i % 3 == 0)) ? 1.0 : 0.0;
    }
    x.columns.resize(3);
    x.columns[2].kind = ColumnKind::group;
    x.group_column = 2;
    Eigen::VectorXd w(3);
    w << gauss(rng), gauss(rng), 2.0 * gauss(rng);
    const Classifier c(w, gauss(rng), {}, 2);
    std::size_t same = 0;
    for (Eigen::Index i = 0; i < x.values.rows(); ++i) {
      const double base = w[0] * x.values(i, 0) + w[1] * x.values(i, 1) + c.intercept();
      const bool a = base + w[2] * x.values(i, 2) >= 0.0;
      const bool b = base + w[2] * (1.0 - x.values(i, 2)) >= 0.0;
      same += a == b;
    }
    if (prediction_consistency(c, x) != static_cast<double>(same) / static_cast<double>(n)) ++pc_mismatch;

    std::vector<double> benefits(n);
    for (auto& v : benefits) v = level(rng) % 3;
    ge_worst = std::max(ge_worst, std::abs(generalized_entropy_of_benefits(benefits) - testing::ge2_oracle(benefits)));
  }
  const double ge02 = generalized_entropy_of_benefits(std::vector<double>{0.0, 2.0});
  o.pass = auc_worst <= 1e-12 && pc_mismatch == 0 && ge02 == 0.5 && ge_worst <= 1e-12;
  o.detail = fmt::format("200 instances n<=50: max AUC diff {:.1e}, PC mismatches {}, GE(0,2) = {}, max GE diff {:.1e}",
                         auc_worst, pc_mismatch, ge02, ge_worst);
  return o;
}

void isolated_instance() {
  // Rows 3 and 4 have no comparable partner.
  const auto d = testing::line_dataset({0.0, 0.05, 0.1, 0.5, 0.9}, {1, 0, 1, 0, 1}, {0, 1, 0, 1, 0});
  attribute_and_keep("isolated", d, {});
}

// 4. Contributions sum to the bias for every defined entry in the suite.
Outcome decomposition() {
  Outcome o;
  std::size_t checked = 0;
  double worst = 0.0;
  for (const auto& a : suite()) {
    for (std::size_t i = 0; i < a.d.size(); ++i) {
      if (!a.b.defined(i)) continue;
      double sum = 0.0;
      for (const auto& e : all_contributions(a.d, a.q, a.c, i)) sum += e.contribution;
      worst = std::max(worst, std::abs(sum - *a.b.values[i]));
      ++checked;
    }
  }
  o.pass = worst <= 1e-10 && checked > 0;
  o.detail = fmt::format("{} instances, {} defined samples, max |sum - b| = {:.2e}", suite().size(), checked, worst);
  return o;
}

// 8. Defined estimates lie in [0,1]; isolated vertices have c = 1 and undefined b.
Outcome ranges_and_flags() {
  Outcome o;
  std::size_t out_of_range = 0, isolated = 0, isolated_bad = 0;
  for (const auto& a : suite()) {
    for (std::size_t i = 0; i < a.d.size(); ++i) {
      for (const auto& v : {a.c.values[i], a.b.values[i]}) {
        if (v && (*v < 0.0 || *v > 1.0)) ++out_of_range;
      }
      if (a.g.degree(i) == 0) {
        ++isolated;
        if (!(a.c.defined(i) && *a.c.values[i] == 1.0 && !a.b.defined(i))) ++isolated_bad;
      }
    }
  }
  o.pass = out_of_range == 0 && isolated_bad == 0 && isolated > 0;
  o.detail = fmt::format("{} instances: {} out-of-range entries; {} isolated vertices, {} with wrong flags",
                         suite().size(), out_of_range, isolated, isolated_bad);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::pair<std::string, std::function<Outcome()>>>> order{
      {1, {"synthetic bias detection", synthetic_detection}},
      {2, {"closed form vs argmin", closed_form_argmin}},
      {3, {"RWR backend agreement", rwr_backends}},
      {5, {"mitigation trend vs random removal", mitigation_trend}},
      {6, {"augmentation coherence", augmentation_coherence}},
      {7, {"metric oracles", metric_oracles}},
  };
  std::vector<std::pair<int, std::pair<std::string, Outcome>>> results;
  for (const auto& [id, entry] : order) results.push_back({id, {entry.first, entry.second()}});
  isolated_instance();
  results.push_back({4, {"contribution decomposition", decomposition()}});
  results.push_back({8, {"range and flag invariants", ranges_and_flags()}});
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [id, r] : results) report(id, r.first, r.second);
  fmt::print("{} of {} criteria passed\n", results.size() - static_cast<std::size_t>(failures), results.size());
  return failures == 0 ? 0 : 1;
}
