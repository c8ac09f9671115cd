#include "klrfs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "klrfs/error.hpp"

namespace klrfs {

std::vector<std::size_t> FeatureRanking::Top(std::size_t p) const {
  if (p > order.size()) Fail(ErrorKind::kParameter, "ranking has fewer than " + std::to_string(p) + " features");
  std::vector<std::size_t> out;
  out.reserve(p);
  for (std::size_t k = 0; k < p; ++k) out.push_back(static_cast<std::size_t>(order[k]));
  return out;
}

std::vector<Index> OrderByScore(std::span<const double> scores) {
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  auto key = [&](Index i) {
    const double s = scores[static_cast<std::size_t>(i)];
    return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
  };
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return key(a) > key(b); });
  return order;
}

FeatureRanking AnovaRank(const DataMatrix& x) {
  x.Validate();
  std::vector<Index> pos, neg;
  for (std::size_t i = 0; i < x.labels.size(); ++i) (x.labels[i] == 1 ? pos : neg).push_back(static_cast<Index>(i));
  if (pos.size() < 2 || neg.size() < 2) Fail(ErrorKind::kDegenerate, "ANOVA needs at least 2 samples per class");

  const double n1 = static_cast<double>(pos.size()), n2 = static_cast<double>(neg.size());
  const double n = n1 + n2;
  FeatureRanking r;
  r.method = "anova";
  r.scores.resize(static_cast<std::size_t>(x.features()));
  for (Index f = 0; f < x.features(); ++f) {
    double m1 = 0.0, m2 = 0.0;
    for (Index i : pos) m1 += x.values(i, f);
    for (Index i : neg) m2 += x.values(i, f);
    m1 /= n1;
    m2 /= n2;
    double ss_within = 0.0;
    for (Index i : pos) ss_within += (x.values(i, f) - m1) * (x.values(i, f) - m1);
    for (Index i : neg) ss_within += (x.values(i, f) - m2) * (x.values(i, f) - m2);
    const double grand = (n1 * m1 + n2 * m2) / n;
    const double ss_between = n1 * (m1 - grand) * (m1 - grand) + n2 * (m2 - grand) * (m2 - grand);
    double score;
    if (ss_within <= 0.0) {
      score = ss_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      score = ss_between / (ss_within / (n - 2.0));
    }
    r.scores[static_cast<std::size_t>(f)] = score;
  }
  r.order = OrderByScore(r.scores);
  return r;
}

namespace {

Index DropCount(Index remaining, Index p_select, double drop_fraction) {
  const auto want = static_cast<Index>(std::ceil(drop_fraction * static_cast<double>(remaining)));
  return std::min(std::max<Index>(want, 1), remaining - p_select);
}

}  // namespace

std::size_t RfeRounds(Index n, Index p_select, double drop_fraction) {
  std::size_t rounds = 1;
  for (Index remaining = n; remaining > p_select; ++rounds) {
    remaining -= DropCount(remaining, p_select, drop_fraction);
  }
  return rounds;
}

FeatureRanking SvmRfe(const DataMatrix& x, const RfeOptions& options) {
  x.Validate();
  const Index n = x.features();
  if (options.p_select < 1 || options.p_select > n) {
    Fail(ErrorKind::kParameter, "p_select must lie in [1, " + std::to_string(n) + "]");
  }
  if (!(options.drop_fraction > 0.0 && options.drop_fraction < 1.0)) {
    Fail(ErrorKind::kParameter, "drop_fraction must lie in (0, 1)");
  }

  std::vector<std::size_t> alive(static_cast<std::size_t>(n));
  std::iota(alive.begin(), alive.end(), std::size_t{0});
  std::vector<Index> eliminated;  // in elimination order
  SvcOptions svc{options.C, options.tol};

  Vector w;
  while (true) {
    const DataMatrix sub = x.SelectColumns(alive);
    const SvcModel model = FitSvc(LinearGram(sub.values), sub.labels, svc);
    w = LinearWeights(model, sub.values);
    const auto remaining = static_cast<Index>(alive.size());
    if (remaining <= options.p_select) break;

    std::vector<Index> by_weight(alive.size());
    std::iota(by_weight.begin(), by_weight.end(), Index{0});
    std::stable_sort(by_weight.begin(), by_weight.end(),
                     [&](Index a, Index b) { return std::abs(w(a)) < std::abs(w(b)); });
    const Index drop = DropCount(remaining, options.p_select, options.drop_fraction);
    std::vector<char> gone(alive.size(), 0);
    for (Index k = 0; k < drop; ++k) {
      gone[static_cast<std::size_t>(by_weight[static_cast<std::size_t>(k)])] = 1;
      eliminated.push_back(static_cast<Index>(alive[static_cast<std::size_t>(by_weight[static_cast<std::size_t>(k)])]));
    }
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < alive.size(); ++k) {
      if (!gone[k]) next.push_back(alive[k]);
    }
    alive = std::move(next);
  }

  FeatureRanking r;
  r.method = "svm-rfe";
  std::vector<double> final_w(alive.size());
  for (std::size_t k = 0; k < alive.size(); ++k) final_w[k] = std::abs(w(static_cast<Index>(k)));
  for (Index k : OrderByScore(final_w)) r.order.push_back(static_cast<Index>(alive[static_cast<std::size_t>(k)]));
  for (auto it = eliminated.rbegin(); it != eliminated.rend(); ++it) r.order.push_back(*it);
  // Scores mirror the order so the ranking stays self-consistent.
  r.scores.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
    r.scores[static_cast<std::size_t>(r.order[pos])] = static_cast<double>(n) - static_cast<double>(pos);
  }
  return r;
}

FeatureRanking LoadExternalRanking(const std::string& path, std::span<const std::string> feature_names) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open ranking file " + path);
  std::unordered_map<std::string, Index> index;
  for (std::size_t i = 0; i < feature_names.size(); ++i) index.emplace(feature_names[i], static_cast<Index>(i));

  FeatureRanking r;
  r.method = "external";
  std::vector<char> seen(feature_names.size(), 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    line.erase(0, first);
    auto it = index.find(line);
    if (it == index.end()) {
      Fail(ErrorKind::kData, path + ":" + std::to_string(line_no) + ": unknown feature '" + line + "'");
    }
    if (seen[static_cast<std::size_t>(it->second)]) {
      Fail(ErrorKind::kData, path + ":" + std::to_string(line_no) + ": feature '" + line + "' listed twice");
    }
    seen[static_cast<std::size_t>(it->second)] = 1;
    r.order.push_back(it->second);
  }
  const auto n = static_cast<double>(feature_names.size());
  r.scores.assign(feature_names.size(), 0.0);
  for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
    r.scores[static_cast<std::size_t>(r.order[pos])] = n - static_cast<double>(pos);
  }
  return r;
}

}  // namespace klrfs
