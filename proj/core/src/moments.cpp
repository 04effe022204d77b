// SPDX-License-Identifier: Apache-2.0
#include "umimc/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace umimc {

IncrementMomentTable::IncrementMomentTable(IndexBox b) : box(std::move(b)) {
  const std::size_t n = box.size();
  cap = box.upper().sup();
  mean_increment.assign(n, 0.0);
  nu_prime.assign(n, 0.0);
  nu_tilde_prime.assign(n, 0.0);
  nu_prime_stderr.assign(n, 0.0);
  mean_increment_stderr.assign(n, 0.0);
  pair.assign(n * n, 0.0);
  diagonal_distance.assign(static_cast<std::size_t>(cap) + 2, 0.0);
  cost_coupled.assign(n, 0.0);
  cost_independent.assign(n, 0.0);
}

double IncrementMomentTable::nu(const MultiIndex& a, const MultiIndex& b) const {
  return pair[box.offset(a) * box.size() + box.offset(b)];
}

std::vector<double> IncrementMomentTable::mu_prime(EstimatorKind kind) const {
  std::vector<double> mu = is_coupled(kind) ? nu_prime : nu_tilde_prime;
  mu[0] -= mean_limit * mean_limit;
  return mu;
}

const std::vector<double>& IncrementMomentTable::cost(EstimatorKind kind) const {
  return is_coupled(kind) ? cost_coupled : cost_independent;
}

namespace {

void fill_costs(const Model& model, IncrementMomentTable& table) {
  for (std::size_t o = 0; o < table.box.size(); ++o) {
    const MultiIndex a = table.box.at(o);
    if (!model.admissible(a)) continue;
    if (model.canonical(a) == a) table.cost_coupled[o] = model.cost(a);
    std::unordered_set<MultiIndex, MultiIndexHash> seen;
    for (const auto& corner : signed_corners(a)) {
      const MultiIndex c = model.canonical(corner.index);
      if (seen.insert(c).second) table.cost_independent[o] += model.cost(c);
    }
  }
}

}  // namespace

IncrementMomentTable exact_moment_table(
    const Model& model, int cap, const std::function<double(const MultiIndex&)>& mean,
    const std::function<double(const MultiIndex&, const MultiIndex&)>& product_moment) {
  const std::size_t d = model.dimension();
  IncrementMomentTable t(IndexBox(MultiIndex::constant(d, cap)));
  const std::size_t n = t.box.size();
  auto m = [&](const MultiIndex& b) { return mean(model.canonical(b)); };
  auto p = [&](const MultiIndex& a, const MultiIndex& b) {
    return product_moment(model.canonical(a), model.canonical(b));
  };
  const MultiIndex top = MultiIndex::constant(d, cap);
  auto diag = [&](int k) { return MultiIndex::constant(d, k); };
  // E[S_beta S_k] with S_{-1} = 0.
  auto p_diag = [&](const MultiIndex& b, int k) { return k < 0 ? 0.0 : p(b, diag(k)); };
  auto m_diag = [&](int k) { return k < 0 ? 0.0 : m(diag(k)); };

  std::vector<std::vector<SignedCorner>> corners(n);
  for (std::size_t o = 0; o < n; ++o) corners[o] = signed_corners(t.box.at(o));

  t.mean_limit = m(top);
  for (std::size_t o = 0; o < n; ++o) {
    for (const auto& c : corners[o]) t.mean_increment[o] += c.sign * m(c.index);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      double v = 0.0;
      for (const auto& ca : corners[a])
        for (const auto& cb : corners[b]) v += ca.sign * cb.sign * p(ca.index, cb.index);
      t.pair[a * n + b] = t.pair[b * n + a] = v;
    }
  }
  for (std::size_t o = 0; o < n; ++o) {
    const int k = t.box.at(o).sup();
    double v = 0.0;
    for (const auto& c : corners[o]) {
      v += c.sign * (2.0 * p(c.index, top) - p_diag(c.index, k - 1) - p_diag(c.index, k));
    }
    t.nu_prime[o] = v;
    const double mi = t.mean_increment[o];
    t.nu_tilde_prime[o] = (t.pair[o * n + o] - mi * mi) +
                          mi * (2.0 * t.mean_limit - m_diag(k - 1) - m_diag(k));
  }
  const double ptop = p(top, top);
  for (int k = -1; k <= cap; ++k) {
    t.diagonal_distance[static_cast<std::size_t>(k + 1)] =
        k < 0 ? ptop : ptop - 2.0 * p(top, diag(k)) + p(diag(k), diag(k));
  }
  fill_costs(model, t);
  return t;
}

IncrementMomentTable estimate_moment_tables(const Model& model, std::size_t pilot, int cap,
                                            RandomStream& rng, std::span<const double> weights) {
  if (pilot < 2) throw std::invalid_argument("pilot sample size must be >= 2");
  if (cap < 0) throw std::invalid_argument("cap must be >= 0");
  const std::size_t d = model.dimension();
  const std::size_t w = model.width();
  std::vector<double> wt(w, 0.0);
  if (weights.empty()) {
    wt[0] = 1.0;
  } else {
    if (weights.size() != w) throw std::invalid_argument("moment weights width mismatch");
    wt.assign(weights.begin(), weights.end());
  }

  IncrementMomentTable t(IndexBox(MultiIndex::constant(d, cap)));
  const std::size_t n = t.box.size();
  const MultiIndex top = MultiIndex::constant(d, cap);
  std::vector<std::vector<std::pair<std::size_t, int>>> corner_offsets(n);
  std::vector<int> level(n);
  std::vector<std::size_t> diag_offset(static_cast<std::size_t>(cap) + 1);
  for (std::size_t o = 0; o < n; ++o) {
    const MultiIndex a = t.box.at(o);
    level[o] = a.sup();
    for (const auto& c : signed_corners(a)) corner_offsets[o].push_back({t.box.offset(c.index), c.sign});
  }
  for (int k = 0; k <= cap; ++k) {
    diag_offset[static_cast<std::size_t>(k)] = t.box.offset(MultiIndex::constant(d, k));
  }

  std::vector<double> s(n), delta(n);
  std::vector<double> sum_d(n, 0.0), sum_d2(n, 0.0), sum_y(n, 0.0), sum_y2(n, 0.0);
  std::vector<double> sum_pair(n * n, 0.0);
  std::vector<double> sum_sk(static_cast<std::size_t>(cap) + 1, 0.0);
  std::vector<double> sum_dist(static_cast<std::size_t>(cap) + 2, 0.0);
  double sum_top = 0.0, sum_top2 = 0.0;

  for (std::size_t j = 0; j < pilot; ++j) {
    CoupledFamily family(model, model.realize(rng, top));
    for (std::size_t o = 0; o < n; ++o) {
      const auto v = family.at(t.box.at(o));
      double x = 0.0;
      for (std::size_t c = 0; c < w; ++c) x += wt[c] * v[c];
      s[o] = x;
    }
    for (std::size_t o = 0; o < n; ++o) {
      double x = 0.0;
      for (const auto& [off, sign] : corner_offsets[o]) x += sign * s[off];
      delta[o] = x;
    }
    const double stop = s[n - 1];
    auto s_diag = [&](int k) { return k < 0 ? 0.0 : s[diag_offset[static_cast<std::size_t>(k)]]; };
    for (std::size_t o = 0; o < n; ++o) {
      const double y = delta[o] * (2.0 * stop - s_diag(level[o] - 1) - s_diag(level[o]));
      sum_d[o] += delta[o];
      sum_d2[o] += delta[o] * delta[o];
      sum_y[o] += y;
      sum_y2[o] += y * y;
      for (std::size_t b = 0; b < n; ++b) sum_pair[o * n + b] += delta[o] * delta[b];
    }
    for (int k = -1; k <= cap; ++k) {
      const double e = stop - s_diag(k);
      sum_dist[static_cast<std::size_t>(k + 1)] += e * e;
      if (k >= 0) sum_sk[static_cast<std::size_t>(k)] += s_diag(k);
    }
    sum_top += stop;
    sum_top2 += stop * stop;
  }

  const auto np = static_cast<double>(pilot);
  auto sample_var = [&](double s1, double s2) {
    return std::max(0.0, (s2 - s1 * s1 / np) / (np - 1.0));
  };
  t.samples = pilot;
  t.mean_limit = sum_top / np;
  t.mean_limit_stderr = std::sqrt(sample_var(sum_top, sum_top2) / np);
  std::vector<double> es(sum_sk.size());
  for (std::size_t k = 0; k < es.size(); ++k) es[k] = sum_sk[k] / np;
  auto es_diag = [&](int k) { return k < 0 ? 0.0 : es[static_cast<std::size_t>(k)]; };
  for (std::size_t o = 0; o < n; ++o) {
    const double md = sum_d[o] / np;
    const double vd = sample_var(sum_d[o], sum_d2[o]);
    t.mean_increment[o] = md;
    t.mean_increment_stderr[o] = std::sqrt(vd / np);
    t.nu_prime[o] = sum_y[o] / np;
    t.nu_prime_stderr[o] = std::sqrt(sample_var(sum_y[o], sum_y2[o]) / np);
    t.nu_tilde_prime[o] = vd + md * (2.0 * t.mean_limit - es_diag(level[o] - 1) - es_diag(level[o]));
    for (std::size_t b = 0; b < n; ++b) t.pair[o * n + b] = sum_pair[o * n + b] / np;
  }
  for (std::size_t k = 0; k < sum_dist.size(); ++k) t.diagonal_distance[k] = sum_dist[k] / np;
  fill_costs(model, t);
  return t;
}

double second_moment_coupled(const IncrementMomentTable& table, const TailDistribution& tail) {
  const std::size_t n = table.box.size();
  std::vector<double> f(n);
  std::vector<MultiIndex> idx(n);
  for (std::size_t o = 0; o < n; ++o) {
    idx[o] = table.box.at(o);
    f[o] = tail.tail_prob(idx[o]);
    if (!(f[o] > 0.0)) throw std::domain_error("tail vanishes inside the table box at " + idx[o].str());
  }
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      total += table.pair[a * n + b] * tail.tail_prob(join(idx[a], idx[b])) / (f[a] * f[b]);
    }
  }
  return total;
}

namespace {

double shell_weighted_sum(const IncrementMomentTable& table, const TailDistribution& tail,
                          const std::vector<double>& entries) {
  if (!tail.diagonal()) throw std::invalid_argument("a diagonal tail distribution is required");
  double total = 0.0;
  for (std::size_t o = 0; o < table.box.size(); ++o) {
    const double f = tail.shell_prob(table.box.at(o).sup());
    if (!(f > 0.0)) throw std::domain_error("tail vanishes inside the table box");
    total += entries[o] / f;
  }
  return total;
}

}  // namespace

double second_moment_diagonal_coupled(const IncrementMomentTable& table,
                                      const TailDistribution& tail) {
  return shell_weighted_sum(table, tail, table.nu_prime);
}

double second_moment_diagonal_independent(const IncrementMomentTable& table,
                                          const TailDistribution& tail) {
  return shell_weighted_sum(table, tail, table.nu_tilde_prime);
}

double second_moment_level_sum(const IncrementMomentTable& table, const TailDistribution& tail) {
  const std::size_t d = table.box.dim();
  if (!tail.diagonal() && d != 1) {
    throw std::invalid_argument("the single-sum form needs d = 1 or a diagonal tail");
  }
  double total = 0.0;
  for (int k = 0; k <= table.cap; ++k) {
    const double f = tail.tail_prob(MultiIndex::constant(d, k));
    if (!(f > 0.0)) throw std::domain_error("tail vanishes inside the table box");
    const auto i = static_cast<std::size_t>(k);
    total += (table.diagonal_distance[i] - table.diagonal_distance[i + 1]) / f;
  }
  return total;
}

double variance_condition_series(const IndexBox& box,
                                 const std::function<double(const MultiIndex&)>& distance,
                                 const TailDistribution& tail) {
  const std::size_t n = box.size();
  std::vector<double> dd(n);
  std::vector<MultiIndex> idx(n);
  for (std::size_t o = 0; o < n; ++o) {
    idx[o] = box.at(o);
    dd[o] = mixed_difference(idx[o], distance);
  }
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      total += dd[a] * dd[b] / tail.tail_prob(join(idx[a], idx[b]));
    }
  }
  return total;
}

}  // namespace umimc
