#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "colorlimits/diagnostics.hpp"
#include "colorlimits/parallel.hpp"
#include "colorlimits/refine.hpp"

namespace colorlimits {

using Label = std::int64_t;

/// A k-layer node classifier written as a function of the round-k color.
class ColorClassifier {
 public:
  enum class Mode { table, hash_injective, degree_threshold, degree_parity, indicator, constant };

  static ColorClassifier constant(std::size_t k, Label label) {
    ColorClassifier f(Mode::constant, k);
    f.fallback_ = label;
    return f;
  }

  /// Explicit lookup table over depth-k trees; colors not listed get `fallback`.
  static ColorClassifier table(std::size_t k, std::map<CanonicalTree, Label> table, Label fallback = 0) {
    ColorClassifier f(Mode::table, k);
    for (const auto& [tree, label] : table) {
      if (tree.depth() > k) throw InvalidArgument("classifier table entry deeper than k");
    }
    f.table_ = std::move(table);
    f.fallback_ = fallback;
    return f;
  }

  /// 1 on the listed trees, 0 elsewhere.
  static ColorClassifier indicator(std::size_t k, const std::set<CanonicalTree>& trees) {
    std::map<CanonicalTree, Label> t;
    for (const auto& tree : trees) t.emplace(tree, 1);
    auto f = table(k, std::move(t), 0);
    f.mode_ = Mode::indicator;
    return f;
  }

  /// Distinct labels for distinct colors: a 63-bit hash of the canonical term.
  static ColorClassifier hash_injective(std::size_t k) { return ColorClassifier(Mode::hash_injective, k); }

  /// Parity of the root degree.
  static ColorClassifier degree_parity(std::size_t k = 1) {
    if (k < 1) throw InvalidArgument("degree classifiers need k >= 1");
    return ColorClassifier(Mode::degree_parity, k);
  }

  /// Parity of the root degree, flipped when the degree is at least theta.
  static ColorClassifier degree_threshold(std::size_t theta, std::size_t k = 1) {
    if (k < 1) throw InvalidArgument("degree classifiers need k >= 1");
    ColorClassifier f(Mode::degree_threshold, k);
    f.theta_ = theta;
    return f;
  }

  Mode mode() const noexcept { return mode_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t theta() const noexcept { return theta_; }
  Label fallback() const noexcept { return fallback_; }
  const std::map<CanonicalTree, Label>& entries() const noexcept { return table_; }

  /// Labels of all nodes; `coloring` must reach round k().
  std::vector<Label> labels(const Coloring& coloring) const {
    auto& registry = coloring.registry();
    const auto& colors = coloring.round(k_);
    std::vector<Label> out(colors.size(), fallback_);
    switch (mode_) {
      case Mode::constant:
        break;
      case Mode::table:
      case Mode::indicator: {
        std::unordered_map<ColorId, Label> lookup;
        for (const auto& [tree, label] : table_) {
          if (auto id = registry.find(tree)) lookup.emplace(*id, label);
        }
        for (std::size_t v = 0; v < colors.size(); ++v) {
          if (auto it = lookup.find(colors[v]); it != lookup.end()) out[v] = it->second;
        }
        break;
      }
      case Mode::hash_injective: {
        std::unordered_map<ColorId, Label> memo;
        for (std::size_t v = 0; v < colors.size(); ++v) {
          auto it = memo.find(colors[v]);
          if (it == memo.end()) it = memo.emplace(colors[v], term_hash(registry.term(colors[v]))).first;
          out[v] = it->second;
        }
        break;
      }
      case Mode::degree_parity:
      case Mode::degree_threshold:
        for (std::size_t v = 0; v < colors.size(); ++v) {
          const auto d = registry.degree(colors[v]);
          Label parity = static_cast<Label>(d % 2);
          if (mode_ == Mode::degree_threshold && d >= theta_) parity = 1 - parity;
          out[v] = parity;
        }
        break;
    }
    return out;
  }

  std::vector<Label> labels(const MultiGraph& g) const { return labels(refine(g, k_)); }

 private:
  ColorClassifier(Mode mode, std::size_t k) : mode_(mode), k_(k) {}

  static Label term_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return static_cast<Label>(detail::mix64(h) >> 1);
  }

  Mode mode_;
  std::size_t k_;
  std::size_t theta_ = 0;
  Label fallback_ = 0;
  std::map<CanonicalTree, Label> table_;
};

/// Injective message passing: layer 0 interns features, layer j+1 interns
/// (own label, sorted neighbor labels) in a table private to that layer.
inline std::vector<std::uint64_t> hash_mpnn(const MultiGraph& g, std::size_t k) {
  const auto n = g.node_count();
  std::vector<std::uint64_t> x(n);
  {
    std::map<std::string, std::uint64_t> comb;
    for (NodeId v = 0; v < n; ++v) x[v] = comb.emplace(g.feature(v).name(), comb.size()).first->second;
  }
  std::vector<std::uint64_t> next(n);
  std::vector<std::uint64_t> msg;
  for (std::size_t layer = 0; layer < k; ++layer) {
    std::map<std::vector<std::uint64_t>, std::uint64_t> agg;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> comb;
    for (NodeId v = 0; v < n; ++v) {
      msg.clear();
      for (auto w : g.neighbors(v)) msg.push_back(x[w]);
      std::sort(msg.begin(), msg.end());
      const auto a = agg.emplace(msg, agg.size()).first->second;
      next[v] = comb.emplace(std::pair{x[v], a}, comb.size()).first->second;
    }
    std::swap(x, next);
  }
  return x;
}

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& a, const Rational& b) {
    return static_cast<unsigned __int128>(a.num) * b.den == static_cast<unsigned __int128>(b.num) * a.den;
  }
};

inline Rational reduced(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return {0, 1};
  const auto g = std::gcd(num, den);
  return {num / g, den / g};
}

/// Exact fraction of nodes where f and fstar disagree; 0 on the empty graph.
inline Rational empirical_risk(const ColorClassifier& f, const ColorClassifier& fstar, const Coloring& coloring,
                               std::size_t t) {
  if (t == 0) return {0, 1};
  const auto a = f.labels(coloring);
  const auto b = fstar.labels(coloring);
  std::uint64_t wrong = 0;
  for (std::size_t v = 0; v < t; ++v) wrong += a[v] != b[v] ? 1 : 0;
  return reduced(wrong, t);
}

inline Rational empirical_risk(const ColorClassifier& f, const ColorClassifier& fstar, const MultiGraph& g,
                               const std::shared_ptr<ColorRegistry>& registry) {
  const auto k = std::max(f.k(), fstar.k());
  return empirical_risk(f, fstar, refine(g, k, registry), g.node_count());
}

inline Rational empirical_risk(const ColorClassifier& f, const ColorClassifier& fstar, const MultiGraph& g) {
  return empirical_risk(f, fstar, g, std::make_shared<ColorRegistry>());
}

struct RiskEstimate {
  double mean = 0.0;
  double stderr = 0.0;
  std::size_t replicates = 0;
};

inline RiskEstimate summarize(const std::vector<double>& xs) {
  RiskEstimate out;
  out.replicates = xs.size();
  if (xs.empty()) return out;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

/// Mean empirical risk over `replicates` draws at size t_ref, substreams (rng key, i).
inline RiskEstimate true_risk(const ColorClassifier& f, const ColorClassifier& fstar, const GraphModel& model,
                              std::size_t t_ref, std::size_t replicates, const Rng& rng, std::size_t jobs = 1) {
  auto risks = parallel_map(replicates, jobs, [&](std::size_t i) {
    auto stream = rng.substream({i});
    return empirical_risk(f, fstar, model(t_ref, stream)).value();
  });
  return summarize(risks);
}

using ClassifierPair = std::pair<ColorClassifier, ColorClassifier>;  // (f, fstar)

struct GapOptions {
  double eps = 0.02;
  std::size_t t_ref_factor = 4;
  std::size_t reference_replicates = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct GapRow {
  std::size_t t = 0;
  std::size_t replicate = 0;
  double r_emp = 0.0;
  double r_hat = 0.0;
  double gap = 0.0;
};

struct GapSummary {
  std::size_t t = 0;
  double exceedance = 0.0;  // fraction of replicates with gap >= eps
  double median_gap = 0.0;
  double mean_r_emp = 0.0;
  double mean_r_hat = 0.0;
};

struct GapReport {
  double eps = 0.0;
  std::vector<GapRow> rows;
  std::vector<GapSummary> summary;

  /// Exceedance frequency strictly decreasing along the grid, or already zero.
  bool exceedance_decreasing() const {
    for (std::size_t i = 1; i < summary.size(); ++i) {
      const bool both_zero = summary[i].exceedance == 0.0 && summary[i - 1].exceedance == 0.0;
      if (!both_zero && !(summary[i].exceedance < summary[i - 1].exceedance)) return false;
    }
    return true;
  }
};

/// Per (t, replicate): R_emp(f_t, G_t) on a fresh draw and R_hat(f_t), the mean
/// empirical risk over `reference_replicates` independent draws at size
/// t_ref_factor * t. The classifiers may depend on t.
inline GapReport gap_experiment(const GraphModel& model, const std::function<ClassifierPair(std::size_t)>& classifiers,
                                const std::vector<std::size_t>& t_grid, std::size_t replicates,
                                const GapOptions& options = {}) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InvalidArgument("t grid must be ascending");
  GapReport report;
  report.eps = options.eps;
  const Rng master(options.seed);
  const auto cells = t_grid.size() * replicates;
  report.rows = parallel_map(cells, options.jobs, [&](std::size_t cell) {
    GapRow row;
    row.t = t_grid[cell / replicates];
    row.replicate = cell % replicates;
    const auto [f, fstar] = classifiers(row.t);
    auto rng = master.substream({row.t, row.replicate, 0});
    row.r_emp = empirical_risk(f, fstar, model(row.t, rng)).value();
    double ref = 0.0;
    for (std::size_t j = 0; j < options.reference_replicates; ++j) {
      auto ref_rng = master.substream({row.t, row.replicate, 1, j});
      ref += empirical_risk(f, fstar, model(options.t_ref_factor * row.t, ref_rng)).value();
    }
    row.r_hat = options.reference_replicates == 0 ? 0.0 : ref / static_cast<double>(options.reference_replicates);
    row.gap = std::abs(row.r_emp - row.r_hat);
    return row;
  });
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    GapSummary s;
    s.t = t_grid[i];
    std::vector<double> gaps;
    for (std::size_t r = 0; r < replicates; ++r) {
      const auto& row = report.rows[i * replicates + r];
      gaps.push_back(row.gap);
      s.exceedance += row.gap >= options.eps ? 1.0 : 0.0;
      s.mean_r_emp += row.r_emp;
      s.mean_r_hat += row.r_hat;
    }
    if (replicates > 0) {
      const auto n = static_cast<double>(replicates);
      s.exceedance /= n;
      s.mean_r_emp /= n;
      s.mean_r_hat /= n;
    }
    s.median_gap = median(std::move(gaps));
    report.summary.push_back(s);
  }
  return report;
}

inline void write_gap_csv(const GapReport& r, std::ostream& out) {
  out << "# schema=1\n";
  out << "t,replicate,R_emp,R_hat,gap\n";
  for (const auto& row : r.rows) {
    out << row.t << ',' << row.replicate << ',' << format_double(row.r_emp) << ',' << format_double(row.r_hat) << ','
        << format_double(row.gap) << '\n';
  }
}

inline void write_gap_summary_csv(const GapReport& r, std::ostream& out) {
  out << "# schema=1\n";
  out << "t,eps,exceedance,median_gap,mean_R_emp,mean_R_hat\n";
  for (const auto& s : r.summary) {
    out << s.t << ',' << format_double(r.eps) << ',' << format_double(s.exceedance) << ',' << format_double(s.median_gap)
        << ',' << format_double(s.mean_r_emp) << ',' << format_double(s.mean_r_hat) << '\n';
  }
}

}  // namespace colorlimits
