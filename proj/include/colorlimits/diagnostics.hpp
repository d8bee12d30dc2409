#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "colorlimits/limits.hpp"
#include "colorlimits/parallel.hpp"

namespace colorlimits {

/// A random graph model: draws G_t from the given stream.
using GraphModel = std::function<MultiGraph(std::size_t t, Rng& rng)>;

struct ConvergenceOptions {
  std::vector<double> eps{0.01};
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool ball_stats = true;
};

struct ConvergenceRow {
  std::size_t t = 0;
  std::size_t replicate = 0;
  double tv = 0.0;
  double cyclic_fraction = 0.0;
  std::vector<std::uint8_t> exceed;  // outcome-major, then eps
};

struct ConvergenceSummary {
  std::size_t t = 0;
  double mean_tv = 0.0;
  double median_tv = 0.0;
  double mean_cyclic_fraction = 0.0;
  std::vector<double> exceedance;  // same layout as ConvergenceRow::exceed
};

struct ConvergenceReport {
  std::vector<std::string> outcomes;  // tree terms of the reference support, sorted
  std::vector<double> eps;
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceSummary> summary;

  bool median_tv_decreasing() const {
    for (std::size_t i = 1; i < summary.size(); ++i) {
      if (!(summary[i].median_tv < summary[i - 1].median_tv)) return false;
    }
    return true;
  }
};

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Per (t, replicate): TV between c_{k,t} and the reference, the cyclic fraction of
/// k-balls, and for each reference outcome T and each eps whether
/// |c_{k,t}(T) - ref(T)| >= eps. Cells use substream (seed, t, replicate).
inline ConvergenceReport convergence_report(const GraphModel& model, std::size_t k, const std::vector<std::size_t>& t_grid,
                                            std::size_t replicates, const Pmf<ColorId>& reference,
                                            const std::shared_ptr<ColorRegistry>& registry,
                                            const ConvergenceOptions& options = {}) {
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InvalidArgument("t grid must be ascending");
  ConvergenceReport report;
  report.eps = options.eps;
  std::vector<std::pair<std::string, ColorId>> outcomes;
  for (const auto& [c, p] : reference) outcomes.emplace_back(registry->term(c), c);
  std::sort(outcomes.begin(), outcomes.end());
  for (const auto& o : outcomes) report.outcomes.push_back(o.first);

  const Rng master(options.seed);
  const auto cells = t_grid.size() * replicates;
  report.rows = parallel_map(cells, options.jobs, [&](std::size_t cell) {
    ConvergenceRow row;
    row.t = t_grid[cell / replicates];
    row.replicate = cell % replicates;
    auto rng = master.substream({row.t, row.replicate});
    const auto g = model(row.t, rng);
    const auto empirical = empirical_color_dist(g, k, registry).to_pmf();
    row.tv = tv_distance(empirical, reference);
    if (options.ball_stats) row.cyclic_fraction = empirical_ball_dist(g, k).cyclic_fraction();
    for (const auto& [term, c] : outcomes) {
      const double gap = std::abs(empirical(c) - reference(c));
      for (double e : options.eps) row.exceed.push_back(gap >= e ? 1 : 0);
    }
    return row;
  });

  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    ConvergenceSummary s;
    s.t = t_grid[i];
    std::vector<double> tvs;
    s.exceedance.assign(outcomes.size() * options.eps.size(), 0.0);
    for (std::size_t r = 0; r < replicates; ++r) {
      const auto& row = report.rows[i * replicates + r];
      tvs.push_back(row.tv);
      s.mean_tv += row.tv;
      s.mean_cyclic_fraction += row.cyclic_fraction;
      for (std::size_t j = 0; j < row.exceed.size(); ++j) s.exceedance[j] += row.exceed[j];
    }
    if (replicates > 0) {
      const auto n = static_cast<double>(replicates);
      s.mean_tv /= n;
      s.mean_cyclic_fraction /= n;
      for (auto& x : s.exceedance) x /= n;
    }
    s.median_tv = median(std::move(tvs));
    report.summary.push_back(std::move(s));
  }
  return report;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n ") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_convergence_csv(const ConvergenceReport& r, std::ostream& out) {
  out << "# schema=1\n";
  out << "t,replicate,tv,cyclic_fraction";
  for (const auto& o : r.outcomes) {
    for (double e : r.eps) out << ',' << csv_quote("exceed[" + o + "]@" + format_double(e));
  }
  out << '\n';
  for (const auto& row : r.rows) {
    out << row.t << ',' << row.replicate << ',' << format_double(row.tv) << ',' << format_double(row.cyclic_fraction);
    for (auto x : row.exceed) out << ',' << static_cast<int>(x);
    out << '\n';
  }
}

inline void write_convergence_summary_csv(const ConvergenceReport& r, std::ostream& out) {
  out << "# schema=1\n";
  out << "t,mean_tv,median_tv,mean_cyclic_fraction";
  for (const auto& o : r.outcomes) {
    for (double e : r.eps) out << ',' << csv_quote("freq[" + o + "]@" + format_double(e));
  }
  out << '\n';
  for (const auto& s : r.summary) {
    out << s.t << ',' << format_double(s.mean_tv) << ',' << format_double(s.median_tv) << ','
        << format_double(s.mean_cyclic_fraction);
    for (double x : s.exceedance) out << ',' << format_double(x);
    out << '\n';
  }
}

}  // namespace colorlimits
