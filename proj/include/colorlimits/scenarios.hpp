#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "colorlimits/diagnostics.hpp"
#include "colorlimits/learnability.hpp"
#include "colorlimits/limits.hpp"
#include "colorlimits/worked_examples.hpp"
#include "colorlimits/parallel.hpp"
#include "colorlimits/samplers.hpp"

namespace colorlimits::scenarios {

struct Outcome {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Context {
  std::uint64_t seed = 7;
  std::size_t jobs = 1;
};

inline std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

// ---------------------------------------------------------------------------
// Exact enumeration of RCM matchings for a fixed type table
// ---------------------------------------------------------------------------

using EdgeKey = std::vector<std::pair<NodeId, NodeId>>;

inline EdgeKey edge_key(const std::vector<Edge>& edges) {
  EdgeKey key;
  for (const auto& e : edges) key.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
  std::sort(key.begin(), key.end());
  return key;
}

namespace detail {

using Partial = std::vector<std::pair<std::vector<Edge>, double>>;

// All pairings of `stubs` (one stub left over when the count is odd), equally likely.
inline Partial all_pairings(const std::vector<NodeId>& stubs) {
  Partial out;
  std::vector<Edge> current;
  std::vector<bool> used(stubs.size(), false);
  std::function<void()> rec = [&] {
    std::size_t i = 0;
    while (i < stubs.size() && used[i]) ++i;
    std::size_t free_count = 0;
    for (bool u : used) free_count += u ? 0 : 1;
    if (free_count <= 1) {
      out.emplace_back(current, 1.0);
      return;
    }
    if (free_count % 2 == 1) {
      // odd: every free stub may be the discarded one
      for (std::size_t l = i; l < stubs.size(); ++l) {
        if (used[l]) continue;
        used[l] = true;
        rec();
        used[l] = false;
      }
      return;
    }
    used[i] = true;
    for (std::size_t j = i + 1; j < stubs.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      current.push_back({stubs[i], stubs[j]});
      rec();
      current.pop_back();
      used[j] = false;
    }
    used[i] = false;
  };
  rec();
  for (auto& [e, p] : out) p = 1.0 / static_cast<double>(out.size());
  return out;
}

// All injections of the shorter side into the longer one, equally likely.
inline Partial all_cross_matchings(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  Partial out;
  std::vector<Edge> current;
  std::vector<bool> used(large.size(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == small.size()) {
      out.emplace_back(current, 1.0);
      return;
    }
    for (std::size_t j = 0; j < large.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      current.push_back({small[i], large[j]});
      rec(i + 1);
      current.pop_back();
      used[j] = false;
    }
  };
  rec(0);
  for (auto& [e, p] : out) p = 1.0 / static_cast<double>(out.size());
  return out;
}

}  // namespace detail

/// Exact law of the RCM output graph given every node's type and neighbor multiset.
inline std::map<EdgeKey, double> enumerate_rcm_outcomes(const std::vector<TypeId>& types,
                                                        const std::vector<Multiset>& neighborhoods) {
  std::map<std::pair<TypeId, TypeId>, std::vector<NodeId>> stubs;
  for (NodeId v = 0; v < types.size(); ++v) {
    for (auto q : neighborhoods[v].expanded()) stubs[{types[v], q}].push_back(v);
  }
  std::vector<detail::Partial> stages;
  for (const auto& [key, list] : stubs) {
    if (key.first == key.second) {
      stages.push_back(detail::all_pairings(list));
    } else if (key.first < key.second) {
      auto it = stubs.find({key.second, key.first});
      stages.push_back(detail::all_cross_matchings(list, it == stubs.end() ? std::vector<NodeId>{} : it->second));
    } else if (!stubs.count({key.second, key.first})) {
      stages.push_back({{{}, 1.0}});
    }
  }
  detail::Partial combined{{{}, 1.0}};
  for (const auto& stage : stages) {
    detail::Partial next;
    for (const auto& [e1, p1] : combined) {
      for (const auto& [e2, p2] : stage) {
        auto e = e1;
        e.insert(e.end(), e2.begin(), e2.end());
        next.emplace_back(std::move(e), p1 * p2);
      }
    }
    combined = std::move(next);
  }
  std::map<EdgeKey, double> out;
  for (const auto& [e, p] : combined) out[edge_key(e)] += p;
  return out;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

inline Outcome gwt_depth_one(const Context& ctx) {
  Outcome o{1, "two-color GWT depth-1 law", false, "", 0.0};
  const auto params = examples::two_color_gwt();
  const auto support = examples::two_color_depth_one_support();
  const std::vector<double> expected{0.4, 0.2, 0.2, 0.2};
  GwtSampler sampler(params);
  auto rng = Rng(ctx.seed).substream({1});
  constexpr std::size_t n = 100'000;
  std::map<CanonicalTree, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) ++counts[sampler.to_tree(sampler.sample(1, rng))];
  double worst = 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto c = counts.count(support[i]) ? counts[support[i]] : 0;
    covered += c;
    worst = std::max(worst, std::abs(static_cast<double>(c) / n - expected[i]));
  }
  o.passed = worst <= 0.01 && covered == n;
  o.detail = "max |freq - p| = " + fmt("%.4f", worst) + " (tol 0.01), off-support draws " + std::to_string(n - covered);
  return o;
}

inline Outcome rcm_five_nodes(const Context& ctx) {
  Outcome o{2, "five-node RCM outcome law", false, "", 0.0};
  const auto table = examples::five_node_type_table();
  const auto g0 = edge_key(examples::five_node_graph().edges());
  const auto g1 = edge_key(examples::five_node_graph_alternative().edges());
  const auto exact = enumerate_rcm_outcomes(table.types, table.neighborhoods);
  const auto p = [&](const EdgeKey& k) { return exact.count(k) ? exact.at(k) : 0.0; };
  const bool exact_ok = exact.size() == 2 && std::abs(p(g0) - 2.0 / 3.0) < 1e-12 && std::abs(p(g1) - 1.0 / 3.0) < 1e-12;

  constexpr std::size_t n = 100'000;
  const Rng master = Rng(ctx.seed).substream({2});
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = master.substream({i});
    const auto key = edge_key(rcm_match(table.types, table.neighborhoods, table.type_features, rng).edges());
    n0 += key == g0 ? 1 : 0;
    n1 += key == g1 ? 1 : 0;
  }
  const double f0 = static_cast<double>(n0) / n, f1 = static_cast<double>(n1) / n;
  const bool mc_ok = std::abs(f0 - 2.0 / 3.0) <= 0.01 && std::abs(f1 - 1.0 / 3.0) <= 0.01 && n0 + n1 == n;
  o.passed = exact_ok && mc_ok;
  o.detail = "exact P(G0)=" + fmt("%.6f", p(g0)) + " P(G1)=" + fmt("%.6f", p(g1)) + " over " +
             std::to_string(exact.size()) + " outcomes; Monte-Carlo " + fmt("%.4f", f0) + " / " + fmt("%.4f", f1);
  return o;
}

inline Outcome cr_tree_and_mp(const Context&) {
  Outcome o{3, "CR^3 tree and MP_3 example", false, "", 0.0};
  auto registry = std::make_shared<ColorRegistry>();
  const auto coloring = refine(examples::five_node_graph(), 3, registry);
  const auto t = examples::depth_three_member();
  const auto t_prime = examples::depth_three_non_member();
  const bool cr_ok = *registry->expand(coloring.color(3, 3)) == t;
  const bool member = mp_membership(t, 3);
  const bool non_member = !mp_membership(t_prime, 3);
  const bool closure = cr_closure(t_prime, 3) == t;
  o.passed = cr_ok && member && non_member && closure;
  o.detail = std::string("CR^3(v3) matches: ") + (cr_ok ? "yes" : "no") + ", T member: " + (member ? "yes" : "no") +
             ", T' member: " + (non_member ? "no" : "yes") + ", closure(T') = T: " + (closure ? "yes" : "no");
  return o;
}

inline Outcome cm_poisson_limit(const Context& ctx) {
  Outcome o{4, "CM(Poisson(2)) color law vs GWT limit", false, "", 0.0};
  const auto degrees = DegreePmf::poisson(2.0, 1e-8);
  auto registry = std::make_shared<ColorRegistry>();
  auto rng = Rng(ctx.seed).substream({4, 0});
  const auto g = sample_cm(100'000, degrees, rng);
  const auto empirical = empirical_color_dist(g, 2, registry).to_pmf();
  const double cyclic = empirical_ball_dist(g, 2).cyclic_fraction();
  const auto limit = rcm_local_limit(examples::single_type_rcm(degrees));
  auto gwt_rng = Rng(ctx.seed).substream({4, 1});
  const auto reference = gwt_color_dist(limit, 2, 100'000, gwt_rng, registry);
  const double tv = tv_distance(empirical, reference.pmf);
  // sampling noise alone: a second CM draw of the same size against the first
  auto twin_rng = Rng(ctx.seed).substream({4, 2});
  const double floor = tv_distance(empirical, empirical_color_dist(sample_cm(100'000, degrees, twin_rng), 2, registry).to_pmf());
  o.passed = tv <= 0.03 && cyclic <= 0.05;
  o.detail = "TV = " + fmt("%.4f", tv) + " (tol 0.03), cyclic fraction = " + fmt("%.4f", cyclic) +
             " (tol 0.05); TV between two CM draws = " + fmt("%.4f", floor) + ", " +
             std::to_string(reference.pmf.support_size()) + " outcomes in the reference";
  return o;
}

inline Outcome finite_invariance(const Context& ctx) {
  Outcome o{5, "finite-graph involution invariance", false, "", 0.0};
  const Rng master = Rng(ctx.seed).substream({5});
  const auto rcm = [] {
    RcmParams p;
    p.type_names = {"a", "b"};
    p.features = {Feature("a"), Feature("b")};
    p.mu = {{0, Multiset::of({0, 0, 1}), 0.3}, {0, Multiset::of({1}), 0.2}, {1, Multiset::of({0, 1}), 0.3},
            {1, Multiset::of({1, 1, 1}), 0.2}};
    return p;
  }();
  const auto gwt = rcm_local_limit(examples::single_type_rcm(DegreePmf::poisson(1.5)));
  std::size_t checked = 0, failures = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    auto rng = master.substream({i});
    const std::size_t t = 20 + rng.below(1000);
    MultiGraph g;
    switch (i % 8) {
      case 0: g = sample_cm(t, DegreePmf::poisson(2.5), rng); break;
      case 1: g = sample_bcm(t, DegreePmf({0.2, 0.3, 0.5}), DegreePmf::point(1), rng); break;
      case 2: g = sample_rcm(t, rcm, rng); break;
      case 3: g = sample_er(t, 3.0, rng); break;
      case 4: g = sample_sbm(t, {0.5, 0.5}, {{4.0, 1.0}, {1.0, 2.0}}, rng); break;
      case 5: g = sample_pathological(PathologicalKind::isolated_or_cycle, t, rng); break;
      case 6: g = sample_pathological(PathologicalKind::three_cycles_or_big_cycle, t, rng); break;
      default: {
        GwtSampler sampler(gwt);
        g = sampler.to_graph(sampler.sample(4, rng));
      }
    }
    if (i % 2 == 1) {
      // random two-letter features on top of the sampled structure
      std::vector<Feature> features(g.node_count());
      for (auto& f : features) f = rng.coin() ? Feature("x") : Feature("y");
      g = MultiGraph(std::move(features), g.edges());
    }
    auto registry = std::make_shared<ColorRegistry>();
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto c = empirical_color_dist(g, k, registry);
      const auto m = edge_type_marginal_colors(c, k, *registry);
      ++checked;
      worst = std::max(worst, m.asymmetry);
      if (m.asymmetry != 0.0) ++failures;
      if (k == 1 && (m.degree_mass != 2.0 * static_cast<double>(g.edge_count()) ||
                     m.total_weight != static_cast<double>(g.node_count()))) {
        ++failures;
      }
    }
  }
  o.passed = failures == 0;
  o.detail = std::to_string(checked) + " (graph, k) cells, max asymmetry " + fmt("%g", worst) + ", failures " +
             std::to_string(failures);
  return o;
}

inline Outcome sofic_pipeline(const Context& ctx) {
  Outcome o{6, "sofic delta(BT_2) through RCM", false, "", 0.0};
  auto registry = std::make_shared<ColorRegistry>();
  const auto bt2 = registry->intern(regular_unrolling(2, 2));
  const auto params = rcm_from_sofic(Pmf<ColorId>::point(bt2), 2, *registry);
  auto rng = Rng(ctx.seed).substream({6});
  const auto g = sample_rcm(100'000, params, rng);
  const auto c = empirical_color_dist(g, 2, registry);
  const double leak = 1.0 - c(bt2);
  o.passed = leak <= 0.02;
  o.detail = std::to_string(params.type_count()) + " type(s), " + std::to_string(params.mu.size()) +
             " RCM entries, mass off BT_2 = " + fmt("%.6f", leak) + " (tol 0.02)";
  return o;
}

inline ColorClassifier isolated_indicator() {
  return ColorClassifier::indicator(1, {leaf(default_feature())});
}

inline Outcome isolated_or_cycle_gap(const Context& ctx) {
  Outcome o{7, "isolated-or-cycle gap does not decay", false, "", 0.0};
  const GraphModel model = [](std::size_t t, Rng& rng) {
    return sample_pathological(PathologicalKind::isolated_or_cycle, t, rng);
  };
  GapOptions options;
  options.eps = 0.49;
  options.seed = Rng(ctx.seed).substream({7}).key();
  options.jobs = ctx.jobs;
  const auto report = gap_experiment(
      model, [](std::size_t) { return ClassifierPair{ColorClassifier::constant(1, 0), isolated_indicator()}; },
      {100, 1000, 10000}, 1000, options);
  bool ok = true;
  std::string freqs;
  for (const auto& s : report.summary) {
    ok = ok && s.exceedance >= 0.42 && s.exceedance <= 0.58;
    freqs += (freqs.empty() ? "" : ", ") + std::string("t=") + std::to_string(s.t) + ": " + fmt("%.3f", s.exceedance);
  }
  o.passed = ok;
  o.detail = "fraction with gap >= 0.49: " + freqs + " (band [0.42, 0.58])";
  return o;
}

inline Outcome dense_parity(const Context& ctx) {
  Outcome o{8, "dense ER parity counterexample", false, "", 0.0};
  const GraphModel model = [](std::size_t t, Rng& rng) { return sample_er_dense(t, 0.1, rng); };
  const auto pair_for = [](std::size_t t) {
    return ClassifierPair{ColorClassifier::degree_threshold(t), ColorClassifier::degree_parity()};
  };
  GapOptions options;
  options.eps = 0.5;
  options.seed = Rng(ctx.seed).substream({8}).key();
  options.jobs = ctx.jobs;
  const auto report = gap_experiment(model, pair_for, {200, 400, 800}, 20, options);
  bool emp_zero = true;
  for (const auto& row : report.rows) emp_zero = emp_zero && row.r_emp == 0.0;
  bool ref_high = true;
  std::string refs;
  for (const auto& s : report.summary) {
    if (s.t >= 400) ref_high = ref_high && s.mean_r_hat > 0.9;
    refs += (refs.empty() ? "" : ", ") + std::string("t=") + std::to_string(s.t) + ": " + fmt("%.4f", s.mean_r_hat);
  }
  // the same f_t evaluated on a graph large enough that typical degrees pass the threshold
  auto wide_rng = Rng(ctx.seed).substream({8, 1});
  const auto wide = true_risk(pair_for(400).first, pair_for(400).second, model, 400 * 20, 1, wide_rng).mean;
  o.passed = emp_zero && ref_high;
  o.detail = std::string("R_emp = 0 in all replicates: ") + (emp_zero ? "yes" : "no") + "; mean R_hat at 4t: " + refs +
             " (need > 0.9 for t >= 400); R_hat(f_400) at 20t = " + fmt("%.4f", wide);
  return o;
}

inline Outcome mpnn_equivalence(const Context& ctx) {
  Outcome o{9, "hash MPNN partition equals refinement", false, "", 0.0};
  const Rng master = Rng(ctx.seed).substream({9});
  std::size_t mismatches = 0;
  for (std::size_t s = 0; s < 100; ++s) {
    auto rng = master.substream({s});
    const auto g = sample_er_dense(50, 0.1, rng);
    const auto coloring = refine(g, 4);
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto labels = hash_mpnn(g, k);
      std::vector<ColorId> as_ids(labels.begin(), labels.end());
      if (Coloring::normalize_partition(as_ids) != coloring.partition(k)) ++mismatches;
    }
  }
  o.passed = mismatches == 0;
  o.detail = "400 (seed, k) cells, mismatches " + std::to_string(mismatches);
  return o;
}

/// Involution-invariant RCM parameters read off a random attributed graph.
inline RcmParams random_invariant_rcm(Rng& rng) {
  const std::size_t t = 30 + rng.below(200);
  const std::size_t k = 1 + rng.below(2);
  const std::size_t letters = 2 + rng.below(2);
  MultiGraph base;
  switch (rng.below(3)) {
    case 0: base = sample_cm(t, DegreePmf::poisson(1.0 + rng.uniform() * 2.0), rng); break;
    case 1: base = sample_er(t, 1.0 + rng.uniform() * 2.0, rng); break;
    default: base = sample_sbm(t, {0.3, 0.7}, {{3.0, 0.5}, {0.5, 1.5}}, rng); break;
  }
  std::vector<Feature> features(t);
  for (auto& f : features) f = Feature(std::string(1, static_cast<char>('a' + rng.below(letters))));
  const MultiGraph g(std::move(features), base.edges());
  auto registry = std::make_shared<ColorRegistry>();
  return rcm_from_sofic(empirical_color_dist(g, k, registry).to_pmf(), k, *registry);
}

inline Outcome su_round_trip(const Context& ctx) {
  Outcome o{10, "RCM / su-GWT round trip", false, "", 0.0};
  const Rng master = Rng(ctx.seed).substream({10});
  std::size_t validated = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = master.substream({i});
    const auto mu = random_invariant_rcm(rng);
    const auto w = rcm_local_limit(mu);
    if (validate_su_gwt(w).ok()) ++validated;
    worst = std::max(worst, gwt_max_difference(w, rcm_local_limit(gwt_to_rcm(w))));
  }
  o.passed = validated == 20 && worst <= 1e-12;
  o.detail = "validated " + std::to_string(validated) + "/20, max PMF difference after round trip " + fmt("%.3g", worst) +
             " (tol 1e-12)";
  return o;
}

inline Outcome rcm_linear_time(const Context& ctx) {
  Outcome o{11, "RCM sampling time is linear", false, "", 0.0};
  RcmParams mu;
  mu.type_names = {"a", "b"};
  mu.features = {Feature("a"), Feature("b")};
  mu.mu = {{0, Multiset::of({0, 0, 1}), 0.3}, {0, Multiset::of({0}), 0.2}, {1, Multiset::of({0, 1}), 0.3},
           {1, Multiset::of({1, 1, 1, 0}), 0.2}};
  const std::vector<std::size_t> grid{10'000, 100'000, 1'000'000};
  std::vector<double> xs, ys;
  std::string times;
  for (auto t : grid) {
    double best = 1e300;
    for (std::size_t rep = 0; rep < 3; ++rep) {
      auto rng = Rng(ctx.seed).substream({11, t, rep});
      const auto start = std::chrono::steady_clock::now();
      const auto g = sample_rcm(t, mu, rng);
      const auto stop = std::chrono::steady_clock::now();
      if (g.node_count() != t) return o;
      best = std::min(best, std::chrono::duration<double>(stop - start).count());
    }
    xs.push_back(std::log(static_cast<double>(t)));
    ys.push_back(std::log(best));
    times += (times.empty() ? "" : ", ") + std::to_string(t) + ": " + fmt("%.4fs", best);
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double alpha = sxy / sxx;
  o.passed = alpha <= 1.15;
  o.detail = "alpha = " + fmt("%.3f", alpha) + " (tol 1.15); best of 3: " + times;
  return o;
}

struct Criterion {
  int id;
  double time_limit;  // seconds; 0 = none
  std::function<Outcome(const Context&)> run;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, 10.0, gwt_depth_one},   {2, 30.0, rcm_five_nodes},       {3, 0.0, cr_tree_and_mp},
      {4, 120.0, cm_poisson_limit}, {5, 0.0, finite_invariance},   {6, 0.0, sofic_pipeline},
      {7, 0.0, isolated_or_cycle_gap}, {8, 0.0, dense_parity},     {9, 0.0, mpnn_equivalence},
      {10, 0.0, su_round_trip},   {11, 0.0, rcm_linear_time},
  };
  return all;
}

/// Runs one criterion, timing it and folding its time limit into the verdict.
inline Outcome run(const Criterion& c, const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run(ctx);
  } catch (const std::exception& e) {
    o.id = c.id;
    o.passed = false;
    o.detail = std::string("error: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.time_limit > 0.0 && o.seconds >= c.time_limit) {
    o.passed = false;
    o.detail += "; runtime " + fmt("%.1fs", o.seconds) + " over limit " + fmt("%.0fs", c.time_limit);
  }
  return o;
}

inline std::string format_line(const Outcome& o) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] %2d %-42s %7.2fs  ", o.passed ? "PASS" : "FAIL", o.id, o.name.c_str(), o.seconds);
  return head + o.detail;
}

}  // namespace colorlimits::scenarios
