#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "colorlimits/colorlimits.hpp"
#include "colorlimits/params_io.hpp"
#include "colorlimits/scenarios.hpp"

namespace cl = colorlimits;
using nlohmann::json;

namespace {

// Writes to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw cl::ParseError("cannot write " + path);
  write(out);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cl::ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cl::PathologicalKind pathological_kind(const std::string& name) {
  if (name == "isolated-or-cycle") return cl::PathologicalKind::isolated_or_cycle;
  if (name == "three-cycles-or-big-cycle") return cl::PathologicalKind::three_cycles_or_big_cycle;
  throw cl::InvalidArgument("unknown pathological kind " + name);
}

// Model document: {"model": kind, ...parameters} with parameters inline or under "params".
cl::GraphModel graph_model(const json& j) {
  const auto kind = cl::io::detail::get<std::string>(j, "model");
  const json body = j.contains("params") ? j.at("params") : j;
  if (kind == "cm") {
    auto mu = cl::io::degree_pmf_from_json(body.contains("degrees") ? body.at("degrees") : body);
    return [mu](std::size_t t, cl::Rng& rng) { return cl::sample_cm(t, mu, rng); };
  }
  if (kind == "bcm") {
    auto left = cl::io::degree_pmf_from_json(cl::io::detail::get<json>(body, "left"));
    auto right = cl::io::degree_pmf_from_json(cl::io::detail::get<json>(body, "right"));
    return [left, right](std::size_t t, cl::Rng& rng) { return cl::sample_bcm(t, left, right, rng); };
  }
  if (kind == "rcm") {
    auto params = cl::io::rcm_from_json(body);
    return [params](std::size_t t, cl::Rng& rng) { return cl::sample_rcm(t, params, rng); };
  }
  if (kind == "er") {
    const double c = cl::io::detail::get<double>(body, "c");
    return [c](std::size_t t, cl::Rng& rng) { return cl::sample_er(t, c, rng); };
  }
  if (kind == "er-dense") {
    const double p = cl::io::detail::get<double>(body, "p");
    return [p](std::size_t t, cl::Rng& rng) { return cl::sample_er_dense(t, p, rng); };
  }
  if (kind == "sbm") {
    auto blocks = cl::io::detail::get<std::vector<double>>(body, "blocks");
    auto rates = cl::io::detail::get<std::vector<std::vector<double>>>(body, "rates");
    return [blocks, rates](std::size_t t, cl::Rng& rng) { return cl::sample_sbm(t, blocks, rates, rng); };
  }
  if (kind == "pathological") {
    const auto which = pathological_kind(cl::io::detail::get<std::string>(body, "kind"));
    return [which](std::size_t t, cl::Rng& rng) { return cl::sample_pathological(which, t, rng); };
  }
  throw cl::ParseError("unknown model " + kind);
}

// Classifier factory; a degree-threshold "theta" of "t" follows the graph size.
std::function<cl::ColorClassifier(std::size_t)> classifier_factory(const json& j) {
  if (j.value("mode", "") == "degree-threshold" && j.contains("parameters") && j.at("parameters").contains("theta") &&
      j.at("parameters").at("theta").is_string()) {
    if (j.at("parameters").at("theta") != "t") throw cl::ParseError("theta must be a number or \"t\"");
    const auto k = cl::io::detail::get<std::size_t>(j, "k");
    return [k](std::size_t t) { return cl::ColorClassifier::degree_threshold(t, k); };
  }
  auto f = cl::io::classifier_from_json(j);
  return [f](std::size_t) { return f; };
}

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw cl::ParseError("bad grid entry '" + item + "'");
    }
  }
  if (out.empty()) throw cl::ParseError("empty grid");
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw cl::ParseError("bad number '" + item + "'");
    }
  }
  return out;
}

cl::CanonicalTree read_tree(const std::string& path) { return cl::parse_term(read_text(path)); }

json pmf_json(const cl::Pmf<cl::ColorId>& pmf, cl::ColorRegistry& registry, std::optional<std::size_t> k) {
  return cl::io::tree_pmf_to_json(cl::io::expand_pmf(pmf, registry), k);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"colorlimits: color refinement, configuration models and their limits"};
  app.require_subcommand(1);
  std::size_t jobs = 1;
  app.add_option("--jobs", jobs, "worker threads (COLORLIMITS_JOBS overrides)");

  std::function<int()> action;

  // sample
  auto* sample = app.add_subcommand("sample", "draw a random graph (or tree)");
  std::string model_kind, params_path, out_path, kind_name;
  std::uint64_t seed = 0;
  std::size_t t = 0, depth = 0;
  double mean_degree = 0.0, edge_p = -1.0;
  sample->add_option("model", model_kind, "cm|bcm|rcm|gwt|er|sbm|pathological")->required();
  sample->add_option("--seed", seed)->required();
  sample->add_option("--t", t, "node count");
  sample->add_option("--params", params_path, "parameter JSON");
  sample->add_option("--out", out_path);
  sample->add_option("--depth", depth, "GWT depth");
  sample->add_option("--c", mean_degree, "ER mean degree");
  sample->add_option("--p", edge_p, "ER fixed edge probability");
  sample->add_option("--kind", kind_name, "isolated-or-cycle|three-cycles-or-big-cycle");
  sample->callback([&] {
    action = [&] {
      cl::Rng rng(seed);
      if (model_kind == "gwt") {
        const auto params = cl::io::gwt_from_json(cl::io::load_json(params_path));
        const auto tree = cl::sample_gwt(params, depth, rng);
        emit(out_path, [&](std::ostream& o) { o << cl::to_term(tree) << '\n'; });
        return 0;
      }
      cl::MultiGraph g;
      if (model_kind == "cm") {
        g = cl::sample_cm(t, cl::io::degree_pmf_from_json(cl::io::load_json(params_path)), rng);
      } else if (model_kind == "bcm") {
        const auto j = cl::io::load_json(params_path);
        g = cl::sample_bcm(t, cl::io::degree_pmf_from_json(cl::io::detail::get<json>(j, "left")),
                           cl::io::degree_pmf_from_json(cl::io::detail::get<json>(j, "right")), rng);
      } else if (model_kind == "rcm") {
        g = cl::sample_rcm(t, cl::io::rcm_from_json(cl::io::load_json(params_path)), rng);
      } else if (model_kind == "er") {
        g = edge_p >= 0.0 ? cl::sample_er_dense(t, edge_p, rng) : cl::sample_er(t, mean_degree, rng);
      } else if (model_kind == "sbm") {
        const auto j = cl::io::load_json(params_path);
        g = cl::sample_sbm(t, cl::io::detail::get<std::vector<double>>(j, "blocks"),
                           cl::io::detail::get<std::vector<std::vector<double>>>(j, "rates"), rng);
      } else if (model_kind == "pathological") {
        g = cl::sample_pathological(pathological_kind(kind_name), t, rng);
      } else {
        throw cl::InvalidArgument("unknown model " + model_kind);
      }
      emit(out_path, [&](std::ostream& o) { cl::write_graph(g, o); });
      return 0;
    };
  });

  // refine
  auto* refine_cmd = app.add_subcommand("refine", "color refinement of a graph");
  std::string graph_path;
  std::size_t rounds = 0;
  std::optional<cl::NodeId> expand_node;
  refine_cmd->add_option("--graph", graph_path)->required();
  refine_cmd->add_option("--rounds", rounds)->required();
  refine_cmd->add_option("--expand", expand_node, "print CR^k of this node as a tree term");
  refine_cmd->add_option("--out", out_path);
  refine_cmd->callback([&] {
    action = [&] {
      const auto g = cl::read_graph(graph_path);
      const auto coloring = cl::refine(g, rounds);
      if (expand_node) {
        g.check(*expand_node);
        emit(out_path, [&](std::ostream& o) { o << coloring.registry().term(coloring.color(rounds, *expand_node)) << '\n'; });
        return 0;
      }
      const auto classes = coloring.partition(rounds);
      emit(out_path, [&](std::ostream& o) {
        o << "# schema=1\nnode,class\n";
        for (std::size_t v = 0; v < classes.size(); ++v) o << v << ',' << classes[v] << '\n';
      });
      return 0;
    };
  });

  // mp-check
  auto* mp_cmd = app.add_subcommand("mp-check", "membership of a tree in MP_k");
  std::string tree_path;
  std::size_t k = 0;
  mp_cmd->add_option("--tree", tree_path)->required();
  mp_cmd->add_option("--k", k)->required();
  mp_cmd->callback([&] {
    action = [&] {
      const bool member = cl::mp_membership(read_tree(tree_path), k);
      std::cout << "member: " << (member ? "true" : "false") << '\n';
      return 0;
    };
  });

  // color-dist
  auto* color_cmd = app.add_subcommand("color-dist", "c_{k,t} of a graph, or the root color law of a GWT");
  std::string gwt_path;
  std::size_t n_samples = 100000;
  std::optional<std::uint64_t> opt_seed;
  color_cmd->add_option("--graph", graph_path);
  color_cmd->add_option("--gwt", gwt_path);
  color_cmd->add_option("--k", k)->required();
  color_cmd->add_option("--samples", n_samples);
  color_cmd->add_option("--seed", opt_seed, "required with --gwt");
  color_cmd->add_option("--out", out_path);
  color_cmd->callback([&] {
    action = [&] {
      auto registry = std::make_shared<cl::ColorRegistry>();
      json out;
      if (!gwt_path.empty()) {
        if (!opt_seed) throw cl::InvalidArgument("--seed is required when sampling a GWT");
        cl::Rng rng(*opt_seed);
        const auto est = cl::gwt_color_dist(cl::io::gwt_from_json(cl::io::load_json(gwt_path)), k, n_samples, rng, registry);
        out = pmf_json(est.pmf, *registry, k);
        json se = json::object();
        for (const auto& [c, s] : est.stderr) se[registry->term(c)] = s;
        out["stderr"] = se;
        out["samples"] = n_samples;
      } else if (!graph_path.empty()) {
        out = pmf_json(cl::empirical_color_dist(cl::read_graph(graph_path), k, registry).to_pmf(), *registry, k);
      } else {
        throw cl::InvalidArgument("color-dist needs --graph or --gwt");
      }
      emit(out_path, [&](std::ostream& o) { o << out.dump(2) << '\n'; });
      return 0;
    };
  });

  // ball-dist
  auto* ball_cmd = app.add_subcommand("ball-dist", "b_{k,t} of a graph with its cyclic fraction");
  ball_cmd->add_option("--graph", graph_path)->required();
  ball_cmd->add_option("--k", k)->required();
  ball_cmd->add_option("--out", out_path);
  ball_cmd->callback([&] {
    action = [&] {
      const auto b = cl::empirical_ball_dist(cl::read_graph(graph_path), k);
      std::map<cl::CanonicalTree, double> trees;
      for (const auto& [tree, n] : b.trees.counts) trees[tree] = static_cast<double>(n) / static_cast<double>(b.total);
      auto out = cl::io::tree_pmf_to_json(trees, k);
      out["cyclic_fraction"] = b.cyclic_fraction();
      emit(out_path, [&](std::ostream& o) { o << out.dump(2) << '\n'; });
      return 0;
    };
  });

  // marginal / check-invariance share inputs
  std::string pmf_path, rcm_path;
  double tol = cl::kNormalizationTolerance;
  const auto marginal_of = [&](std::vector<std::string>& names) {
    if (!rcm_path.empty()) {
      const auto params = cl::io::rcm_from_json(cl::io::load_json(rcm_path));
      names = params.type_names;
      return cl::edge_type_marginal_rcm(params);
    }
    if (pmf_path.empty()) throw cl::InvalidArgument("needs --pmf or --rcm");
    cl::ColorRegistry registry;
    const auto pmf = cl::io::tree_pmf_from_json(cl::io::load_json(pmf_path));
    if (k == 0 && pmf.k) k = *pmf.k;
    const auto ids = cl::io::intern_pmf(pmf.pmf, registry);
    auto m = cl::edge_type_marginal_colors(ids, k, registry);
    // rename pair components by term so the output does not depend on ColorIds
    names.assign(registry.size(), "");
    for (cl::ColorId c = 0; c < registry.size(); ++c) names[c] = registry.term(c);
    return m;
  };

  auto* marginal_cmd = app.add_subcommand("marginal", "edge-type marginal of a color PMF or RCM parameter");
  marginal_cmd->add_option("--pmf", pmf_path);
  marginal_cmd->add_option("--rcm", rcm_path);
  marginal_cmd->add_option("--k", k);
  marginal_cmd->add_option("--out", out_path);
  marginal_cmd->callback([&] {
    action = [&] {
      std::vector<std::string> names;
      const auto m = marginal_of(names);
      std::vector<std::tuple<std::string, std::string, double>> rows;
      for (const auto& [pair, p] : m.marginal) rows.emplace_back(names[pair.first], names[pair.second], p);
      std::sort(rows.begin(), rows.end());
      emit(out_path, [&](std::ostream& o) {
        o << "# schema=1\n# d=" << cl::format_double(m.d) << " asymmetry=" << cl::format_double(m.asymmetry) << '\n';
        o << "a,b,p\n";
        for (const auto& [a, b, p] : rows) o << cl::csv_quote(a) << ',' << cl::csv_quote(b) << ',' << cl::format_double(p) << '\n';
      });
      return 0;
    };
  });

  auto* inv_cmd = app.add_subcommand("check-invariance", "involution invariance verdict");
  inv_cmd->add_option("--pmf", pmf_path);
  inv_cmd->add_option("--rcm", rcm_path);
  inv_cmd->add_option("--k", k);
  inv_cmd->add_option("--tol", tol);
  inv_cmd->callback([&] {
    action = [&] {
      std::vector<std::string> names;
      const auto v = cl::check_involution_invariance(marginal_of(names), tol);
      std::cout << cl::to_string(v.kind);
      if (v.kind == cl::InvolutionVerdict::Kind::asymmetric) std::cout << ' ' << cl::format_double(v.score);
      std::cout << '\n';
      return 0;
    };
  });

  // rcm-limit
  auto* limit_cmd = app.add_subcommand("rcm-limit", "GWT local limit of an RCM parameter");
  limit_cmd->add_option("--rcm", rcm_path)->required();
  limit_cmd->add_option("--out", out_path);
  limit_cmd->callback([&] {
    action = [&] {
      const auto w = cl::rcm_local_limit(cl::io::rcm_from_json(cl::io::load_json(rcm_path)));
      emit(out_path, [&](std::ostream& o) { o << cl::io::to_json(w).dump(2) << '\n'; });
      return 0;
    };
  });

  // rcm-from-sofic
  auto* sofic_cmd = app.add_subcommand("rcm-from-sofic", "RCM parameter realizing a color PMF");
  sofic_cmd->add_option("--pmf", pmf_path)->required();
  sofic_cmd->add_option("--k", k);
  sofic_cmd->add_option("--out", out_path);
  sofic_cmd->callback([&] {
    action = [&] {
      cl::ColorRegistry registry;
      const auto pmf = cl::io::tree_pmf_from_json(cl::io::load_json(pmf_path));
      if (k == 0 && pmf.k) k = *pmf.k;
      const auto params = cl::rcm_from_sofic(cl::io::intern_pmf(pmf.pmf, registry), k, registry);
      emit(out_path, [&](std::ostream& o) { o << cl::io::to_json(params).dump(2) << '\n'; });
      return 0;
    };
  });

  // gwt-to-rcm
  auto* g2r_cmd = app.add_subcommand("gwt-to-rcm", "RCM parameter of a simplified unimodular GWT");
  g2r_cmd->add_option("--gwt", gwt_path)->required();
  g2r_cmd->add_option("--out", out_path);
  g2r_cmd->callback([&] {
    action = [&] {
      const auto params = cl::gwt_to_rcm(cl::io::gwt_from_json(cl::io::load_json(gwt_path)));
      emit(out_path, [&](std::ostream& o) { o << cl::io::to_json(params).dump(2) << '\n'; });
      return 0;
    };
  });

  // validate-su
  auto* su_cmd = app.add_subcommand("validate-su", "check the simplified unimodular form");
  su_cmd->add_option("--gwt", gwt_path)->required();
  su_cmd->callback([&] {
    action = [&] {
      const auto v = cl::validate_su_gwt(cl::io::gwt_from_json(cl::io::load_json(gwt_path)));
      if (v.ok()) {
        std::cout << "ok\n";
      } else {
        std::cout << "fail " << cl::to_string(v.clause) << ": " << v.detail << '\n';
      }
      return 0;
    };
  });

  // converge
  auto* conv_cmd = app.add_subcommand("converge", "convergence report of c_{k,t} against a reference");
  std::string model_path, grid_text, eps_text = "0.01", summary_path, ref_gwt_path;
  std::size_t replicates = 20;
  conv_cmd->add_option("--model", model_path)->required();
  conv_cmd->add_option("--k", k)->required();
  conv_cmd->add_option("--t-grid", grid_text)->required();
  conv_cmd->add_option("--replicates", replicates);
  conv_cmd->add_option("--reference", pmf_path, "tree PMF JSON");
  conv_cmd->add_option("--reference-gwt", ref_gwt_path, "GWT whose root color law is the reference");
  conv_cmd->add_option("--samples", n_samples, "GWT samples for --reference-gwt");
  conv_cmd->add_option("--eps", eps_text, "comma-separated thresholds");
  conv_cmd->add_option("--seed", seed)->required();
  conv_cmd->add_option("--out", out_path);
  conv_cmd->add_option("--summary", summary_path);
  conv_cmd->callback([&] {
    action = [&] {
      auto registry = std::make_shared<cl::ColorRegistry>();
      cl::Pmf<cl::ColorId> reference;
      if (!ref_gwt_path.empty()) {
        auto rng = cl::Rng(seed).substream({0xFEFE});
        reference = cl::gwt_color_dist(cl::io::gwt_from_json(cl::io::load_json(ref_gwt_path)), k, n_samples, rng, registry).pmf;
      } else if (!pmf_path.empty()) {
        reference = cl::io::intern_pmf(cl::io::tree_pmf_from_json(cl::io::load_json(pmf_path)).pmf, *registry);
      } else {
        throw cl::InvalidArgument("converge needs --reference or --reference-gwt");
      }
      cl::ConvergenceOptions options;
      options.eps = parse_doubles(eps_text);
      options.seed = seed;
      options.jobs = cl::resolve_jobs(jobs);
      const auto report = cl::convergence_report(graph_model(cl::io::load_json(model_path)), k, parse_grid(grid_text),
                                                 replicates, reference, registry, options);
      emit(out_path, [&](std::ostream& o) { cl::write_convergence_csv(report, o); });
      if (!summary_path.empty()) emit(summary_path, [&](std::ostream& o) { cl::write_convergence_summary_csv(report, o); });
      return 0;
    };
  });

  // risk
  auto* risk_cmd = app.add_subcommand("risk", "empirical risk on a graph, or true risk by Monte-Carlo");
  std::string f_path, fstar_path;
  risk_cmd->add_option("--f", f_path)->required();
  risk_cmd->add_option("--fstar", fstar_path)->required();
  risk_cmd->add_option("--graph", graph_path);
  risk_cmd->add_option("--model", model_path);
  risk_cmd->add_option("--t", t);
  risk_cmd->add_option("--replicates", replicates);
  risk_cmd->add_option("--seed", opt_seed);
  risk_cmd->callback([&] {
    action = [&] {
      if (!graph_path.empty()) {
        const auto g = cl::read_graph(graph_path);
        const auto f = classifier_factory(cl::io::load_json(f_path))(g.node_count());
        const auto fs = classifier_factory(cl::io::load_json(fstar_path))(g.node_count());
        const auto r = cl::empirical_risk(f, fs, g);
        std::cout << "R_emp = " << r.num << '/' << r.den << " (" << cl::format_double(r.value()) << ")\n";
        return 0;
      }
      if (model_path.empty() || t == 0) throw cl::InvalidArgument("risk needs --graph, or --model with --t");
      if (!opt_seed) throw cl::InvalidArgument("--seed is required when sampling");
      const auto f = classifier_factory(cl::io::load_json(f_path))(t);
      const auto fs = classifier_factory(cl::io::load_json(fstar_path))(t);
      const auto est = cl::true_risk(f, fs, graph_model(cl::io::load_json(model_path)), t, replicates, cl::Rng(*opt_seed),
                                     cl::resolve_jobs(jobs));
      std::cout << "R = " << cl::format_double(est.mean) << " +- " << cl::format_double(est.stderr) << " (" << est.replicates
                << " replicates)\n";
      return 0;
    };
  });

  // gap
  auto* gap_cmd = app.add_subcommand("gap", "generalization gap experiment");
  double gap_eps = 0.02;
  std::size_t ref_factor = 4, ref_replicates = 1;
  gap_cmd->add_option("--model", model_path)->required();
  gap_cmd->add_option("--f", f_path)->required();
  gap_cmd->add_option("--fstar", fstar_path)->required();
  gap_cmd->add_option("--t-grid", grid_text)->required();
  gap_cmd->add_option("--replicates", replicates);
  gap_cmd->add_option("--eps", gap_eps);
  gap_cmd->add_option("--ref-factor", ref_factor, "reference size as a multiple of t");
  gap_cmd->add_option("--ref-replicates", ref_replicates, "draws averaged into R_hat");
  gap_cmd->add_option("--seed", seed)->required();
  gap_cmd->add_option("--out", out_path);
  gap_cmd->add_option("--summary", summary_path);
  gap_cmd->callback([&] {
    action = [&] {
      const auto f = classifier_factory(cl::io::load_json(f_path));
      const auto fs = classifier_factory(cl::io::load_json(fstar_path));
      cl::GapOptions options;
      options.eps = gap_eps;
      options.t_ref_factor = ref_factor;
      options.reference_replicates = ref_replicates;
      options.seed = seed;
      options.jobs = cl::resolve_jobs(jobs);
      const auto report = cl::gap_experiment(
          graph_model(cl::io::load_json(model_path)), [&](std::size_t n) { return cl::ClassifierPair{f(n), fs(n)}; },
          parse_grid(grid_text), replicates, options);
      emit(out_path, [&](std::ostream& o) { cl::write_gap_csv(report, o); });
      if (!summary_path.empty()) emit(summary_path, [&](std::ostream& o) { cl::write_gap_summary_csv(report, o); });
      return 0;
    };
  });

  // paper-suite
  auto* suite_cmd = app.add_subcommand("paper-suite", "run every acceptance scenario");
  std::vector<int> only;
  suite_cmd->add_option("--seed", seed)->required();
  suite_cmd->add_option("--only", only, "criterion ids");
  suite_cmd->callback([&] {
    action = [&] {
      cl::scenarios::Context ctx{seed, cl::resolve_jobs(jobs)};
      int failed = 0;
      for (const auto& c : cl::scenarios::criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto o = cl::scenarios::run(c, ctx);
        std::cout << cl::scenarios::format_line(o) << std::endl;
        failed += o.passed ? 0 : 1;
      }
      return failed == 0 ? 0 : 2;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    return action ? action() : 1;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << msg << '\n';
    return 1;
  }
}
