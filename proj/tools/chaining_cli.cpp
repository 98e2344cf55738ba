// Command-line surface for majorizing-measure computations on finite metric
// spaces: evaluate gamma/dual values, solve the saddle point, condition dual
// measures, round measures to certificate trees, and run the full certify
// pipeline.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chaining/certify.hpp"
#include "chaining/errors.hpp"
#include "chaining/evaluate.hpp"
#include "chaining/functional.hpp"
#include "chaining/metric.hpp"
#include "chaining/reduce.hpp"
#include "chaining/rounding.hpp"
#include "chaining/solve.hpp"
#include "chaining/treeio.hpp"
#include "chaining/util.hpp"

namespace {

using namespace chaining;

struct CommonOpts {
  std::string metric_path;
  std::string measure_spec = "uniform";
  std::string h_spec = "gaussian";
  bool pseudo = false;
  bool no_triangle_check = false;
};

MetricSpace load_metric_cli(const CommonOpts& o) {
  LoadOptions opts;
  opts.allow_pseudo = o.pseudo;
  opts.check_triangle = !o.no_triangle_check;
  return MetricSpace::load_file(o.metric_path, opts);
}

Measure load_measure_cli(const std::string& spec, int n) {
  if (spec == "uniform") return Measure::uniform(n);
  return load_measure_file(spec, n);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw FormatError("cannot open output file '" + out_path + "'");
  out << text;
}

void write_measure(const Measure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open output file '" + path + "'");
  for (double w : m.weights) out << format_sig9(w) << "\n";
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_measure = true) {
  cmd->add_option("--metric", o.metric_path, "metric file (matrix or point cloud)")->required();
  cmd->add_option("--h", o.h_spec, "functional: gaussian | gaussian-approx | exp:Q | density:FILE");
  if (with_measure)
    cmd->add_option("--measure", o.measure_spec, "measure file or 'uniform'");
  cmd->add_flag("--pseudo", o.pseudo, "allow zero distances between distinct points");
  cmd->add_flag("--no-triangle-check", o.no_triangle_check, "skip triangle validation");
}

int run(int argc, char** argv) {
  CLI::App app{"majorizing measures: values, saddle-point solve, and tree certificates"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads for per-point evaluations");

  CommonOpts common;
  SolverParams sparams;
  double alpha = 0.1;
  std::string out_path, format = "text";
  std::string trace_path, mu_out, nu_out, net_path, net_out;
  int grid = 50;

  auto* c_gamma = app.add_subcommand("gamma", "max_x of the ball integral of h under mu");
  add_common(c_gamma, common);

  auto* c_ent = app.add_subcommand("entropic", "entropy-style dual value of a measure");
  add_common(c_ent, common);

  auto* c_simp = app.add_subcommand("simplified", "min over supported points of the ball integral");
  add_common(c_simp, common);

  auto* c_solve = app.add_subcommand("solve", "approximate the saddle point of gamma");
  add_common(c_solve, common, false);
  c_solve->add_option("--max-iters", sparams.max_iters, "iteration budget");
  c_solve->add_option("--step-scale", sparams.step_scale, "step rule constant c");
  c_solve->add_option("--eval-every", sparams.eval_every, "averaged-iterate evaluation cadence");
  double gap_target_opt = -1.0;
  c_solve->add_option("--gap-target", gap_target_opt, "stop once the gap estimate reaches this");
  c_solve->add_option("--trace", trace_path, "write a CSV convergence trace");
  c_solve->add_option("--mu-out", mu_out, "write mu* as a measure file");
  c_solve->add_option("--nu-out", nu_out, "write nu* as a measure file");

  auto* c_cond = app.add_subcommand("condition", "greedy support conditioning of a dual measure");
  add_common(c_cond, common);
  c_cond->add_option("--nu-out", nu_out, "write the conditioned measure");

  auto* c_chain = app.add_subcommand("chain", "round a measure to a labelled net + chaining tree");
  add_common(c_chain, common);
  c_chain->add_option("--alpha", alpha, "diameter decay (0, 1/10]");
  c_chain->add_option("--format", format, "json | dot | text");
  c_chain->add_option("--out", out_path, "output file (default stdout)");
  c_chain->add_option("--net-out", net_out, "also write the labelled net JSON here");

  auto* c_pack = app.add_subcommand("pack", "round a measure to a packing tree");
  add_common(c_pack, common);
  c_pack->add_option("--alpha", alpha, "diameter decay (0, 1/10]");
  c_pack->add_option("--format", format, "json | dot | text");
  c_pack->add_option("--out", out_path, "output file (default stdout)");

  auto* c_dudley = app.add_subcommand("dudley", "baseline chaining tree over greedy nets");
  add_common(c_dudley, common, false);
  c_dudley->add_option("--format", format, "json | dot | text");
  c_dudley->add_option("--out", out_path, "output file (default stdout)");

  auto* c_adm = app.add_subcommand("admissible", "convert a stored labelled net");
  c_adm->add_option("--net", net_path, "labelled net JSON file")->required();
  c_adm->add_option("--metric", common.metric_path, "metric file (for the value report)");
  c_adm->add_flag("--pseudo", common.pseudo, "allow zero distances between distinct points");
  c_adm->add_flag("--no-triangle-check", common.no_triangle_check, "skip triangle validation");
  c_adm->add_option("--out", out_path, "output file (default stdout)");

  auto* c_cert = app.add_subcommand("certify", "full pipeline with per-inequality checks");
  add_common(c_cert, common, false);
  c_cert->add_option("--alpha", alpha, "diameter decay (0, 1/10]");
  c_cert->add_option("--max-iters", sparams.max_iters, "solver iteration budget");
  c_cert->add_option("--step-scale", sparams.step_scale, "solver step constant");
  c_cert->add_option("--eval-every", sparams.eval_every, "solver evaluation cadence");
  c_cert->add_option("--format", format, "json | text");
  c_cert->add_option("--out", out_path, "output file (default stdout)");

  auto* c_check = app.add_subcommand("check-h", "grid property report for a functional");
  c_check->add_option("--h", common.h_spec, "functional spec");
  c_check->add_option("--grid", grid, "per-axis grid resolution");

  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  auto print_value = [&](double v) { std::cout << format_sig9(v) << "\n"; };

  if (*c_gamma) {
    MetricSpace X = load_metric_cli(common);
    Measure mu = load_measure_cli(common.measure_spec, X.n());
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    print_value(gamma_value(h, X, mu));
  } else if (*c_ent || *c_simp) {
    MetricSpace X = load_metric_cli(common);
    Measure nu = load_measure_cli(common.measure_spec, X.n());
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    auto bd = *c_ent ? entropic_dual_value(h, X, nu) : simplified_dual_value(h, X, nu);
    print_value(bd.aggregate);
  } else if (*c_solve) {
    MetricSpace X = load_metric_cli(common);
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    if (gap_target_opt > 0.0) sparams.gap_target = gap_target_opt;
    SaddleSolution sol = solve_saddle_point(h, X, sparams);
    std::cout << "primal_value " << format_sig9(sol.primal_value) << "\n"
              << "dual_proxy " << format_sig9(sol.dual_proxy) << "\n"
              << "gap_estimate " << format_sig9(sol.gap_estimate) << "\n"
              << "iterations " << sol.iterations << "\n"
              << "budget_exhausted " << (sol.budget_exhausted ? 1 : 0) << "\n";
    if (!trace_path.empty()) {
      std::ofstream tr(trace_path);
      if (!tr) throw FormatError("cannot open trace file '" + trace_path + "'");
      tr << "iteration,primal,dual_proxy\n";
      for (const auto& p : sol.trace)
        tr << p.iteration << "," << format_sig9(p.primal) << "," << format_sig9(p.dual_proxy)
           << "\n";
    }
    if (!mu_out.empty()) write_measure(sol.mu_star, mu_out);
    if (!nu_out.empty()) write_measure(sol.nu_star, nu_out);
  } else if (*c_cond) {
    MetricSpace X = load_metric_cli(common);
    Measure nu = load_measure_cli(common.measure_spec, X.n());
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    ConditioningResult res = condition_dual(h, X, nu);
    std::cout << "S";
    for (int x : res.S) std::cout << " " << x;
    std::cout << "\nachieved_min " << format_sig9(res.achieved_min) << "\n"
              << "entropic_start " << format_sig9(res.entropic_start) << "\n"
              << "evictions " << res.removed_order.size() << "\n";
    if (!nu_out.empty()) write_measure(res.nu_S, nu_out);
  } else if (*c_chain) {
    MetricSpace X = load_metric_cli(common);
    Measure rho = load_measure_cli(common.measure_spec, X.n());
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    LabelledNet net = greedy_ball_partition(X, rho, alpha);
    ChainingTree tree = labelled_to_chaining(net, X, h);
    if (!net_out.empty()) emit(labelled_to_json(net), net_out);
    if (format == "json")
      emit(chaining_to_json(tree), out_path);
    else if (format == "dot")
      emit(chaining_to_dot(tree, X), out_path);
    else
      emit("val_labelled " + format_sig9(val_labelled(net, h)) + "\nval_chaining " +
               format_sig9(val_chaining(tree)) + "\n",
           out_path);
  } else if (*c_pack) {
    MetricSpace X = load_metric_cli(common);
    Measure rho = load_measure_cli(common.measure_spec, X.n());
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    auto res = greedy_separated_partition(X, rho, h, alpha);
    if (format == "json")
      emit(packing_to_json(res.tree), out_path);
    else if (format == "dot")
      emit(packing_to_dot(res.tree), out_path);
    else
      emit("val_packing " + format_sig9(val_packing(res.tree, h)) + "\ntrivial_branch " +
               (res.trivial_branch ? std::string("1") : std::string("0")) + "\n",
           out_path);
  } else if (*c_dudley) {
    MetricSpace X = load_metric_cli(common);
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    ChainingTree tree = dudley_tree(X, h);
    if (format == "json")
      emit(chaining_to_json(tree), out_path);
    else if (format == "dot")
      emit(chaining_to_dot(tree, X), out_path);
    else
      emit("val_chaining " + format_sig9(val_chaining(tree)) + "\n", out_path);
  } else if (*c_adm) {
    std::ifstream in(net_path);
    if (!in) throw FormatError("cannot open net file '" + net_path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LabelledNet net = labelled_from_json(text);
    AdmissibleNet anet = labelled_to_admissible(net);
    validate_admissible(anet);
    emit(admissible_to_json(anet), out_path);
    if (!common.metric_path.empty()) {
      MetricSpace X = load_metric_cli(common);
      std::cout << "val_admissible " << format_sig9(val_admissible(anet, X)) << "\n";
    }
  } else if (*c_cert) {
    MetricSpace X = load_metric_cli(common);
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    CertificateReport rep = run_pipeline(h, X, sparams, alpha);
    emit(format == "json" ? rep.to_json() : rep.to_text(), out_path);
    if (!rep.all_passed) return 1;
  } else if (*c_check) {
    ChainingFunctional h = parse_functional_spec(common.h_spec);
    FunctionalCheckReport rep = check_functional(h, grid);
    bool normalized = h.kind() != FunctionalKind::kGaussianApprox;
    double tol = h.kind() == FunctionalKind::kExponential && h.exponent() == 1.0 ? 1e-9 : 1e-6;
    std::cout << "h(1) " << format_sig9(rep.h_at_one) << "\n";
    if (normalized) std::cout << "h'(1) " << format_sig9(rep.deriv_at_one) << "\n";
    std::cout << "submultiplicativity_violation " << format_sig9(rep.submult_violation) << "\n"
              << "derivative_lower_violation " << format_sig9(rep.deriv_lower_violation) << "\n"
              << "derivative_upper_violation " << format_sig9(rep.deriv_upper_violation) << "\n"
              << "log_bound_violation " << format_sig9(rep.log_bound_violation) << "\n"
              << "inversion_error " << format_sig9(rep.inversion_error) << "\n"
              << "fd_rel_error " << format_sig9(rep.fd_rel_error) << "\n"
              << "monotone_violation " << format_sig9(rep.monotone_violation) << "\n"
              << "convexity_violation " << format_sig9(rep.convexity_violation) << "\n";
    bool ok = rep.h_at_one == 0.0 && rep.submult_violation <= tol &&
              rep.log_bound_violation <= tol && rep.inversion_error <= 1e-10 &&
              rep.fd_rel_error <= 1e-5 && rep.monotone_violation < 0.0 &&
              rep.convexity_violation <= tol;
    if (normalized)
      ok = ok && rep.deriv_at_one == -1.0 && rep.deriv_lower_violation <= tol &&
           rep.deriv_upper_violation <= tol;
    std::cout << (ok ? "all invariants pass\n" : "INVARIANT FAILURES\n");
    if (!ok) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
