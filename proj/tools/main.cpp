// Command-line front end: fit estimators to data files, evaluate the
// distribution and the analytic MSE formulas, and run the simulation study.
//
// Exit codes: 0 success, 2 usage/domain error, 3 numeric non-convergence or
// overflow.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toppleone/toppleone.hpp"

namespace {

using namespace toppleone;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// One observation per line; blank lines and '#' comments are ignored.
std::vector<double> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open input file: " + path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string tok = trim(line);
    if (tok.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw std::domain_error("line " + std::to_string(line_no) +
                              ": not a number: '" + tok + "'");
    if (!(v > 0.0) || !(v < 1.0))
      throw std::domain_error("line " + std::to_string(line_no) +
                              ": value must lie strictly in (0,1), got " + tok);
    values.push_back(v);
  }
  if (values.empty()) throw std::domain_error("input file holds no observations");
  return values;
}

GridSpec parse_grid(const std::string& spec) {
  GridSpec gs;
  gs.descriptor = spec;
  std::istringstream ss(spec);
  char c1 = 0, c2 = 0;
  if (!(ss >> gs.lo >> c1 >> gs.hi >> c2 >> gs.count) || c1 != ':' || c2 != ':' ||
      !ss.eof())
    throw std::domain_error("bad --grid, expected lo:hi:count, got '" + spec + "'");
  if (!(gs.lo > 0.0) || !(gs.hi < 1.0) || !(gs.lo <= gs.hi) || gs.count < 1)
    throw std::domain_error("bad --grid: need 0 < lo <= hi < 1 and count >= 1");
  return gs;
}

std::string trailer() {
  std::string t = "generator=";
  t += kGeneratorName;
  t += " artifact=";
  t += kArtifactName;
  t += "-";
  t += kArtifactVersion;
  return t;
}

int cmd_eval(double alpha, double x) {
  const ShapeParam p(alpha);
  const UnitPoint pt(x);
  const double fx = pdf(p, pt);
  const double Fx = cdf(p, pt);
  const UnitPoint back = quantile(p, Fx);
  std::cout << "alpha: " << format_g17(alpha) << "\n"
            << "x: " << format_g17(x) << "\n"
            << "pdf: " << format_g17(fx) << "\n"
            << "cdf: " << format_g17(Fx) << "\n"
            << "quantile(cdf): " << format_g17(back.value()) << "\n"
            << "inversion_residual: " << format_g17(std::abs(back.value() - x))
            << "\n";
  return 0;
}

int cmd_fit(const std::string& input, const std::string& estimator,
            std::optional<double> at) {
  const EstimatorKind kind = estimator_from_string(estimator);
  const Sample s(read_observations(input));
  if (kind == EstimatorKind::umvue && s.size() < 3)
    throw std::domain_error("umvue requires at least 3 observations");
  const FittedCurve curve = fit(kind, s);
  std::cout << "estimator: " << estimator << "\n";
  if (const auto* sf = std::get_if<ShapeFit>(&curve)) {
    std::cout << "n: " << s.size() << "\n"
              << "alpha_hat: " << format_g17(sf->alpha_hat) << "\n";
  } else {
    const auto& uf = std::get<UmvueFit>(curve);
    std::cout << "n: " << uf.n() << "\n"
              << "t: " << format_g17(uf.t()) << "\n";
  }
  if (at) {
    const UnitPoint pt(*at);
    std::cout << "pdf(" << format_g17(*at)
              << "): " << format_g17(curve_pdf(curve, pt)) << "\n"
              << "cdf(" << format_g17(*at)
              << "): " << format_g17(curve_cdf(curve, pt)) << "\n";
  }
  return 0;
}

int cmd_mse_analytic(const std::string& estimator, int n, double alpha, double x) {
  const UnitPoint pt(x);
  if (estimator == "mle") {
    std::cout << "estimator: mle  n: " << n << "  alpha: " << format_g17(alpha)
              << "  x: " << format_g17(x) << "\n"
              << "pdf_mse: " << format_g17(mle_pdf_mse(n, alpha, pt))
              << "  method: bessel-closed-form\n"
              << "cdf_mse: " << format_g17(mle_cdf_mse(n, alpha, pt))
              << "  method: bessel-closed-form\n";
    return 0;
  }
  if (estimator != "umvue")
    throw std::domain_error("--estimator must be mle or umvue");
  if (n < 3) throw std::domain_error("umvue requires n >= 3");
  const auto report = [&](const char* label, const UmvueMse& m) {
    std::cout << label << ": " << format_g17(m.mse) << "  method: quadrature\n";
    if (m.series_second_moment) {
      const double target2 = m.second_moment - m.mse;
      std::cout << label << "_series: "
                << format_g17(*m.series_second_moment - target2)
                << "  clean: " << (m.series_clean ? "yes" : "no")
                << "  consistent: " << (m.series_consistent ? "yes" : "no")
                << "\n";
    } else {
      std::cout << label << "_series: skipped (n too large)\n";
    }
  };
  std::cout << "estimator: umvue  n: " << n << "  alpha: " << format_g17(alpha)
            << "  x: " << format_g17(x) << "\n";
  report("pdf_mse", umvue_pdf_mse(n, alpha, pt));
  report("cdf_mse", umvue_cdf_mse(n, alpha, pt));
  return 0;
}

int cmd_sim(const StudyConfig& config, const std::string& out) {
  const auto records = run_study(config);
  write_mse_csv(out, records, trailer());
  std::uint64_t suspect = 0;
  for (const auto& r : records)
    if (r.suspect()) ++suspect;
  if (suspect > 0)
    std::cerr << "warning: " << suspect
              << " record(s) have >1% failed replicates\n";
  std::cout << "wrote " << records.size() << " records to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topp-Leone distribution: estimators, analytic MSEs, simulation study"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "evaluate pdf/cdf and the inversion roundtrip");
  double eval_alpha = 1.0, eval_x = 0.5;
  eval->add_option("--alpha", eval_alpha, "shape parameter")->required();
  eval->add_option("--x", eval_x, "evaluation point in (0,1)")->required();

  auto* fitcmd = app.add_subcommand("fit", "fit an estimator to a data file");
  std::string fit_input, fit_estimator = "mle";
  std::optional<double> fit_at;
  fitcmd->add_option("--input", fit_input, "text file, one observation per line")
      ->required();
  fitcmd->add_option("--estimator", fit_estimator, "mle|umvue|pce|lse|wlse")
      ->check(CLI::IsMember({"mle", "umvue", "pce", "lse", "wlse"}));
  double fit_at_val = 0.0;
  auto* at_opt = fitcmd->add_option("--at", fit_at_val, "also report fitted pdf/cdf at x");

  auto* msecmd = app.add_subcommand("mse-analytic", "closed-form / quadrature MSEs");
  std::string mse_estimator = "mle";
  int mse_n = 10;
  double mse_alpha = 1.0, mse_x = 0.5;
  msecmd->add_option("--estimator", mse_estimator, "mle|umvue")
      ->check(CLI::IsMember({"mle", "umvue"}));
  msecmd->add_option("--n", mse_n, "sample size")->required();
  msecmd->add_option("--alpha", mse_alpha, "shape parameter")->required();
  msecmd->add_option("--x", mse_x, "evaluation point in (0,1)")->required();

  auto* simcmd = app.add_subcommand("sim", "Monte Carlo MSE study, CSV output");
  std::vector<double> sim_alphas{0.5, 1.0, 2.0, 3.0};
  std::vector<int> sim_sizes{10, 20, 50, 100};
  std::uint64_t sim_reps = 1000, sim_seed = 42;
  std::vector<std::string> sim_estimators{"mle", "umvue", "pce", "lse", "wlse"};
  std::string sim_grid = "0.05:0.95:19";
  std::string sim_aggregate = "mean";
  std::string sim_out = "mse_study.csv";
  unsigned sim_threads = 0;
  simcmd->add_option("--alpha", sim_alphas, "comma list of shapes")->delimiter(',');
  simcmd->add_option("--n", sim_sizes, "comma list of sample sizes")->delimiter(',');
  simcmd->add_option("--reps", sim_reps, "replicates per cell");
  simcmd->add_option("--seed", sim_seed, "study seed");
  simcmd->add_option("--estimators", sim_estimators, "comma list of estimators")
      ->delimiter(',');
  simcmd->add_option("--grid", sim_grid, "evaluation grid lo:hi:count");
  simcmd->add_option("--aggregate", sim_aggregate, "mean|per-point")
      ->check(CLI::IsMember({"mean", "per-point"}));
  simcmd->add_option("--out", sim_out, "output CSV path");
  simcmd->add_option("--threads", sim_threads, "worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*eval) return cmd_eval(eval_alpha, eval_x);
    if (*fitcmd) {
      if (*at_opt) fit_at = fit_at_val;
      return cmd_fit(fit_input, fit_estimator, fit_at);
    }
    if (*msecmd) return cmd_mse_analytic(mse_estimator, mse_n, mse_alpha, mse_x);
    if (*simcmd) {
      StudyConfig config;
      config.alphas = sim_alphas;
      config.sizes = sim_sizes;
      config.reps = sim_reps;
      config.seed = sim_seed;
      config.estimators.clear();
      for (const auto& name : sim_estimators) {
        const EstimatorKind k = estimator_from_string(name);
        for (EstimatorKind seen : config.estimators)
          if (seen == k)
            throw std::domain_error("duplicate estimator in --estimators: " + name);
        config.estimators.push_back(k);
      }
      config.grid = parse_grid(sim_grid);
      config.aggregate = sim_aggregate == "per-point" ? Aggregate::per_point
                                                      : Aggregate::mean_over_grid;
      config.threads = sim_threads;
      config.validate();
      return cmd_sim(config, sim_out);
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::overflow_error& e) {
    std::cerr << "overflow: " << e.what()
              << " (the closed forms leave double range here; see --x near the "
                 "support edge)\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
