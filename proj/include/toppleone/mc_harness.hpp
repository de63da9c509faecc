#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "toppleone/common.hpp"
#include "toppleone/distribution.hpp"
#include "toppleone/estimators.hpp"
#include "toppleone/rng.hpp"

namespace toppleone {

enum class Target { pdf, cdf };

enum class Aggregate { mean_over_grid, per_point };

/// Evaluation abscissae lo, lo+step, ..., hi (count points; count == 1 means
/// the single point lo). The original descriptor string is carried verbatim
/// into every output record.
struct GridSpec {
  double lo = 0.05;
  double hi = 0.95;
  int count = 19;
  std::string descriptor = "0.05:0.95:19";

  std::vector<UnitPoint> points() const {
    if (count < 1) throw std::domain_error("GridSpec: count must be >= 1");
    std::vector<UnitPoint> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double x = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
      pts.emplace_back(x);
    }
    return pts;
  }
};

/// Full specification of a simulation study cell grid.
struct StudyConfig {
  std::vector<double> alphas{0.5, 1.0, 2.0, 3.0};
  std::vector<int> sizes{10, 20, 50, 100};
  std::uint64_t reps = 1000;
  std::uint64_t seed = 42;
  std::vector<EstimatorKind> estimators{EstimatorKind::mle, EstimatorKind::umvue,
                                        EstimatorKind::pce, EstimatorKind::lse,
                                        EstimatorKind::wlse};
  GridSpec grid;
  Aggregate aggregate = Aggregate::mean_over_grid;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const {
    if (reps < 1) throw std::domain_error("StudyConfig: reps must be >= 1");
    if (alphas.empty() || sizes.empty() || estimators.empty())
      throw std::domain_error("StudyConfig: alphas, sizes and estimators must be nonempty");
    for (double a : alphas)
      if (!(a > 0.0)) throw std::domain_error("StudyConfig: alphas must be positive");
    const bool has_umvue =
        std::find(estimators.begin(), estimators.end(), EstimatorKind::umvue) !=
        estimators.end();
    for (int n : sizes) {
      if (n < 1) throw std::domain_error("StudyConfig: sizes must be >= 1");
      if (has_umvue && n < 3)
        throw std::domain_error("StudyConfig: sizes must be >= 3 when UMVUE is selected");
    }
    grid.points();  // validates bounds
  }
};

/// One cell of the study: the Monte Carlo MSE of one estimator's pdf or cdf
/// curve at one (n, alpha), plus everything needed to reproduce it.
struct MseRecord {
  EstimatorKind estimator;
  int n;
  double alpha;
  Target target;
  double mse;
  double mc_se;
  std::uint64_t reps;
  std::uint64_t seed;
  std::string grid;
  std::uint64_t failures;

  /// More than 1% of replicates failed to converge.
  bool suspect() const noexcept { return failures * 100 > reps; }
};

/// Deterministic uniform stream for one replicate, derived purely from
/// (seed, replicate index); distinct indices give independent streams.
inline Xoshiro256pp replicate_stream(std::uint64_t seed, std::uint64_t replicate_index) {
  return Xoshiro256pp::for_stream(seed, replicate_index);
}

namespace detail {

// Squared-error accumulators of one replicate, NaN when the fit failed.
struct CellErrors {
  std::vector<double> pdf;  // reps (mean mode) or reps*grid (per-point)
  std::vector<double> cdf;
};

inline unsigned resolve_threads(unsigned requested, std::uint64_t reps) {
  unsigned t = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  return static_cast<unsigned>(std::min<std::uint64_t>(t, reps));
}

// mean and standard error of the non-NaN entries, visited in index order so
// the reduction is independent of thread count.
inline void reduce(const std::vector<double>& e, std::size_t stride,
                   std::size_t offset, std::uint64_t reps, double& mse,
                   double& se, std::uint64_t& failures) {
  double sum = 0.0;
  std::uint64_t good = 0;
  for (std::uint64_t j = 0; j < reps; ++j) {
    const double v = e[j * stride + offset];
    if (std::isnan(v)) continue;
    sum += v;
    ++good;
  }
  failures = reps - good;
  if (good == 0) {
    mse = se = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  mse = sum / good;
  double ss = 0.0;
  for (std::uint64_t j = 0; j < reps; ++j) {
    const double v = e[j * stride + offset];
    if (std::isnan(v)) continue;
    const double d = v - mse;
    ss += d * d;
  }
  se = good > 1 ? std::sqrt(ss / (static_cast<double>(good) * (good - 1))) : 0.0;
}

}  // namespace detail

/// Monte Carlo MSE records (pdf target first, then cdf) for one estimator at
/// one (n, alpha) cell. Replicate j draws its sample from the stream derived
/// from (seed, cell_index*reps + j), so every estimator sees the same samples
/// and the result is bit-identical for any thread count. Replicates whose
/// fit fails to converge are excluded and counted.
inline std::vector<MseRecord> mc_mse(EstimatorKind kind, int n, double alpha,
                                     const StudyConfig& config,
                                     std::uint64_t cell_index = 0) {
  if (n < 1) throw std::domain_error("mc_mse: n must be >= 1");
  if (kind == EstimatorKind::umvue && n < 3)
    throw std::domain_error("mc_mse: UMVUE requires n >= 3");
  const ShapeParam shape(alpha);
  const auto grid = config.grid.points();
  const std::size_t gsz = grid.size();
  std::vector<double> true_pdf(gsz), true_cdf(gsz);
  for (std::size_t i = 0; i < gsz; ++i) {
    true_pdf[i] = pdf(shape, grid[i]);
    true_cdf[i] = cdf(shape, grid[i]);
  }

  const bool per_point = config.aggregate == Aggregate::per_point;
  const std::size_t stride = per_point ? gsz : 1;
  const std::uint64_t reps = config.reps;
  detail::CellErrors errs;
  errs.pdf.assign(reps * stride, 0.0);
  errs.cdf.assign(reps * stride, 0.0);

  const std::uint64_t base = cell_index * reps;
  auto worker = [&](std::uint64_t j_begin, std::uint64_t j_end) {
    for (std::uint64_t j = j_begin; j < j_end; ++j) {
      auto rng = replicate_stream(config.seed, base + j);
      auto uniforms = [&rng] { return open_unit(rng); };
      const Sample s(sample(shape, uniforms, static_cast<std::size_t>(n)));
      bool failed = false;
      FittedCurve curve = ShapeFit{1.0, kind};
      try {
        curve = fit(kind, s);
      } catch (const ConvergenceError&) {
        failed = true;
      }
      if (failed) {
        for (std::size_t gi = 0; gi < stride; ++gi) {
          errs.pdf[j * stride + gi] = std::numeric_limits<double>::quiet_NaN();
          errs.cdf[j * stride + gi] = std::numeric_limits<double>::quiet_NaN();
        }
        continue;
      }
      double acc_pdf = 0.0, acc_cdf = 0.0;
      for (std::size_t gi = 0; gi < gsz; ++gi) {
        const double dp = curve_pdf(curve, grid[gi]) - true_pdf[gi];
        const double dc = curve_cdf(curve, grid[gi]) - true_cdf[gi];
        if (per_point) {
          errs.pdf[j * stride + gi] = dp * dp;
          errs.cdf[j * stride + gi] = dc * dc;
        } else {
          acc_pdf += dp * dp;
          acc_cdf += dc * dc;
        }
      }
      if (!per_point) {
        errs.pdf[j] = acc_pdf / gsz;
        errs.cdf[j] = acc_cdf / gsz;
      }
    }
  };

  const unsigned nthreads = detail::resolve_threads(config.threads, reps);
  if (nthreads <= 1) {
    worker(0, reps);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    const std::uint64_t chunk = (reps + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::uint64_t b = t * chunk;
      const std::uint64_t e = std::min(reps, b + chunk);
      pool.emplace_back([&, t, b, e] {
        try {
          if (b < e) worker(b, e);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& ep : errors)
      if (ep) std::rethrow_exception(ep);
  }

  std::vector<MseRecord> out;
  for (Target target : {Target::pdf, Target::cdf}) {
    const auto& e = target == Target::pdf ? errs.pdf : errs.cdf;
    for (std::size_t gi = 0; gi < stride; ++gi) {
      MseRecord rec{kind, n, alpha, target, 0.0, 0.0, reps, config.seed,
                    config.grid.descriptor, 0};
      if (per_point) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "x=%.17g", grid[gi].value());
        rec.grid = buf;
      }
      detail::reduce(e, stride, gi, reps, rec.mse, rec.mc_se, rec.failures);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

/// Runs the full cross-product estimators x sizes x alphas. The replicate
/// stream index depends only on (seed, size index, alpha index, replicate),
/// so all estimators fit identical samples and output is reproducible across
/// runs and thread counts.
inline std::vector<MseRecord> run_study(const StudyConfig& config) {
  config.validate();
  std::vector<MseRecord> out;
  for (EstimatorKind kind : config.estimators)
    for (std::size_t si = 0; si < config.sizes.size(); ++si)
      for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
        const std::uint64_t cell = si * config.alphas.size() + ai;
        auto recs = mc_mse(kind, config.sizes[si], config.alphas[ai], config, cell);
        out.insert(out.end(), std::make_move_iterator(recs.begin()),
                   std::make_move_iterator(recs.end()));
      }
  return out;
}

}  // namespace toppleone
