// One PASS/FAIL line per acceptance criterion. Exit status 0 only when every
// criterion passes.
#include "achronal/chi_localization.hpp"
#include "achronal/current.hpp"
#include "achronal/experiments.hpp"
#include "achronal/flux.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace achronal;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Worst verdict as "name measured/tolerance" text.
std::string verdict_text(const ExperimentReport& r) {
  std::string out;
  for (const Verdict& v : r.verdicts) {
    if (!out.empty()) out += ", ";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s %.3g (tol %.3g)", v.pass ? "ok" : "FAILED", v.name.c_str(), v.measured,
                  v.tolerance);
    out += buf;
  }
  return out;
}

void criterion_1() {
  const auto t = Clock::now();
  FluxOptions opts;
  opts.n_6d = 20;
  const FluxResult r = flux(reference_state(), {FlatPlane::time_slice(0.0), Projection::all()}, KernelSpec(), opts);
  const double dev = std::abs(r.value - 1.0);
  const double secs = seconds_since(t);
  report(1, "normalization on {x0 = 0}", dev <= 1e-3 && secs <= 60.0,
         fmt("|flux - 1| = %.3g (tol 1e-3), %.1f s (limit 60 s)", dev, secs));
}

void criterion_2() {
  const MassShellState phi = reference_state();
  const KernelSpec spec;
  const double moc = flux(phi, {FlatPlane::chi(), Projection::all()}, spec).value;
  const MomentumField field = embed_j(phi, default_nystrom(phi, spec), make_fourier_grid(phi));
  const double fft = chi_probability_fft(field, {FlatPlane::chi(), Projection::all()}).value;
  const double agree = std::abs(moc - fft) / moc;
  const bool pass = std::abs(moc - 1.0) <= 1e-2 && std::abs(fft - 1.0) <= 1e-2 && agree <= 1e-2;
  report(2, "normalization on chi", pass,
         fmt("moc %.8f, fft %.8f", moc, fft) + fmt(", relative difference %.3g (tol %.0e)", agree, 1e-2));
}

void criterion_3() {
  const MassShellState phi = reference_state();
  const FourVector x{0.3, 0.2, -0.1, 0.4};

  const CurrentEvaluator fine(phi, make_grid(1.0, 2.0, 16), KernelSpec());
  const double r4 = std::abs(divergence(fine, x, 4e-3));
  const double r2 = std::abs(divergence(fine, x, 2e-3));
  const double r1 = std::abs(divergence(fine, x, 1e-3));
  const double order_a = std::log2(r4 / r2), order_b = std::log2(r2 / r1);
  const bool order_ok = std::abs(order_a - 2.0) <= 0.25 && std::abs(order_b - 2.0) <= 0.25;

  const QuadratureGrid grid = make_grid(1.0, 2.0, 12);
  std::vector<FourVector> events;
  const auto c = [](int i) { return -2.0 + 4.0 * i / 9; };
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int l = 0; l < 10; ++l) events.emplace_back(c((i + 3 * j + 7 * l) % 10), c(i), c(j), c(l));
  double margin = kInf;
  for (double r : {1.5, 2.0}) {
    for (const CurrentValue& v : CurrentEvaluator(phi, grid, KernelSpec(1.0, r)).evaluate(events)) {
      margin = std::min(margin, (v.J0 - v.J.norm()) / (1.0 + v.J0));
    }
  }

  const MassShellState off = bump_state(1.0, 2.0, Vec3(0.2, -0.1, 0.3), 1.4);
  const QuadratureGrid coarse = make_grid(1.0, 2.0, 10);
  const double j0 = current(off, x, coarse, KernelSpec()).J0;
  double cov = 0.0;
  for (const PoincareElement& g : {PoincareElement::pure_translation({0.3, 1, 2, -1}),
                                   PoincareElement::pure_lorentz(rotation(Vec3(1, 1, 0).normalized(), 0.8)),
                                   PoincareElement::pure_lorentz(boost(Vec3::UnitZ(), 1.0))}) {
    cov = std::max(cov, covariance_residual(off, g, x, coarse, KernelSpec()) / j0);
  }
  report(3, "current properties", order_ok && margin >= -1e-10 && cov <= 1e-9,
         fmt("divergence orders %.3f, %.3f (want 2 +- 0.25)", order_a, order_b) +
             fmt(", worst causality margin %.3g (tol -1e-10), covariance residual %.3g", margin, cov) +
             " (tol 1e-9)");
}

void criterion_4() {
  std::mt19937_64 rng(2024);
  double worst = kInf;
  for (double r : {1.5, 2.0}) {
    const KernelSpec spec(1.0, r);
    for (int set = 0; set < 20; ++set) {
      std::vector<Vec3> pts;
      while (pts.size() < 50) {
        const Vec3 p = oracle::random_vec(rng, 3.0);
        if (p.norm() <= 3.0) pts.push_back(p);
      }
      for (const KernelFunction& k : {KernelFunction([&](const Vec3& a, const Vec3& b) { return kernel_K(spec, a, b); }),
                                      KernelFunction([&](const Vec3& a, const Vec3& b) {
                                        return kernel_Kchi_normalized(spec, a, b);
                                      })}) {
        const PsdReport rep = psd_check(k, pts);
        worst = std::min(worst, rep.lambda_min / rep.trace);
      }
    }
  }
  const KernelSpec spec;
  const NystromFactor f = default_nystrom(reference_state(), spec);
  const Eigen::MatrixXd v = f.rkhs_vectors(f.anchors());
  double unit = 0.0;
  for (Eigen::Index j = 0; j < v.cols(); ++j) unit = std::max(unit, std::abs(v.col(j).norm() - 1.0));
  const auto [center, radius] = reference_state().support_ball();
  const std::vector<Vec3> probes = halton_ball(center, radius, 400, 77);
  double recon = 0.0;
  for (std::size_t i = 0; i + 1 < probes.size(); i += 2) {
    recon = std::max(recon, std::abs(f.rkhs_vector(probes[i]).dot(f.rkhs_vector(probes[i + 1])) -
                                     kernel_Kchi_normalized(spec, probes[i], probes[i + 1])));
  }
  report(4, "kernel positivity", worst >= -1e-8 && unit <= 1e-8 && recon <= 1e-3,
         fmt("min lambda_min/trace %.3g (tol -1e-8), anchor |v| - 1 %.3g (tol 1e-8)", worst, unit) +
             fmt(", off-anchor reconstruction %.3g (tol %.0e)", recon, 1e-3));
}

void criterion_experiment(int id, const std::string& name, const std::function<ExperimentReport()>& run,
                          double limit_s = 0.0) {
  const auto t = Clock::now();
  const ExperimentReport r = run();
  const double secs = seconds_since(t);
  std::string detail = verdict_text(r);
  bool pass = r.all_pass();
  if (limit_s > 0.0) {
    detail += fmt(", %.1f s (limit %.0f s)", secs, limit_s);
    pass = pass && secs <= limit_s;
  }
  report(id, name, pass, detail);
}

void criterion_9() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double factor = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec3 lo = oracle::random_vec(rng, 1.5);
    const Vec3 hi = lo + Vec3(0.2 + u(rng), 0.2 + u(rng), 0.2 + u(rng));
    const Vec3 k = oracle::random_vec(rng, 2.0), p = oracle::random_vec(rng, 2.0);
    const FlatPlane plane = (i % 4 == 0) ? FlatPlane::chi() : FlatPlane::spacelike(oracle::random_vec(rng, 0.5), u(rng));
    const Complex z = region_factor(Projection::box(lo, hi), k, p, plane, 1.0);
    factor = std::max(factor, std::abs(z - oracle::box_factor_quadrature(lo, hi, k, p, plane.v, plane.t0, 1.0, 40)));
  }

  const MassShellState phi =
      apply_rep(PoincareElement::pure_translation({0.2, 0.1, 0, -0.3}), bump_state(1.0, 2.0, Vec3(0.2, 0, 0.1), 1.5));
  const QuadratureGrid coarse = make_grid(1.0, 2.0, 8);
  const Vec3 lo(-1, -0.5, -1), hi(1, 1, 0.5);
  double six = 0.0;
  for (const FlatPlane& plane : {FlatPlane::time_slice(0.3), FlatPlane::spacelike(Vec3(0, 0, std::tanh(1.0)), 0.0),
                                 FlatPlane::chi()}) {
    const double fast = flux_box_value(phi, plane, Projection::box(lo, hi), coarse, KernelSpec());
    const double naive = oracle::flux_box(phi, coarse, 1.5, lo, hi, plane.v, plane.t0);
    six = std::max(six, std::abs(fast - naive) / std::abs(naive));
  }

  const MassShellState ref = reference_state();
  const QuadratureGrid grid = make_box_grid(1.0, ref.support_box(), 12, 10);
  const double strip = flux_strip_value(ref, FlatPlane::time_slice(0.0), 2, -1, 1, grid, KernelSpec());
  const double brute = flux_bruteforce(ref, {FlatPlane::time_slice(0.0), Projection::box(Vec3(-6, -6, -1), Vec3(6, 6, 1))},
                                       grid, KernelSpec(), Eigen::Vector3i(24, 24, 8))
                           .value;
  const double four = std::abs(strip - brute) / strip;
  report(9, "oracle equivalences", factor <= 1e-10 && six <= 1e-12 && four <= 1e-3,
         fmt("region factor %.3g (tol 1e-10), 6D vs naive %.3g (tol 1e-12)", factor, six) +
             fmt(", strip vs brute force %.3g (tol %.0e)", four, 1e-3));
}

void criterion_10() {
  const ExperimentSettings s;
  ChiCompareParams chi;
  chi.regions = {Projection::strip(2, -0.5, 0.5), Projection::box(Vec3(-1, -1, -1), Vec3(1, 1, 1))};
  FluxRunParams fp;
  fp.regions = {Projection::all(), Projection::strip(2, -1, 1), Projection::box(Vec3(-1, -1, -1), Vec3(1, 1, 1))};
  const auto bundle = [&] {
    return to_csv(run_contraction(s)) + to_csv(run_chi_compare(s, chi)) + to_csv(run_flux(s, fp)) +
           to_csv(run_aet(s));
  };
  const std::string a = bundle();
  const std::string b = bundle();
  report(10, "determinism", a == b, a == b ? "identical CSV bytes over two runs" : "CSV output differs between runs");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_experiment(5, "high-boost monotone convergence", [] { return run_boost_limit(ExperimentSettings{}); },
                       600.0);
  criterion_experiment(6, "lightlike and spacelike half-planes", [] { return run_mctc_c(ExperimentSettings{}); });
  criterion_experiment(7, "AET additivity and causality", [] { return run_aet(ExperimentSettings{}); });
  criterion_experiment(8, "Lorentz contraction", [] { return run_contraction(ExperimentSettings{}); });
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
