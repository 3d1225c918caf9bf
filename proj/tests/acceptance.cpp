// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elmsol/dataset.hpp"
#include "elmsol/diagnostics.hpp"
#include "elmsol/elm.hpp"
#include "elmsol/metrics.hpp"
#include "elmsol/selection.hpp"
#include "elmsol/synth.hpp"
#include "oracles.hpp"

using namespace elmsol;

namespace {

constexpr std::uint64_t kBenchSeed = 42;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::span<const double> view(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

struct Benchmark {
  Dataset all;
  Dataset train;
  Dataset test;
};

Benchmark make_benchmark() {
  Dataset all = gen_synth({5000, kBenchSeed, 0.05});
  auto [tr, te] = split(all, 0.75, kBenchSeed);
  return {std::move(all), std::move(tr), std::move(te)};
}

ElmConfig bench_config() {
  ElmConfig cfg;
  cfg.hidden_nodes = 30;
  cfg.seed = kBenchSeed;
  return cfg;
}

void crit1(Outcome& o) {
  const auto start = std::chrono::steady_clock::now();
  const Benchmark b = make_benchmark();
  const ElmModel m = train(bench_config(), b.train);
  const Eigen::VectorXd p = m.predict(b.test.features());
  const Eigen::VectorXd t = b.test.targets();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const double r2 = r_squared(view(t), view(p));
  const double err = rmse(view(t), view(p));
  Eigen::VectorXd clean(t.size());
  for (std::size_t i = 0; i < b.test.size(); ++i) clean(static_cast<Eigen::Index>(i)) = synth_clean_target(b.test[i]);
  const double floor = rmse(view(t), view(clean));

  o.detail << "test R2=" << r2 << " RMSE=" << err << " noise floor=" << floor << " ratio=" << err / floor
           << " time=" << seconds << "s";
  o.require(r2 >= 0.98, "R2 >= 0.98");
  o.require(err <= 2.0 * floor, "RMSE <= 2x noise floor");
  o.require(seconds < 10.0, "runtime < 10 s");
}

void crit2(Outcome& o) {
  std::mt19937_64 gen(2);
  double worst_rel = 0.0, worst_foc = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd x = oracle::random_matrix(gen, 50, 8, -10.0, 10.0);
    const Eigen::MatrixXd t = oracle::random_matrix(gen, 50, 1, 0.0, 1.0);
    ElmConfig cfg;
    cfg.hidden_nodes = 10;
    cfg.regularization = 10.0;
    cfg.seed = 100 + static_cast<std::uint64_t>(k);
    const ElmModel m = train(cfg, x, t);
    const Eigen::MatrixXd h = m.hidden_matrix(x);
    const Eigen::MatrixXd ref = oracle::ridge_normal_equations(h, t, 10.0);
    const Eigen::MatrixXd& beta = m.output_weights();
    worst_rel = std::max(worst_rel, (beta - ref).norm() / ref.norm());
    const Eigen::MatrixXd grad = h.transpose() * (h * beta - t) + beta / 10.0;
    worst_foc = std::max(worst_foc, grad.norm() / (h.transpose() * t).norm());
  }
  o.detail << "max rel diff=" << worst_rel << " max first-order residual=" << worst_foc;
  o.require(worst_rel <= 1e-8, "oracle agreement 1e-8");
  o.require(worst_foc <= 1e-8, "first-order condition 1e-8");
}

void crit3(Outcome& o) {
  std::mt19937_64 gen(3);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd x = oracle::random_matrix(gen, 20, 8, 0.0, 10.0);
    const Eigen::MatrixXd t = oracle::random_matrix(gen, 20, 1, 0.0, 1.0);
    ElmConfig cfg;
    cfg.hidden_nodes = 20;
    cfg.seed = seed;
    const ElmModel m = train(cfg, x, t);
    worst = std::max(worst, (m.predict(x) - t.col(0)).cwiseAbs().maxCoeff());
  }
  o.detail << "max |residual|=" << worst;
  o.require(worst <= 1e-6, "residual <= 1e-6");
}

void crit4(Outcome& o) {
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<int> cols(1, 10);
  double sym = 0, idem = 0, trace = 0, lo = 1, hi = 0;
  for (int k = 0; k < 100; ++k) {
    const int p = cols(gen);
    const int n = p + 1 + static_cast<int>(gen() % 60);
    const Eigen::MatrixXd u = oracle::random_matrix(gen, n, p);
    const Eigen::MatrixXd h = hat_matrix(u);
    sym = std::max(sym, (h - h.transpose()).cwiseAbs().maxCoeff());
    idem = std::max(idem, (h * h - h).cwiseAbs().maxCoeff());
    trace = std::max(trace, std::abs(h.trace() - p));
    lo = std::min(lo, h.diagonal().minCoeff());
    hi = std::max(hi, h.diagonal().maxCoeff());
  }
  o.detail << "symmetry=" << sym << " idempotence=" << idem << " trace=" << trace << " diag in [" << lo << ", "
           << hi << "]";
  o.require(sym <= 1e-12, "symmetric");
  o.require(idem <= 1e-10, "idempotent");
  o.require(trace <= 1e-8, "trace = p");
  // Rounding can put a diagonal entry a few ulps outside [0, 1].
  o.require(lo >= -1e-14 && hi <= 1.0 + 1e-14, "diagonal in [0, 1]");
}

void crit5(Outcome& o) {
  const double a = critical_leverage(8, 1175);
  const double b = critical_leverage(8, 881);
  o.detail << "H*(8,1175)=" << a << " H*(8,881)=" << b;
  o.require(std::abs(a - 0.0229787) <= 1e-6, "0.0229787");
  o.require(std::abs(b - 0.0306470) <= 1e-6, "0.0306470");
}

void crit6(Outcome& o, const Benchmark& bench) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> len(2, 500);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto n = static_cast<std::size_t>(len(gen));
    std::vector<double> x(n), y(n);
    const double rho = std::uniform_real_distribution<double>(-1, 1)(gen);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = nd(gen);
      y[i] = rho * x[i] + nd(gen);
    }
    worst = std::max(worst, std::abs(relevancy_factor(x, y) - oracle::pearson_two_pass(x, y)));
  }
  const SensitivityReport s = sensitivity_report(bench.all);
  const double rp = s["pressure_mpa"].value_or(std::nan(""));
  std::string top;
  double top_abs = -1.0;
  for (std::size_t k = 0; k < kFeatureCount; ++k)
    if (s.factors[k] && std::abs(*s.factors[k]) > top_abs) {
      top_abs = std::abs(*s.factors[k]);
      top = std::string(kFeatureNames[k]);
    }
  o.detail << "max oracle diff=" << worst << " r(P)=" << rp << " largest |r|=" << top << " (" << top_abs << ")";
  o.require(worst <= 1e-12, "oracle agreement 1e-12");
  o.require(rp > 0.0, "r(P) > 0");
  o.require(top == "pressure_mpa", "pressure has the largest |r|");
}

void crit7(Outcome& o, const Benchmark& bench) {
  SweepOptions opts;
  opts.nodes = {1, 60, 1};
  opts.repeats = 5;
  const SweepReport a = sweep(bench.train, bench.test, opts, bench_config());
  const SweepReport b = sweep(bench.train, bench.test, opts, bench_config());
  const double at_sel = a.mean_test_rmse(a.selected_nodes);
  const double at_1 = a.mean_test_rmse(1);
  const double at_60 = a.mean_test_rmse(60);
  o.detail << "selected L=" << a.selected_nodes << " mean test RMSE " << at_sel << " (L=1: " << at_1
           << ", L=60: " << at_60 << ")";
  o.require(at_sel < at_1 && at_sel < at_60, "selected below both ends");
  o.require(sweep_to_csv(a) == sweep_to_csv(b) && a.selected_nodes == b.selected_nodes, "deterministic");
}

void crit8(Outcome& o) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(50), p(50);
    for (std::size_t i = 0; i < 50; ++i) {
      a[i] = u(gen);
      p[i] = u(gen);
    }
    const double r = rmse(a, p);
    worst = std::max(worst, std::abs(mse(a, p) - r * r) / mse(a, p));
  }
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> mean(4, 2.5);
  const bool hand = mre(std::vector<double>{1, 2}, std::vector<double>{1.1, 1.8}) - 10.0 == 0.0 ||
                    std::abs(mre(std::vector<double>{1, 2}, std::vector<double>{1.1, 1.8}) - 10.0) < 1e-13;
  o.detail << "max |mse-rmse^2|/mse=" << worst << " R2(perfect)=" << r_squared(a, a)
           << " R2(mean)=" << r_squared(a, mean);
  o.require(worst <= 1e-12, "mse = rmse^2");
  o.require(r_squared(a, a) == 1.0, "R2 = 1 on perfect predictions");
  o.require(r_squared(a, mean) == 0.0, "R2 = 0 predicting the mean");
  o.require(hand && mse(std::vector<double>{0, 0}, std::vector<double>{3, -3}) == 9.0 &&
                r_squared(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) == 0.5,
            "hand cases");
}

void crit9(Outcome& o, const Benchmark& bench) {
  const ElmModel m = train(bench_config(), bench.train);
  const auto path = std::filesystem::temp_directory_path() / "elmsol_acceptance_model.json";
  save_model(m, path);
  const ElmModel back = load_model(path);
  std::filesystem::remove(path);
  std::mt19937_64 gen(9);
  const Eigen::MatrixXd x = oracle::random_matrix(gen, 100, 8, 0.0, 100.0);
  const Eigen::VectorXd p1 = m.predict(x), p2 = back.predict(x);
  const bool identical = std::memcmp(p1.data(), p2.data(), sizeof(double) * 100) == 0;
  const double i0 = ionic_strength({});
  const std::vector<IonSpec> nacl = {{1.0, 1}, {1.0, -1}};
  const std::vector<IonSpec> cacl2 = {{1.0, 2}, {2.0, -1}};
  o.detail << "bitwise identical=" << (identical ? "yes" : "no") << " I=" << i0 << "," << ionic_strength(nacl) << ","
           << ionic_strength(cacl2);
  o.require(identical, "bitwise predictions");
  o.require(i0 == 0.0 && ionic_strength(nacl) == 1.0 && ionic_strength(cacl2) == 3.0, "ionic strength cases");
}

void crit10(Outcome& o, const Benchmark& bench) {
  const ElmModel m = train(bench_config(), bench.train);
  const Eigen::MatrixXd x = bench.all.features();
  const Eigen::VectorXd t = bench.all.targets();
  const Eigen::VectorXd p = m.predict(x);
  const LeverageReport r = williams_report(m.scaler().transform(x), view(t), view(p));
  const double share = static_cast<double>(r.count(PointFlag::valid)) / static_cast<double>(r.flags.size());

  // Same design plus one point far outside the feature cloud.
  Eigen::MatrixXd xi(x.rows() + 1, x.cols());
  xi.topRows(x.rows()) = x;
  xi.row(x.rows()) << 0.25, 0.25, 0.25, 0.25, 60.0, 900.0, 600.0, 4.0;
  Eigen::VectorXd ti(t.size() + 1), pi(p.size() + 1);
  ti << t, t.mean();
  pi << p, m.predict(Eigen::MatrixXd(xi.bottomRows(1)))(0);
  const LeverageReport ri = williams_report(m.scaler().transform(xi), view(ti), view(pi));
  const PointFlag injected = ri.flags.back();

  o.detail << "valid " << r.count(PointFlag::valid) << "/" << r.flags.size() << " (" << 100 * share
           << "%), H*=" << r.critical_leverage << ", injected point h=" << ri.hat_diagonal(ri.hat_diagonal.size() - 1)
           << " flagged " << to_string(injected);
  o.require(share >= 0.90, ">= 90% valid");
  o.require(injected == PointFlag::high_leverage, "injected point high_leverage");
}

}  // namespace

int main() {
  std::printf("elmsol acceptance suite\n");
  const Benchmark bench = make_benchmark();
  const std::vector<std::function<void(Outcome&)>> criteria = {
      crit1,
      crit2,
      crit3,
      crit4,
      crit5,
      [&](Outcome& o) { crit6(o, bench); },
      [&](Outcome& o) { crit7(o, bench); },
      crit8,
      [&](Outcome& o) { crit9(o, bench); },
      [&](Outcome& o) { crit10(o, bench); },
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i](o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
