// Acceptance harness: one PASS/FAIL/SKIPPED line per criterion, detail lines indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tempdir.hpp"
#include "wearfuse/bessel.hpp"
#include "wearfuse/error.hpp"
#include "wearfuse/ewt.hpp"
#include "wearfuse/fbse.hpp"
#include "wearfuse/features.hpp"
#include "wearfuse/fusion.hpp"
#include "wearfuse/mlp.hpp"
#include "wearfuse/pipeline.hpp"

using namespace wearfuse;
using namespace oracle;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const std::string& text) {
  std::printf("      %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void fbse_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t u = std::array<std::size_t, 3>{64, 128, 256}[t % 3];
    std::vector<double> y(u);
    for (double& v : y) v = g(rng);
    worst = std::max(worst, rel_rmse(fbse_inverse(fbse_forward(y, 64.0)), y));
  }
  std::uniform_real_distribution<double> freq(2.0, 25.0);
  std::size_t hits = 0;
  double worst_offset = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t u = std::array<std::size_t, 3>{64, 128, 256}[t % 3];
    const double fs = 64.0, f = freq(rng);
    std::vector<double> y(u);
    for (std::size_t n = 0; n < u; ++n) y[n] = std::sin(2.0 * kPi * f * n / fs);
    const double expected = 2.0 * f * static_cast<double>(u) / fs;
    const double offset = std::abs(static_cast<double>(argmax_abs(fbse_forward(y, fs).coeffs) + 1) - expected);
    worst_offset = std::max(worst_offset, offset);
    if (offset <= 2.0) ++hits;
  }
  const double elapsed = seconds_since(start);
  verdict(worst <= 1e-3 && hits == 20 && elapsed < 30.0, "FBSE correctness",
          "worst roundtrip rel RMSE " + fmt("%.2e", worst) + " over 100 windows, " + std::to_string(hits) +
              "/20 tones within 2 orders (worst " + fmt("%.2f", worst_offset) + "), " + fmt("%.2f s", elapsed));
}

void bessel_roots() {
  const auto r = j0_roots(256);
  double residual = 0.0, oracle_gap = 0.0;
  bool increasing = true;
  for (std::size_t m = 0; m < r.roots.size(); ++m) {
    residual = std::max(residual, std::abs(bessel_j0(r.roots[m])));
    if (m > 0) increasing = increasing && r.roots[m] > r.roots[m - 1];
  }
  // bisection on the power series, over the range where it is accurate
  for (std::size_t m = 0; m < 6; ++m) {
    const double a = (static_cast<double>(m) + 0.75) * kPi;
    oracle_gap = std::max(oracle_gap, std::abs(r.roots[m] - bisect_root(a - 0.4, a + 0.4)));
  }
  const double beta2 = r.roots[1];
  verdict(r.roots.size() == 256 && residual <= 1e-10 && std::abs(beta2 - 5.520078) <= 1e-5 && oracle_gap <= 1e-12 &&
              increasing,
          "Bessel roots",
          "256 roots, max |J0| " + fmt("%.2e", residual) + ", beta_2 = " + fmt("%.7f", beta2) +
              ", max gap to bisection " + fmt("%.1e", oracle_gap));
}

void ewt_frame() {
  std::mt19937_64 rng(202);
  double pou = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto b = random_boundaries(rng);
    const auto bank = build_filter_bank(b, 257);
    for (std::size_t m = 0; m < 257; ++m) {
      double sum = 0.0;
      for (const auto& resp : bank.responses) sum += resp[m] * resp[m];
      pou = std::max(pou, std::abs(sum - 1.0));
    }
  }

  std::normal_distribution<double> g;
  double recon = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t u = std::array<std::size_t, 3>{64, 128, 256}[t % 3];
    std::vector<double> y(u);
    for (std::size_t n = 0; n < u; ++n) y[n] = g(rng) + std::sin(0.2 * n * (1 + t % 5));
    const auto ms = decompose(y, 64.0);
    double mean = 0.0;
    for (double v : y) mean += v / static_cast<double>(u);
    std::vector<double> demeaned(u), sum(u, 0.0);
    for (std::size_t n = 0; n < u; ++n) demeaned[n] = y[n] - mean;
    for (const auto& m : ms.modes) {
      for (std::size_t n = 0; n < u; ++n) sum[n] += m[n];
    }
    recon = std::max(recon, rel_rmse(sum, demeaned));
  }

  const auto y = tones(256, 64.0, {5.0, 20.0});
  EwtConfig two;
  two.max_modes = 2;
  const auto ms = decompose(y, 64.0, two);
  double purity = 0.0;
  bool split = ms.modes.size() == 2;
  if (split) {
    const auto [l0, h0] = band_energy(ms.modes[0], 64.0, 12.5);
    const auto [l1, h1] = band_energy(ms.modes[1], 64.0, 12.5);
    purity = std::min(l0 / (l0 + h0), h1 / (l1 + h1));
  }
  verdict(pou <= 1e-6 && recon <= 1e-2 && split && purity >= 0.9, "EWT frame properties",
          "partition of unity max error " + fmt("%.2e", pou) + " on 50 sets, reconstruction rel RMSE " +
              fmt("%.2e", recon) + " on 100 windows, two-tone min band purity " + fmt("%.4f", purity));
}

void otsu_equivalence() {
  std::size_t checked = 0, agree = 0;
  std::vector<std::uint32_t> cur;
  for (std::size_t size = 1; size <= 8; ++size) {
    multisets(cur, 0, size, [&](const std::vector<std::uint32_t>& v) {
      ++checked;
      const auto expected = otsu(v);
      try {
        const auto got = otsu_threshold(v);
        if (expected && got == *expected) ++agree;
      } catch (const Error&) {
        if (!expected) ++agree;
      }
    });
  }
  verdict(agree == checked, "Otsu oracle equivalence",
          std::to_string(agree) + "/" + std::to_string(checked) + " multisets of size <= 8 over {0..10} agree");
}

void feature_identities() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> len(2, 2000);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t w = len(rng);
    const double c = g(rng) * 3.0 + 0.1;
    const std::vector<double> constant(w, c);
    worst = std::max(worst, std::abs(mode_energy(constant) - c * c));
    worst = std::max(worst, std::abs(mode_entropy(constant) - std::log(static_cast<double>(w))));
    std::vector<double> impulse(w, 0.0);
    impulse[w / 3] = c;
    worst = std::max(worst, std::abs(mode_entropy(impulse)));
    std::vector<double> mode(w), scaled(w);
    for (std::size_t n = 0; n < w; ++n) {
      mode[n] = g(rng);
      scaled[n] = c * mode[n];
    }
    const double e = mode_energy(mode);
    worst = std::max(worst, std::abs(mode_energy(scaled) - c * c * e) / std::max(1.0, c * c * e));
    worst = std::max(worst, std::abs(mode_entropy(scaled) - mode_entropy(mode)));
  }
  verdict(worst <= 1e-9, "Feature identities", "worst deviation " + fmt("%.2e", worst) + " over 200 random modes");
}

void mlp_checks() {
  const std::vector<std::size_t> hidden{4};
  Mlp net(6, hidden, 3);
  net.initialize(9);
  auto params = net.parameters();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (std::size_t i = net.bias_offset(l); i < net.bias_offset(l) + net.shape()[l + 1]; ++i) params[i] = 0.1;
  }
  const auto data = blobs(4, 6, 2);
  const Batch batch{data.x, data.y};
  std::vector<double> grad, scratch;
  loss_and_gradient(net, batch, 0.01, 0.0, grad);
  double worst = 0.0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = loss_and_gradient(net, batch, 0.01, 0.0, scratch);
    params[i] = keep - h;
    const double down = loss_and_gradient(net, batch, 0.01, 0.0, scratch);
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(numeric - grad[i]) / std::max(1e-8, std::abs(numeric) + std::abs(grad[i])));
  }

  const auto start = Clock::now();
  const auto model = train_mlp(blobs(80, 6, 1), blobs(20, 6, 2), MlpHyper{});
  const double elapsed = seconds_since(start);
  verdict(worst <= 1e-4 && model.val_accuracy >= 0.95 && elapsed < 60.0, "MLP gradient check and blobs",
          "max relative gradient error " + fmt("%.2e", worst) + " on 6-4-3, blob validation accuracy " +
              fmt("%.4f", model.val_accuracy) + " in " + fmt("%.2f s", elapsed));
}

void fusion_algebra() {
  const Modality sensors[] = {Modality::ECG, Modality::EDA, Modality::EMG, Modality::BVP, Modality::ACC};
  const ClassDistribution uniform{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 5);
  std::size_t violations = 0;
  double worst_invisible = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = size(rng);
    std::vector<SspOutput> team;
    for (int i = 0; i < n; ++i) team.push_back({sensors[i], random_distribution(rng), unit(rng)});
    const auto d = fuse(team);

    double sum = 0.0;
    for (double v : d.p) {
      if (v < 0.0) ++violations;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) ++violations;

    auto perm = team;
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto dp = fuse(perm);
    for (std::size_t c = 0; c < 3; ++c) {
      if (std::abs(dp.p[c] - d.p[c]) > 1e-12) ++violations;
    }

    if (!d.fallback) {
      auto extended = team;
      extended.push_back({Modality::ACC_X, uniform, unit(rng)});
      const auto de = fuse(extended);
      for (std::size_t c = 0; c < 3; ++c) worst_invisible = std::max(worst_invisible, std::abs(de.p[c] - d.p[c]));
    }

    std::vector<SspOutput> same;
    for (int i = 0; i < n; ++i) same.push_back({sensors[i], team[0].p, unit(rng)});
    const auto ds = fuse(same);
    for (std::size_t c = 0; c < 3; ++c) {
      if (std::abs(ds.p[c] - team[0].p[c]) > 1e-12) ++violations;
    }

    const std::vector<SspOutput> one{team[0]};
    const auto d1 = fuse(one);
    for (std::size_t c = 0; c < 3; ++c) {
      if (std::abs(d1.p[c] - team[0].p[c]) > 1e-15) ++violations;
    }
  }
  verdict(violations == 0 && worst_invisible <= 1e-12, "Fusion algebra",
          "1000 random teams, " + std::to_string(violations) + " violations, max-entropy member shifts P by at most " +
              fmt("%.1e", worst_invisible));
}

void report_details(const EvalReport& report) {
  for (const auto& s : report.per_size) {
    note("size " + std::to_string(s.size) + ": decision " + fmt("%.4f", s.mean_decision) + " +/- " +
         fmt("%.4f", s.std_decision) + ", feature " + fmt("%.4f", s.mean_feature) + " +/- " +
         fmt("%.4f", s.std_feature));
  }
  const auto pc = report.cases.percentages();
  note("cases D>F / D=F / D<F: " + fmt("%.1f%%", pc[0]) + " / " + fmt("%.1f%%", pc[1]) + " / " + fmt("%.1f%%", pc[2]) +
       " of " + std::to_string(report.cases.total()));
}

void end_to_end() {
  TempDir dir("acceptance");
  PipelineConfig cfg;
  cfg.seed = 42;
  cfg.synth.subjects = 15;
  cfg.corrupt_sensors = cfg.sensors;
  cfg.out_dir = (dir / "out").string();
  const auto start = Clock::now();
  EvalReport report;
  try {
    report = run_all(cfg);
  } catch (const std::exception& e) {
    verdict(false, "End-to-end synthetic benchmark", std::string("pipeline failed: ") + e.what());
    return;
  }
  const double elapsed = seconds_since(start);

  Team full{cfg.sensors};
  const double full_acc = report.team(full).decision.accuracy;
  const auto [d_drop, f_drop] = report.mean_drops();
  verdict(elapsed < 600.0 && full_acc >= 0.90 && d_drop < f_drop, "End-to-end synthetic benchmark",
          "seed 42, 15 subjects, " + fmt("%.1f s", elapsed) + ", full-team decision accuracy " + fmt("%.4f", full_acc) +
              ", mean noise-corruption drop decision " + fmt("%.4f", d_drop) + " vs feature " + fmt("%.4f", f_drop));
  for (const auto& c : report.corruption) {
    note(std::string(to_string(c.sensor)) + " replaced by noise: decision " + fmt("%.4f", c.decision_clean) + " -> " +
         fmt("%.4f", c.decision_corrupt) + ", feature " + fmt("%.4f", c.feature_clean) + " -> " +
         fmt("%.4f", c.feature_corrupt));
  }
  report_details(report);

  // fused teams against their members' average single-sensor accuracy
  std::size_t above = 0, multi = 0;
  for (const auto& t : report.teams) {
    if (t.team.members.size() < 2) continue;
    ++multi;
    double mean = 0.0;
    for (auto m : t.team.members) mean += report.team(Team{{m}}).decision.accuracy;
    mean /= static_cast<double>(t.team.members.size());
    if (t.decision.accuracy >= mean) ++above;
  }
  note(std::to_string(above) + "/" + std::to_string(multi) + " fused teams at or above their members' mean accuracy");
}

void real_dataset() {
  const char* path = std::getenv("WEARFUSE_REAL_DATA");
  const std::string name = "Real-dataset reproduction (best-effort)";
  if (!path || !*path) {
    std::printf("SKIPPED  %s: set WEARFUSE_REAL_DATA to a converted dataset directory to run\n", name.c_str());
    return;
  }
  TempDir dir("acceptance-real");
  PipelineConfig cfg;
  cfg.data_dir = path;
  cfg.out_dir = (dir / "out").string();
  EvalReport report;
  try {
    report = run_all(cfg);
  } catch (const std::exception& e) {
    verdict(false, name, std::string("pipeline failed: ") + e.what());
    return;
  }
  bool every_size = true;
  for (const auto& s : report.per_size) every_size = every_size && s.mean_decision >= s.mean_feature;
  const auto pc = report.cases.percentages();
  const double d_ge_f = pc[0] + pc[1];
  verdict(every_size && d_ge_f >= 70.0, name,
          std::string("decision >= feature at every size: ") + (every_size ? "yes" : "no") + ", D>=F in " +
              fmt("%.1f%%", d_ge_f) + " of cases");
  report_details(report);
}

}  // namespace

int main() {
  fbse_correctness();
  bessel_roots();
  ewt_frame();
  otsu_equivalence();
  feature_identities();
  mlp_checks();
  fusion_algebra();
  end_to_end();
  real_dataset();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
