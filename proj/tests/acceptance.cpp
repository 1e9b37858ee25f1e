// Copyright 2026 The HFI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hfi/distance.hpp"
#include "hfi/filters.hpp"
#include "hfi/imaging.hpp"
#include "hfi/metrics.hpp"
#include "hfi/reconstruct.hpp"
#include "hfi/registry.hpp"
#include "hfi/scoring.hpp"
#include "hfi/synthetic.hpp"
#include "metric_oracles.hpp"

namespace {

using namespace hfi;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ImageTensor random_image(std::mt19937_64& rng, int c, int h, int w, double lo = 0.0,
                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ImageTensor img(c, h, w);
  for (double& s : img.samples()) s = u(rng);
  return img;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Outcome metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> len(1, 50);
  std::uniform_int_distribution<int> coarse(0, 5);
  std::uniform_real_distribution<double> fine(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto draw = [&] { return trial % 2 ? static_cast<double>(coarse(rng)) : fine(rng); };
    std::vector<double> pos(len(rng)), neg(len(rng));
    for (double& v : pos) v = draw();
    for (double& v : neg) v = draw();
    if (auroc(pos, neg) != oracle::auroc(pos, neg)) ++mismatches;
    if (aupr(pos, neg) != oracle::aupr(pos, neg)) ++mismatches;
  }
  const double s = seconds_since(t0);
  return {mismatches == 0 && s < 10.0,
          std::to_string(mismatches) + " mismatches over 1000 lists, " + fmt(s) + " s"};
}

Outcome worked_example() {
  const ImageTensor x(1, 1, 4, std::vector<double>{1, 0, 1, 0});
  const auto h = ReconstructorHandle::classical("s2", 8, 2, std::nullopt, UpsampleKind::kNearest);
  const double v = hfi_score(x, h, Distance(DistanceKind::mse()), FilterSpec::box(3));
  return {std::abs(v - 4.0 / 9.0) <= 1e-9, "HFI = " + fmt(v)};
}

Outcome taylor_order() {
  // Analytic directional derivative for linear A: 2<(I-A)x,(I-A)r>/n with
  // (I-A)r = (x - Ax) - (Fx - A Fx).
  std::mt19937_64 rng(7);
  const auto h = ReconstructorHandle::classical("aa16", 16, 8, FilterSpec::gaussian(),
                                                UpsampleKind::kBilinear);
  const auto f = FilterSpec::gaussian();
  const double eps[] = {1e-2, 1e-3, 1e-4};
  double worst_lo = INFINITY;
  double worst_hi = -INFINITY;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_image(rng, 3, 16, 16, 0.1, 0.9);
    const auto fx = apply_lowpass(x, f);
    const auto ex = axpy(x, -1.0, reconstruct(h, x));
    const auto ef = axpy(fx, -1.0, reconstruct(h, fx));
    double dot = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      dot += ex.samples()[i] * (ex.samples()[i] - ef.samples()[i]);
    }
    const double truth = 2.0 * dot / static_cast<double>(ex.size());
    // Least-squares slope of log error against log ε.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double e : eps) {
      const double lx = std::log(e);
      const double ly = std::log(std::abs(hfi_directional(x, h, f, e) - truth));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double order = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    worst_lo = std::min(worst_lo, order);
    worst_hi = std::max(worst_hi, order);
  }
  return {worst_lo >= 0.9 && worst_hi <= 1.1,
          "observed order in [" + fmt(worst_lo) + ", " + fmt(worst_hi) + "]"};
}

Outcome zero_invariants() {
  std::mt19937_64 rng(11);
  const std::vector<Distance> distances = {Distance(DistanceKind::mse()),
                                           Distance(DistanceKind::l1())};
  std::vector<ReconstructorHandle> handles = default_classical_suite(16);
  handles.push_back(
      ReconstructorHandle::classical("s2", 16, 2, FilterSpec::median(), UpsampleKind::kBicubic));
  const auto identity =
      ReconstructorHandle::classical("identity", 16, 1, std::nullopt, UpsampleKind::kNearest);
  const std::vector<FilterSpec> filters = {FilterSpec::gaussian(), FilterSpec::box(5),
                                           FilterSpec::median(), FilterSpec::bilateral(),
                                           FilterSpec::dct(36)};
  double worst = 0.0;
  int checks = 0;
  auto check = [&](double v) {
    worst = std::max(worst, std::abs(v));
    ++checks;
  };
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_image(rng, 3, 16, 16);
    const ImageTensor c(3, 16, 16, std::uniform_real_distribution<double>(0, 1)(rng));
    for (const auto& d : distances) {
      for (const auto& f : filters) check(hfi_score(x, identity, d, f));
      for (const auto& h : handles) check(hfi_score(x, h, d, FilterSpec::identity()));
      for (const auto& h : handles) {
        for (const auto& f : filters) check(hfi_score(c, h, d, f));
      }
    }
  }
  return {worst < 1e-9, std::to_string(checks) + " cases, max |HFI| = " + fmt(worst)};
}

Outcome aliasing_witness() {
  const auto cb = checkerboard(3, 32, 32);
  const auto h = ReconstructorHandle::classical("s2", 32, 2, std::nullopt, UpsampleKind::kNearest);
  const auto y = reconstruct(h, cb);
  const double first = y.samples()[0];
  bool constant = true;
  for (double s : y.samples()) constant = constant && s == first;
  return {constant, constant ? "constant " + fmt(first) : "not constant"};
}

Outcome separation() {
  const auto t0 = Clock::now();
  const auto h = default_classical_suite()[0];
  const Distance d(DistanceKind::mse());
  const auto f = FilterSpec::gaussian();
  std::vector<double> hr, hg, ar, ag, hr_pad, ar_pad;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto x = synthetic_texture(0, i);
    const auto g = reconstruct(h, x);
    hr.push_back(hfi_score(x, h, d, f));
    hg.push_back(hfi_score(g, h, d, f));
    ar.push_back(aeroblade_score(x, h, d));
    ag.push_back(aeroblade_score(g, h, d));
    // Half of the real images get a flat background; g stays fixed.
    const auto xp = i % 2 == 0 ? pad_background(x) : x;
    hr_pad.push_back(hfi_score(xp, h, d, f));
    ar_pad.push_back(aeroblade_score(xp, h, d));
  }
  const double hfi_auc = auroc(hr, hg);
  const double drop_aero = auroc(ar, ag) - auroc(ar_pad, ag);
  const double drop_hfi = hfi_auc - auroc(hr_pad, hg);
  const double s = seconds_since(t0);
  return {hfi_auc >= 0.95 && drop_aero > drop_hfi && s < 120.0,
          "HFI AUROC " + fmt(hfi_auc) + ", padding drop AEROBLADE " + fmt(drop_aero) + " vs HFI " +
              fmt(drop_hfi) + ", " + fmt(s) + " s"};
}

Outcome lpips_decomposition() {
  const auto reg = load_registry(HFI_FIXTURE_DIR "/registry.json");
  const auto model = LpipsModel::load(reg.distance_assets.at(0).asset, reg.distance_assets[0].id);
  const auto img0 = read_image(HFI_FIXTURE_DIR "/img0.png");
  const std::vector<ImageTensor> others = {img0, read_image(HFI_FIXTURE_DIR "/img0_blur.png"),
                                           read_image(HFI_FIXTURE_DIR "/img1.png")};
  double worst = 0.0;
  for (const auto& y : others) {
    double sum = 0.0;
    for (int j = 1; j <= 5; ++j) sum += Distance(DistanceKind::lpips_layer(j), model)(img0, y);
    worst = std::max(worst, std::abs(Distance(DistanceKind::lpips(), model)(img0, y) - sum));
  }
  return {worst <= 1e-6, "max |full - sum of stages| = " + fmt(worst)};
}

Outcome gaussian_and_dct() {
  const auto k = gaussian_kernel_1d(3, 0.8);
  const double want[] = {0.23899, 0.52201, 0.23899};
  double tap_err = 0.0;
  for (int i = 0; i < 3; ++i) tap_err = std::max(tap_err, std::abs(k[i] - want[i]));
  std::mt19937_64 rng(5);
  double rt = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_image(rng, 1, 64, 64);
    rt = std::max(rt, max_abs_diff(idct2(dct2(x)), x));
  }
  return {tap_err <= 1e-5 && rt < 1e-5,
          "tap error " + fmt(tap_err) + ", DCT round-trip error " + fmt(rt)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric-oracle-equivalence", metric_oracles},
      {"worked-hfi-example", worked_example},
      {"directional-derivative-order", taylor_order},
      {"zero-invariants", zero_invariants},
      {"aliasing-witness", aliasing_witness},
      {"desk-scale-separation", separation},
      {"lpips-decomposition", lpips_decomposition},
      {"gaussian-taps-and-dct-round-trip", gaussian_and_dct},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
