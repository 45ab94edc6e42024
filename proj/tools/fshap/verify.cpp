// Copyright 2026 The FourierSHAP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

#include "fshap/blackbox.hpp"
#include "fshap/commands.hpp"
#include "fshap/csv.hpp"
#include "fshap/error.hpp"
#include "fshap/instance.hpp"
#include "fshap/oracles.hpp"
#include "fshap/rng.hpp"
#include "fshap/shap.hpp"

namespace fshap::cli {
namespace {

struct Trial {
  std::uint64_t seed;
  SparseSpectrum spectrum;
  BackgroundDataset background;
  PointVector query;
};

struct SuiteResult {
  std::string name;
  double tolerance = 0.0;  // 0 means exact
  std::size_t cases = 0;
  double max_dev = 0.0;
  bool skipped = false;
  std::string note;
  std::optional<std::uint64_t> first_failure;

  bool passed() const { return skipped || !first_failure; }
  void record(double dev, std::uint64_t seed) {
    ++cases;
    max_dev = std::max(max_dev, dev);
    if (!(dev <= tolerance) && !first_failure) first_failure = seed;
  }
};

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::size_t capped_k(std::size_t n, std::size_t k, std::size_t dd) {
  std::uint64_t avail = 0;
  try {
    avail = degree_support_count(n, std::min(dd, n));
  } catch (const NumericError&) {
    return k;
  }
  return static_cast<std::size_t>(std::min<std::uint64_t>(k, avail));
}

PointVector flip_bit(const PointVector& x, std::size_t j) {
  std::vector<std::uint64_t> w(x.words().begin(), x.words().end());
  w[j / kWordBits] ^= std::uint64_t{1} << (j % kWordBits);
  return PointVector::from_words(x.size(), std::move(w));
}

Trial make_trial(const VerifyArgs& a, std::uint64_t seed) {
  std::vector<PointVector> rows;
  for (std::size_t r = 0; r < a.background; ++r) {
    rows.push_back(sample_point(a.n, derive_key(seed, 1), r));
  }
  return {seed, random_sparse_spectrum(a.n, capped_k(a.n, a.k, a.dd), a.dd, seed),
          BackgroundDataset(std::move(rows)), sample_point(a.n, derive_key(seed, 2), 0)};
}

}  // namespace

int cmd_verify(const VerifyArgs& args, Context& ctx) {
  RunManifest m("verify");
  m.set_config(ctx.config);
  if (args.trials == 0) throw InvalidArgument("--trials must be positive");
  if (ctx.dry_run) {
    finish_manifest(m, {}, ctx);
    return kExitOk;
  }

  fshap::ExplainOptions opt;
  opt.threads = ctx.threads;
  if (args.corrupt_weights) {
    opt.weight_override = weight_table(args.n);
    opt.weight_override[0] = 0.75;
  }
  auto phi_of = [&](const SparseSpectrum& s, const BackgroundDataset& d, const PointVector& q,
                    Variant v = Variant::kPrecompute) {
    auto o = opt;
    o.variant = v;
    return Explainer(s, d, o).explain(q);
  };

  SuiteResult efficiency{"efficiency", 1e-9, 0, 0.0, false, {}, {}};
  SuiteResult dummy{"dummy", 0.0, 0, 0.0, false, {}, {}};
  SuiteResult match{"background-match", 0.0, 0, 0.0, false, {}, {}};
  SuiteResult linearity{"linearity", 1e-10, 0, 0.0, false, {}, {}};
  SuiteResult oracle{"oracle-equivalence", 1e-9, 0, 0.0, false, {}, {}};
  SuiteResult variants{"variants", 1e-10, 0, 0.0, false, {}, {}};
  SuiteResult identity{"identity", 0.0, 0, 0.0, false, {}, {}};
  constexpr std::size_t kOracleMaxN = 12;
  oracle.skipped = args.n > kOracleMaxN;
  if (oracle.skipped) oracle.note = "skipped: brute force needs n <= 12";

  m.timed("suites", [&] {
    for (std::size_t t = 0; t < args.trials; ++t) {
      const std::uint64_t seed = args.seed + t;
      const auto trial = make_trial(args, seed);
      CounterRng rng(seed, 3);
      const auto& q = trial.query;

      const auto r = phi_of(trial.spectrum, trial.background, q);
      efficiency.record(std::abs(r.efficiency_residual()), seed);

      const std::size_t j = rng.below(args.n);
      std::vector<SpectrumTerm> kept;
      for (auto& term : trial.spectrum.terms()) {
        if (!term.freq.test(j)) kept.push_back(std::move(term));
      }
      const auto dummy_spec = SparseSpectrum::from_terms(args.n, std::move(kept));
      dummy.record(std::abs(phi_of(dummy_spec, trial.background, q).attributions[j]), seed);

      std::vector<PointVector> rows = trial.background.points();
      for (auto& x : rows) {
        if (x.test(j) != q.test(j)) x = flip_bit(x, j);
      }
      const BackgroundDataset matched(std::move(rows));
      match.record(std::abs(phi_of(trial.spectrum, matched, q).attributions[j]), seed);

      const auto other = random_sparse_spectrum(args.n, capped_k(args.n, args.k, args.dd), args.dd,
                                                mix64(seed ^ 0x11eau));
      const double ca = rng.uniform(-2.0, 2.0);
      const double cb = rng.uniform(-2.0, 2.0);
      const auto combo = linear_combination(trial.spectrum, ca, other, cb);
      const auto pc = phi_of(combo, trial.background, q).attributions;
      const auto pg = r.attributions;
      const auto ph = phi_of(other, trial.background, q).attributions;
      std::vector<double> expect(args.n);
      for (std::size_t i = 0; i < args.n; ++i) expect[i] = ca * pg[i] + cb * ph[i];
      linearity.record(max_abs_diff(pc, expect), seed);

      if (!oracle.skipped) {
        const auto& spec = trial.spectrum;
        const auto exact = exact_shap_bruteforce(
            [&](const PointVector& x) { return evaluate(spec, x); }, q, trial.background);
        oracle.record(max_abs_diff(r.attributions, exact), seed);
      }

      std::vector<std::vector<double>> per_variant;
      for (Variant v : kAllVariants) {
        per_variant.push_back(phi_of(trial.spectrum, trial.background, q, v).attributions);
      }
      double vd = 0.0;
      for (std::size_t a = 0; a < per_variant.size(); ++a) {
        for (std::size_t b = a + 1; b < per_variant.size(); ++b) {
          vd = std::max(vd, max_abs_diff(per_variant[a], per_variant[b]));
        }
      }
      variants.record(vd, seed);
    }
    const auto id = check_weight_identity(kOracleMaxN);
    identity.cases = id.cases;
    identity.max_dev = static_cast<double>(id.failures);
    if (id.failures > 0) {
      identity.first_failure = args.seed;
      identity.note = "first failure at n=" + std::to_string(id.n) + ", |A|=" +
                      std::to_string(id.m) + ", a=" + std::to_string(id.a);
    }
  });

  const std::vector<const SuiteResult*> suites{&efficiency, &dummy, &match, &linearity,
                                               &oracle, &variants, &identity};
  std::filesystem::create_directories(args.out);
  const auto csv_path = args.out / "verify.csv";
  std::ofstream f(csv_path, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidArgument("cannot write '" + csv_path.string() + "'");
  f << "suite,cases,max_deviation,tolerance,status\n";
  const SuiteResult* first_fail = nullptr;
  for (const auto* s : suites) {
    const char* status = s->skipped ? "skipped" : (s->passed() ? "pass" : "fail");
    f << s->name << ',' << s->cases << ',' << csv::format_double(s->max_dev) << ','
      << csv::format_double(s->tolerance) << ',' << status << '\n';
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s cases %6zu  max dev %-12.3g tol %-8.0e %s",
                  s->name.c_str(), s->cases, s->max_dev, s->tolerance, status);
    ctx.out << line;
    if (!s->note.empty()) ctx.out << "  (" << s->note << ")";
    ctx.out << "\n";
    if (!s->passed() && !first_fail) first_fail = s;
  }
  m.add_output(csv_path);
  int code = kExitOk;
  if (first_fail) {
    ctx.err << "FAIL: " << first_fail->name << " violated; reproduce with: fshap verify --n "
            << args.n << " --k " << args.k << " --dd " << args.dd << " --background "
            << args.background << " --trials 1 --seed " << *first_fail->first_failure
            << (args.corrupt_weights ? " --corrupt-weights" : "") << "\n";
    m.set("first_failure", {{"suite", first_fail->name}, {"seed", *first_fail->first_failure}});
    code = kExitPropertyFailure;
  }
  finish_manifest(m, args.out / "manifest.json", ctx);
  return code;
}

}  // namespace fshap::cli
