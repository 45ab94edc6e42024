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

#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fshap/commands.hpp"
#include "fshap/csv.hpp"
#include "fshap/error.hpp"
#include "fshap/instance.hpp"
#include "fshap/oracles.hpp"
#include "fshap/shap.hpp"

namespace fshap::cli {
namespace {

constexpr std::size_t kBaselineMaxN = 12;

struct Timing {
  double mean = 0.0;
  double stddev = 0.0;
};

template <class F>
Timing time_repeated(std::size_t repeat, F&& fn) {
  std::vector<double> t;
  for (std::size_t r = 0; r < repeat; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn(r);
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  Timing out;
  for (double v : t) out.mean += v;
  out.mean /= static_cast<double>(t.size());
  if (t.size() > 1) {
    double ss = 0.0;
    for (double v : t) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(t.size() - 1));
  }
  return out;
}

std::vector<Variant> parse_variants(const std::string& list) {
  if (list == "all") return {kAllVariants.begin(), kAllVariants.end()};
  std::vector<Variant> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_variant(item));
  if (out.empty()) throw InvalidArgument("--variants is empty");
  return out;
}

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string r2_cell(const std::optional<double>& r2) {
  return r2 ? csv::format_double(*r2) : "";
}

}  // namespace

int cmd_bench(const BenchArgs& args, Context& ctx) {
  RunManifest m("bench");
  m.set_config(ctx.config);
  const auto variants = parse_variants(args.variants);
  for (double f : args.factors) {
    if (!(f > 0.0)) throw InvalidArgument("sample factors must be positive");
  }
  const auto inst = load_instance(args.instance, m, ctx);
  const std::size_t n = inst.spectrum.n();
  if (ctx.dry_run) {
    finish_manifest(m, {}, ctx);
    return kExitOk;
  }
  std::filesystem::create_directories(args.out);
  const auto bench_path = args.out / "bench.csv";
  const auto conv_path = args.out / "convergence.csv";
  std::ofstream bench(bench_path, std::ios::binary | std::ios::trunc);
  std::ofstream conv(conv_path, std::ios::binary | std::ios::trunc);
  if (!bench || !conv) throw InvalidArgument("cannot write to '" + args.out.string() + "'");
  bench << "method,parameter,queries,repeats,mean_time_s,std_time_s,r2_vs_exact\n";
  conv << "sample_factor,wall_time_s,r2_vs_exact\n";
  m.add_output(bench_path);
  m.add_output(conv_path);
  if (inst.queries.empty()) {
    ctx.out << "no queries: wrote header-only CSVs\n";
    finish_manifest(m, args.out / "manifest.json", ctx);
    return kExitOk;
  }

  const BackgroundDataset background(inst.background);
  const bool baselines = n <= kBaselineMaxN;
  std::vector<double> exact;
  if (baselines) {
    m.timed("exact", [&] {
      for (const auto& q : inst.queries) {
        const auto phi = exact_shap_bruteforce(
            [&](const PointVector& x) { return (*inst.handle)(x); }, q, background);
        exact.insert(exact.end(), phi.begin(), phi.end());
      }
    });
  } else {
    ctx.err << "notice: n=" << n << " > " << kBaselineMaxN
            << ", skipping KernelSHAP baselines and exact R^2\n";
  }

  m.timed("engine", [&] {
    for (Variant v : variants) {
      fshap::ExplainOptions opt;
      opt.variant = v;
      opt.threads = ctx.threads;
      std::vector<ShapResult> results;
      const auto t = time_repeated(args.repeat, [&](std::size_t) {
        const Explainer ex(inst.spectrum, background, opt);
        results = ex.explain_batch(inst.queries);
      });
      std::optional<double> r2;
      if (baselines) {
        std::vector<double> flat;
        for (const auto& r : results) flat.insert(flat.end(), r.attributions.begin(), r.attributions.end());
        r2 = r2_vector(flat, exact);
      }
      bench << "fourier_shap," << variant_name(v) << ',' << inst.queries.size() << ','
            << args.repeat << ',' << csv::format_double(t.mean) << ','
            << csv::format_double(t.stddev) << ',' << r2_cell(r2) << '\n';
      ctx.out << "fourier_shap " << variant_name(v) << ": " << t.mean << " s\n";
    }
  });

  if (baselines) {
    m.timed("kernel_shap", [&] {
      for (double factor : args.factors) {
        std::vector<double> flat;
        const auto t = time_repeated(args.repeat, [&](std::size_t rep) {
          flat.clear();
          KernelShapConfig cfg;
          cfg.sample_factor = factor;
          for (std::size_t q = 0; q < inst.queries.size(); ++q) {
            cfg.rng_seed = args.instance.seed * 1000003u + rep * 7919u + q;
            const auto res = kernel_shap([&](const PointVector& x) { return (*inst.handle)(x); },
                                         inst.queries[q], background, cfg);
            flat.insert(flat.end(), res.phi.begin(), res.phi.end());
          }
        });
        const double r2 = r2_vector(flat, exact);
        bench << "kernel_shap," << short_double(factor) << ',' << inst.queries.size() << ','
              << args.repeat << ',' << csv::format_double(t.mean) << ','
              << csv::format_double(t.stddev) << ',' << csv::format_double(r2) << '\n';
        conv << short_double(factor) << ',' << csv::format_double(t.mean) << ','
             << csv::format_double(r2) << '\n';
        ctx.out << "kernel_shap factor " << factor << ": " << t.mean << " s, R^2 " << r2 << "\n";
      }
    });
  }
  finish_manifest(m, args.out / "manifest.json", ctx);
  return kExitOk;
}

}  // namespace fshap::cli
