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
#include <fstream>

#include "fshap/csv.hpp"
#include "fshap/error.hpp"
#include "fshap/instance.hpp"
#include "fshap/json_util.hpp"
#include "fshap/rng.hpp"
#include "fshap/shap.hpp"
#include "fshap/spectrum_io.hpp"
#include "fshap/tree.hpp"
#include "fshap/tree_io.hpp"

namespace fshap::cli {

using nlohmann::json;

namespace {

std::filesystem::path with_suffix(std::filesystem::path p, const std::string& suffix) {
  return p.replace_extension(suffix);
}

Schema binary_schema(const std::filesystem::path& csv_path) {
  const auto table = csv::read(csv_path);
  Schema s;
  for (const auto& name : table.header) s.push_back({name, ColumnKind::kBinary, 0, {}});
  if (s.empty()) throw SchemaError(csv_path.string() + ":line 1", "empty header");
  return s;
}

std::string source_name(const InstanceArgs& a) {
  if (a.spectrum) return "spectrum '" + a.spectrum->string() + "'";
  if (a.model) return "model '" + a.model->string() + "'";
  return "synthetic '" + a.synthetic.value_or("") + "'";
}

void open_for_write(std::ofstream& f, const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  f.open(p, std::ios::binary | std::ios::trunc);
  if (!f) throw InvalidArgument("cannot write '" + p.string() + "'");
}

}  // namespace

Instance load_instance(const InstanceArgs& args, RunManifest& manifest, const Context& ctx) {
  Instance inst;
  if (args.spectrum) {
    manifest.add_input(*args.spectrum);
    inst.spectrum = manifest.timed("load", [&] { return read_spectrum(*args.spectrum); });
    inst.handle = handle_from_spectrum(inst.spectrum);
  } else if (args.model) {
    manifest.add_input(*args.model);
    auto ens = manifest.timed("load", [&] { return load_model(*args.model); });
    inst.spectrum =
        manifest.timed("transform", [&] { return ensemble_to_spectrum(ens, ctx.threads); });
    inst.handle = handle_from_ensemble(std::move(ens));
  } else {
    if (args.n == 0) throw InvalidArgument("--synthetic needs --n");
    inst.handle = handle_from_synthetic(*args.synthetic, args.n);
    inst.spectrum = manifest.timed(
        "transform", [&] { return exhaustive_transform(*inst.handle, kDefaultDenseCap, ctx.threads); });
  }
  const std::size_t n = inst.spectrum.n();

  if (args.data) {
    manifest.add_input(*args.data);
    Schema schema;
    if (args.schema) {
      manifest.add_input(*args.schema);
      schema = read_schema(*args.schema);
    } else {
      schema = binary_schema(*args.data);
    }
    const auto ds = manifest.timed("ingest", [&] { return load_csv(*args.data, schema); });
    inst.warnings = ds.warnings();
    for (const auto& w : inst.warnings) ctx.err << "warning: " << w << "\n";
    if (ds.n() != n) {
      throw DimensionError(source_name(args) + " has n=" + std::to_string(n) + " but data '" +
                           args.data->string() + "' encodes to " + std::to_string(ds.n()) +
                           " columns");
    }
    BackgroundSpec spec;
    spec.size = args.background_size ? args.background_size : ds.size();
    const bool random = args.background_strategy == "random" ||
                        (args.background_strategy == "auto" && args.background_seed.has_value());
    spec.strategy = random ? BackgroundStrategy::kRandom : BackgroundStrategy::kFirstRows;
    spec.seed = args.background_seed.value_or(args.seed);
    for (std::size_t r : background_indices(ds.size(), spec)) {
      inst.background.push_back(ds.points()[r]);
    }
    inst.encoding = ds.encoding();
  } else {
    if (args.background_size == 0) {
      throw InvalidArgument("without --data, --background-size must be positive");
    }
    const std::uint64_t seed = args.background_seed.value_or(args.seed);
    for (std::size_t r = 0; r < args.background_size; ++r) {
      inst.background.push_back(sample_point(n, derive_key(seed, 1), r));
    }
  }

  if (args.queries) {
    manifest.add_input(*args.queries);
    Encoding enc;
    if (inst.encoding) {
      enc = *inst.encoding;
    } else {
      enc = load_csv(*args.queries, binary_schema(*args.queries)).encoding();
    }
    auto q = encode_csv(*args.queries, enc);
    for (const auto& w : q.warnings) ctx.err << "warning: " << w << "\n";
    inst.warnings.insert(inst.warnings.end(), q.warnings.begin(), q.warnings.end());
    if (enc.width() != n) {
      throw DimensionError("queries '" + args.queries->string() + "' encode to " +
                           std::to_string(enc.width()) + " columns but " + source_name(args) +
                           " has n=" + std::to_string(n));
    }
    inst.queries = std::move(q.points);
    if (!inst.encoding) inst.encoding = enc;
  } else {
    for (std::size_t j = 0; j < args.num_queries; ++j) {
      inst.queries.push_back(sample_point(n, derive_key(args.seed, 2), j));
    }
  }
  return inst;
}

void finish_manifest(const RunManifest& manifest, const std::filesystem::path& fallback,
                     const Context& ctx) {
  if (ctx.dry_run) {
    ctx.out << "dry run: inputs valid, nothing written\n";
    return;
  }
  manifest.write(ctx.manifest_path.value_or(fallback));
}

// ---------------------------------------------------------------------------

int cmd_transform(const TransformArgs& args, Context& ctx) {
  RunManifest m("transform");
  m.set_config(ctx.config);
  m.add_input(args.model);
  auto ens = m.timed("load", [&] { return load_model(args.model, args.format); });
  TreeTransformStats stats;
  const auto full =
      m.timed("transform", [&] { return ensemble_to_spectrum(ens, ctx.threads, &stats); });
  const double fraction = args.paper_prune ? 0.9995 : args.prune_energy;
  const double min_amp = args.paper_prune ? 0.005 : args.min_amp;
  const auto pruned = m.timed("prune", [&] { return prune(full, fraction, min_amp); });

  json report = energy_report_to_json(pruned.report);
  report["energy_fraction"] = fraction;
  report["min_amplitude"] = min_amp;
  report["support_before"] = full.support_size();
  report["support_after"] = pruned.spectrum.support_size();
  report["degree"] = pruned.spectrum.degree();
  report["trees"] = ens.trees().size();
  report["max_tree_depth"] = ens.max_depth();
  report["tree_stats"] = {{"internal_nodes", stats.internal_nodes},
                          {"bound_violations", stats.bound_violations},
                          {"max_node_support", stats.max_node_support}};

  ctx.out << "spectrum: " << pruned.spectrum.support_size() << " of " << full.support_size()
          << " terms kept, degree " << pruned.spectrum.degree() << ", kept energy "
          << pruned.report.kept_energy << " of " << pruned.report.total_energy << "\n";
  const auto report_path = args.report.value_or(with_suffix(args.out, ".energy.json"));
  if (!ctx.dry_run) {
    m.timed("write", [&] {
      write_spectrum(args.out, pruned.spectrum);
      json_util::write_file(report_path, report);
    });
    m.add_output(args.out);
    m.add_output(report_path);
  }
  finish_manifest(m, with_suffix(args.out, ".manifest.json"), ctx);
  return kExitOk;
}

int cmd_approximate(const ApproximateArgs& args, Context& ctx) {
  RunManifest m("approximate");
  m.set_config(ctx.config);
  std::optional<QueryHandle> handle;
  if (args.model) {
    m.add_input(*args.model);
    handle = handle_from_ensemble(load_model(*args.model));
  } else if (args.truth_table) {
    m.add_input(*args.truth_table);
    handle = handle_from_truth_table(*args.truth_table);
  } else {
    if (args.n == 0) throw InvalidArgument("--synthetic needs --n");
    handle = handle_from_synthetic(*args.synthetic, args.n);
  }

  RecoveryConfig cfg;
  cfg.mode = args.mode == "exhaustive" ? RecoveryMode::kExhaustive : RecoveryMode::kLowDegree;
  cfg.max_degree = args.max_degree;
  cfg.num_samples = args.samples;
  cfg.ridge = args.ridge;
  cfg.rng_seed = args.seed;
  cfg.top_k = args.top_k;
  cfg.threads = ctx.threads;
  if (ctx.dry_run) {
    // Validate the budget without querying the black box.
    if (cfg.mode == RecoveryMode::kExhaustive && handle->n() > kDefaultDenseCap) {
      throw ResourceError("exhaustive transform over n=" + std::to_string(handle->n()) +
                          " exceeds the cap of " + std::to_string(kDefaultDenseCap));
    }
    if (cfg.mode == RecoveryMode::kLowDegree) {
      const auto p = low_degree_basis(handle->n(), std::min(cfg.max_degree, handle->n())).size();
      if ((cfg.num_samples ? cfg.num_samples : 4 * p) > kMaxRecoverySamples) {
        throw ResourceError("sample budget exceeds " + std::to_string(kMaxRecoverySamples));
      }
    }
    finish_manifest(m, {}, ctx);
    return kExitOk;
  }
  const auto result = m.timed("recover", [&] { return recover_spectrum(*handle, cfg); });
  const double fidelity = m.timed("fidelity", [&] {
    return args.eval_samples >= 2 ? fidelity_r2(*handle, result.spectrum, args.eval_samples, args.seed)
                                  : std::nan("");
  });
  for (const auto& w : result.warnings) ctx.err << "warning: " << w << "\n";

  json report = {{"mode", args.mode},
                 {"n", handle->n()},
                 {"queries", result.queries},
                 {"basis_size", result.basis_size},
                 {"support_size", result.spectrum.support_size()},
                 {"condition_estimate", result.condition_estimate},
                 {"in_sample_r2", result.in_sample_r2},
                 {"fidelity_r2", std::isnan(fidelity) ? json(nullptr) : json(fidelity)},
                 {"eval_samples", args.eval_samples},
                 {"warnings", result.warnings}};
  if (!std::isfinite(result.condition_estimate)) report["condition_estimate"] = nullptr;
  const auto report_path = args.report.value_or(with_suffix(args.out, ".report.json"));
  write_spectrum(args.out, result.spectrum);
  json_util::write_file(report_path, report);
  m.add_output(args.out);
  m.add_output(report_path);
  ctx.out << "recovered " << result.spectrum.support_size() << " terms from " << result.queries
          << " queries; fidelity R^2 " << fidelity << "\n";
  finish_manifest(m, with_suffix(args.out, ".manifest.json"), ctx);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_explain(const ExplainArgs& args, Context& ctx) {
  RunManifest m("explain");
  m.set_config(ctx.config);
  const auto inst = load_instance(args.instance, m, ctx);
  const std::size_t n = inst.spectrum.n();
  ctx.out << "explaining " << inst.queries.size() << " queries, n=" << n << ", k="
          << inst.spectrum.support_size() << ", |D|=" << inst.background.size() << "\n";
  if (ctx.dry_run) {
    finish_manifest(m, {}, ctx);
    return kExitOk;
  }

  const BackgroundDataset background(inst.background);
  auto run_variant = [&](Variant v) {
    fshap::ExplainOptions opt;
    opt.variant = v;
    opt.threads = ctx.threads;
    const Explainer ex(inst.spectrum, background, opt);
    return ex.explain_batch(inst.queries);
  };
  const Variant main_variant = parse_variant(args.variant);
  const auto results =
      m.timed("explain", [&] { return run_variant(main_variant); });

  std::filesystem::create_directories(args.out);
  const auto shap_path = args.out / "shap.csv";
  const auto summary_path = args.out / "summary.json";
  m.timed("write", [&] {
    std::ofstream f;
    open_for_write(f, shap_path);
    f << "query_id,feature_index,phi\n";
    for (std::size_t q = 0; q < results.size(); ++q) {
      for (std::size_t i = 0; i < n; ++i) {
        f << q << ',' << i << ',' << csv::format_double(results[q].attributions[i]) << '\n';
      }
    }
    json per_query = json::array();
    double worst = 0.0;
    for (std::size_t q = 0; q < results.size(); ++q) {
      const auto& r = results[q];
      worst = std::max(worst, std::abs(r.efficiency_residual()));
      per_query.push_back({{"query_id", q},
                           {"base_value", r.base_value},
                           {"prediction", r.prediction},
                           {"sum_phi", r.sum_phi()},
                           {"efficiency_residual", r.efficiency_residual()}});
    }
    json summary = {{"variant", variant_name(main_variant)},
                    {"n", n},
                    {"support_size", inst.spectrum.support_size()},
                    {"background_size", inst.background.size()},
                    {"num_queries", results.size()},
                    {"max_abs_efficiency_residual", worst},
                    {"queries", per_query},
                    {"warnings", inst.warnings}};
    json_util::write_file(summary_path, summary);
  });
  m.add_output(shap_path);
  m.add_output(summary_path);
  if (inst.encoding) {
    json_util::write_file(args.out / "encoding.json", inst.encoding->to_json());
    m.add_output(args.out / "encoding.json");
  }
  if (args.group && inst.encoding) {
    const auto path = args.out / "groups.csv";
    std::ofstream f;
    open_for_write(f, path);
    f << "query_id,column,phi\n";
    for (std::size_t q = 0; q < results.size(); ++q) {
      for (const auto& g : aggregate_groups(*inst.encoding, results[q].attributions)) {
        f << q << ',' << csv::escape(g.name) << ',' << csv::format_double(g.phi) << '\n';
      }
    }
    m.add_output(path);
  }

  int code = kExitOk;
  if (args.diff) {
    constexpr double kTol = 1e-10;
    std::vector<std::vector<ShapResult>> all;
    for (Variant v : kAllVariants) {
      all.push_back(v == main_variant ? results
                                      : m.timed(std::string("explain-") + std::string(variant_name(v)),
                                                [&] { return run_variant(v); }));
    }
    const auto path = args.out / "diff.csv";
    std::ofstream f;
    open_for_write(f, path);
    f << "variant_a,variant_b,max_abs_diff\n";
    double worst = 0.0;
    for (std::size_t a = 0; a < all.size(); ++a) {
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        double d = 0.0;
        for (std::size_t q = 0; q < results.size(); ++q) {
          for (std::size_t i = 0; i < n; ++i) {
            d = std::max(d, std::abs(all[a][q].attributions[i] - all[b][q].attributions[i]));
          }
        }
        worst = std::max(worst, d);
        f << variant_name(kAllVariants[a]) << ',' << variant_name(kAllVariants[b]) << ','
          << csv::format_double(d) << '\n';
        ctx.out << "diff " << variant_name(kAllVariants[a]) << " vs "
                << variant_name(kAllVariants[b]) << ": " << d << "\n";
      }
    }
    m.add_output(path);
    m.set("max_variant_diff", worst);
    if (!(worst <= kTol)) {
      ctx.err << "variant agreement violated: max |dphi| = " << worst << " > " << kTol << "\n";
      code = kExitPropertyFailure;
    }
  }
  finish_manifest(m, args.out / "manifest.json", ctx);
  return code;
}

}  // namespace fshap::cli
