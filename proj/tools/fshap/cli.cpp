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

#include "fshap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "fshap/commands.hpp"
#include "fshap/error.hpp"
#include "fshap/manifest.hpp"
#include "fshap/parallel.hpp"
#include "fshap/simd/kernels.hpp"

namespace fshap::cli {
namespace {

using nlohmann::json;

/// --config reader and manifest writer. Top-level keys are global flags; an
/// object value is the section of the subcommand with that name. A run
/// manifest is accepted too: its "config" member is used.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return section(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      doc = json::parse(input);
    } catch (const json::parse_error& e) {
      throw SchemaError("config", e.what());
    }
    if (doc.is_object() && doc.contains("tool") && doc.contains("config")) doc = doc["config"];
    if (!doc.is_object()) throw SchemaError("config", "expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(doc, {}, "", items);
    return items;
  }

 private:
  static json section(const CLI::App* app, bool default_also) {
    json out = json::object();
    add_options(app, default_also, out);
    // Option groups are nameless subcommands; their flags live at this level.
    for (const CLI::App* group : app->get_subcommands([](const CLI::App* s) {
           return s->get_name().empty();
         })) {
      add_options(group, default_also, out);
    }
    for (const CLI::App* sub : app->get_subcommands()) {
      if (!sub->get_name().empty()) out[sub->get_name()] = section(sub, default_also);
    }
    return out;
  }

  static void add_options(const CLI::App* app, bool default_also, json& out) {
    for (const CLI::Option* opt : app->get_options()) {
      const std::string name = opt->get_single_name();
      if (!opt->get_configurable() || name == "help" || name == "config" || name.empty()) continue;
      if (opt->get_expected_min() == 0) {
        if (opt->count() > 0 || default_also) out[name] = opt->count() > 0 && opt->as<bool>();
        continue;
      }
      std::vector<std::string> values = opt->results();
      if (values.empty()) {
        if (!default_also || opt->get_default_str().empty()) continue;
        values = {opt->get_default_str()};
      }
      if (opt->get_items_expected_max() > 1) {
        json arr = json::array();
        for (const auto& v : values) {
          // Defaults of vector options are rendered as "[a,b]".
          if (values.size() == 1 && v.size() >= 2 && v.front() == '[' && v.back() == ']') {
            std::stringstream ss(v.substr(1, v.size() - 2));
            std::string part;
            while (std::getline(ss, part, ',')) arr.push_back(part);
          } else {
            arr.push_back(v);
          }
        }
        out[name] = std::move(arr);
      } else {
        out[name] = values.back();
      }
    }
  }

  static void flatten(const json& obj, const std::vector<std::string>& parents,
                      const std::string& where, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      const std::string loc = where + "/" + key;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, loc, items);
        continue;
      }
      // A false flag is the same as leaving it out, and must not trip the
      // exclusion checks between flags.
      if (value.is_boolean() && !value.get<bool>()) continue;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v, loc));
      } else if (!value.is_null()) {
        item.inputs.push_back(scalar(value, loc));
      } else {
        continue;
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& v, const std::string& loc) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw SchemaError("config:" + loc, "expected a string, number or boolean");
  }
};

void add_instance_options(CLI::App* sub, InstanceArgs& a) {
  auto* src = sub->add_option_group("source", "spectrum source (exactly one)");
  src->add_option("--spectrum", a.spectrum, "spectrum JSON");
  src->add_option("--model", a.model, "tree ensemble JSON, transformed exactly");
  src->add_option("--synthetic", a.synthetic,
                  "generator: parity[:i,j,..], majority, random-sparse:k=K,d=D,seed=S");
  src->require_option(1);
  sub->add_option("--n", a.n, "feature count for --synthetic");
  sub->add_option("--data", a.data, "CSV of background rows");
  sub->add_option("--schema", a.schema, "column schema JSON (default: all columns binary)");
  sub->add_option("--queries", a.queries, "CSV of rows to explain");
  sub->add_option("--background-size", a.background_size, "background rows (0 = all)");
  sub->add_option("--background-seed", a.background_seed, "seed for random background");
  sub->add_option("--background-strategy", a.background_strategy, "auto, first or random")
      ->check(CLI::IsMember({"auto", "first", "random"}));
  sub->add_option("--num-queries", a.num_queries, "random queries when --queries is absent");
  sub->add_option("--seed", a.seed, "seed for random background and queries");
}

int exit_for(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const DimensionError*>(&e)) return kExitDimension;
  if (dynamic_cast<const ResourceError*>(&e)) return kExitResource;
  if (dynamic_cast<const NumericError*>(&e)) return kExitPropertyFailure;
  return kExitSchema;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact SHAP values from sparse Walsh-Hadamard spectra", "fshap"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the flags; flags take precedence");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  unsigned threads = 0;
  std::string simd_level = "auto";
  bool dry_run = false;
  std::optional<std::filesystem::path> manifest;
  app.add_option("--threads", threads, "worker cap (0 = available parallelism)")
      ->envname("FSHAP_THREADS");
  app.add_option("--simd", simd_level, "kernel level: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_flag("--dry-run", dry_run, "validate inputs without writing outputs");
  app.add_option("--manifest", manifest, "where to write the run manifest");
  app.fallthrough();

  TransformArgs transform;
  auto* t = app.add_subcommand("transform", "exact spectrum of a tree ensemble");
  t->add_option("--model", transform.model, "tree ensemble JSON")->required();
  t->add_option("--format", transform.format, "model format");
  t->add_option("--out", transform.out, "spectrum JSON to write")->required();
  t->add_option("--report", transform.report, "energy report (default: <out>.energy.json)");
  auto* pe = t->add_option("--prune-energy", transform.prune_energy, "energy fraction to keep")
                 ->check(CLI::Range(0.0, 1.0));
  auto* ma = t->add_option("--min-amp", transform.min_amp, "always keep |c| >= this")
                 ->check(CLI::NonNegativeNumber);
  t->add_flag("--paper-prune", transform.paper_prune, "shorthand for 0.9995 energy, 0.005 amplitude")
      ->excludes(pe)
      ->excludes(ma);

  ApproximateArgs approx;
  auto* a = app.add_subcommand("approximate", "spectrum of a query-access black box");
  auto* asrc = a->add_option_group("source", "black box (exactly one)");
  asrc->add_option("--model", approx.model, "tree ensemble JSON");
  asrc->add_option("--truth-table", approx.truth_table, "CSV truth table");
  asrc->add_option("--synthetic", approx.synthetic, "named generator");
  asrc->require_option(1);
  a->add_option("--n", approx.n, "feature count for --synthetic");
  a->add_option("--mode", approx.mode, "exhaustive or low-degree")
      ->check(CLI::IsMember({"exhaustive", "low-degree"}));
  a->add_option("--max-degree", approx.max_degree, "degree cap of the regression basis");
  a->add_option("--samples", approx.samples, "query budget (0 = 4 x basis size)");
  a->add_option("--ridge", approx.ridge, "ridge penalty")->check(CLI::NonNegativeNumber);
  a->add_option("--top-k", approx.top_k, "keep this many terms (0 = all)");
  a->add_option("--seed", approx.seed, "sampling seed");
  a->add_option("--eval-samples", approx.eval_samples, "fresh points for the fidelity R^2");
  a->add_option("--out", approx.out, "spectrum JSON to write")->required();
  a->add_option("--report", approx.report, "recovery report (default: <out>.report.json)");

  ExplainArgs explain;
  auto* e = app.add_subcommand("explain", "SHAP values for a batch of queries");
  add_instance_options(e, explain.instance);
  e->add_option("--variant", explain.variant, "base, precompute, sparse or positional")
      ->check(CLI::IsMember({"base", "precompute", "sparse", "positional"}));
  e->add_flag("--diff", explain.diff, "run every variant and report pairwise max |dphi|");
  e->add_flag("--group", explain.group, "also write per-column sums of attributions");
  e->add_option("--out", explain.out, "output directory")->required();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "randomized property suites");
  v->add_option("--n", verify.n, "features")->check(CLI::Range(1, 64));
  v->add_option("--k", verify.k, "spectrum support size");
  v->add_option("--dd", verify.dd, "maximum frequency degree");
  v->add_option("--trials", verify.trials, "instances per suite");
  v->add_option("--background", verify.background, "background rows")->check(CLI::PositiveNumber);
  v->add_option("--seed", verify.seed, "first instance seed");
  v->add_option("--out", verify.out, "output directory");
  v->add_flag("--corrupt-weights", verify.corrupt_weights)->group("");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "wall time and accuracy of engine variants and baselines");
  add_instance_options(b, bench.instance);
  b->add_option("--variants", bench.variants, "comma list or 'all'");
  b->add_option("--repeat", bench.repeat, "timed repetitions")->check(CLI::PositiveNumber);
  b->add_option("--factors", bench.factors, "KernelSHAP sample factors")->delimiter(',');
  b->add_option("--out", bench.out, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe_error) {
    const int code = app.exit(pe_error, out, err);
    return code == 0 ? kExitOk : kExitSchema;
  } catch (const std::exception& ex) {
    return exit_for(ex, err);
  }

  try {
    if (simd_level != "auto") simd::set_active_level(simd::parse_level(simd_level));
    Context ctx{out, err, 1, false, {}, {}};
    ctx.threads = resolve_threads(threads);
    ctx.dry_run = dry_run;
    ctx.manifest_path = manifest;
    ctx.config = json::parse(app.config_to_str(true, false));
    ctx.config.erase("manifest");
    ctx.config.erase("dry-run");

    if (t->parsed()) return cmd_transform(transform, ctx);
    if (a->parsed()) return cmd_approximate(approx, ctx);
    if (e->parsed()) return cmd_explain(explain, ctx);
    if (v->parsed()) return cmd_verify(verify, ctx);
    return cmd_bench(bench, ctx);
  } catch (const std::exception& ex) {
    return exit_for(ex, err);
  }
}

}  // namespace fshap::cli
