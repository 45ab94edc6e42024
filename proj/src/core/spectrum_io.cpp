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

#include "fshap/spectrum_io.hpp"

#include "fshap/json_util.hpp"

namespace fshap {

using nlohmann::json;
namespace ju = json_util;

json spectrum_to_json(const SparseSpectrum& spectrum) {
  json terms = json::array();
  for (std::size_t t = 0; t < spectrum.support_size(); ++t) {
    terms.push_back({{"freq", spectrum.frequency(t).indices()},
                     {"coef", spectrum.coefficients()[t]}});
  }
  return {{"n", spectrum.n()}, {"convention", kSpectrumConvention}, {"terms", std::move(terms)}};
}

SparseSpectrum spectrum_from_json(const json& doc) {
  const std::size_t n = ju::as_index(ju::field(doc, "", "n"), "/n");
  const auto convention = ju::as_string(ju::field(doc, "", "convention"), "/convention");
  if (convention != kSpectrumConvention) {
    throw SchemaError("/convention", "unsupported convention '" + convention + "'");
  }
  const json& terms = ju::array_at(ju::field(doc, "", "terms"), "/terms");
  std::vector<SpectrumTerm> out;
  out.reserve(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string ptr = ju::child("/terms", t);
    const json& freq = ju::array_at(ju::field(terms[t], ptr, "freq"), ptr + "/freq");
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < freq.size(); ++j) {
      const std::string fp = ju::child(ptr + "/freq", j);
      const auto i = ju::as_index(freq[j], fp);
      if (i >= n) throw SchemaError(fp, "index " + std::to_string(i) + " out of range for n");
      if (!idx.empty() && i <= idx.back()) {
        throw SchemaError(fp, "indices must be strictly ascending");
      }
      idx.push_back(i);
    }
    const double coef = ju::as_double(ju::field(terms[t], ptr, "coef"), ptr + "/coef");
    out.push_back({Frequency::from_indices(n, idx), coef});
  }
  try {
    return SparseSpectrum::from_terms(n, std::move(out));
  } catch (const InvalidArgument& e) {
    throw SchemaError("/terms", e.what());
  }
}

void write_spectrum(const std::filesystem::path& path, const SparseSpectrum& spectrum) {
  ju::write_file(path, spectrum_to_json(spectrum));
}

SparseSpectrum read_spectrum(const std::filesystem::path& path) {
  return spectrum_from_json(ju::read_file(path));
}

json energy_report_to_json(const EnergyReport& report) {
  return {{"total_energy", report.total_energy},
          {"kept_energy", report.kept_energy},
          {"kept_fraction",
           report.total_energy > 0.0 ? report.kept_energy / report.total_energy : 1.0},
          {"dropped_count", report.dropped_count}};
}

}  // namespace fshap
