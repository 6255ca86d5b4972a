#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lk/chart.hpp"
#include "lk/submersion.hpp"
#include "lk/tube.hpp"

namespace lk::zoo {

/// A reference value and where it comes from.
struct Reference {
  std::string key;         // e.g. "V0", "volume", "chi_fiber", "min_fiber_K"
  double value = 0.0;
  std::string provenance;  // "closed form: ..." or "reduced quadrature: ..."
};

using Params = std::map<std::string, double>;

struct Entry {
  std::string name;
  Params params;
  Atlas atlas;                                        // empty only for chartless embeddings
  std::shared_ptr<const SubmersionChart> submersion;  // submersion entries
  std::shared_ptr<const Embedding> embedding;         // embedded entries
  std::vector<Reference> references;

  int dim() const { return atlas.empty() ? embedding->dim() : atlas.front()->dim(); }
  std::optional<double> reference(const std::string& key) const;
};

/// Catalogue names in a fixed order.
const std::vector<std::string>& names();

/// Builds a catalogue entry. Unknown parameters and out-of-range values throw
/// InputError; submersion entries are validated.
Entry make(const std::string& name, const Params& params = {});

/// Parses `k=v&k=v` into parameters.
Params parse_params(std::string_view query);

/// `zoo:name?k=v&...` or a JSON file path. JSON files are recognized by their
/// top-level keys: `total_chart` (submersion), `coords` (embedding, with an
/// optional intrinsic `chart`), otherwise a chart.
Entry load(const std::string& uri);

}  // namespace lk::zoo
