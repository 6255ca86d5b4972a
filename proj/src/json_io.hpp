#pragma once

#include <json.hpp>

#include "lk/chart.hpp"

namespace lk::detail {

Chart chart_from_json(const nlohmann::json& j);
nlohmann::json chart_to_json(const Chart& c);
Box box_from_json(const nlohmann::json& j, int dim);
nlohmann::json parse_json_text(std::string_view text);

}  // namespace lk::detail
