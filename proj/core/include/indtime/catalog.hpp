#pragma once

#include <optional>
#include <string>
#include <vector>

#include "indtime/times.hpp"

namespace indtime {

struct CatalogEntry {
  std::string category;  ///< engine, law, past-event, path-event, statistic, functional, increasing, terminal, time, example, scenario
  std::string name;
  std::string summary;
};

/// Every named building block, sorted by (category, name).
std::vector<CatalogEntry> catalog_entries();

/// One line per entry whose name contains `filter` (all entries when empty).
std::string list_catalog(const std::string& filter = "");

/// Scenario files shipped in the scenarios directory.
const std::vector<std::string>& bundled_scenarios();

/// Ready-made random times, looked up by name.
std::optional<TimeSpec> example_time(const std::string& name);
std::vector<std::string> example_time_names();

}  // namespace indtime
