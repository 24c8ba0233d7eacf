#pragma once

#include <string>
#include <vector>

#include "gyrstab/gyration.hpp"
#include "gyrstab/reldb.hpp"

namespace gyrstab {

std::string report_text(const StabilityReport& r, const Database& db);
// One JSON record per parameter assignment, as a JSON array.
std::string report_json(const StabilityReport& r, const Database& db);

std::string table_text(const std::vector<TableRow>& rows);
std::string table_json(const std::vector<TableRow>& rows, const Database& db);

std::string validation_text(const std::vector<ValidationFailure>& failures);
std::string validation_json(const std::vector<ValidationFailure>& failures);

// "GSII = 1 (all assignments)" or "GSII = 2 for ...; 5 for ..."
std::string gsii_summary(const StabilityReport& r, const Database& db);

}  // namespace gyrstab
