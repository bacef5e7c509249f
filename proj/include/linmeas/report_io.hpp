#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "linmeas/analytics.hpp"
#include "linmeas/grid.hpp"
#include "linmeas/model.hpp"
#include "linmeas/povm.hpp"
#include "linmeas/verifier.hpp"

namespace linmeas {

using Json = nlohmann::json;

// JSON encodings. Doubles are written in shortest round-trip form, so
// from_json(to_json(x)) == x bit for bit. Infinite interval ends are
// written as null.
Json to_json(const MomentSummary& m);
MomentSummary moments_from_json(const Json& j);

Json to_json(const MeasurementReport& r);
MeasurementReport report_from_json(const Json& j);

Json to_json(const LinearModel& m);
LinearModel model_from_json(const Json& j);

Json model_info_json(const LinearModel& m);

Json to_json(const OracleValues& o);
OracleValues oracle_values_from_json(const Json& j);
Json to_json(const OracleComparison& c);
OracleComparison comparison_from_json(const Json& j);

Json to_json(const PovmCheck& c);
PovmCheck povm_check_from_json(const Json& j);

Json to_json(const VerifierReport& r);
VerifierReport verifier_report_from_json(const Json& j);

Json to_json(const OzawaDemo& d);

/// Fixed sweep CSV header (plus oracle_* columns when with_oracle).
std::string sweep_csv_header(bool with_oracle);
void write_sweep_csv(std::ostream& out, const VerifierReport& r, bool with_oracle);

/// Three-column series "parameter,product,bound" for one relation ("64",
/// "65", "69"); the parameter is g0 when present, otherwise config_id.
void write_series_csv(std::ostream& out, const VerifierReport& r, const std::string& relation);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace linmeas
