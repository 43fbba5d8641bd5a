#pragma once

#include <string>

#include <json.hpp>

#include "curvforge/prescribe.hpp"

namespace curvforge {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

[[nodiscard]] Json to_json(const VerificationReport& report);
[[nodiscard]] Json to_json(const MaximumPrincipleReport& report);
[[nodiscard]] Json to_json(const IterationTrace& trace); // summary, not the full history
[[nodiscard]] Json to_json(const ModelForm& model);
[[nodiscard]] Json to_json(const PrescriptionResult& result);
[[nodiscard]] Json to_json(const FeasibilityReport& report);
[[nodiscard]] Json to_json(const Eigen::VectorXd& values);

/// Serializes with floating-point numbers printed as %.17g and non-finite
/// numbers as null, so equal inputs give byte-identical text.
[[nodiscard]] std::string dump_json(const Json& value, int indent = 2);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
[[nodiscard]] std::string utc_timestamp();

} // namespace curvforge
