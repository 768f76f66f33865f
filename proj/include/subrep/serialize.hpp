#pragma once

// JSON views of the library's reports. Non-finite numbers become the strings
// "inf", "-inf" and "nan" since JSON has no literal for them.

#include "subrep/cconvexity.hpp"
#include "subrep/criteria.hpp"
#include "subrep/decompose.hpp"
#include "subrep/theta.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace subrep::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json number(double v);
json to_json(const Vector& v);
json to_json(const std::vector<double>& v);

/// {"terms":[{"index":i,"component":[...]}],"residuals":[...]} plus the target.
json to_json(const Decomposition& d);
json to_json(const ReplicationResult& r);
json to_json(const RepresentationReport& r);
json to_json(const MarginReport& r);
json to_json(const NetCheck& r);
json to_json(const DeltaMembership& r);
json to_json(const ThetaSolve& r);
json to_json(const ThetaStar& r);
json to_json(const ThetaBar& r);
json to_json(const ThetaReport& r);
json to_json(const PsrEquivalence& r);
json to_json(const PsrStability& r);
json to_json(const ApssStability& r);
json to_json(const CConstantReport& r);
json to_json(const RemovalReport& r);

std::uint64_t fnv1a64(const std::string& bytes);
/// "fnv1a64:" followed by 16 hex digits.
std::string hash_tag(const std::string& bytes);

/// Fixed-format decimal used in CSV output (same bytes on every run).
std::string fmt(double v);

}  // namespace subrep::io
