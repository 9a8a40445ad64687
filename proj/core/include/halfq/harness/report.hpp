#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "halfq/harness/verification.hpp"

namespace halfq::harness {

using nlohmann::ordered_json;

ordered_json to_json(const errorket::ClassicalityCertificate& c);
ordered_json to_json(const halfdyn::ErrorConstants& c);
ordered_json to_json(const ClosedFormCheck& c);
ordered_json to_json(const MarginRow& m);
/// {observable, t, a0, D, L, p, I_B, delta_L, Delta_L, Pmin, Pmax, Emin, Emax,
///  lower, upper, oracle_P, verdict, ...}; oracle fields only when `with_oracle`.
ordered_json to_json(const BoundRow& r, bool with_oracle = true);
ordered_json to_json(const DiscrepancyRow& r);
ordered_json to_json(const VerificationReport& r);
ordered_json to_json(const BoundsTable& t);

/// observable,t,a0,D,lower,oracle,upper with clamped bounds.
std::string to_csv(const VerificationReport& r);
/// observable,t,a0,D,lower,upper without oracle column.
std::string to_csv(const BoundsTable& t);

std::string to_text(const errorket::ClassicalityCertificate& c);
std::string to_text(const VerificationReport& r);
std::string to_text(const BoundsTable& t);

/// Fixed-precision formatting used by all text output.
std::string fmt(double x, int precision = 6);

}  // namespace halfq::harness
