// JSON and CSV serialization for the CLI surfaces.
//
// POVM JSON (exactly one of "elements"/"matrices"):
//   {"dim": d, "elements": [{"weight": w, "bloch": [..]}, ...]}
//   {"dim": d, "matrices": [[[ [re, im], ... ], ...], ...]}
// States JSON:         {"dim": d, "states": [{"bloch": [..]}, ...]}
// Statistics JSON:     {"p": [[p(0|0), p(0|1)], [p(1|0), p(1|1)], [p(2|0), p(2|1)]]}
// Decomposition JSON:  {"weights": [..], "branches": [<POVM>, ..],
//                       "residual": r, "leaf_outcome_counts": [..]}
// Curve CSV header:    delta,p_guess,h_min,theta1,theta2,lambda1,dual_gap,restart_best
//
// Numeric output is rounded to 12 significant digits for reproducible diffs.

#pragma once

#include "qbound/certify.hpp"
#include "qbound/common.hpp"
#include "qbound/decompose.hpp"
#include "qbound/povm.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qbound {

using Json = nlohmann::json;

// 12-significant-digit rendering used for every numeric output.
std::string format_sig(double value);
// The same value re-parsed, so JSON documents carry the rounded number.
double round_sig(double value);

Json povm_to_json(const Povm& povm);
Povm povm_from_json(const Json& j);

std::vector<QuditState> states_from_json(const Json& j);

StatsTable stats_from_json(const Json& j);

Json decomposition_to_json(const Povm& parent, const ConvexDecomposition& dec);

Json validation_report_to_json(const ValidationReport& report);

Json certification_to_json(const CertificationResult& result);

std::string curve_to_csv(const std::vector<CurvePoint>& curve);

Json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& content);

}  // namespace qbound
