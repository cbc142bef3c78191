#ifndef CHANEST_REPORT_IO_HPP
#define CHANEST_REPORT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "chanest/analysis.hpp"

namespace chanest {

using Json = nlohmann::ordered_json;

/// {"kind": "...", "lambda": ...}. One-parameter families carry a number,
/// pauli and general an array, generalized-pauli a DxD array of rows plus
/// "dim".
Json channel_to_json(const ChannelModel& c);
/// Inverse of channel_to_json; range-checked. Throws ConfigError.
ChannelModel channel_from_json(const Json& j);

Json to_json(const ProtocolSpec& p);
Json to_json(const OutcomeCounts& counts);
Json to_json(const Estimate& e);
Json to_json(const MeanErrorReport& r);
Json to_json(const DeltaReport& r);

/// 17 significant digits, so values round-trip exactly.
std::string format_double(double x);

/// Column names shared by mean-error CSV files:
/// kind, cost, method, N, lambda columns, value, std_error, status.
/// One-parameter families use a single "lambda" column, others lambda1..L.
std::vector<std::string> mean_error_csv_header(Eigen::Index lambda_count);

/// A row for a computed report (status "ok").
std::vector<std::string> mean_error_csv_row(const MeanErrorReport& r);
/// A row whose evaluation failed; value and std_error stay empty.
std::vector<std::string> mean_error_csv_error_row(ChannelKind kind, CostKind cost, Method method, int n,
                                                  const Eigen::VectorXd& lambda, const std::string& status);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace chanest

#endif  // CHANEST_REPORT_IO_HPP
