// Copyright 2026 The echopost Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ECHOPOST_CSV_HPP
#define ECHOPOST_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace echopost {

/// Fixed 6-significant-digit rendering; NaN and infinities render as "nan",
/// "inf", "-inf" so output bytes are stable.
std::string format_number(double value);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace echopost

#endif  // ECHOPOST_CSV_HPP
