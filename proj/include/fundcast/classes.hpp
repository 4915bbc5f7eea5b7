#pragma once

#include <array>
#include <string>

namespace fundcast {

// The five funding classes partition (0, inf); bounds are lower-inclusive at
// 1e6 / 1e7 / 1e8 / 1e9. Amounts below $100K still fall in "100K-1M" and are
// flagged low-range.
inline constexpr std::array<const char*, 5> kFundingClassLabels = {
    "100K-1M", "1M-10M", "10M-100M", "100M-1B", "1B+"};

// Throws RangeError on amount <= 0.
std::string funding_class(double amount_usd, bool* low_range = nullptr);
int funding_class_index(double amount_usd);

}  // namespace fundcast
