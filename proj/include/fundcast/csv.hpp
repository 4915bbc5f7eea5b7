#pragma once

#include <string>

#include "fundcast/record.hpp"

namespace fundcast {

// Dataset file layout: header `id,<feature names in schema order>,
// total_raised,ipo_valuation,acquisition_price,funding_label,success_label`;
// UTF-8, RFC 4180 quoting, empty cell = absent value. Doubles are written
// with shortest round-trip formatting so save -> load -> save is
// byte-identical.
Dataset load_dataset(const std::string& path, const FeatureSchema& schema);
void save_dataset(const Dataset& dataset, const std::string& path);

// Shortest round-trip double formatting (std::to_chars).
std::string format_double(double v);

}  // namespace fundcast
