#pragma once

#include <string>

#include "fcca/fpca.hpp"

namespace fcca {

/// CSV layout: first line `t,<t1>,<t2>,...` with the grid points; each data
/// line `path_<k>,<v1>,...`. Full double precision, LF line endings.
void write_dataset_csv(const FunctionalDataset& ds, const std::string& path);
FunctionalDataset read_dataset_csv(const std::string& path);

/// Serializes a double with up to 17 significant digits (round-trip exact).
std::string format_double(double x);

}  // namespace fcca
