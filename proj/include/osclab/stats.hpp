#pragma once

#include <vector>

namespace osclab {

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

// max/min over the strictly positive entries; 1 when fewer than one positive,
// and the count of positive entries is written to `positive` if given.
double positive_span(const std::vector<double>& v, int* positive = nullptr);

}  // namespace osclab
