#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library's own algorithms so each check has an independent second route.

#include "polarmask/geometry.hpp"

#include <functional>
#include <span>
#include <vector>

namespace polarmask::testing {

/// Winding-number containment (nonzero rule).
bool winding_inside(Point p, std::span<const Point> polygon);

/// Pixel-center sampling with the winding-number test, one pixel at a time.
BitMask brute_raster(std::span<const Point> polygon, int width, int height);

std::size_t count_set(const BitMask& m);
std::size_t count_both(const BitMask& a, const BitMask& b);
std::size_t count_either(const BitMask& a, const BitMask& b);

/// Area of a regular n-gon with circumradius r.
double regular_polygon_area(int n, double r);

/// Central finite differences of f at x with step h.
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double h);

double relative_error(double got, double want);

}  // namespace polarmask::testing
