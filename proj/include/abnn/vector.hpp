#pragma once

#include <span>
#include <vector>

namespace abnn {

// Element of a multiset or of an embedding space. The dimension is the length.
using Vector = std::vector<double>;
using Multiset = std::vector<Vector>;

Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> a, double c);
double inner(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

// Throws ShapeMismatch unless the two lengths match.
void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace abnn
