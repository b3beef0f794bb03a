#pragma once

#include <vector>

namespace cvembem::quadrature {

/// One-dimensional rule on [-1, 1].
struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
/// Rules are computed once per n and cached; the returned reference stays valid.
const QuadratureRule1D& gauss_legendre(int n);

/// n-point Gauss-Lobatto rule (endpoints included), exact to degree 2n-3.
const QuadratureRule1D& gauss_lobatto(int n);

/// Legendre polynomial P_n(x) and its derivative.
struct LegendreValue {
    double value;
    double derivative;
};
LegendreValue legendre(int n, double x);

} // namespace cvembem::quadrature
