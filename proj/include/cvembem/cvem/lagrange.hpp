#pragma once

#include <vector>

namespace cvembem::cvem {

/// Values of the Lagrange polynomials on `nodes` at xi.
std::vector<double> lagrange_values(const std::vector<double>& nodes, double xi);

/// Edge trace nodes in [-1, 1] for order k: the (k+1)-point Gauss-Lobatto set.
const std::vector<double>& trace_nodes(int k);

} // namespace cvembem::cvem
