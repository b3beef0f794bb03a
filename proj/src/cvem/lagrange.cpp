#include "cvembem/cvem/lagrange.hpp"
#include "cvembem/quadrature/gauss.hpp"

#include <array>
#include <stdexcept>

namespace cvembem::cvem {

std::vector<double> lagrange_values(const std::vector<double>& nodes, double xi)
{
    std::vector<double> out(nodes.size(), 1.0);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (j != i) out[i] *= (xi - nodes[j]) / (nodes[i] - nodes[j]);
    return out;
}

const std::vector<double>& trace_nodes(int k)
{
    static const auto table = [] {
        std::array<std::vector<double>, 12> t;
        for (int n = 1; n < 12; ++n) t[n] = quadrature::gauss_lobatto(n + 1).nodes;
        return t;
    }();
    if (k < 1 || k >= 12) throw std::invalid_argument("trace order out of range");
    return table[k];
}

} // namespace cvembem::cvem
