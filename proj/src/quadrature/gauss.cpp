#include "cvembem/quadrature/gauss.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cvembem::quadrature {

LegendreValue legendre(int n, double x)
{
    if (n == 0) return {1.0, 0.0};
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    // derivative from the standard identity; at |x| = 1 use the closed form
    double dp;
    if (std::abs(1.0 - x * x) < 1e-300) {
        dp = 0.5 * n * (n + 1.0) * (x > 0 ? 1.0 : (n % 2 == 0 ? -1.0 : 1.0));
    } else {
        dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    return {p1, dp};
}

namespace {

QuadratureRule1D compute_gauss_legendre(int n)
{
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).derivative;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule1D compute_gauss_lobatto(int n)
{
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = n - 1;
    const double w_end = 2.0 / (n * (n - 1.0));
    rule.nodes[0] = -1.0;
    rule.nodes[n - 1] = 1.0;
    rule.weights[0] = w_end;
    rule.weights[n - 1] = w_end;
    // interior nodes: roots of P'_m, Newton on P'_m with P''_m from the ODE
    for (int i = 1; i <= (n - 1) / 2; ++i) {
        double x = -std::cos(std::numbers::pi * i / m);
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(m, x);
            const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
            const double dx = dp / d2p;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double p = legendre(m, x).value;
        const double w = w_end / (p * p);
        rule.nodes[i] = x;
        rule.nodes[n - 1 - i] = -x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        const double p = legendre(m, 0.0).value;
        rule.nodes[n / 2] = 0.0;
        rule.weights[n / 2] = w_end / (p * p);
    }
    return rule;
}

template <class F>
const QuadratureRule1D& cached(std::map<int, std::unique_ptr<QuadratureRule1D>>& cache, std::mutex& mutex, int n,
                               F&& compute)
{
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule1D>(compute(n));
    return *slot;
}

} // namespace

const QuadratureRule1D& gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, std::unique_ptr<QuadratureRule1D>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, n, compute_gauss_legendre);
}

const QuadratureRule1D& gauss_lobatto(int n)
{
    if (n < 2) throw std::invalid_argument("gauss_lobatto: n must be >= 2");
    static std::map<int, std::unique_ptr<QuadratureRule1D>> cache;
    static std::mutex mutex;
    return cached(cache, mutex, n, compute_gauss_lobatto);
}

} // namespace cvembem::quadrature
