#include "wgqed/faddeeva.hpp"

#include <array>
#include <cmath>

namespace wgqed {
namespace {

constexpr int kTerms = 40;

struct WeidemanTable {
    std::array<double, kTerms> coeff{};
    double L = 0.0;

    WeidemanTable()
    {
        const int M = 2 * kTerms;
        L = std::sqrt(kTerms / std::sqrt(2.0));
        for (int n = 1; n <= kTerms; ++n) {
            double sum = 0.0;
            for (int k = -M + 1; k <= M - 1; ++k) {
                const double t = L * std::tan(k * pi / (2.0 * M));
                const double f = std::exp(-t * t) * (L * L + t * t);
                sum += f * std::cos(pi * k * n / M);
            }
            coeff[n - 1] = sum / (2.0 * M);
        }
    }
};

const WeidemanTable& table()
{
    static const WeidemanTable t;
    return t;
}

cplx faddeeva_upper(cplx z)
{
    const auto& t = table();
    const cplx denom = t.L - I * z;
    const cplx Z = (t.L + I * z) / denom;
    cplx p = 0.0;
    for (int n = kTerms - 1; n >= 0; --n)
        p = p * Z + t.coeff[n];
    return 2.0 * p / (denom * denom) + 1.0 / (std::sqrt(pi) * denom);
}

}  // namespace

cplx faddeeva(cplx z)
{
    if (z.imag() >= 0.0)
        return faddeeva_upper(z);
    return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

cplx erfc_complex(cplx z)
{
    if (z.real() >= 0.0)
        return std::exp(-z * z) * faddeeva_upper(I * z);
    return 2.0 - std::exp(-z * z) * faddeeva_upper(-I * z);
}

double dawson(double x)
{
    return 0.5 * std::sqrt(pi) * faddeeva_upper(cplx(x, 0.0)).imag();
}

}  // namespace wgqed
