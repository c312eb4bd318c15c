#include "wgqed/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace wgqed {

Eigensystem eigensystem(const Eigen::MatrixXcd& h)
{
    // The complex QR iteration can stall on large clusters of exactly zero
    // eigenvalues (uncoupled sublevels). A diagonal shift moves the cluster off zero.
    const double scale = std::max(h.cwiseAbs().maxCoeff(), 1.0);
    const std::array<cplx, 3> shifts{cplx{0.0, 0.0}, scale * cplx{0.37, 0.23},
                                     scale * cplx{-0.61, 0.11}};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver;
    for (const auto& shift : shifts) {
        solver.compute(h + shift * Eigen::MatrixXcd::Identity(h.rows(), h.cols()));
        if (solver.info() == Eigen::Success)
            return {solver.eigenvalues().array() - shift, solver.eigenvectors().colwise().normalized()};
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
    const auto& sv = svd.singularValues();
    std::ostringstream os;
    os << "eigensolver did not converge (dimension " << h.rows() << ", largest singular value "
       << sv(0) << ", condition " << sv(0) / sv(sv.size() - 1) << ")";
    throw NumericalError(os.str());
}

std::vector<CollectiveState> collective_spectrum(const Eigen::MatrixXcd& h)
{
    std::vector<CollectiveState> out;
    if (h.rows() == 0)
        return out;
    const auto es = eigensystem(h);
    out.reserve(static_cast<std::size_t>(h.rows()));
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        out.push_back({es.values(k), es.vectors.col(k).cwiseAbs2().cwiseAbs2().sum()});
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return x.lambda.real() < y.lambda.real();
    });
    return out;
}

std::vector<CollectiveState> collective_spectrum(const EffectiveHamiltonian& h)
{
    return collective_spectrum(h.matrix);
}

double single_mode_scale(const Geometry& geometry)
{
    const auto modes = radiating_modes(geometry);
    if (modes.size() != 1) {
        std::ostringstream os;
        os << "single_mode_scale: guide " << geometry.a() << " x " << geometry.b() << " carries "
           << modes.size() << " radiating modes";
        throw DomainError(os.str());
    }
    return modes.front().kz.real() * geometry.area();
}

std::size_t SpectrumHistogram::occupied() const
{
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                  [](std::size_t c) { return c > 0; }));
}

SpectrumHistogram spectrum_histogram(std::span<const CollectiveState> states, std::size_t bins)
{
    if (states.empty())
        return {};
    HistogramRange r{states[0].shift(), states[0].shift(), states[0].decay_rate(),
                     states[0].decay_rate()};
    for (const auto& s : states) {
        r.shift_lo = std::min(r.shift_lo, s.shift());
        r.shift_hi = std::max(r.shift_hi, s.shift());
        r.decay_lo = std::min(r.decay_lo, s.decay_rate());
        r.decay_hi = std::max(r.decay_hi, s.decay_rate());
    }
    // Widen degenerate axes and nudge the upper edge so maxima land inside.
    auto widen = [](double& lo, double& hi) {
        const double pad = std::max(1e-12, 1e-9 * std::max(std::abs(lo), std::abs(hi)));
        if (hi - lo < pad) {
            lo -= pad;
            hi += pad;
        } else {
            hi += 1e-9 * (hi - lo);
        }
    };
    widen(r.shift_lo, r.shift_hi);
    widen(r.decay_lo, r.decay_hi);
    return spectrum_histogram(states, bins, r);
}

SpectrumHistogram spectrum_histogram(std::span<const CollectiveState> states, std::size_t bins,
                                     const HistogramRange& range)
{
    if (bins == 0)
        throw DomainError("spectrum_histogram: bins must be positive");
    if (!(range.shift_hi > range.shift_lo) || !(range.decay_hi > range.decay_lo))
        throw DomainError("spectrum_histogram: empty range");
    SpectrumHistogram hist;
    if (states.empty())
        return hist;
    hist.range = range;
    hist.bins = bins;
    hist.counts.assign(bins * bins, 0);
    const double nb = static_cast<double>(bins);
    for (const auto& s : states) {
        const double u = (s.shift() - range.shift_lo) / (range.shift_hi - range.shift_lo);
        const double v = (s.decay_rate() - range.decay_lo) / (range.decay_hi - range.decay_lo);
        if (u < 0.0 || u >= 1.0 || v < 0.0 || v >= 1.0) {
            ++hist.outside;
            continue;
        }
        ++hist.counts[static_cast<std::size_t>(u * nb) * bins + static_cast<std::size_t>(v * nb)];
    }
    return hist;
}

double shift_skewness(std::span<const CollectiveState> states)
{
    const double n = static_cast<double>(states.size());
    if (states.size() < 3)
        return 0.0;
    double mean = 0.0;
    for (const auto& s : states)
        mean += s.shift();
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (const auto& s : states) {
        const double d = s.shift() - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

}  // namespace wgqed
