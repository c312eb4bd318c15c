#include "wgqed/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace wgqed {

ResolvedSampling resolve_sampling(const SamplingSpec& spec, const Geometry& geometry)
{
    const double area = geometry.area();
    const int given = spec.atoms.has_value() + spec.density.has_value() + spec.length.has_value();
    if (given < 2)
        throw ConfigError("sampling: give two of atoms, density, length (N = n*a*b*L)");
    if (spec.trials < 1)
        throw ConfigError("sampling: trials must be at least 1");
    if (spec.density && !(*spec.density > 0.0))
        throw ConfigError("sampling: density must be positive");
    if (spec.length && !(*spec.length > 0.0))
        throw ConfigError("sampling: length must be positive");

    ResolvedSampling r;
    r.seed = spec.seed;
    r.trials = spec.trials;
    r.fixed = spec.fixed;
    if (given == 3) {
        const double implied = *spec.density * area * *spec.length;
        if (std::abs(implied - static_cast<double>(*spec.atoms)) > 0.5) {
            std::ostringstream os;
            os << "sampling: atoms, density and length violate N = n*a*b*L (" << *spec.atoms
               << " vs " << implied << ")";
            throw ConfigError(os.str());
        }
    }
    if (spec.atoms && spec.length) {
        r.atoms = *spec.atoms;
        r.length = *spec.length;
    } else if (spec.atoms && spec.density) {
        r.atoms = *spec.atoms;
        r.length = static_cast<double>(r.atoms) / (*spec.density * area);
    } else {
        r.length = *spec.length;
        r.atoms = static_cast<std::size_t>(std::llround(*spec.density * area * r.length));
    }
    if (!(r.length > 0.0))
        throw ConfigError("sampling: length must be positive (zero atoms with a density given)");
    r.density = static_cast<double>(r.atoms) / (area * r.length);
    if (r.fixed.size() > r.atoms)
        throw ConfigError("sampling: more fixed atoms than atoms");
    return r;
}

namespace {

double unit_draw(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

AtomEnsemble sample_configuration(const ResolvedSampling& spec, const Geometry& geometry,
                                  std::size_t trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(std::uint64_t(trial) >> 32)};
    std::mt19937_64 rng(seq);
    AtomEnsemble ens;
    ens.positions = spec.fixed;
    ens.positions.reserve(spec.atoms);
    while (ens.positions.size() < spec.atoms) {
        const double x = geometry.a() * unit_draw(rng);
        const double y = geometry.b() * unit_draw(rng);
        const double z = spec.length * (unit_draw(rng) - 0.5);
        ens.positions.emplace_back(x, y, z);
    }
    return ens;
}

Statistic summarize(std::span<const double> samples)
{
    Statistic s;
    s.trials_used = samples.size();
    if (samples.empty()) {
        s.mean = std::numeric_limits<double>::quiet_NaN();
        s.std_error = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double v : samples)
        sum += v;
    s.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double v : samples)
            ss += (v - s.mean) * (v - s.mean);
        const double n = static_cast<double>(samples.size());
        s.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return s;
}

std::vector<double> TrialBatch::column(std::size_t k) const
{
    std::vector<double> out;
    out.reserve(used());
    for (const auto& r : results)
        if (!r.empty())
            out.push_back(r.at(k));
    return out;
}

std::vector<Statistic> TrialBatch::statistics() const
{
    std::size_t width = 0;
    for (const auto& r : results)
        if (!r.empty()) {
            width = r.size();
            break;
        }
    std::vector<Statistic> out;
    out.reserve(width);
    for (std::size_t k = 0; k < width; ++k)
        out.push_back(summarize(column(k)));
    return out;
}

TrialBatch run_trials(std::size_t count, unsigned threads, const TrialFunction& fn)
{
    TrialBatch batch;
    batch.results.resize(count);
    std::vector<std::string> errors(count);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t t = next++; t < count; t = next++) {
            try {
                batch.results[t] = fn(t);
                if (batch.results[t].empty())
                    errors[t] = "trial produced no observables";
            } catch (const std::exception& e) {
                batch.results[t].clear();
                errors[t] = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(worker);
    }

    std::size_t width = 0;
    for (std::size_t t = 0; t < count; ++t) {
        if (!errors[t].empty())
            continue;
        if (width == 0)
            width = batch.results[t].size();
        if (batch.results[t].size() != width) {
            errors[t] = "trial returned a different number of observables";
            batch.results[t].clear();
        }
    }
    for (std::size_t t = 0; t < count; ++t)
        if (!errors[t].empty()) {
            batch.failed.push_back(t);
            batch.messages.push_back("trial " + std::to_string(t) + ": " + errors[t]);
        }
    if (static_cast<double>(batch.failed.size()) > kMaxFailureFraction * static_cast<double>(count)) {
        std::ostringstream os;
        os << batch.failed.size() << " of " << count << " trials failed; first: "
           << batch.messages.front();
        throw NumericalError(os.str());
    }
    return batch;
}

MonteCarloResult run_monte_carlo(const Experiment& experiment, const ResolvedSampling& spec,
                                 const Geometry& geometry, unsigned threads)
{
    MonteCarloResult out;
    out.batch = run_trials(spec.trials, threads, [&](std::size_t trial) {
        return experiment(sample_configuration(spec, geometry, trial), trial);
    });
    out.observables = out.batch.statistics();
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw DomainError("fit_line: x and y differ in length");
    if (x.size() < 2)
        throw DomainError("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw DomainError("fit_line: all x values coincide");
    LinearFit f;
    f.points = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    f.slope_error = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    return f;
}

ExtinctionFit fit_extinction(std::span<const double> z, std::span<const double> amplitude,
                             double cloud_length)
{
    if (z.size() != amplitude.size())
        throw DomainError("fit_extinction: z and amplitude differ in length");
    const double half_window = 0.3 * cloud_length;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (std::abs(z[i]) <= half_window && std::isfinite(amplitude[i]) && amplitude[i] > 0.0) {
            xs.push_back(z[i]);
            ys.push_back(std::log(amplitude[i]));
        }
    if (xs.size() < 10) {
        std::ostringstream os;
        os << "fit_extinction: " << xs.size() << " populated bins in the fit window, need 10";
        throw DomainError(os.str());
    }
    ExtinctionFit fit;
    fit.line = fit_line(xs, ys);
    fit.alpha = -fit.line.slope;
    fit.alpha_error = fit.line.slope_error;
    if (fit.line.r_squared < 0.8) {
        std::ostringstream os;
        os << "poor exponential fit, R^2 = " << fit.line.r_squared;
        fit.warning = os.str();
    }
    return fit;
}

LocalizationFit fit_localization_length(std::span<const double> lengths,
                                        std::span<const double> mean_log_t)
{
    if (lengths.size() < 4)
        throw DomainError("fit_localization_length: need at least 4 lengths");
    double lo = lengths[0], hi = lengths[0];
    for (double l : lengths) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    if (!(lo > 0.0) || hi < 3.0 * lo)
        throw DomainError("fit_localization_length: lengths must span a factor of 3");
    LocalizationFit fit;
    fit.line = fit_line(lengths, mean_log_t);
    if (fit.line.slope >= 0.0) {
        fit.localized = false;
        fit.xi = std::numeric_limits<double>::infinity();
        fit.note = "no localization detected";
        return fit;
    }
    fit.localized = true;
    fit.xi = -1.0 / fit.line.slope;
    fit.xi_error = fit.line.slope_error / (fit.line.slope * fit.line.slope);
    return fit;
}

}  // namespace wgqed
