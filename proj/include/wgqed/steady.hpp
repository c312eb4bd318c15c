#pragma once

// Steady response to a monochromatic probe. The probe is the field of a
// weakly decaying source dipole whose amplitude is held at one; stationary
// amplitudes b_e = beta_e exp(-i delta t) then solve (delta - H) beta = h,
// h_e = -3 pi e_e^* . G(r_e, r_s) . e_s.

#include <span>
#include <string>
#include <vector>

#include "wgqed/ensemble.hpp"
#include "wgqed/greens.hpp"

namespace wgqed {

struct Probe {
    double delta = 0.0;  // omega_s - omega_0 in gamma0
    Vec3 source_position = Vec3::Zero();
    int source_sublevel = -1;
    double source_strength = 1.0;  // dipole amplitude of the source
};

/// Drive vector h for the ensemble in H, scaled by the source strength.
Eigen::VectorXcd source_drive(const EffectiveHamiltonian& h, const Probe& probe);

struct SteadySolution {
    Eigen::VectorXcd beta;
    double residual = 0.0;   // |(delta - H) beta - h| / |h|
    double rcond = 1.0;      // reciprocal condition estimate of delta - H
};

/// Reciprocal condition number below which a solve is rejected.
inline constexpr double kMinReciprocalCondition = 1e-13;

/// Throws NumericalError when delta - H is numerically singular, as happens
/// at a real eigenvalue of a lossless build.
SteadySolution steady_amplitudes(const EffectiveHamiltonian& h, const Probe& probe);
SteadySolution steady_amplitudes(const EffectiveHamiltonian& h, const Eigen::VectorXcd& drive,
                                 double delta);

struct DetectorReading {
    Vec3 position;
    double intensity = 0.0;
};

/// |G(r_d, r_s) e_s + sum_e G(r_d, r_e) e_e beta_e|^2, all polarizations summed.
DetectorReading detector_intensity(const Vec3& position, const Eigen::VectorXcd& beta,
                                   const Probe& probe, const EffectiveHamiltonian& h);

/// Detector intensity with no atoms in the guide.
double empty_guide_intensity(const Vec3& position, const Probe& probe, const Geometry& geometry,
                             const GreenOptions& options = {});

/// Amplitudes after driving the ensemble for time t with an appended source
/// atom of decay rate gamma_s, divided by sqrt(gamma_s) times the source
/// amplitude. Tends to steady_amplitudes as gamma_s -> 0 and t -> infinity.
Eigen::VectorXcd slow_source_amplitudes(const EffectiveHamiltonian& h, const Probe& probe,
                                        double gamma_s, double t);

struct ProbeLine {
    Vec3 source;
    Vec3 detector;
};

/// Source and detector on the guide axis, `margin` beyond each end of a cloud
/// occupying -L/2 < z < L/2.
ProbeLine probe_line(const Geometry& geometry, double cloud_length, double margin = 500.0);

struct TransmissionSetup {
    Geometry geometry;
    GreenOptions green{};
    double cloud_length = 1000.0;
    double margin = 500.0;
    int source_sublevel = -1;
};

/// Everything needed to probe one configuration at many detunings.
class ConfigurationResponse {
public:
    ConfigurationResponse(const AtomEnsemble& ensemble, const TransmissionSetup& setup);

    const EffectiveHamiltonian& hamiltonian() const { return h_; }
    const ProbeLine& line() const { return line_; }
    Probe probe(double delta) const;

    SteadySolution solve(double delta) const;
    /// Field at the detector for amplitudes beta.
    CVec3 detector_field(const Eigen::VectorXcd& beta) const;
    double reference_intensity() const { return reference_; }
    double transmission(const Eigen::VectorXcd& beta) const;
    double transmission(double delta) const { return transmission(solve(delta).beta); }

private:
    TransmissionSetup setup_;
    ProbeLine line_;
    EffectiveHamiltonian h_;
    Eigen::VectorXcd drive_;
    CVec3 direct_;
    Eigen::MatrixXcd to_detector_;  // 3 x 3N, columns G(r_d, r_e) e_m
    double reference_ = 0.0;
};

struct TransmissionPoint {
    double delta = 0.0;
    Statistic t;
    Statistic log_t;
};

struct TransmissionRun {
    std::vector<TransmissionPoint> points;
    std::size_t trials_used = 0;
    std::vector<std::string> warnings;
};

/// Configuration-averaged T(delta) and log T(delta).
TransmissionRun transmission_spectrum(const TransmissionSetup& setup, const ResolvedSampling& sampling,
                                      std::span<const double> deltas, unsigned threads = 1);

/// Configuration-averaged atomic polarization binned along z. Empty bins hold NaN.
struct PolarizationProfile {
    std::vector<double> z;             // bin centers
    std::vector<double> atoms;         // mean atoms per bin per trial
    std::vector<double> mean_abs;      // mean |d|, d = dipole vector of an atom
    std::vector<double> coherent_abs;  // |<d_x exp(-i kz z)>|
    std::vector<double> phase;         // unwrapped arg<d_x exp(-i kz z)> + kz z
    std::vector<double> population[3]; // mean |beta_m|^2, m = -1, 0, +1
    double reference_kz = 0.0;         // kz of the fundamental mode used to demodulate
    double bin_width = 0.0;
    std::size_t trials_used = 0;
    std::vector<std::string> warnings;
};

PolarizationProfile polarization_profile(const TransmissionSetup& setup,
                                         const ResolvedSampling& sampling, double delta,
                                         unsigned threads = 1, double bin_width = 25.0);

/// Slope of the unwrapped phase against z over the central 60% of the cloud.
LinearFit fit_phase_slope(const PolarizationProfile& profile, double cloud_length);

/// Mean sublevel population over bins whose centers fall in [z_lo, z_hi],
/// weighted by atom counts.
double mean_population(const PolarizationProfile& profile, int mj, double z_lo, double z_hi);

}  // namespace wgqed
