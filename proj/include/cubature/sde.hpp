#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubature/meshes_walks.hpp"
#include "cubature/paths.hpp"
#include "cubature/random.hpp"

namespace cubature {

/// out = V(x). Must be safe to call concurrently.
using VectorField = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Exact solution of y' = dh V_0(y) + sum_i dw_i V_i(y) over unit time,
/// applied in place. Optional fast path for builtins.
using SegmentFlow = std::function<void(std::span<double> x, double dh, std::span<const double> dw)>;

/// Stratonovich system dX = V_0(X) dt + sum_i V_i(X) o dB^i in R^N.
class VectorFieldSystem {
public:
    /// `fields` holds V_0..V_d.
    VectorFieldSystem(int state_dim, int noise_dim, std::vector<VectorField> fields, std::string name = "custom",
                      SegmentFlow exact_flow = {});

    int state_dimension() const noexcept { return n_; }
    int noise_dimension() const noexcept { return d_; }
    const std::string& name() const noexcept { return name_; }

    void eval(int field, std::span<const double> x, std::span<double> out) const;
    /// out = dh V_0(x) + sum_i dw[i] V_i(x); `scratch` must hold N values.
    void segment_rhs(std::span<const double> x, double dh, std::span<const double> dw, std::span<double> out,
                     std::span<double> scratch) const;

    bool has_exact_flow() const noexcept { return static_cast<bool>(flow_); }
    void apply_exact_flow(std::span<double> x, double dh, std::span<const double> dw) const { flow_(x, dh, dw); }

private:
    int n_;
    int d_;
    std::vector<VectorField> fields_;
    std::string name_;
    SegmentFlow flow_;
};

/// Independent geometric Brownian motions, asset i driven by noise i:
/// dX^i = mu_i X^i dt + sigma_i X^i dB^i (Ito). The Stratonovich drift is
/// (mu_i - sigma_i^2 / 2) X^i. Carries an exact segment flow.
VectorFieldSystem black_scholes(std::vector<double> sigma, std::vector<double> ito_drift = {});

/// V_i(x) = A_i x with row-major N x N matrices A_0..A_d.
VectorFieldSystem linear_system(int state_dim, std::vector<std::vector<double>> matrices);

/// Stratonovich drift matrix A_0 - 1/2 sum_i A_i^2 for an Ito linear model.
std::vector<double> ito_to_stratonovich_drift(int state_dim, std::span<const std::vector<double>> matrices);

/// All fields zero.
VectorFieldSystem zero_system(int state_dim, int noise_dim);

struct IntegrationOptions {
    int substeps = 8;
    /// Double the substeps per segment until successive results agree to
    /// `rel_tol`, up to `max_substeps`.
    bool adaptive = true;
    int max_substeps = 256;
    double rel_tol = 1e-10;
    /// Use the system's exact segment flow when available.
    bool use_exact_flow = true;
};

/// States at every breakpoint of the driver. `sample_indices` marks the
/// mesh-aligned sample times among them (all breakpoints when no mesh).
struct SolutionPath {
    int state_dim = 0;
    std::vector<double> times;
    std::vector<double> states;  ///< row-major, one row per time
    std::vector<std::size_t> sample_indices;

    std::size_t size() const noexcept { return times.size(); }
    std::span<const double> state(std::size_t i) const noexcept {
        return {states.data() + i * static_cast<std::size_t>(state_dim), static_cast<std::size_t>(state_dim)};
    }
    std::span<const double> initial() const noexcept { return state(0); }
    std::span<const double> terminal() const noexcept { return state(size() - 1); }
    /// Linear interpolation between recorded states.
    std::vector<double> state_at(double t) const;
    std::vector<double> sample_times() const;
};

/// Advance x along one linear segment with time increment dh and spatial
/// increment dw. Throws DivergenceError tagged with `segment` on blow-up.
void integrate_segment(const VectorFieldSystem& vf, std::span<double> x, double dh, std::span<const double> dw,
                       const IntegrationOptions& options, std::size_t segment = 0);

/// Solve y' = h'(s) V_0(y) + sum_i w_i'(s) V_i(y) along a piecewise-linear driver.
SolutionPath integrate_along_path(const VectorFieldSystem& vf, const PiecewiseLinearPath& driver,
                                  std::span<const double> x0, const IntegrationOptions& options = {},
                                  const Mesh* sample_mesh = nullptr);

/// One Stratonovich sample path via Wong-Zakai interpolation on the uniform
/// mesh with `fine_n` steps.
SolutionPath wong_zakai_path(const VectorFieldSystem& vf, std::span<const double> x0, std::size_t fine_n, Rng& rng,
                             const IntegrationOptions& options = {});
std::vector<double> wong_zakai_reference(const VectorFieldSystem& vf, std::span<const double> x0,
                                         std::size_t fine_n, Rng& rng, const IntegrationOptions& options = {});

/// Zero-rate call value.
double black_scholes_exact(double s0, double strike, double sigma, double maturity);

/// E[f(s0 exp(sigma W_T + (mu - sigma^2/2) T))] by composite Simpson over
/// the Gaussian density on [-12, 12].
double lognormal_expectation(const std::function<double(double)>& f, double s0, double sigma, double ito_drift,
                             double maturity, int intervals = 20000);

}  // namespace cubature
