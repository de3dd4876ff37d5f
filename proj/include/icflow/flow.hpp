#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "icflow/curve.hpp"
#include "icflow/functionals.hpp"

namespace icflow {

/// Normal speed F driving dX/dt = F nu.
enum class SpeedLaw {
    ConstrainedICF,   ///< F = phi'(r)/kappa - u
    CurveShortening,  ///< F = -kappa
    ClassicalICF,     ///< F = 1/kappa
};

bool requires_convexity(SpeedLaw law) noexcept;
std::string_view to_string(SpeedLaw law) noexcept;
/// Accepts "constrained", "csf"/"curve-shortening", "classical" and the enum spellings.
SpeedLaw parse_speed_law(std::string_view name);

enum class FlowStatus { Converged, TimeLimit, ConvexityLost, PoleHit, StepUnderflow };

std::string_view to_string(FlowStatus s) noexcept;
inline bool is_failure(FlowStatus s) noexcept
{
    return s != FlowStatus::Converged && s != FlowStatus::TimeLimit;
}

/// Raised by rhs/stable_dt/step; run() turns it into a trace status.
class FlowError : public std::runtime_error {
public:
    FlowError(FlowStatus status, const std::string& what) : std::runtime_error(what), status_(status) {}
    FlowStatus status() const noexcept { return status_; }

private:
    FlowStatus status_;
};

struct FlowConfig {
    double sigma = 0.1;             ///< CFL safety factor in (0, 0.5]
    double t_end = 100.0;
    double eps_stationary = 1e-9;   ///< converged once sup|drho/dt| drops below this
    long report_stride = 100;       ///< steps between GeometryReport records
    long snapshot_stride = 0;       ///< steps between stored curves; 0 keeps only first and last
    bool log_snapshots = false;     ///< also store curves at report_stride * 2^k steps
    long max_steps = 50'000'000;
    bool refine_on_failure = false;

    void validate() const;
};

/// Right-hand side drho/dt = F * sqrt(1 + rho_theta^2 / phi^2) at every node.
std::vector<double> rhs(const RadialCurve& c, SpeedLaw law);

/// Explicit step sigma * h^2 / max D, D the coefficient of rho_thetatheta in rhs.
double stable_dt(const RadialCurve& c, SpeedLaw law, double sigma);

/// One classical Runge-Kutta step.
RadialCurve step(const RadialCurve& c, SpeedLaw law, double dt);

struct Snapshot {
    long step;
    double time;
    RadialCurve curve;
};

/// A monitored invariant that moved past its slack.
struct Violation {
    std::string monitor;
    double time;
    double magnitude;  ///< amount by which the slack was exceeded
};

struct IdentityDiagnostics {
    double max_length_rate_error = 0;  ///< max |dL/dt - int F kappa ds|
    double max_area_rate_error = 0;    ///< max |dA/dt - int F ds|
    long samples = 0;
};

struct FlowTrace {
    SpeedLaw law = SpeedLaw::ConstrainedICF;
    FlowConfig config;
    FlowStatus status = FlowStatus::TimeLimit;
    std::string message;
    long steps = 0;
    double t_final = 0;
    std::vector<double> times;
    std::vector<GeometryReport> reports;
    std::vector<Snapshot> snapshots;
    std::vector<Violation> violations;
    IdentityDiagnostics identities;
    /// sup |rho - rho_inf| on the final curve, rho_inf fixed by the initial
    /// length; set for converged constrained runs.
    std::optional<double> limit_deviation;
    double support_floor = 0;  ///< run constant c with u >= c
    bool refined = false;

    const RadialCurve& final_curve() const { return snapshots.back().curve; }
    const RadialCurve& initial_curve() const { return snapshots.front().curve; }
};

/// Integrates until stationary, t_end, or a failure status, monitoring the
/// invariants that the chosen law guarantees.
FlowTrace run(const RadialCurve& c0, SpeedLaw law, const FlowConfig& config);

/// Trigonometric interpolation of the radii onto a grid of n points.
RadialCurve resample(const RadialCurve& c, std::size_t n);

/// Magnitude of the m-th discrete Fourier coefficient, (2/N)|sum rho_i e^{-i m theta_i}|.
double fourier_amplitude(std::span<const double> values, int m);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct DecayFit {
    double measured_rate;
    double predicted_rate;  ///< m^2 / phi'(rho_inf)
    double rho_inf;
    double l2_rate;         ///< decay rate of the L2 norm of rho - rho_inf over the same window
    double l2_bound;        ///< 1 / (8 phi'(rho_inf))
    double window_begin;
    double window_end;
    long samples;
    std::vector<double> times;       ///< every snapshot time
    std::vector<double> amplitudes;  ///< mode-m amplitude per snapshot
    std::vector<double> l2;          ///< L2 norm of sigma = rho - rho_inf per snapshot
};

/// Least-squares decay rate of Fourier mode m over the late-time window, from
/// 10% of the initial amplitude down to 1e-11.
DecayFit decay_rate(const FlowTrace& trace, int m);

}  // namespace icflow
