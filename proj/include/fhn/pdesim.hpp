#pragma once

#include "fhn/pulse.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fhn {

class BlowUpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fields on a uniform grid x_i = x0 + i h, i = 0..n-1.
struct PdeState {
    double x0 = 0.0;
    double h = 1.0;
    std::vector<double> U;
    std::vector<double> W;
    double t = 0.0;

    std::size_t size() const { return U.size(); }
    double x(std::size_t i) const { return x0 + h * static_cast<double>(i); }
};

/// Pulse profile on all of R: the computed orbit, continued by the unstable
/// decay on the left and along the invariant line u = 0 on the right.
class PulseProfile {
public:
    explicit PulseProfile(const PulseSolution& pulse);
    Vec3 operator()(double xi) const;
    const PulseSolution& pulse() const { return *pulse_; }
    /// Smallest xi beyond which w stays below tol.
    double tail_end(double tol) const;

private:
    const PulseSolution* pulse_;
    double mu_u_;
    double slow_rate_;
    Vec3 left_;
    Vec3 right_;
};

enum class TimeScheme { rk4, imex };

struct PdeOptions {
    int n = 2000;
    double t_end = 150.0;
    double dt = 0.0;               // 0: from the stability bound
    TimeScheme scheme = TimeScheme::rk4;
    double record_every = 1.0;     // orbital-distance sampling interval
    int snapshot_every = 0;        // in records; 0 disables snapshots
    double blowup = 10.0;
    double tail_tol = 1e-3;        // boundary rest tolerance for the layout
    double left_margin = 20.0;
};

/// Grid laid out around the pulse with room for leftward travel over t_end.
/// Returns the state U(x) = u(x + offset), W(x) = w(x + offset); offset is set.
PdeState pulse_initial_state(const PulseProfile& prof, const PdeOptions& opt, double* offset);
PdeState rest_state(double x0, double h, int n);

void add_bump(PdeState& s, double center, double amplitude, double width);

/// (U_t, W_t) from the conservative finite-difference discretization.
void spatial_operator(const ModelParams& p, const PdeState& s, std::vector<double>& dU,
                      std::vector<double>& dW);
/// Largest explicit step allowed for the current fields.
double stable_dt(const ModelParams& p, const PdeState& s);

struct DistanceResult {
    double distance = 0.0;
    double shift = 0.0;   // state(x) ~ profile(x + shift)
};

/// min over shifts of max_i max(|U_i - u(x_i + s)|, |W_i - w(x_i + s)|). Shifts
/// are scanned on the lattice s_ref + j h, |j| <= span, then refined by Brent.
DistanceResult orbital_distance(const PdeState& s, const PulseProfile& prof, double s_ref, int span = 20);

struct PdeRun {
    PdeState final_state;
    std::vector<double> times;
    std::vector<double> distances;
    std::vector<double> shifts;
    std::vector<PdeState> snapshots;
    double dt = 0.0;
    long steps = 0;
    /// Least-squares slope of the tracked shift over the second half of the run.
    double measured_speed() const;
};

PdeRun evolve(const ModelParams& p, PdeState s, const PulseProfile& prof, double shift0,
              const PdeOptions& opt);

void write_snapshots_csv(const std::vector<PdeState>& snaps, const std::string& path);
void write_distance_csv(const PdeRun& run, const std::string& path);

}  // namespace fhn
