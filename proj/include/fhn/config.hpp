#pragma once

#include "fhn/evans.hpp"
#include "fhn/pdesim.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fhn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Overrides applied on top of default_spectral_config once the speed is known.
struct SpectralOverrides {
    std::optional<double> delta;
    std::optional<double> M_tilde;
    std::optional<double> nu;
    std::optional<double> xi_match;
    std::optional<bool> trace_normalize;
    double rtol = 1e-10;
    double atol = 1e-11;
    int contour_points = 128;
};

struct RunConfig {
    ModelParams params;
    SpectralOverrides spectral;
    std::vector<double> sweep;   // eps values
    std::string output_dir = "out";
    int jobs = 1;
    ShootOptions shoot;
    PdeOptions pde;
    double bump_amplitude = 0.01;
    double bump_width = 2.0;
    std::map<std::string, std::string> raw;  // as read, for the manifest
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed numbers raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Applies one key; used for files and for command-line overrides.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::vector<double> parse_list(const std::string& s);

/// Checks module preconditions; throws ConfigError with the reason.
void validate_config(const RunConfig& cfg, bool need_pulse);

SpectralConfig resolve_spectral(const RunConfig& cfg, double c);

/// Flat listing of every key with its effective value (17 significant digits).
std::map<std::string, std::string> config_entries(const RunConfig& cfg);

}  // namespace fhn
