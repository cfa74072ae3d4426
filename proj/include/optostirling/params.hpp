#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace optostirling {

struct Constants {
    double hbar = 1.054571817e-34;  // J s
    double k_B = 1.380649e-23;      // J/K
};

// Device constants. Rates, frequencies and couplings are in units of omega_m;
// omega_m itself is kept in rad/s for the temperature conversion.
struct PhysicalParams {
    double omega_m = 0.0;
    double gamma = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa = 0.0;
    double Delta = 0.0;
    double G = 0.0;
    double eta_d = 1.0;
    double T_bath = 0.0;
    double n_T = 0.0;
};

class FeedbackParams {
public:
    FeedbackParams() = default;
    FeedbackParams(double g_fb, double phi);

    // phi = theta_fb - Delta * tau_fb
    static FeedbackParams from_homodyne(double g_fb, double theta_fb, double tau_fb, double Delta);

    [[nodiscard]] double g_fb() const { return g_fb_; }
    [[nodiscard]] double phi() const { return phi_; }
    [[nodiscard]] const std::optional<double>& theta_fb() const { return theta_fb_; }
    [[nodiscard]] const std::optional<double>& tau_fb() const { return tau_fb_; }

private:
    double g_fb_ = 0.0;
    double phi_ = 0.0;
    std::optional<double> theta_fb_;
    std::optional<double> tau_fb_;
};

struct ValidationResult {
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

ValidationResult validate_params(const PhysicalParams& p);
ValidationResult validate_feedback(const FeedbackParams& fb, double Delta);

double thermal_occupation(double T_bath, double omega, const Constants& c = {});

// Builds a parameter record with kappa = kappa1 + kappa2 and n_T from T_bath.
PhysicalParams make_params(double omega_m, double gamma, double kappa1, double kappa2,
                           double Delta, double G, double eta_d, double T_bath,
                           const Constants& c = {});

// Window in the control plane: x range then y range.
struct Window {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

struct CycleLevels {
    double T_hot = 0.0;
    double T_cold = 0.0;
    double Dm_h = 0.0;
    double Dm_l = 0.0;
};

// Per-plane defaults a preset may carry for cycle construction.
struct PlaneDefaults {
    std::optional<Window> window;
    std::optional<CycleLevels> levels;
    std::optional<double> t_tot;
};

struct Preset {
    std::string name;
    PhysicalParams params;
    PlaneDefaults feedback;
    PlaneDefaults nofeedback;
};

// Parses "name = value" lines with '#' comments. Unknown keys and malformed
// values raise ConfigError naming the offending key or line.
Preset parse_preset(const std::string& text, const std::string& name, const Constants& c = {});
Preset load_preset_file(const std::string& path, const Constants& c = {});

std::vector<std::string> builtin_preset_names();
const std::string& builtin_preset_text(const std::string& name);
Preset builtin_preset(const std::string& name, const Constants& c = {});

}  // namespace optostirling
