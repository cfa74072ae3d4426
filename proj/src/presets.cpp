#include "optostirling/errors.hpp"
#include "optostirling/params.hpp"

namespace optostirling {

namespace {

// Shipped parameter sets. Rates are in units of omega_m, temperatures in K.
// The *.window entries are the zoomed control windows the cycle is built in.
const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table = {
        {"fig3", R"(# bad-cavity operating point, room temperature bath
f_m_hz = 1e5
gamma  = 1e-4
kappa1 = 1
kappa2 = 1
Delta  = 1
G      = 0.1
eta_d  = 0.9
T_bath = 300

feedback.window = 0.3, 1.0, 0.6, 1.6
feedback.levels = 0.5, 0.22, 0.08, -0.08
feedback.t_tot  = 2000

nofeedback.window = 0.3, 6.0, 0.02, 0.3
nofeedback.levels = 15, 7, -0.002, -0.004
nofeedback.t_tot  = 20000
)"},
        {"appB-weak", R"(# resolved sideband, weak coupling
f_m_hz = 1e5
gamma  = 1e-4
kappa1 = 0.05
kappa2 = 0.05
Delta  = 1
G      = 0.01
eta_d  = 0.9
T_bath = 300

feedback.window = -0.5, 0.6, 0.6, 1.1
feedback.levels = 6, 3, 0.004, -0.004
feedback.t_tot  = 40000

nofeedback.window = 0.5, 1.6, 0.002, 0.04
nofeedback.levels = 40, 20, 0.0004, -0.0005
nofeedback.t_tot  = 60000
)"},
        {"appB-strong", R"(# resolved sideband, strong coupling
f_m_hz = 1e5
gamma  = 1e-4
kappa1 = 0.05
kappa2 = 0.05
Delta  = 1
G      = 0.1
eta_d  = 0.9
T_bath = 300

# the hot isochore is held at 0.03: 0.035 is not reached on the hot
# isotherm before the adiabatic condition fails
feedback.window = 1.5, 4.72, 0.3, 6.0
feedback.levels = 0.7, 0.3, 0.03, -0.04
feedback.t_tot  = 2000

nofeedback.window = 0.6, 1.5, 0.01, 0.1
nofeedback.levels = 1, 0.35, 0.03, -0.035
nofeedback.t_tot  = 2000
)"},
    };
    return table;
}

}  // namespace

std::vector<std::string> builtin_preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : presets()) names.push_back(k);
    return names;
}

const std::string& builtin_preset_text(const std::string& name) {
    auto it = presets().find(name);
    if (it == presets().end()) throw ConfigError("unknown preset '" + name + "'");
    return it->second;
}

Preset builtin_preset(const std::string& name, const Constants& c) {
    return parse_preset(builtin_preset_text(name), name, c);
}

}  // namespace optostirling
