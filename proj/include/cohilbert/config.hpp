// Run configuration: a flat key = value text format covering the physical
// parameters, the downwash instance, the Laplace line discretization, the
// numerical tolerances and the output location.  Unknown keys are rejected
// so that typos cannot silently fall back to defaults.
#ifndef COHILBERT_CONFIG_HPP
#define COHILBERT_CONFIG_HPP

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <cohilbert/flow.hpp>
#include <cohilbert/pipeline.hpp>

namespace cohilbert {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    // physical configuration (u_free is derived as mach * a_inf)
    double a_inf = 4.0;        // free-stream sound speed [m/s]
    double mach = 0.5;         // Mach number [-]
    double kutta_extent = 2.0; // strong Kutta half-width A [half-chords]
    double sigma_a = 0.25;     // minimal Laplace abscissa [1/s]
    double sigma1 = 0.5;       // admissible strip lower bound [1/s]
    double sigma2 = 1.5;       // admissible strip upper bound [1/s]
    // downwash instance
    std::string downwash_form = "harmonic-plunge";  // or harmonic-pitch, zero
    double downwash_amplitude = 1.0;  // plunge velocity scale [m/s]
    double downwash_frequency = 1.0;  // oscillation frequency [rad/s]
    double envelope_decay = 2.0;      // spectral envelope strength [-]
    double envelope_kappa = 0.7;      // spectral envelope frequency [s]
    // Laplace line discretization
    int grid_size = 256;       // Chebyshev nodes, one of 64/128/256/512
    double sigma_line = 0.5;   // Bromwich abscissa [1/s]
    double eta_max = 20.0;     // frequency window half-width [rad/s]
    int eta_samples = 801;     // symmetric sample count, odd
    // tolerances
    double det_floor = 1e-10;     // characteristic-value detection floor
    double resolvent_tol = 1e-8;  // resolvent identity residual bound
    double im_tol = 1e-6;         // imaginary residue bound on phi
    double tail_tol = 1e-6;       // Bromwich integrand tail bound
    // field evaluation points (comma lists in the file)
    std::vector<double> phi_x = {0.3, 1.6};
    std::vector<double> phi_z = {0.5, 1.1};
    std::vector<double> phi_t = {0.2, 0.7, 1.3};
    std::string output_dir = ".";

    FlowParams flow() const {
        return FlowParams::make(a_inf, mach, kutta_extent, sigma_a, sigma1,
                                sigma2);
    }

    DownwashSpec downwash() const {
        if (downwash_form == "harmonic-plunge")
            return make_harmonic_plunge(flow(), downwash_amplitude,
                                        downwash_frequency);
        if (downwash_form == "harmonic-pitch")
            return make_harmonic_pitch(flow(), downwash_amplitude,
                                       downwash_frequency);
        if (downwash_form == "zero") {
            DownwashSpec w;
            w.form = "zero";
            w.laplace_transform = [](double, const Cplx&) {
                return Cplx(0.0, 0.0);
            };
            return w;
        }
        throw ConfigError("unknown downwash_form: " + downwash_form);
    }

    void validate() const {
        try {
            (void)flow();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("flow parameters: ") + e.what());
        }
        (void)downwash();
        if (grid_size != 64 && grid_size != 128 && grid_size != 256 &&
            grid_size != 512)
            throw ConfigError("grid_size must be one of 64, 128, 256, 512");
        if (!(sigma_line >= sigma1 && sigma_line <= sigma2))
            throw ConfigError("sigma_line outside [sigma1, sigma2]");
        if (!(eta_max > 0.0)) throw ConfigError("eta_max must be positive");
        if (eta_samples < 1 || eta_samples % 2 == 0)
            throw ConfigError("eta_samples must be a positive odd integer");
        for (double t : {det_floor, resolvent_tol, im_tol, tail_tol})
            if (!(t > 0.0)) throw ConfigError("tolerances must be positive");
        if (phi_x.empty() || phi_z.empty() || phi_t.empty())
            throw ConfigError("phi_x, phi_z, phi_t must be non-empty");
        for (double z : phi_z)
            if (!(z > 0.0)) throw ConfigError("phi_z values must be positive");
        if (!(envelope_decay >= 0.0) || !(envelope_kappa >= 0.0))
            throw ConfigError("envelope parameters must be non-negative");
    }
};

namespace detail {

inline double config_number(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

inline std::vector<double> config_list(const std::string& key,
                                       const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(config_number(key, item));
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

}  // namespace detail

// Parses the flat key = value format ('#' starts a comment; blank lines
// ignored).  Does not validate; callers apply CLI overrides first.
inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::map<std::string, std::function<void(const std::string&)>> setters;
    auto num = [&](const char* k, double* slot) {
        setters[k] = [k, slot](const std::string& v) {
            *slot = detail::config_number(k, v);
        };
    };
    num("a_inf", &cfg.a_inf);
    num("mach", &cfg.mach);
    num("kutta_extent", &cfg.kutta_extent);
    num("sigma_a", &cfg.sigma_a);
    num("sigma1", &cfg.sigma1);
    num("sigma2", &cfg.sigma2);
    num("downwash_amplitude", &cfg.downwash_amplitude);
    num("downwash_frequency", &cfg.downwash_frequency);
    num("envelope_decay", &cfg.envelope_decay);
    num("envelope_kappa", &cfg.envelope_kappa);
    num("sigma_line", &cfg.sigma_line);
    num("eta_max", &cfg.eta_max);
    num("det_floor", &cfg.det_floor);
    num("resolvent_tol", &cfg.resolvent_tol);
    num("im_tol", &cfg.im_tol);
    num("tail_tol", &cfg.tail_tol);
    setters["grid_size"] = [&](const std::string& v) {
        cfg.grid_size = int(detail::config_number("grid_size", v));
    };
    setters["eta_samples"] = [&](const std::string& v) {
        cfg.eta_samples = int(detail::config_number("eta_samples", v));
    };
    setters["downwash_form"] = [&](const std::string& v) {
        cfg.downwash_form = v;
    };
    setters["output_dir"] = [&](const std::string& v) { cfg.output_dir = v; };
    setters["phi_x"] = [&](const std::string& v) {
        cfg.phi_x = detail::config_list("phi_x", v);
    };
    setters["phi_z"] = [&](const std::string& v) {
        cfg.phi_z = detail::config_list("phi_z", v);
    };
    setters["phi_t"] = [&](const std::string& v) {
        cfg.phi_t = detail::config_list("phi_t", v);
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        it->second(val);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace cohilbert

#endif  // COHILBERT_CONFIG_HPP
